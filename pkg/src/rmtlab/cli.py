"""Command-line harness: experiment orchestration, reports, CSV/SVG emission.

Every experiment is a named subcommand; ``--suite acceptance`` runs the full
acceptance checklist instead.  Config comes from flat flags, optionally
pre-loaded from a JSON file (flags win).  Exit codes: 0 success, 2 invalid
config, 3 numerical failure (a partial report is still written).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from . import __version__, acceptance, spectra, susy, theory
from ._kernels import BACKEND
from .ensembles import EnsembleKind, EnsembleSpec, Normalization, sample
from .errors import InsufficientStatisticsError, InvalidSpecError, QuadratureError
from .spectra import collect_spectra, estimate_dos
from .streams import RandomStream

EXPERIMENTS = ["dos", "pair-correlation", "norm-tail", "susy-dos", "critical-points",
               "tadpole", "convergence", "toy-edge", "joint-density"]

CSV_HEADER = "bin_center,value,std_err,reference_value"


@dataclass
class ExperimentConfig:
    experiment: str
    seed: int
    out_dir: Path
    ensemble: Optional[EnsembleSpec] = None
    trials: int = 200
    bins: int = 80
    range: Tuple[float, float] = (-2.5, 2.5)
    svg: Optional[str] = None
    threads: int = 1
    tolerances: Dict[str, float] = field(default_factory=dict)
    extra: Dict = field(default_factory=dict)

    def tol(self, name: str, default: float) -> float:
        return float(self.tolerances.get(name, default))


@dataclass
class ExperimentReport:
    experiment: str
    config: Dict
    metrics: Dict[str, float] = field(default_factory=dict)
    criteria: Dict[str, bool] = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)
    rows: List[Tuple[float, float, float, float]] = field(default_factory=list)
    wall_time_s: float = 0.0
    schema: int = 1
    version: str = __version__

    @property
    def passed(self) -> bool:
        return all(self.criteria.values()) if self.criteria else True

    def to_json(self) -> str:
        payload = {"schema": self.schema, "version": self.version,
                   "experiment": self.experiment, "config": self.config,
                   "metrics": self.metrics, "criteria": self.criteria,
                   "warnings": self.warnings, "wall_time_s": self.wall_time_s}
        return json.dumps(payload, indent=2, sort_keys=True)


def emit_csv(report: ExperimentReport, path) -> None:
    lines = [CSV_HEADER]
    for row in report.rows:
        lines.append(",".join(f"{v:.17g}" for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def emit_svg(report: ExperimentReport, path) -> None:
    Path(path).write_text(_render_svg(report))


def _render_svg(report: ExperimentReport, width=720, height=440) -> str:
    """Self-contained static SVG: value bars plus a reference polyline."""
    ml, mr, mt, mb = 60, 20, 30, 45
    pw, ph = width - ml - mr, height - mt - mb
    rows = report.rows
    parts = [f'<?xml version="1.0" encoding="UTF-8"?>\n'
             f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
             f'height="{height}" viewBox="0 0 {width} {height}">',
             f'<rect width="{width}" height="{height}" fill="white"/>',
             f'<text x="{ml}" y="20" font-family="monospace" font-size="13">'
             f'{report.experiment}</text>']
    if rows:
        xs = np.array([r[0] for r in rows])
        vals = np.array([r[1] for r in rows])
        refs = np.array([r[3] for r in rows])
        x0, x1 = float(xs.min()), float(xs.max())
        span = x1 - x0 or 1.0
        bw = span / max(len(xs) - 1, 1)
        x0, x1 = x0 - bw / 2, x1 + bw / 2
        y1 = max(float(np.max(vals)), float(np.max(refs)), 1e-12) * 1.05

        def X(x):
            return ml + (x - x0) / (x1 - x0) * pw

        def Y(y):
            return mt + ph - y / y1 * ph

        for x, v in zip(xs, vals):
            h = max(Y(0.0) - Y(v), 0.0)
            parts.append(f'<rect x="{X(x - bw / 2):.2f}" y="{Y(v):.2f}" '
                         f'width="{X(x + bw / 2) - X(x - bw / 2):.2f}" height="{h:.2f}" '
                         f'fill="#7aa6c2" stroke="none"/>')
        pts = " ".join(f"{X(x):.2f},{Y(r):.2f}" for x, r in zip(xs, refs))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="#c33" '
                     f'stroke-width="1.5"/>')
        for i in range(6):
            xv = x0 + (x1 - x0) * i / 5
            parts.append(f'<line x1="{X(xv):.2f}" y1="{mt + ph}" x2="{X(xv):.2f}" '
                         f'y2="{mt + ph + 4}" stroke="black"/>')
            parts.append(f'<text x="{X(xv):.2f}" y="{mt + ph + 18}" font-size="10" '
                         f'font-family="monospace" text-anchor="middle">{xv:.3g}</text>')
            yv = y1 * i / 5
            parts.append(f'<line x1="{ml - 4}" y1="{Y(yv):.2f}" x2="{ml}" '
                         f'y2="{Y(yv):.2f}" stroke="black"/>')
            parts.append(f'<text x="{ml - 8}" y="{Y(yv) + 3:.2f}" font-size="10" '
                         f'font-family="monospace" text-anchor="end">{yv:.3g}</text>')
    parts.append(f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" '
                 f'stroke="black"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# -- worker pool ----------------------------------------------------------------------


def _worker_cap() -> Optional[int]:
    cap = os.environ.get("RMT_THREADS")
    return max(1, int(cap)) if cap else None


def make_mapper(threads: int) -> Callable:
    cap = _worker_cap()
    n = min(threads, cap) if cap else threads
    if n <= 1:
        return map

    def pooled(fn, it):
        with ThreadPoolExecutor(max_workers=n) as pool:
            return list(pool.map(fn, it))  # results come back in input order

    return pooled


# -- experiment implementations --------------------------------------------------------


def _dos_reference_tol(kind: EnsembleKind) -> Optional[float]:
    return {EnsembleKind.GUE: 0.03, EnsembleKind.FLIP2D: 0.03,
            EnsembleKind.FOLDED3D: 0.05}.get(kind)


def _run_dos(cfg: ExperimentConfig, report: ExperimentReport, map_fn):
    batch = collect_spectra(cfg.ensemble, cfg.trials, cfg.seed, map_fn)
    dos = estimate_dos(batch, cfg.bins, cfg.range)
    sup, l1 = spectra.dos_distance(dos, theory.semicircle, (-2.0, 2.0))
    cover = np.sum(dos.density) * dos.bin_width
    report.metrics.update({"sup_vs_semicircle": sup, "l1_vs_semicircle": l1,
                           "mass_in_range": float(cover),
                           "eigenvalues_outside": float(dos.n_outside)})
    default = _dos_reference_tol(cfg.ensemble.kind)
    if default is not None:
        tol = cfg.tol("sup", default)
        report.criteria["sup_within_tol"] = sup <= tol
        report.criteria["l1_within_tol"] = l1 <= cfg.tol("l1", default)
    ref = theory.semicircle(dos.bin_centers)
    report.rows = list(zip(dos.bin_centers, dos.density, dos.std_err, ref))


def _run_pair_correlation(cfg: ExperimentConfig, report: ExperimentReport, map_fn):
    window = cfg.extra.get("window", (-0.2, 0.2))
    s_max = cfg.extra.get("s_max", 3.0)
    s_bins = cfg.extra.get("s_bins", 30)
    batch = collect_spectra(cfg.ensemble, cfg.trials, cfg.seed, map_fn)
    est = spectra.pair_correlation(batch, window, s_max, s_bins)
    ref = theory.sine_kernel_r2(est.s_bins)
    with np.errstate(divide="ignore", invalid="ignore"):
        stderr = np.where(est.pair_counts > 0, est.r2 / np.sqrt(est.pair_counts), 0.0)
    m = (est.s_bins >= 0.2) & (est.s_bins <= 2.0)
    max_dev = float(np.max(np.abs(est.r2 - ref)[m]))
    report.metrics.update({"max_dev_sine_kernel": max_dev,
                           "r2_first_bin": float(est.r2[0]),
                           "mean_spacing": est.mean_spacing})
    report.criteria["sine_kernel_within_tol"] = max_dev <= cfg.tol("r2", 0.1)
    report.criteria["repulsion"] = est.r2[0] < cfg.tol("repulsion", 0.2)
    report.rows = list(zip(est.s_bins, est.r2, stderr, ref))


def _run_norm_tail(cfg: ExperimentConfig, report: ExperimentReport, map_fn):
    a_values = cfg.extra.get("a_values", [1.5, 2.0, 3.0])
    stream = RandomStream(cfg.seed)

    def one(t):
        return spectra.operator_norm(sample(cfg.ensemble, stream.substream(t)))

    norms = np.fromiter(map_fn(one, range(cfg.trials)), dtype=float, count=cfg.trials)
    for a in a_values:
        hits = int(np.sum(norms >= a * np.sqrt(6.0)))
        est = hits / cfg.trials
        lo, hi = spectra.wilson_interval(hits, cfg.trials)
        bound = theory.lemma1_bound(cfg.ensemble.dim, a)
        report.metrics[f"estimate_a{a:g}"] = est
        report.metrics[f"bound_a{a:g}"] = bound
        report.criteria[f"bound_holds_a{a:g}"] = est <= bound + 3.0 * (hi - lo)
        report.rows.append((a, est, hi - lo, min(bound, 1.0)))
    report.metrics["mean_norm"] = float(norms.mean())


def _run_susy_dos(cfg: ExperimentConfig, report: ExperimentReport, map_fn):
    n = cfg.extra.get("half_dim", 16)
    energy = cfg.extra.get("energy", 0.0)
    qcfg = susy.QuadratureConfig(
        nodes_per_axis=cfg.extra.get("nodes", 24),
        radial_nodes=cfg.extra.get("radial_nodes", 20))
    nu, err = susy.nu_susy(n, energy, qcfg)
    z, zerr = susy.normalization_identity(n, 0.0, qcfg)
    lead = susy.leading_order_nu(n, energy)
    report.metrics.update({"nu_susy": nu, "quad_err": err,
                           "norm_identity_re": z.real, "norm_identity_im": z.imag,
                           "norm_identity_err": zerr, "leading_order": lead})
    report.criteria["quadrature_converged"] = err <= cfg.tol("quad", 1e-3)
    report.criteria["normalization_identity"] = abs(z - 1.0) <= cfg.tol("norm", 1e-3)
    mc_trials = cfg.extra.get("mc_trials", 0)
    if mc_trials:
        eps = cfg.extra.get("epsilon", 0.02)
        mc, mc_err = acceptance.smoothed_mc_dos(
            EnsembleSpec.flip2d(n), energy, eps, mc_trials, cfg.seed, map_fn)
        diff = abs(nu - mc)
        report.metrics.update({"mc_smoothed": mc, "mc_err": mc_err, "diff": diff})
        report.criteria["susy_matches_mc"] = diff <= cfg.tol("mc", 0.06)
    report.rows = [(energy, nu, err, lead)]


def _run_critical_points(cfg: ExperimentConfig, report: ExperimentReport, map_fn):
    cp = theory.critical_points()
    names = ["s1", "s2", "s3", "s4"]
    for name, pt, act in zip(names, cp.points, cp.actions):
        res = float(np.max(np.abs(theory.saddle_residuals(pt))))
        report.metrics[f"action_{name}"] = act
        report.metrics[f"residual_{name}"] = res
        report.rows.append((float(names.index(name) + 1), act, res, 0.0))
    report.metrics["z_s"] = cp.z_s
    report.criteria["z_in_bracket"] = 0.5 < cp.z_s < 1.0
    report.criteria["residuals_small"] = all(
        report.metrics[f"residual_{n}"] < 1e-8 for n in names)
    report.criteria["dominant_actions_zero"] = (cp.actions[0] == 0.0
                                                and cp.actions[1] == 0.0)
    report.criteria["subdominant_above_bound"] = min(cp.actions[2:]) > 0.15


def _run_tadpole(cfg: ExperimentConfig, report: ExperimentReport, map_fn):
    eps = cfg.extra.get("epsilon", 1e-4)
    cutoff = cfg.extra.get("cutoff", 10.0)
    sigma = theory.tadpole_self_energy(eps, cutoff)
    rel = abs(sigma.imag - np.pi ** 2) / np.pi ** 2
    report.metrics.update({"re": sigma.real, "im": sigma.imag, "rel_dev_pi2": rel})
    report.criteria["im_matches_pi2"] = rel <= cfg.tol("tadpole", 0.01)
    report.rows = [(eps, sigma.imag, 0.0, float(np.pi ** 2))]


def _run_convergence(cfg: ExperimentConfig, report: ExperimentReport, map_fn):
    dims = cfg.extra.get("dims", (64, 128, 256, 512, 1024))
    records, gamma, r2 = acceptance.convergence_study(
        dims=dims, seed=cfg.seed, map_fn=map_fn)
    report.metrics.update({"gamma": gamma, "fit_r2": r2})
    for r in records:
        report.metrics[f"deviation_{r['dim']}"] = r["deviation"]
        report.metrics[f"trials_{r['dim']}"] = float(r["trials"])
    report.criteria["gamma_in_range"] = (cfg.tol("gamma_lo", -1.3) <= gamma
                                         <= cfg.tol("gamma_hi", -0.7))
    report.criteria["mc_error_small"] = all(r["ratio"] <= 1 / 3 for r in records)
    intercept = np.exp(np.log(records[0]["deviation"])
                       - gamma * np.log(records[0]["dim"]))
    report.rows = [(float(r["dim"]), r["deviation"], r["mc_err"],
                    float(intercept * r["dim"] ** gamma)) for r in records]


def _run_toy_edge(cfg: ExperimentConfig, report: ExperimentReport, map_fn):
    batch = collect_spectra(cfg.ensemble, cfg.trials, cfg.seed, map_fn)
    dos = estimate_dos(batch, cfg.bins, cfg.range)
    c, e0, rms = spectra.fit_semiellipse(dos)
    peak = float(dos.density.max())
    dens, se = dos.density, dos.std_err
    sym = bool(np.all(np.abs(dens - dens[::-1]) <= 3.0 * (se + se[::-1]) + 1e-12))
    report.metrics.update({"amplitude": c, "edge": e0, "rms_residual": rms,
                           "peak": peak})
    report.criteria["residual_small"] = rms <= cfg.tol("rms_frac", 0.05) * peak
    report.criteria["edge_in_bracket"] = (cfg.tol("edge_lo", 1.2) <= e0
                                          <= cfg.tol("edge_hi", 1.9))
    report.criteria["symmetric"] = sym
    model = c * np.sqrt(np.maximum(e0 ** 2 - dos.bin_centers ** 2, 0.0))
    report.rows = list(zip(dos.bin_centers, dos.density, dos.std_err, model))


def _run_joint_density(cfg: ExperimentConfig, report: ExperimentReport, map_fn):
    trials = cfg.trials
    spec = EnsembleSpec.gue(2)
    mats = np.empty((trials, 2, 2), dtype=complex)
    for t in range(trials):
        mats[t] = sample(spec, RandomStream(cfg.seed, t)).entries
    ev = np.linalg.eigvalsh(mats)
    chi2, dof, crit = acceptance._joint_density_chi2(ev[:, 0], ev[:, 1])
    report.metrics.update({"chi2": chi2, "dof": float(dof), "crit_1pct": crit})
    report.criteria["chi2_below_1pct_critical"] = chi2 < crit
    # no binned series for this experiment; the CSV stays header-only


_RUNNERS = {
    "dos": _run_dos,
    "pair-correlation": _run_pair_correlation,
    "norm-tail": _run_norm_tail,
    "susy-dos": _run_susy_dos,
    "critical-points": _run_critical_points,
    "tadpole": _run_tadpole,
    "convergence": _run_convergence,
    "toy-edge": _run_toy_edge,
    "joint-density": _run_joint_density,
}


def run(cfg: ExperimentConfig) -> ExperimentReport:
    """Dispatch one experiment and write its CSV/JSON (and optional SVG)."""
    report = ExperimentReport(cfg.experiment, config=_echo_config(cfg))
    map_fn = make_mapper(cfg.threads)
    t0 = time.perf_counter()
    try:
        _RUNNERS[cfg.experiment](cfg, report, map_fn)
    finally:
        report.wall_time_s = time.perf_counter() - t0
        _write_outputs(cfg, report)
    return report


def _echo_config(cfg: ExperimentConfig) -> Dict:
    ens = None
    if cfg.ensemble is not None:
        ens = {"kind": cfg.ensemble.kind.value, "dim": cfg.ensemble.dim,
               "half_dim": cfg.ensemble.half_dim, "levels": cfg.ensemble.levels,
               "folds": cfg.ensemble.folds,
               "normalization": cfg.ensemble.normalization.value}
    return {"experiment": cfg.experiment, "seed": cfg.seed, "trials": cfg.trials,
            "bins": cfg.bins, "range": list(cfg.range), "ensemble": ens,
            "tolerances": cfg.tolerances,
            "extra": {k: (list(v) if isinstance(v, tuple) else v)
                      for k, v in cfg.extra.items()}}


def _write_outputs(cfg: ExperimentConfig, report: ExperimentReport) -> None:
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    stem = cfg.experiment
    emit_csv(report, cfg.out_dir / f"{stem}.csv")
    (cfg.out_dir / f"{stem}.json").write_text(report.to_json() + "\n")
    if cfg.svg:
        emit_svg(report, cfg.svg)


# -- argument parsing -------------------------------------------------------------------


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="rmtlab",
        description="Random-matrix ensembles, spectral statistics, and "
                    "mean-field cross-checks.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--suite", choices=["acceptance"],
                        help="run a named suite instead of a single experiment")
    parser.add_argument("--only", type=str, default=None,
                        help="comma-separated criterion numbers for --suite")
    sub = parser.add_subparsers(dest="experiment")
    subparsers = {}
    for name in EXPERIMENTS:
        p = sub.add_parser(name)
        subparsers[name] = p
        p.add_argument("--config", type=str, default=None,
                       help="JSON file with flag defaults")
        p.add_argument("--seed", type=int, default=None, help="required; no wall-clock default")
        p.add_argument("--trials", type=int, default=200)
        p.add_argument("--bins", type=int, default=80)
        p.add_argument("--range", type=float, nargs=2, default=[-2.5, 2.5])
        p.add_argument("--out-dir", type=str, default=".")
        p.add_argument("--svg", type=str, default=None)
        p.add_argument("--threads", type=int, default=0,
                       help="worker threads (0 = cpu count, capped by RMT_THREADS)")
        p.add_argument("--tol", action="append", default=[],
                       metavar="NAME=VALUE", help="tolerance override")
        p.add_argument("--ensemble", choices=[k.value for k in EnsembleKind],
                       default="gue")
        p.add_argument("--dim", type=int, default=None)
        p.add_argument("--half-dim", type=int, default=None)
        p.add_argument("--levels", type=int, default=None)
        p.add_argument("--folds", type=int, default=None)
        p.add_argument("--normalization",
                       choices=[n.value for n in Normalization],
                       default=Normalization.INVERSE_DIM.value)
        if name == "pair-correlation":
            p.add_argument("--window", type=float, nargs=2, default=[-0.2, 0.2])
            p.add_argument("--s-max", type=float, default=3.0)
            p.add_argument("--s-bins", type=int, default=30)
            p.set_defaults(dim=400)
        if name == "norm-tail":
            p.add_argument("--a", type=float, nargs="+", default=[1.5, 2.0, 3.0])
            p.set_defaults(trials=10_000)
        if name == "susy-dos":
            p.add_argument("--energy", type=float, default=0.0)
            p.add_argument("--nodes", type=int, default=24)
            p.add_argument("--radial-nodes", type=int, default=20)
            p.add_argument("--mc-trials", type=int, default=0)
            p.add_argument("--epsilon", type=float, default=0.02)
        if name == "tadpole":
            p.add_argument("--epsilon", type=float, default=1e-4)
            p.add_argument("--cutoff", type=float, default=10.0)
        if name == "convergence":
            p.add_argument("--dims", type=str, default="64,128,256,512,1024")
        if name == "toy-edge":
            p.set_defaults(ensemble=EnsembleKind.HIER_TOY.value, levels=4,
                           bins=60, range=[-2.2, 2.2])
        if name == "joint-density":
            p.set_defaults(trials=100_000, dim=2)
    return parser, subparsers


def _spec_from_args(args) -> EnsembleSpec:
    kind = EnsembleKind(args.ensemble)
    norm = Normalization(args.normalization)
    if kind == EnsembleKind.GUE:
        if args.dim is None:
            raise InvalidSpecError("gue requires --dim")
        return EnsembleSpec.gue(args.dim, norm)
    if kind == EnsembleKind.FLIP2D:
        if args.half_dim is None:
            raise InvalidSpecError("flip2d requires --half-dim")
        return EnsembleSpec.flip2d(args.half_dim, norm)
    if kind == EnsembleKind.HIER_TOY:
        if args.levels is None:
            raise InvalidSpecError("hier-toy requires --levels")
        return EnsembleSpec.hier_toy(args.levels, norm)
    if kind == EnsembleKind.HIER_ISO:
        if args.levels is None:
            raise InvalidSpecError("hier-iso requires --levels")
        return EnsembleSpec.hier_iso(args.levels, norm)
    if args.folds is None or args.dim is None:
        raise InvalidSpecError("folded3d requires --dim and --folds")
    return EnsembleSpec.folded3d(args.dim, args.folds, norm)


def _config_from_args(args) -> ExperimentConfig:
    if args.seed is None:
        raise InvalidSpecError("--seed is required (reproducibility is a contract)")
    tolerances = {}
    for item in args.tol:
        name, _, value = item.partition("=")
        if not value:
            raise InvalidSpecError(f"bad --tol {item!r}, expected NAME=VALUE")
        tolerances[name] = float(value)
    extra = {}
    exp = args.experiment
    ensemble = None
    if exp in ("dos", "pair-correlation", "norm-tail", "toy-edge"):
        ensemble = _spec_from_args(args)
    if exp == "pair-correlation":
        extra = {"window": tuple(args.window), "s_max": args.s_max,
                 "s_bins": args.s_bins}
    elif exp == "norm-tail":
        extra = {"a_values": list(args.a)}
    elif exp == "susy-dos":
        extra = {"half_dim": args.half_dim or 16, "energy": args.energy,
                 "nodes": args.nodes, "radial_nodes": args.radial_nodes,
                 "mc_trials": args.mc_trials, "epsilon": args.epsilon}
    elif exp == "tadpole":
        extra = {"epsilon": args.epsilon, "cutoff": args.cutoff}
    elif exp == "convergence":
        extra = {"dims": tuple(int(d) for d in str(args.dims).split(","))}
    threads = args.threads if args.threads > 0 else (os.cpu_count() or 1)
    return ExperimentConfig(
        experiment=exp, seed=args.seed, out_dir=Path(args.out_dir), ensemble=ensemble,
        trials=args.trials, bins=args.bins, range=tuple(args.range),
        svg=args.svg, threads=threads, tolerances=tolerances, extra=extra)


def _run_suite(args) -> int:
    only = {int(x) for x in args.only.split(",")} if args.only else None
    map_fn = make_mapper(os.cpu_count() or 1)
    print(f"rmtlab {__version__} acceptance suite (kernel backend: {BACKEND})")
    results = acceptance.run_all(map_fn=map_fn, only=only, progress=print)
    n_pass = sum(r.passed for r in results)
    print(f"{n_pass}/{len(results)} criteria passed")
    return 0 if n_pass == len(results) else 3


def main(argv=None) -> int:
    parser, subparsers = _build_parser()
    args = parser.parse_args(argv)
    if args.suite:
        return _run_suite(args)
    if not args.experiment:
        parser.print_usage(sys.stderr)
        print("rmtlab: error: an experiment subcommand or --suite is required",
              file=sys.stderr)
        return 2
    if args.config:
        # JSON supplies defaults; explicit flags still win on the re-parse
        try:
            with open(args.config) as fh:
                loaded = json.load(fh)
            subparsers[args.experiment].set_defaults(
                **{k.replace("-", "_"): v for k, v in loaded.items()})
        except (OSError, json.JSONDecodeError) as exc:
            print(f"rmtlab: invalid config file: {exc}", file=sys.stderr)
            return 2
        args = parser.parse_args(argv)
    try:
        cfg = _config_from_args(args)
    except (InvalidSpecError, ValueError) as exc:
        print(f"rmtlab: invalid config: {exc}", file=sys.stderr)
        return 2
    try:
        report = run(cfg)
    except InvalidSpecError as exc:
        print(f"rmtlab: invalid config: {exc}", file=sys.stderr)
        return 2
    except (InsufficientStatisticsError, QuadratureError) as exc:
        print(f"rmtlab: numerical failure: {exc}", file=sys.stderr)
        return 3
    for name, ok in report.criteria.items():
        print(f"[{'PASS' if ok else 'FAIL'}] {cfg.experiment}:{name}")
    for key, val in report.metrics.items():
        print(f"  {key} = {val:.8g}")
    return 0 if report.passed else 3


if __name__ == "__main__":
    sys.exit(main())
