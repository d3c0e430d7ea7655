"""Eigenvalue computation and empirical spectral statistics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import least_squares

from .ensembles import EnsembleSpec, HermitianMatrix, sample
from .errors import ContractViolationError, InsufficientStatisticsError, InvalidSpecError
from .streams import RandomStream

_Z95 = 1.959963984540054  # two-sided 95% normal quantile


@dataclass
class SpectrumBatch:
    spec: EnsembleSpec
    eigenvalues: list            # one sorted array per trial
    trials: int
    master_seed: int


@dataclass
class DOSEstimate:
    """Binned empirical density of states with per-trial standard errors."""

    bin_edges: np.ndarray
    density: np.ndarray
    std_err: np.ndarray
    total_eigenvalues: int
    n_outside: int = 0

    @property
    def bin_centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])

    @property
    def bin_width(self) -> float:
        return float(self.bin_edges[1] - self.bin_edges[0])


@dataclass
class R2Estimate:
    s_bins: np.ndarray           # bin centers of the scaled separation s
    r2: np.ndarray
    window: Tuple[float, float]
    mean_spacing: float
    pair_counts: np.ndarray = None


def _as_array(H):
    return H.entries if isinstance(H, HermitianMatrix) else np.asarray(H)


def eigenvalues(H) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian matrix (LAPACK backward-stable solver)."""
    A = _as_array(H)
    scale = np.linalg.norm(A)
    asym = np.linalg.norm(A - A.conj().T)
    if scale > 0 and asym > 1e-12 * scale:
        raise ContractViolationError(f"input is not Hermitian (asymmetry {asym:.3e})")
    return np.linalg.eigvalsh(A)


def operator_norm(H) -> float:
    ev = eigenvalues(H)
    return float(max(abs(ev[0]), abs(ev[-1])))


def collect_spectra(spec: EnsembleSpec, trials: int, master_seed: int,
                    map_fn: Callable = map) -> SpectrumBatch:
    """Sample `trials` matrices on substreams 0..trials-1 and diagonalize.

    `map_fn` lets the harness inject its worker pool; results are reduced in
    trial order regardless of completion order.
    """
    if trials < 1:
        raise InvalidSpecError("trials must be >= 1")

    def one(t):
        return eigenvalues(sample(spec, RandomStream(master_seed, t)))

    evs = list(map_fn(one, range(trials)))
    return SpectrumBatch(spec, evs, trials, master_seed)


def estimate_dos(batch: SpectrumBatch, bins: int, range_: Tuple[float, float]) -> DOSEstimate:
    """Histogram DOS, lower-edge-inclusive uniform bins.

    density = counts / (trials * dim * bin_width).  Per-bin errors come from
    the across-trial variance, not Poisson counts: eigenvalues within one
    trial are correlated by level repulsion.
    """
    if batch.trials < 1 or not batch.eigenvalues:
        raise InsufficientStatisticsError("empty batch")
    if bins < 2:
        raise InvalidSpecError("bins must be >= 2")
    lo, hi = range_
    if not (np.isfinite(lo) and np.isfinite(hi) and hi > lo):
        raise InvalidSpecError("range must be finite and increasing")
    edges = np.linspace(lo, hi, bins + 1)
    width = edges[1] - edges[0]
    dim = batch.spec.dim
    per_trial = np.empty((batch.trials, bins))
    outside = 0
    total = 0
    for t, ev in enumerate(batch.eigenvalues):
        counts, _ = np.histogram(ev, bins=edges)
        per_trial[t] = counts / (dim * width)
        outside += len(ev) - counts.sum()
        total += len(ev)
    density = per_trial.mean(axis=0)
    if batch.trials > 1:
        std_err = per_trial.std(axis=0, ddof=1) / np.sqrt(batch.trials)
    else:
        std_err = np.zeros(bins)
    return DOSEstimate(edges, density, std_err, total, int(outside))


def dos_distance(dos: DOSEstimate, reference: Callable, region: Tuple[float, float],
                 bin_averaged: bool = False) -> Tuple[float, float]:
    """(sup, L1) distance between the estimate and a reference density on `region`.

    The reference is evaluated at bin centers; with ``bin_averaged`` it is
    instead averaged over each bin by fixed-order Gauss-Legendre, which
    removes the curvature bias of the center-point rule.
    """
    centers = dos.bin_centers
    lo, hi = region
    m = (centers >= lo) & (centers <= hi)
    if not m.any():
        return 0.0, 0.0
    if bin_averaged:
        t, w = np.polynomial.legendre.leggauss(8)
        a = dos.bin_edges[:-1][m]
        ref = np.zeros(m.sum())
        for ti, wi in zip(t, w):
            ref += wi * np.asarray(reference(a + 0.5 * dos.bin_width * (ti + 1)))
        ref *= 0.5
    else:
        ref = np.asarray(reference(centers[m]))
    diff = np.abs(dos.density[m] - ref)
    return float(diff.max()), float(np.sum(diff) * dos.bin_width)


def tail_probability(spec: EnsembleSpec, a: float, trials: int, stream: RandomStream,
                     map_fn: Callable = map):
    """Empirical Prob(||H|| >= a*sqrt(6)) with a 95% Wilson interval."""
    if trials < 1:
        raise InvalidSpecError("trials must be >= 1")
    threshold = a * np.sqrt(6.0)

    def one(t):
        return operator_norm(sample(spec, stream.substream(t)))

    norms = np.fromiter(map_fn(one, range(trials)), dtype=float, count=trials)
    hits = int(np.sum(norms >= threshold))
    return hits / trials, wilson_interval(hits, trials)


def wilson_interval(hits: int, n: int, z: float = _Z95) -> Tuple[float, float]:
    p = hits / n
    denom = 1 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z * np.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return float(center - half), float(center + half)


def pair_correlation(batch: SpectrumBatch, window: Tuple[float, float],
                     s_max: float, s_bins: int) -> R2Estimate:
    """Two-level correlation from scaled pair separations inside a bulk window.

    Separations are measured in units of the local mean spacing
    Delta = 1/(dim * nu_hat) with nu_hat the measured density at the window
    center, and the histogram is normalized so that an uncorrelated
    spectrum gives r2 = 1 (the (W - s*Delta) factor corrects for the
    finite window overlap).
    """
    lo, hi = window
    W = hi - lo
    dim = batch.spec.dim
    selections = [ev[(ev >= lo) & (ev <= hi)] for ev in batch.eigenvalues]
    counts_in = np.array([len(s) for s in selections], dtype=float)
    if counts_in.mean() < 10:
        raise InsufficientStatisticsError(
            f"only {counts_in.mean():.1f} eigenvalues per trial in window")
    nu_hat = counts_in.mean() / (dim * W)
    delta = 1.0 / (dim * nu_hat)
    edges = np.linspace(0.0, s_max, s_bins + 1)
    pair_hist = np.zeros(s_bins)
    for sel in selections:
        if len(sel) < 2:
            continue
        seps = np.abs(sel[:, None] - sel[None, :])[np.triu_indices(len(sel), 1)]
        pair_hist += np.histogram(seps / delta, bins=edges)[0]
    centers = 0.5 * (edges[:-1] + edges[1:])
    ds = edges[1] - edges[0]
    # E[unordered pairs per bin] for an uncorrelated spectrum of n points in W
    m2 = np.mean(counts_in * (counts_in - 1.0))
    expected = batch.trials * m2 * np.maximum(W - centers * delta, 0.0) / W ** 2 * delta * ds
    with np.errstate(divide="ignore", invalid="ignore"):
        r2 = np.where(expected > 0, pair_hist / expected, 0.0)
    return R2Estimate(centers, r2, window, float(delta), pair_hist)


def support_edge(dos: DOSEstimate, q: float) -> float:
    """Symmetric q-quantile of |eigenvalue| from the binned estimate."""
    if not 0.5 < q < 1:
        raise InvalidSpecError("quantile must be in (0.5, 1)")
    centers = np.abs(dos.bin_centers)
    mass = dos.density * dos.bin_width
    order = np.argsort(centers, kind="stable")
    x = centers[order]
    cum = np.cumsum(mass[order])
    if cum[-1] <= 0:
        raise InsufficientStatisticsError("empty density")
    cum /= cum[-1]
    i = int(np.searchsorted(cum, q))
    i = min(i, len(x) - 1)
    return float(x[i])


def fit_semiellipse(dos: DOSEstimate):
    """Least-squares fit of C*sqrt(E0^2 - E^2) over the populated bins.

    Returns (C, E0, rms_residual).
    """
    centers = dos.bin_centers
    use = dos.density > 0
    if use.sum() < 5:
        raise InsufficientStatisticsError("fewer than 5 usable bins for the fit")
    x, y = centers[use], dos.density[use]

    def resid(p):
        c, e0 = p
        return c * np.sqrt(np.maximum(e0 * e0 - x * x, 0.0)) - y

    e0_guess = min(1.05 * np.max(np.abs(x)), np.max(np.abs(centers)))
    c_guess = y.max() / max(e0_guess, 1e-12)
    sol = least_squares(resid, x0=[c_guess, e0_guess])
    c, e0 = sol.x
    rms = float(np.sqrt(np.mean(resid(sol.x) ** 2)))
    return float(c), float(abs(e0)), rms


def fit_power_law(points: Sequence[Tuple[float, float]]):
    """Log-log least squares on (N, deviation) pairs; returns (exponent, intercept, r2)."""
    pts = np.asarray(points, dtype=float)
    if len(pts) < 3:
        raise InvalidSpecError("need at least 3 points")
    if (pts <= 0).any():
        raise InvalidSpecError("points must be positive for a log-log fit")
    x, y = np.log(pts[:, 0]), np.log(pts[:, 1])
    gamma, intercept = np.polyfit(x, y, 1)
    yhat = gamma * x + intercept
    ss_res = np.sum((y - yhat) ** 2)
    ss_tot = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(gamma), float(intercept), float(r2)
