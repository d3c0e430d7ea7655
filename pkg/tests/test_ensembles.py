import numpy as np
import pytest

from rmtlab.ensembles import (EnsembleKind, EnsembleSpec, Normalization,
                              independent_parameter_count, load_matrix, orbit_map,
                              sample, sample_flip2d, sample_folded3d, sample_gue,
                              sample_hier_iso, sample_hier_toy, save_matrix)
from rmtlab.errors import InvalidSpecError
from rmtlab.streams import RandomStream

ALL_SPECS = [
    EnsembleSpec.gue(6),
    EnsembleSpec.flip2d(4),
    EnsembleSpec.hier_toy(2),
    EnsembleSpec.hier_iso(4),
    EnsembleSpec.folded3d(16, 2),
]


def value_partition(spec, seeds=(1, 2)):
    """Independent orbit oracle: positions sharing values across two draws.

    Two strict-upper positions belong to one orbit iff they carry identical
    values in both samples (ties across orbits have probability zero).
    """
    H1 = sample(spec, RandomStream(seeds[0])).entries
    H2 = sample(spec, RandomStream(seeds[1])).entries
    groups = {}
    d = spec.dim
    for r in range(d):
        for c in range(r + 1, d):
            groups.setdefault((H1[r, c], H2[r, c]), []).append((r, c))
    return {frozenset(v) for v in groups.values()}


def map_partition(spec):
    om = orbit_map(spec)
    groups = {}
    for r, c, l in zip(om.rows, om.cols, om.labels):
        groups.setdefault(("v", l), []).append((int(r), int(c)))
    for r, c, l in zip(om.zero_rows, om.zero_cols, om.zero_labels):
        groups.setdefault(("z",), []).append((int(r), int(c)))  # zeros all alias 0.0
    return {frozenset(v) for v in groups.values()}


@pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: s.kind.value)
def test_hermitian_bitwise(spec):
    H = sample(spec, RandomStream(42)).entries
    assert (H == H.conj().T).all()
    assert (H.diagonal().imag == 0).all()


@pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: s.kind.value)
def test_resampling_bit_identical(spec):
    a = sample(spec, RandomStream(7, 3)).entries
    b = sample(spec, RandomStream(7, 3)).entries
    assert np.array_equal(a, b)
    c = sample(spec, RandomStream(7, 4)).entries
    assert not np.array_equal(a, c)


@pytest.mark.parametrize("spec", [EnsembleSpec.flip2d(2), EnsembleSpec.flip2d(4),
                                  EnsembleSpec.hier_iso(3), EnsembleSpec.folded3d(8, 1)],
                         ids=["flip-n2", "flip-n4", "iso-j3", "folded"])
def test_flip_identity_exact(spec):
    H = sample(spec, RandomStream(9)).entries
    d = spec.dim
    for r in range(d):
        for c in range(d):
            assert H[r, c] == H[d - 1 - c, d - 1 - r]


@pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: s.kind.value)
def test_orbit_map_matches_sampled_values(spec):
    assert value_partition(spec) == map_partition(spec)


@pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: s.kind.value)
def test_orbit_map_partitions_upper_triangle(spec):
    orbit_map(spec).validate()


def test_scatter_and_reread_reproduces_partition():
    spec = EnsembleSpec.flip2d(3)
    om = orbit_map(spec)
    H = np.zeros((spec.dim, spec.dim))
    H[om.rows, om.cols] = om.labels + 1.0
    seen = {}
    for r, c, l in zip(om.rows, om.cols, om.labels):
        seen.setdefault(l, set()).add(H[r, c])
    assert all(len(v) == 1 for v in seen.values())
    assert len({next(iter(v)) for v in seen.values()}) == om.n_offdiag


# -- GUE ------------------------------------------------------------------------------


def test_gue_dim1_unit_variance():
    vals = np.array([sample_gue(1, RandomStream(3, t)).entries[0, 0].real
                     for t in range(10_000)])
    # variance 1/dim = 1 under inverse-dim normalization
    assert abs(vals.var() - 1.0) < 5 * np.sqrt(2.0 / len(vals))


def test_gue_offdiag_covariance_dim512():
    H = sample_gue(512, RandomStream(4)).entries
    rows, cols = np.triu_indices(512, 1)
    z = H[rows[:10_000], cols[:10_000]]
    mean_sq = np.mean(np.abs(z) ** 2)
    se = (1.0 / 512) / np.sqrt(len(z))  # |z|^2 is exponential: std = mean
    assert abs(mean_sq - 1.0 / 512) < 5 * se


def test_gue_unit_entries_scale():
    spec = EnsembleSpec.gue(64, Normalization.UNIT_ENTRIES)
    H = sample(spec, RandomStream(5)).entries
    rows, cols = np.triu_indices(64, 1)
    assert abs(np.mean(np.abs(H[rows, cols]) ** 2) - 1.0) < 0.15


def test_gue_orbit_counts():
    for d in (3, 5, 8):
        assert independent_parameter_count(EnsembleSpec.gue(d)) == d + d * (d - 1) // 2
    om = orbit_map(EnsembleSpec.gue(3))
    tags = [o.tag for o in om.orbits()]
    assert tags.count("independent-complex") == 3
    assert tags.count("independent-real") == 3


def test_designated_orbit_variance():
    # spec invariant: empirical variance of one off-diagonal orbit ~ 1/D over 1e4 draws
    spec = EnsembleSpec.flip2d(4)
    vals = np.array([sample(spec, RandomStream(6, t)).entries[0, 1]
                     for t in range(10_000)])
    mean_sq = np.mean(np.abs(vals) ** 2)
    se = (1.0 / 8) / np.sqrt(len(vals))
    assert abs(mean_sq - 1.0 / 8) < 5 * se


# -- flip model -----------------------------------------------------------------------


def test_flip_diagonal_shared():
    H = sample_flip2d(4, RandomStream(11)).entries
    d = H.diagonal()
    assert (d == d[0]).all()


def test_flip_antidiagonal_entries_independent():
    H = sample_flip2d(4, RandomStream(12)).entries
    anti = [H[r, 7 - r] for r in range(4)]
    assert len({complex(v) for v in anti}) == 4


@pytest.mark.parametrize("n", [2, 3, 4])
def test_flip_orbit_count_formula(n):
    # brute-force partition (value oracle) agrees with the closed form N^2 + 1
    spec = EnsembleSpec.flip2d(n)
    parts = value_partition(spec)
    n_diag_vars = 1
    assert len(parts) + n_diag_vars == n * n + 1
    assert independent_parameter_count(spec) == n * n + 1


# -- hierarchical toy model -----------------------------------------------------------


def toy_zero_oracle(dim):
    """Direct recursion for the zero pattern, independent of the builder."""
    zero = np.zeros((dim, dim), dtype=bool)

    def mark(off, size):
        q = size // 4
        zero[off:off + q, off + q:off + 2 * q] = True
        zero[off + 2 * q:off + 3 * q, off + 3 * q:off + 4 * q] = True
        if q >= 4:
            for b in range(4):
                mark(off + b * q, q)

    mark(0, dim)
    return zero


def test_toy_level1_zero_pattern():
    H = sample_hier_toy(1, RandomStream(13)).entries
    assert H[0, 1] == 0 and H[2, 3] == 0
    for r, c in [(0, 2), (0, 3), (1, 2), (1, 3)]:
        assert H[r, c] != 0


def test_toy_level2_zero_fraction():
    H = sample_hier_toy(2, RandomStream(14)).entries
    oracle = toy_zero_oracle(16)
    rows, cols = np.triu_indices(16, 1)
    sampled_zero = H[rows, cols] == 0
    assert np.array_equal(sampled_zero, oracle[rows, cols])
    assert sampled_zero.sum() == 40  # = (1/3) of 120, from the recursion oracle


def test_toy_zero_orbits_tagged():
    om = orbit_map(EnsembleSpec.hier_toy(1))
    zero_orbits = [o for o in om.orbits() if o.tag == "zero"]
    assert len(zero_orbits) == 2


def test_toy_parameter_count():
    # nonzero upper entries + (4^(L+1)-1)/3 diagonal level variables
    for L in (1, 2):
        d = 4 ** L
        zeros = int(toy_zero_oracle(d)[np.triu_indices(d, 1)].sum())
        expect = (d * (d - 1) // 2 - zeros) + (4 ** (L + 1) - 1) // 3
        assert independent_parameter_count(EnsembleSpec.hier_toy(L)) == expect


def test_toy_diagonal_level_covariance():
    # diag_i = sum over levels of group variables: cov = (#shared levels)/D
    spec = EnsembleSpec.hier_toy(2)
    trials = 4000
    diags = np.array([sample(spec, RandomStream(15, t)).entries.diagonal().real
                      for t in range(trials)])
    v = 1.0 / 16
    cov = np.cov(diags.T)
    assert abs(cov[0, 0] - 3 * v) < 0.02          # levels 0,1,2 all contribute
    assert abs(cov[0, 1] - 2 * v) < 0.02          # same level-1 block of four
    assert abs(cov[0, 5] - v) < 0.02              # only V0 shared
    # V0 in every entry: no diagonal pair is uncorrelated
    off = cov[np.triu_indices(16, 1)]
    assert off.min() > v - 0.02


# -- hierarchical isotropic model -----------------------------------------------------


def test_iso_near_diagonal_blocks():
    # j=3, band 1: shell k=2 tiles merge with their flip mirror
    H = sample_hier_iso(3, RandomStream(16)).entries
    group = [H[r, r + 1] for r in (0, 1, 2, 4, 5, 6)]
    assert len({complex(v) for v in group}) == 1
    assert H[3, 4] != H[0, 1]          # separate flip-fixed orbit


def test_iso_half_band_orbits():
    # j=3, band D/2 = 4: singleton tiles, paired only by the flip
    H = sample_hier_iso(3, RandomStream(17)).entries
    assert H[0, 4] == H[3, 7]
    assert H[1, 5] == H[2, 6]
    assert H[0, 4] != H[1, 5]


def test_iso_diagonal_shared_and_count_fixture():
    H = sample_hier_iso(4, RandomStream(18)).entries
    d = H.diagonal()
    assert (d == d[0]).all()
    # regression fixture from exhaustive enumeration of the tiling at D=16
    assert independent_parameter_count(EnsembleSpec.hier_iso(4)) == 48
    assert independent_parameter_count(EnsembleSpec.hier_iso(3)) == 14


# -- folded 3D model ------------------------------------------------------------------


def test_folded_no_folds_is_gue_like():
    spec = EnsembleSpec.folded3d(8, 0)
    H = sample(spec, RandomStream(19)).entries
    rows, cols = np.triu_indices(8, 1)
    vals = H[rows, cols]
    assert len({complex(v) for v in vals}) == len(vals)
    assert (H.diagonal() == H[0, 0]).all()
    assert independent_parameter_count(spec) == 8 * 7 // 2 + 1


def test_folded_one_fold_band_orbits():
    # N=4, band d=1 has positions {1,3} identified and {2} alone
    H = sample_folded3d(4, 1, RandomStream(20)).entries
    assert H[0, 1] == H[2, 3]
    assert H[1, 2] != H[0, 1]


def test_folded_parameter_count_fixture():
    # hand enumeration: bands of length L contribute ceil(L/2) orbits at k=1
    expect = sum((8 - d + 1) // 2 for d in range(1, 8)) + 1
    assert independent_parameter_count(EnsembleSpec.folded3d(8, 1)) == expect == 17


def test_folded_count_scaling_heuristic():
    # about N^2/2^k independent parameters when 2^k ~ sqrt(N)
    n, k = 64, 3
    count = independent_parameter_count(EnsembleSpec.folded3d(n, k))
    assert 0.4 * n * n / 2 ** k < count < 1.6 * n * n / 2 ** k


# -- spec validation ------------------------------------------------------------------


def test_invalid_specs():
    with pytest.raises(InvalidSpecError):
        EnsembleSpec.gue(0)
    with pytest.raises(InvalidSpecError):
        EnsembleSpec(EnsembleKind.FLIP2D, 6, half_dim=2)
    with pytest.raises(InvalidSpecError):
        EnsembleSpec(EnsembleKind.HIER_TOY, 8, levels=2)
    with pytest.raises(InvalidSpecError):
        EnsembleSpec.folded3d(8, 3)  # 2^3 > 8/2


# -- binary dump ----------------------------------------------------------------------


def test_dump_roundtrip(tmp_path):
    m = sample_flip2d(3, RandomStream(21))
    path = tmp_path / "m.rmtm"
    save_matrix(m, path)
    raw = path.read_bytes()
    assert raw[:4] == b"RMTM"
    assert len(raw) == 13 + 16 * m.dim * m.dim
    entries, kind, dim = load_matrix(path)
    assert kind == EnsembleKind.FLIP2D and dim == 6
    assert np.array_equal(entries, m.entries)


def test_dump_rejects_garbage(tmp_path):
    p = tmp_path / "bad.bin"
    p.write_bytes(b"NOPE" + b"\x00" * 16)
    with pytest.raises(InvalidSpecError):
        load_matrix(p)
