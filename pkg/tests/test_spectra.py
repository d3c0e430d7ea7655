import numpy as np
import pytest

from rmtlab.ensembles import EnsembleSpec, sample, sample_gue
from rmtlab.errors import (ContractViolationError, InsufficientStatisticsError,
                           InvalidSpecError)
from rmtlab.spectra import (DOSEstimate, SpectrumBatch, collect_spectra, dos_distance,
                            eigenvalues, estimate_dos, fit_power_law, fit_semiellipse,
                            operator_norm, pair_correlation, support_edge,
                            tail_probability, wilson_interval)
from rmtlab.streams import RandomStream
from rmtlab.theory import semicircle


def charpoly_roots(A):
    """Independent eigenvalue oracle: Leverrier-Faddeev coefficients + np.roots."""
    n = A.shape[0]
    coeffs = [1.0]
    M = np.zeros_like(A)
    c = 1.0
    for k in range(1, n + 1):
        M = A @ M + c * np.eye(n)
        c = -np.trace(A @ M) / k
        coeffs.append(c.real)
    return np.sort(np.roots(coeffs).real)


def test_eigenvalues_diagonal():
    assert np.allclose(eigenvalues(np.diag([3.0, 1.0, 2.0])), [1, 2, 3])


def test_eigenvalues_2x2_closed_form():
    assert np.allclose(eigenvalues(np.array([[0.0, 1.0], [1.0, 0.0]])), [-1, 1])


@pytest.mark.parametrize("dim", [2, 3, 4])
@pytest.mark.parametrize("seed", [1, 2, 3])
def test_eigenvalues_against_charpoly_oracle(dim, seed):
    H = sample_gue(dim, RandomStream(seed)).entries
    assert np.allclose(eigenvalues(H), charpoly_roots(H), atol=1e-8)


def test_eigenvalue_residuals():
    H = sample_gue(64, RandomStream(4)).entries
    ev = eigenvalues(H)
    vals, vecs = np.linalg.eigh(H)
    norm = np.linalg.norm(H, 2)
    for i in (0, 31, 63):
        r = np.linalg.norm(H @ vecs[:, i] - vals[i] * vecs[:, i])
        assert r <= 1e-10 * norm


def test_non_hermitian_rejected():
    A = np.array([[0.0, 1.0], [0.0, 0.0]])
    with pytest.raises(ContractViolationError):
        eigenvalues(A)


def test_operator_norm():
    assert operator_norm(np.diag([-3.0, 2.0])) == 3.0
    assert operator_norm(np.eye(4)) == 1.0


def test_gue_norm_near_two():
    norms = [operator_norm(sample_gue(256, RandomStream(5, t))) for t in range(50)]
    assert abs(np.mean(norms) - 2.0) < 0.1


# -- DOS ------------------------------------------------------------------------------


def test_dos_single_eigenvalue_lower_inclusive():
    batch = SpectrumBatch(EnsembleSpec.gue(1), [np.array([0.0])], 1, 0)
    dos = estimate_dos(batch, 2, (-1.0, 1.0))
    assert np.array_equal(dos.density, [0.0, 1.0])


def test_dos_normalization():
    batch = collect_spectra(EnsembleSpec.gue(32), 20, 6)
    dos = estimate_dos(batch, 40, (-4.0, 4.0))
    assert dos.n_outside == 0
    assert abs(np.sum(dos.density) * dos.bin_width - 1.0) < 1e-12


def test_dos_outside_counted():
    batch = SpectrumBatch(EnsembleSpec.gue(2), [np.array([-5.0, 0.0])], 1, 0)
    dos = estimate_dos(batch, 4, (-1.0, 1.0))
    assert dos.n_outside == 1
    assert dos.total_eigenvalues == 2


def test_dos_symmetry_invariant():
    batch = collect_spectra(EnsembleSpec.gue(64), 200, 7)
    dos = estimate_dos(batch, 40, (-2.5, 2.5))
    flipped = dos.density[::-1]
    tol = 3.0 * (dos.std_err + dos.std_err[::-1]) + 1e-12
    assert np.all(np.abs(dos.density - flipped) <= tol)


def test_mc_error_scaling():
    # std_err should shrink as 1/sqrt(trials): fit exponent -0.5 +- 0.1
    sizes, errs = [50, 100, 200], []
    for t in sizes:
        batch = collect_spectra(EnsembleSpec.gue(64), t, 8)
        dos = estimate_dos(batch, 20, (-2.5, 2.5))
        errs.append(np.mean(dos.std_err[5:15]))
    slope, _, _ = fit_power_law(list(zip(sizes, errs)))
    assert abs(slope + 0.5) < 0.1


def test_dos_errors():
    with pytest.raises(InsufficientStatisticsError):
        estimate_dos(SpectrumBatch(EnsembleSpec.gue(2), [], 0, 0), 4, (-1, 1))
    batch = SpectrumBatch(EnsembleSpec.gue(1), [np.array([0.0])], 1, 0)
    with pytest.raises(InvalidSpecError):
        estimate_dos(batch, 1, (-1, 1))
    with pytest.raises(InvalidSpecError):
        estimate_dos(batch, 4, (0.0, np.inf))


def _uniform_dos(values, lo=-1.0, hi=1.0, bins=20):
    n = len(values)
    batch = SpectrumBatch(EnsembleSpec.gue(n), [np.sort(values)], 1, 0)
    return estimate_dos(batch, bins, (lo, hi))


def test_dos_distance_trivial():
    dos = _uniform_dos(np.linspace(-0.95, 0.95, 200))
    exact = {c: d for c, d in zip(dos.bin_centers, dos.density)}
    sup, l1 = dos_distance(dos, lambda e: np.vectorize(exact.get)(e), (-1, 1))
    assert sup == 0.0 and l1 == 0.0
    sup, l1 = dos_distance(dos, lambda e: np.vectorize(exact.get)(e) + 0.25, (-0.5, 0.5))
    assert abs(sup - 0.25) < 1e-12
    assert abs(l1 - 0.25) < 1e-12  # region has unit length


# -- tails ----------------------------------------------------------------------------


def test_tail_probability_a0_is_one():
    est, (lo, hi) = tail_probability(EnsembleSpec.gue(8), 0.0, 50, RandomStream(9))
    assert est == 1.0
    assert lo <= 1.0 <= hi + 1e-12


def test_wilson_interval_zero_hits():
    lo, hi = wilson_interval(0, 10_000)
    assert lo == 0.0
    assert 0 < hi < 1e-3


# -- pair correlation ------------------------------------------------------------------


def test_pair_correlation_poisson_flat():
    # independence baseline: iid uniform levels give r2 = 1
    rng = np.random.default_rng(10)
    dim, trials = 200, 300
    evs = [np.sort(rng.uniform(-1, 1, dim)) for _ in range(trials)]
    batch = SpectrumBatch(EnsembleSpec.gue(dim), evs, trials, 0)
    est = pair_correlation(batch, (-0.5, 0.5), s_max=3.0, s_bins=15)
    sigma = 1.0 / np.sqrt(np.maximum(est.pair_counts, 1.0))
    m = est.s_bins >= 0.2
    assert np.all(np.abs(est.r2 - 1.0)[m] <= 3.0 * sigma[m] + 0.02)


def test_pair_correlation_insufficient_window():
    batch = SpectrumBatch(EnsembleSpec.gue(4),
                          [np.array([-2.0, -1.0, 1.0, 2.0])] * 5, 5, 0)
    with pytest.raises(InsufficientStatisticsError):
        pair_correlation(batch, (-0.1, 0.1), 2.0, 10)


# -- edges and fits --------------------------------------------------------------------


def test_support_edge_point_mass():
    batch = SpectrumBatch(EnsembleSpec.gue(4), [np.array([1.0] * 4)], 1, 0)
    dos = estimate_dos(batch, 40, (-2.0, 2.0))
    assert abs(support_edge(dos, 0.999) - 1.0) < 0.1


def test_support_edge_semicircle_sampler():
    # independent draw from the semicircle: 4*Beta(1.5, 1.5) - 2
    rng = np.random.default_rng(11)
    x = 4.0 * rng.beta(1.5, 1.5, 500_000) - 2.0
    dos = _uniform_dos(x, -2.2, 2.2, 220)
    assert abs(support_edge(dos, 0.999) - 2.0) < 0.05


def test_support_edge_gue():
    batch = collect_spectra(EnsembleSpec.gue(512), 20, 12)
    dos = estimate_dos(batch, 100, (-2.5, 2.5))
    assert abs(support_edge(dos, 0.999) - 2.0) < 0.1


def test_support_edge_quantile_validation():
    dos = _uniform_dos(np.linspace(-1, 1, 50))
    with pytest.raises(InvalidSpecError):
        support_edge(dos, 0.4)


def test_fit_semiellipse_exact_identity():
    # nu = semicircle is C*sqrt(E0^2-E^2) with C = 1/(2pi), E0 = 2
    edges = np.linspace(-2.0, 2.0, 81)
    centers = 0.5 * (edges[:-1] + edges[1:])
    dos = DOSEstimate(edges, semicircle(centers), np.zeros(80), 0)
    c, e0, rms = fit_semiellipse(dos)
    assert abs(c - 1.0 / (2 * np.pi)) < 1e-6
    assert abs(e0 - 2.0) < 1e-6
    assert rms < 1e-9


def test_fit_semiellipse_noisy_recovery():
    rng = np.random.default_rng(13)
    x = 4.0 * rng.beta(1.5, 1.5, 400_000) - 2.0
    dos = _uniform_dos(x, -2.1, 2.1, 60)
    c, e0, rms = fit_semiellipse(dos)
    assert abs(e0 - 2.0) < 0.05


def test_fit_semiellipse_degenerate():
    edges = np.linspace(-1, 1, 11)
    dos = DOSEstimate(edges, np.zeros(10), np.zeros(10), 0)
    with pytest.raises(InsufficientStatisticsError):
        fit_semiellipse(dos)


def test_fit_power_law_exact():
    pts = [(n, 5.0 / n) for n in (10, 20, 40, 80)]
    gamma, _, r2 = fit_power_law(pts)
    assert abs(gamma + 1.0) < 1e-12 and r2 > 1 - 1e-12
    gamma, _, _ = fit_power_law([(n, 3.0 / np.sqrt(n)) for n in (16, 64, 256)])
    assert abs(gamma + 0.5) < 1e-12


def test_fit_power_law_validation():
    with pytest.raises(InvalidSpecError):
        fit_power_law([(10, 1.0), (20, 0.5)])
    with pytest.raises(InvalidSpecError):
        fit_power_law([(10, 1.0), (20, -0.5), (30, 0.2)])


def test_collect_spectra_deterministic_order():
    spec = EnsembleSpec.gue(8)
    a = collect_spectra(spec, 5, 14)
    b = collect_spectra(spec, 5, 14, map_fn=lambda f, xs: [f(x) for x in reversed(list(xs))][::-1])
    for x, y in zip(a.eigenvalues, b.eigenvalues):
        assert np.array_equal(x, y)
