"""Closed-form reference quantities: semicircle law, sine kernel, norm-tail
bound, two-eigenvalue joint density, mean-field saddle data, and the 2D
tadpole self-energy."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

import numpy as np
from scipy import integrate

from .errors import InvalidSpecError, PoleError

_TINY = 1e-300


def semicircle(E):
    """Limiting density of states (1/pi) * sqrt(1 - E^2/4) on [-2, 2]."""
    E = np.asarray(E, dtype=float)
    out = np.where(np.abs(E) <= 2.0,
                   np.sqrt(np.maximum(1.0 - E * E / 4.0, 0.0)) / np.pi, 0.0)
    return out if out.ndim else float(out)


def semicircle_cdf(E):
    """Cumulative mass of the semicircle density up to E."""
    E = np.clip(np.asarray(E, dtype=float), -2.0, 2.0)
    out = ((E / 2.0) * np.sqrt(1.0 - E * E / 4.0) + np.arcsin(E / 2.0)) / np.pi + 0.5
    return out if out.ndim else float(out)


def sine_kernel_r2(s):
    """Smooth part of the two-level correlation, 1 - sin^2(pi s)/(pi s)^2."""
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0):
        raise InvalidSpecError("sine kernel defined for s > 0")
    x = np.pi * s
    out = 1.0 - np.sin(x) ** 2 / x ** 2
    return out if out.ndim else float(out)


def lemma1_bound(N: int, a: float) -> float:
    """Tail bound 8*N*a^6/27 * exp(-N^(1/3) a^2 / 3) on Prob(||H|| >= a sqrt(6))."""
    if N < 1:
        raise InvalidSpecError("N must be >= 1")
    return float(8.0 * N * a ** 6 / 27.0 * np.exp(-N ** (1.0 / 3.0) * a * a / 3.0))


@lru_cache(maxsize=1)
def _joint2_norm() -> float:
    # normalization of exp(-(l1^2+l2^2)) (l1-l2)^2, computed numerically once
    val, _ = integrate.dblquad(
        lambda y, x: np.exp(-(x * x + y * y)) * (x - y) ** 2,
        -9.0, 9.0, -9.0, 9.0, epsabs=1e-12, epsrel=1e-12)
    return val


def gue_joint_density2(lam1, lam2):
    """Joint eigenvalue density of the 2x2 ensemble: Z^-1 exp(-l1^2-l2^2) (l1-l2)^2."""
    lam1 = np.asarray(lam1, dtype=float)
    lam2 = np.asarray(lam2, dtype=float)
    out = np.exp(-(lam1 ** 2 + lam2 ** 2)) * (lam1 - lam2) ** 2 / _joint2_norm()
    return out if out.ndim else float(out)


def saddle_energy(E, convention: str = "resolvent") -> complex:
    """Mean-field saddle eigenvalue, unit modulus for |E| <= 2.

    Two sign conventions coexist in the source analysis and are exposed
    explicitly: "resolvent" gives E/2 - i sqrt(1-E^2/4) (with E - calE equal
    to its conjugate), "flip" gives -E/2 + i sqrt(1-E^2/4) as used in the
    flip-model contour translation.  Complex E (a regulator) is accepted.
    """
    Ec = complex(E)
    if Ec.imag == 0.0 and abs(Ec.real) > 2.0:
        raise InvalidSpecError("saddle energy defined for |E| <= 2")
    root = np.sqrt(1.0 - Ec * Ec / 4.0)
    if convention == "resolvent":
        return complex(Ec / 2.0 - 1j * root)
    if convention == "flip":
        return complex(-Ec / 2.0 + 1j * root)
    raise InvalidSpecError(f"unknown convention {convention!r}")


# -- critical points of the real mean-field action ----------------------------------


@dataclass(frozen=True)
class SaddleData:
    """Real mean-field coordinates (a0, b0, Re a, Im a, V0) at a given energy."""

    a0: float
    b0: float
    a_re: float
    a_im: float
    v0: float
    energy: float = 0.0

    @property
    def cal_e(self) -> complex:
        return saddle_energy(self.energy, "flip")

    @property
    def a_abs2(self) -> float:
        return self.a_re ** 2 + self.a_im ** 2


def _action_parts(X: SaddleData):
    ei = float(np.sqrt(1.0 - X.energy ** 2 / 4.0))
    er = X.energy / 2.0
    x = X.a0 + X.v0 + er
    a2 = X.a_abs2
    fa = x * x * (x * x + 2.0 * (ei * ei - a2)) + (ei * ei + a2) ** 2
    fb = (X.b0 + ei) ** 2 + (X.v0 + er) ** 2
    return ei, er, x, a2, fa, fb


def action_re(X: SaddleData) -> float:
    """Re S = a0^2 + b0^2 + 2 b0 Ei - 2 a0 Er + |a|^2 + V0^2 + ln(Fa)/2 - ln(Fb)."""
    ei, er, x, a2, fa, fb = _action_parts(X)
    if fb <= _TINY:
        raise PoleError("F_b vanishes: point lies on the zero manifold of iB0")
    return (X.a0 ** 2 + X.b0 ** 2 + 2.0 * X.b0 * ei - 2.0 * X.a0 * er
            + a2 + X.v0 ** 2 + 0.5 * np.log(fa) - np.log(fb))


def saddle_residuals(X: SaddleData) -> np.ndarray:
    """Gradient of Re S in (a0, b0, a_re, a_im, V0); zero at a critical point."""
    ei, er, x, a2, fa, fb = _action_parts(X)
    if fb <= _TINY:
        raise PoleError("F_b vanishes: point lies on the zero manifold of iB0")
    g = x * (x * x + ei * ei - a2) / fa
    d_a0 = 2.0 * (X.a0 - er + g)
    d_b0 = 2.0 * (X.b0 + ei) * (1.0 - 1.0 / fb)
    braket = 1.0 + (-x * x + ei * ei + a2) / fa
    d_are = 2.0 * X.a_re * braket
    d_aim = 2.0 * X.a_im * braket
    d_v0 = 2.0 * (X.v0 * (1.0 - 1.0 / fb) - er / fb + g)
    return np.array([d_a0, d_b0, d_are, d_aim, d_v0])


@dataclass(frozen=True)
class CriticalPointSet:
    points: Tuple[SaddleData, SaddleData, SaddleData, SaddleData]
    z_s: float
    actions: Tuple[float, float, float, float]


def _cubic(z: float) -> float:
    return ((4.0 * z - 5.0) * z + 3.0) * z - 1.0


def cubic_root(tol: float = 1e-13) -> float:
    """Unique real root of 4z^3 - 5z^2 + 3z - 1 in (1/2, 1), by bisection."""
    lo, hi = 0.5, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _cubic(mid) <= 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def critical_points() -> CriticalPointSet:
    """The four critical points of Re S at E = 0.

    S1 is the origin, S2 sits at b0 = -2, and S3/S4 solve the reduced cubic
    with V0 = +-sqrt(z_s), a0 = +-(z_s - 1)/sqrt(z_s), b0 = -1.
    """
    z = cubic_root()
    rz = np.sqrt(z)
    s1 = SaddleData(0.0, 0.0, 0.0, 0.0, 0.0)
    s2 = SaddleData(0.0, -2.0, 0.0, 0.0, 0.0)
    s3 = SaddleData((z - 1.0) / rz, -1.0, 0.0, 0.0, rz)
    s4 = SaddleData(-(z - 1.0) / rz, -1.0, 0.0, 0.0, -rz)
    pts = (s1, s2, s3, s4)
    return CriticalPointSet(pts, float(z), tuple(action_re(p) for p in pts))


def hessian_q_matrix(E: float = 0.0) -> np.ndarray:
    """3x3 quadratic-form matrix of the Hessian block; det Q = (1 - calE^2)^2."""
    ce = saddle_energy(E, "flip")
    ce2 = ce * ce
    return np.array([[1.0 - ce2, 0.0, -ce2],
                     [0.0, 1.0 - ce2, 1j * ce2],
                     [-ce2, 1j * ce2, 1.0]], dtype=complex)


# -- 2D tadpole self-energy ----------------------------------------------------------


def smoothstep_cutoff(r, inner: float):
    """C^1 cutoff: 1 on |p| <= inner, cubic descent to 0 on [inner, inner + 1]."""
    r = np.asarray(r, dtype=float)
    s = np.clip(r - inner, 0.0, 1.0)
    out = 1.0 - (3.0 * s * s - 2.0 * s ** 3)
    return out if out.ndim else float(out)


def tadpole_self_energy(epsilon: float, cutoff_inner: float = 10.0, kappa=None) -> complex:
    """Second-order self-energy integral at E = 1 with lambda^2 factored out.

    Computes the 2D momentum integral of kappa(p) / (p^2 - 1 - i eps),
    reduced to one radial dimension; the imaginary part tends to pi^2 as
    eps -> 0.
    """
    if epsilon <= 0:
        raise InvalidSpecError("epsilon must be positive")
    if kappa is None:
        kappa = lambda r: smoothstep_cutoff(r, cutoff_inner)
    umax = (cutoff_inner + 1.0) ** 2
    pts = [1.0] if umax > 1.0 else None
    re, _ = integrate.quad(
        lambda u: kappa(np.sqrt(u)) * (u - 1.0) / ((u - 1.0) ** 2 + epsilon ** 2),
        0.0, umax, points=pts, limit=400)
    im, _ = integrate.quad(
        lambda u: kappa(np.sqrt(u)) * epsilon / ((u - 1.0) ** 2 + epsilon ** 2),
        0.0, umax, points=pts, limit=400)
    return complex(np.pi * re, np.pi * im)
