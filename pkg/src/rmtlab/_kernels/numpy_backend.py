"""Vectorized numpy evaluation of the mean-field integrand sums.

Reference implementation; the compiled extension in ``_accum`` computes the
same quantity with a fused loop.  Both must agree to rounding error.
"""

import numpy as np

BRACKET_NU = 0
BRACKET_NORM = 1


def susy_sum(a0, wa, b0, wb, rho, wr, v0, wv, N, energy, power_g, power_u, bracket):
    """Quadruple quadrature sum of the integrand.

    ``a0`` and ``b0`` are the (already contour-shifted, hence complex) node
    positions; ``rho`` and ``v0`` are real.  ``energy`` may carry a regulator
    in its imaginary part.  Powers enter through logs, which is branch-safe
    because they are integers.
    """
    total = 0.0 + 0.0j
    A = a0[:, None, None]
    B = b0[None, :, None]
    R = rho[None, None, :]
    lg_ab = -N * (A * A + B * B)
    for v, w in zip(v0, wv):
        A0 = A + v + energy
        u = 1j * B + v + energy
        G = A0 * A0 - R
        with np.errstate(divide="ignore", invalid="ignore"):
            core = np.exp(lg_ab - N * (R + v * v)
                          - power_g * np.log(G) + power_u * np.log(u))
        core = np.where(np.abs(u) > 0.0, core, 0.0)
        if bracket == BRACKET_NU:
            K = ((N + 1) * ((2 * N - 1) * A0 - 4 * N * A0 * A0 * u)
                 + 2 * N * u * G * (1 + N * A0 * u))
        else:
            K = 4 * N * N * u * u * G - 8 * N * N * A0 * u + 4 * N * N - 2 * N
        total += w * np.einsum("i,j,k,ijk->", wa, wb, wr, core * K)
    return total
