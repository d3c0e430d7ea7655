# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Fused-loop evaluation of the mean-field integrand sums (hot kernel)."""

cimport cython

cdef extern from "complex.h" nogil:
    double complex cexp(double complex)
    double complex clog(double complex)
    double cabs(double complex)

BRACKET_NU = 0
BRACKET_NORM = 1


def susy_sum(double complex[::1] a0, double[::1] wa,
             double complex[::1] b0, double[::1] wb,
             double[::1] rho, double[::1] wr,
             double[::1] v0, double[::1] wv,
             long N, double complex energy,
             long power_g, long power_u, int bracket):
    cdef Py_ssize_t na = a0.shape[0], nb = b0.shape[0]
    cdef Py_ssize_t nr = rho.shape[0], nv = v0.shape[0]
    cdef Py_ssize_t i, j, k, m
    cdef double complex total = 0, acc_v, acc_b, acc_r
    cdef double complex A, B, A0, u, G, core, K, lg_a, lg_ab, uterm
    cdef double v, r
    cdef double complex Nn = <double>N

    with nogil:
        for m in range(nv):
            v = v0[m]
            acc_v = 0
            for i in range(na):
                A = a0[i]
                A0 = A + v + energy
                lg_a = -Nn * (A * A + v * v)
                acc_b = 0
                for j in range(nb):
                    B = b0[j]
                    u = 1j * B + v + energy
                    if cabs(u) == 0.0:
                        continue
                    lg_ab = lg_a - Nn * (B * B)
                    uterm = power_u * clog(u)
                    acc_r = 0
                    for k in range(nr):
                        r = rho[k]
                        G = A0 * A0 - r
                        core = cexp(lg_ab - Nn * r - power_g * clog(G) + uterm)
                        if bracket == 0:
                            K = ((N + 1) * ((2 * N - 1) * A0 - 4 * N * A0 * A0 * u)
                                 + 2 * N * u * G * (1.0 + N * A0 * u))
                        else:
                            K = (4.0 * N * N * u * u * G - 8.0 * N * N * A0 * u
                                 + 4.0 * N * N - 2.0 * N)
                        acc_r = acc_r + wr[k] * core * K
                    acc_b = acc_b + wb[j] * acc_r
                acc_v = acc_v + wa[i] * acc_b
            total = total + wv[m] * acc_v
    return complex(total)
