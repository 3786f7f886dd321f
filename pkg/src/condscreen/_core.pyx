# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled column kernels.

Both kernels loop over predictors with the GIL released, so callers may run
several of them concurrently from a thread pool. Summation order inside each
predictor is fixed, which keeps results independent of scheduling.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()


def csirs_columns(const double[:, ::1] wt, const double[:, ::1] xs,
                  const Py_ssize_t[::1] group_end, const double[::1] group_size,
                  double eps):
    """Conditional indicator-correlation utility for every row of ``xs``.

    Parameters
    ----------
    wt : (n, n) array
        ``wt[j, r]`` is the kernel weight between exposure ``u_j`` and the
        observation with the r-th smallest response.
    xs : (p, n) array
        Predictors, one per row, with columns permuted into response order.
    group_end : (g,) int array
        Exclusive end position of each run of tied responses.
    group_size : (g,) array
        Length of each run, i.e. how many thresholds ``Y_l`` share it.
    eps : float
        Terms whose local variances fall to ``eps`` or below contribute 0.
    """
    cdef Py_ssize_t p = xs.shape[0]
    cdef Py_ssize_t n = xs.shape[1]
    cdef Py_ssize_t ng = group_end.shape[0]
    cdef Py_ssize_t k, j, r, g
    cdef double s, mx, vx, a, b, ei, vi, cov, tot, d
    out = np.zeros(p, dtype=np.float64)
    cdef double[::1] res = out

    with nogil:
        for k in range(p):
            tot = 0.0
            for j in range(n):
                s = 0.0
                mx = 0.0
                for r in range(n):
                    s = s + wt[j, r]
                    mx = mx + wt[j, r] * xs[k, r]
                mx = mx / s
                vx = 0.0
                for r in range(n):
                    d = xs[k, r] - mx
                    vx = vx + wt[j, r] * d * d
                vx = vx / s
                if vx <= eps:
                    continue
                a = 0.0
                b = 0.0
                g = 0
                for r in range(n):
                    a = a + wt[j, r] * (xs[k, r] - mx)
                    b = b + wt[j, r]
                    if r + 1 == group_end[g]:
                        ei = b / s
                        vi = ei * (1.0 - ei)
                        if vi > eps:
                            cov = a / s
                            tot = tot + group_size[g] * ((cov * cov) / (vx * vi))
                        g = g + 1
                        if g == ng:
                            break
            res[k] = tot / (<double>n * <double>n)
    return out


def dcov_columns(const double[:, ::1] xt, const double[:, ::1] ydist):
    """Squared V-statistic distance covariance and variance per predictor.

    ``ydist`` is the raw pairwise distance matrix of the response. Returns
    ``(dcov2, dvar2)`` arrays of length p. Uses the identity
    mean(A*B) = mean(a*b) + mean(a)*mean(b) - 2*mean_i(abar_i * bbar_i)
    so no centred matrix is ever materialised.
    """
    cdef Py_ssize_t p = xt.shape[0]
    cdef Py_ssize_t n = xt.shape[1]
    cdef Py_ssize_t k, i, j
    cdef double aij, s_ab, s_aa, a_tot, cross_b, cross_a, abar, nn
    cdef double b_tot = 0.0

    bbar_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] bbar = bbar_arr
    abar_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] abar_v = abar_arr
    cov_out = np.zeros(p, dtype=np.float64)
    var_out = np.zeros(p, dtype=np.float64)
    cdef double[::1] cov_r = cov_out
    cdef double[::1] var_r = var_out
    nn = <double>n * <double>n

    with nogil:
        for i in range(n):
            for j in range(n):
                bbar[i] = bbar[i] + ydist[i, j]
            b_tot = b_tot + bbar[i]
            bbar[i] = bbar[i] / n
        b_tot = b_tot / nn

        for k in range(p):
            s_ab = 0.0
            s_aa = 0.0
            a_tot = 0.0
            for i in range(n):
                abar = 0.0
                for j in range(n):
                    aij = fabs(xt[k, i] - xt[k, j])
                    abar = abar + aij
                    s_ab = s_ab + aij * ydist[i, j]
                    s_aa = s_aa + aij * aij
                a_tot = a_tot + abar
                abar_v[i] = abar / n
            a_tot = a_tot / nn
            cross_b = 0.0
            cross_a = 0.0
            for i in range(n):
                cross_b = cross_b + abar_v[i] * bbar[i]
                cross_a = cross_a + abar_v[i] * abar_v[i]
            cov_r[k] = s_ab / nn + a_tot * b_tot - 2.0 * cross_b / n
            var_r[k] = s_aa / nn + a_tot * a_tot - 2.0 * cross_a / n
    return cov_out, var_out
