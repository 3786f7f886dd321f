"""Pure numpy versions of the compiled kernels in ``_core.pyx``.

Signatures and return values match the compiled module exactly; results
agree to rounding (summation order differs).
"""
from __future__ import annotations

import numpy as np


def csirs_columns(wt, xs, group_end, group_size, eps):
    wt = np.asarray(wt, dtype=np.float64)
    xs = np.asarray(xs, dtype=np.float64)
    n = wt.shape[1]
    ends = np.asarray(group_end, dtype=np.intp) - 1
    sizes = np.asarray(group_size, dtype=np.float64)

    cum_w = np.cumsum(wt, axis=1)
    s = cum_w[:, -1]
    ei = cum_w[:, ends] / s[:, None]
    vi = ei * (1.0 - ei)
    ok_i = vi > eps
    vi_safe = np.where(ok_i, vi, 1.0)

    out = np.zeros(xs.shape[0])
    for k, x in enumerate(xs):
        mx = (wt @ x) / s
        dev = x[None, :] - mx[:, None]
        wdev = wt * dev
        vx = np.einsum("jr,jr->j", wdev, dev) / s
        ok_x = vx > eps
        cov = np.cumsum(wdev, axis=1)[:, ends] / s[:, None]
        vx_safe = np.where(ok_x, vx, 1.0)
        terms = cov * cov / (vx_safe[:, None] * vi_safe)
        terms = np.where(ok_i & ok_x[:, None], terms, 0.0)
        out[k] = float((terms * sizes).sum())
    return out / (n * n)


def dcov_columns(xt, ydist, chunk=32):
    xt = np.asarray(xt, dtype=np.float64)
    b = np.asarray(ydist, dtype=np.float64)
    bbar = b.mean(axis=1)
    bgrand = bbar.mean()
    p = xt.shape[0]
    cov = np.empty(p)
    var = np.empty(p)
    for start in range(0, p, chunk):
        block = xt[start:start + chunk]
        a = np.abs(block[:, :, None] - block[:, None, :])
        abar = a.mean(axis=2)
        agrand = abar.mean(axis=1)
        cov[start:start + chunk] = (
            np.einsum("kij,ij->k", a, b) / b.size
            + agrand * bgrand
            - 2.0 * (abar @ bbar) / b.shape[0]
        )
        var[start:start + chunk] = (
            np.einsum("kij,kij->k", a, a) / b.size
            + agrand * agrand
            - 2.0 * np.einsum("ki,ki->k", abar, abar) / b.shape[0]
        )
    return cov, var
