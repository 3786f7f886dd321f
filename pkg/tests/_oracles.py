"""Brute-force reference implementations used as test oracles.

Each one transcribes its estimator literally: raw (uncentred) moments,
explicit loops over thresholds and exposure points, no sorting, no prefix
sums. They share nothing with the package code beyond numpy.
"""
import math

import numpy as np


def epan(v):
    return 0.75 * (1.0 - v * v) if abs(v) <= 1.0 else 0.0


def weights(u, h):
    n = len(u)
    w = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            w[i, j] = epan((u[i] - u[j]) / h) / h
    return w


def moment_table(y, u, h):
    n = len(y)
    w = weights(u, h)
    fhat = np.zeros(n)
    gind = np.zeros((n, n))
    for j in range(n):
        fhat[j] = sum(w[i, j] for i in range(n)) / n
        for l in range(n):
            gind[l, j] = sum(w[i, j] * (y[i] <= y[l]) for i in range(n)) / n
    return w, fhat, gind, gind / fhat[None, :]


def csirs(x, y, u, h, eps=1e-12):
    """omega_k = n^-2 sum_l sum_j cov^2 / (var_x var_I), all moments by NW."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape[0] != len(y):
        x = x.T
    n, p = x.shape
    w = weights(u, h)
    out = np.zeros(p)
    for k in range(p):
        xk = x[:, k]
        tot = 0.0
        for l in range(n):
            ind = (y <= y[l]).astype(float)
            for j in range(n):
                wj = w[:, j]
                den = (wj.sum() / n)
                ex = (wj * xk).sum() / n / den
                ex2 = (wj * xk * xk).sum() / n / den
                ei = (wj * ind).sum() / n / den
                exi = (wj * xk * ind).sum() / n / den
                vx = max(ex2 - ex * ex, 0.0)
                vi = max(ei - ei * ei, 0.0)
                if vx <= eps or vi <= eps:
                    continue
                cov = exi - ex * ei
                tot += cov * cov / (vx * vi)
        out[k] = tot / (n * n)
    return out


def sirs(x, y):
    x = np.asarray(x, dtype=float)
    n, p = x.shape
    out = np.zeros(p)
    for k in range(p):
        col = x[:, k]
        if col.max() == col.min():
            continue
        m = sum(col) / n
        sd = math.sqrt(sum((c - m) ** 2 for c in col) / n)
        z = [(c - m) / sd for c in col]
        acc = 0.0
        for l in range(n):
            rho = sum(z[i] for i in range(n) if y[i] <= y[l]) / n
            acc += rho * rho
        out[k] = acc / n
    return out


def _centred(d):
    return d - d.mean(axis=0, keepdims=True) - d.mean(axis=1, keepdims=True) + d.mean()


def dcor2(a, b):
    """Squared distance correlation via explicit double-centred matrices."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    A = _centred(np.abs(a[:, None] - a[None, :]))
    B = _centred(np.abs(b[:, None] - b[None, :]))
    cov = (A * B).mean()
    va = (A * A).mean()
    vb = (B * B).mean()
    if va <= 1e-12 or vb <= 1e-12:
        return 0.0
    return cov / math.sqrt(va * vb)


def ccsis(x, y, u, h, eps=1e-12):
    x = np.asarray(x, dtype=float)
    n, p = x.shape
    w = weights(u, h)
    out = np.zeros(p)
    for k in range(p):
        xk = x[:, k]
        tot = 0.0
        for j in range(n):
            wj = w[:, j]
            s = wj.sum()
            ex = (wj * xk).sum() / s
            ex2 = (wj * xk * xk).sum() / s
            ey = (wj * y).sum() / s
            ey2 = (wj * y * y).sum() / s
            exy = (wj * xk * y).sum() / s
            vx = ex2 - ex * ex
            vy = ey2 - ey * ey
            if vx <= eps or vy <= eps:
                continue
            cov = exy - ex * ey
            tot += cov * cov / (vx * vy)
        out[k] = tot / n
    return out
