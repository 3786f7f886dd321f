"""Competitor screening utilities: SIRS, DC-SIS and CC-SIS.

All three return a :class:`~condscreen.screening.UtilityVector` so they share
ranking, selection and evaluation with C-SIRS.
"""
from __future__ import annotations

import numpy as np

from . import _backend
from .screening import (
    DEFAULT_EPS,
    DataSet,
    KernelSpec,
    Method,
    UtilityVector,
    _require_n2,
    _standardize,
    _tie_groups,
    build_moment_table,
)


def _unit_scale(a: np.ndarray) -> np.ndarray:
    m = np.abs(a).max(axis=0)
    return a / np.where(m > 0, m, 1.0)


def sirs_utility_all(data: DataSet) -> UtilityVector:
    """SIRS: ``mean_l [ mean_i x_ik I(y_i <= y_l) ]^2`` on standardized columns.

    The exposure is ignored.
    """
    _require_n2(data)
    n = data.n
    xt = _standardize(data.x)
    order, ys, _, _ = _tie_groups(data.y)
    pos = np.searchsorted(ys, data.y, side="right") - 1
    rho = np.cumsum(xt[order, :], axis=0)[pos, :] / n
    return UtilityVector(np.mean(rho * rho, axis=0), Method.SIRS)


def dcsis_utility_all(data: DataSet, eps: float = DEFAULT_EPS) -> UtilityVector:
    """DC-SIS: squared distance correlation (biased V-statistic) of each X_k with Y."""
    _require_n2(data)
    # distance correlation is scale invariant; rescaling keeps products finite
    y = _unit_scale(data.y)
    ydist = np.abs(y[:, None] - y[None, :])
    _, yvar = _backend.dcov_columns(np.ascontiguousarray(y[None, :]), ydist)
    cov, xvar = _backend.dcov_columns(np.ascontiguousarray(_unit_scale(data.x).T), ydist)
    yvar = float(yvar[0])
    omega = np.zeros(data.p)
    if yvar > eps:
        live = xvar > eps
        omega[live] = np.maximum(cov[live], 0.0) / np.sqrt(xvar[live] * yvar)
    return UtilityVector(omega, Method.DCSIS)


def ccsis_utility_all(data: DataSet, spec: KernelSpec | None = None,
                      eps: float = DEFAULT_EPS, table=None) -> UtilityVector:
    """CC-SIS: ``mean_j corr^2(X_k, Y | u_j)`` with Nadaraya-Watson moments.

    Columns and the response are standardized first, which leaves every
    conditional correlation unchanged and makes ``eps`` scale-free. Each
    squared correlation is clipped to [0, 1] against rounding.
    """
    _require_n2(data)
    if table is None:
        table = build_moment_table(data, spec)
    w = table.w
    s = w.sum(axis=0)
    xs = _standardize(data.x)
    ys = _standardize(data.y[:, None])[:, 0]

    wt = w.T / s[:, None]                  # rows sum to one
    ex = wt @ xs
    ex2 = wt @ (xs * xs)
    ey = wt @ ys
    ey2 = wt @ (ys * ys)
    exy = wt @ (xs * ys[:, None])

    vx = np.maximum(ex2 - ex * ex, 0.0)
    vy = np.maximum(ey2 - ey * ey, 0.0)
    cov = exy - ex * ey[:, None]
    ok = (vx > eps) & (vy > eps)[:, None]
    denom = np.where(ok, vx * vy[:, None], 1.0)
    r2 = np.where(ok, np.clip(cov * cov / denom, 0.0, 1.0), 0.0)
    return UtilityVector(r2.mean(axis=0), Method.CCSIS, bandwidth=table.h)
