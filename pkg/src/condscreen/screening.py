"""Conditional sure independence ranking and screening (C-SIRS).

The utility of predictor ``X_k`` is the average, over every observed exposure
value ``u_j`` and every observed response threshold ``Y_l``, of the squared
Nadaraya-Watson estimate of ``corr(X_k, I(Y <= Y_l) | u_j)``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional

import numpy as np

from . import _backend
from .errors import (
    ConstantExposure,
    IndexOutOfRange,
    InvalidCutoff,
    InvalidData,
    TableMismatch,
)

DEFAULT_EPS = 1e-12


class Method(str, enum.Enum):
    CSIRS = "csirs"
    SIRS = "sirs"
    DCSIS = "dcsis"
    CCSIS = "ccsis"

    @classmethod
    def parse(cls, name: str) -> "Method":
        key = name.strip().lower().replace("-", "").replace("_", "")
        for m in cls:
            if m.value == key:
                return m
        raise ValueError(f"unknown method {name!r}; choose from "
                         + ", ".join(m.value for m in cls))


@dataclass(frozen=True)
class DataSet:
    """Observed triplets ``(x_i, Y_i, u_i)``.

    ``x`` is (n, p); ``y`` and ``u`` have length n. Arrays are copied to
    float64 and made read-only.
    """

    x: np.ndarray
    y: np.ndarray
    u: np.ndarray

    def __post_init__(self):
        x = np.array(self.x, dtype=np.float64)
        y = np.array(self.y, dtype=np.float64).reshape(-1)
        u = np.array(self.u, dtype=np.float64).reshape(-1)
        if x.ndim == 1:
            x = x[:, None]
        if x.ndim != 2:
            raise InvalidData("x must be a 2-d array")
        n = x.shape[0]
        if n < 1 or x.shape[1] < 1:
            raise InvalidData(f"x has shape {x.shape}; need n >= 1 and p >= 1")
        if y.shape[0] != n or u.shape[0] != n:
            raise InvalidData(
                f"row mismatch: x has {n} rows, y {y.shape[0]}, u {u.shape[0]}")
        for name, arr in (("x", x), ("y", y), ("u", u)):
            if not np.all(np.isfinite(arr)):
                raise InvalidData(f"{name} contains non-finite values")
            arr.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "u", u)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]


def _require_n2(data: DataSet) -> None:
    if data.n < 2:
        raise InvalidData(f"need at least 2 observations, got {data.n}")


def epanechnikov(v):
    """Epanechnikov kernel ``0.75 (1 - v^2)`` on ``|v| <= 1``, zero elsewhere."""
    v = np.asarray(v, dtype=np.float64)
    return np.where(np.abs(v) <= 1.0, 0.75 * (1.0 - v * v), 0.0)


def default_bandwidth(u) -> float:
    """Normal-reference bandwidth ``1.06 * sd(u) * n^(-1/5)``."""
    u = np.asarray(u, dtype=np.float64).reshape(-1)
    n = u.shape[0]
    if n < 2:
        raise InvalidData("bandwidth rule needs at least 2 exposure values")
    sd = float(np.std(u, ddof=1))
    if np.ptp(u) == 0.0 or not sd > 0.0:
        raise ConstantExposure("exposure is constant; bandwidth undefined")
    return 1.06 * sd * n ** (-0.2)


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family plus the rule that fixes the bandwidth ``h``.

    Exactly one of ``bandwidth`` (fixed h) or ``rate`` (``(c, theta)`` with
    ``h = c * n^-theta``) may be given; with neither, :func:`default_bandwidth`
    is applied to the exposure.
    """

    bandwidth: Optional[float] = None
    rate: Optional[tuple[float, float]] = None
    family: str = "epanechnikov"

    def __post_init__(self):
        if self.family != "epanechnikov":
            raise ValueError(f"unsupported kernel family {self.family!r}")
        if self.bandwidth is not None and self.rate is not None:
            raise ValueError("give either a fixed bandwidth or a rate rule, not both")
        if self.bandwidth is not None:
            h = float(self.bandwidth)
            if not (np.isfinite(h) and h > 0):
                raise ValueError(f"bandwidth must be positive, got {self.bandwidth}")
            object.__setattr__(self, "bandwidth", h)
        if self.rate is not None:
            c, theta = (float(t) for t in self.rate)
            if not c > 0:
                raise ValueError(f"rate constant must be positive, got {c}")
            if not 0.125 < theta < 0.25:
                raise ValueError(f"rate exponent must lie in (1/8, 1/4), got {theta}")
            object.__setattr__(self, "rate", (c, theta))

    @classmethod
    def fixed(cls, h: float) -> "KernelSpec":
        return cls(bandwidth=h)

    @classmethod
    def rate_rule(cls, c: float, theta: float) -> "KernelSpec":
        return cls(rate=(c, theta))

    def resolve(self, u) -> float:
        if self.bandwidth is not None:
            return self.bandwidth
        if self.rate is not None:
            c, theta = self.rate
            return c * np.asarray(u).shape[0] ** (-theta)
        return default_bandwidth(u)

    def kernel(self, v):
        return epanechnikov(v)


def kernel_weight(t, spec) -> np.ndarray | float:
    """Scaled kernel ``K(t/h)/h``.

    ``spec`` is a :class:`KernelSpec` with a fixed bandwidth, or ``h`` itself.
    """
    if isinstance(spec, KernelSpec):
        if spec.bandwidth is None:
            raise ValueError("kernel_weight needs a KernelSpec with a fixed bandwidth")
        h = spec.bandwidth
        kern = spec.kernel
    else:
        h = float(spec)
        kern = epanechnikov
    out = kern(np.asarray(t, dtype=np.float64) / h) / h
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class ConditionalMomentTable:
    """Nadaraya-Watson quantities shared by every predictor.

    Attributes
    ----------
    w : (n, n) array
        ``w[i, j] = K_h(u_i - u_j)``.
    fhat : (n,) array
        Kernel density estimate at each ``u_j``.
    gind : (n, n) array
        ``gind[l, j] = n^-1 sum_i w[i, j] I(y_i <= y_l)``.
    cdf : (n, n) array
        ``gind / fhat``, the local estimate of ``P(Y <= y_l | u_j)``.
    h : float
        Bandwidth the table was built with.
    order, group_end, group_size
        Stable sort of ``y`` and the layout of tied runs in that order.
    """

    w: np.ndarray
    fhat: np.ndarray
    gind: np.ndarray
    cdf: np.ndarray
    h: float
    order: np.ndarray = field(repr=False)
    group_end: np.ndarray = field(repr=False)
    group_size: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.w.shape[0]

    @cached_property
    def weights_by_response(self) -> np.ndarray:
        # row j holds w[:, j] with observations permuted into response order
        return np.ascontiguousarray(self.w.T[:, self.order])


def _tie_groups(y: np.ndarray):
    order = np.argsort(y, kind="stable")
    ys = y[order]
    breaks = np.flatnonzero(ys[1:] != ys[:-1]) + 1
    group_end = np.append(breaks, ys.shape[0]).astype(np.intp)
    group_size = np.diff(np.concatenate(([0], group_end))).astype(np.float64)
    return order, ys, group_end, group_size


def build_moment_table(data: DataSet, spec: KernelSpec | None = None) -> ConditionalMomentTable:
    spec = KernelSpec() if spec is None else spec
    h = float(spec.resolve(data.u))
    n = data.n
    u = data.u
    w = spec.kernel((u[:, None] - u[None, :]) / h) / h

    order, ys, group_end, group_size = _tie_groups(data.y)
    cum = np.cumsum(w[order, :], axis=0)
    # last sorted position with y_i <= y_l, for each threshold l
    pos = np.searchsorted(ys, data.y, side="right") - 1
    gind = cum[pos, :] / n
    fhat = cum[-1, :] / n
    cdf = gind / fhat[None, :]
    return ConditionalMomentTable(
        w=w, fhat=fhat, gind=gind, cdf=cdf, h=h,
        order=order, group_end=group_end, group_size=group_size,
    )


@dataclass(frozen=True, eq=False)
class UtilityVector:
    omega: np.ndarray
    method: Method
    bandwidth: Optional[float] = None

    def __post_init__(self):
        omega = np.asarray(self.omega, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(omega)):
            raise ValueError("utilities must be finite")
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "method", Method(self.method))

    def __len__(self):
        return self.omega.shape[0]


def _standardize(x: np.ndarray) -> np.ndarray:
    """Column-wise mean 0 / variance 1 (divisor n); constant columns become 0."""
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    live = np.ptp(x, axis=0) > 0
    if np.any(live):
        xl = x[:, live]
        xl = xl / np.abs(xl).max(axis=0)  # guards the squares against overflow
        xl = xl - xl.mean(axis=0)
        out[:, live] = xl / xl.std(axis=0)
    return out


def _check_table(data: DataSet, table: ConditionalMomentTable) -> None:
    if table.w.shape != (data.n, data.n):
        raise TableMismatch(
            f"table is {table.w.shape[0]}x{table.w.shape[1]} but data has n={data.n}")


def _csirs_columns(x_cols: np.ndarray, table: ConditionalMomentTable, eps: float) -> np.ndarray:
    # local correlations are invariant to column affine maps; standardizing
    # makes eps a relative threshold
    xs = np.ascontiguousarray(_standardize(x_cols)[table.order, :].T)
    return _backend.csirs_columns(
        table.weights_by_response, xs, table.group_end, table.group_size, float(eps))


def csirs_utility(data: DataSet, k: int, table: ConditionalMomentTable,
                  eps: float = DEFAULT_EPS) -> float:
    """Utility of the single predictor ``k`` (0-based) against a prebuilt table."""
    if not 0 <= k < data.p:
        raise IndexOutOfRange(f"predictor index {k} outside [0, {data.p})")
    _check_table(data, table)
    return float(_csirs_columns(data.x[:, [k]], table, eps)[0])


def csirs_all(data: DataSet, spec: KernelSpec | None = None, eps: float = DEFAULT_EPS,
              table: ConditionalMomentTable | None = None) -> UtilityVector:
    """C-SIRS utility for every predictor, sharing one moment table."""
    _require_n2(data)
    if table is None:
        table = build_moment_table(data, spec)
    else:
        _check_table(data, table)
    omega = _csirs_columns(data.x, table, eps)
    return UtilityVector(omega, Method.CSIRS, bandwidth=table.h)


@dataclass(frozen=True, eq=False)
class ScreeningResult:
    utilities: UtilityVector
    ranking: np.ndarray
    selected: dict[int, np.ndarray]

    @cached_property
    def ranks(self) -> np.ndarray:
        """1-based rank of every predictor."""
        r = np.empty_like(self.ranking)
        r[self.ranking] = np.arange(1, self.ranking.shape[0] + 1)
        return r

    @property
    def p(self) -> int:
        return self.ranking.shape[0]


def rank_and_select(utilities: UtilityVector, cutoffs: Iterable[int] = ()) -> ScreeningResult:
    """Sort by descending utility (ties by ascending index) and keep top-d sets."""
    omega = utilities.omega
    p = omega.shape[0]
    ranking = np.argsort(-omega, kind="stable")
    selected = {}
    for d in cutoffs:
        d_int = int(d)
        if d_int != d or not 1 <= d_int <= p:
            raise InvalidCutoff(f"cutoff {d} outside [1, {p}]")
        selected[d_int] = ranking[:d_int].copy()
    return ScreeningResult(utilities, ranking, selected)


def submodel_size(n: int, nu: int = 1) -> int:
    """Screened model size ``nu * floor(n^(4/5) / log(n^(4/5)))``."""
    if n < 2 or nu < 1:
        raise ValueError("need n >= 2 and nu >= 1")
    m = n ** 0.8
    return int(nu) * int(np.floor(m / np.log(m)))
