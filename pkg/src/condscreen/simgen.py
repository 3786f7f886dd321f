"""Monte Carlo scenarios: AR(1) Gaussian designs with a latent exposure.

Predictors and the latent exposure ``u*`` are drawn jointly from a
``(p+1)``-dimensional normal with ``corr(Z_a, Z_b) = rho^|a-b|``; the exposure
is ``u = Phi(u*)``. Six response models are available (two generalized
varying-coefficient models, four nonlinear/heteroscedastic ones).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.special import ndtr

from .errors import UnsupportedScenario
from .screening import DataSet

BASE_P = 1000
BASE_ACTIVE = (2, 100, 400, 600, 1000)  # 1-based labels at p = 1000
POISSON_ETA_CAP = 30.0


class Scenario(str, enum.Enum):
    EX1_CASE1 = "ex1case1"
    EX1_CASE2 = "ex1case2"
    EX2_CASE1 = "ex2case1"
    EX2_CASE2 = "ex2case2"
    EX2_CASE3 = "ex2case3"
    EX2_CASE4 = "ex2case4"

    @classmethod
    def parse(cls, name: str) -> "Scenario":
        key = name.strip().lower().replace("_", "").replace("-", "")
        for s in cls:
            if s.value == key:
                return s
        raise UnsupportedScenario(
            f"unknown scenario {name!r}; choose from " + ", ".join(s.value for s in cls))


def scale_active_set(p: int) -> tuple[int, ...]:
    """0-based active indices for dimension ``p``.

    At ``p = 1000`` these are the labels 2, 100, 400, 600, 1000 shifted to
    0-based. Otherwise labels scale proportionally, rounded, kept distinct.
    """
    if p < len(BASE_ACTIVE):
        raise UnsupportedScenario(f"p={p} is smaller than the active set")
    labels = []
    prev = 0
    for i, lab in enumerate(BASE_ACTIVE):
        scaled = max(1, int(round(lab * p / BASE_P)))
        scaled = max(scaled, prev + 1)
        # leave room for the remaining labels
        scaled = min(scaled, p - (len(BASE_ACTIVE) - 1 - i))
        labels.append(scaled)
        prev = scaled
    return tuple(lab - 1 for lab in labels)


def _beta_2(u):
    return 2.0 * (u > 0.4)


def _beta_100(u):
    return 1.0 + u


def _beta_400(u):
    return (2.0 - 3.0 * u) ** 2


def _beta_600(u):
    return 2.0 * np.sin(2.0 * np.pi * u)


def _beta_1000(u):
    return np.exp(u / (u + 1.0))


COEFFICIENT_FUNCTIONS: tuple[Callable, ...] = (_beta_2, _beta_100, _beta_400, _beta_600, _beta_1000)


@dataclass(frozen=True)
class CoefficientProfile:
    """Varying coefficients of the five active predictors, in label order."""

    functions: tuple[Callable, ...] = COEFFICIENT_FUNCTIONS

    def __call__(self, slot: int, u):
        return np.asarray(self.functions[slot](np.asarray(u, dtype=np.float64)), dtype=np.float64)

    def beta(self, k: int, u, active: tuple[int, ...]):
        """``beta_k(u)`` for 0-based predictor ``k``; zero when inactive."""
        if k in active:
            return self(active.index(k), u)
        return np.zeros_like(np.asarray(u, dtype=np.float64))

    @classmethod
    def zero(cls) -> "CoefficientProfile":
        z = lambda u: np.zeros_like(u)  # noqa: E731
        return cls(functions=(z,) * len(BASE_ACTIVE))


@dataclass(frozen=True)
class ScenarioSpec:
    name: Scenario = Scenario.EX1_CASE1
    n: int = 200
    p: int = BASE_P
    rho: float = 0.5
    seed: int = 0
    # column of u* inside the (p+1)-dim Gaussian block; None means last (index p)
    exposure_column: Optional[int] = 0
    active_set: tuple[int, ...] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if not isinstance(self.name, Scenario):
            object.__setattr__(self, "name", Scenario.parse(str(self.name)))
        if self.n < 2:
            raise ValueError(f"n must be >= 2, got {self.n}")
        if not 0.0 <= self.rho < 1.0:
            raise ValueError(f"rho must lie in [0, 1), got {self.rho}")
        if self.active_set is None:
            object.__setattr__(self, "active_set", scale_active_set(self.p))
        active = tuple(int(a) for a in self.active_set)
        if len(active) != len(BASE_ACTIVE) or len(set(active)) != len(active) \
                or min(active) < 0 or max(active) >= self.p:
            raise ValueError(f"active set {active} invalid for p={self.p}")
        object.__setattr__(self, "active_set", active)
        col = self.p if self.exposure_column is None else int(self.exposure_column)
        if not 0 <= col <= self.p:
            raise ValueError(f"exposure column {col} outside [0, {self.p}]")
        object.__setattr__(self, "exposure_column", col)

    @property
    def active_labels(self) -> tuple[int, ...]:
        return tuple(a + 1 for a in self.active_set)

    def with_seed(self, seed: int) -> "ScenarioSpec":
        return ScenarioSpec(self.name, self.n, self.p, self.rho, seed,
                            self.exposure_column, self.active_set)


@dataclass(frozen=True, eq=False)
class Replication:
    data: DataSet
    scenario: ScenarioSpec
    eta_clamped: int = 0


def replication_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for replication ``index`` of a run seeded with ``seed``."""
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=(int(index),))
    return np.random.Generator(np.random.PCG64(ss))


def sample_ar_gaussian(n: int, dim: int, rho: float, rng: np.random.Generator) -> np.ndarray:
    """Rows i.i.d. N(0, Sigma) with ``Sigma[a, b] = rho^|a-b|`` via the AR(1) recursion."""
    if not 0.0 <= rho < 1.0:
        raise ValueError(f"rho must lie in [0, 1), got {rho}")
    eps = rng.standard_normal((n, dim))
    z = np.empty((n, dim))
    z[:, 0] = eps[:, 0]
    innov = np.sqrt(1.0 - rho * rho)
    for a in range(1, dim):
        z[:, a] = rho * z[:, a - 1] + innov * eps[:, a]
    return z


def make_exposure(z) -> np.ndarray:
    """Standard normal CDF, elementwise."""
    return ndtr(np.asarray(z, dtype=np.float64))


def standard_cauchy(rng: np.random.Generator, size) -> np.ndarray:
    """t(1) draws by inversion, ``tan(pi (U - 1/2))``."""
    return np.tan(np.pi * (rng.random(size) - 0.5))


def draw_response(name: Scenario, x: np.ndarray, u: np.ndarray, active: tuple[int, ...],
                  rng: np.random.Generator,
                  coefficients: CoefficientProfile | None = None) -> tuple[np.ndarray, int]:
    """Response for fixed predictors and exposure.

    Returns ``(y, clamped)`` where ``clamped`` counts linear predictors capped
    at ``POISSON_ETA_CAP`` before Poisson sampling.
    """
    coef = CoefficientProfile() if coefficients is None else coefficients
    n = x.shape[0]
    a2, a100, a400, a600, a1000 = active
    b = [coef(s, u) for s in range(len(BASE_ACTIVE))]
    eta = sum(b[s] * x[:, a] for s, a in enumerate(active))
    clamped = 0

    if name is Scenario.EX1_CASE1:
        y = rng.binomial(1, 1.0 / (1.0 + np.exp(-eta))).astype(np.float64)
    elif name is Scenario.EX1_CASE2:
        clamped = int(np.count_nonzero(eta > POISSON_ETA_CAP))
        y = rng.poisson(np.exp(np.minimum(eta, POISSON_ETA_CAP))).astype(np.float64)
    elif name is Scenario.EX2_CASE1:
        y = np.exp(eta) + standard_cauchy(rng, n)
    elif name is Scenario.EX2_CASE2:
        y = np.exp(eta + standard_cauchy(rng, n))
    elif name is Scenario.EX2_CASE3:
        x400 = x[:, a400]
        y = (b[0] * np.exp(x[:, a2]) + b[1] * x[:, a100] ** 3
             + 2.0 * b[2] * x400 * (x400 < 2.0) + b[3] * x[:, a600]
             + 1.5 * b[4] * x[:, a1000] + standard_cauchy(rng, n))
    elif name is Scenario.EX2_CASE4:
        y = heteroscedastic_mean(x, u, active, coef) \
            + 2.0 * np.exp(b[3] * x[:, a600]) * rng.standard_normal(n)
    else:
        raise UnsupportedScenario(str(name))

    if not np.all(np.isfinite(y)):
        # exp overflow in the heavy-tailed models; cap at the largest float
        big = np.finfo(np.float64).max
        y = np.nan_to_num(y, nan=0.0, posinf=big, neginf=-big)
    return y, clamped


def heteroscedastic_mean(x, u, active, coefficients: CoefficientProfile | None = None):
    """Conditional mean of the heteroscedastic model (its error has mean zero)."""
    coef = CoefficientProfile() if coefficients is None else coefficients
    a2, a100, a400, _, a1000 = active
    return (coef(0, u) * x[:, a2] + coef(1, u) * x[:, a100]
            + coef(2, u) * x[:, a400] + coef(4, u) * x[:, a1000])


def generate(spec: ScenarioSpec, rng: np.random.Generator | None = None,
             coefficients: CoefficientProfile | None = None) -> Replication:
    """Draw one replication.

    ``rng`` defaults to a generator seeded from ``spec.seed``; pass
    :func:`replication_rng` output to derive per-replication streams.
    ``coefficients`` overrides the varying coefficients (test hook).
    """
    if not isinstance(spec.name, Scenario):
        raise UnsupportedScenario(str(spec.name))
    rng = replication_rng(spec.seed, 0) if rng is None else rng
    z = sample_ar_gaussian(spec.n, spec.p + 1, spec.rho, rng)
    ucol = spec.exposure_column
    u = make_exposure(z[:, ucol])
    x = np.delete(z, ucol, axis=1)
    y, clamped = draw_response(spec.name, x, u, spec.active_set, rng, coefficients)
    return Replication(DataSet(x, y, u), spec, clamped)
