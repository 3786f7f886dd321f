"""Replication-level screening criteria and their aggregation.

Criteria, for a true active set A:

* ``R_k``  mean rank of active predictor k;
* ``S``    minimum model size containing all of A (quantiles reported);
* ``P_k``  fraction of replications with k inside the top d;
* ``P_a``  fraction of replications with all of A inside the top d.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyActiveSet, InconsistentDimensions, IndexOutOfRange, InvalidCutoff
from .screening import ScreeningResult

QUANTILE_LEVELS = (0.05, 0.25, 0.5, 0.75, 0.95)


def rank_of(result: ScreeningResult, k: int) -> int:
    """1-based position of predictor ``k`` (0-based index) in the ranking."""
    if not 0 <= k < result.p:
        raise IndexOutOfRange(f"predictor index {k} outside [0, {result.p})")
    return int(result.ranks[k])


def min_model_size(result: ScreeningResult, active: Iterable[int]) -> int:
    active = list(active)
    if not active:
        raise EmptyActiveSet("active set is empty")
    return max(rank_of(result, k) for k in active)


@dataclass(frozen=True)
class EvaluationMetrics:
    """Aggregated criteria; predictor keys are 0-based indices."""

    rank_by_active: dict[int, float]
    min_model_size_quantiles: dict[float, float]
    p_all: dict[int, float]
    p_each: dict[tuple[int, int], float]
    replications: int

    def to_dict(self, labels=None) -> dict:
        """JSON-ready form. ``labels`` maps a 0-based index to a display key."""
        lab = labels or (lambda k: str(k + 1))
        p_k: dict[str, dict[str, float]] = {}
        for (d, k), v in self.p_each.items():
            p_k.setdefault(str(d), {})[lab(k)] = v
        return {
            "R": {lab(k): v for k, v in self.rank_by_active.items()},
            "S_quantiles": {f"{q:g}": v for q, v in self.min_model_size_quantiles.items()},
            "P_a": {str(d): v for d, v in self.p_all.items()},
            "P_k": p_k,
        }


def aggregate(per_rep: Sequence[tuple[ScreeningResult, Iterable[int]]],
              cutoffs: Iterable[int],
              quantile_levels: Iterable[float] = QUANTILE_LEVELS) -> EvaluationMetrics:
    """Combine replications into :class:`EvaluationMetrics`.

    S quantiles use linear interpolation between order statistics (the
    ``(m-1) q`` rule), so they may be fractional.
    """
    if not per_rep:
        raise ValueError("no replications to aggregate")
    p = per_rep[0][0].p
    actives = []
    for res, active in per_rep:
        if res.p != p:
            raise InconsistentDimensions(f"replications mix p={p} and p={res.p}")
        actives.append(tuple(int(k) for k in active))
    keys = actives[0]
    if any(set(a) != set(keys) for a in actives):
        raise InconsistentDimensions("replications disagree on the active set")

    ranks = np.array([[rank_of(res, k) for k in keys] for res, _ in per_rep])
    sizes = ranks.max(axis=1)
    cutoffs = [int(d) for d in cutoffs]
    for d in cutoffs:
        if not 1 <= d <= p:
            raise InvalidCutoff(f"cutoff {d} outside [1, {p}]")

    levels = [float(q) for q in quantile_levels]
    qs = np.quantile(sizes.astype(np.float64), levels, method="linear")
    return EvaluationMetrics(
        rank_by_active={k: float(ranks[:, i].mean()) for i, k in enumerate(keys)},
        min_model_size_quantiles={q: float(v) for q, v in zip(levels, qs)},
        p_all={d: float(np.mean(sizes <= d)) for d in cutoffs},
        p_each={(d, k): float(np.mean(ranks[:, i] <= d))
                for d in cutoffs for i, k in enumerate(keys)},
        replications=len(per_rep),
    )
