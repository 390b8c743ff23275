"""Scalarizations of the three-objective problem.

All objectives are minimized. Each function works on scalars or on arrays of
objective values (for grid sweeps) and is anchored on the ideal point, the
vector of per-objective optima.

Weighted sum, goal attainment and goal programming operate on raw objective
values by default. Passing ``normalized=True`` divides each objective's
contribution by its ideal value instead, which makes the weights act on
relative deviations.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from grindmodm.errors import DomainError, NormalizationError, UsageError
from grindmodm.process_model import DecisionVector, ObjectiveTriple

OBJECTIVE_NAMES = ("ra", "t", "ct")
EQUAL_WEIGHTS = (1 / 3, 1 / 3, 1 / 3)


class Direction(str, enum.Enum):
    MIN = "min"
    MAX = "max"


class MethodKind(str, enum.Enum):
    INDIVIDUAL = "individual"
    LP_METRIC = "lp-metric"
    WSM = "wsm"
    MAX_MIN = "max-min"
    GOAL_ATTAINMENT = "goal-attainment"
    GOAL_PROGRAMMING = "goal-programming"

    @property
    def label(self) -> str:
        return _LABELS[self]


_LABELS = {
    MethodKind.INDIVIDUAL: "Individual optimization",
    MethodKind.LP_METRIC: "Lp-Metric",
    MethodKind.WSM: "WSM",
    MethodKind.MAX_MIN: "Max-Min",
    MethodKind.GOAL_ATTAINMENT: "Goal attainment",
    MethodKind.GOAL_PROGRAMMING: "Goal programming",
}

_WEIGHTED = (MethodKind.WSM, MethodKind.GOAL_ATTAINMENT, MethodKind.GOAL_PROGRAMMING)


@dataclass(frozen=True)
class IdealPoint:
    ra_star: float
    t_star: float
    ct_star: float
    argmin_ra: Optional[DecisionVector] = None
    argmin_t: Optional[DecisionVector] = None
    argmin_ct: Optional[DecisionVector] = None

    @property
    def values(self) -> ObjectiveTriple:
        return ObjectiveTriple(self.ra_star, self.t_star, self.ct_star)

    def to_dict(self) -> dict:
        def vec(v):
            return None if v is None else dict(zip(DecisionVector._fields, map(float, v)))

        return {
            "ra_star": float(self.ra_star),
            "t_star": float(self.t_star),
            "ct_star": float(self.ct_star),
            "argmin_ra": vec(self.argmin_ra),
            "argmin_t": vec(self.argmin_t),
            "argmin_ct": vec(self.argmin_ct),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "IdealPoint":
        def vec(v):
            return None if v is None else DecisionVector(v["vw"], v["vs"], v["aw"])

        return cls(
            d["ra_star"], d["t_star"], d["ct_star"],
            vec(d.get("argmin_ra")), vec(d.get("argmin_t")), vec(d.get("argmin_ct")),
        )


@dataclass(frozen=True)
class MethodSpec:
    """A scalarization method and its parameters.

    ``weights`` are normalized to sum to one on construction. ``target``
    names the single objective for an ``individual`` solve.
    """

    kind: MethodKind
    r: float = 2.0
    weights: tuple = EQUAL_WEIGHTS
    normalized: bool = False
    target: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", MethodKind(self.kind))
        if not self.r >= 1:
            raise UsageError(f"Lp exponent r must be >= 1, got {self.r}")
        w = tuple(float(x) for x in self.weights)
        if len(w) != 3:
            raise UsageError(f"expected 3 weights, got {len(w)}")
        if not all(x > 0 and np.isfinite(x) for x in w):
            raise UsageError(f"weights must be positive and finite, got {w}")
        total = sum(w)
        object.__setattr__(self, "weights", tuple(x / total for x in w))
        if self.target is not None and self.target not in OBJECTIVE_NAMES:
            raise UsageError(f"target must be one of {OBJECTIVE_NAMES}, got {self.target!r}")

    @property
    def label(self) -> str:
        return self.kind.label

    @classmethod
    def parse(cls, text: str) -> "MethodSpec":
        """Parse ``lp-metric[:r]``, ``wsm[:w1,w2,w3]``, ``max-min`` and friends."""
        name, _, arg = text.strip().partition(":")
        try:
            kind = MethodKind(name.strip().lower())
        except ValueError:
            choices = ", ".join(k.value for k in MethodKind)
            raise UsageError(f"unknown method {name!r}; choose from {choices}") from None
        if not arg:
            return cls(kind)
        if kind is MethodKind.LP_METRIC:
            try:
                return cls(kind, r=float(arg))
            except ValueError:
                raise UsageError(f"bad Lp exponent {arg!r}") from None
        if kind in _WEIGHTED:
            return cls(kind, weights=parse_weights(arg, 3))
        if kind is MethodKind.INDIVIDUAL:
            return cls(kind, target=arg.strip().lower())
        raise UsageError(f"method {kind.value} takes no arguments")

    def __str__(self):
        if self.kind is MethodKind.LP_METRIC:
            return f"{self.kind.value}:{self.r:g}"
        if self.kind in _WEIGHTED:
            return f"{self.kind.value}:" + ",".join(f"{w:.6g}" for w in self.weights)
        if self.kind is MethodKind.INDIVIDUAL and self.target:
            return f"{self.kind.value}:{self.target}"
        return self.kind.value


def parse_weights(text: str, n: int) -> tuple:
    try:
        w = tuple(float(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"weights must be comma-separated numbers, got {text!r}") from None
    if len(w) != n:
        raise UsageError(f"expected {n} weights, got {len(w)}")
    return w


def _ideal(fstar) -> ObjectiveTriple:
    return fstar.values if isinstance(fstar, IdealPoint) else ObjectiveTriple(*fstar)


def _stars(fstar) -> ObjectiveTriple:
    s = _ideal(fstar)
    if any(x == 0 for x in s):
        raise NormalizationError(f"ideal values must be non-zero, got {tuple(s)}")
    return s


def _check_weights(w) -> tuple:
    w = tuple(w)
    if len(w) != 3:
        raise UsageError(f"expected 3 weights, got {len(w)}")
    if any(x <= 0 for x in w):
        raise DomainError(f"weights must be positive, got {w}")
    return w


def lp_metric_value(f, fstar, r: float = 2.0):
    """Lp distance of relative deviations from the ideal point."""
    if not r >= 1:
        raise UsageError(f"r must be >= 1, got {r}")
    s = _stars(fstar)
    # solver noise can put fi a hair below the ideal
    dev = [np.maximum((fi - si) / si, 0.0) for fi, si in zip(f, s)]
    top = np.maximum(np.maximum(dev[0], dev[1]), dev[2])
    # scale by the largest deviation so large r cannot underflow
    scale = np.where(top > 0, top, 1.0)
    total = sum((d / scale) ** r for d in dev)
    return top * total ** (1.0 / r)


def wsm_value(f, fstar, weights=EQUAL_WEIGHTS, normalized: bool = False):
    w = _check_weights(weights)
    if normalized:
        s = _stars(fstar)
        return w[0] * (f[0] / s[0]) + w[1] * (f[1] / s[1]) + w[2] * (f[2] / s[2])
    return w[0] * f[0] + w[1] * f[1] + w[2] * f[2]


def maxmin_value(f, fstar):
    """min_i f_i*/f_i; equals 1 at the ideal point and is to be maximized."""
    s = _stars(fstar)
    for fi in f:
        if not np.all(np.asarray(fi) != 0):
            raise DomainError("objective values must be non-zero")
    return np.minimum(np.minimum(s[0] / f[0], s[1] / f[1]), s[2] / f[2])


def goal_attainment_value(f, fstar, weights=EQUAL_WEIGHTS, normalized: bool = False):
    """Smallest Z with f_i - w_i Z <= f_i* for all i, i.e. max_i (f_i - f_i*)/w_i."""
    w = _check_weights(weights)
    s = _stars(fstar) if normalized else _ideal(fstar)
    dev = [(fi - si) / (si if normalized else 1.0) / wi for fi, si, wi in zip(f, s, w)]
    return np.maximum(np.maximum(dev[0], dev[1]), dev[2])


def goal_programming_value(f, fstar, weights=EQUAL_WEIGHTS, normalized: bool = False):
    """Weighted sum of over- and under-achievement of each ideal value."""
    w = _check_weights(weights)
    s = _stars(fstar) if normalized else _ideal(fstar)
    total = 0.0
    for fi, si, wi in zip(f, s, w):
        over = np.maximum(fi - si, 0.0)
        under = np.maximum(si - fi, 0.0)
        dev = over + under
        total = total + wi * (dev / si if normalized else dev)
    return total


def scalarize(m: MethodSpec, f, fstar):
    """Return ``(value, direction)`` of method ``m`` at objective values ``f``."""
    kind = m.kind
    if kind is MethodKind.INDIVIDUAL:
        raise UsageError(
            "individual optimization is a per-objective solve; use solver.ideal_point"
        )
    if kind is MethodKind.LP_METRIC:
        return lp_metric_value(f, fstar, m.r), Direction.MIN
    if kind is MethodKind.WSM:
        return wsm_value(f, fstar, m.weights, m.normalized), Direction.MIN
    if kind is MethodKind.MAX_MIN:
        return maxmin_value(f, fstar), Direction.MAX
    if kind is MethodKind.GOAL_ATTAINMENT:
        return goal_attainment_value(f, fstar, m.weights, m.normalized), Direction.MIN
    return goal_programming_value(f, fstar, m.weights, m.normalized), Direction.MIN


DEFAULT_METHODS: Sequence[MethodSpec] = (
    MethodSpec(MethodKind.LP_METRIC),
    MethodSpec(MethodKind.MAX_MIN),
    MethodSpec(MethodKind.GOAL_ATTAINMENT),
    MethodSpec(MethodKind.WSM),
    MethodSpec(MethodKind.GOAL_PROGRAMMING),
)
