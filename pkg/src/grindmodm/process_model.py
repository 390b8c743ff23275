"""Surface grinding process model.

Three objectives (surface roughness, total grinding time, production cost),
the wheel-wear constraint built from the workpiece removal parameter (WRP)
and the wheel wear parameter (WWP), and the box bounds on the decision
variables.

Every function accepts scalars or numpy arrays in the ``DecisionVector``
fields, so the same code path serves single evaluations and the solver's
vectorized grid sweeps. Formulas use the raw tabulated numbers with no unit
conversion; with the default constants this is what yields
``T = 150 / vw + 22``.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, NamedTuple, Union

import numpy as np

from grindmodm.errors import ConfigError, DomainError

DERIVED = "derived"

# Down-feed per pass used when ap_mode is not overridden. See README for how
# it was chosen; the tabulated constants do not include it.
DEFAULT_DOWN_FEED = 0.005

FEASIBILITY_RTOL = 1e-9


class DecisionVector(NamedTuple):
    """Workpiece speed (m/min), wheel speed (m/min), total thickness of cut (mm)."""

    vw: Any
    vs: Any
    aw: Any


class ObjectiveTriple(NamedTuple):
    """Surface roughness (um), grinding time (min), production cost ($)."""

    ra: Any
    t: Any
    ct: Any


class CostTerms(NamedTuple):
    """The six additive terms of the production cost, in printed order."""

    machining: Any
    idle: Any
    adjustment: Any
    dressing_time: Any
    material: Any
    dressing: Any

    @property
    def total(self):
        return (
            self.machining
            + self.idle
            + self.adjustment
            + self.dressing_time
            + self.material
            + self.dressing
        )


class Evaluation(NamedTuple):
    objectives: ObjectiveTriple
    feasible: Any


_COUNT_FIELDS = ("p", "nd", "nt", "ntd", "np", "sp")
_BOUND_PAIRS = (("vw_min", "vw_max"), ("vs_min", "vs_max"), ("aw_min", "aw_max"))


@dataclass(frozen=True)
class ProcessConstants:
    """Machine, material and economic constants plus variable bounds.

    Defaults are the published parameter table for the 1.2080 steel case.
    ``ap_mode`` is either a fixed down-feed per pass (mm/pass) or the string
    ``"derived"``, meaning ``a_p = a_w / N_p``.
    """

    mc: float = 30.0
    p: int = 1
    lw: float = 30.0
    le: float = 15.0
    bw: float = 20.0
    be: float = 10.0
    fb: float = 2.0
    g_ratio: float = 60.0
    de: float = 500.0
    bs: float = 50.0
    sd: float = 10.0
    vr: float = 25.0
    ti: float = 2.0
    tch: float = 20.0
    nd: int = 4
    nt: int = 4
    ntd: int = 2000
    np: int = 4
    cd: float = 75.0
    cs: float = 0.003
    sp: int = 3
    doc: float = 0.02
    lead: float = 0.02
    ka: float = 0.0869
    vol: float = 6.99
    dg: float = 0.3
    rc: float = 58.0
    ta: float = 0.02
    te: float = 0.02
    vw_min: float = 10.0
    vw_max: float = 50.0
    vs_min: float = 1000.0
    vs_max: float = 3000.0
    aw_min: float = 0.04
    aw_max: float = 0.12
    ap_mode: Union[float, str] = DEFAULT_DOWN_FEED

    def __post_init__(self):
        issues = self.issues()
        if issues:
            raise ConfigError(issues)

    def issues(self) -> list[tuple[str, str]]:
        """Return every invariant violation as ``(field, message)``."""
        found = []
        for f in dataclasses.fields(self):
            if f.name == "ap_mode":
                continue
            value = getattr(self, f.name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                found.append((f.name, f"expected a number, got {value!r}"))
                continue
            if math.isnan(value):
                found.append((f.name, "is NaN"))
            elif f.name == "g_ratio":
                # a threshold, not a physical magnitude: 0 disables, inf forbids
                if value < 0:
                    found.append((f.name, f"must be >= 0, got {value}"))
            elif f.name in _COUNT_FIELDS:
                if value < 1:
                    found.append((f.name, f"count must be >= 1, got {value}"))
            elif not (value > 0 and math.isfinite(value)):
                found.append((f.name, f"must be finite and > 0, got {value}"))
        for lo, hi in _BOUND_PAIRS:
            a, b = getattr(self, lo), getattr(self, hi)
            if isinstance(a, (int, float)) and isinstance(b, (int, float)) and not a < b:
                found.append((lo, f"bound order violated: {lo}={a} is not < {hi}={b}"))
        mode = self.ap_mode
        if isinstance(mode, str):
            if mode != DERIVED:
                found.append(("ap_mode", f"expected a number or {DERIVED!r}, got {mode!r}"))
        elif isinstance(mode, bool) or not isinstance(mode, (int, float)):
            found.append(("ap_mode", f"expected a number or {DERIVED!r}, got {mode!r}"))
        elif not (mode > 0 and math.isfinite(mode)):
            found.append(("ap_mode", f"fixed down feed must be > 0, got {mode}"))
        return found

    @property
    def lower(self) -> DecisionVector:
        return DecisionVector(self.vw_min, self.vs_min, self.aw_min)

    @property
    def upper(self) -> DecisionVector:
        return DecisionVector(self.vw_max, self.vs_max, self.aw_max)

    @property
    def feasibility_tolerance(self) -> float:
        return FEASIBILITY_RTOL * max(1.0, self.g_ratio)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ProcessConstants":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - names)
        if unknown:
            raise ConfigError([(k, "unknown field") for k in unknown])
        return cls(**data)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ProcessConstants":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError([("<document>", f"invalid JSON: {exc}")]) from exc
        if not isinstance(data, dict):
            raise ConfigError([("<document>", "top level must be a JSON object")])
        return cls.from_dict(data)

    @classmethod
    def load(cls, path) -> "ProcessConstants":
        return cls.from_json(Path(path).read_text())

    def save(self, path) -> None:
        Path(path).write_text(self.to_json())


def _require_positive(**values):
    for name, value in values.items():
        arr = np.asarray(value, dtype=float)
        if not np.all(arr > 0):
            raise DomainError(f"{name} must be > 0, got {value!r}")


def down_feed(dv: DecisionVector, c: ProcessConstants):
    """Down feed per pass a_p, resolved from ``c.ap_mode``."""
    if c.ap_mode == DERIVED:
        _require_positive(aw=dv.aw)
        return dv.aw / c.np
    return c.ap_mode


def surface_roughness(dv: DecisionVector, c: ProcessConstants = None):
    """Ra = 4.456 vw^0.229 aw^-1.649 vs^-0.964 (regression fit, constants unused)."""
    _require_positive(vw=dv.vw, vs=dv.vs, aw=dv.aw)
    return 4.456 * dv.vw**0.229 * dv.aw**-1.649 * dv.vs**-0.964


def grinding_time(dv: DecisionVector, c: ProcessConstants):
    _require_positive(vw=dv.vw)
    return c.np * c.lw / dv.vw + c.tch + c.ti + c.le / dv.vw + c.le / dv.vw


def cost_terms(dv: DecisionVector, c: ProcessConstants) -> CostTerms:
    _require_positive(vw=dv.vw, vs=dv.vs, aw=dv.aw)
    ap = down_feed(dv, c)
    rate = c.mc / (60 * c.p)
    passes = dv.aw / ap + c.sp + dv.aw * c.bw * c.lw / (math.pi * c.de * c.bs * ap * c.g_ratio)
    machining = rate * ((c.lw + c.le) / (1000 * dv.vw)) * ((c.bw + c.be) / c.fb) * passes
    idle = rate * (c.sd / c.vr + c.ti)
    adjustment = c.mc / 60 * c.tch / c.nt
    dressing_time = rate / c.nd * (math.pi * c.de * c.bs) / (1000 * c.lead * dv.vs)
    material = c.cs * (
        dv.aw * c.bw * c.lw / (c.p * c.g_ratio) + math.pi * c.doc * c.bs * c.de / (c.p * c.nd)
    )
    dressing = c.cd / (c.p * c.ntd)
    return CostTerms(machining, idle, adjustment, dressing_time, material, dressing)


def production_cost(dv: DecisionVector, c: ProcessConstants):
    return cost_terms(dv, c).total


def wrp_factors(dv: DecisionVector, c: ProcessConstants) -> dict:
    """Sub-factors of the workpiece removal parameter, grouped as printed."""
    _require_positive(vw=dv.vw, vs=dv.vs)
    return {
        "coefficient": 94.4,
        "dressing": 2 * c.doc / (3 * c.lead) + 1,
        "lead": c.lead ** (11 / 19),
        "speed_ratio": (dv.vw / dv.vs) ** (3 / 19),
        "wheel_speed": dv.vs,
        "wheel_diameter": c.de ** (43 / 304),
        "hardness": c.vol**0.47,
        "grain": c.dg ** (5 / 38),
        "workpiece_hardness": c.rc ** (27 / 19),
    }


def workpiece_removal_parameter(dv: DecisionVector, c: ProcessConstants):
    f = wrp_factors(dv, c)
    numerator = f["dressing"] * f["lead"] * f["speed_ratio"] * f["wheel_speed"]
    denominator = f["wheel_diameter"] * f["hardness"] * f["grain"] * f["workpiece_hardness"]
    return f["coefficient"] * numerator / denominator


def wwp_factors(dv: DecisionVector, c: ProcessConstants) -> dict:
    """Sub-factors of the wheel wear parameter, grouped as printed."""
    _require_positive(vw=dv.vw, vs=dv.vs)
    ap = down_feed(dv, c)
    _require_positive(ap=ap)
    return {
        "wear_coefficient": c.ka,
        "down_feed": ap,
        "grain": c.dg ** (5 / 38),
        "workpiece_hardness": c.rc ** (27 / 19),
        "wheel_diameter": c.de ** (1.2 / c.vol - 43 / 304),
        "hardness": c.vol**0.38,
        "dressing": 1 + c.doc / c.lead,
        "lead": c.lead ** (27 / 19),
        "speed_ratio": (dv.vs / dv.vw) ** (3 / 19),
        "workpiece_speed": dv.vw,
        "dressing_relief": 1 + 2 * c.doc / (3 * c.lead),
    }


def wheel_wear_parameter(dv: DecisionVector, c: ProcessConstants):
    f = wwp_factors(dv, c)
    material = (
        f["wear_coefficient"] * f["down_feed"] * f["grain"] * f["workpiece_hardness"]
        / (f["wheel_diameter"] * f["hardness"])
    )
    kinematic = (
        f["dressing"] * f["lead"] * f["speed_ratio"] * f["workpiece_speed"] / f["dressing_relief"]
    )
    return material * kinematic


def wear_ratio(dv: DecisionVector, c: ProcessConstants):
    """WRP / WWP, the achieved grinding ratio."""
    wwp = wheel_wear_parameter(dv, c)
    if not np.all(np.asarray(wwp) > 0):
        raise DomainError("wheel wear parameter must be > 0")
    return workpiece_removal_parameter(dv, c) / wwp


def wear_constraint_residual(dv: DecisionVector, c: ProcessConstants):
    """WRP/WWP - G; the wear constraint holds when this is >= -tolerance."""
    return wear_ratio(dv, c) - c.g_ratio


def within_bounds(dv: DecisionVector, c: ProcessConstants):
    return (
        (dv.vw >= c.vw_min) & (dv.vw <= c.vw_max)
        & (dv.vs >= c.vs_min) & (dv.vs <= c.vs_max)
        & (dv.aw >= c.aw_min) & (dv.aw <= c.aw_max)
    )


def residual_ok(residual, c: ProcessConstants):
    # an infinite threshold gives residual -inf, which must never pass
    return np.isfinite(residual) & (residual >= -c.feasibility_tolerance)


def objectives(dv: DecisionVector, c: ProcessConstants) -> ObjectiveTriple:
    return ObjectiveTriple(
        surface_roughness(dv, c), grinding_time(dv, c), production_cost(dv, c)
    )


def evaluate(dv: DecisionVector, c: ProcessConstants) -> Evaluation:
    """Objective triple and feasibility (bounds plus wear constraint)."""
    dv = DecisionVector(*dv)
    f = objectives(dv, c)
    feasible = within_bounds(dv, c) & residual_ok(wear_constraint_residual(dv, c), c)
    if np.ndim(feasible) == 0:
        feasible = bool(feasible)
    return Evaluation(f, feasible)
