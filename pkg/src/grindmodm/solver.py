"""Deterministic box- and wear-constrained optimizer.

A full-factorial grid sweep over the variable box finds the best feasible
node; a bounded compass search then refines it from the node itself and from
``multistart_count - 1`` seeded jittered copies. The wear constraint enters
the local search as a quadratic exterior penalty and every candidate passes a
final feasibility filter, so the returned point never violates it.

Objectives handed to :func:`grid_search` and :func:`local_refine` map a
``DecisionVector`` (whose fields may be arrays) to values that are
*minimized*.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from grindmodm.errors import InfeasibleError, UsageError
from grindmodm.process_model import (
    DecisionVector,
    ObjectiveTriple,
    ProcessConstants,
    objectives,
    residual_ok,
    wear_constraint_residual,
    wear_ratio,
    within_bounds,
)
from grindmodm.scalarization import (
    OBJECTIVE_NAMES,
    Direction,
    IdealPoint,
    MethodKind,
    MethodSpec,
    scalarize,
)

Objective = Callable[[DecisionVector], "np.ndarray | float"]

_INITIAL_STEP = 0.05  # fraction of each axis span
_MAX_STEP = 0.5


@dataclass(frozen=True)
class SolveOptions:
    grid_resolution: int = 201
    multistart_count: int = 16
    penalty_coefficient: float = 1e6
    refine_tolerance: float = 1e-9
    seed: int = 0
    max_iterations: int = 10_000

    def __post_init__(self):
        if int(self.grid_resolution) != self.grid_resolution or self.grid_resolution < 2:
            raise UsageError(f"grid_resolution must be an integer >= 2, got {self.grid_resolution}")
        if self.multistart_count < 0:
            raise UsageError(f"multistart_count must be >= 0, got {self.multistart_count}")
        if not self.penalty_coefficient > 0:
            raise UsageError("penalty_coefficient must be > 0")
        if not self.refine_tolerance > 0:
            raise UsageError("refine_tolerance must be > 0")
        if self.max_iterations < 1:
            raise UsageError("max_iterations must be >= 1")


@dataclass
class SolveResult:
    """Outcome of a grid sweep, a local refinement or a full solve.

    For :func:`solve` ``scalar_value`` is the method's scalarized value in its
    natural direction (Max-Min is maximized). For :func:`grid_search` and
    :func:`local_refine` it is the value of the minimized objective.
    """

    dv: DecisionVector
    objectives: ObjectiveTriple
    scalar_value: float
    feasible: bool
    wall_time: float
    evaluations: int
    residual: float = math.nan
    truncated: bool = False
    method: str = ""

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "dv": dict(zip(DecisionVector._fields, map(float, self.dv))),
            "objectives": dict(zip(ObjectiveTriple._fields, map(float, self.objectives))),
            "scalar_value": float(self.scalar_value),
            "feasible": bool(self.feasible),
            "residual": float(self.residual),
            "truncated": bool(self.truncated),
            "evaluations": int(self.evaluations),
            "wall_time": float(self.wall_time),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SolveResult":
        return cls(
            dv=DecisionVector(**d["dv"]),
            objectives=ObjectiveTriple(**d["objectives"]),
            scalar_value=d["scalar_value"],
            feasible=d["feasible"],
            wall_time=d["wall_time"],
            evaluations=d["evaluations"],
            residual=d.get("residual", math.nan),
            truncated=d.get("truncated", False),
            method=d.get("method", ""),
        )


def single_objective(name: str, c: ProcessConstants) -> Objective:
    if name not in OBJECTIVE_NAMES:
        raise UsageError(f"objective must be one of {OBJECTIVE_NAMES}, got {name!r}")
    index = OBJECTIVE_NAMES.index(name)

    def objective(dv):
        return objectives(dv, c)[index]

    return objective


def scalarized_objective(m: MethodSpec, c: ProcessConstants, fstar) -> Objective:
    """Scalarized objective of ``m`` in minimization sense."""

    def objective(dv):
        value, direction = scalarize(m, objectives(dv, c), fstar)
        return -value if direction is Direction.MAX else value

    return objective


def _axes(c: ProcessConstants, n: int):
    return (
        np.linspace(c.vw_min, c.vw_max, n),
        np.linspace(c.vs_min, c.vs_max, n),
        np.linspace(c.aw_min, c.aw_max, n),
    )


def _finish(dv, value, c, start_time, evaluations, truncated=False) -> SolveResult:
    dv = DecisionVector(*(float(x) for x in dv))
    residual = float(wear_constraint_residual(dv, c))
    feasible = bool(within_bounds(dv, c) and residual_ok(residual, c))
    return SolveResult(
        dv=dv,
        objectives=ObjectiveTriple(*(float(x) for x in objectives(dv, c))),
        scalar_value=float(value),
        feasible=feasible,
        wall_time=time.perf_counter() - start_time,
        evaluations=evaluations,
        residual=residual,
        truncated=truncated,
    )


def grid_search(objective: Objective, c: ProcessConstants, opts: SolveOptions = SolveOptions()) -> SolveResult:
    """Best feasible node of the uniform ``n x n x n`` grid over the box.

    Ties go to the lexicographically smallest ``(vw, vs, aw)``. Raises
    :class:`InfeasibleError` carrying the least-violating node when no node
    satisfies the wear constraint.
    """
    start = time.perf_counter()
    n = int(opts.grid_resolution)
    vw_axis, vs_axis, aw_axis = _axes(c, n)
    vs_plane, aw_plane = np.meshgrid(vs_axis, aw_axis, indexing="ij")
    best_value, best_dv = math.inf, None
    top_ratio, least_violating = -math.inf, None
    # one vw slice at a time keeps memory at n^2; scanning slices in
    # increasing vw with a strict comparison preserves lexicographic ties
    for vw in vw_axis:
        dv = DecisionVector(np.full_like(vs_plane, vw), vs_plane, aw_plane)
        ratio = wear_ratio(dv, c)
        residual = ratio - c.g_ratio
        ok = residual_ok(residual, c)
        values = np.asarray(objective(dv), dtype=float)
        masked = np.where(ok & ~np.isnan(values), values, np.inf)
        k = int(np.argmin(masked))
        if ok.flat[k] and masked.flat[k] < best_value:
            best_value = masked.flat[k]
            best_dv = (vw, vs_plane.flat[k], aw_plane.flat[k])
        # the largest achieved ratio violates least, whatever the threshold
        k = int(np.argmax(ratio))
        if least_violating is None or ratio.flat[k] > top_ratio:
            top_ratio = float(ratio.flat[k])
            least_violating = DecisionVector(float(vw), float(vs_plane.flat[k]), float(aw_plane.flat[k]))
    if best_dv is None:
        residual = top_ratio - c.g_ratio
        raise InfeasibleError(
            f"no feasible node on the {n}^3 grid; least violating node {tuple(least_violating)} "
            f"reaches WRP/WWP = {top_ratio:.6g} against G = {c.g_ratio:g}",
            least_violating=least_violating,
            residual=residual,
        )
    return _finish(best_dv, best_value, c, start, n**3)


def local_refine(
    start: DecisionVector,
    objective: Objective,
    c: ProcessConstants,
    opts: SolveOptions = SolveOptions(),
) -> SolveResult:
    """Bounded compass search from ``start``.

    Only function values are used. Trial points are clipped onto the box and
    a move is accepted only when it strictly lowers the penalized objective,
    so the incumbent value never increases. Stops when the step falls below
    ``refine_tolerance`` (as a fraction of each axis span) or after
    ``max_iterations`` polls, in which case ``truncated`` is set.
    """
    t0 = time.perf_counter()
    start = DecisionVector(*(float(x) for x in start))
    if not within_bounds(start, c):
        raise UsageError(f"start point {tuple(start)} lies outside the variable bounds")
    lo = np.array(c.lower, dtype=float)
    hi = np.array(c.upper, dtype=float)
    span = hi - lo

    def penalized(x):
        dv = DecisionVector(*x)
        value = float(objective(dv))
        shortfall = -float(wear_constraint_residual(dv, c))
        if shortfall > 0:
            value += opts.penalty_coefficient * shortfall**2
        return value

    x = np.array(start, dtype=float)
    fx = penalized(x)
    evaluations = 1
    step = _INITIAL_STEP
    iterations = 0
    truncated = False
    while step >= opts.refine_tolerance:
        if iterations >= opts.max_iterations:
            truncated = True
            break
        iterations += 1
        moved = False
        for axis in range(3):
            for sign in (1.0, -1.0):
                y = x.copy()
                y[axis] = min(max(x[axis] + sign * step * span[axis], lo[axis]), hi[axis])
                if y[axis] == x[axis]:
                    continue
                fy = penalized(y)
                evaluations += 1
                if fy < fx:
                    x, fx, moved = y, fy, True
                    break
            if moved:
                break
        step = min(2 * step, _MAX_STEP) if moved else step / 2
    return _finish(x, objective(DecisionVector(*x)), c, t0, evaluations, truncated)


def _minimize(objective: Objective, c: ProcessConstants, opts: SolveOptions):
    seed = grid_search(objective, c, opts)
    evaluations = seed.evaluations
    truncated = False
    lo = np.array(c.lower, dtype=float)
    hi = np.array(c.upper, dtype=float)
    cell = (hi - lo) / (opts.grid_resolution - 1)
    rng = np.random.default_rng(opts.seed)
    jitter = rng.uniform(-1.0, 1.0, size=(max(opts.multistart_count - 1, 0), 3))
    starts = []
    if opts.multistart_count > 0:
        starts.append(seed.dv)
        starts.extend(
            DecisionVector(*np.clip(np.array(seed.dv) + j * cell, lo, hi)) for j in jitter
        )
    candidates = [seed]
    for s in starts:
        r = local_refine(s, objective, c, opts)
        evaluations += r.evaluations
        truncated |= r.truncated
        if r.feasible:
            candidates.append(r)
    # reduce by (value, dv) so the winner never depends on evaluation order
    best = min(candidates, key=lambda r: (r.scalar_value, tuple(r.dv)))
    return best, evaluations, truncated


def solve(
    m: MethodSpec,
    c: ProcessConstants,
    fstar: Optional[IdealPoint] = None,
    opts: SolveOptions = SolveOptions(),
) -> SolveResult:
    """Optimize method ``m``: grid seed, then multistart local refinement.

    ``fstar`` is required for every method except an ``individual`` solve,
    which needs ``m.target`` naming the objective to minimize. The wall time
    of the whole call is recorded as the CPU-time criterion.
    """
    t0 = time.perf_counter()
    if m.kind is MethodKind.INDIVIDUAL:
        if m.target is None:
            raise UsageError("an individual solve needs a target objective (ra, t or ct)")
        objective = single_objective(m.target, c)
    else:
        if fstar is None:
            raise UsageError(f"{m.label} needs the ideal point; run ideal_point first")
        objective = scalarized_objective(m, c, fstar)
    best, evaluations, truncated = _minimize(objective, c, opts)
    if m.kind is MethodKind.INDIVIDUAL:
        value = best.objectives[OBJECTIVE_NAMES.index(m.target)]
    else:
        value = float(scalarize(m, best.objectives, fstar)[0])
    return SolveResult(
        dv=best.dv,
        objectives=best.objectives,
        scalar_value=float(value),
        feasible=best.feasible,
        wall_time=time.perf_counter() - t0,
        evaluations=evaluations,
        residual=best.residual,
        truncated=truncated,
        method=str(m),
    )


def ideal_point(c: ProcessConstants, opts: SolveOptions = SolveOptions()) -> IdealPoint:
    """Minimize each objective separately under the bounds and wear constraint."""
    results = [solve(MethodSpec(MethodKind.INDIVIDUAL, target=name), c, None, opts) for name in OBJECTIVE_NAMES]
    ra, t, ct = results
    return IdealPoint(
        ra.objectives.ra, t.objectives.t, ct.objectives.ct, ra.dv, t.dv, ct.dv
    )
