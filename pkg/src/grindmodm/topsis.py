"""TOPSIS ranking of alternatives over weighted criteria."""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from grindmodm.errors import (
    DegenerateMatrixError,
    MatrixParseError,
    NormalizationError,
    UsageError,
)

# objective criteria share 80% of the weight, CPU time gets 20%; the
# published vector sums to 0.998 and is kept verbatim
DEFAULT_WEIGHTS = (0.266, 0.266, 0.266, 0.20)
REPORT_CRITERIA = ("R_a", "T", "C_T", "CPU-Time")


class Impact(str, enum.Enum):
    BENEFIT = "+"
    COST = "-"


@dataclass(frozen=True)
class DecisionMatrix:
    alternatives: tuple
    criteria: tuple
    directions: tuple
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2:
            raise UsageError(f"decision matrix must be 2-D, got shape {values.shape}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "alternatives", tuple(self.alternatives))
        object.__setattr__(self, "criteria", tuple(self.criteria))
        object.__setattr__(self, "directions", tuple(Impact(d) for d in self.directions))
        rows, cols = values.shape
        if len(self.alternatives) != rows:
            raise UsageError(f"{len(self.alternatives)} alternative names for {rows} rows")
        if len(self.criteria) != cols or len(self.directions) != cols:
            raise UsageError(f"criteria/directions must have {cols} entries")
        if not np.all(np.isfinite(values)):
            raise UsageError("decision matrix values must be finite")

    def with_values(self, values) -> "DecisionMatrix":
        return DecisionMatrix(self.alternatives, self.criteria, self.directions, values)

    @classmethod
    def all_cost(cls, alternatives, criteria, values) -> "DecisionMatrix":
        return cls(alternatives, criteria, [Impact.COST] * len(criteria), values)

    # -- serialization ---------------------------------------------------

    @classmethod
    def from_csv(cls, text: str) -> "DecisionMatrix":
        """Parse CSV text: header ``name,crit1-,crit2+,...`` then one row per alternative."""
        rows = [r for r in csv.reader(io.StringIO(text)) if any(cell.strip() for cell in r)]
        if not rows:
            raise MatrixParseError("empty decision matrix", row=1)
        header = [h.strip() for h in rows[0]]
        if len(header) < 2:
            raise MatrixParseError("header needs a name column and at least one criterion", row=1)
        criteria, directions = [], []
        for j, cell in enumerate(header[1:], start=2):
            if len(cell) < 2 or cell[-1] not in "+-":
                raise MatrixParseError(
                    f"criterion {cell!r} lacks a '+' (benefit) or '-' (cost) suffix", row=1, column=j
                )
            criteria.append(cell[:-1].strip())
            directions.append(Impact(cell[-1]))
        names, values = [], []
        for i, row in enumerate(rows[1:], start=2):
            if len(row) != len(header):
                raise MatrixParseError(
                    f"expected {len(header)} fields, found {len(row)}", row=i
                )
            names.append(row[0].strip())
            parsed = []
            for j, cell in enumerate(row[1:], start=2):
                try:
                    x = float(cell)
                except ValueError:
                    raise MatrixParseError(f"not a number: {cell!r}", row=i, column=j) from None
                if not math.isfinite(x):
                    raise MatrixParseError(f"non-finite value {cell!r}", row=i, column=j)
                parsed.append(x)
            values.append(parsed)
        if not values:
            raise MatrixParseError("no alternatives after the header", row=2)
        return cls(names, criteria, directions, values)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["method"] + [f"{c}{d.value}" for c, d in zip(self.criteria, self.directions)])
        for name, row in zip(self.alternatives, self.values):
            writer.writerow([name] + [repr(float(x)) for x in row])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "alternatives": list(self.alternatives),
            "criteria": list(self.criteria),
            "directions": [d.value for d in self.directions],
            "values": self.values.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DecisionMatrix":
        return cls(d["alternatives"], d["criteria"], d["directions"], d["values"])

    @classmethod
    def from_report(cls, report: dict) -> "DecisionMatrix":
        """Build the matrix from a compare-run JSON report.

        Uses the embedded TOPSIS input when present, otherwise the method rows
        (objective values plus wall time).
        """
        if report.get("topsis") and report["topsis"].get("matrix"):
            return cls.from_dict(report["topsis"]["matrix"])
        rows = [r for r in report.get("methods", []) if r.get("result") is not None]
        if not rows:
            raise DegenerateMatrixError("report contains no solved methods")
        values = [
            [r["result"]["objectives"]["ra"], r["result"]["objectives"]["t"],
             r["result"]["objectives"]["ct"], r["result"]["wall_time"]]
            for r in rows
        ]
        return cls.all_cost([r["label"] for r in rows], REPORT_CRITERIA, values)


def load_matrix(path) -> DecisionMatrix:
    """Read a decision matrix from a CSV file or a compare-run JSON report."""
    text = Path(path).read_text()
    if str(path).lower().endswith(".json") or text.lstrip().startswith("{"):
        try:
            report = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MatrixParseError(f"invalid JSON: {exc.msg}", row=exc.lineno, column=exc.colno) from exc
        return DecisionMatrix.from_report(report)
    return DecisionMatrix.from_csv(text)


def reference_matrix() -> DecisionMatrix:
    """The published five-method decision matrix shipped with the package."""
    text = resources.files("grindmodm").joinpath("data/reference_decision_matrix.csv").read_text()
    return DecisionMatrix.from_csv(text)


# -- pipeline steps --------------------------------------------------------


def normalize(m: DecisionMatrix) -> DecisionMatrix:
    """Divide each column by its Euclidean norm."""
    norms = np.sqrt((m.values**2).sum(axis=0))
    for j, nrm in enumerate(norms):
        if nrm == 0:
            raise NormalizationError(f"criterion {m.criteria[j]!r} has zero Euclidean norm")
    return m.with_values(m.values / norms)


def apply_weights(m: DecisionMatrix, weights: Sequence[float]) -> DecisionMatrix:
    w = np.asarray(weights, dtype=float)
    if w.shape != (m.values.shape[1],):
        raise UsageError(f"expected {m.values.shape[1]} weights, got {w.size}")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise UsageError(f"weights must be finite and non-negative, got {tuple(w)}")
    return m.with_values(m.values * w)


def ideal_solutions(m: DecisionMatrix, directions=None):
    """Positive and negative ideal vectors: best and worst value per column."""
    directions = m.directions if directions is None else tuple(Impact(d) for d in directions)
    if len(directions) != m.values.shape[1]:
        raise UsageError("one direction per criterion is required")
    col_max = m.values.max(axis=0)
    col_min = m.values.min(axis=0)
    benefit = np.array([d is Impact.BENEFIT for d in directions])
    v_plus = np.where(benefit, col_max, col_min)
    v_minus = np.where(benefit, col_min, col_max)
    return v_plus, v_minus


def distances(m: DecisionMatrix, v_plus, v_minus):
    values = m.values if isinstance(m, DecisionMatrix) else np.asarray(m, dtype=float)
    d_plus = np.sqrt(((values - v_plus) ** 2).sum(axis=1))
    d_minus = np.sqrt(((values - v_minus) ** 2).sum(axis=1))
    return d_plus, d_minus


def similarity(d_plus, d_minus) -> np.ndarray:
    d_plus = np.asarray(d_plus, dtype=float)
    d_minus = np.asarray(d_minus, dtype=float)
    total = d_plus + d_minus
    if np.any(total == 0):
        raise DegenerateMatrixError(
            "an alternative coincides with both ideal solutions; the matrix cannot rank"
        )
    return d_minus / total


def rank(similarities, names=None) -> np.ndarray:
    """Rank per alternative, 1 = largest similarity; ties keep input order."""
    s = np.asarray(similarities, dtype=float)
    order = np.argsort(-s, kind="stable")
    ranks = np.empty(len(s), dtype=int)
    ranks[order] = np.arange(1, len(s) + 1)
    return ranks


@dataclass(frozen=True)
class TopsisResult:
    alternatives: tuple
    weights: tuple
    similarity: np.ndarray
    d_plus: np.ndarray
    d_minus: np.ndarray
    ranking: np.ndarray

    @property
    def order(self) -> list:
        """Alternative names from best to worst."""
        return [self.alternatives[i] for i in np.argsort(self.ranking, kind="stable")]

    def to_dict(self) -> dict:
        return {
            "alternatives": list(self.alternatives),
            "weights": [float(w) for w in self.weights],
            "similarity": [float(x) for x in self.similarity],
            "d_plus": [float(x) for x in self.d_plus],
            "d_minus": [float(x) for x in self.d_minus],
            "ranking": [int(x) for x in self.ranking],
        }


def topsis(m: DecisionMatrix, weights=DEFAULT_WEIGHTS, renormalize: bool = False) -> TopsisResult:
    if m.values.shape[0] < 2:
        raise DegenerateMatrixError("TOPSIS needs at least two alternatives")
    w = np.asarray(weights, dtype=float)
    if renormalize:
        total = w.sum()
        if total <= 0:
            raise UsageError("weights must have a positive sum to renormalize")
        w = w / total
    weighted = apply_weights(normalize(m), w)
    v_plus, v_minus = ideal_solutions(weighted)
    d_plus, d_minus = distances(weighted, v_plus, v_minus)
    s = similarity(d_plus, d_minus)
    return TopsisResult(m.alternatives, tuple(float(x) for x in w), s, d_plus, d_minus, rank(s))
