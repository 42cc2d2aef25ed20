"""Accuracy/sensitivity sweeps, inversion search and complementarity metrics."""

from __future__ import annotations

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .confidence import d_from_auc
from .team import HumanSpec, combined_accuracy

__all__ = [
    "DEFAULT_MIN_MARGIN",
    "GridCell",
    "InversionPair",
    "ComplementarityReport",
    "parse_range",
    "refine_axis",
    "sweep_grid",
    "find_inversions",
    "complementarity",
    "write_grid_csv",
    "inversions_to_json",
]

# Suppresses floating-point-level "inversions" between near-identical cells.
DEFAULT_MIN_MARGIN = 0.005


class GridCell(NamedTuple):
    theta_m: float
    auc: float
    combined: float


@dataclass(frozen=True)
class InversionPair:
    """Model A is less accurate but more sensitive than B, yet helps more."""

    model_a: tuple
    model_b: tuple
    combined_a: float
    combined_b: float
    margin: float

    def to_dict(self) -> dict:
        return {
            "model_a": {"theta_m": self.model_a[0], "auc": self.model_a[1]},
            "model_b": {"theta_m": self.model_b[0], "auc": self.model_b[1]},
            "combined_a": self.combined_a,
            "combined_b": self.combined_b,
            "margin": self.margin,
        }


@dataclass(frozen=True)
class ComplementarityReport:
    joint: float
    human_alone: float
    ai_alone: float
    incidence: bool
    magnitude: float

    def to_dict(self) -> dict:
        return asdict(self)


def parse_range(text: str) -> np.ndarray:
    """``"a:b:n"`` -> ``n`` evenly spaced values from a to b inclusive."""
    try:
        lo, hi, n = text.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError:
        raise ValueError(f"range must look like start:stop:count, got {text!r}") from None
    if n < 1:
        raise ValueError(f"range {text!r} is empty")
    if n == 1 and lo != hi:
        raise ValueError(f"range {text!r} has one point but distinct endpoints")
    return np.linspace(lo, hi, n)


def refine_axis(values: Sequence[float], factor: int) -> np.ndarray:
    """Insert ``factor - 1`` evenly spaced points between neighbours."""
    values = np.asarray(values, dtype=float)
    if factor < 1:
        raise ValueError("refinement factor must be >= 1")
    if factor == 1 or values.size < 2:
        return values
    parts = [np.linspace(a, b, factor + 1)[:-1] for a, b in zip(values[:-1], values[1:])]
    return np.concatenate(parts + [values[-1:]])


def sweep_grid(
    human: HumanSpec,
    thetas: Iterable[float],
    aucs: Iterable[float],
    method: str = "closed-form",
    *,
    refine: int = 1,
    workers: int = 1,
) -> list:
    """Combined accuracy on the (theta_m, AUC) grid, row-major in theta_m.

    ``method`` is ``"closed-form"`` or ``"quadrature"``; see
    :func:`metasense.team.combined_accuracy` for what each means per human
    kind.
    """
    if method not in ("closed-form", "quadrature"):
        raise ValueError(f"grid method must be closed-form or quadrature, got {method!r}")
    thetas = refine_axis(list(thetas), refine)
    aucs = refine_axis(list(aucs), refine)
    if thetas.size == 0 or aucs.size == 0:
        raise ValueError("grid axes must be non-empty")
    for th in thetas:
        if not 0.0 < th < 1.0:
            raise ValueError(f"theta_m must lie in (0, 1), got {th}")
    ds = [d_from_auc(float(a)) for a in aucs]
    points = [(float(th), float(a), d) for th in thetas for a, d in zip(aucs, ds)]

    def cell(p):
        th, a, d = p
        return GridCell(th, a, combined_accuracy(human, th, d, method).value)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(cell, points))
    return [cell(p) for p in points]


def find_inversions(grid: Sequence[GridCell], min_margin: float = DEFAULT_MIN_MARGIN) -> list:
    """Every pair (A, B) with theta_A < theta_B, AUC_A > AUC_B and combined_A - combined_B >= min_margin.

    Exhaustive over the grid; sorted by decreasing margin (ties keep grid
    order). Margins must be strictly positive even when ``min_margin`` is 0.
    """
    if min_margin < 0:
        raise ValueError("min_margin must be non-negative")
    if len(grid) < 2:
        return []
    arr = np.asarray([(c.theta_m, c.auc, c.combined) for c in grid], dtype=float)
    th, auc, comb = arr[:, 0], arr[:, 1], arr[:, 2]
    margin = comb[:, None] - comb[None, :]
    mask = (th[:, None] < th[None, :]) & (auc[:, None] > auc[None, :]) & (margin > 0) & (margin >= min_margin)
    ia, ib = np.nonzero(mask)
    m = margin[ia, ib]
    order = np.argsort(-m, kind="stable")
    return [
        InversionPair(
            (float(th[a]), float(auc[a])),
            (float(th[b]), float(auc[b])),
            float(comb[a]),
            float(comb[b]),
            float(comb[a] - comb[b]),
        )
        for a, b in zip(ia[order], ib[order])
    ]


def complementarity(joint: float, human_alone: float, ai_alone: float) -> ComplementarityReport:
    """Does the team beat its best member, and by how much."""
    for name, v in (("joint", joint), ("human_alone", human_alone), ("ai_alone", ai_alone)):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1], got {v!r}")
    best = max(human_alone, ai_alone)
    return ComplementarityReport(joint, human_alone, ai_alone, joint > best, joint - best)


def write_grid_csv(cells: Iterable[GridCell], fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(GridCell._fields)
    for c in cells:
        writer.writerow((f"{c.theta_m:.6f}", f"{c.auc:.6f}", f"{c.combined:.6f}"))


def inversions_to_json(pairs: Iterable[InversionPair], **kwargs) -> str:
    return json.dumps([p.to_dict() for p in pairs], **kwargs)
