"""Ideal-observer reliance policy: switch point, action rule and utility."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .confidence import AiSpec
from .numerics import logit, sigmoid

__all__ = [
    "Action",
    "SwitchPoint",
    "switch_point",
    "switch_logit",
    "switch_logit_from_logit",
    "rely_on_ai",
    "decide",
    "utility",
]


class Action(str, enum.Enum):
    H = "H"  # keep own prediction
    M = "M"  # adopt the AI prediction


@dataclass(frozen=True)
class SwitchPoint:
    """AI confidence above which the ideal observer adopts the AI's answer.

    ``degenerate`` is ``"none"`` for an interior threshold, otherwise
    ``"always-H"`` or ``"always-M"`` (only when the AI confidence carries no
    information, d = 0); ``c_star`` is ``None`` in the degenerate cases.
    """

    c_star: Optional[float]
    degenerate: str = "none"


def _check_open_unit(name, value):
    arr = np.asarray(value, dtype=float)
    if np.any(~((arr > 0.0) & (arr < 1.0))):
        raise ValueError(f"{name} must lie in the open interval (0, 1), got {value!r}")


def switch_logit(c_h, spec: AiSpec):
    """logit(c*) for one or many human confidences; requires d > 0.

    Solves c_h = p(y_m = 1 | c*) for the equal-variance logit-normal model.
    """
    _check_open_unit("c_h", c_h)
    return switch_logit_from_logit(logit(c_h), spec)


def switch_logit_from_logit(z_h, spec: AiSpec):
    """As :func:`switch_logit`, taking logit(c_h) directly."""
    gap = spec.mu1 - spec.mu0
    if gap <= 0:
        raise ValueError("switch point is undefined for d = 0")
    return spec.sigma**2 * (np.asarray(z_h, dtype=float) - logit(spec.theta_m)) / gap + 0.5 * (spec.mu1 + spec.mu0)


def switch_point(c_h: float, spec: AiSpec) -> SwitchPoint:
    _check_open_unit("c_h", c_h)
    if spec.mu1 == spec.mu0:
        # Flat calibration curve: follow whichever agent is more accurate on average.
        return SwitchPoint(None, "always-M" if spec.theta_m >= c_h else "always-H")
    return SwitchPoint(float(sigmoid(switch_logit(c_h, spec))))


def rely_on_ai(c_h, z_m, spec: AiSpec):
    """Vectorised action rule on logit-space AI confidence ``z_m``.

    Returns True where the ideal observer adopts the AI (ties go to the AI).
    """
    c_h = np.asarray(c_h, dtype=float)
    z_m = np.asarray(z_m, dtype=float)
    if spec.mu1 == spec.mu0:
        return np.broadcast_to(spec.theta_m >= c_h, np.broadcast(c_h, z_m).shape).copy()
    return z_m >= switch_logit(c_h, spec)


def decide(c_h: float, c_m: float, spec: AiSpec) -> Action:
    """H if the AI confidence is below the switch point, else M."""
    _check_open_unit("c_m", c_m)
    sp = switch_point(c_h, spec)
    if sp.degenerate == "always-M":
        return Action.M
    if sp.degenerate == "always-H":
        return Action.H
    return Action.M if c_m >= sp.c_star else Action.H


def utility(action: Action, y_h: int, y_m: int) -> int:
    """1 if the agent whose answer was adopted is correct, else 0."""
    return int(y_h) if Action(action) is Action.H else int(y_m)
