"""Logit-normal confidence model of an AI assistant and its sensitivity metrics.

The assistant is correct with probability ``theta_m``; its confidence is
logit-normal with location ``mu1`` when correct and ``mu0`` when incorrect,
sharing the logit-space scale ``sigma``. Sensitivity is summarised either by
Cohen's d = (mu1 - mu0) / sigma or by the meta-AUC = Phi(d / sqrt(2)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .numerics import logit, sigmoid, std_normal_cdf, std_normal_pdf, std_normal_quantile

__all__ = [
    "LogitNormal",
    "AiSpec",
    "Sensitivity",
    "sensitivity_from_params",
    "auc_from_d",
    "d_from_auc",
    "canonical_spec",
    "confidence_density",
    "calibration_curve",
    "sample_ai_trial",
    "sample_ai_trials",
    "sample_ai_logits",
]

_SQRT2 = math.sqrt(2.0)


def _check_open_unit(name: str, value: float) -> None:
    if not 0.0 < value < 1.0:
        raise ValueError(f"{name} must lie in the open interval (0, 1), got {value!r}")


@dataclass(frozen=True)
class LogitNormal:
    """Distribution of sigmoid(Z) for Z ~ N(mu, sigma**2)."""

    mu: float
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma!r}")

    def pdf(self, c):
        c = np.asarray(c, dtype=float)
        z = (logit(c) - self.mu) / self.sigma
        return std_normal_pdf(z) / (self.sigma * c * (1.0 - c))

    def cdf(self, c):
        return std_normal_cdf((logit(np.asarray(c, dtype=float)) - self.mu) / self.sigma)

    def sample(self, rng: np.random.Generator, size=None):
        return sigmoid(rng.normal(self.mu, self.sigma, size=size))


@dataclass(frozen=True)
class AiSpec:
    """AI assistant: accuracy plus the two logit-normal confidence branches.

    Attributes:
        theta_m: probability that the AI prediction is correct.
        mu0: logit-space mean of confidence on incorrect predictions.
        mu1: logit-space mean of confidence on correct predictions.
        sigma: shared logit-space standard deviation.
    """

    theta_m: float
    mu0: float
    mu1: float
    sigma: float = 1.0

    def __post_init__(self):
        _check_open_unit("theta_m", self.theta_m)
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma!r}")
        if self.mu1 < self.mu0:
            raise ValueError("mu1 < mu0 describes an anti-informative AI, which is not modelled")

    @property
    def d(self) -> float:
        return (self.mu1 - self.mu0) / self.sigma

    @property
    def correct(self) -> LogitNormal:
        return LogitNormal(self.mu1, self.sigma)

    @property
    def incorrect(self) -> LogitNormal:
        return LogitNormal(self.mu0, self.sigma)


class Sensitivity(NamedTuple):
    d: float
    auc: float


def auc_from_d(d):
    return std_normal_cdf(np.asarray(d, dtype=float) / _SQRT2)


def sensitivity_from_params(spec: AiSpec) -> Sensitivity:
    d = spec.d
    return Sensitivity(d, float(auc_from_d(d)))


def d_from_auc(auc: float) -> float:
    """Cohen's d matching a meta-AUC in [0.5, 1)."""
    if not 0.5 <= auc < 1.0:
        raise ValueError(f"meta-AUC must lie in [0.5, 1), got {auc!r}")
    if auc == 0.5:
        return 0.0
    return float(_SQRT2 * std_normal_quantile(auc))


def canonical_spec(theta_m: float, d: float) -> AiSpec:
    """Symmetric parameterisation mu0 = -d/2, mu1 = +d/2, sigma = 1.

    Combined accuracy depends only on (theta_m, d); the raw confidence values
    shown to a user do depend on this placement.
    """
    if not d >= 0:
        raise ValueError(f"d must be non-negative, got {d!r}")
    return AiSpec(theta_m, -0.5 * d, 0.5 * d, 1.0)


def confidence_density(spec: AiSpec, c, conditional: str = "marginal"):
    """Density of the AI confidence at ``c``.

    ``conditional`` selects the branch: ``"correct"``, ``"incorrect"`` or
    ``"marginal"`` (the accuracy-weighted mixture).
    """
    c = np.asarray(c, dtype=float)
    if np.any((c <= 0.0) | (c >= 1.0)):
        raise ValueError("confidence must lie in the open interval (0, 1)")
    if conditional == "correct":
        return spec.correct.pdf(c)
    if conditional == "incorrect":
        return spec.incorrect.pdf(c)
    if conditional == "marginal":
        return spec.theta_m * spec.correct.pdf(c) + (1.0 - spec.theta_m) * spec.incorrect.pdf(c)
    raise ValueError(f"unknown branch {conditional!r}")


def calibration_curve(spec: AiSpec, c):
    """p(y_m = 1 | c_m = c) by Bayes' rule over the two branches.

    With equal variances the log likelihood ratio is linear in logit(c), so
    the posterior is evaluated in log-odds form to avoid 0/0 in the tails.
    """
    c = np.asarray(c, dtype=float)
    if np.any((c <= 0.0) | (c >= 1.0)):
        raise ValueError("confidence must lie in the open interval (0, 1)")
    slope = (spec.mu1 - spec.mu0) / spec.sigma**2
    mid = 0.5 * (spec.mu0 + spec.mu1)
    return sigmoid(logit(spec.theta_m) + slope * (logit(c) - mid))


def sample_ai_logits(spec: AiSpec, rng: np.random.Generator, size: int):
    """Correctness flags and logit-space confidences (never saturate to 0/1)."""
    y_m = rng.random(size) < spec.theta_m
    z = rng.standard_normal(size)
    return y_m, np.where(y_m, spec.mu1, spec.mu0) + spec.sigma * z


def sample_ai_trials(spec: AiSpec, rng: np.random.Generator, size: int):
    """Draw ``size`` (correctness, confidence) pairs; returns two arrays."""
    y_m, z_m = sample_ai_logits(spec, rng, size)
    return y_m, sigmoid(z_m)


def sample_ai_trial(spec: AiSpec, rng: np.random.Generator) -> tuple[int, float]:
    y_m, c_m = sample_ai_trials(spec, rng, 1)
    return int(y_m[0]), float(c_m[0])
