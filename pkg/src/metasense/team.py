"""Expected accuracy of a human who relies on an AI as an ideal observer.

Two human models are supported:

* constant confidence ``c_h`` (the human is right with probability ``c_h``);
* logit-normal confidence ``c_h ~ LogitNormal(mu_h, sigma_h)``.

For each there is an analytic route and an independent numerical route:

==================  ===============================  =================================
human               analytic                         numerical reference
==================  ===============================  =================================
constant            :func:`combined_constant`        :func:`combined_constant_integral`
logit-normal        :func:`combined_variable_approx` :func:`combined_variable_exact`
==================  ===============================  =================================

The simulator in :mod:`metasense.simulator` is the stochastic check on both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .confidence import AiSpec, canonical_spec
from .numerics import (
    bivariate_normal_cdf,
    integrate_1d,
    logit,
    logit_normal_expectation,
    std_normal_cdf,
    std_normal_pdf,
)
from .policy import switch_logit

__all__ = [
    "PROBIT_SCALE",
    "HumanSpec",
    "CombinedAccuracy",
    "combined_constant",
    "combined_constant_value",
    "combined_constant_integral",
    "combined_variable_exact",
    "combined_variable_approx",
    "conditional_correctness",
    "combined_accuracy",
]

# sigmoid(x) ~= Phi(PROBIT_SCALE * x)
PROBIT_SCALE = math.sqrt(math.pi / 8.0)

METHODS = ("closed-form", "quadrature", "monte-carlo")


@dataclass(frozen=True)
class HumanSpec:
    """Human confidence profile.

    Use :meth:`constant` or :meth:`logit_normal` rather than the raw
    constructor.
    """

    kind: str
    c_h: Optional[float] = None
    mu_h: Optional[float] = None
    sigma_h: Optional[float] = None

    def __post_init__(self):
        if self.kind == "constant":
            if self.c_h is None or self.mu_h is not None or self.sigma_h is not None:
                raise ValueError("constant human takes c_h only")
            if not 0.0 < self.c_h < 1.0:
                raise ValueError(f"c_h must lie in (0, 1), got {self.c_h!r}")
        elif self.kind == "logit-normal":
            if self.c_h is not None or self.mu_h is None or self.sigma_h is None:
                raise ValueError("logit-normal human takes mu_h and sigma_h only")
            if not self.sigma_h > 0:
                raise ValueError(f"sigma_h must be positive, got {self.sigma_h!r}")
            if not math.isfinite(self.mu_h):
                raise ValueError("mu_h must be finite")
        else:
            raise ValueError(f"unknown human kind {self.kind!r}")

    @classmethod
    def constant(cls, c_h: float) -> "HumanSpec":
        return cls("constant", c_h=float(c_h))

    @classmethod
    def logit_normal(cls, mu_h: float, sigma_h: float) -> "HumanSpec":
        return cls("logit-normal", mu_h=float(mu_h), sigma_h=float(sigma_h))

    @property
    def is_constant(self) -> bool:
        return self.kind == "constant"

    def mean_confidence(self) -> float:
        if self.is_constant:
            return self.c_h
        return logit_normal_expectation(lambda c: c, self.mu_h, self.sigma_h, atol=1e-12)


@dataclass(frozen=True)
class CombinedAccuracy:
    value: float
    method: str
    error_bound: float = 0.0

    def __float__(self):
        return self.value


def _check_unit(name, value):
    arr = np.asarray(value, dtype=float)
    if np.any(~((arr > 0.0) & (arr < 1.0))):
        raise ValueError(f"{name} must lie in the open interval (0, 1), got {value!r}")


def _check_d(d):
    if not (np.all(np.asarray(d, dtype=float) >= 0.0) and np.all(np.isfinite(d))):
        raise ValueError(f"d must be finite and non-negative, got {d!r}")


def combined_constant_value(c_h, theta_m, d):
    """Vectorised closed form for a constant-confidence human.

    c_h [theta Phi(r) + (1 - theta) Phi(r + d)] + theta [1 - Phi(r)] with
    r = (logit c_h - logit theta) / d - d / 2; d = 0 evaluates to the limit
    max(c_h, theta).
    """
    c_h, theta_m, d = np.broadcast_arrays(
        np.asarray(c_h, dtype=float), np.asarray(theta_m, dtype=float), np.asarray(d, dtype=float)
    )
    safe_d = np.where(d > 0, d, 1.0)
    r = (logit(c_h) - logit(theta_m)) / safe_d - 0.5 * safe_d
    # 1 - Phi(r) computed as Phi(-r) to keep precision when Phi(r) ~ 1.
    value = c_h * (theta_m * std_normal_cdf(r) + (1.0 - theta_m) * std_normal_cdf(r + safe_d)) + (
        theta_m * std_normal_cdf(-r)
    )
    value = np.where(d > 0, value, np.maximum(c_h, theta_m))
    return value if value.ndim else float(value)


def combined_constant(c_h: float, theta_m: float, d: float) -> CombinedAccuracy:
    _check_unit("c_h", c_h)
    _check_unit("theta_m", theta_m)
    _check_d(d)
    return CombinedAccuracy(float(combined_constant_value(c_h, theta_m, d)), "closed-form")


def combined_constant_integral(
    c_h: float, spec: AiSpec, *, atol: float = 1e-10
) -> CombinedAccuracy:
    """Numerically integrate the reliance rule over the AI confidence.

    Integrates c_h p(c_m) below the switch point plus p(y_m = 1 | c_m) p(c_m)
    above it, in logit space, without using any normal-CDF identity. Serves as
    an oracle for :func:`combined_constant`.
    """
    _check_unit("c_h", c_h)
    th, s = spec.theta_m, spec.sigma

    def marginal(z):
        return (th * std_normal_pdf((z - spec.mu1) / s) + (1 - th) * std_normal_pdf((z - spec.mu0) / s)) / s

    def adopt(z):
        # calibration * marginal density collapses to the correct-branch density
        return th * std_normal_pdf((z - spec.mu1) / s) / s

    if spec.mu1 == spec.mu0:
        return CombinedAccuracy(max(c_h, th), "quadrature")
    # Both branch densities are negligible (< 1e-300) beyond 40 sigma of their means.
    lo = min(spec.mu0, spec.mu1) - 40.0 * s
    hi = max(spec.mu0, spec.mu1) + 40.0 * s
    z_star = min(max(float(switch_logit(c_h, spec)), lo), hi)

    def part(f, a, b):
        if b <= a:
            return 0.0, 0.0
        inner = [p for p in (spec.mu0, spec.mu1) if a < p < b]
        return integrate_1d(f, a, b, points=inner or None, atol=atol / 2, return_error=True)

    below, e1 = part(marginal, lo, z_star)
    above, e2 = part(adopt, z_star, hi)
    return CombinedAccuracy(c_h * below + above, "quadrature", c_h * e1 + e2)


def combined_variable_exact(
    human: HumanSpec, theta_m: float, d: float, *, atol: float = 1e-10
) -> CombinedAccuracy:
    """Average the constant-confidence closed form over a logit-normal human.

    Reference value for :func:`combined_variable_approx`.
    """
    if human.is_constant:
        raise ValueError("combined_variable_exact needs a logit-normal human")
    _check_unit("theta_m", theta_m)
    _check_d(d)
    value, err = logit_normal_expectation(
        lambda c: combined_constant_value(c, theta_m, d),
        human.mu_h,
        human.sigma_h,
        atol=atol,
        return_error=True,
    )
    return CombinedAccuracy(value, "quadrature", err)


def combined_variable_approx(
    human: HumanSpec, theta_m: float, d: float, *, probit_scale: float = PROBIT_SCALE
) -> CombinedAccuracy:
    """Bivariate-normal closed form for a logit-normal human.

    Replaces sigmoid by a scaled probit so that both human terms reduce to
    bivariate normal CDFs::

        theta BN(A, S, rho) + (1 - theta) BN(A', S, rho) + theta [1 - Phi(A)]

    with a = (mu_h - logit theta) / d - d / 2, b = sigma_h / d,
    s = lam mu_h, t = lam sigma_h, A = a / sqrt(1 + b^2),
    A' = (a + d) / sqrt(1 + b^2), S = s / sqrt(1 + t^2) and
    rho = b t / (sqrt(1 + b^2) sqrt(1 + t^2)).

    ``error_bound`` is not a rigorous bound: it reports the worst absolute
    error of the probit substitution, max |sigmoid(x) - Phi(lam x)| ~ 0.018,
    which caps the error of the human-confidence term.
    """
    if human.is_constant:
        raise ValueError("combined_variable_approx needs a logit-normal human")
    _check_unit("theta_m", theta_m)
    if not (d > 0 and math.isfinite(d)):
        raise ValueError("the bivariate-normal form divides by d; use the exact path for d = 0")
    a = (human.mu_h - float(logit(theta_m))) / d - 0.5 * d
    b = human.sigma_h / d
    s = probit_scale * human.mu_h
    t = probit_scale * human.sigma_h
    nb = math.sqrt(1.0 + b * b)
    nt = math.sqrt(1.0 + t * t)
    rho = b * t / (nb * nt)
    big_s = s / nt
    value = (
        theta_m * bivariate_normal_cdf(a / nb, big_s, rho)
        + (1.0 - theta_m) * bivariate_normal_cdf((a + d) / nb, big_s, rho)
        + theta_m * float(std_normal_cdf(-a / nb))
    )
    return CombinedAccuracy(float(value), "closed-form", _PROBIT_MAX_ERR)


def _probit_max_error(lam: float = PROBIT_SCALE) -> float:
    x = np.linspace(0.0, 8.0, 80001)
    return float(np.max(np.abs(1.0 / (1.0 + np.exp(-x)) - std_normal_cdf(lam * x))))


_PROBIT_MAX_ERR = _probit_max_error()


def conditional_correctness(c_h: float, c_m: float, spec: AiSpec) -> float:
    """Probability the final answer is correct given both confidences."""
    from .confidence import calibration_curve
    from .policy import Action, decide

    if decide(c_h, c_m, spec) is Action.H:
        return float(c_h)
    return float(calibration_curve(spec, c_m))


def combined_accuracy(
    human: HumanSpec,
    theta_m: float,
    d: float,
    method: str = "closed-form",
    *,
    n: int = 1_000_000,
    seed: int = 0,
) -> CombinedAccuracy:
    """Dispatch to the analytic, quadrature or Monte Carlo route.

    For a logit-normal human with d = 0 the closed form is undefined and the
    quadrature value (which equals E[max(c_h, theta_m)]) is returned instead.
    """
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")
    if method == "monte-carlo":
        from .simulator import HumanPolicy, run_trials

        _, summary = run_trials(
            canonical_spec(theta_m, d), human, HumanPolicy.ideal_observer(), n, seed, keep_trials=False
        )
        return CombinedAccuracy(summary.accuracy_after, "monte-carlo", summary.standard_error)
    if human.is_constant:
        if method == "closed-form":
            return combined_constant(human.c_h, theta_m, d)
        return combined_constant_integral(human.c_h, canonical_spec(theta_m, d))
    if method == "closed-form" and d > 0:
        return combined_variable_approx(human, theta_m, d)
    return combined_variable_exact(human, theta_m, d)
