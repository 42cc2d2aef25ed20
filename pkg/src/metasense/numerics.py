"""Special functions, quadrature and random streams.

Everything downstream (closed forms, oracles, the simulator) goes through
these helpers so that tolerances are controlled in one place:

* ``std_normal_cdf`` / ``std_normal_quantile``: ~1e-15 (Cephes ``ndtr``/``ndtri``)
* ``bivariate_normal_cdf``: Genz's Gauss-Legendre scheme, ~1e-15 absolute
* ``integrate_1d``: adaptive Gauss-Kronrod, 1e-9 absolute by default
"""

from __future__ import annotations

import math
from typing import Callable, Sequence, Union

import numpy as np
from scipy import integrate, special

__all__ = [
    "QuadratureError",
    "logit",
    "sigmoid",
    "std_normal_pdf",
    "std_normal_cdf",
    "std_normal_quantile",
    "bivariate_normal_cdf",
    "integrate_1d",
    "logit_normal_expectation",
    "rng_stream",
]

_TWO_PI = 2.0 * math.pi
_SQRT_TWO_PI = math.sqrt(_TWO_PI)


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""


def logit(p):
    return special.logit(p)


def sigmoid(x):
    return special.expit(x)


def std_normal_pdf(x):
    return np.exp(-0.5 * np.square(x)) / _SQRT_TWO_PI


def std_normal_cdf(x):
    """Standard normal CDF. Saturates to exactly 0 or 1 far in the tails."""
    return special.ndtr(x)


def std_normal_quantile(p):
    """Inverse of :func:`std_normal_cdf` on the open interval (0, 1).

    Raises:
        ValueError: if any ``p`` lies outside (0, 1).
    """
    arr = np.asarray(p, dtype=float)
    if np.any(~((arr > 0.0) & (arr < 1.0))):
        raise ValueError(f"quantile requires p in (0, 1), got {p!r}")
    return special.ndtri(p)


# --- bivariate normal ----------------------------------------------------

# Node counts follow Genz (2004): fewer nodes suffice for small |rho|.
_GL = {n: np.polynomial.legendre.leggauss(n) for n in (6, 12, 20)}


def _phi(x: float) -> float:
    return float(special.ndtr(x))


def _bvnu(h: float, k: float, r: float) -> float:
    """Upper orthant probability P(X > h, Y > k) for correlation ``r``.

    Port of Alan Genz's BVNU (Drezner-Wesolowsky with Gauss-Legendre nodes
    and an asymptotic expansion for |r| >= 0.925).
    """
    if h == math.inf or k == math.inf:
        return 0.0
    if h == -math.inf:
        return 1.0 if k == -math.inf else _phi(-k)
    if k == -math.inf:
        return _phi(-h)

    ar = abs(r)
    if ar < 0.3:
        x, w = _GL[6]
    elif ar < 0.75:
        x, w = _GL[12]
    else:
        x, w = _GL[20]

    hk = h * k
    if ar < 0.925:
        hs = 0.5 * (h * h + k * k)
        asr = math.asin(r)
        sn = np.sin(0.5 * asr * (x + 1.0))
        bvn = float(np.dot(w, np.exp((sn * hk - hs) / (1.0 - sn * sn))))
        return bvn * asr / (2.0 * _TWO_PI) + _phi(-h) * _phi(-k)

    if r < 0:
        k = -k
        hk = -hk
    bvn = 0.0
    if ar < 1.0:
        as_ = (1.0 - r) * (1.0 + r)
        a = math.sqrt(as_)
        bs = (h - k) ** 2
        c = (4.0 - hk) / 8.0
        d = (12.0 - hk) / 16.0
        bvn = a * math.exp(-0.5 * (bs / as_ + hk)) * (
            1.0 - c * (bs - as_) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as_ * as_ / 5.0
        )
        if hk > -160.0:
            b = math.sqrt(bs)
            bvn -= (
                math.exp(-0.5 * hk)
                * _SQRT_TWO_PI
                * _phi(-b / a)
                * b
                * (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0)
            )
        a *= 0.5
        xs = (a * (x + 1.0)) ** 2
        rs = np.sqrt(1.0 - xs)
        terms = np.exp(-bs / (2.0 * xs) - hk / (1.0 + rs)) / rs - np.exp(
            -0.5 * (bs / xs + hk)
        ) * (1.0 + c * xs * (1.0 + d * xs))
        bvn += a * float(np.dot(w, terms))
        bvn = -bvn / _TWO_PI

    if r > 0:
        return bvn + _phi(-max(h, k))
    bvn = -bvn
    if k > h:
        if h < 0:
            bvn += _phi(k) - _phi(h)
        else:
            bvn += _phi(-h) - _phi(-k)
    return bvn


def _bvn_scalar(h: float, k: float, rho: float) -> float:
    if not math.isfinite(rho):
        raise ValueError(f"correlation must be finite, got {rho!r}")
    if abs(rho) > 1.0:
        raise ValueError(f"correlation must lie in [-1, 1], got {rho!r}")
    if math.isnan(h) or math.isnan(k):
        return math.nan
    return min(1.0, max(0.0, _bvnu(-h, -k, rho)))


def bivariate_normal_cdf(h, k, rho):
    """P(X <= h, Y <= k) for a standard bivariate normal with correlation rho.

    Broadcasts over array arguments. ``h`` and ``k`` may be +/-inf.

    Raises:
        ValueError: if ``rho`` is not finite or |rho| > 1.
    """
    h_arr, k_arr, r_arr = np.broadcast_arrays(
        np.asarray(h, dtype=float), np.asarray(k, dtype=float), np.asarray(rho, dtype=float)
    )
    if h_arr.ndim == 0:
        return _bvn_scalar(float(h_arr), float(k_arr), float(r_arr))
    out = np.empty(h_arr.shape)
    for idx in np.ndindex(h_arr.shape):
        out[idx] = _bvn_scalar(float(h_arr[idx]), float(k_arr[idx]), float(r_arr[idx]))
    return out


# --- quadrature ----------------------------------------------------------


def _quad(func, lower, upper, atol, limit, points=None):
    kwargs = dict(epsabs=atol, epsrel=0.0, limit=limit, full_output=1)
    if points is not None:
        kwargs["points"] = points
    res = integrate.quad(func, lower, upper, **kwargs)
    value, abserr = res[0], res[1]
    if len(res) > 3:
        raise QuadratureError(f"{res[3].strip()} (estimate={value:.6g}, abserr={abserr:.3g})")
    if not abserr <= atol:
        raise QuadratureError(f"abserr {abserr:.3g} exceeds requested {atol:.3g}")
    return value, abserr


def integrate_1d(
    f: Callable[[float], float],
    lower: float = -math.inf,
    upper: float = math.inf,
    *,
    logit_domain: bool = False,
    points=None,
    atol: float = 1e-9,
    limit: int = 200,
    return_error: bool = False,
):
    """Adaptive Gauss-Kronrod estimate of the integral of ``f``.

    With ``logit_domain=True`` the integral of ``f`` over (0, 1) is computed
    as an integral over z = logit(c) on the real line, so densities that pile
    up against 0 or 1 become smooth bumps. ``lower``/``upper`` are ignored in
    that mode. ``points`` lists interior breakpoints of a finite interval.

    Raises:
        QuadratureError: if the requested absolute tolerance is not reached
            within ``limit`` subdivisions.
    """
    if logit_domain:

        def g(z):
            c = sigmoid(z)
            jac = c * (1.0 - c)
            if jac == 0.0:
                return 0.0
            return f(c) * jac

        value, abserr = _quad(g, -math.inf, math.inf, atol, limit)
    else:
        value, abserr = _quad(f, lower, upper, atol, limit, points)
    return (value, abserr) if return_error else value


def logit_normal_expectation(
    f: Callable[[float], float],
    mu: float,
    sigma: float,
    *,
    atol: float = 1e-9,
    limit: int = 200,
    return_error: bool = False,
):
    """E[f(C)] for C ~ LogitNormal(mu, sigma), integrated in standardised logit space.

    The Gaussian weight is absorbed into the change of variables
    c = sigmoid(mu + sigma * z), so the integrand is phi(z) f(c) and stays
    smooth for arbitrarily small ``sigma``.
    """
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma!r}")

    def g(z):
        return std_normal_pdf(z) * f(float(sigmoid(mu + sigma * z)))

    # Beyond |z| = 40 the weight is below 1e-340; split at 0 so the bump is resolved.
    value, abserr = _quad(g, -40.0, 40.0, atol, limit, points=[0.0])
    return (value, abserr) if return_error else value


# --- random streams ------------------------------------------------------

StreamId = Union[int, Sequence[int]]


def rng_stream(seed: int, stream_id: StreamId = 0) -> np.random.Generator:
    """Deterministic, independent random stream for one unit of work.

    Streams are keyed by ``(seed, stream_id)`` through numpy's SeedSequence
    spawn keys, so the draws of a given stream never depend on how many other
    streams exist or on which worker consumes them. ``stream_id`` may be a
    tuple for nested partitioning, e.g. ``(condition, block)``.
    """
    key = (int(stream_id),) if np.isscalar(stream_id) else tuple(int(s) for s in stream_id)
    ss = np.random.SeedSequence(entropy=int(seed) & ((1 << 64) - 1), spawn_key=key)
    return np.random.Generator(np.random.PCG64(ss))
