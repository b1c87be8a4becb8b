"""Ornstein-Uhlenbeck transition law in the time and Laplace domains.

The process is ``dW = (alpha - beta W) dt + sigma dZ``.  Its transition law
from ``w0`` after time ``t`` is Gaussian; the Laplace transforms in ``t`` are
products of parabolic cylinder functions with a gamma factor.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy import stats

from . import specfun
from .errors import DomainError
from .report import CheckPoint, VerificationReport

__all__ = [
    "OUParameters",
    "StateQuery",
    "conditional_mean",
    "conditional_variance",
    "transition_density",
    "transition_distribution",
    "laplace_density",
    "laplace_distribution",
    "scaled_state",
    "exact_sample",
    "empirical_cdf_check",
    "histogram_check",
    "MIN_KS_SAMPLES",
]

MIN_KS_SAMPLES = 10_000
KS_CRITICAL = 1.63


@dataclass(frozen=True)
class OUParameters:
    """Drift level ``alpha``, reversion rate ``beta > 0``, volatility ``sigma > 0``."""

    alpha: float = 0.0
    beta: float = 1.0
    sigma: float = math.sqrt(2.0)

    def __post_init__(self):
        for name in ("alpha", "beta", "sigma"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if self.beta <= 0:
            raise DomainError(f"beta must be positive, got {self.beta}")
        if self.sigma <= 0:
            raise DomainError(f"sigma must be positive, got {self.sigma}")

    @property
    def stationary_mean(self) -> float:
        return self.alpha / self.beta


@dataclass(frozen=True)
class StateQuery:
    """Terminal state ``w``, source state ``w0`` and elapsed time ``t``."""

    w: float
    w0: float
    t: float

    def __post_init__(self):
        if not (np.all(np.isfinite(self.w)) and math.isfinite(self.w0)):
            raise DomainError("states must be finite")


def _check_time(t):
    if not (t > 0) or not math.isfinite(t):
        raise DomainError(f"t must be positive and finite, got {t}")


def conditional_mean(w0, t, p: OUParameters):
    return p.alpha / p.beta + (w0 - p.alpha / p.beta) * np.exp(-p.beta * t)


def conditional_variance(t, p: OUParameters):
    return p.sigma ** 2 * -np.expm1(-2.0 * p.beta * t) / (2.0 * p.beta)


def transition_density(q: StateQuery, p: OUParameters):
    """Gaussian transition density of W_t at ``q.w`` given ``W_0 = q.w0``.

    ``q.w`` may be an array; the result then has the same shape.
    """
    _check_time(q.t)
    b, a = p.beta, p.alpha
    one_minus = -np.expm1(-2.0 * b * q.t)
    num = (b * np.asarray(q.w, dtype=float) - a) - (b * q.w0 - a) * math.exp(-b * q.t)
    den = b * p.sigma ** 2 * one_minus
    val = math.sqrt(b) / math.sqrt(math.pi * p.sigma ** 2 * one_minus) * np.exp(-num * num / den)
    return float(val) if np.ndim(val) == 0 else val


def transition_distribution(q: StateQuery, p: OUParameters):
    """P(W_t <= q.w | W_0 = q.w0), written with erfc for accuracy in both tails."""
    _check_time(q.t)
    b, a = p.beta, p.alpha
    one_minus = -np.expm1(-2.0 * b * q.t)
    num = (b * np.asarray(q.w, dtype=float) - a) - (b * q.w0 - a) * math.exp(-b * q.t)
    val = 0.5 * specfun.erfc(-num / np.sqrt(b * p.sigma ** 2 * one_minus))
    return float(val) if np.ndim(val) == 0 else val


def scaled_state(w, p: OUParameters):
    """Map a state to the parabolic-cylinder argument ``sqrt(2)(beta w - alpha)/(sigma sqrt(beta))``."""
    return math.sqrt(2.0) * (p.beta * w - p.alpha) / (p.sigma * math.sqrt(p.beta))


def _check_s(s):
    s = complex(s)
    if not (s.real > 0) or not math.isfinite(s.imag):
        raise DomainError(f"Re s must be positive, got s={s}")
    return s


def _pcf_scaled_wide(v, z):
    """``D_v(z)`` as (unit mantissa, log scale), also beyond ``|z| = 12``.

    States far out in the tail map to arguments past the double-precision
    region of :func:`specfun.pcf_d`; those factors are evaluated with mpmath.
    """
    if abs(z) <= specfun.MAX_ARGUMENT:
        return specfun.pcf_d_scaled(v, z)
    with mpmath.workdps(30):
        val = mpmath.pcfd(mpmath.mpc(v.real, v.imag), mpmath.mpf(z))
        if val == 0:
            return 0j, 0.0
        lg = mpmath.log(val)
        return complex(mpmath.exp(1j * mpmath.im(lg))), float(mpmath.re(lg))


def _gamma_pcf_product(order_shift, s, beta, x, y, log_prefactor):
    """Gamma(s/beta) D_{-s/beta}(x) D_{order_shift - s/beta}(y) exp(log_prefactor), in log space."""
    v = -s / beta
    lg = specfun.log_gamma(s / beta)
    m1, l1 = _pcf_scaled_wide(v, x)
    m2, l2 = _pcf_scaled_wide(v + order_shift, y)
    if m1 == 0 or m2 == 0:
        return 0j
    return m1 * m2 * np.exp(lg + l1 + l2 + log_prefactor)


def laplace_density(w, s, w0, p: OUParameters):
    """Laplace transform in ``t`` of the transition density.

    Selects the ``w0 <= w`` or ``w <= w0`` branch; both agree at ``w = w0``.

    Raises
    ------
    DomainError
        If ``Re s <= 0`` or the order ``-s/beta`` leaves the supported region
        of :func:`specfun.pcf_d`.
    PoleError
        If ``s/beta`` sits on a gamma pole.
    """
    s = _check_s(s)
    zw, zw0 = scaled_state(w, p), scaled_state(w0, p)
    log_pref = 0.25 * (zw0 * zw0 - zw * zw) - math.log(p.sigma * math.sqrt(math.pi * p.beta))
    if w0 <= w:
        x, y = -zw0, zw
    else:
        x, y = zw0, -zw
    return complex(_gamma_pcf_product(0.0, s, p.beta, x, y, log_pref))


def laplace_distribution(w1, s, w0, p: OUParameters):
    """Laplace transform in ``t`` of the transition distribution, for ``w1 >= w0``.

    Equals ``1/s`` minus a gamma-times-two-D term that vanishes as ``w1`` grows.
    """
    s = _check_s(s)
    if w1 < w0:
        raise DomainError(f"requires w1 >= w0, got w1={w1}, w0={w0}")
    x, y = -scaled_state(w0, p), scaled_state(w1, p)
    log_pref = 0.25 * (x * x - y * y) - math.log(p.beta * math.sqrt(2.0 * math.pi))
    return complex(1.0 / s - _gamma_pcf_product(-1.0, s, p.beta, x, y, log_pref))


def exact_sample(w0, t, p: OUParameters, rng: np.random.Generator, size=None):
    """Draw W_t given W_0 = w0 from the exact Gaussian transition.

    ``rng`` is a caller-owned ``numpy.random.Generator``; no global state is used.
    """
    _check_time(t)
    mean = conditional_mean(w0, t, p)
    sd = math.sqrt(conditional_variance(t, p))
    return rng.normal(mean, sd, size=size)


def empirical_cdf_check(n: int, q: StateQuery, p: OUParameters, seed) -> VerificationReport:
    """Kolmogorov-Smirnov test of ``n`` exact draws against the transition distribution.

    Passes when the KS statistic is below ``1.63/sqrt(n)`` (level about 0.01).
    ``q.w`` is ignored; only ``q.w0`` and ``q.t`` are used.
    """
    if n < MIN_KS_SAMPLES:
        raise DomainError(f"n must be at least {MIN_KS_SAMPLES}, got {n}")
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    draws = exact_sample(q.w0, q.t, p, rng, size=n)
    cdf = lambda w: transition_distribution(StateQuery(w, q.w0, q.t), p)
    stat = float(stats.kstest(draws, cdf).statistic)
    crit = KS_CRITICAL / math.sqrt(n)
    point = CheckPoint("ks", {"n": n, "w0": q.w0, "t": q.t, "seed": seed},
                       value=stat, reference=0.0, residual=stat, tolerance=crit)
    return VerificationReport("ou-ks", "transition distribution", [point],
                              wall_time=time.perf_counter() - start)


def histogram_check(n: int, q: StateQuery, p: OUParameters, seed, bins: int = 60,
                    n_sd: float = 4.0, n_se: float = 4.0) -> VerificationReport:
    """Compare a histogram of ``n`` exact draws with the transition density.

    Bins span the conditional mean plus or minus ``n_sd`` standard deviations.
    The expected count of each bin is the density integrated over the bin,
    taken from the distribution function; a bin passes when its count is
    within ``n_se`` binomial standard errors of that expectation.
    """
    if n < MIN_KS_SAMPLES:
        raise DomainError(f"n must be at least {MIN_KS_SAMPLES}, got {n}")
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    draws = exact_sample(q.w0, q.t, p, rng, size=n)
    mean = conditional_mean(q.w0, q.t, p)
    sd = math.sqrt(conditional_variance(q.t, p))
    edges = np.linspace(mean - n_sd * sd, mean + n_sd * sd, bins + 1)
    counts, _ = np.histogram(draws, edges)
    cdf = transition_distribution(StateQuery(edges, q.w0, q.t), p)
    prob = np.diff(cdf)
    expected = n * prob
    se = np.sqrt(n * prob * (1.0 - prob))
    points = []
    for i in range(bins):
        dev = abs(counts[i] - expected[i]) / se[i]
        points.append(CheckPoint("histogram", {"bin": i, "lo": float(edges[i]), "hi": float(edges[i + 1])},
                                 value=float(counts[i]), reference=float(expected[i]),
                                 residual=float(dev), tolerance=n_se))
    return VerificationReport("ou-histogram", "transition density", points,
                              wall_time=time.perf_counter() - start)
