"""Numerical forward and inverse Laplace transforms.

Forward transforms use adaptive Gauss-Kronrod quadrature (QUADPACK through
``scipy.integrate.quad``) on a truncated interval.  Inversion uses either the
fixed Talbot contour or Euler summation of the Bromwich integral; both are
checked by repeating the inversion with a second node count.

Image functions passed to :func:`invert` must accept a 1-D complex ndarray
of Laplace parameters and return an array of the same shape.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import comb

from .errors import ConvergenceError, DomainError
from .report import CheckPoint, VerificationReport

__all__ = [
    "InversionConfig",
    "QuadratureConfig",
    "forward_transform",
    "invert",
    "talbot",
    "euler",
    "round_trip",
    "relative_residual",
]

# Nodes whose weight exp(Re(s) t) is below exp(_UNDERFLOW_EXP) are dropped:
# their contribution is far below double-precision resolution.
_UNDERFLOW_EXP = -690.0


@dataclass(frozen=True)
class InversionConfig:
    """Numerical inversion settings.

    ``node_count`` is the number of Talbot nodes M, or for Euler the number of
    terms before binomial averaging.  ``working_tolerance`` bounds the relative
    disagreement allowed between two node counts (times ten).
    """

    method: str = "talbot"
    node_count: int = 32
    working_tolerance: float = 1e-10

    def __post_init__(self):
        if self.method not in ("talbot", "euler"):
            raise DomainError(f"unknown inversion method {self.method!r}")
        if not 8 <= int(self.node_count) <= 128:
            raise DomainError(f"node_count must lie in [8, 128], got {self.node_count}")
        if not 1e-15 < self.working_tolerance < 1e-4:
            raise DomainError(f"working_tolerance must lie in (1e-15, 1e-4), got {self.working_tolerance}")


@dataclass(frozen=True)
class QuadratureConfig:
    """Forward-quadrature settings.

    ``endpoint_substitution='sqrt'`` integrates in ``u`` with ``t = u**2``,
    which removes an integrable ``t**-0.5`` singularity at the origin.
    """

    abs_tol: float = 1e-13
    rel_tol: float = 1e-11
    max_subdivisions: int = 2000
    endpoint_substitution: str = "none"

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise DomainError("quadrature tolerances must be positive")
        if not 1 <= self.max_subdivisions <= 10_000:
            raise DomainError("max_subdivisions must lie in [1, 10000]")
        if self.endpoint_substitution not in ("none", "sqrt"):
            raise DomainError(f"unknown endpoint substitution {self.endpoint_substitution!r}")


def _estimate_envelope(f, t_start):
    """Bound ``|f(t)| <= B exp(g t)`` for t >= t_start from samples on a geometric grid."""
    ts = t_start * 2.0 ** np.arange(0, 12)
    vals = []
    for t in ts:
        try:
            v = abs(f(t))
        except OverflowError:
            v = math.inf
        if not math.isfinite(v):
            break
        vals.append(v)
    # Overflow far out only truncates the grid; the growth rate is still measured.
    if len(vals) < 4:
        raise DomainError("original function is not finite on the tail grid")
    ts = ts[:len(vals)]
    vals = np.array(vals)
    logs = np.log(np.maximum(vals, 1e-300))
    # growth rate from the last doubling, never below zero decay credit
    g = max((logs[-1] - logs[-4]) / (ts[-1] - ts[-4]), 0.0)
    bound = float(np.max(vals * np.exp(-g * ts))) * 2.0
    return bound, g


def forward_transform(f, s, cfg: QuadratureConfig = QuadratureConfig(), envelope=None):
    """Laplace transform ``int_0^inf exp(-s t) f(t) dt`` by adaptive quadrature.

    The integral is truncated at ``T`` such that the tail bound
    ``B exp(-(Re s - g) T) / (Re s - g)`` is below ``abs_tol/10``, where
    ``|f(t)| <= B exp(g t)`` beyond ``T``.  The envelope ``(B, g)`` can be
    supplied; otherwise it is estimated from samples of ``f``.

    Raises
    ------
    DomainError
        If ``Re s <= 0`` or the envelope grows at least as fast as ``Re s``.
    ConvergenceError
        If QUADPACK exhausts ``max_subdivisions`` without meeting tolerance.
    """
    s = complex(s)
    if not s.real > 0:
        raise DomainError(f"Re s must be positive, got s={s}")
    if envelope is None:
        envelope = _estimate_envelope(f, 1.0)
    bound, growth = envelope
    decay = s.real - growth
    if decay <= 0:
        raise DomainError("envelope growth rate is not below Re s")
    target = cfg.abs_tol / 10.0
    t_end = max(1.0, math.log(max(bound, 1e-300) / (decay * target)) / decay)

    if cfg.endpoint_substitution == "sqrt":
        upper = math.sqrt(t_end)

        def integrand(u, part):
            t = u * u
            val = np.exp(-s * t) * f(t) * 2.0 * u if u > 0 else 0.0
            return val.real if part == 0 else val.imag
    else:
        upper = t_end

        def integrand(t, part):
            val = np.exp(-s * t) * f(t)
            return val.real if part == 0 else val.imag

    # Split the interval so oscillation from Im s is resolved.
    n_pieces = max(1, int(math.ceil(abs(s.imag) * t_end / (8 * math.pi))))
    n_pieces = min(n_pieces, cfg.max_subdivisions // 10 or 1)
    edges = np.linspace(0.0, upper, n_pieces + 1)
    total = [0.0, 0.0]
    err_total = 0.0
    for part in (0, 1):
        if part == 1 and s.imag == 0:
            continue
        for lo, hi in zip(edges[:-1], edges[1:]):
            with warnings.catch_warnings():
                warnings.simplefilter("error", integrate.IntegrationWarning)
                try:
                    val, err = integrate.quad(integrand, lo, hi, args=(part,),
                                              epsabs=cfg.abs_tol / n_pieces,
                                              epsrel=cfg.rel_tol,
                                              limit=cfg.max_subdivisions)
                except integrate.IntegrationWarning as exc:
                    raise ConvergenceError(f"forward quadrature failed at s={s}: {exc}") from exc
            total[part] += val
            err_total += err
    return complex(total[0], total[1])


# ---------------------------------------------------------------------------
# inversion
# ---------------------------------------------------------------------------

def _talbot_nodes(t, m):
    r = 2.0 * m / (5.0 * t)
    theta = np.arange(1, m) * math.pi / m
    cot = 1.0 / np.tan(theta)
    nodes = r * theta * (cot + 1j)
    sigma = theta + (theta * cot - 1.0) * cot
    weights = np.exp(nodes * t) * (1.0 + 1j * sigma)
    return r, nodes, weights


def talbot(F, t, m, shift=0.0):
    """Fixed Talbot inversion with ``m`` nodes; returns ``(value, magnitude)``.

    ``magnitude`` is the sum of absolute node contributions, a roundoff scale.
    The contour is applied to ``F(s + shift)`` and compensated by
    ``exp(shift t)``.
    """
    r, nodes, weights = _talbot_nodes(t, m)
    keep = (nodes.real * t) > _UNDERFLOW_EXP
    vals = np.asarray(F(np.concatenate(([r + shift], nodes[keep] + shift))), dtype=complex)
    first = 0.5 * math.exp(r * t) * vals[0]
    terms = (weights[keep] * vals[1:]).real
    scale = r / m * math.exp(shift * t)
    value = scale * (first.real + terms.sum())
    magnitude = scale * (abs(first) + np.abs(terms).sum())
    return float(value), float(magnitude)


def _euler_sum(F, t, n, m, a_param, shift):
    k = np.arange(0, n + m + 1)
    nodes = (a_param + 2j * math.pi * k) / (2.0 * t)
    vals = np.asarray(F(nodes + shift), dtype=complex)
    terms = np.where(k % 2 == 0, 1.0, -1.0) * vals.real
    terms[0] *= 0.5
    partial = np.cumsum(terms)
    binom = comb(m, np.arange(m + 1)) / 2.0 ** m
    pre = math.exp(a_param / 2.0) / t * math.exp(shift * t)
    return pre * float(np.dot(binom, partial[n:n + m + 1])), pre * float(np.abs(terms).sum())


def euler(F, t, n, m=None, a_params=(10.0, 12.0, 14.0), shift=0.0):
    """Euler-summation inversion; returns ``(value, magnitude)``.

    The Bromwich integral is discretized on ``s_k = (A + 2 pi i k) / (2t)``
    and partial sums ``n .. n+m`` are averaged with binomial weights.  The
    discretization error is ``sum_k exp(-k A) f((2k+1) t)``, a power series
    in ``exp(-A)``; polynomial extrapolation to ``exp(-A) = 0`` over several
    values of ``A`` removes its leading terms.  This allows small ``A`` and
    hence little roundoff growth (about ``exp(A/2)``).  Pass a single-element
    ``a_params`` to skip the extrapolation.
    """
    if m is None:
        m = max(11, int(round(0.75 * n)))
    runs = [_euler_sum(F, t, n, m, a, shift) for a in a_params]
    xs = [math.exp(-a) for a in a_params]
    value = 0.0
    for j, (fj, _) in enumerate(runs):
        weight = 1.0
        for i, xi in enumerate(xs):
            if i != j:
                weight *= xi / (xi - xs[j])
        value += weight * fj
    return value, max(mag for _, mag in runs)


def _memoized(F):
    """Wrap a vectorized image so repeated nodes are evaluated once.

    Euler runs with different node counts share their leading nodes exactly,
    so the consistency check in :func:`invert` costs little extra.
    """
    memo = {}

    def wrapped(s):
        s = np.atleast_1d(np.asarray(s, dtype=complex))
        missing = [x for x in dict.fromkeys(s.tolist()) if x not in memo]
        if missing:
            vals = np.atleast_1d(np.asarray(F(np.array(missing)), dtype=complex))
            memo.update(zip(missing, vals.tolist()))
        return np.array([memo[x] for x in s.tolist()])

    return wrapped


def _run(F, t, method, count, shift):
    if method == "talbot":
        return talbot(F, t, count, shift)
    return euler(F, t, count, shift=shift)


def invert(F, t, cfg: InversionConfig = InversionConfig(), shift=0.0, check=True):
    """Inverse Laplace transform of ``F`` at time ``t``.

    The result from ``cfg.node_count`` nodes is compared with a second run at
    three quarters of that count.

    Raises
    ------
    DomainError
        If ``t <= 0``.
    ConvergenceError
        If the two runs differ by more than ``10 * working_tolerance``
        relative to the result (with a floor at the roundoff scale).
    """
    if not (t > 0) or not math.isfinite(t):
        raise DomainError(f"t must be positive, got {t}")
    if check and cfg.method == "euler":
        F = _memoized(F)
    value, mag = _run(F, t, cfg.method, int(cfg.node_count), shift)
    if not math.isfinite(value):
        raise ConvergenceError(f"inversion produced a non-finite value at t={t}")
    if check:
        alt_count = max(8, int(round(0.75 * cfg.node_count)))
        alt, mag2 = _run(F, t, cfg.method, alt_count, shift)
        floor = 1e-13 * max(mag, mag2)
        if abs(value - alt) > 10.0 * cfg.working_tolerance * max(abs(value), floor):
            raise ConvergenceError(
                f"{cfg.method} inversion at t={t}: node counts {cfg.node_count} and "
                f"{alt_count} disagree ({value!r} vs {alt!r})")
    return value


def relative_residual(value, reference, floor=1e-300):
    """``|value - reference| / max(|reference|, floor)``."""
    return abs(value - reference) / max(abs(reference), floor)


def round_trip(pair_id, image, original, t_grid, s_grid, cfgs=None, *,
               quad_cfg: QuadratureConfig = QuadratureConfig(), envelope=None,
               forward_tol=1e-6, inverse_tol=1e-4, shift=0.0, provenance=""):
    """Forward and inverse residuals of one transform pair on the given grids.

    ``image`` maps an array of s to F(s); ``original`` maps t to f(t).
    Per-point failures are recorded in the report rather than raised.
    """
    start = time.perf_counter()
    cfgs = cfgs if cfgs is not None else [InversionConfig()]
    points = []
    for s in s_grid:
        coords = {"s": repr(complex(s))}
        try:
            ref = complex(np.asarray(image(np.array([complex(s)])))[0])
            val = forward_transform(original, s, quad_cfg, envelope)
            res = relative_residual(val, ref)
            points.append(CheckPoint("forward", coords, abs(val), abs(ref), res, forward_tol))
        except Exception as exc:  # aggregate, never abort the sweep
            points.append(CheckPoint("forward", coords, math.nan, math.nan, math.inf,
                                     forward_tol, error=repr(exc)))
    for t in t_grid:
        for cfg in cfgs:
            coords = {"t": t, "method": cfg.method, "nodes": cfg.node_count}
            try:
                ref = float(original(t))
                val = invert(image, t, cfg, shift=shift)
                res = relative_residual(val, ref)
                points.append(CheckPoint("inverse", coords, val, ref, res, inverse_tol))
            except Exception as exc:
                points.append(CheckPoint("inverse", coords, math.nan, math.nan, math.inf,
                                         inverse_tol, error=repr(exc)))
    return VerificationReport(pair_id, provenance, points, time.perf_counter() - start)
