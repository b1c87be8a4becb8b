"""Catalog of Laplace transform pairs whose images contain parabolic cylinder functions.

Every image is a sum of terms

    poly(s) * 2**(k P) * prod_j Gamma(a_j P + b_j)**n_j * prod_i D_{o_i - P}(z_i),

with ``P = (s + c)/beta``, minus an optional impulse constant that is present
only on the boundary ``x + y = 0``.  Originals are closed forms in ``t``.

Ten entries form the main table (ids ``"1"`` .. ``"10"``); four more
(``"S1"`` .. ``"S4"``) specialize the arguments: equal arguments, opposite
arguments, one argument zero, and both arguments zero.
"""

from __future__ import annotations

import itertools
import json
import math
import time
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from . import laplace, specfun
from .errors import DomainError
from .report import CheckPoint, VerificationReport, SCHEMA_VERSION

__all__ = [
    "PairParameters",
    "PcfFactor",
    "GammaFactor",
    "Term",
    "ImageExpression",
    "TransformPair",
    "VerificationReport",
    "Grid",
    "catalog",
    "get_pair",
    "pair_ids",
    "eval_image",
    "eval_original",
    "verify_pair",
    "default_grid",
    "catalog_json",
    "SQRT_PI_2",
]

SQRT_PI_2 = math.sqrt(math.pi / 2.0)
BOUNDARY_TOL = 1e-14


@dataclass(frozen=True)
class PairParameters:
    """Rate ``beta > 0``, shift ``c >= 0`` and arguments with ``x + y >= 0``."""

    beta: float = 1.0
    c: float = 0.0
    x: float = 0.0
    y: float = 0.0

    def __post_init__(self):
        for name in ("beta", "c", "x", "y"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if self.beta <= 0:
            raise DomainError(f"beta must be positive, got {self.beta}")
        if self.c < 0:
            raise DomainError(f"c must be non-negative, got {self.c}")
        if self.x + self.y < -BOUNDARY_TOL:
            raise DomainError(f"x + y must be non-negative, got x={self.x}, y={self.y}")

    @property
    def on_boundary(self) -> bool:
        """True when ``x + y = 0``, where the impulse constants are active."""
        return abs(self.x + self.y) <= BOUNDARY_TOL

    def as_dict(self) -> dict:
        return {"beta": self.beta, "c": self.c, "x": self.x, "y": self.y}


# ---------------------------------------------------------------------------
# image expressions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PcfFactor:
    """``D_{order_offset + slope (s+c)/beta}(argument)``.

    Every catalog factor has ``slope = -1``; the recurrence rewrites require it.
    """

    order_offset: float
    argument: float
    slope: float = -1.0


@dataclass(frozen=True)
class GammaFactor:
    """``Gamma(scale (s+c)/beta + offset) ** power``."""

    scale: float = 1.0
    offset: float = 0.0
    power: int = 1


@dataclass(frozen=True)
class Term:
    """``poly(s) * 2**(pow2 P) * prod gammas * prod pcf`` with ``P = (s+c)/beta``.

    ``poly`` lists coefficients in ascending powers of ``s``.
    """

    poly: tuple
    pcf: tuple
    gammas: tuple = (GammaFactor(),)
    pow2: float = 0.0

    def key(self):
        """Structural key: gamma factors, power of two and the multiset of PCF factors."""
        return (tuple(sorted((g.scale, g.offset, g.power) for g in self.gammas)),
                self.pow2,
                tuple(sorted((f.order_offset, f.argument, f.slope) for f in self.pcf)))


@dataclass(frozen=True)
class ImageExpression:
    """Sum of terms at fixed ``beta`` and ``c`` minus an impulse constant.

    The impulse constant is subtracted only when ``impulse_active`` holds
    (the ``x + y = 0`` boundary, or unconditionally for the opposite-argument
    specialization).
    """

    beta: float
    c: float
    terms: tuple
    impulse_constant: float = 0.0
    impulse_active: bool = False

    def to_dict(self) -> dict:
        return {
            "beta": self.beta,
            "c": self.c,
            "impulse_constant": self.impulse_constant,
            "impulse_active": self.impulse_active,
            "terms": [
                {
                    "poly_coeffs": list(t.poly),
                    "pow2": t.pow2,
                    "gamma_factors": [{"scale": g.scale, "offset": g.offset, "power": g.power}
                                      for g in t.gammas],
                    "pcf_factors": [{"order_offset": f.order_offset, "argument": f.argument,
                                     "slope": f.slope} for f in t.pcf],
                }
                for t in self.terms
            ],
        }

    def scaled(self, k: float) -> "ImageExpression":
        terms = tuple(replace(t, poly=tuple(k * a for a in t.poly)) for t in self.terms)
        return replace(self, terms=terms, impulse_constant=k * self.impulse_constant)

    def normalized(self) -> "ImageExpression":
        """Merge terms with equal structural key by adding their polynomials."""
        groups = {}
        order = []
        for t in self.terms:
            k = t.key()
            if k not in groups:
                groups[k] = t
                order.append(k)
            else:
                groups[k] = replace(groups[k], poly=_poly_add(groups[k].poly, t.poly))
        terms = []
        for k in sorted(order, key=repr):
            t = groups[k]
            poly = _poly_trim(t.poly)
            if any(abs(a) > 0 for a in poly):
                terms.append(replace(t, poly=poly,
                                     pcf=tuple(sorted(t.pcf, key=lambda f: (f.order_offset, f.argument, f.slope))),
                                     gammas=tuple(sorted(t.gammas, key=lambda g: (g.scale, g.offset, g.power)))))
        return replace(self, terms=tuple(terms))


def _poly_add(p, q):
    n = max(len(p), len(q))
    return tuple((p[i] if i < len(p) else 0.0) + (q[i] if i < len(q) else 0.0) for i in range(n))


def _poly_mul(p, q):
    out = [0.0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return tuple(out)


def _poly_trim(p):
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return tuple(p)


def _poly_eval_log(poly, s):
    val = np.zeros_like(s)
    for a in reversed(poly):
        val = val * s + a
    with np.errstate(divide="ignore"):
        return np.log(val.astype(complex)), val == 0


class EvalCache:
    """Memo of gamma and D evaluations for one sweep, keyed by the node array.

    Owned by the caller; nothing is shared between sweeps.
    """

    def __init__(self):
        self._store = {}

    def get(self, key, compute):
        if key not in self._store:
            self._store[key] = compute()
        return self._store[key]


def eval_expression(expr: ImageExpression, s, cache: EvalCache | None = None):
    """Evaluate an image expression at an array of Laplace parameters."""
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    cache = cache if cache is not None else EvalCache()
    skey = s.tobytes()
    p = (s + expr.c) / expr.beta
    total = np.zeros(s.shape, dtype=complex)
    for term in expr.terms:
        logv, zero = _poly_eval_log(term.poly, s)
        logv = logv + term.pow2 * p * math.log(2.0)
        for g in term.gammas:
            lg = cache.get(("g", skey, expr.beta, expr.c, g.scale, g.offset),
                           lambda g=g: specfun.log_gamma(g.scale * p + g.offset))
            logv = logv + g.power * np.asarray(lg)
        for f in term.pcf:
            mant, ls = cache.get(("d", skey, expr.beta, expr.c, f.order_offset, f.argument, f.slope),
                                 lambda f=f: specfun.pcf_d_scaled(f.order_offset + f.slope * p,
                                                                  np.full(p.shape, f.argument)))
            mant = np.asarray(mant)
            zero = zero | (mant == 0)
            with np.errstate(divide="ignore"):
                logv = logv + np.log(np.where(mant == 0, 1.0, mant)) + ls
        with np.errstate(over="ignore", invalid="ignore"):
            total = total + np.where(zero, 0.0, np.exp(logv))
    if expr.impulse_active:
        total = total - expr.impulse_constant
    return total


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TransformPair:
    """An image builder coupled with its closed-form original.

    ``image(params)`` returns the :class:`ImageExpression` at those
    parameters; ``original(t, params)`` evaluates ``f(t)`` (``t`` may be an
    array).  ``validity(params)`` narrows :class:`PairParameters` for the
    specializations.  ``cancellation`` flags originals that subtract an erfc
    term from a Gaussian term.
    """

    id: str
    name: str
    provenance: str
    image: Callable
    original: Callable
    validity: Callable = lambda p: True
    validity_text: str = "Re s > 0, beta > 0, c >= 0, x + y >= 0"
    cancellation: bool = False
    f0_limit: Callable | None = None  # right limit f(0+) in closed form; inf if divergent

    def check(self, params: PairParameters):
        if not self.validity(params):
            raise DomainError(f"parameters {params} outside validity of pair {self.id}: {self.validity_text}")


def _kernel(t, p: PairParameters):
    """Shared pieces: e = exp(-beta t), q = 1 - e^2, E, G, erfc argument."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise DomainError("t must be positive")
    e = np.exp(-p.beta * t)
    q = -np.expm1(-2.0 * p.beta * t)
    big_e = math.exp((p.y * p.y - p.x * p.x) / 4.0)
    u = p.y + p.x * e
    gauss = np.exp(-u * u / (2.0 * q))
    erfc_term = specfun.erfc(u / np.sqrt(2.0 * q))
    return t, e, q, big_e, u, gauss, erfc_term


def _ret(v):
    return float(v) if np.ndim(v) == 0 else v


def _orig_1(t, p):
    t, e, q, E, u, g, ec = _kernel(t, p)
    b, c = p.beta, p.c
    return _ret(E * (b * np.exp(-(b + c) * t) / np.sqrt(q) * g
                     + p.x * b * SQRT_PI_2 * np.exp(-c * t) * ec))


def _orig_2(t, p):
    t, e, q, E, u, g, ec = _kernel(t, p)
    return _ret(p.beta * np.exp(-p.c * t) / q ** 1.5 * u * E * g)


def _orig_3(t, p):
    t, e, q, E, u, g, ec = _kernel(t, p)
    return _ret(p.beta * np.exp(-p.c * t) / np.sqrt(q) * E * g)


def _orig_4(t, p):
    t, e, q, E, u, g, ec = _kernel(t, p)
    return _ret(p.beta * SQRT_PI_2 * np.exp(-p.c * t) * E * ec)


def _orig_5(t, p):
    t, e, q, E, u, g, ec = _kernel(t, p)
    b, c = p.beta, p.c
    return _ret(E * (b * b * np.exp(-(b + c) * t) / q ** 1.5 * (p.x + p.y * e) * g
                     - c * b * SQRT_PI_2 * np.exp(-c * t) * ec))


def _orig_6(t, p):
    t, e, q, E, u, g, ec = _kernel(t, p)
    b, c = p.beta, p.c
    return _ret(E * (b * np.sqrt(q) * np.exp(-c * t) * g
                     - u * b * SQRT_PI_2 * np.exp(-c * t) * ec))


def _orig_7(t, p):
    t, e, q, E, u, g, ec = _kernel(t, p)
    b, c = p.beta, p.c
    return _ret(E * (b * np.exp(-(2 * b + c) * t) / np.sqrt(q) * g
                     + p.x * b * SQRT_PI_2 * np.exp(-(b + c) * t) * ec))


def _orig_8(t, p):
    t, e, q, E, u, g, ec = _kernel(t, p)
    b, c = p.beta, p.c
    return _ret(E * (b * np.exp(-c * t) / np.sqrt(q) * g
                     - p.y * b * SQRT_PI_2 * np.exp(-c * t) * ec))


def _orig_9(t, p):
    t, e, q, E, u, g, ec = _kernel(t, p)
    b, c = p.beta, p.c
    return _ret(E * (-p.y * b * np.sqrt(q) * np.exp(-c * t) * g
                     + (p.y * u + 1.0) * b * SQRT_PI_2 * np.exp(-c * t) * ec))


def _orig_10(t, p):
    t, e, q, E, u, g, ec = _kernel(t, p)
    b, c = p.beta, p.c
    return _ret(b * np.exp(-(b + c) * t) / np.sqrt(q) * E * g)


def _orig_s1(t, p):
    t, e, q, E, u, g, ec = _kernel(t, p)
    x = p.x
    return _ret(p.beta * np.exp(-p.c * t) / np.sqrt(q) * np.exp(-x * x * (1 + e) ** 2 / (2 * q)))


def _orig_s2(t, p):
    t, e, q, E, u, g, ec = _kernel(t, p)
    x = p.x
    return _ret(-p.beta * x * (1 - e) * np.exp(-p.c * t) / q ** 1.5
                * np.exp(-x * x * (1 - e) ** 2 / (2 * q)))


def _orig_s3(t, p):
    t, e, q, E, u, g, ec = _kernel(t, p)
    x = p.x
    return _ret(2 * p.beta * np.exp(-p.c * t) / np.sqrt(q) * np.exp(-x * x * (1 + e * e) / (4 * q)))


def _orig_s4(t, p):
    t, e, q, E, u, g, ec = _kernel(t, p)
    return _ret(2 * p.beta * np.exp(-(2 * p.beta + p.c) * t) / np.sqrt(math.pi * q))


def _p_poly(p: PairParameters, k: float = 0.0):
    """Coefficients of ``(s + c)/beta + k`` in ascending powers of ``s``."""
    return (p.c / p.beta + k, 1.0 / p.beta)


def _expr(p, terms, impulse=0.0, active=None):
    active = p.on_boundary if active is None else active
    return ImageExpression(p.beta, p.c, tuple(terms), impulse, bool(active and impulse != 0.0))


def _img_1(p):
    return _expr(p, [Term((1.0,), (PcfFactor(1.0, p.x), PcfFactor(-1.0, p.y)))])


def _img_2(p):
    return _expr(p, [Term((1.0,), (PcfFactor(0.0, p.x), PcfFactor(1.0, p.y)))], SQRT_PI_2)


def _img_3(p):
    return _expr(p, [Term((1.0,), (PcfFactor(0.0, p.x), PcfFactor(0.0, p.y)))])


def _img_4(p):
    return _expr(p, [Term((1.0,), (PcfFactor(0.0, p.x), PcfFactor(-1.0, p.y)))])


def _img_5(p):
    return _expr(p, [Term((0.0, 1.0), (PcfFactor(0.0, p.x), PcfFactor(-1.0, p.y)))],
                 p.beta * SQRT_PI_2)


def _img_6(p):
    return _expr(p, [Term((1.0,), (PcfFactor(0.0, p.x), PcfFactor(-2.0, p.y)))])


def _img_7(p):
    return _expr(p, [Term(_p_poly(p), (PcfFactor(0.0, p.x), PcfFactor(-2.0, p.y)))])


def _img_8(p):
    return _expr(p, [Term(_p_poly(p, 1.0), (PcfFactor(0.0, p.x), PcfFactor(-2.0, p.y)))])


def _img_9(p):
    return _expr(p, [Term(_p_poly(p, 2.0), (PcfFactor(0.0, p.x), PcfFactor(-3.0, p.y)))])


def _img_10(p):
    return _expr(p, [Term(_p_poly(p), (PcfFactor(-1.0, p.x), PcfFactor(-1.0, p.y)))])


def _img_s1(p):
    return _expr(p, [Term((1.0,), (PcfFactor(0.0, p.x), PcfFactor(0.0, p.x)))])


def _img_s2(p):
    return _expr(p, [Term((1.0,), (PcfFactor(0.0, p.x), PcfFactor(1.0, -p.x)))],
                 SQRT_PI_2, active=True)


def _img_s3(p):
    return _expr(p, [Term((1.0,), (PcfFactor(0.0, p.x),), (GammaFactor(0.5, 0.0, 1),), pow2=0.5)])


def _img_s4(p):
    # (s+c) Gamma(P/2) / ((s+c+beta) Gamma((P+1)/2)) == Gamma(P/2 + 1) / Gamma(P/2 + 3/2)
    return _expr(p, [Term((1.0,), (), (GammaFactor(0.5, 1.0, 1), GammaFactor(0.5, 1.5, -1)))])


def _f0_vanishing_off_boundary(p: PairParameters) -> float:
    """Originals with a Gaussian term over a power of q: zero inside, divergent on x + y = 0."""
    return math.inf if p.on_boundary else 0.0


def _f0_erfc_on_boundary(p: PairParameters) -> float:
    """Originals whose erfc term tends to beta sqrt(pi/2) on x + y = 0 and all else to zero."""
    return p.beta * SQRT_PI_2 if p.on_boundary else 0.0


def _f0_zero(p: PairParameters) -> float:
    return 0.0


_CATALOG = None


def _build_catalog():
    rows = [
        TransformPair("1", "raised first order", "row 10 plus x times row 4",
                      _img_1, _orig_1, f0_limit=_f0_vanishing_off_boundary),
        TransformPair("2", "raised second order", "recurrence raising on row 3's second factor with row 5",
                      _img_2, _orig_2, f0_limit=_f0_vanishing_off_boundary),
        TransformPair("3", "base: density kernel", "inverse of the Laplace-domain transition density",
                      _img_3, _orig_3, f0_limit=_f0_vanishing_off_boundary),
        TransformPair("4", "base: distribution kernel", "inverse of the Laplace-domain transition distribution",
                      _img_4, _orig_4, f0_limit=_f0_erfc_on_boundary),
        TransformPair("5", "s times row 4", "differentiation rule applied to row 4",
                      _img_5, _orig_5, cancellation=True, f0_limit=_f0_vanishing_off_boundary),
        TransformPair("6", "second order lowered by two", "row 8 minus row 7",
                      _img_6, _orig_6, cancellation=True, f0_limit=_f0_zero),
        TransformPair("7", "shifted row 1", "row 1 shifted by beta in s",
                      _img_7, _orig_7, f0_limit=_f0_vanishing_off_boundary),
        TransformPair("8", "lowered second order", "recurrence lowering on row 4's second factor",
                      _img_8, _orig_8, cancellation=True, f0_limit=_f0_vanishing_off_boundary),
        TransformPair("9", "second order lowered by three", "row 4 minus y times row 6, by the order recurrence",
                      _img_9, _orig_9, cancellation=True,
                      f0_limit=_f0_erfc_on_boundary),
        TransformPair("10", "both orders lowered", "row 3 shifted by beta in s",
                      _img_10, _orig_10, f0_limit=_f0_vanishing_off_boundary),
        TransformPair("S1", "squared", "row 3 with y = x", _img_s1, _orig_s1,
                      validity=lambda p: abs(p.y - p.x) <= BOUNDARY_TOL and p.x >= 0,
                      validity_text="y = x, x >= 0"),
        TransformPair("S2", "opposite arguments", "row 2 with y = -x", _img_s2, _orig_s2,
                      validity=lambda p: abs(p.x + p.y) <= BOUNDARY_TOL,
                      validity_text="y = -x, any real x"),
        TransformPair("S3", "single function", "row 3 with y = 0 and the duplication formula",
                      _img_s3, _orig_s3,
                      validity=lambda p: p.y == 0 and p.x >= 0, validity_text="y = 0, x >= 0"),
        TransformPair("S4", "gamma ratio", "row 7 with x = y = 0 and the duplication formula",
                      _img_s4, _orig_s4,
                      validity=lambda p: p.x == 0 and p.y == 0, validity_text="x = y = 0"),
    ]
    return tuple(rows)


def catalog() -> list:
    """All fourteen transform pairs, main table first."""
    global _CATALOG
    if _CATALOG is None:
        _CATALOG = _build_catalog()
    return list(_CATALOG)


def pair_ids() -> list:
    return [p.id for p in catalog()]


def get_pair(pair_id) -> TransformPair:
    key = str(pair_id)
    for p in catalog():
        if p.id == key:
            return p
    raise KeyError(f"unknown pair {pair_id!r}")


def eval_image(pair: TransformPair, s, params: PairParameters, cache: EvalCache | None = None):
    """Image of ``pair`` at ``s`` (scalar or array).

    Raises
    ------
    DomainError
        If ``Re s <= 0``, the parameters are outside the pair's validity, or
        an order/argument leaves the supported region of ``pcf_d``.
    PoleError
        If a gamma argument is at a pole.
    """
    pair.check(params)
    arr = np.atleast_1d(np.asarray(s, dtype=complex))
    val = eval_expression(pair.image(params), arr, cache)
    return complex(val[0]) if np.ndim(s) == 0 else val


def eval_original(pair: TransformPair, t, params: PairParameters):
    """Closed-form original of ``pair`` at ``t > 0`` (scalar or array)."""
    pair.check(params)
    return pair.original(t, params)


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------

DEFAULT_BETAS = (0.5, 1.0, 2.0)
DEFAULT_CS = (0.0, 0.7)
DEFAULT_XY = ((0.3, 0.4), (1.2, -0.5), (0.0, 0.9), (0.8, 0.8), (0.6, -0.6))
DEFAULT_S = (0.5, 1.0, 2.0, 4.0)
EXTENDED_S = (0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0)
DEFAULT_T = (0.1, 0.5, 1.0, 2.0)


@dataclass(frozen=True)
class Grid:
    """Parameter sets, real s values for the forward check, and t values for inversion."""

    params: tuple
    s_values: tuple = DEFAULT_S
    t_values: tuple = DEFAULT_T


def _xy_for(pair_id, xy):
    xs = sorted({v for pt in xy for v in pt})
    if pair_id == "S1":
        return [(x, x) for x in xs if x >= 0][:5]
    if pair_id == "S2":
        return [(x, -x) for x in xs if x != 0][:5]
    if pair_id == "S3":
        return [(x, 0.0) for x in xs if x >= 0][:5]
    if pair_id == "S4":
        return [(0.0, 0.0)]
    return list(xy)


def default_grid(pair: TransformPair, betas=DEFAULT_BETAS, cs=DEFAULT_CS, xy=DEFAULT_XY,
                 s_values=None, t_values=DEFAULT_T) -> Grid:
    """Default verification grid for ``pair``.

    Specializations reuse the argument values of the main grid under their
    own constraint; the gamma-ratio entry has no argument freedom and uses a
    denser set of s values so it still sees at least sixty forward points.
    """
    pts = _xy_for(pair.id, xy)
    params = tuple(PairParameters(b, c, x, y) for b, c, (x, y) in itertools.product(betas, cs, pts))
    if s_values is None:
        s_values = EXTENDED_S if len(pts) == 1 else DEFAULT_S
    return Grid(params, tuple(s_values), tuple(t_values))


FORWARD_TOL = 1e-6
FORWARD_TOL_CANCEL = 1e-5
INVERSE_TOL = 1e-4
CROSS_TOL = 1e-6
SWEEP_TALBOT = laplace.InversionConfig("talbot", 24, 1e-7)
SWEEP_EULER = laplace.InversionConfig("euler", 32, 1e-7)
SWEEP_QUAD = laplace.QuadratureConfig(abs_tol=1e-14, rel_tol=1e-11, max_subdivisions=2000,
                                      endpoint_substitution="sqrt")


def _envelope(pair, params):
    ts = 2.0 ** np.arange(0, 8)
    vals = np.abs(np.asarray(pair.original(ts, params), dtype=float))
    return 2.0 * float(vals.max()) + 1e-300, 0.0


def verify_pair(pair: TransformPair, grid: Grid | None = None, *,
                talbot_cfg=SWEEP_TALBOT, euler_cfg=SWEEP_EULER, quad_cfg=SWEEP_QUAD,
                forward_tol=None, inverse_tol=INVERSE_TOL, cross_tol=CROSS_TOL,
                inverse=True, cache: EvalCache | None = None,
                original=None) -> VerificationReport:
    """Check ``pair`` in both directions on ``grid``.

    * forward: quadrature of the original at real ``s`` against the image;
    * inverse: Talbot inversion of the image against the original;
    * cross: Euler inversion against Talbot inversion.

    ``original`` overrides the pair's closed form (used for sensitivity
    checks).  Errors at a grid point are recorded, never raised.
    """
    start = time.perf_counter()
    grid = grid if grid is not None else default_grid(pair)
    cache = cache if cache is not None else EvalCache()
    fwd_tol = forward_tol if forward_tol is not None else (
        FORWARD_TOL_CANCEL if pair.cancellation else FORWARD_TOL)
    orig = original if original is not None else pair.original
    points = []
    for params in grid.params:
        pc = params.as_dict()
        f = lambda t, params=params: orig(t, params)
        image = lambda s, params=params: eval_image(pair, s, params, cache)
        env = None
        for s in grid.s_values:
            coords = dict(pc, s=s)
            try:
                env = env or _envelope(pair, params)
                ref = eval_image(pair, complex(s), params, cache)
                val = laplace.forward_transform(f, s, quad_cfg, env)
                points.append(CheckPoint("forward", coords, val.real, ref.real,
                                         laplace.relative_residual(val, ref), fwd_tol))
            except Exception as exc:
                points.append(CheckPoint("forward", coords, math.nan, math.nan, math.inf,
                                         fwd_tol, error=repr(exc)))
        if not inverse:
            continue
        shift = params.beta / 2.0 if params.c == 0 else 0.0
        for t in grid.t_values:
            coords = dict(pc, t=t)
            try:
                ref = float(f(t))
                vt = laplace.invert(image, t, talbot_cfg, shift=shift)
                points.append(CheckPoint("inverse", coords, vt, ref,
                                         laplace.relative_residual(vt, ref), inverse_tol))
            except Exception as exc:
                points.append(CheckPoint("inverse", coords, math.nan, math.nan, math.inf,
                                         inverse_tol, error=repr(exc)))
                continue
            try:
                ve = laplace.invert(image, t, euler_cfg, shift=shift)
                points.append(CheckPoint("cross", coords, ve, vt,
                                         laplace.relative_residual(ve, vt), cross_tol))
            except Exception as exc:
                points.append(CheckPoint("cross", coords, math.nan, math.nan, math.inf,
                                         cross_tol, error=repr(exc)))
    return VerificationReport(pair.id, pair.provenance, points, time.perf_counter() - start)


def catalog_json(reports: dict | None = None) -> str:
    """Catalog as JSON: id, provenance, validity, image structure at a sample point, grid results."""
    out = []
    for pair in catalog():
        grid = default_grid(pair)
        sample = grid.params[0]
        entry = {
            "id": pair.id,
            "name": pair.name,
            "provenance": pair.provenance,
            "validity": pair.validity_text,
            "cancellation_flag": pair.cancellation,
            "image": {"sample_parameters": sample.as_dict(),
                      "expression": pair.image(sample).to_dict()},
        }
        if reports and pair.id in reports:
            entry["grid_results"] = reports[pair.id].to_dict(include_timing=False)
        out.append(entry)
    return json.dumps({"schema_version": SCHEMA_VERSION, "pairs": out}, sort_keys=True, indent=2)
