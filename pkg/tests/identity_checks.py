"""Vectorized residuals of the parabolic cylinder function identities.

Shared by the unit tests and the acceptance suite.  Each ``*_residual``
function returns the per-draw relative residual as an array.
"""

import math

import numpy as np

from pcflaplace import specfun

SQRT_2PI = math.sqrt(2.0 * math.pi)
D = specfun.pcf_d


def draw_points(n=200, seed=20261016):
    """Random orders and arguments: Re v in [-20, 2], |Im v| <= 20, |z| <= 6.

    Orders within 1e-6 of a non-negative integer are redrawn because
    ``1/Gamma(-v)`` vanishes there and relative residuals lose meaning.
    """
    rng = np.random.default_rng(seed)
    vs, zs = [], []
    while len(vs) < n:
        v = complex(rng.uniform(-20.0, 2.0), rng.uniform(-20.0, 20.0))
        z = rng.uniform(-6.0, 6.0)
        near_int = abs(v.imag) < 1e-6 and v.real > -1e-6 and abs(v.real - round(v.real)) < 1e-6
        if near_int:
            continue
        vs.append(v)
        zs.append(z)
    return np.array(vs), np.array(zs)


def recurrence_residual(v, z):
    lhs = D(v + 1, z) - z * D(v, z) + v * D(v - 1, z)
    return np.abs(lhs) / np.maximum(1.0, np.abs(D(v + 1, z)))


def _d_prime_negated(v, z):
    """d/dz [D_v(-z)] = (z/2) D_v(-z) + D_{v+1}(-z)."""
    return 0.5 * z * D(v, -z) + D(v + 1, -z)


def wronskian_residual(v, z):
    w = D(v, z) * _d_prime_negated(v, z) - D(v, -z) * specfun.pcf_d_prime(v, z)
    ref = SQRT_2PI * specfun.rgamma(-v)
    return np.abs(w - ref) / np.abs(ref)


def product_identity_residual(v, z):
    lhs = D(v, z) * D(v - 1, -z) + D(v, -z) * D(v - 1, z)
    ref = SQRT_2PI * specfun.rgamma(-v) / (-v)
    return np.abs(lhs - ref) / np.abs(ref)


def _five_point(f, z, h):
    return (f(z - 2 * h) - 8 * f(z - h) + 8 * f(z + h) - f(z + 2 * h)) / (12 * h)


def derivative_residual(v, z, h=1e-3):
    """Both derivative relations against a fourth-order central difference.

    Normalized by the larger of the derivative and the two terms forming it,
    so a derivative that vanishes by cancellation does not inflate the ratio.
    """
    out = []
    for sign in (1.0, -1.0):
        fd = _five_point(lambda u: D(v, sign * u), z, h)
        if sign > 0:
            closed = specfun.pcf_d_prime(v, z)
            scale = np.maximum(np.abs(0.5 * z * D(v, z)), np.abs(D(v + 1, z)))
        else:
            closed = _d_prime_negated(v, z)
            scale = np.maximum(np.abs(0.5 * z * D(v, -z)), np.abs(D(v + 1, -z)))
        scale = np.maximum(scale, np.abs(closed))
        out.append(np.abs(closed - fd) / scale)
    return np.maximum(*out)


def antiderivative_residual(v, z, seed=7, nodes=96):
    """Gauss-Legendre quadrature of exp(-u^2/4) D_v(+-u) against the closed forms.

    Intervals ``[z1, z2]`` are drawn inside ``|u| <= 6``, one per order.  The
    integrand is entire, so the fixed rule converges geometrically; the scale is
    the larger of the closed-form difference and the integrand mass.
    """
    rng = np.random.default_rng(seed)
    ends = np.sort(rng.uniform(-6.0, 6.0, size=(v.size, 2)), axis=1)
    z1, z2 = ends[:, 0], ends[:, 1]
    x, w = np.polynomial.legendre.leggauss(nodes)
    half = 0.5 * (z2 - z1)
    u = 0.5 * (z1 + z2)[:, None] + half[:, None] * x[None, :]
    vv = np.broadcast_to(v[:, None], u.shape)
    out = []
    for sign in (1.0, -1.0):
        g = np.exp(-u * u / 4) * D(vv, sign * u)
        quad = half * (g @ w)
        mass = half * (np.abs(g) @ w)

        def prim(p):
            return -sign * np.exp(-p * p / 4) * D(v - 1, sign * p)

        closed = prim(z2) - prim(z1)
        out.append(np.abs(quad - closed) / np.maximum(np.abs(closed), mass))
    return np.maximum(*out)
