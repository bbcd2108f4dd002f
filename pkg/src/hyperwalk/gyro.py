"""Mobius gyrogroup operations on the open unit ball.

Everything here is composed out of the single addition formula

    x (+) y = ((1 + 2<x,y> + ||y||^2) x + (1 - ||x||^2) y)
              / (1 + 2<x,y> + ||x||^2 ||y||^2),

so gyration, translation and the geodesic-walk step are definitional
compositions and the algebraic identities stay honest test targets.
The *_raw functions act on plain float arrays with shape (..., n) and do not
validate; the typed wrappers guard the near-boundary region.
"""

import math

import numpy as np

from .geometry import BOUNDARY_TOL, BallPoint


class BoundaryError(ArithmeticError):
    """A composed result reached the guard band ||.|| >= 1 - 1e-12."""


def mobius_add_raw(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xy = np.sum(x * y, axis=-1, keepdims=True)
    nx2 = np.sum(x * x, axis=-1, keepdims=True)
    ny2 = np.sum(y * y, axis=-1, keepdims=True)
    num = (1.0 + 2.0 * xy + ny2) * x + (1.0 - nx2) * y
    den = 1.0 + 2.0 * xy + nx2 * ny2
    return num / den


def mobius_scalar_raw(gamma, z):
    """gamma (x) z = tanh(gamma * atanh(||z||)) z/||z||, with 0 fixed."""
    z = np.asarray(z, dtype=float)
    r = np.linalg.norm(z, axis=-1, keepdims=True)
    safe = np.where(r > 0.0, r, 1.0)
    scale = np.where(r > 0.0, np.tanh(np.asarray(gamma) * np.arctanh(np.minimum(r, 1.0))) / safe, 0.0)
    return scale * z


def _wrap(arr) -> BallPoint:
    if float(np.linalg.norm(arr)) >= 1.0 - BOUNDARY_TOL:
        raise BoundaryError("result reached ||.|| >= 1 - 1e-12; inputs violate the compact-support regime")
    return BallPoint(arr)


def mobius_add(x: BallPoint, y: BallPoint) -> BallPoint:
    return _wrap(mobius_add_raw(x.coords, y.coords))


def mobius_neg(x: BallPoint) -> BallPoint:
    return BallPoint(-x.coords)


def mobius_scalar(gamma: float, z: BallPoint) -> BallPoint:
    return _wrap(mobius_scalar_raw(gamma, z.coords))


def gyration(a: BallPoint, b: BallPoint, c: BallPoint) -> BallPoint:
    """gyr[a,b]c = -(a+b) (+) (a (+) (b (+) c)), the rotation defect of (+)."""
    ab = mobius_add_raw(a.coords, b.coords)
    abc = mobius_add_raw(a.coords, mobius_add_raw(b.coords, c.coords))
    return _wrap(mobius_add_raw(-ab, abc))


def translate(a: BallPoint, x: BallPoint) -> BallPoint:
    """Hyperbolic translation T_a(x) = (-a) (+) x; T_{-a} is its inverse."""
    return _wrap(mobius_add_raw(-a.coords, x.coords))


def translate_conformal_factor(a: BallPoint, x: BallPoint) -> float:
    """Spectral norm of the Jacobian of T_a at x; its n-th power is the determinant."""
    xa = float(np.dot(x.coords, a.coords))
    return (1.0 - a.norm**2) / (1.0 - 2.0 * xa + (x.norm * a.norm) ** 2)


def geodesic_point(a: BallPoint, b: BallPoint, t: float) -> BallPoint:
    """x(t) = a (+) (t (x) b), the geodesic with x(0) = a and x(1) = a (+) b."""
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"geodesic parameter must lie in [0, 1], got {t!r}")
    return _wrap(mobius_add_raw(a.coords, mobius_scalar_raw(t, b.coords)))


def sturm_step(s_prev: BallPoint, z: BallPoint, k: int) -> BallPoint:
    """One update of the Sturm geodesic walk: s (+) (1/k)(x)((-s) (+) z)."""
    if k < 1:
        raise ValueError(f"step index must be >= 1, got {k!r}")
    inner = mobius_add_raw(-s_prev.coords, z.coords)
    return _wrap(mobius_add_raw(s_prev.coords, mobius_scalar_raw(1.0 / k, inner)))


def distance(x: BallPoint, y: BallPoint) -> float:
    """Hyperbolic distance d(x, y) = 2*atanh(||(-x) (+) y||)."""
    return 2.0 * math.atanh(float(np.linalg.norm(mobius_add_raw(-x.coords, y.coords))))
