"""Compactly supported radial densities on the ball.

A profile stores the density value g(eta) per unit Riemannian volume as a
function of the geodesic radial coordinate, normalized so that

    Omega_{n-1} * int_0^{eta_max} g(eta) sinh(eta)^{n-1} d eta = 1.

The induced radial measure, its CDF, inverse-CDF sampling, the eps-scaling
law and the moments all live here.  Support bounds are tracked in eta units;
the ball-norm bound is R = tanh(eta_max / 2).
"""

import math

import numpy as np
from scipy.interpolate import CubicSpline, PchipInterpolator

from .geometry import BallPoint, Dimension, as_dim, sphere_area
from .quadrature import cumulative_gl, integrate_adaptive

_CDF_TOL = 1e-12
_ROOT_TOL = 1e-12
_ROOT_MAX_STEPS = 200


def sinch(x):
    """sinh(x)/x, stable through 0."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-4
    xs = np.where(small, 1.0, x)
    out = np.where(small, 1.0 + x * x / 6.0 * (1.0 + x * x / 20.0), np.sinh(xs) / xs)
    return out


class RadialProfile:
    """A normalized radial density with compact support [0, eta_max]."""

    def __init__(self, shape, eta_max, dim, family="custom", params=None):
        if eta_max <= 0.0:
            raise ValueError(f"eta_max must be positive, got {eta_max!r}")
        self.dim = as_dim(dim)
        self.eta_max = float(eta_max)
        self.family = family
        self.params = dict(params or {})
        self._shape = shape
        area = sphere_area(self.dim)
        nm1 = self.dim.n - 1

        def raw_measure(etas):
            etas = np.asarray(etas, dtype=float)
            return area * shape(etas) * np.sinh(etas) ** nm1

        self.norm_const = integrate_adaptive(raw_measure, 0.0, self.eta_max,
                                             abs_tol=1e-14, rel_tol=1e-14, q=32)
        if not (self.norm_const > 0.0 and math.isfinite(self.norm_const)):
            raise ValueError("profile shape must have positive finite mass")
        self._cache = {}

    # -- density views ------------------------------------------------------

    def g(self, etas):
        """Density per unit Riemannian volume at geodesic radius eta."""
        etas = np.asarray(etas, dtype=float)
        vals = np.where(etas < self.eta_max, self._shape(np.minimum(etas, self.eta_max)), 0.0)
        return vals / self.norm_const

    def config(self) -> dict:
        cfg = {"family": self.family, "dim": self.dim.n, "eta_max": self.eta_max}
        cfg.update(self.params)
        return cfg

    # -- CDF tabulation ------------------------------------------------------

    def _cdf_interp(self):
        interp = self._cache.get("cdf")
        if interp is None:
            npts = 257
            area = sphere_area(self.dim)
            nm1 = self.dim.n - 1

            def measure(etas):
                return area * self.g(etas) * np.sinh(etas) ** nm1

            prev = None
            # uniform grid, doubled until the difference estimate clears 1e-12
            for _ in range(8):
                grid = np.linspace(0.0, self.eta_max, npts)
                vals = cumulative_gl(measure, grid, q=16)
                if prev is not None:
                    on_prev = vals[::2]
                    if float(np.max(np.abs(on_prev - prev))) < _CDF_TOL:
                        break
                prev = vals
                npts = 2 * npts - 1
            vals = np.minimum.accumulate(np.minimum(vals, vals[-1])[::-1])[::-1]
            vals = np.maximum.accumulate(vals)
            interp = PchipInterpolator(grid, vals, extrapolate=False)
            self._cache["cdf"] = interp
            self._cache["cdf_total"] = float(vals[-1])
        return interp

    def _cdf_eval(self, etas):
        interp = self._cdf_interp()
        etas = np.asarray(etas, dtype=float)
        out = np.empty(etas.shape)
        below = etas <= 0.0
        above = etas >= self.eta_max
        inside = ~(below | above)
        out[below] = 0.0
        out[above] = self._cache["cdf_total"]
        out[inside] = interp(etas[inside])
        return out

    def _moment(self, k: int) -> float:
        key = ("moment", k)
        val = self._cache.get(key)
        if val is None:
            area = sphere_area(self.dim)
            nm1 = self.dim.n - 1

            def integrand(etas):
                return etas**k * area * self.g(etas) * np.sinh(etas) ** nm1

            val = integrate_adaptive(integrand, 0.0, self.eta_max,
                                     abs_tol=1e-14, rel_tol=1e-13, q=32)
            self._cache[key] = val
        return val


def make_bump(eta_max, dim) -> RadialProfile:
    """Smooth bump exp(-1/(1-(eta/eta_max)^2)) on [0, eta_max), normalized."""
    if eta_max <= 0.0:
        raise ValueError(f"eta_max must be positive, got {eta_max!r}")
    eta_max = float(eta_max)

    def shape(etas):
        etas = np.asarray(etas, dtype=float)
        u = etas / eta_max
        inside = u < 1.0
        usafe = np.where(inside, u, 0.0)
        with np.errstate(over="ignore"):
            vals = np.where(inside, np.exp(-1.0 / (1.0 - usafe * usafe)), 0.0)
        return vals

    return RadialProfile(shape, eta_max, dim, family="bump")


def make_table(etas, values, dim, interpolation="pchip") -> RadialProfile:
    """Profile from tabulated (eta, value) pairs; zero beyond the last eta.

    Values are interpreted per unit Riemannian volume and renormalized.
    pchip is shape preserving; spline (not-a-knot cubic) is higher order for
    smooth data but may be clipped at zero near the support edge.
    """
    etas = np.asarray(etas, dtype=float)
    values = np.asarray(values, dtype=float)
    if etas.ndim != 1 or etas.size < 4 or etas.shape != values.shape:
        raise ValueError("table needs matching 1-d arrays with at least 4 entries")
    if etas[0] != 0.0 or np.any(np.diff(etas) <= 0.0):
        raise ValueError("etas must start at 0 and increase strictly")
    if np.any(values < 0.0) or not np.all(np.isfinite(values)):
        raise ValueError("table values must be finite and nonnegative")
    if interpolation == "pchip":
        interp = PchipInterpolator(etas, values, extrapolate=False)
    elif interpolation == "spline":
        interp = CubicSpline(etas, values, extrapolate=False)
    else:
        raise ValueError(f"unknown interpolation {interpolation!r}")
    eta_max = float(etas[-1])

    def shape(e):
        e = np.asarray(e, dtype=float)
        out = interp(np.clip(e, 0.0, eta_max))
        return np.maximum(np.nan_to_num(out, nan=0.0), 0.0)

    return RadialProfile(shape, eta_max, dim, family="table",
                         params={"points": int(etas.size)})


def profile_from_config(cfg: dict) -> RadialProfile:
    """Build a profile from its JSON configuration document."""
    if not isinstance(cfg, dict) or "family" not in cfg:
        raise ValueError("density config must be an object with a 'family' key")
    family = cfg["family"]
    if family == "bump":
        allowed = {"family", "eta_max", "dim"}
        unknown = set(cfg) - allowed
        if unknown:
            raise ValueError(f"unknown density keys: {sorted(unknown)}")
        return make_bump(float(cfg["eta_max"]), int(cfg["dim"]))
    if family == "table":
        allowed = {"family", "etas", "values", "dim", "interpolation"}
        unknown = set(cfg) - allowed
        if unknown:
            raise ValueError(f"unknown density keys: {sorted(unknown)}")
        return make_table(cfg["etas"], cfg["values"], int(cfg["dim"]),
                          interpolation=cfg.get("interpolation", "pchip"))
    raise ValueError(f"unknown density family {family!r}")


# -- measure, sampling and moments -------------------------------------------

def pdf_eta(p: RadialProfile, eta):
    """Density of the radial measure: Omega_{n-1} g(eta) sinh(eta)^{n-1}."""
    eta = np.asarray(eta, dtype=float)
    return sphere_area(p.dim) * p.g(eta) * np.sinh(eta) ** (p.dim.n - 1)


def cdf_eta(p: RadialProfile, eta):
    """Radial CDF, monotone with cdf(0) = 0 and cdf(eta_max) = 1."""
    scalar = np.isscalar(eta)
    out = p._cdf_eval(np.atleast_1d(np.asarray(eta, dtype=float)))
    return float(out[0]) if scalar else out


def _sample_eta_many(p: RadialProfile, u: np.ndarray) -> np.ndarray:
    """Vectorized bracketed root finding for cdf(eta) = u.

    Secant steps safeguarded by bisection (every other iteration forces a
    bisection so the bracket provably shrinks); only unconverged points are
    re-evaluated.
    """
    u = np.asarray(u, dtype=float)
    if np.any((u <= 0.0) | (u >= 1.0)):
        raise ValueError("uniform draws must lie strictly inside (0, 1)")
    interp = p._cdf_interp()
    grid = interp.x
    vals = interp(grid)
    total = p._cache["cdf_total"]
    uu = u * total
    idx = np.clip(np.searchsorted(vals, uu), 1, grid.size - 1)
    lo = grid[idx - 1].copy()
    hi = grid[idx].copy()
    flo = vals[idx - 1] - uu
    fhi = vals[idx] - uu
    out = 0.5 * (lo + hi)
    active = np.arange(u.size)
    for step in range(_ROOT_MAX_STEPS):
        width = hi - lo
        done = width < _ROOT_TOL
        if np.any(done):
            sel = active[done]
            out[sel] = 0.5 * (lo[done] + hi[done])
            keep = ~done
            active = active[keep]
            if active.size == 0:
                return out
            lo, hi, flo, fhi, width = lo[keep], hi[keep], flo[keep], fhi[keep], width[keep]
        if step % 2 == 0:
            denom = fhi - flo
            sec = lo - flo * width / np.where(denom != 0.0, denom, 1.0)
            bad = (denom == 0.0) | (sec <= lo) | (sec >= hi)
            mid = np.where(bad, 0.5 * (lo + hi), sec)
        else:
            mid = 0.5 * (lo + hi)
        mid = np.clip(mid, lo + 0.25 * _ROOT_TOL, hi - 0.25 * _ROOT_TOL)
        fm = interp(mid) - uu[active]
        take_hi = fm >= 0.0
        hi = np.where(take_hi, mid, hi)
        fhi = np.where(take_hi, fm, fhi)
        lo = np.where(take_hi, lo, mid)
        flo = np.where(take_hi, flo, fm)
    raise RuntimeError("inverse-CDF root finding did not converge in 200 steps")


def sample_eta(p: RadialProfile, u: float) -> float:
    """Radial draw by inverting the CDF at the uniform variate u in (0, 1)."""
    return float(_sample_eta_many(p, np.array([float(u)]))[0])


def sample_point(p: RadialProfile, stream: np.random.Generator) -> BallPoint:
    """Draw one point: eta by CDF inversion, direction uniform on the sphere."""
    eta = sample_eta(p, float(stream.random()))
    g = stream.standard_normal(p.dim.n)
    nrm = float(np.linalg.norm(g))
    theta = g / nrm if nrm > 0.0 else np.eye(p.dim.n)[0]
    return BallPoint(math.tanh(eta / 2.0) * theta)


def sample_points(p: RadialProfile, stream: np.random.Generator, count: int) -> np.ndarray:
    """Batch of draws as a (count, n) coordinate array.

    Draw protocol: count uniforms for the radii, then count*n standard
    normals for the directions.
    """
    etas = _sample_eta_many(p, stream.random(count))
    g = stream.standard_normal((count, p.dim.n))
    nrm = np.linalg.norm(g, axis=1, keepdims=True)
    nrm[nrm == 0.0] = 1.0
    return np.tanh(etas / 2.0)[:, None] * g / nrm


def scale_profile(p: RadialProfile, eps: float) -> RadialProfile:
    """Profile of the contracted variable whose radial law is eta -> eps*eta.

    g_eps(eta) = eps^{-1} g(eta/eps) (sinh(eta/eps)/sinh(eta))^{n-1}, support
    shrinking to [0, eps*eta_max]; this is the law of eps (x) Z.
    """
    if not 0.0 < eps <= 1.0:
        raise ValueError(f"eps must lie in (0, 1], got {eps!r}")
    if eps == 1.0:
        return p
    nm1 = p.dim.n - 1
    parent_g = p.g
    inv = 1.0 / eps

    def shape(etas):
        etas = np.asarray(etas, dtype=float)
        ratio = (sinch(etas * inv) / sinch(etas)) ** nm1
        return inv ** p.dim.n * parent_g(etas * inv) * ratio

    scaled = RadialProfile.__new__(RadialProfile)
    scaled.dim = p.dim
    scaled.eta_max = eps * p.eta_max
    scaled.family = p.family
    scaled.params = dict(p.params)
    scaled.params["scaled_by"] = eps * p.params.get("scaled_by", 1.0)
    scaled._shape = shape
    scaled.norm_const = 1.0  # substitution eta -> eps*eta preserves the mass
    scaled._cache = {}
    parent_interp = p._cdf_interp()
    scaled._cache["cdf"] = PchipInterpolator(eps * parent_interp.x,
                                             parent_interp(parent_interp.x),
                                             extrapolate=False)
    scaled._cache["cdf_total"] = p._cache["cdf_total"]
    return scaled


def second_moment(p: RadialProfile) -> float:
    """int eta^2 d(mu) over the radial law."""
    return p._moment(2)


def mean_eta(p: RadialProfile) -> float:
    return p._moment(1)


def limit_time(p: RadialProfile) -> float:
    """Asymptotic time parameter t = (second moment) / n of the walk limit."""
    return second_moment(p) / p.dim.n
