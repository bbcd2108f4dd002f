"""Radial Fourier analysis on the ball: spherical functions, the Helgason
transform and its inverse, characteristic functions and variance.

The spherical function has three numerical representations:

* an endpoint-regularized Gauss-Jacobi form of the radial integral
  (the substitution s = eta*v and the product formula
  cosh(eta) - cosh(eta*v) = 2 sinh(eta(1+v)/2) sinh(eta(1-v)/2) turn the
  endpoint singularity into the Jacobi weight (1-v^2)^{(n-3)/2});
* a hypergeometric-type power series in sinh(eta/2), fast for small radii;
* for odd n, the half-integer Legendre reduction used as a cross-check.

Transforms of radial profiles are therefore one-dimensional quadratures, and
the inverse transform is an adaptive Gauss-Kronrod integral against the
Plancherel density |c(lambda)|^{-2} of the Harish-Chandra c-function.
"""

import math
from dataclasses import dataclass
from weakref import WeakKeyDictionary

import numpy as np

from .geometry import Dimension, as_dim, sphere_area
from .quadrature import (QuadratureError, gauss_jacobi_sym, gk_adaptive_vector,
                         integrate_adaptive, panel_nodes)
from .radial_density import RadialProfile, pdf_eta, scale_profile, sinch

_ABS_TARGET = 1e-13
_TAIL_THRESHOLD = 1e-14
_LAMBDA_CAP = 1e4


class SeriesError(RuntimeError):
    """The power-series representation failed to converge in 200 terms."""


class TruncationError(RuntimeError):
    """No admissible truncation point for the inverse transform."""


@dataclass(frozen=True)
class SpectralFunction:
    """A tabulation lambda -> value; radial transforms are real and even."""

    lambdas: np.ndarray
    values: np.ndarray
    dim: Dimension

    def __post_init__(self):
        lam = np.asarray(self.lambdas, dtype=float)
        val = np.asarray(self.values, dtype=float)
        if lam.ndim != 1 or lam.shape != val.shape:
            raise ValueError("lambdas and values must be matching 1-d arrays")
        if np.any(np.diff(lam) <= 0.0) or np.any(lam < 0.0):
            raise ValueError("lambda grid must be nonnegative and strictly increasing")
        if not np.all(np.isfinite(val)):
            raise ValueError("values must be finite")
        lam.setflags(write=False)
        val.setflags(write=False)
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "values", val)

    def at(self, lam):
        return np.interp(np.abs(lam), self.lambdas, self.values)


def _kn(n: int) -> float:
    return math.gamma(n / 2.0) / (math.sqrt(math.pi) * math.gamma((n - 1) / 2.0))


def _gj_order(lam: float, eta_max: float) -> int:
    q = 24 + int(0.55 * abs(lam) * eta_max)
    return min(-(-q // 8) * 8, 4096)


def _gj_half(q: int, alpha: float):
    """Positive half of the symmetric Jacobi rule; the radial integrands are
    even in the node variable, so the folded rule halves the work."""
    if q % 2:
        q += 1
    v, w = gauss_jacobi_sym(q, alpha)
    half = q // 2
    return v[half:], w[half:]


def phi_integral(lam, eta, n, order=None):
    """Spherical function by Gauss-Jacobi quadrature of its radial integral.

    Accepts scalar or array eta; `order` overrides the node count (used by
    doubled-resolution oracle tests).
    """
    d = as_dim(n).n
    lam = abs(float(lam))
    etas = np.atleast_1d(np.asarray(eta, dtype=float))
    scalar = np.isscalar(eta) or np.asarray(eta).ndim == 0
    out = np.ones(etas.shape)
    pos = etas > 0.0
    if np.any(pos):
        ep = etas[pos]
        alpha = (d - 3) / 2.0
        q = order or _gj_order(lam, float(np.max(ep)))
        v, w = _gj_half(q, alpha)
        a = 0.5 * ep[:, None] * (1.0 + v[None, :])
        b = 0.5 * ep[:, None] * (1.0 - v[None, :])
        smooth = (sinch(a) * sinch(b)) ** alpha
        j = 2.0 * ((smooth * np.cos(lam * ep[:, None] * v[None, :])) @ w)
        out[pos] = _kn(d) * sinch(ep) ** (2 - d) * j
    return float(out[0]) if scalar else out


def phi_series(lam, eta, n, tol=1e-17, max_terms=200):
    """Spherical function as the hypergeometric series with parameters
    rho +- i*lambda and argument -sinh(eta/2)^2.

    The lambda scaling is pinned by the eigenvalue -(lambda^2 + rho^2): the
    eta^2 coefficient must be -(lambda^2 + rho^2)/(2n), which the Pochhammer
    factors (rho+j)^2 + lambda^2 reproduce.  Hard-errors if 200 terms do not
    converge; callers should fall back to phi_integral outside the
    small-radius regime.
    """
    d = as_dim(n).n
    lam = abs(float(lam))
    rho = (d - 1) / 2.0
    mser = d / 2.0 - 1.0
    etas = np.atleast_1d(np.asarray(eta, dtype=float))
    scalar = np.isscalar(eta) or np.asarray(eta).ndim == 0
    x = np.sinh(etas / 2.0) ** 2
    total = np.ones(etas.shape)
    term = np.ones(etas.shape)
    lam2 = lam * lam
    small_runs = 0
    for q in range(1, max_terms + 1):
        term = term * (-x) * ((rho + q - 1.0) ** 2 + lam2) / (q * (mser + q))
        total += term
        if float(np.max(np.abs(term))) <= tol * (1.0 + float(np.max(np.abs(total)))):
            small_runs += 1
            if small_runs >= 2:
                return float(total[0]) if scalar else total
        else:
            small_runs = 0
    raise SeriesError(f"no convergence after {max_terms} terms (lam={lam}, max eta={etas.max()})")


def phi(lam, eta, n):
    """Spherical function with automatic representation dispatch.

    The series branch is taken when lam*sinh(eta/2) < 0.5 and eta < 0.5; the
    two branches agree to 1e-10 across the switch boundary.
    """
    return float(phi_many(lam, np.array([float(eta)]), n)[0])


def phi_many(lam, etas, n):
    """Vectorized dispatcher over eta for a fixed lambda."""
    d = as_dim(n).n
    lam = abs(float(lam))
    etas = np.asarray(etas, dtype=float)
    out = np.ones(etas.shape)
    pos = etas > 0.0
    series = pos & (etas < 0.5) & (lam * np.sinh(etas / 2.0) < 0.5)
    integral = pos & ~series
    if np.any(series):
        out[series] = phi_series(lam, etas[series], d)
    if np.any(integral):
        out[integral] = phi_integral(lam, etas[integral], d)
    return out


def phi_legendre_check(lam, eta, n):
    """Odd-n evaluation through the half-integer Legendre-function reduction.

    The associated Legendre function of order 1 - n/2 and complex degree is
    evaluated through its radial integral representation (elementary for odd
    n) and reassembled with the connection constants; validation-only.
    """
    d = as_dim(n).n
    if d % 2 == 0:
        raise ValueError("Legendre reduction is exposed for odd dimensions only")
    lam = abs(float(lam))
    eta = float(eta)
    if eta == 0.0:
        return 1.0
    rho = (d - 1) / 2.0
    k = (d - 3) // 2  # integer power: no endpoint singularity for odd n

    def integrand(s):
        return (np.cosh(eta) - np.cosh(s)) ** k * np.cos(lam * s)

    npanels = max(2, int(lam * eta / 3.0) + 1)
    radial = integrate_adaptive(integrand, 0.0, eta, abs_tol=1e-15,
                                rel_tol=1e-14, npanels=npanels, q=24)
    legendre = (math.sqrt(2.0 / math.pi) * math.sinh(eta) ** (1.0 - d / 2.0)
                / math.gamma(rho) * radial)
    return (2.0 ** (rho - 0.5) * math.gamma(rho + 0.5)
            * math.sinh(eta) ** (0.5 - rho) * legendre)


# -- Harish-Chandra c-function and Plancherel density -------------------------

# Lanczos approximation, g = 7 with 9 coefficients.
_LANCZOS_G = 7.0
_LANCZOS_C = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def _log_sin_pi(z: complex) -> complex:
    """log(sin(pi z)) without overflow for large |Im z|."""
    x, y = z.real, z.imag
    if abs(y) < 20.0:
        return complex(np.log(np.sin(np.pi * complex(x, y))))
    # sin(pi z) = (e^{i pi z} - e^{-i pi z}) / (2i); keep the dominant factor
    w = 1.0 - np.exp(2j * np.pi * complex(x, y) * np.sign(y))
    return complex(np.pi * abs(y) - math.log(2.0),
                   np.sign(y) * (np.pi / 2.0 - np.pi * x)) + complex(np.log(w))


def loggamma(z) -> complex:
    """Complex log-Gamma by the Lanczos series, reflected for Re z < 0.5."""
    z = complex(z)
    if z.real < 0.5:
        return math.log(math.pi) - _log_sin_pi(z) - loggamma(1.0 - z)
    z -= 1.0
    x = _LANCZOS_C[0]
    for i, c in enumerate(_LANCZOS_C[1:], start=1):
        x += c / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _LOG_SQRT_2PI + (z + 0.5) * np.log(t) - t + np.log(x)


def plancherel_density(lam, n) -> float:
    """|c(lambda)|^{-2} for the c-function

        c(lambda) = 2^{3-n-2i lam} Gamma(n/2) Gamma(2i lam)
                    / (Gamma((n-1+2i lam)/2) Gamma((1+2i lam)/2)),

    assembled in log space.  The doubled spectral argument inside the Gamma
    factors is pinned by the eigenvalue normalization of the spherical
    functions: it reproduces the classical densities lambda*tanh(pi lambda)
    (n=2), 16 lambda^2 (n=3) and lambda^2(lambda^2+1) up to constants (n=5),
    and makes the inverse transform exactly undo the forward one.  Vanishes
    like lambda^2 at the origin (the Gamma pole) and grows like
    lambda^{n-1} at infinity.
    """
    d = as_dim(n).n
    lam = abs(float(lam))
    if lam == 0.0:
        return 0.0
    s = 2.0 * lam
    log_abs_c2 = 2.0 * (
        (3.0 - d) * math.log(2.0)
        + math.lgamma(d / 2.0)
        + loggamma(1j * s).real
        - loggamma(complex((d - 1) / 2.0, s / 2.0)).real
        - loggamma(complex(0.5, s / 2.0)).real
    )
    return math.exp(-log_abs_c2)


@dataclass(frozen=True)
class PlancherelDensity:
    dim: Dimension

    def __call__(self, lam):
        return plancherel_density(lam, self.dim)


def inversion_constant(n) -> float:
    """Constant in front of the inverse transform, 2^{6-3n} / (pi Omega_{n-1}).

    Pinned by the requirement that inverting the transform of the explicit
    heat kernel reproduces it: checked in closed form against the classical
    kernels for n = 3 and n = 5 (both orders of the short-time trace) and by
    the flat short-time limit for general n.
    """
    d = as_dim(n).n
    return 2.0 ** (6 - 3 * d) / (math.pi * sphere_area(d))


# -- transforms ----------------------------------------------------------------

def _measure_nodes(p: RadialProfile, level: int):
    """Cached (nodes, pdf*weights) table of the radial measure at a dyadic
    panel refinement level; shared by every transform of the profile."""
    tables = p._cache.setdefault("measure_nodes", {})
    entry = tables.get(level)
    if entry is None:
        nodes, weights = panel_nodes(0.0, p.eta_max, 2**level, 32)
        entry = (nodes, weights * pdf_eta(p, nodes))
        tables[level] = entry
    return entry


def _phi_for_transform(lam: float, etas: np.ndarray, d: int) -> np.ndarray:
    # far-oscillatory fast path: for n=3 the spherical function is elementary
    # and the generic Jacobi rule would cost O(lambda^2); the closed form
    # agrees with it to machine precision and only serves lam*eta_max > 64,
    # keeping the generic quadrature as the production route in the band
    # where the closed form acts as an oracle.
    if d == 3 and lam * float(np.max(etas, initial=0.0)) > 64.0:
        out = np.ones(etas.shape)
        pos = etas > 0.0
        out[pos] = np.sin(lam * etas[pos]) / (lam * np.sinh(etas[pos]))
        return out
    return phi_many(lam, etas, d)


def fh_transform(p: RadialProfile, lam) -> float:
    """Radial Helgason transform: integral of the spherical function against
    the radial measure of the profile, to ~1e-13 absolute."""
    lam = abs(float(lam))
    d = p.dim.n
    level = int(lam * p.eta_max / 34.0).bit_length()
    prev = None
    for lv in range(level, level + 14):
        nodes, wpdf = _measure_nodes(p, lv)
        cur = float(np.dot(wpdf, _phi_for_transform(lam, nodes, d)))
        if prev is not None and abs(cur - prev) <= max(_ABS_TARGET, 1e-13 * abs(cur)):
            return cur
        prev = cur
    raise QuadratureError(f"transform quadrature did not converge (lam={lam})")


def transform_table(p: RadialProfile, lambdas) -> SpectralFunction:
    lambdas = np.asarray(lambdas, dtype=float)
    vals = np.array([fh_transform(p, l) for l in lambdas])
    return SpectralFunction(lambdas, vals, p.dim)


def _resolve_spectral(F):
    if isinstance(F, SpectralFunction):
        return (lambda lam: float(F.at(lam))), F.dim.n
    return F, None


def find_truncation(envelope, n, tail_tol=_TAIL_THRESHOLD, cap=_LAMBDA_CAP) -> float:
    """Smallest grid point beyond which |F| |c|^{-2} stays below the tail
    tolerance (three consecutive grid points); hard error past the cap.

    The scan grid is fine near the origin and coarsens proportionally at
    large lambda, so super-polynomially decaying transforms are located in
    O(100) envelope evaluations.
    """
    d = as_dim(n).n
    lam = 0.25
    run = 0
    first = None
    prev_bound = math.inf
    growing = 0
    while lam <= cap:
        bound = abs(envelope(lam)) * plancherel_density(lam, d)
        if bound < tail_tol:
            run += 1
            if first is None:
                first = lam
            if run >= 3:
                return first
        else:
            run = 0
            first = None
            # a numerically computed transform bottoms out at its quadrature
            # noise floor and the bound then grows like lambda^{n-1} forever
            growing = growing + 1 if bound >= prev_bound and lam > 50.0 else 0
            if growing >= 24:
                raise TruncationError(
                    "envelope stopped decaying before certifying the tail; "
                    "supply an analytic decay certificate")
        prev_bound = bound
        lam += max(0.25, lam / 16.0)
    raise TruncationError(f"no admissible truncation below lambda = {cap}")


def fh_inverse_grid(F, etas, n, envelope=None, abs_tol=1e-13,
                    tail_tol=_TAIL_THRESHOLD):
    """Inverse transform on a grid of radii, sharing the lambda panels.

    F is a callable lambda -> value (or a SpectralFunction).  envelope is a
    decay certificate bounding |F| (defaults to |F| itself); transforms whose
    numerically computed values bottom out at the quadrature noise floor need
    either an analytic envelope or a tail_tol matched to the target accuracy,
    since the default integrand bound of 1e-14 is then never certified.
    """
    raw, fdim = _resolve_spectral(F)
    if n is None and fdim is None:
        raise ValueError("dimension required when F is a bare callable")
    d = as_dim(n).n if n is not None else fdim
    etas = np.asarray(etas, dtype=float)
    memo = {}

    def func(lam):
        val = memo.get(lam)
        if val is None:
            val = raw(lam)
            memo[lam] = val
        return val

    env = envelope or (lambda lam: abs(func(lam)))
    lam_max = find_truncation(env, d, tail_tol=tail_tol)
    eta_top = float(np.max(etas)) if etas.size else 0.0

    def rows(lams):
        out = np.empty((lams.size, etas.size))
        for i, lam in enumerate(lams):
            out[i] = func(lam) * plancherel_density(lam, d) * phi_many(lam, etas, d)
        return out

    # uniform panels over the bulk, geometric growth into the decayed tail;
    # the panel tolerance follows the truncation budget
    width = min(4.0, 8.0 / max(1.0, eta_top))
    edges = [0.0]
    step = width
    while edges[-1] < lam_max:
        if edges[-1] > 8.0 * width:
            step *= 1.35
        edges.append(min(edges[-1] + step, lam_max))
    integral = gk_adaptive_vector(rows, np.asarray(edges),
                                  abs_tol=max(abs_tol, 0.1 * tail_tol))
    return inversion_constant(d) * integral


def fh_inverse(F, eta, n=None, envelope=None, tail_tol=_TAIL_THRESHOLD) -> float:
    return float(fh_inverse_grid(F, np.array([float(eta)]), n, envelope,
                                 tail_tol=tail_tol)[0])


# -- characteristic function, variance, walk transforms ------------------------

_F0_CACHE: "WeakKeyDictionary[RadialProfile, float]" = WeakKeyDictionary()
_SCALED_CACHE: "WeakKeyDictionary[RadialProfile, dict]" = WeakKeyDictionary()


def _fhat0(p: RadialProfile) -> float:
    val = _F0_CACHE.get(p)
    if val is None:
        val = fh_transform(p, 0.0)
        if not val > 0.0:
            raise AssertionError("transform at 0 must be positive for a valid profile")
        _F0_CACHE[p] = val
    return val


def char2(p: RadialProfile, lam) -> float:
    """Characteristic function of the second kind: transform normalized to 1 at 0."""
    lam = float(lam)
    if lam == 0.0:
        return 1.0
    return fh_transform(p, lam) / _fhat0(p)


def variance_kernel(etas, n):
    """Radial kernel whose integral against the law gives the raw second
    spectral derivative at 0 (with opposite sign)."""
    d = as_dim(n).n
    etas = np.asarray(etas, dtype=float)
    alpha = (d - 3) / 2.0
    v, w = _gj_half(48, alpha)
    a = 0.5 * etas[:, None] * (1.0 + v[None, :])
    b = 0.5 * etas[:, None] * (1.0 - v[None, :])
    smooth = (sinch(a) * sinch(b)) ** alpha
    j = 2.0 * ((smooth * v[None, :] ** 2) @ w)
    return _kn(d) * sinch(etas) ** (2 - d) * etas**2 * j


def variance_direct(p: RadialProfile) -> float:
    """Variance as the exact radial double integral (no finite differences)."""
    d = p.dim.n

    def integrand(etas):
        return variance_kernel(etas, d) * pdf_eta(p, etas)

    raw = integrate_adaptive(integrand, 0.0, p.eta_max, abs_tol=1e-15,
                             rel_tol=1e-13, q=32)
    return raw / _fhat0(p)


def _scaled_for_walk(p: RadialProfile, N: int) -> RadialProfile:
    per = _SCALED_CACHE.get(p)
    if per is None:
        per = {}
        _SCALED_CACHE[p] = per
    scaled = per.get(N)
    if scaled is None:
        scaled = scale_profile(p, 1.0 / math.sqrt(N))
        per[N] = scaled
    return scaled


def walk_transform(p: RadialProfile, N: int, lam) -> float:
    """Exact transform of the N-step normalized sum: the one-step transform of
    the contracted law raised to the N-th power."""
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N!r}")
    return fh_transform(_scaled_for_walk(p, int(N)), lam) ** int(N)


def walk_density_grid(p: RadialProfile, N: int, etas, envelope=None,
                      tail_tol=_TAIL_THRESHOLD) -> np.ndarray:
    """Exact density of the N-step walk in the geodesic radial coordinate,
    by spectral inversion of the product transform.

    For N = 1 the product decays only like the raw profile transform, whose
    computed values bottom out at the quadrature noise floor; that case needs
    an analytic envelope and/or a tail_tol matched to the accuracy target
    (see fh_inverse_grid).
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N!r}")
    N = int(N)
    scaled = _scaled_for_walk(p, N)

    def F(lam):
        return fh_transform(scaled, lam) ** N

    return fh_inverse_grid(F, etas, p.dim.n, envelope=envelope, tail_tol=tail_tol)


def walk_density(p: RadialProfile, N: int, eta, envelope=None,
                 tail_tol=_TAIL_THRESHOLD) -> float:
    return float(walk_density_grid(p, N, np.array([float(eta)]), envelope=envelope,
                                   tail_tol=tail_tol)[0])


# -- direct (space-side) convolution ------------------------------------------

def convolve_direct(f: RadialProfile, g: RadialProfile, etas, qy=256, qc=128):
    """Brute-force convolution of two radial densities, evaluated at radii etas.

    The translation identity for 1 - ||T_y(x)||^2 reduces the ball integral to
    a 2-d quadrature over (radial coordinate of y, polar angle); this is the
    independent oracle for the product rule of the transform.
    """
    if f.dim.n != g.dim.n:
        raise ValueError("profiles must share the dimension")
    d = f.dim.n
    scalar = np.isscalar(etas) or np.asarray(etas).ndim == 0
    etas = np.atleast_1d(np.asarray(etas, dtype=float))
    alpha = (d - 3) / 2.0
    area_angle = 2.0 * math.pi ** ((d - 1) / 2.0) / math.gamma((d - 1) / 2.0)

    rx = np.tanh(etas / 2.0)
    y_nodes, y_weights = panel_nodes(0.0, g.eta_max, max(2, qy // 32), 32)
    c_nodes, c_weights = gauss_jacobi_sym(qc, alpha)
    ry = np.tanh(y_nodes / 2.0)
    gy = g.g(y_nodes) * np.sinh(y_nodes) ** (d - 1)

    rx2 = (rx**2)[:, None, None]
    rxv = rx[:, None, None]
    ryv = ry[None, :, None]
    cv = c_nodes[None, None, :]
    denom = 1.0 - 2.0 * rxv * ryv * cv + rx2 * ryv**2
    one_minus_t2 = (1.0 - rx2) * (1.0 - ryv**2) / denom
    norm_t = np.sqrt(np.clip(1.0 - one_minus_t2, 0.0, None))
    eta_t = 2.0 * np.arctanh(np.minimum(norm_t, 1.0 - 1e-16))
    fvals = f.g(eta_t.ravel()).reshape(eta_t.shape)

    inner = fvals @ c_weights
    total = (inner * gy[None, :]) @ y_weights
    out = area_angle * total
    return float(out[0]) if scalar else out


def convolution_profile(f: RadialProfile, g: RadialProfile, points=301,
                        interpolation="spline") -> RadialProfile:
    """Tabulate the direct convolution on its support and wrap it as a profile."""
    from .radial_density import make_table

    support = f.eta_max + g.eta_max
    grid = np.linspace(0.0, support, points)
    vals = convolve_direct(f, g, grid)
    return make_table(grid, np.maximum(vals, 0.0), f.dim.n, interpolation=interpolation)
