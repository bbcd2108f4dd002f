"""Hyperbolic heat kernels: spectral side, explicit space side, and the
half-time normal density that appears as the walk limit.

hk(t, .) is the fundamental solution of d/dt = Laplacian, whose radial
transform is exp(-(lambda^2 + rho^2) t); psi_clt(t, .) = hk(t/2, .) solves the
probabilist's d/dt = Laplacian/2 and has second-kind characteristic function
exp(-lambda^2 t / 2).

The iterated operator (-1/sinh(eta) d/deta)^m applied to the Gaussian factor
is expanded once per order by a term-rewriting recurrence over monomials
coef * eta^a * coth(eta)^b * csch(eta)^c * tau^{-d}; evaluation is then exact
up to floating point.  Near eta = 0 every term is singular but the sum is
removable, so the assembled prefactor is replaced by its (symbolically
cancelled) power series.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .geometry import Dimension, as_dim
from .quadrature import gauss_legendre


@dataclass(frozen=True)
class HeatKernelSpec:
    """Time/variance parameter and dimension of a kernel evaluation."""

    t: float
    dim: Dimension
    rho: float = field(init=False)

    def __post_init__(self):
        if self.t <= 0.0:
            raise ValueError(f"t must be positive, got {self.t!r}")
        object.__setattr__(self, "dim", as_dim(self.dim))
        object.__setattr__(self, "rho", self.dim.rho)

_SMALL_ETA = 0.125
_SERIES_ORDER = 16

# term keys are (a, b, c, d) for eta^a coth^b csch^c tau^{-d}; integer coefs.
_UNIT = ((0, 0, 0, 0), 1)


def _apply_neg_csch_d(terms: dict) -> dict:
    """Rewrite rules for -(csch eta) d/deta acting on P(eta) e^{-eta^2/(2 tau)}."""
    out = {}

    def add(key, coef):
        out[key] = out.get(key, 0) + coef

    for (a, b, c, d), coef in terms.items():
        if a:
            add((a - 1, b, c + 1, d), -a * coef)
        if b:
            add((a, b - 1, c + 3, d), b * coef)
        if c:
            add((a, b + 1, c + 1, d), c * coef)
        add((a + 1, b, c + 1, d + 1), coef)
    return {k: v for k, v in out.items() if v}


def _apply_neg_d(terms: dict) -> dict:
    """Rewrite rules for -d/deta (without the csch factor)."""
    out = {}

    def add(key, coef):
        out[key] = out.get(key, 0) + coef

    for (a, b, c, d), coef in terms.items():
        if a:
            add((a - 1, b, c, d), -a * coef)
        if b:
            add((a, b - 1, c + 2, d), b * coef)
        if c:
            add((a, b + 1, c, d), c * coef)
        add((a + 1, b, c, d + 1), coef)
    return {k: v for k, v in out.items() if v}


def _mul_csch(terms: dict) -> dict:
    return {(a, b, c + 1, d): coef for (a, b, c, d), coef in terms.items()}


@lru_cache(maxsize=64)
def _odd_terms(m: int):
    terms = dict([_UNIT])
    for _ in range(m):
        terms = _apply_neg_csch_d(terms)
    return tuple(sorted(terms.items()))


@lru_cache(maxsize=64)
def _even_integrand_terms(m: int):
    terms = dict([_UNIT])
    for _ in range(m - 1):
        terms = _apply_neg_csch_d(terms)
    return tuple(sorted(_mul_csch(_apply_neg_d(terms)).items()))


@lru_cache(maxsize=64)
def _series_table(terms_key):
    """Power-series coefficients of the assembled prefactor near eta = 0.

    Returns an array C with C[k, j] the coefficient of eta^k * tau^{-j}; the
    negative Laurent powers cancel exactly and are asserted away.
    """
    import sympy as sp

    eta, u = sp.symbols("eta u", positive=True)
    expr = sp.Integer(0)
    for (a, b, c, d), coef in terms_key:
        expr += coef * eta**a * sp.coth(eta) ** b * (1 / sp.sinh(eta)) ** c * u**d
    ser = sp.expand(sp.series(expr, eta, 0, _SERIES_ORDER).removeO())
    by_eta = sp.collect(ser, eta, evaluate=False)
    max_d = max(d for (_, _, _, d), _ in terms_key)
    table = np.zeros((_SERIES_ORDER, max_d + 1))
    for key, coeff in by_eta.items():
        k = 0 if key == 1 else int(sp.degree(key, eta))
        if k < 0:
            raise AssertionError("Laurent part failed to cancel symbolically")
        if k >= _SERIES_ORDER:
            continue
        poly = sp.Poly(sp.expand(coeff), u)
        for (j,), cval in poly.terms():
            table[k, j] = float(cval)
    return table


def _eval_terms(terms_key, etas: np.ndarray, tau: float) -> np.ndarray:
    """Prefactor P(eta) with the Gaussian factored out; series branch near 0."""
    etas = np.asarray(etas, dtype=float)
    out = np.empty(etas.shape)
    small = etas < _SMALL_ETA
    if np.any(small):
        table = _series_table(terms_key)
        u_pows = (1.0 / tau) ** np.arange(table.shape[1])
        coef_eta = table @ u_pows
        out[small] = np.polynomial.polynomial.polyval(etas[small], coef_eta)
    big = ~small
    if np.any(big):
        e = etas[big]
        acc = np.zeros(e.shape)
        ch, sh = np.cosh(e), np.sinh(e)
        for (a, b, c, d), coef in terms_key:
            acc += coef * e**a * ch**b / sh ** (b + c) * tau ** (-d)
        out[big] = acc
    return out


def hk_fourier(t: float, lam, n) -> float:
    """Spectral side: exp(-(lambda^2 + rho^2) t)."""
    if t <= 0.0:
        raise ValueError(f"t must be positive, got {t!r}")
    rho = as_dim(n).rho
    lam = np.asarray(lam, dtype=float)
    out = np.exp(-(lam**2 + rho**2) * t)
    return float(out) if out.ndim == 0 else out


def _gaussian(etas, tau):
    return np.exp(-np.asarray(etas, dtype=float) ** 2 / (2.0 * tau))


def hk_odd(t: float, eta, m: int):
    """Space side for n = 2m+1 via the iterated sinh-derivative operator."""
    if t <= 0.0 or m < 1:
        raise ValueError("need t > 0 and m >= 1")
    scalar = np.isscalar(eta) or np.asarray(eta).ndim == 0
    etas = np.atleast_1d(np.asarray(eta, dtype=float))
    tau = 2.0 * t
    pref = math.exp(-m * m * t) / ((2.0 * math.pi) ** m * math.sqrt(2.0 * math.pi * tau))
    out = pref * _eval_terms(_odd_terms(m), etas, tau) * _gaussian(etas, tau)
    return float(out[0]) if scalar else out


def hk_even(t: float, eta, m: int, base_nodes=64, max_doublings=6):
    """Space side for n = 2m via the regularized descent integral.

    The substitution u^2 = cosh(s) - cosh(eta) removes the endpoint
    singularity; s is recovered stably through asinh of
    sqrt(sinh(eta)^2 + u^2 (2 cosh(eta) + u^2)).
    """
    if t <= 0.0 or m < 1:
        raise ValueError("need t > 0 and m >= 1")
    scalar = np.isscalar(eta) or np.asarray(eta).ndim == 0
    etas = np.atleast_1d(np.asarray(eta, dtype=float))
    tau = 2.0 * t
    pref = math.exp(-((m - 0.5) ** 2) * t) / ((2.0 * math.pi) ** m * math.sqrt(math.pi * tau))
    terms = _even_integrand_terms(m)

    reach = math.sqrt(2.0 * tau * math.log(1e18))
    sh2 = np.sinh(etas) ** 2
    ch2 = 2.0 * np.cosh(etas)

    def level(npanels):
        # panel edges follow a uniform s-grid so the nodes track the Gaussian;
        # a uniform u-grid would pile almost everything into the far tail.
        frac = np.linspace(0.0, 1.0, npanels + 1)
        s_edges = etas[:, None] + reach * frac[None, :]
        u_edges = np.sqrt(2.0 * np.sinh(0.5 * (s_edges + etas[:, None]))
                          * np.sinh(0.5 * (s_edges - etas[:, None])))
        x, w = gauss_legendre(24)
        mid = 0.5 * (u_edges[:, 1:] + u_edges[:, :-1])
        half = 0.5 * (u_edges[:, 1:] - u_edges[:, :-1])
        u = mid[:, :, None] + half[:, :, None] * x[None, None, :]
        wu = half[:, :, None] * w[None, None, :]
        s = np.arcsinh(np.sqrt(sh2[:, None, None] + u * u * (ch2[:, None, None] + u * u)))
        vals = _eval_terms(terms, s.ravel(), tau).reshape(s.shape) * _gaussian(s, tau)
        return 2.0 * np.sum(wu * vals, axis=(1, 2))

    npanels = max(8, int(reach / math.sqrt(tau)) + 2)
    prev = level(npanels)
    for _ in range(max_doublings):
        npanels *= 2
        cur = level(npanels)
        if float(np.max(np.abs(cur - prev))) <= 1e-13 * (1.0 + float(np.max(np.abs(cur)))):
            prev = cur
            break
        prev = cur
    out = pref * prev
    return float(out[0]) if scalar else out


def hk(t: float, eta, n):
    """Heat kernel of d/dt = Laplacian; parity dispatch lives here."""
    d = as_dim(n)
    if d.is_odd:
        return hk_odd(t, eta, d.half_split)
    return hk_even(t, eta, d.half_split)


def psi_clt(t: float, eta, n):
    """Normal density of the walk limit: the kernel at half time."""
    return hk(t / 2.0, eta, n)
