"""Deterministic quadrature machinery shared by the analysis modules.

All rules are fixed-node Gauss families with doubling-based error control, so
results are bit-reproducible for a given input; nothing here depends on
runtime state or thread count.
"""

import math
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi


class QuadratureError(RuntimeError):
    """An adaptive rule failed to reach its tolerance within its budget."""


@lru_cache(maxsize=512)
def gauss_legendre(q: int):
    x, w = np.polynomial.legendre.leggauss(q)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@lru_cache(maxsize=512)
def gauss_jacobi_sym(q: int, alpha: float):
    """Nodes/weights for the symmetric weight (1-v)^alpha (1+v)^alpha on [-1, 1]."""
    x, w = roots_jacobi(q, alpha, alpha)
    x = np.asarray(x, dtype=float)
    w = np.asarray(w, dtype=float)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def panel_nodes(a: float, b: float, npanels: int, q: int):
    """Composite Gauss-Legendre nodes and weights on [a, b]."""
    x, w = gauss_legendre(q)
    edges = np.linspace(a, b, npanels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def integrate_gl(f, a: float, b: float, npanels: int = 1, q: int = 32) -> float:
    nodes, weights = panel_nodes(a, b, npanels, q)
    return float(np.dot(weights, np.asarray(f(nodes), dtype=float)))


def integrate_adaptive(f, a: float, b: float, abs_tol: float = 1e-13,
                       rel_tol: float = 1e-13, npanels: int = 1, q: int = 32,
                       max_doublings: int = 14) -> float:
    """Composite GL with panel doubling until two consecutive levels agree."""
    if b <= a:
        return 0.0
    prev = integrate_gl(f, a, b, npanels, q)
    for _ in range(max_doublings):
        npanels *= 2
        cur = integrate_gl(f, a, b, npanels, q)
        if abs(cur - prev) <= max(abs_tol, rel_tol * abs(cur)):
            return cur
        prev = cur
    raise QuadratureError(f"no convergence on [{a}, {b}] after {max_doublings} doublings")


def cumulative_gl(f, grid: np.ndarray, q: int = 16) -> np.ndarray:
    """Cumulative integral of f along a grid, one GL rule per interval."""
    grid = np.asarray(grid, dtype=float)
    x, w = gauss_legendre(q)
    mid = 0.5 * (grid[:-1] + grid[1:])
    half = 0.5 * (grid[1:] - grid[:-1])
    nodes = mid[:, None] + half[:, None] * x[None, :]
    vals = np.asarray(f(nodes.ravel()), dtype=float).reshape(nodes.shape)
    per_interval = half * (vals @ w)
    out = np.empty(grid.size)
    out[0] = 0.0
    np.cumsum(per_interval, out=out[1:])
    return out


# Gauss-Kronrod (7, 15) pair: classical node/weight constants.
_K15_HALF_NODES = np.array([
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898,
])
_K15_HALF_WEIGHTS = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298,
])
_K15_CENTER_WEIGHT = 0.209482141084728
_G7_HALF_WEIGHTS = np.array([0.129484966168870, 0.279705391489277, 0.381830050505119])
_G7_CENTER_WEIGHT = 0.417959183673469

GK_NODES = np.concatenate([-_K15_HALF_NODES, [0.0], _K15_HALF_NODES[::-1]])
GK_K_WEIGHTS = np.concatenate([_K15_HALF_WEIGHTS, [_K15_CENTER_WEIGHT], _K15_HALF_WEIGHTS[::-1]])
_gw = np.zeros(15)
_gw[7] = _G7_CENTER_WEIGHT
for _i, _wv in zip((1, 3, 5), _G7_HALF_WEIGHTS):
    _gw[_i] = _wv
    _gw[14 - _i] = _wv
GK_G_WEIGHTS = _gw
del _gw, _i, _wv


def _gk_panel(fvec, a: float, b: float):
    """One Kronrod panel of a vector-valued integrand fvec(lams) -> (15, K)."""
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    vals = np.asarray(fvec(mid + half * GK_NODES), dtype=float)
    k15 = half * (GK_K_WEIGHTS @ vals)
    g7 = half * (GK_G_WEIGHTS @ vals)
    err = float(np.max(np.abs(k15 - g7))) if k15.size else 0.0
    return k15, err


def gk_adaptive_vector(fvec, edges, abs_tol: float = 1e-13, max_panels: int = 400):
    """Adaptive Gauss-Kronrod panels for a vector integrand; bisects worst panel.

    fvec maps an array of abscissae (L,) to values (L, K); `edges` is the
    initial panel subdivision; returns the (K,) integral.  The error criterion
    is the max-norm over the K components.
    """
    edges = np.asarray(edges, dtype=float)
    if edges[-1] <= edges[0]:
        probe = np.asarray(fvec(np.array([edges[0]])), dtype=float)
        return np.zeros(probe.shape[1])
    panels = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, err = _gk_panel(fvec, lo, hi)
        panels.append([err, lo, hi, val])
    while True:
        total = sum(p[3] for p in panels)
        tol = max(abs_tol, 1e-14 * float(np.max(np.abs(total))))
        errs = [p[0] for p in panels]
        if sum(errs) <= tol:
            return total
        if len(panels) >= max_panels:
            raise QuadratureError(
                f"Kronrod refinement exceeded {max_panels} panels (residual {sum(errs):.3e})")
        worst = int(np.argmax(errs))
        err, lo, hi, _ = panels.pop(worst)
        mid = 0.5 * (lo + hi)
        for seg in ((lo, mid), (mid, hi)):
            val, err = _gk_panel(fvec, *seg)
            panels.append([err, seg[0], seg[1], val])
