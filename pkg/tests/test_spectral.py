import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import loggamma as scipy_loggamma

from hyperwalk import (char2, convolution_profile, convolve_direct, fh_inverse_grid,
                       fh_transform, inversion_constant, make_bump, phi, phi_integral,
                       phi_legendre_check, phi_many, phi_series, plancherel_density,
                       scale_profile, second_moment, variance_direct, walk_density_grid,
                       walk_transform)
from hyperwalk.spectral import SeriesError, SpectralFunction, TruncationError, loggamma

from conftest import bump_transform_envelope


def closed3(lam, eta):
    if eta == 0.0:
        return 1.0
    if lam == 0.0:
        return eta / math.sinh(eta)
    return math.sin(lam * eta) / (lam * math.sinh(eta))


# -- spherical function representations ---------------------------------------

def test_phi_at_origin_is_one():
    for n in (2, 3, 4, 5):
        for lam in (0.0, 1.0, 17.3):
            assert phi_integral(lam, 0.0, n) == 1.0
            assert phi_series(lam, 0.0, n) == 1.0
            assert phi(lam, 0.0, n) == 1.0


def test_phi_integral_matches_closed_form_n3():
    for lam in (0.0, 0.7, 3.0, 12.0):
        for eta in (0.1, 0.6, 1.7, 4.0):
            assert phi_integral(lam, eta, 3) == pytest.approx(
                closed3(lam, eta), abs=1e-12)


def test_phi_series_matches_closed_form_n3():
    for lam in (0.0, 0.7, 3.0, 12.0):
        for eta in (0.05, 0.2, 0.5):
            assert phi_series(lam, eta, 3) == pytest.approx(
                closed3(lam, eta), abs=1e-12)


def test_phi_representations_agree_small_radius():
    for n in (2, 3, 4, 5):
        lams = np.linspace(0.0, 20.0, 9)
        etas = np.linspace(0.01, 0.5, 7)
        for lam in lams:
            a = phi_series(lam, etas, n)
            b = phi_integral(lam, etas, n)
            assert float(np.max(np.abs(a - b))) < 1e-10


def test_phi_series_divergence_is_hard_error():
    with pytest.raises(SeriesError):
        phi_series(1.0, 5.0, 3)  # sinh(eta/2)^2 > 1: series diverges


def test_phi_integral_doubled_nodes_oracle():
    v1 = phi_integral(0.0, 1.0, 2, order=48)
    v2 = phi_integral(0.0, 1.0, 2, order=96)
    assert 0.0 < v1 < 1.0
    assert v1 == pytest.approx(v2, abs=1e-13)


def test_phi_dispatch_boundary_agreement():
    # straddle the series/integral switch lam*sinh(eta/2) = 0.5, eta < 0.5
    for n in (2, 4):
        for eta in (0.2, 0.4, 0.49):
            lam_switch = 0.5 / math.sinh(eta / 2.0)
            for lam in (0.98 * lam_switch, 1.02 * lam_switch):
                a = phi(lam, eta, n)
                b = phi_integral(lam, eta, n)
                assert a == pytest.approx(b, abs=1e-10)


def test_phi_domination_and_strict_bound():
    etas = np.linspace(0.05, 4.0, 30)
    for n in (2, 3, 5):
        phi0 = phi_many(0.0, etas, n)
        assert np.all(phi0 <= 1.0 + 1e-14)
        for lam in (0.5, 2.0, 9.0):
            vals = phi_many(lam, etas, n)
            assert np.all(np.abs(vals) <= phi0 + 1e-12)
    # |phi| strictly below 1 when lam * eta/2 > 1
    worst = 0.0
    for lam in (1.0, 4.0, 20.0):
        for eta in (2.5 / lam, 8.0 / lam, 3.0):
            worst = max(worst, abs(phi(lam, eta, 3)))
    assert worst < 1.0


def test_phi_legendre_reduction():
    assert phi_legendre_check(1.0, 0.0, 3) == 1.0
    assert phi_legendre_check(1.0, 1.0, 3) == pytest.approx(closed3(1.0, 1.0), abs=1e-13)
    rng = np.random.default_rng(4)
    for n in (3, 5):
        for _ in range(6):
            lam = float(rng.uniform(0.1, 6.0))
            eta = float(rng.uniform(0.1, 2.5))
            assert phi_legendre_check(lam, eta, n) == pytest.approx(
                phi(lam, eta, n), abs=1e-10)
    with pytest.raises(ValueError):
        phi_legendre_check(1.0, 1.0, 4)


# -- Plancherel density --------------------------------------------------------

def test_loggamma_matches_scipy():
    for x in (0.05, 0.3, 0.5, 1.0, 2.5, 7.0):
        for y in (0.0, 0.01, 1.0, 10.0, 200.0):
            mine = loggamma(complex(x, y))
            ref = scipy_loggamma(complex(x, y))
            assert mine.real == pytest.approx(ref.real, rel=1e-12, abs=1e-12)


def test_plancherel_zero_and_positivity():
    for n in (2, 3, 4, 5):
        assert plancherel_density(0.0, n) == 0.0
        for lam in (0.01, 1.0, 300.0):
            assert plancherel_density(lam, n) > 0.0


def test_plancherel_n3_proportional_to_lambda_squared():
    lams = np.geomspace(0.1, 50.0, 25)
    ratios = np.array([plancherel_density(l, 3) / l**2 for l in lams])
    assert float(np.max(np.abs(ratios / ratios[0] - 1.0))) < 1e-10


def test_plancherel_asymptotic_slopes():
    for n in (2, 3, 4, 5):
        lo = np.array([1e-3, 3e-3, 1e-2])
        slope0 = np.polyfit(np.log(lo), np.log([plancherel_density(l, n) for l in lo]), 1)[0]
        assert slope0 == pytest.approx(2.0, abs=0.05)
        hi = np.array([100.0, 300.0, 1000.0])
        slope_inf = np.polyfit(np.log(hi), np.log([plancherel_density(l, n) for l in hi]), 1)[0]
        assert slope_inf == pytest.approx(n - 1.0, abs=0.05)


# -- transforms -----------------------------------------------------------------

def test_transform_even_in_lambda(bump3):
    for lam in (0.3, 1.7, 6.0):
        assert fh_transform(bump3, lam) == fh_transform(bump3, -lam)


def test_transform_of_point_mass_limit():
    tiny = make_bump(1e-3, 3)
    for lam in (0.0, 1.0, 5.0, 10.0):
        assert fh_transform(tiny, lam) == pytest.approx(1.0, abs=2e-5)


def test_transform_closed_form_oracle_n3(bump3):
    for lam in (0.0, 0.9, 2.6, 7.5):
        oracle = quad(lambda e: float(4 * math.pi * bump3.g(np.array([e]))[0]
                                      * math.sinh(e) ** 2 * closed3(lam, e)),
                      0.0, 1.0, epsabs=1e-14, epsrel=1e-13)[0]
        assert fh_transform(bump3, lam) == pytest.approx(oracle, abs=1e-10)


def test_round_trip_identity_n3(bump3):
    grid = np.linspace(0.05, 0.95, 10)
    rec = fh_inverse_grid(lambda lam: fh_transform(bump3, lam), grid, 3,
                          envelope=bump_transform_envelope(bump3), tail_tol=1e-9)
    assert float(np.max(np.abs(rec - bump3.g(grid)))) < 1e-8


def test_round_trip_identity_n2(bump2):
    grid = np.linspace(0.1, 0.9, 5)
    rec = fh_inverse_grid(lambda lam: fh_transform(bump2, lam), grid, 2,
                          envelope=bump_transform_envelope(bump2), tail_tol=1e-8)
    assert float(np.max(np.abs(rec - bump2.g(grid)))) < 1e-8


def test_inverse_decays_beyond_support(bump3):
    val = fh_inverse_grid(lambda lam: fh_transform(bump3, lam), np.array([2.5]), 3,
                          envelope=bump_transform_envelope(bump3), tail_tol=1e-8)[0]
    assert abs(val) < 1e-6


def test_truncation_failure_is_hard_error():
    with pytest.raises(TruncationError):
        fh_inverse_grid(lambda lam: 1.0, np.array([0.5]), 3)


def test_spectral_function_table(bump3):
    lams = np.linspace(0.0, 5.0, 21)
    tab = SpectralFunction(lams, np.array([fh_transform(bump3, l) for l in lams]), bump3.dim)
    assert tab.at(1.25) == pytest.approx(fh_transform(bump3, 1.25), abs=1e-3)
    with pytest.raises(ValueError):
        SpectralFunction(lams[::-1], np.zeros(21), bump3.dim)


# -- characteristic function and variance ---------------------------------------

def test_char2_normalization_and_bound(bump3):
    assert char2(bump3, 0.0) == 1.0
    vals = np.array([char2(bump3, l) for l in np.linspace(0.0, 10.0, 21)])
    assert float(np.max(np.abs(vals))) <= 1.0 + 1e-12


def test_char2_odd_derivatives_vanish(bump3):
    for h in (1e-2, 5e-3, 2.5e-3):
        d1 = (char2(bump3, h) - char2(bump3, -h)) / (2 * h)
        d3 = (char2(bump3, 2 * h) - 2 * char2(bump3, h)
              + 2 * char2(bump3, -h) - char2(bump3, -2 * h)) / (2 * h**3)
        assert abs(d1) < 1e-6
        assert abs(d3) < 1e-6


def test_variance_against_fd_oracle(bump3):
    v = variance_direct(bump3)
    d1 = -(char2(bump3, 1e-2) - 2.0 + char2(bump3, -1e-2)) / 1e-4
    d2 = -(char2(bump3, 5e-3) - 2.0 + char2(bump3, -5e-3)) / 2.5e-5
    richardson = d2 + (d2 - d1) / 3.0
    assert v == pytest.approx(richardson, rel=1e-6)


def test_variance_scaling_limit(bump3):
    target = second_moment(bump3) / 3.0
    ratios = [variance_direct(scale_profile(bump3, eps)) / eps**2
              for eps in (0.1, 0.05, 0.025)]
    gaps = [abs(r - target) for r in ratios]
    assert gaps[1] < 0.3 * gaps[0] and gaps[2] < 0.3 * gaps[1]  # O(eps^2)
    extrapolated = ratios[2] + (ratios[2] - ratios[1]) / 3.0
    assert extrapolated == pytest.approx(target, rel=1e-5)


def test_variance_vanishes_with_support():
    assert variance_direct(make_bump(1e-2, 3)) < 1e-4


# -- walk transform and density ---------------------------------------------------

def test_walk_transform_basics(bump3):
    assert walk_transform(bump3, 1, 1.3) == pytest.approx(fh_transform(bump3, 1.3),
                                                          rel=1e-12)
    for N in (1, 10, 100):
        v0 = walk_transform(bump3, N, 0.0)
        assert 0.0 < v0 <= 1.0
    with pytest.raises(ValueError):
        walk_transform(bump3, 0, 1.0)


def test_walk_characteristic_converges_to_gaussian(bump3):
    from hyperwalk import limit_time

    t = limit_time(bump3)
    for lam in (0.5, 1.0, 2.0):
        target = math.exp(-lam * lam * t / 2.0)
        errs = [abs(walk_transform(bump3, N, lam) / walk_transform(bump3, N, 0.0)
                    - target) for N in (100, 1000, 10000)]
        assert errs[2] < errs[1] < errs[0]
        assert errs[2] < 1e-6


def test_walk_density_reproduces_profile_at_n1(bump3):
    grid = np.linspace(0.05, 0.95, 8)
    vals = walk_density_grid(bump3, 1, grid,
                             envelope=bump_transform_envelope(bump3), tail_tol=1e-9)
    assert float(np.max(np.abs(vals - bump3.g(grid)))) < 1e-8


def test_walk_density_total_mass(bump3):
    from hyperwalk import sphere_area
    from hyperwalk.quadrature import cumulative_gl

    grid = np.linspace(0.0, 3.0, 301)
    dens_grid = walk_density_grid(bump3, 16, grid)
    from scipy.interpolate import CubicSpline
    dens = CubicSpline(grid, dens_grid)
    mass = cumulative_gl(
        lambda e: sphere_area(3) * dens(e) * np.sinh(e) ** 2, grid, q=8)[-1]
    assert mass == pytest.approx(1.0, abs=1e-6)


# -- space-side convolution -------------------------------------------------------

def test_convolution_near_identity(bump3):
    delta = make_bump(0.02, 3)
    etas = np.array([0.3, 0.6])
    approx = convolve_direct(bump3, delta, etas)
    assert float(np.max(np.abs(approx / bump3.g(etas) - 1.0))) < 5e-3


@pytest.mark.parametrize("n", [2, 3])
def test_convolution_commutativity(n):
    f = make_bump(1.0, n)
    g = make_bump(0.7, n)
    etas = np.linspace(0.05, 1.6, 9)
    assert float(np.max(np.abs(convolve_direct(f, g, etas)
                               - convolve_direct(g, f, etas)))) < 1e-8


@pytest.mark.parametrize("n", [2, 3])
def test_convolution_product_rule(n):
    f = make_bump(1.0, n)
    g = make_bump(0.7, n)
    conv = convolution_profile(f, g, points=301)
    for lam in (0.0, 0.8, 1.9, 3.4):
        lhs = fh_transform(conv, lam)
        rhs = fh_transform(f, lam) * fh_transform(g, lam)
        assert lhs == pytest.approx(rhs, rel=1e-6)


def test_variance_additivity(bump3):
    g = make_bump(0.7, 3)
    conv = convolution_profile(bump3, g, points=301)
    assert variance_direct(conv) == pytest.approx(
        variance_direct(bump3) + variance_direct(g), abs=1e-6)
