import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperwalk import (BallPoint, BoundaryError, distance, geodesic_point, gyration,
                       mobius_add, mobius_neg, mobius_scalar, sturm_step, to_geodesic,
                       translate, translate_conformal_factor)

# coordinate box chosen so composed points stay away from the boundary,
# where conformal denominators would amplify roundoff past the 1e-12 gates
coord = st.floats(-0.45, 0.45, allow_nan=False)
triple = st.tuples(coord, coord, coord).map(lambda t: BallPoint(np.array(t)))


def pt(*xs):
    return BallPoint(np.array(xs, dtype=float))


def rand_points(rng, count, n, rmax=0.8):
    v = rng.standard_normal((count, n))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return rng.uniform(0, rmax, (count, 1)) * v


def test_add_identity_and_inverse():
    y = pt(0.2, -0.1, 0.4)
    zero = pt(0.0, 0.0, 0.0)
    assert np.allclose(mobius_add(zero, y).coords, y.coords, atol=0)
    assert np.all(mobius_add(mobius_neg(y), y).coords == 0.0)


def test_add_collinear_matches_scalar_velocity_sum():
    out = mobius_add(pt(0.5, 0.0), pt(0.3, 0.0))
    assert out.coords[0] == pytest.approx(0.8 / 1.15, rel=1e-15)
    assert out.coords[1] == 0.0


def test_neg_trivia():
    assert np.all(mobius_neg(pt(0.0, 0.0)).coords == 0.0)
    assert np.allclose(mobius_neg(pt(0.0, 0.3)).coords, [0.0, -0.3])


def test_right_inverse_numeric():
    rng = np.random.default_rng(11)
    for row in rand_points(rng, 200, 3):
        x = BallPoint(row)
        assert np.linalg.norm(mobius_add(x, mobius_neg(x)).coords) < 1e-15


def test_scalar_trivia():
    z = pt(0.2, 0.1, -0.3)
    assert np.allclose(mobius_scalar(1.0, z).coords, z.coords, atol=1e-16)
    assert np.all(mobius_scalar(0.0, z).coords == 0.0)
    assert np.all(mobius_scalar(2.0, pt(0.0, 0.0)).coords == 0.0)
    out = mobius_scalar(2.0, pt(0.5, 0.0))
    assert out.coords[0] == pytest.approx(0.8, abs=1e-15)


@settings(deadline=None, max_examples=60)
@given(triple, triple, triple)
def test_gyration_is_norm_preserving(a, b, c):
    assert abs(gyration(a, b, c).norm - c.norm) < 1e-12


@settings(deadline=None, max_examples=60)
@given(triple, triple)
def test_gyro_commutativity(a, b):
    ab = mobius_add(a, b)
    ba = mobius_add(b, a)
    assert np.linalg.norm(gyration(a, b, ba).coords - ab.coords) < 1e-12


def test_gyration_fixes_origin():
    a, b = pt(0.4, 0.1, 0.0), pt(-0.2, 0.3, 0.1)
    assert np.all(gyration(a, b, pt(0.0, 0.0, 0.0)).coords == 0.0)


def test_translate_trivia_and_identity():
    a, x = pt(0.3, -0.2), pt(0.1, 0.5)
    assert np.all(translate(a, a).coords == 0.0)
    assert np.allclose(translate(pt(0.0, 0.0), x).coords, x.coords, atol=0)
    t = translate(a, x)
    lhs = 1.0 - t.norm**2
    rhs = ((1 - a.norm**2) * (1 - x.norm**2)
           / (1 - 2 * float(np.dot(x.coords, a.coords)) + (x.norm * a.norm) ** 2))
    assert lhs == pytest.approx(rhs, abs=1e-12)
    back = translate(mobius_neg(a), t)
    assert np.allclose(back.coords, x.coords, atol=1e-15)


def test_conformal_factor_properties():
    a, x = pt(0.25, 0.3, -0.1), pt(-0.4, 0.05, 0.2)
    assert translate_conformal_factor(pt(0.0, 0.0, 0.0), x) == 1.0
    assert translate_conformal_factor(a, pt(0.0, 0.0, 0.0)) == pytest.approx(
        1.0 - a.norm**2, abs=1e-15)
    t = translate(a, x)
    factor = translate_conformal_factor(a, x)
    assert factor / (1.0 - t.norm**2) == pytest.approx(1.0 / (1.0 - x.norm**2), abs=1e-12)


def test_radial_symmetry_of_translation():
    rng = np.random.default_rng(5)
    pts = rand_points(rng, 100, 4)
    for i in range(0, 100, 2):
        a, x = BallPoint(pts[i]), BallPoint(pts[i + 1])
        assert translate(a, x).norm == pytest.approx(translate(x, a).norm, abs=1e-12)


def test_orthogonal_equivariance():
    rng = np.random.default_rng(23)
    n = 5
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    pts = rand_points(rng, 60, n)
    for i in range(0, 60, 2):
        a, b = pts[i], pts[i + 1]
        lhs = q @ mobius_add(BallPoint(q.T @ a), BallPoint(b)).coords
        rhs = mobius_add(BallPoint(a), BallPoint(q @ b)).coords
        assert np.linalg.norm(lhs - rhs) < 1e-12


def test_scalar_associativity_on_a_line():
    rng = np.random.default_rng(3)
    for row in rand_points(rng, 50, 3):
        x = BallPoint(row)
        lam, mu = rng.uniform(-2, 2, 2)
        lhs = mobius_add(mobius_scalar(lam, x), mobius_scalar(mu, x))
        rhs = mobius_scalar(lam + mu, x)
        assert np.linalg.norm(lhs.coords - rhs.coords) < 1e-12


def test_distributivity_fails():
    a, b = pt(0.5, 0.2, 0.0), pt(-0.1, 0.6, 0.3)
    lhs = mobius_scalar(0.5, mobius_add(a, b))
    rhs = mobius_add(mobius_scalar(0.5, a), mobius_scalar(0.5, b))
    assert np.linalg.norm(lhs.coords - rhs.coords) > 1e-3


def test_geodesic_point_endpoints_and_param():
    a, b = pt(0.3, -0.1, 0.2), pt(0.2, 0.4, -0.3)
    assert np.allclose(geodesic_point(a, b, 0.0).coords, a.coords, atol=1e-16)
    assert np.allclose(geodesic_point(a, b, 1.0).coords, mobius_add(a, b).coords, atol=1e-15)
    with pytest.raises(ValueError):
        geodesic_point(a, b, 1.5)


def test_radial_geodesic_is_linear_in_eta():
    b = pt(0.0, 0.7, 0.0)
    eta_b = to_geodesic(b).eta
    for t in (0.25, 0.5, 0.75):
        x = mobius_scalar(t, b)
        assert to_geodesic(x).eta == pytest.approx(t * eta_b, rel=1e-13)


def test_sturm_step_cases():
    s, z = pt(0.2, 0.3, -0.1), pt(-0.4, 0.1, 0.2)
    assert np.allclose(sturm_step(s, z, 1).coords, z.coords, atol=1e-15)
    out = sturm_step(pt(0.0, 0.0, 0.0), z, 4)
    assert np.allclose(out.coords, mobius_scalar(0.25, z).coords, atol=1e-16)
    with pytest.raises(ValueError):
        sturm_step(s, z, 0)
    # the step lands on the geodesic toward z at parameter 1/k
    stepped = sturm_step(s, z, 3)
    assert distance(s, stepped) == pytest.approx(distance(s, z) / 3.0, rel=1e-12)
    disp = mobius_add(mobius_neg(s), z)
    assert np.allclose(stepped.coords, geodesic_point(s, disp, 1.0 / 3.0).coords, atol=1e-15)


def test_boundary_guard_raises():
    a = pt(0.999998, 0.0)
    with pytest.raises(BoundaryError):
        mobius_scalar(40.0, a)
