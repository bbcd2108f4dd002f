import math

import pytest

from hyperwalk import make_bump
from hyperwalk.spectral import fh_transform


@pytest.fixture(scope="session")
def bump3():
    return make_bump(1.0, 3)


@pytest.fixture(scope="session")
def bump2():
    return make_bump(1.0, 2)


def bump_transform_envelope(profile, safety=10.0):
    """Analytic decay certificate b*exp(-a*sqrt(lam)) fitted from two
    measured transform values; the smooth bump transform decays at that rate
    while its numerically computed values bottom out at the quadrature noise
    floor, so the certificate is what makes truncation well defined."""
    f1 = abs(fh_transform(profile, 100.0))
    f2 = abs(fh_transform(profile, 400.0))
    a = (math.log(f1) - math.log(f2)) / 10.0
    b = math.log(f1) + 10.0 * a
    return lambda lam: safety * math.exp(b - a * math.sqrt(max(lam, 1e-9)))
