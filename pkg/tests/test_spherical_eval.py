import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial.transform import Rotation

from reslab.algebra_a2 import A2, SpectralParam
from reslab.spherical_eval import (
    BasePoint,
    SphericalQuadratureError,
    iwasawa_log,
    quadrature_for,
    spherical_phi,
)

Y = BasePoint.from_pair(0.4, -0.1)


def test_origin_is_one():
    assert abs(spherical_phi(SpectralParam(0.7j, 0.3j), BasePoint.origin()).value - 1) < 1e-10


def test_minus_rho_is_one():
    assert abs(quadrature_for(Y, 32).phi_coeffs(np.array([[-1.0, 0.0, 1.0]]))[0] - 1) < 1e-8


@given(st.floats(-1.5, 1.5), st.floats(-1.5, 1.5))
@settings(max_examples=15, deadline=None)
def test_weyl_invariance(a, b):
    lam = SpectralParam(1j * a, 1j * b)
    base = spherical_phi(lam, Y, 32).value
    for w in A2.weyl_elements:
        v = w @ lam.vec
        assert abs(spherical_phi(SpectralParam(v[0], v[1]), Y, 32).value - base) < 1e-8


def test_order_doubling():
    lam = SpectralParam(0.7j, 0.3j)
    assert abs(spherical_phi(lam, Y, 32).value - spherical_phi(lam, Y, 64).value) < 1e-9


def test_tempered_bound():
    for lam in (SpectralParam(2j, 0.5j), SpectralParam(0.1j, -1.3j)):
        assert abs(spherical_phi(lam, Y, 32).value) <= 1 + 1e-9


def test_monte_carlo_route():
    """Haar-random rotations with a numpy QR factorisation as an independent route."""
    rng = np.random.default_rng(11)
    ks = Rotation.random(200_000, random_state=rng).as_matrix()
    a = np.diag(np.exp(Y.h))
    _, r = np.linalg.qr(a @ ks)
    H = np.log(np.abs(np.diagonal(r, axis1=1, axis2=2)))
    lam = SpectralParam(0.7j, 0.3j)
    mu = lam.diag_coefficients()
    mc = np.mean(np.exp(H @ (mu - np.array([1.0, 0.0, -1.0]))))
    assert abs(mc - spherical_phi(lam, Y, 32).value) < 5e-3


def test_iwasawa_reconstructs():
    rng = np.random.default_rng(3)
    g = rng.normal(size=(3, 3))
    if np.linalg.det(g) < 0:
        g[:, 0] *= -1
    g /= np.cbrt(np.linalg.det(g))
    dec = iwasawa_log(g)
    assert np.allclose(dec.reconstruct(), g, atol=1e-12)


def test_tolerance_escalation():
    lam = SpectralParam(3j, 2j)
    with pytest.raises(SphericalQuadratureError):
        spherical_phi(lam, BasePoint.from_pair(2.0, -1.0), 8, tol=1e-15)


def test_base_point_validation():
    with pytest.raises(ValueError):
        BasePoint((1.0, 1.0, 1.0))
    assert BasePoint.from_pair(-0.1, 0.4).h == (0.4, -0.1, -0.30000000000000004)
