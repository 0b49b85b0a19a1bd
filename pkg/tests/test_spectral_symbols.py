import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracle_values import S_AT_RESONANCE
from reslab.algebra_a2 import SpectralParam, polar_param
from reslab.spectral_symbols import (
    XI,
    GammaPoleError,
    PoleProximityError,
    SymbolValidationError,
    gamma_X,
    integrand_F,
    integrand_F_closed,
    is_reducible,
    make_gaussian_symbol,
    make_spherical_symbol,
    minus_three_psi_phi_phi,
    phi_zu,
    plancherel_density,
    plancherel_density_polar,
    psi,
    sum_psi_phi,
    symbol_from_config,
    th_pi,
    validate_symbol,
)
from reslab.spherical_eval import BasePoint

zs = st.complex_numbers(max_magnitude=1.5, allow_nan=False, allow_infinity=False).filter(
    lambda z: abs(z.imag) < 0.3 and abs(z) > 0.05)
ws = st.tuples(st.floats(0.8, 1.25), st.floats(0, 2 * math.pi)).map(lambda p: p[0] * complex(math.cos(p[1]), math.sin(p[1])))


@given(zs, ws)
@settings(max_examples=60)
def test_minus_three_identity(gauss_z, w):
    S = make_gaussian_symbol(1.0, ((1.0, 0, 0), (0.5, 1, 0)))
    try:
        a = sum_psi_phi(S, gauss_z, w)
        b = minus_three_psi_phi_phi(S, gauss_z, w)
    except PoleProximityError:
        return
    assert abs(a - b) <= 1e-9 * max(abs(b), 1e-30)


@given(zs, ws)
@settings(max_examples=60)
def test_integrand_assembly(z, w):
    S = make_gaussian_symbol(0.7, ((1.0, 0, 0), (0.2, 0, 1)))
    try:
        a, b = integrand_F(S, z, w), integrand_F_closed(S, z, w)
    except PoleProximityError:
        return
    assert abs(a - b) <= 1e-10 * max(abs(b), 1e-30)


@given(zs, ws)
@settings(max_examples=60)
def test_symbol_even_and_rotation(z, w):
    S = make_gaussian_symbol(1.0, ((1.0, 0, 0), (0.5, 1, 0)))
    s0 = S.evaluate(z, w)
    assert abs(S.evaluate(-z, w) - s0) <= 1e-12 * max(abs(s0), 1e-300)
    p0 = psi(S, z, w)
    assert abs(psi(S, z, w / XI) - p0 / XI**2) <= 1e-10 * max(abs(p0), 1e-300)


def test_gaussian_symbol_matches_h_form(gauss):
    for z, w in ((0.7 + 0.1j, 1.0), (1.1 - 0.2j, complex(math.cos(0.4), math.sin(0.4)))):
        x1, x2 = polar_param(z, w)
        assert abs(gauss.evaluate(z, w) - gauss.h(complex(x1), complex(x2))) < 1e-13


def test_symbol_at_resonance_oracle(gauss):
    for n, ref in S_AT_RESONANCE.items():
        assert abs(gauss.evaluate(1j * (n + 0.5), 1.0) - ref) / abs(ref) < 1e-12


def test_plancherel_and_gamma_dual_forms():
    for z, w in ((0.7, complex(0.6, 0.8)), (1.3 + 0.1j, complex(math.cos(1.0), math.sin(1.0)))):
        x1, x2 = polar_param(z, w)
        lam = SpectralParam(complex(x1), complex(x2))
        assert abs(plancherel_density(lam) - plancherel_density_polar(z, w)) <= 1e-12 * abs(plancherel_density(lam))
    lam = SpectralParam(0.3 + 0.1j, -0.2)
    g, c = gamma_X(lam, "gamma"), gamma_X(lam, "cos")
    assert abs(g - c) / abs(c) < 1e-12
    assert abs(gamma_X(SpectralParam(0, 0)) - 8 * math.pi**6) < 1e-8


def test_gamma_pole_and_reducible():
    from reslab.algebra_a2 import ALPHA_12, root_coordinate
    # lambda_12 = 1/2 puts cos(pi lambda_12) at a zero
    a = root_coordinate(SpectralParam(1, 0), ALPHA_12)
    lam = SpectralParam(0.5 / a, 0)
    assert is_reducible(lam)
    with pytest.raises(GammaPoleError):
        gamma_X(lam)


def test_th_pi_guard():
    with pytest.raises(PoleProximityError):
        th_pi(0.5j)
    assert abs(th_pi(0.3) - math.tanh(math.pi * 0.3)) < 1e-15
    assert abs(th_pi(1j) ) < 1e-15


def test_phi_zu_zero_at_integer():
    # z c(w) = i gives th(pi i) = 0
    assert abs(phi_zu(1j, 1.0, 1.0)) < 1e-15


def test_validate_symbol_gate(gauss):
    rep = validate_symbol(gauss)
    assert rep["even_z"] < 1e-12

    class Odd:
        def evaluate(self, z, w):
            return np.asarray(z, dtype=complex) * np.ones_like(np.asarray(w, dtype=complex))

    with pytest.raises(SymbolValidationError):
        validate_symbol(Odd())


def test_config_roundtrip(gauss):
    again = symbol_from_config(gauss.to_config())
    assert again.evaluate(0.4 + 0.1j, 1j) == gauss.evaluate(0.4 + 0.1j, 1j)
    with pytest.raises(ValueError):
        symbol_from_config({"family": "nope"})


def test_spherical_symbol_structure(gauss):
    S = make_spherical_symbol(gauss, BasePoint.from_pair(0.4, -0.1), order=16)
    validate_symbol(S, tol=1e-8)
    z, w = 0.6 + 0.05j, complex(math.cos(0.3), math.sin(0.3))
    assert abs(sum_psi_phi(S, z, w) - minus_three_psi_phi_phi(S, z, w)) < 1e-9 * abs(minus_three_psi_phi_phi(S, z, w))
