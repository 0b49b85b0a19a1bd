import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from reslab.algebra_a2 import (
    A2,
    ALL_ROOTS,
    POSITIVE_ROOTS,
    RHO,
    RHO_X,
    RHO_X_SQ,
    WEYL_ORDER,
    SpectralParam,
    inner,
    polar_param,
    root_coordinate,
    weyl_orbit,
)

finite = st.floats(-3, 3, allow_nan=False)


def test_constants():
    assert RHO_X_SQ == 12.0
    assert math.isclose(RHO_X, 2 * math.sqrt(3))
    assert WEYL_ORDER == 6 == len(A2.weyl_elements)
    assert len(ALL_ROOTS) == 6


def test_rho_norm():
    assert abs(inner(RHO, RHO) - RHO_X_SQ) < 1e-12


def test_weyl_group_preserves_roots():
    roots = {tuple(np.round(a.vec, 12)) for a in ALL_ROOTS}
    for w in A2.weyl_elements:
        assert {tuple(np.round(w @ np.array(a.vec), 12)) for a in ALL_ROOTS} == roots


def test_rho_root_coordinates():
    assert [round(root_coordinate(RHO, a).real, 12) for a in POSITIVE_ROOTS] == [0.5, 0.5, 1.0]


@given(finite, finite)
def test_orbit_preserves_inner_product(a, b):
    lam = SpectralParam(a, b)
    n0 = inner(lam, lam)
    for mu in weyl_orbit(lam):
        assert abs(inner(mu, mu) - n0) < 1e-9 * max(1.0, abs(n0))


@given(st.floats(0.05, 3), st.floats(0, 2 * math.pi))
@settings(max_examples=50)
def test_polar_param_on_circle(r, th):
    x1, x2 = polar_param(r, complex(math.cos(th), math.sin(th)))
    assert abs(complex(x1) + 1j * complex(x2) - r * complex(math.cos(th), math.sin(th))) < 1e-12
