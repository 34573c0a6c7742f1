import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mongesol.errors import ConfigError
from mongesol.jets import jet_partial, poly_jet
from mongesol.nu_algebra import LPair, NuPair, eval_l, line_jets


def test_derived_constants_basic():
    nu = NuPair(1.0, 2.0)
    assert nu.delta == 1.0
    assert nu.box3 == 7.0
    assert nu.rho == pytest.approx(6.0 / 7.0)


def test_derived_constants_symmetric_pair():
    nu = NuPair(-1.0, 1.0)
    assert nu.delta == 2.0
    assert nu.box3 == 1.0
    assert nu.rho == 0.0


def test_box_n_geometric_sum():
    nu = NuPair(1.0, 2.0)
    assert nu.box_n(4) == pytest.approx(15.0)  # (16-1)/1 = 1+2+4+8
    assert nu.box_n(1) == 1.0
    assert nu.box_n(2) == nu.nu1 + nu.nu2
    assert nu.box_n(3) == nu.box3


def test_degenerate_pairs_rejected():
    with pytest.raises(ConfigError):
        NuPair(2.0, 2.0)
    with pytest.raises(ConfigError):
        NuPair(0.0, 1.0)


nu_value = st.floats(-3.0, 3.0).filter(lambda v: abs(v) > 0.05)


@given(nu_value, nu_value, st.integers(1, 8))
@settings(max_examples=60, deadline=None)
def test_box_identity_delta_times_box(nu1, nu2, n):
    if abs(nu1 - nu2) < 1e-3:
        return
    nu = NuPair(nu1, nu2)
    assert nu.delta * nu.box_n(n) == pytest.approx(nu2 ** n - nu1 ** n, rel=1e-12, abs=1e-12)


def test_line_jets_slopes():
    nu = NuPair(1.0, 2.0)
    d1j, d2j = line_jets(nu, 0.3, 0.7, 2, d1=0.1, d2=-0.2)
    assert d1j.value == pytest.approx(0.3 + 0.7 + 0.1)
    assert jet_partial(d1j, 1, 0) == 1.0 and jet_partial(d1j, 0, 1) == 1.0
    assert d2j.value == pytest.approx(0.3 + 1.4 - 0.2)
    assert jet_partial(d2j, 0, 1) == 2.0


def test_eval_l_identity_lines():
    # L1 = L2 = t, s = 0, k = 0 at (1, 1): ((x+2z) - (x+z)) / 1 = z
    nu = NuPair(1.0, 2.0)
    lp = LPair(l1=lambda t: t, l2=lambda t: t)
    val = eval_l(0, 0, lp, nu, 1.0, 1.0).value
    assert val == pytest.approx(1.0)


def test_eval_l_zero_functions():
    nu = NuPair(1.0, 2.0)
    zero = lambda t: t * 0.0
    lp = LPair(l1=zero, l2=zero)
    for s in (-1, 0, 2):
        for k in (0, 1, 2):
            assert np.max(np.abs(eval_l(s, k, lp, nu, 0.5, 0.5).c)) == 0.0


def _exp_pair():
    return LPair(
        l1=lambda t: __import__("mongesol.jets", fromlist=["jexp"]).jexp(t * 0.7),
        l2=lambda t: poly_jet((0.0, 1.0, 0.3, -0.1), t),
    )


def test_eval_l_derivative_shift_in_x():
    # d/dx of l(s, k) equals l(s, k+1)
    rng = np.random.default_rng(11)
    nu = NuPair(1.0, 2.0)
    lp = _exp_pair()
    x, z = rng.uniform(-1, 1, 10), rng.uniform(-1, 1, 10)
    for s in (-1, 0, 1, 3):
        for k in (0, 1):
            a = eval_l(s, k, lp, nu, x, z, m=2)
            b = eval_l(s, k + 1, lp, nu, x, z, m=2)
            assert np.max(np.abs(jet_partial(a, 1, 0) - b.value)) <= 1e-11


def test_eval_l_derivative_shift_in_z():
    # d/dz of l(s, k) equals l(s+1, k+1)
    rng = np.random.default_rng(12)
    nu = NuPair(0.5, -1.5)
    lp = _exp_pair()
    x, z = rng.uniform(-1, 1, 10), rng.uniform(-1, 1, 10)
    for s in (-1, 0, 2):
        a = eval_l(s, 0, lp, nu, x, z, m=2)
        b = eval_l(s + 1, 1, lp, nu, x, z, m=2)
        assert np.max(np.abs(jet_partial(a, 0, 1) - b.value)) <= 1e-11


def test_eval_l_linear_in_line_functions():
    nu = NuPair(1.0, 2.0)
    one = LPair(l1=lambda t: poly_jet((0.2, 1.0), t), l2=lambda t: poly_jet((0.0, 0.5, 0.1), t))
    two = LPair(l1=lambda t: poly_jet((1.0, -0.3), t), l2=lambda t: poly_jet((0.4, 0.0, 0.2), t))
    both = LPair(
        l1=lambda t: poly_jet((0.2, 1.0), t) + poly_jet((1.0, -0.3), t),
        l2=lambda t: poly_jet((0.0, 0.5, 0.1), t) + poly_jet((0.4, 0.0, 0.2), t),
    )
    a = eval_l(2, 1, one, nu, 0.4, -0.9)
    b = eval_l(2, 1, two, nu, 0.4, -0.9)
    c = eval_l(2, 1, both, nu, 0.4, -0.9)
    assert np.max(np.abs(c.c - (a.c + b.c))) <= 1e-13


def test_eval_l_negative_power_is_reciprocal():
    nu = NuPair(2.0, 4.0)
    lp = LPair(l1=lambda t: t, l2=lambda t: t)
    got = eval_l(-1, 0, lp, nu, 1.0, 1.0).value
    want = ((1.0 / 4.0) * 5.0 - (1.0 / 2.0) * 3.0) / 2.0
    assert got == pytest.approx(want)
