import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mongesol.errors import BranchCutError
from mongesol.jets import (
    Jet2,
    compose_series,
    jet_partial,
    jet_seed,
    jexp,
    jlog,
    jpow,
    jsqrt,
    poly_jet,
)


def test_seed_coordinate_jets():
    xj, zj = jet_seed(2.0, 3.0, 2)
    assert xj.c[0, 0] == 2.0 and xj.c[1, 0] == 1.0 and xj.c[0, 1] == 0.0
    assert zj.c[0, 0] == 3.0 and zj.c[0, 1] == 1.0 and zj.c[1, 0] == 0.0


def test_seed_origin_minimal_order():
    xj, zj = jet_seed(0.0, 0.0, 1)
    assert xj.value == 0.0 and zj.value == 0.0
    assert xj.c[1, 0] == 1.0 and zj.c[0, 1] == 1.0
    with pytest.raises(ValueError):
        jet_seed(0.0, 0.0, 0)


def test_seed_sum_linearity():
    xj, zj = jet_seed(1.0, 1.0, 3)
    s = xj + zj
    assert s.c[0, 0] == 2.0 and s.c[1, 0] == 1.0 and s.c[0, 1] == 1.0


def test_mul_product_of_coordinates():
    xj, zj = jet_seed(2.0, 3.0, 2)
    p = xj * zj
    assert p.c[0, 0] == 6.0 and p.c[1, 0] == 3.0 and p.c[0, 1] == 2.0 and p.c[1, 1] == 1.0


def test_mul_identity():
    xj, zj = jet_seed(1.5, -0.5, 3)
    one = Jet2.constant(1.0, 3)
    a = (xj + 2.0 * zj) * (xj * zj + 0.25)
    b = a * one
    assert np.allclose(a.c, b.c, rtol=0, atol=0)


def test_mul_square_binomial():
    xj, _ = jet_seed(1.0, 0.0, 3)
    sq = xj * xj
    assert sq.c[0, 0] == 1.0 and sq.c[1, 0] == 2.0 and sq.c[2, 0] == 1.0


def test_mul_order_mismatch():
    a, _ = jet_seed(0.0, 0.0, 2)
    b, _ = jet_seed(0.0, 0.0, 3)
    with pytest.raises(ValueError):
        a * b


def test_compose_exp_series():
    xj, _ = jet_seed(0.0, 0.0, 2)
    e = jexp(xj)
    assert abs(e.c[0, 0] - 1.0) == 0 and abs(e.c[1, 0] - 1.0) == 0
    assert abs(e.c[2, 0] - 0.5) == 0


def test_compose_identity_series():
    xj, zj = jet_seed(0.7, -0.3, 3)
    a = xj * zj + 2.0
    ident = [a.value, np.ones_like(a.value)] + [np.zeros_like(a.value)] * 2
    b = compose_series(ident, a)
    assert np.allclose(a.c, b.c, atol=1e-15)


def test_log_exp_roundtrip():
    xj, _ = jet_seed(0.4, 0.0, 4)
    r = jlog(jexp(xj))
    assert np.max(np.abs(r.c - xj.c)) <= 1e-12


def test_compose_associativity_on_safe_domain():
    # g(h(a)) == (g o h)(a) for exp/log chains
    xj, zj = jet_seed(1.3, 0.2, 3)
    a = xj + 0.5 * zj
    lhs = jexp(jlog(a) * 0.5)
    rhs = jsqrt(a)
    assert np.max(np.abs(lhs.c - rhs.c)) <= 1e-12


def test_partial_extraction():
    xj, _ = jet_seed(1.0, 0.0, 3)
    sq = xj * xj
    assert jet_partial(sq, 2, 0) == 2.0
    assert jet_partial(sq, 0, 0) == sq.value
    with pytest.raises(ValueError):
        jet_partial(sq, 2, 2)


def test_partial_mixed_quadratic_field():
    # U = (x+z)^2 + (x-z)^2 has U_xx = U_zz = 4 everywhere
    for x0, z0 in [(0.0, 0.0), (1.3, -2.2), (5.0, 7.0)]:
        xj, zj = jet_seed(x0, z0, 2)
        u = (xj + zj) * (xj + zj) + (xj - zj) * (xj - zj)
        assert jet_partial(u, 2, 0) == pytest.approx(4.0, abs=1e-13)
        assert jet_partial(u, 0, 2) == pytest.approx(4.0, abs=1e-13)


def test_partial_commutes_with_linear_combinations():
    xj, zj = jet_seed(0.3, 0.9, 3)
    a = jexp(xj * 0.5) * zj
    b = poly_jet((1.0, 2.0, 0.5), xj + zj)
    lin = 2.0 * a - 3.0 * b
    for i, j in [(1, 0), (0, 1), (1, 1), (2, 1)]:
        want = 2.0 * jet_partial(a, i, j) - 3.0 * jet_partial(b, i, j)
        assert jet_partial(lin, i, j) == pytest.approx(want, rel=1e-13, abs=1e-13)


coeff = st.integers(min_value=-4, max_value=4)


@given(
    st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3), coeff), min_size=1, max_size=5),
    st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3), coeff), min_size=1, max_size=5),
)
@settings(max_examples=40, deadline=None)
def test_mul_matches_exact_convolution(terms_p, terms_q):
    # oracle: integer-coefficient polynomial product, convolved exactly in python
    m = 4
    p = np.zeros((m + 1, m + 1))
    q = np.zeros((m + 1, m + 1))
    for i, j, c in terms_p:
        if i + j <= m:
            p[i, j] += c
    for i, j, c in terms_q:
        if i + j <= m:
            q[i, j] += c
    exact = {}
    for i in range(m + 1):
        for j in range(m + 1 - i):
            for r in range(m + 1):
                for s in range(m + 1 - r):
                    if i + j + r + s <= m:
                        exact[(i + r, j + s)] = exact.get((i + r, j + s), 0) + int(p[i, j]) * int(q[r, s])
    prod = Jet2(m, p[..., None] * np.ones(1)) * Jet2(m, q[..., None] * np.ones(1))
    for (i, j), v in exact.items():
        got = prod.c[i, j][0]
        assert got == pytest.approx(v, rel=1e-13, abs=1e-13)


@given(st.floats(0.2, 3.0), st.floats(-2.0, 2.0))
@settings(max_examples=30, deadline=None)
def test_partial_against_finite_differences(x0, z0):
    def field(x, z):
        xj, zj = jet_seed(x, z, 2)
        return jexp(xj * 0.3) * poly_jet((1.0, 0.5, 0.2), zj) + jlog(xj + 3.0)

    h = 1e-4
    f = field(x0, z0)
    fx = (field(x0 + h, z0).value - field(x0 - h, z0).value) / (2 * h)
    fz = (field(x0, z0 + h).value - field(x0, z0 - h).value) / (2 * h)
    assert jet_partial(f, 1, 0) == pytest.approx(fx, rel=1e-5, abs=1e-8)
    assert jet_partial(f, 0, 1) == pytest.approx(fz, rel=1e-5, abs=1e-8)


def test_log_branch_cut_is_an_error():
    xj, _ = jet_seed(-1.0, 0.0, 2)
    with pytest.raises(BranchCutError):
        jlog(xj)
    with pytest.raises(BranchCutError):
        jpow(xj, 0.5)
    # integer powers of negative centers are fine
    assert jpow(xj, 2).value == 1.0
    assert jpow(xj, -1).value == -1.0


def test_recip_of_zero_errors():
    xj, _ = jet_seed(0.0, 0.0, 2)
    with pytest.raises(ZeroDivisionError):
        xj.recip()


def test_array_payload_broadcasting():
    x = np.linspace(0.5, 2.0, 7)
    z = np.linspace(-1.0, 1.0, 7)
    xj, zj = jet_seed(x, z, 2)
    f = jexp(xj) * zj + jsqrt(xj)
    assert f.value.shape == (7,)
    single = jexp(jet_seed(x[3], z[3], 2)[0]) * jet_seed(x[3], z[3], 2)[1] + jsqrt(
        jet_seed(x[3], z[3], 2)[0]
    )
    assert f.value[3] == pytest.approx(single.value, rel=1e-15)
