import numpy as np
import pytest

from mongesol.errors import FoldError, MongesolError, QuadratureError
from mongesol.hodograph import (
    assemble_r_integral,
    factorization_check,
    implicit_jet,
    invert_hodograph,
    schrodinger_solve,
    solve_implicit,
)
from mongesol.jets import Jet2, jet_partial, jet_seed, poly_jet


# -- implicit scalar solve ----------------------------------------------------


def _const_zero(lj):
    return Jet2.constant(np.zeros(lj.shape), lj.m)


def test_solve_implicit_zero_rhs():
    lam = solve_implicit(_const_zero, 2.0, 1.0, seed=0.0)
    assert lam == pytest.approx(-2.0, abs=1e-12)


def test_solve_implicit_identity_rhs():
    lam = solve_implicit(lambda lj: lj, 1.0, 0.5, seed=0.0)
    assert lam == pytest.approx(2.0, abs=1e-12)


def test_solve_implicit_cubic_slope_equation():
    # branch of x + lam z = lam^3 satisfies lam_z = lam * lam_x (implicit jets)
    f = lambda lj: poly_jet((0.0, 0.0, 0.0, 1.0), lj)
    rng = np.random.default_rng(3)
    x = rng.uniform(1.0, 2.0, 25)
    z = rng.uniform(0.1, 0.5, 25)
    lam0 = solve_implicit(f, x, z, seed=np.full(25, 1.2))
    xj, zj = jet_seed(x, z, 1)
    lj = implicit_jet(f, xj, zj, lam0)
    resid = jet_partial(lj, 0, 1) - lj.value * jet_partial(lj, 1, 0)
    assert np.max(np.abs(resid)) <= 1e-8


def test_solve_implicit_fold_is_an_error():
    # x + lam z = lam^2/2 folds where z = lam; aim straight at it
    f = lambda lj: poly_jet((0.0, 0.0, 0.5), lj)
    with pytest.raises((FoldError, MongesolError)):
        solve_implicit(f, -0.5, 1.0, seed=1.0)  # root lam = z = 1 is the fold


# -- potential-map inversion --------------------------------------------------


def test_invert_quadratic_potential():
    r = lambda bj, cj: bj * bj * 0.5 + cj * cj * 0.5
    b, c = invert_hodograph(r, x=0.3, z=0.7, seed=(0.0, 0.0))
    assert b == pytest.approx(0.7, abs=1e-10)
    assert c == pytest.approx(0.3, abs=1e-10)


def test_invert_line_potential_matches_linear_resolution():
    # quadratic ridge functions on the slope lines reduce to a 2x2 linear system
    nu1, nu2 = 1.0, 2.0

    def r(bj, cj):
        u1 = bj - nu1 * cj
        u2 = bj - nu2 * cj
        return u1 * u1 * 0.5 + u2 * u2 * 0.5

    for x0, z0 in [(0.5, 0.8), (-0.2, 1.1), (1.5, -0.4)]:
        b, c = invert_hodograph(r, x0, z0, seed=(0.1, 0.1))
        want = (x0 + nu1 * z0) / (nu1 - nu2)  # b - nu2 c on this potential
        assert b - nu2 * c == pytest.approx(want, abs=1e-9)


def test_invert_derivative_relations_oracle():
    # implicit-function derivatives of the inverse map vs the closed formulas
    def r(bj, cj):
        return bj * bj * 0.5 + cj * cj * 0.5 + 0.2 * (bj * bj) * cj

    x0, z0 = 0.4, 0.9
    b0, c0 = invert_hodograph(r, x0, z0, seed=(0.5, 0.5))
    bj, cj = jet_seed(b0, c0, 2)
    rj = r(bj, cj)
    x_b, x_c = jet_partial(rj, 1, 1), jet_partial(rj, 0, 2)
    z_b, z_c = jet_partial(rj, 2, 0), jet_partial(rj, 1, 1)
    det = x_b * z_c - x_c * z_b

    h = 1e-5
    bp, _ = invert_hodograph(r, x0 + h, z0, seed=(b0, c0))
    bm, _ = invert_hodograph(r, x0 - h, z0, seed=(b0, c0))
    _, cp = invert_hodograph(r, x0 + h, z0, seed=(b0, c0))
    _, cm = invert_hodograph(r, x0 - h, z0, seed=(b0, c0))
    bzp, czp = invert_hodograph(r, x0, z0 + h, seed=(b0, c0))
    bzm, czm = invert_hodograph(r, x0, z0 - h, seed=(b0, c0))

    assert (bp - bm) / (2 * h) == pytest.approx(z_c / det, abs=1e-8)
    assert (cp - cm) / (2 * h) == pytest.approx(-z_b / det, abs=1e-8)
    assert (bzp - bzm) / (2 * h) == pytest.approx(-x_c / det, abs=1e-8)
    assert (czp - czm) / (2 * h) == pytest.approx(x_b / det, abs=1e-8)


def test_invert_singular_jacobian_is_a_fold_error():
    r = lambda bj, cj: bj * bj * 0.5  # no c-dependence anywhere
    with pytest.raises(FoldError):
        invert_hodograph(r, x=0.3, z=0.7, seed=(0.1, 0.1))


def test_factorization_check_values():
    assert factorization_check(3.0, -2.0, 1.0, 2.0) == (0.0, 0.0)
    assert factorization_check(0.0, 0.0, 1.0, 2.0) == (3.0, 2.0)


def test_factorization_through_slope_construction():
    # build (b, c, W) from slope-field integrals of one rational weight and
    # recover W_b, W_c by finite differences through the parametrization
    from mongesol.families import _Primitive

    a, al1, al2 = 1.0, 1.0, 2.0
    cprime = lambda sj: (poly_jet((al1, 0, 0, 1.0), sj)
                         * poly_jet((al2, 0, 0, 1.0), sj) * a).recip()
    prim = {
        (r, ref): _Primitive(lambda sj, r=r: sj * cprime(sj) if r == 1
                             else (cprime(sj) if r == 0 else sj * sj * cprime(sj)),
                             ref=ref)
        for r in (0, 1, 2) for ref in (0.6, 2.8)
    }

    def bc(n1, n2):
        return (prim[(1, 0.6)].value(n1) + prim[(1, 2.8)].value(n2),
                prim[(0, 0.6)].value(n1) + prim[(0, 2.8)].value(n2))

    def w(n1, n2):
        return prim[(2, 0.6)].value(n1) + prim[(2, 2.8)].value(n2)

    n1 = np.array([0.55, 0.60, 0.65])
    n2 = np.array([2.70, 2.80, 2.90])
    h = 1e-5
    b_n1, c_n1 = [(f(n1 + h, n2)[i] - f(n1 - h, n2)[i]) / (2 * h)
                  for f in (bc,) for i in (0, 1)]
    b_n2, c_n2 = [(bc(n1, n2 + h)[i] - bc(n1, n2 - h)[i]) / (2 * h) for i in (0, 1)]
    w_n1 = (w(n1 + h, n2) - w(n1 - h, n2)) / (2 * h)
    w_n2 = (w(n1, n2 + h) - w(n1, n2 - h)) / (2 * h)
    det = b_n1 * c_n2 - b_n2 * c_n1
    w_b = (w_n1 * c_n2 - w_n2 * c_n1) / det
    w_c = (b_n1 * w_n2 - b_n2 * w_n1) / det
    r1, r2 = factorization_check(w_b, w_c, n1, n2)
    assert np.max(np.abs(r1)) <= 1e-8
    assert np.max(np.abs(r2)) <= 1e-8


# -- separable modes ----------------------------------------------------------


def test_schrodinger_constant_positive_potential():
    sol = schrodinger_solve(lambda c: np.ones_like(np.asarray(c)), 1.0, (0.0, 1.0), steps=500)
    assert abs(sol.w1[-1] - np.cosh(1.0)) <= 1e-8
    assert abs(sol.w2[-1] - np.sinh(1.0)) <= 1e-8
    assert sol.wronskian_drift <= 1e-8


def test_schrodinger_constant_negative_potential():
    sol = schrodinger_solve(lambda c: -np.ones_like(np.asarray(c)), 1.0, (0.0, 1.0), steps=500)
    assert abs(sol.w1[-1] - np.cos(1.0)) <= 1e-8
    assert abs(sol.w2[-1] - np.sin(1.0)) <= 1e-8


def test_schrodinger_step_halving_self_convergence():
    a = schrodinger_solve(lambda c: np.asarray(c), 1.0, (0.0, 1.0), steps=1000)
    b = schrodinger_solve(lambda c: np.asarray(c), 1.0, (0.0, 1.0), steps=2000)
    assert abs(a.w1[-1] - b.w1[-1]) <= 1e-7
    assert abs(a.w2[-1] - b.w2[-1]) <= 1e-7


def test_schrodinger_rejects_few_steps_and_bad_profile():
    with pytest.raises(ValueError):
        schrodinger_solve(lambda c: np.asarray(c), 1.0, (0.0, 1.0), steps=10)
    with pytest.raises(MongesolError):
        schrodinger_solve(lambda c: np.full_like(np.asarray(c, dtype=float), np.nan),
                          1.0, (0.0, 1.0), steps=200)


def test_assemble_single_mode_is_exact():
    res = assemble_r_integral(
        lambda k: 1.0, lambda k: 0.0, [1.0],
        lambda c: np.ones_like(np.asarray(c)), (0.0, 1.0), (0.0, 1.0), nb=21, steps=2000,
    )
    # R = e^b cosh(c): check values and the equation residual
    bb, cc = np.meshgrid(res.b_grid, res.c_grid, indexing="ij")
    assert np.max(np.abs(res.r_values - np.exp(bb) * np.cosh(cc))) <= 1e-8
    assert res.residual_max <= 1e-10
    assert res.wronskian_drift <= 1e-8


def test_assemble_two_mode_superposition():
    res = assemble_r_integral(
        lambda k: 0.7, lambda k: 0.3, [0.8, 1.3],
        lambda c: np.ones_like(np.asarray(c)), (0.0, 1.0), (0.0, 1.0), nb=21, steps=2000,
    )
    assert res.residual_max <= 1e-8


def test_assemble_zero_weights():
    res = assemble_r_integral(
        lambda k: 0.0, lambda k: 0.0, [1.0],
        lambda c: np.ones_like(np.asarray(c)), (0.0, 1.0), (0.0, 1.0), nb=11, steps=500,
    )
    assert np.max(np.abs(res.r_values)) == 0.0
    assert res.residual_max == 0.0


def test_assemble_trapezoid_converged_weight():
    res = assemble_r_integral(
        lambda k: np.exp(-18 * (k - 1) ** 2), lambda k: 0.0,
        list(np.linspace(0.0, 2.0, 33)),
        lambda c: np.ones_like(np.asarray(c)), (0.0, 1.0), (0.0, 1.0),
        nb=15, steps=1000, mode="trapezoid",
    )
    assert res.node_doubling_change is not None and res.node_doubling_change <= 1e-6
    assert res.residual_max <= 1e-8


def test_assemble_trapezoid_nonconvergence_is_an_error():
    with pytest.raises(QuadratureError):
        assemble_r_integral(
            lambda k: np.exp(-3 * (k - 1) ** 2), lambda k: 0.0,
            list(np.linspace(0.5, 1.5, 9)),
            lambda c: np.ones_like(np.asarray(c)), (0.0, 1.0), (0.0, 1.0),
            nb=9, steps=600, mode="trapezoid",
        )
