import numpy as np
import pytest

from mongesol.errors import DomainError
from mongesol.families import canonical_config, make_family
from mongesol.functional_eq import (
    Quadruple,
    duality_transform,
    four_function_residual,
    ratio_form_residual,
    variable_slope_residual,
)
from mongesol.nu_algebra import NuPair


def _sample(bundle, rng, count):
    x_lo, x_hi, z_lo, z_hi = bundle.domain.rect
    xs, zs = [], []
    while len(xs) < count:
        x = rng.uniform(x_lo, x_hi, 4 * count)
        z = rng.uniform(z_lo, z_hi, 4 * count)
        ok = bundle.domain.mask(x, z)
        xs.extend(x[ok][: count - len(xs)])
        zs.extend(z[ok][: count - len(zs)])
    return np.array(xs), np.array(zs)


def _zero_quadruple(n=3):
    zero = lambda t: np.zeros(np.shape(np.asarray(t)))
    return Quadruple(sigma_x=zero, theta_z=zero, l1_prime=zero, l2_dot=zero,
                     nu=NuPair(1.0, 2.0), n=n)


def test_all_zero_quadruple_solves():
    q = _zero_quadruple()
    x = np.linspace(-2, 2, 11)
    z = np.linspace(-2, 2, 11)
    assert np.max(np.abs(four_function_residual(q, x, z))) == 0.0


def test_sigma_const_quadruple_solves_at_random_points():
    b = make_family(canonical_config("m3_sigma_const"))
    rng = np.random.default_rng(17)
    x, z = _sample(b, rng, 25)
    assert np.max(np.abs(four_function_residual(b.quadruple, x, z))) <= 1e-9


def test_perturbed_theta_breaks_the_constraint():
    b = make_family(canonical_config("m3_sigma_const"))
    q = b.quadruple
    bumped = Quadruple(
        sigma_x=q.sigma_x,
        theta_z=lambda z: q.theta_z(z) + 0.1,
        l1_prime=q.l1_prime,
        l2_dot=q.l2_dot,
        nu=q.nu,
        n=q.n,
    )
    rng = np.random.default_rng(18)
    x, z = _sample(b, rng, 25)
    assert np.max(np.abs(four_function_residual(bumped, x, z))) >= 1e-3


def test_residual_bilinear_in_line_derivatives_when_ends_vanish():
    nu = NuPair(1.0, 2.0)
    zero = lambda t: np.zeros(np.shape(np.asarray(t)))
    base = Quadruple(sigma_x=zero, theta_z=zero,
                     l1_prime=lambda t: np.cos(t) + 2, l2_dot=lambda t: t + 3, nu=nu)
    scaled = Quadruple(sigma_x=zero, theta_z=zero,
                       l1_prime=lambda t: 2.0 * (np.cos(t) + 2),
                       l2_dot=lambda t: 5.0 * (t + 3), nu=nu)
    x, z = np.linspace(0, 1, 9), np.linspace(0, 1, 9)
    r1 = four_function_residual(base, x, z)
    r2 = four_function_residual(scaled, x, z)
    assert np.allclose(r2, 10.0 * r1, rtol=1e-12, atol=1e-12)


def test_ratio_form_constant_example():
    nu = NuPair(1.0, 2.0)
    zero = lambda t: np.zeros(np.shape(np.asarray(t)))
    one = lambda t: np.ones(np.shape(np.asarray(t)))
    q = Quadruple(sigma_x=zero, theta_z=zero, l1_prime=one, l2_dot=one, nu=nu)
    # (0 + nu1^2)(1/nu2 - 0) - (0 + nu2^2)(1/nu1 - 0) = 1/2 - 4
    assert ratio_form_residual(q, 0.3, 0.4) == pytest.approx(-3.5)


def test_ratio_form_is_delta_times_product_form():
    nu = NuPair(1.0, 2.0)
    q = Quadruple(
        sigma_x=lambda x: np.sin(x) + 2.0,
        theta_z=lambda z: z ** 2 + 1.0,
        l1_prime=lambda t: np.cos(t) + 3.0,
        l2_dot=lambda t: t + 5.0,
        nu=nu,
    )
    rng = np.random.default_rng(7)
    x, z = rng.uniform(0.5, 2.0, 50), rng.uniform(0.5, 2.0, 50)
    r5 = four_function_residual(q, x, z)
    r6 = ratio_form_residual(q, x, z)
    assert np.max(np.abs(r6 - nu.delta * r5)) <= 1e-12 * np.max(np.abs(r6))


def test_ratio_form_solves_iff_product_form_solves():
    b = make_family(canonical_config("m3_l1_const"))
    rng = np.random.default_rng(8)
    x, z = _sample(b, rng, 50)
    assert np.max(np.abs(ratio_form_residual(b.quadruple, x, z))) <= 1e-9
    assert np.max(np.abs(four_function_residual(b.quadruple, x, z))) <= 1e-9


def test_ratio_form_denominator_guard():
    nu = NuPair(1.0, 2.0)
    zero = lambda t: np.zeros(np.shape(np.asarray(t)))
    q = Quadruple(sigma_x=zero, theta_z=zero, l1_prime=zero, l2_dot=zero, nu=nu)
    with pytest.raises(DomainError):
        ratio_form_residual(q, 0.0, 0.0)


def test_variable_slope_zero_solution():
    b = make_family(canonical_config("m3_general"))
    g = b.general_quadruple
    from dataclasses import replace

    zero = lambda t: np.zeros(np.shape(np.asarray(t)))
    g0 = replace(
        g,
        branch1=replace(g.branch1, cprime=zero),
        branch2=replace(g.branch2, cprime=zero),
        theta_z=zero,
        sigma_x=zero,
    )
    rng = np.random.default_rng(9)
    x, z = _sample(b, rng, 10)
    assert np.max(np.abs(variable_slope_residual(g0, x, z))) == 0.0


@pytest.mark.parametrize("tag", ["m3_hodograph_example", "m3_general", "m3_general_e0"])
def test_variable_slope_families_solve(tag):
    b = make_family(canonical_config(tag))
    rng = np.random.default_rng(10)
    x, z = _sample(b, rng, 40)
    assert np.max(np.abs(variable_slope_residual(b.general_quadruple, x, z))) <= 1e-9


def test_duality_constants_on_unit_quadruple():
    nu = NuPair(1.0, 2.0)
    one = lambda t: np.ones(np.shape(np.asarray(t)))
    q = Quadruple(sigma_x=one, theta_z=one, l1_prime=one, l2_dot=one, nu=nu)
    d = duality_transform(q, "symmetric")
    t = np.array([0.3])
    assert d.sigma_x(t)[0] == pytest.approx(7.0 / 16.0)
    assert d.theta_z(t)[0] == pytest.approx(7.0)
    assert d.l1_prime(t)[0] == pytest.approx(1.0)
    assert d.l2_dot(t)[0] == pytest.approx(0.25)


@pytest.mark.parametrize("variant", ["symmetric", "literal"])
def test_duality_is_an_involution(variant):
    b = make_family(canonical_config("m3_theta_const"))
    q = b.quadruple
    qq = duality_transform(duality_transform(q, variant), variant)
    rng = np.random.default_rng(20)
    x, z = _sample(b, rng, 20)
    t1 = x + q.nu.nu1 * z
    assert np.max(np.abs(qq.sigma_x(x) - q.sigma_x(x))) <= 1e-10
    assert np.max(np.abs(qq.theta_z(z) - q.theta_z(z))) <= 1e-10
    assert np.max(np.abs(qq.l1_prime(t1) - q.l1_prime(t1))) <= 1e-10


def test_duality_symmetric_preserves_solutions_literal_does_not():
    rng = np.random.default_rng(21)
    records = {}
    for tag in ("m3_sigma_const", "m3_l1_const", "m3_theta_const"):
        b = make_family(canonical_config(tag))
        x, z = _sample(b, rng, 30)
        for variant in ("symmetric", "literal"):
            r = np.max(np.abs(four_function_residual(
                duality_transform(b.quadruple, variant), x, z)))
            records[(tag, variant)] = r
        assert records[(tag, "symmetric")] <= 1e-8
        assert records[(tag, "literal")] >= 1e-3


def test_duality_zero_denominator_guard():
    nu = NuPair(1.0, 2.0)
    zero = lambda t: np.zeros(np.shape(np.asarray(t)))
    q = Quadruple(sigma_x=zero, theta_z=zero, l1_prime=zero, l2_dot=zero, nu=nu)
    d = duality_transform(q)
    with pytest.raises(DomainError):
        d.sigma_x(np.array([1.0]))


def test_one_argument_purity_of_constant_sigma_family():
    # theta_z assembled from the two auxiliary line functions loses all x
    # dependence; rebuild it from the raw ratio at two different x and compare
    b = make_family(canonical_config("m3_sigma_const"))
    nu = b.quadruple.nu
    a = b.params["A"]
    k = b.params["k"]
    atil = nu.rho * a
    p = nu.nu2 ** 3 - nu.nu1 ** 3

    def theta_from_uv(x, z):
        u = np.exp(k * (x + nu.nu1 * z)) - 1.0 / atil
        v = np.exp(k * (x + nu.nu2 * z)) - 1.0 / atil
        return (p + a * nu.nu1 * nu.nu2 * (nu.nu2 ** 2 * v - nu.nu1 ** 2 * u)) / (u - v)

    z = np.linspace(0.5, 1.5, 7)
    t1 = theta_from_uv(np.full_like(z, 1.0), z)
    t2 = theta_from_uv(np.full_like(z, 2.3), z)
    assert np.max(np.abs(t1 - t2)) <= 1e-12 * np.max(np.abs(t1))
    assert np.max(np.abs(t1 - b.quadruple.theta_z(z))) <= 1e-11 * np.max(np.abs(t1))
