"""Catalog of explicit solution families of the degree-n equation.

Each family is built as a :class:`FieldBundle`: point-evaluable jets of the
derivative chain ``a0 .. a{n-1}``, the top field ``W`` and the bottom field
``f`` (an alias of ``a0``), together with the family's derivative quadruple
or its variable-slope equivalent, the tagged closed-form W-f relation, and a
safe domain with explicit predicates.

Ground truth is the derivative level: every family stores closed forms for
the derivative functions, and the antiderivatives used for ``f`` and ``W``
were re-derived to match them exactly (the verifier cross-checks this by
quadrature).  Mutated bundles, used to prove the checks have teeth, rescale
one constituent function together with its antiderivative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError, ConvergenceError, DomainError, FoldError
from .functional_eq import GeneralQuadruple, Quadruple, SlopeBranch
from .hodograph import implicit_jet, solve_implicit
from .jets import (
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
from .nu_algebra import NuPair

__all__ = [
    "SafeDomain",
    "FieldBundle",
    "TrivialConfig",
    "M1ImplicitConfig",
    "DegenerateConfig",
    "SigmaConstConfig",
    "L1ConstConfig",
    "ThetaConstConfig",
    "HodographExampleConfig",
    "GeneralNuConfig",
    "GeneralNuE0Config",
    "NThetaConstConfig",
    "make_family",
    "family_from_dict",
    "family_to_dict",
    "canonical_config",
    "trivial_random_symmetric",
    "FAMILY_TAGS",
]

JetFunc = Callable[[Jet2], Jet2]
EPS = 1e-6  # margin required of every log/denominator predicate


# ---------------------------------------------------------------------------
# safe domains
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SafeDomain:
    """Rectangle plus exclusion predicates.

    A predicate maps point arrays to a margin; a point is admissible when
    every margin is positive.  Evaluating a bundle outside the admissible
    set raises, it never returns silent non-finite values.
    """

    rect: tuple[float, float, float, float]
    predicates: tuple[tuple[str, Callable[[np.ndarray, np.ndarray], np.ndarray]], ...] = ()

    def mask(self, x, z) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        z = np.asarray(z, dtype=float)
        ok = np.ones(np.broadcast_shapes(x.shape, z.shape), dtype=bool)
        for _, pred in self.predicates:
            ok &= np.asarray(pred(x, z)) > 0
        return ok

    def require(self, x, z):
        x = np.asarray(x, dtype=float)
        z = np.asarray(z, dtype=float)
        for name, pred in self.predicates:
            margin = np.asarray(pred(x, z))
            if np.any(margin <= 0):
                raise DomainError(
                    f"point outside safe domain: predicate {name!r} violated at "
                    f"{int(np.count_nonzero(margin <= 0))} point(s)"
                )


# ---------------------------------------------------------------------------
# field bundles
# ---------------------------------------------------------------------------


@dataclass
class FieldBundle:
    """One configured family, evaluable everywhere on its safe domain."""

    family: str
    n: int
    params: dict
    domain: SafeDomain
    wf_relation: str | None
    mutation_slots: tuple[str, ...]
    fields_fn: Callable[[np.ndarray, np.ndarray, int], dict]
    quadruple: Quadruple | None = None
    general_quadruple: GeneralQuadruple | None = None
    wf_residual: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None
    derivative_forms: Callable[[np.ndarray, np.ndarray], dict] | None = None
    wprime_fn: Callable[[np.ndarray, np.ndarray, dict], np.ndarray] | None = None
    w_value_fn: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray] | None = None
    config: object = None
    mutations: dict = field(default_factory=dict)

    def eval_fields(self, x, z, m: int = 2) -> dict:
        """Jets of a0..a{n-1}, W, f at the points; errors off-domain."""
        if m < 2:
            raise ValueError("eval_fields needs jet order m >= 2")
        self.domain.require(x, z)
        return self.fields_fn(np.asarray(x, dtype=float), np.asarray(z, dtype=float), m)

    def eval_quadruple(self, x, z):
        """Values (sigma_x, theta_z, L1', L2-dot) at the points."""
        if self.quadruple is None:
            raise ConfigError(f"family {self.family!r} does not define a derivative quadruple")
        self.domain.require(x, z)
        q = self.quadruple
        xx, zz, t1, t2 = q.args(x, z)
        return q.sigma_x(xx), q.theta_z(zz), q.l1_prime(t1), q.l2_dot(t2)

    def with_mutation(self, name: str, factor: float) -> "FieldBundle":
        if name not in self.mutation_slots:
            raise ConfigError(
                f"family {self.family!r} has no derivative function {name!r}; "
                f"choose from {self.mutation_slots}"
            )
        merged = dict(self.mutations)
        merged[name] = merged.get(name, 1.0) * float(factor)
        return make_family(self.config, mutations=merged)

    def w_of_f(self, tvals, x_near, z_near):
        """The implied univariate map f -> W, evaluated at ``tvals``.

        Families with an explicit top function use it; otherwise the value is
        looked up by sliding along x at fixed z until the bottom field
        matches, which is valid precisely because W and f are functionally
        dependent.
        """
        tvals = np.asarray(tvals)
        if self.w_value_fn is not None:
            return self.w_value_fn(tvals, np.asarray(x_near), np.asarray(z_near))
        x = np.array(np.broadcast_to(np.asarray(x_near, dtype=float), tvals.shape), copy=True)
        z = np.broadcast_to(np.asarray(z_near, dtype=float), tvals.shape)
        scale = np.maximum(np.max(np.abs(tvals)), 1.0)
        for _ in range(40):
            fj = self.fields_fn(x, z, 2)
            err = fj["f"].value - tvals
            if np.max(np.abs(err)) <= 1e-12 * scale:
                break
            fx = jet_partial(fj["f"], 1, 0)
            if np.any(np.abs(fx) < 1e-14):
                raise ConvergenceError("w_of_f: flat bottom field along the slice")
            x = x - (err / fx).real if not np.iscomplexobj(x) else x - err / fx
        else:
            raise ConvergenceError("w_of_f: slice inversion did not converge")
        return self.fields_fn(x, z, 2)["W"].value


# ---------------------------------------------------------------------------
# small building blocks
# ---------------------------------------------------------------------------


def _poly_fn(coeffs: Sequence) -> JetFunc:
    coeffs = tuple(coeffs)
    return lambda tj: poly_jet(coeffs, tj)


def _poly_deriv(coeffs: Sequence, order: int = 1) -> tuple:
    out = list(coeffs)
    for _ in range(order):
        out = [k * ck for k, ck in enumerate(out)][1:]
    return tuple(out)


_GAUSS_X, _GAUSS_W = np.polynomial.legendre.leggauss(48)


class _Primitive:
    """Antiderivative of a jet-evaluable integrand, anchored at ``ref``.

    Values come from fixed Gauss-Legendre quadrature (the integrand is smooth
    on every safe domain); jet coefficients integrate the integrand's own jet,
    so all derivatives are exact.
    """

    def __init__(self, integrand: JetFunc, ref: float):
        self.integrand = integrand
        self.ref = float(ref)

    def value(self, t):
        t = np.asarray(t, dtype=float)
        half = (t - self.ref) / 2.0
        mid = (t + self.ref) / 2.0
        nodes = mid[..., None] + half[..., None] * _GAUSS_X  # (..., 48)
        tj, _ = jet_seed(nodes, 0.0, 1)
        vals = self.integrand(tj).value
        return np.sum(vals * _GAUSS_W, axis=-1) * half

    def __call__(self, a: Jet2) -> Jet2:
        base = self.value(a.value)
        if a.m == 0:
            return Jet2.constant(base, 0)
        gj = self.integrand(_reseed(a.value, a.m - 1))
        tk = [base] + [gj.c[k, 0] / (k + 1) for k in range(a.m)]
        return compose_series(tk, a)


def _reseed(values, m):
    tj, _ = jet_seed(values, 0.0, m)
    return tj


def _uni(f: JetFunc, values, m: int) -> Jet2:
    """Univariate jet of f at the given centers."""
    return f(_reseed(values, m))


def _uni_value(f: JetFunc, values):
    return _uni(f, values, 1).value


def _scaled(f: JetFunc, s: float) -> JetFunc:
    if s == 1.0:
        return f
    return lambda tj: f(tj) * s


def _scaled_arr(f, s: float):
    if s == 1.0:
        return f
    return lambda t: s * np.asarray(f(t))


# ---------------------------------------------------------------------------
# configs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TrivialConfig:
    """Superposition over the n-th roots of unity; the top map is identity."""

    n: int
    terms: tuple  # ((lam, coeffs), ...) with complex lam, polynomial coeffs
    rect: tuple = (-0.8, 0.8, -0.8, 0.8)
    tag = "trivial"

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError("trivial family needs degree n >= 1")
        if not self.terms:
            raise ConfigError("trivial family needs at least one term")
        for lam, _ in self.terms:
            if abs(complex(lam) ** self.n - 1.0) > 1e-9:
                raise ConfigError(f"term slope {lam!r} is not an n-th root of unity")


@dataclass(frozen=True)
class M1ImplicitConfig:
    """Degree-1 family from the classical implicit slope solution."""

    f_coeffs: tuple
    seed_lambda: float = 1.0
    rect: tuple = (1.0, 2.0, 0.1, 0.5)
    tag = "m1_implicit"


@dataclass(frozen=True)
class DegenerateConfig:
    """Degree-2 family where all chain fields ride one implicit scalar."""

    c_coeffs: tuple          # the bottom map C (inverse of the top map)
    g_coeffs: tuple          # right-hand side of the implicit equation
    seed_a: float = 1.0
    rect: tuple = (2.0, 4.0, 0.1, 0.6)
    tag = "degenerate"

    def __post_init__(self):
        if len(self.c_coeffs) < 2:
            raise ConfigError("degenerate family: C must be non-constant")


@dataclass(frozen=True)
class SigmaConstConfig:
    """Degree-3 family with constant sigma_x = A."""

    nu: tuple
    A: float = 1.0
    k: float = 1.0
    d1: float = 0.0
    d2: float = 0.0
    rect: tuple = (0.5, 2.5, 0.4, 2.0)
    tag = "m3_sigma_const"


@dataclass(frozen=True)
class L1ConstConfig:
    """Degree-3 family with constant first line derivative L1' = D."""

    nu: tuple
    D: float = 1.0
    k: float = 1.0
    dtilde_mode: str = "nu1_plus_nu2"  # or "nu2": the alternative reading
    rect: tuple = (1.6, 3.0, 0.30, 0.70)
    tag = "m3_l1_const"


@dataclass(frozen=True)
class ThetaConstConfig:
    """Degree-3 family with constant theta_z = E."""

    nu: tuple
    E: float = 1.0
    k: float = 1.0
    rect: tuple = (0.8, 1.8, 0.8, 1.8)
    tag = "m3_theta_const"


@dataclass(frozen=True)
class HodographExampleConfig:
    """Degree-3 family with one constant slope and slope field -x/z."""

    k: float = 1.0
    alpha: float = 1.0
    beta: float = 2.0
    rect: tuple = (-3.0, -1.0, 0.5, 2.0)
    tag = "m3_hodograph_example"


@dataclass(frozen=True)
class GeneralNuConfig:
    """Degree-3 family with both slopes variable (square line maps)."""

    g: float = -1.0
    rect: tuple = (2.2, 4.0, 0.2, 0.8)
    tag = "m3_general"

    def __post_init__(self):
        if self.g == 0:
            raise ConfigError("m3_general requires g != 0")


@dataclass(frozen=True)
class GeneralNuE0Config:
    """Degree-3 family with both slopes variable and vanishing theta_z."""

    a: float = 1.0
    alpha1: float = 1.0
    alpha2: float = 2.0
    c: float | None = None
    rect: tuple = (-2.5, -1.5, 3.4, 5.0)
    tag = "m3_general_e0"

    def __post_init__(self):
        if self.a <= 0:
            raise ConfigError("m3_general_e0 requires a > 0 on the real branch")
        if self.alpha1 == self.alpha2:
            raise ConfigError("m3_general_e0 requires alpha1 != alpha2")
        if self.alpha1 <= 0 or self.alpha2 <= 0:
            raise ConfigError("m3_general_e0 requires positive alpha1, alpha2")
        if self.c is not None:
            want = self.a * self.alpha1 * self.alpha2
            if abs(self.c - want) > 1e-12 * max(1.0, abs(want)):
                raise ConfigError(
                    f"m3_general_e0: c must equal a*alpha1*alpha2 = {want!r} (got {self.c!r})"
                )


@dataclass(frozen=True)
class NThetaConstConfig:
    """Degree-n generalisation of the constant-theta_z family."""

    n: int
    nu: tuple
    E: float = 1.0
    k: float = 0.1
    c: float = 1.0
    cbar: float = 1.0
    rect: tuple = (0.5, 1.5, 0.5, 1.5)
    tag = "mn_theta_const"

    def __post_init__(self):
        if self.n < 2:
            raise ConfigError("mn_theta_const needs degree n >= 2")
        if self.c == 0 or self.cbar == 0:
            raise ConfigError("mn_theta_const needs nonzero mode amplitudes c, cbar")


FAMILY_TAGS = (
    "trivial",
    "m1_implicit",
    "degenerate",
    "m3_sigma_const",
    "m3_l1_const",
    "m3_theta_const",
    "m3_hodograph_example",
    "m3_general",
    "m3_general_e0",
    "mn_theta_const",
)


# ---------------------------------------------------------------------------
# builders: polynomial-chain families
# ---------------------------------------------------------------------------


def _build_trivial(cfg: TrivialConfig, scales) -> FieldBundle:
    n = cfg.n
    s0 = scales.get("a0", 1.0)
    terms = [(complex(lam), tuple(map(complex, coeffs))) for lam, coeffs in cfg.terms]
    dn = [(lam, _poly_deriv(coeffs, n)) for lam, coeffs in terms]

    def fields(x, z, m):
        xj, zj = jet_seed(x, z, m)
        parts = [(lam, poly_jet(coeffs, xj + lam * zj)) for lam, coeffs in dn]
        out = {}
        for j in range(n):
            acc = parts[0][1] * (parts[0][0] ** (n - j))
            for lam, pj in parts[1:]:
                acc = acc + pj * (lam ** (n - j))
            if j == 0 and s0 != 1.0:
                acc = acc * s0
            out[f"a{j}"] = acc
        w = parts[0][1]
        for _, pj in parts[1:]:
            w = w + pj
        out["W"] = w
        out["f"] = out["a0"]
        return out

    return FieldBundle(
        family=cfg.tag,
        n=n,
        params={"n": n, "terms": len(terms)},
        domain=SafeDomain(rect=tuple(cfg.rect)),
        wf_relation="identity",
        mutation_slots=("a0",),
        fields_fn=fields,
        wf_residual=lambda w, f: w - f,
        wprime_fn=lambda x, z, fl: np.ones_like(np.asarray(fl["a0"].value).real),
        w_value_fn=lambda t, x, z: t,
        config=cfg,
        mutations=dict(scales),
    )


def trivial_random_symmetric(n: int, degree: int, rng: np.random.Generator,
                             rect=(-0.8, 0.8, -0.8, 0.8)) -> TrivialConfig:
    """Random polynomial weights, conjugate-paired so every field is real."""

    def coeffs():
        return rng.uniform(-0.5, 0.5, degree + 1)

    terms = []
    for j in range(n):
        lam = complex(np.exp(2j * math.pi * j / n))
        if abs(lam.imag) < 1e-14:
            terms.append((complex(round(lam.real)), tuple(coeffs())))
    conj_pairs = [j for j in range(1, (n + 1) // 2) if 2 * j != n]
    for j in conj_pairs:
        lam = np.exp(2j * math.pi * j / n)
        c = coeffs() + 1j * coeffs()
        terms.append((complex(lam), tuple(c)))
        terms.append((complex(np.conj(lam)), tuple(np.conj(c))))
    return TrivialConfig(n=n, terms=tuple(terms), rect=rect)


def _build_m1(cfg: M1ImplicitConfig, scales) -> FieldBundle:
    s0 = scales.get("a0", 1.0)
    f_fn = _poly_fn(cfg.f_coeffs)
    fp = _poly_deriv(cfg.f_coeffs)

    def lam_values(x, z):
        return solve_implicit(f_fn, x, z, np.broadcast_to(cfg.seed_lambda, np.shape(x)))

    def fields(x, z, m):
        xj, zj = jet_seed(x, z, m)
        lam0 = lam_values(x, z)
        lamj = implicit_jet(f_fn, xj, zj, lam0)
        # log|.|: a valid antiderivative of 1/t on either half-line
        w = jlog(lamj * np.sign(lam0))
        out = {"a0": lamj * s0 if s0 != 1.0 else lamj, "W": w}
        out["f"] = out["a0"]
        return out

    def pred_nonzero(x, z):
        return np.abs(lam_values(x, z)) - EPS

    def pred_fold(x, z):
        lam = lam_values(x, z)
        return np.abs(np.asarray(z, dtype=float) - np.polyval(fp[::-1], lam)) - 1e-8

    return FieldBundle(
        family=cfg.tag,
        n=1,
        params={"f_coeffs": list(cfg.f_coeffs), "seed_lambda": cfg.seed_lambda},
        domain=SafeDomain(
            rect=tuple(cfg.rect),
            predicates=(("slope_nonzero", pred_nonzero), ("fold_margin", pred_fold)),
        ),
        wf_relation=None,
        mutation_slots=("a0",),
        fields_fn=fields,
        wprime_fn=lambda x, z, fl: 1.0 / fl["a0"].value,
        w_value_fn=lambda t, x, z: np.log(np.abs(t)),
        config=cfg,
        mutations=dict(scales),
    )


def _build_degenerate(cfg: DegenerateConfig, scales) -> FieldBundle:
    s1 = scales.get("a1", 1.0)
    c_fn = _poly_fn(cfg.c_coeffs)
    cp = _poly_deriv(cfg.c_coeffs)
    g_fn = _poly_fn(cfg.g_coeffs)
    slope = lambda aj: jsqrt(poly_jet(cp, aj))        # C_a^{1/2}
    b_fn = _Primitive(slope, ref=cfg.seed_a)          # B with B' = C_a^{1/2}

    def solve_a(x, z):
        x = np.asarray(x, dtype=float)
        z = np.asarray(z, dtype=float)
        a = np.broadcast_to(float(cfg.seed_a), np.broadcast_shapes(x.shape, z.shape)).copy()
        for _ in range(60):
            sj = _uni(slope, a, 1)
            gj = _uni(g_fn, a, 1)
            r = x + sj.value * z - gj.value
            if np.max(np.abs(r)) <= 1e-12 * max(1.0, float(np.max(np.abs(gj.value)))):
                der = jet_partial(gj, 1, 0) - jet_partial(sj, 1, 0) * z
                if np.any(np.abs(der) < 1e-8):
                    raise FoldError("degenerate family: fold point G'(a) - z*(C_a^1/2)'(a) ~ 0")
                return a
            der = jet_partial(gj, 1, 0) - jet_partial(sj, 1, 0) * z
            if np.any(np.abs(der) < 1e-8):
                raise FoldError("degenerate family: fold point during solve")
            a = a + r / der
        raise ConvergenceError("degenerate family: implicit solve did not converge")

    def a_jet(x, z, m):
        a0 = solve_a(x, z)
        xj, zj = jet_seed(x, z, m)
        aj = Jet2.constant(a0, m)
        for _ in range(max(1, m.bit_length() + 1)):
            sj = _compose_uni(slope, aj)
            gj = _compose_uni(g_fn, aj)
            sp = _compose_uni(slope, aj, 1)
            gp = _compose_uni(g_fn, aj, 1)
            aj = aj - (xj + sj * zj - gj) / (sp * zj - gp)
        return aj

    def fields(x, z, m):
        aj = a_jet(x, z, m)
        a1 = b_fn(aj)
        out = {
            "a0": _compose_uni(c_fn, aj),
            "a1": a1 * s1 if s1 != 1.0 else a1,
            "W": aj,
        }
        out["f"] = out["a0"]
        return out

    def pred_cprime(x, z):
        return np.polyval(cp[::-1], solve_a(x, z)) - EPS

    def wprime(x, z, fl):
        return 1.0 / np.polyval(cp[::-1], fl["W"].value)

    def w_value(t, x, z):
        # invert C at t, seeded by the already-solved scalar at the same point
        y = solve_a(x, z)
        for _ in range(60):
            r = np.polyval(tuple(cfg.c_coeffs)[::-1], y) - t
            if np.max(np.abs(r)) <= 1e-12 * max(1.0, float(np.max(np.abs(t)))):
                return y
            y = y - r / np.polyval(cp[::-1], y)
        raise ConvergenceError("degenerate family: inversion of the bottom map stalled")

    return FieldBundle(
        family=cfg.tag,
        n=2,
        params={"c_coeffs": list(cfg.c_coeffs), "g_coeffs": list(cfg.g_coeffs)},
        domain=SafeDomain(rect=tuple(cfg.rect), predicates=(("cprime_positive", pred_cprime),)),
        wf_relation=None,
        mutation_slots=("a1",),
        fields_fn=fields,
        wprime_fn=wprime,
        w_value_fn=w_value,
        config=cfg,
        mutations=dict(scales),
    )


def _compose_uni(f: JetFunc, a: Jet2, derivative: int = 0) -> Jet2:
    """Univariate function of a Jet2-valued argument."""
    fj = _uni(f, a.value, a.m + derivative)
    for _ in range(derivative):
        fj = fj.dx()
    tk = [fj.c[k, 0] for k in range(a.m + 1)]
    return compose_series(tk, a)


# ---------------------------------------------------------------------------
# builders: constant-slope line families
# ---------------------------------------------------------------------------


def _line_fields(nu: NuPair, n: int, l1: JetFunc, l2: JetFunc, theta: JetFunc,
                 sigma: JetFunc, d1: float, d2: float):
    inv = 1.0 / nu.delta

    def fields(x, z, m):
        xj, zj = jet_seed(x, z, m)
        l1j = l1(xj + nu.nu1 * zj + d1)
        l2j = l2(xj + nu.nu2 * zj + d2)
        out = {}
        for j in range(n):
            s = n - 1 - j
            lj = (nu.nu2 ** s * l2j - nu.nu1 ** s * l1j) * inv
            if j == 0:
                lj = lj + theta(zj)
            out[f"a{j}"] = lj
        out["W"] = (l2j * (1.0 / nu.nu2) - l1j * (1.0 / nu.nu1)) * inv + sigma(xj)
        out["f"] = out["a0"]
        return out

    return fields


def _line_derivative_forms(q: Quadruple):
    nu1, nu2, delta, n = q.nu.nu1, q.nu.nu2, q.nu.delta, q.n

    def forms(x, z):
        xx, zz, t1, t2 = q.args(x, z)
        p = q.l1_prime(t1)
        qd = q.l2_dot(t2)
        l = lambda s: (nu2 ** s * qd - nu1 ** s * p) / delta
        return {
            "f_x": l(n - 1),
            "f_z": l(n) + q.theta_z(zz),
            "W_x": l(-1) + q.sigma_x(xx),
            "W_z": l(0),
        }

    return forms


def _line_bundle(cfg, nu, n, l1, l2, theta, sigma, quad, wf_tag, wf_res, domain, scales,
                 params) -> FieldBundle:
    sl1, sl2 = scales.get("l1", 1.0), scales.get("l2", 1.0)
    sth, ssg = scales.get("theta", 1.0), scales.get("sigma", 1.0)
    quad = Quadruple(
        sigma_x=_scaled_arr(quad.sigma_x, ssg),
        theta_z=_scaled_arr(quad.theta_z, sth),
        l1_prime=_scaled_arr(quad.l1_prime, sl1),
        l2_dot=_scaled_arr(quad.l2_dot, sl2),
        nu=quad.nu,
        n=quad.n,
        d1=quad.d1,
        d2=quad.d2,
    )
    return FieldBundle(
        family=cfg.tag,
        n=n,
        params=params,
        domain=domain,
        wf_relation=wf_tag,
        mutation_slots=("sigma", "theta", "l1", "l2"),
        fields_fn=_line_fields(nu, n, _scaled(l1, sl1), _scaled(l2, sl2),
                               _scaled(theta, sth), _scaled(sigma, ssg),
                               quad.d1, quad.d2),
        quadruple=quad,
        wf_residual=wf_res,
        derivative_forms=_line_derivative_forms(quad),
        config=cfg,
        mutations=dict(scales),
    )


def _build_sigma_const(cfg: SigmaConstConfig, scales) -> FieldBundle:
    nu = NuPair(*cfg.nu)
    nu1, nu2, delta, box = nu.nu1, nu.nu2, nu.delta, nu.box3
    a, k, d1, d2 = float(cfg.A), float(cfg.k), float(cfg.d1), float(cfg.d2)
    if a == 0 or k == 0:
        raise ConfigError("m3_sigma_const requires nonzero A and k")
    atil = nu.rho * a
    if not (np.isreal(atil) and atil.real > 0):
        raise ConfigError("m3_sigma_const real branch requires rho*A > 0")
    atil = float(np.real(atil))
    # phase offsets act as a rigid translation of the plane
    z0 = (d2 - d1) / delta
    x0 = d1 - nu1 * z0

    zc = 0.5 * (cfg.rect[2] + cfg.rect[3]) + z0
    s_theta = 1.0 if (math.exp(k * nu1 * zc) - math.exp(k * nu2 * zc)) > 0 else -1.0

    def l_fn(nu_own, nu_other):
        lin = a * nu1 * nu2

        def f(tj):
            return lin * tj + (nu_own * atil / k) * jlog(1.0 - jexp(tj * (-k)) * (1.0 / atil))

        return f

    def theta(zj):
        w = zj + z0
        e1, e2 = jexp(w * (k * nu1)), jexp(w * (k * nu2))
        return (a * nu1 ** 2 * nu2 ** 2) * w - (atil * box / k) * jlog((e1 - e2) * s_theta)

    def sigma(xj):
        return (xj + x0) * a

    def theta_z(z):
        w = np.asarray(z, dtype=float) + z0
        e1, e2 = np.exp(k * nu1 * w), np.exp(k * nu2 * w)
        return a * nu1 * nu2 * (nu2 ** 2 * e2 - nu1 ** 2 * e1) / (e1 - e2)

    def lprime(nu_own, nu_other):
        def f(t):
            return nu_own * (1.0 / (np.exp(k * np.asarray(t, dtype=float)) - 1.0 / atil)
                             + nu_other * a)

        return f

    quad = Quadruple(
        sigma_x=lambda x: np.full(np.shape(np.asarray(x)), a),
        theta_z=theta_z,
        l1_prime=lprime(nu1, nu2),
        l2_dot=lprime(nu2, nu1),
        nu=nu,
        d1=d1,
        d2=d2,
    )

    cube = nu2 ** 3 - nu1 ** 3
    s_rel = -s_theta

    def wf_res(w, f):
        om = (delta * k / atil) * w
        arg = s_rel * atil * (1.0 - np.exp(-om))
        if np.any(np.real(arg) <= 0):
            raise DomainError("sigma-const relation: log argument not positive")
        return (delta * k / atil) * f + cube * np.log(arg) - nu1 ** 3 * om

    def pred_line(nu_i, d_i):
        return lambda x, z: 1.0 - np.exp(-k * (x + nu_i * z + d_i)) / atil - EPS

    def pred_theta(x, z):
        w = np.asarray(z, dtype=float) + z0
        return s_theta * (np.exp(k * nu1 * w) - np.exp(k * nu2 * w)) - EPS

    domain = SafeDomain(
        rect=tuple(cfg.rect),
        predicates=(
            ("line1_log_arg", pred_line(nu1, d1)),
            ("line2_log_arg", pred_line(nu2, d2)),
            ("theta_log_arg", pred_theta),
        ),
    )
    return _line_bundle(cfg, nu, 3, l_fn(nu1, nu2), l_fn(nu2, nu1), theta, sigma, quad,
                        "sigma_const", wf_res, domain, scales,
                        params={"nu": list(cfg.nu), "A": a, "k": k, "d1": d1, "d2": d2})


def _build_l1_const(cfg: L1ConstConfig, scales) -> FieldBundle:
    nu = NuPair(*cfg.nu)
    nu1, nu2, delta, box = nu.nu1, nu.nu2, nu.delta, nu.box3
    d, k = float(cfg.D), float(cfg.k)
    if d == 0 or k == 0:
        raise ConfigError("m3_l1_const requires nonzero D and k")
    if cfg.dtilde_mode == "nu1_plus_nu2":
        dtil = d * (nu1 + nu2)
    elif cfg.dtilde_mode == "nu2":
        dtil = d * nu2
    else:
        raise ConfigError(f"unknown dtilde_mode {cfg.dtilde_mode!r}")
    if dtil == 0:
        raise ConfigError("m3_l1_const: the combined constant D~ vanishes")

    def l1(tj):
        return tj * d

    def l2(tj):
        return tj * d + (d * (nu2 ** 2 - nu1 ** 2) / (k * nu2 ** 2)) * jlog(
            1.0 - nu2 ** 3 * jexp(tj * (-k))
        )

    def theta(zj):
        return (-d * box) * zj - (dtil / k) * jlog(jexp(zj * (-k * nu2)) - 1.0 / (nu2 * dtil))

    def sigma(xj):
        return (d * box / (nu1 * nu2 ** 3)) * xj - (dtil / (k * nu2 ** 3)) * jlog(
            jexp(xj * k) - nu2 ** 2 / dtil
        )

    quad = Quadruple(
        sigma_x=lambda x: d / (nu1 * nu2)
        - (1.0 / nu2) / (np.exp(k * np.asarray(x, dtype=float)) - nu2 ** 2 / dtil),
        theta_z=lambda z: 1.0 / (np.exp(-k * nu2 * np.asarray(z, dtype=float)) - 1.0 / (nu2 * dtil))
        - nu1 ** 2 * d,
        l1_prime=lambda t: np.full(np.shape(np.asarray(t)), d),
        l2_dot=lambda t: d
        * (1.0 - nu1 ** 2 * nu2 * np.exp(-k * np.asarray(t, dtype=float)))
        / (1.0 - nu2 ** 3 * np.exp(-k * np.asarray(t, dtype=float))),
        nu=nu,
    )

    def wf_res(w, f):
        return np.exp(-k * nu2 ** 3 * w / dtil) - nu2 ** 3 * np.exp(-k * f / dtil) - 1.0

    domain = SafeDomain(
        rect=tuple(cfg.rect),
        predicates=(
            ("sigma_log_arg", lambda x, z: np.exp(k * x) - nu2 ** 2 / dtil - EPS),
            ("theta_log_arg", lambda x, z: np.exp(-k * nu2 * z) - 1.0 / (nu2 * dtil) - EPS),
            ("line2_log_arg", lambda x, z: 1.0 - nu2 ** 3 * np.exp(-k * (x + nu2 * z)) - EPS),
            ("chain_log_arg", lambda x, z: np.exp(k * x) - nu2 ** 3 * np.exp(-k * nu2 * z) - EPS),
        ),
    )
    return _line_bundle(cfg, nu, 3, l1, l2, theta, sigma, quad, "l1_const", wf_res, domain,
                        scales, params={"nu": list(cfg.nu), "D": d, "k": k,
                                        "dtilde_mode": cfg.dtilde_mode})


def _build_theta_const(cfg: ThetaConstConfig, scales) -> FieldBundle:
    nu = NuPair(*cfg.nu)
    nu1, nu2, delta, box, rho = nu.nu1, nu.nu2, nu.delta, nu.box3, nu.rho
    e, k = float(cfg.E), float(cfg.k)
    if e == 0 or k == 0:
        raise ConfigError("m3_theta_const requires nonzero E and k")
    erho = e * rho
    if not (np.isreal(erho) and erho.real > 0):
        raise ConfigError("m3_theta_const real branch requires E*rho > 0")
    erho = float(np.real(erho))
    gam = 1.0 / erho

    def l_fn(nu_i):
        def f(tj):
            return (-e / box) * tj - (e * rho / (k * nu_i ** 2)) * jlog(
                jexp(tj * (k / nu_i)) + gam * nu_i
            )

        return f

    def theta(zj):
        return zj * e

    def sigma(xj):
        return (e / (nu1 ** 2 * nu2 ** 2)) * xj - (e * (nu1 + nu2) / (k * nu1 ** 2 * nu2 ** 2)) * jlog(
            jexp(xj * (k / nu1)) * nu2 - jexp(xj * (k / nu2)) * nu1
        )

    def lprime(nu_i):
        def f(t):
            t = np.asarray(t, dtype=float)
            return (1.0 / (np.exp((k / nu_i) * t) + gam * nu_i) - e) / nu_i ** 2

        return f

    def sigma_x(x):
        x = np.asarray(x, dtype=float)
        u, v = np.exp((k / nu1) * x), np.exp((k / nu2) * x)
        return e * (v / nu2 ** 3 - u / nu1 ** 3) / (nu2 * u - nu1 * v)

    quad = Quadruple(
        sigma_x=sigma_x,
        theta_z=lambda z: np.full(np.shape(np.asarray(z)), e),
        l1_prime=lprime(nu1),
        l2_dot=lprime(nu2),
        nu=nu,
    )

    inv_cube = 1.0 / nu2 ** 3 - 1.0 / nu1 ** 3

    def wf_res(w, f):
        phi = (-k * delta / erho) * f
        psi = (-k * delta / erho) * w
        arg = (1.0 - np.exp(-phi)) * erho
        if np.any(np.real(arg) <= 0):
            raise DomainError("theta-const relation: log argument not positive")
        return psi - phi / nu1 ** 3 + inv_cube * np.log(arg)

    def pred_sigma(x, z):
        return nu2 * np.exp((k / nu1) * x) - nu1 * np.exp((k / nu2) * x) - EPS

    def pred_u(x, z):
        return np.exp((k / nu1) * (x + nu1 * z)) + gam * nu1 - EPS

    def pred_v(x, z):
        return np.exp((k / nu2) * (x + nu2 * z)) + gam * nu2 - EPS

    def pred_slope_split(x, z):
        u = np.exp((k / nu1) * (x + nu1 * z)) + gam * nu1
        v = np.exp((k / nu2) * (x + nu2 * z)) + gam * nu2
        return np.abs(u - v) - 1e-3

    domain = SafeDomain(
        rect=tuple(cfg.rect),
        predicates=(
            ("sigma_log_arg", pred_sigma),
            ("line1_log_arg", pred_u),
            ("line2_log_arg", pred_v),
            ("bottom_gradient", pred_slope_split),
        ),
    )
    return _line_bundle(cfg, nu, 3, l_fn(nu1), l_fn(nu2), theta, sigma, quad, "theta_const",
                        wf_res, domain, scales,
                        params={"nu": list(cfg.nu), "E": e, "k": k})


def _build_n_theta_const(cfg: NThetaConstConfig, scales) -> FieldBundle:
    nu = NuPair(*cfg.nu)
    nu1, nu2 = nu.nu1, nu.nu2
    n, e, k, cc, cb = cfg.n, float(cfg.E), float(cfg.k), float(cfg.c), float(cfg.cbar)
    if e == 0 or k == 0:
        raise ConfigError("mn_theta_const requires nonzero E and k")
    bn, bn1, bn2 = nu.box_n(n), nu.box_n(n - 1), nu.box_n(n - 2)
    if bn == 0 or bn1 == 0:
        raise ConfigError("mn_theta_const: degenerate slope bracket (box_n vanishes)")
    p1, p2 = k * nu2 * bn1, k * nu1 * bn1

    xc = 0.5 * (cfg.rect[0] + cfg.rect[1])
    zc = 0.5 * (cfg.rect[2] + cfg.rect[3])
    dc1, dc2 = xc + nu1 * zc, xc + nu2 * zc
    arg1_ref = bn - nu1 ** n * nu2 * bn1 * cc * math.exp(p1 * dc1)
    arg2_ref = bn - nu2 ** n * nu1 * bn1 * cb * math.exp(p2 * dc2)
    args_ref = nu1 ** (n - 1) * cc * math.exp(p1 * xc) - nu2 ** (n - 1) * cb * math.exp(p2 * xc)
    s1, s2, ss = (1.0 if v > 0 else -1.0 for v in (arg1_ref, arg2_ref, args_ref))

    g1 = (1.0 / bn - nu1 ** (1 - n)) / p1
    g2 = (1.0 / bn - nu2 ** (1 - n)) / p2

    def l1(tj):
        return ((-1.0 / bn) * tj + g1 * jlog((bn - nu1 ** n * nu2 * bn1 * cc * jexp(tj * p1)) * s1)) * e

    def l2(tj):
        return ((-1.0 / bn) * tj + g2 * jlog((bn - nu2 ** n * nu1 * bn1 * cb * jexp(tj * p2)) * s2)) * e

    def theta(zj):
        return zj * e

    def sigma(xj):
        return ((bn2 / (nu1 * nu2) ** (n - 1)) * xj
                - (1.0 / (k * (nu1 * nu2) ** n)) * jlog(
                    (jexp(xj * p1) * (nu1 ** (n - 1) * cc) - jexp(xj * p2) * (nu2 ** (n - 1) * cb)) * ss
                )) * e

    def l1_prime(t):
        t = np.asarray(t, dtype=float)
        ept = np.exp(p1 * t)
        return e * (-1.0 / (nu1 * nu2 * bn1) + cc * ept) / (bn / (nu1 * nu2 * bn1) - nu1 ** (n - 1) * cc * ept)

    def l2_dot(t):
        t = np.asarray(t, dtype=float)
        ept = np.exp(p2 * t)
        return e * (-1.0 / (nu1 * nu2 * bn1) + cb * ept) / (bn / (nu1 * nu2 * bn1) - nu2 ** (n - 1) * cb * ept)

    def sigma_x(x):
        x = np.asarray(x, dtype=float)
        e1, e2 = cc * np.exp(p1 * x), cb * np.exp(p2 * x)
        return e * (e2 - e1) / (nu1 * nu2 * (nu1 ** (n - 1) * e1 - nu2 ** (n - 1) * e2))

    quad = Quadruple(
        sigma_x=sigma_x,
        theta_z=lambda z: np.full(np.shape(np.asarray(z)), e),
        l1_prime=l1_prime,
        l2_dot=l2_dot,
        nu=nu,
        n=n,
    )

    domain = SafeDomain(
        rect=tuple(cfg.rect),
        predicates=(
            ("line1_log_arg",
             lambda x, z: s1 * (bn - nu1 ** n * nu2 * bn1 * cc * np.exp(p1 * (x + nu1 * z))) - EPS),
            ("line2_log_arg",
             lambda x, z: s2 * (bn - nu2 ** n * nu1 * bn1 * cb * np.exp(p2 * (x + nu2 * z))) - EPS),
            ("sigma_log_arg",
             lambda x, z: ss * (nu1 ** (n - 1) * cc * np.exp(p1 * x)
                                - nu2 ** (n - 1) * cb * np.exp(p2 * x)) - EPS),
        ),
    )
    return _line_bundle(cfg, nu, n, l1, l2, theta, sigma, quad, None, None, domain, scales,
                        params={"n": n, "nu": list(cfg.nu), "E": e, "k": k, "c": cc, "cbar": cb})


# ---------------------------------------------------------------------------
# builders: variable-slope families
# ---------------------------------------------------------------------------


def _quadratic_slope_jets(x, z, m):
    """Jets of the two slope fields solving ``slope^2 - z*slope - x = 0``."""
    xj, zj = jet_seed(x, z, m)
    disc = jsqrt(zj * zj + 4.0 * xj)
    return (zj - disc) * 0.5, (zj + disc) * 0.5


def _quadratic_seeds():
    lo = lambda x, z: (z - np.sqrt(z * z + 4 * x)) / 2
    hi = lambda x, z: (z + np.sqrt(z * z + 4 * x)) / 2
    return lo, hi


def _build_hodograph_example(cfg: HodographExampleConfig, scales) -> FieldBundle:
    k, al, be = float(cfg.k), float(cfg.alpha), float(cfg.beta)
    if k == 0 or al == 0:
        raise ConfigError("m3_hodograph_example requires nonzero k and alpha")
    sth, ssg, sc2 = scales.get("theta", 1.0), scales.get("sigma", 1.0), scales.get("c2", 1.0)

    cprime = lambda sj: (poly_jet((al, 0.0, 0.0, k), sj)).recip()   # 1/(k s^3 + alpha)
    prim0 = _Primitive(cprime, ref=_ref_slope(cfg.rect))
    prim1 = _Primitive(lambda sj: sj * cprime(sj), ref=_ref_slope(cfg.rect))

    def comp2(nuj):  # integral of s^2 C'(s), closed form
        return (1.0 / (3 * k)) * jlog(jpow(nuj, 3) * k + al)

    def comp_m1(nuj):  # integral of s^-1 C'(s), closed form
        nu3 = jpow(nuj, 3)
        return (1.0 / (3 * al)) * (jlog(nu3) - jlog(nu3 * k + al))

    def theta(zj):
        return (-1.0 / (3 * k)) * jlog(jpow(zj, -3) * k + be)

    def sigma(xj):
        return (1.0 / (3 * al)) * jlog(jpow(xj, -3) * al + be)

    def fields(x, z, m):
        xj, zj = jet_seed(x, z, m)
        nuj = -xj / zj
        out = {
            "a2": prim0(nuj) * sc2,
            "a1": prim1(nuj) * sc2,
            "a0": comp2(nuj) * sc2 + theta(zj) * sth,
            "W": comp_m1(nuj) * sc2 + sigma(xj) * ssg,
        }
        out["f"] = out["a0"]
        return out

    theta_z = _scaled_arr(lambda z: np.asarray(z, dtype=float) ** -4.0
                          / (k * np.asarray(z, dtype=float) ** -3.0 + be), sth)
    sigma_x = _scaled_arr(lambda x: -np.asarray(x, dtype=float) ** -4.0
                          / (al * np.asarray(x, dtype=float) ** -3.0 + be), ssg)

    general = GeneralQuadruple(
        branch1=SlopeBranch(kind="const", nu_const=1.0, lprime=None),
        branch2=SlopeBranch(
            kind="implicit",
            theta=lambda tj: Jet2.constant(np.zeros(tj.shape), tj.m),
            seed=lambda x, z: -x / z,
            cprime=_scaled_arr(lambda s: 1.0 / (k * s ** 3 + al), sc2),
        ),
        theta_z=theta_z,
        sigma_x=sigma_x,
    )

    def wf_res(w, f):
        return np.exp(3 * al * w) + (al / k) * np.exp(-3 * k * f) - be / k

    def forms(x, z):
        x = np.asarray(x, dtype=float)
        z = np.asarray(z, dtype=float)
        s = -x / z
        p2 = general.branch2.cprime(s) / (-z)
        return {
            "f_x": s ** 2 * p2,
            "f_z": s ** 3 * p2 + theta_z(z),
            "W_x": p2 / s + sigma_x(x),
            "W_z": p2,
        }

    domain = SafeDomain(
        rect=tuple(cfg.rect),
        predicates=(
            ("x_away_from_axis", lambda x, z: np.abs(x) - 1e-3),
            ("z_away_from_axis", lambda x, z: np.abs(z) - 1e-3),
            ("slope_positive", lambda x, z: -x / z - EPS),
            ("bottom_log_arg", lambda x, z: k * (-x / z) ** 3 + al - EPS),
            ("theta_log_arg", lambda x, z: k * z ** -3.0 + be - EPS),
            ("sigma_log_arg", lambda x, z: al * x ** -3.0 + be - EPS),
        ),
    )
    return FieldBundle(
        family=cfg.tag,
        n=3,
        params={"k": k, "alpha": al, "beta": be},
        domain=domain,
        wf_relation="hodograph_exp",
        mutation_slots=("sigma", "theta", "c2"),
        fields_fn=fields,
        general_quadruple=general,
        wf_residual=wf_res,
        derivative_forms=forms,
        config=cfg,
        mutations=dict(scales),
    )


def _ref_slope(rect):
    xc = 0.5 * (rect[0] + rect[1])
    zc = 0.5 * (rect[2] + rect[3])
    return -xc / zc


def _build_general(cfg: GeneralNuConfig, scales) -> FieldBundle:
    g = float(cfg.g)
    if g >= 0:
        h = complex(0.0, math.sqrt(g))
    else:
        h = math.sqrt(-g)
    sth, ssg = scales.get("theta", 1.0), scales.get("sigma", 1.0)
    sc1, sc2 = scales.get("c1", 1.0), scales.get("c2", 1.0)

    cprime = lambda sj: -(sj * sj + g).recip()
    lo_seed, hi_seed = _quadratic_seeds()
    xc, zc = 0.5 * (cfg.rect[0] + cfg.rect[1]), 0.5 * (cfg.rect[2] + cfg.rect[3])
    ref1, ref2 = lo_seed(xc, zc), hi_seed(xc, zc)
    prims = {
        (r, ref): _Primitive(lambda sj, r=r: jpow(sj, r) * cprime(sj), ref=ref)
        for r in (0, 1)
        for ref in (ref1, ref2)
    }

    def comp2(nuj):  # integral of s^2 C'(s): -s - (h/2) log((s-h)/(s+h))
        return -nuj - (h / 2) * jlog((nuj - h) / (nuj + h))

    def comp_m1(nuj):  # integral of s^-1 C'(s)
        n2j = nuj * nuj
        return (-1.0 / (2 * g)) * (jlog(n2j) - jlog(n2j + g))

    def theta(zj):
        return zj * 1.0

    def sigma(xj):
        return (1.0 / g) * (jlog(xj) - jlog(xj + g))

    def fields(x, z, m):
        xj, zj = jet_seed(x, z, m)
        n1, n2 = _quadratic_slope_jets(x, z, m)
        out = {
            "a2": prims[(0, ref1)](n1) * sc1 + prims[(0, ref2)](n2) * sc2,
            "a1": prims[(1, ref1)](n1) * sc1 + prims[(1, ref2)](n2) * sc2,
            "a0": comp2(n1) * sc1 + comp2(n2) * sc2 + theta(zj) * sth,
            "W": comp_m1(n1) * sc1 + comp_m1(n2) * sc2 + sigma(xj) * ssg,
        }
        out["f"] = out["a0"]
        return out

    theta_z = _scaled_arr(lambda z: np.ones(np.shape(np.asarray(z))), sth)
    sigma_x = _scaled_arr(lambda x: 1.0 / (np.asarray(x, dtype=float)
                                           * (np.asarray(x, dtype=float) + g)), ssg)
    sq = lambda tj: tj * tj
    general = GeneralQuadruple(
        branch1=SlopeBranch(kind="implicit", theta=sq, seed=lo_seed,
                            cprime=_scaled_arr(lambda s: -1.0 / (s * s + g), sc1)),
        branch2=SlopeBranch(kind="implicit", theta=sq, seed=hi_seed,
                            cprime=_scaled_arr(lambda s: -1.0 / (s * s + g), sc2)),
        theta_z=theta_z,
        sigma_x=sigma_x,
    )

    def wf_res(w, f):
        if g < 0:
            return np.exp(2 * g * w) * np.cosh(f / math.sqrt(-g)) ** 2 - 1.0
        val = np.exp(2 * g * w) * np.cosh(f / h) ** 2
        return np.abs(val) - 1.0

    def forms(x, z):
        x = np.asarray(x, dtype=float)
        z = np.asarray(z, dtype=float)
        root = np.sqrt(z * z + 4 * x)
        n1, n2 = (z - root) / 2, (z + root) / 2
        p1 = general.branch1.cprime(n1) / (-root)
        p2 = general.branch2.cprime(n2) / root
        return {
            "f_x": n1 ** 2 * p1 + n2 ** 2 * p2,
            "f_z": n1 ** 3 * p1 + n2 ** 3 * p2 + theta_z(z),
            "W_x": p1 / n1 + p2 / n2 + sigma_x(x),
            "W_z": p1 + p2,
        }

    habs = abs(h)
    domain = SafeDomain(
        rect=tuple(cfg.rect),
        predicates=(
            ("slopes_real", lambda x, z: z * z + 4 * x - EPS),
            ("log_center", lambda x, z: x + g - habs * np.abs(z) - EPS),
            ("sigma_log_arg", lambda x, z: x * (x + g) - EPS),
            ("slope_squares", lambda x, z: np.minimum(
                ((z - np.sqrt(np.maximum(z * z + 4 * x, 0.0))) / 2) ** 2 + g,
                ((z + np.sqrt(np.maximum(z * z + 4 * x, 0.0))) / 2) ** 2 + g) - EPS),
        ),
    )
    return FieldBundle(
        family=cfg.tag,
        n=3,
        params={"g": g},
        domain=domain,
        wf_relation="cosh",
        mutation_slots=("sigma", "theta", "c1", "c2"),
        fields_fn=fields,
        general_quadruple=general,
        wf_residual=wf_res,
        derivative_forms=forms,
        config=cfg,
        mutations=dict(scales),
    )


def _build_general_e0(cfg: GeneralNuE0Config, scales) -> FieldBundle:
    a = float(cfg.a)
    a1, a2 = sorted((float(cfg.alpha1), float(cfg.alpha2)))
    c = a * a1 * a2
    ssg = scales.get("sigma", 1.0)
    sc1, sc2 = scales.get("c1", 1.0), scales.get("c2", 1.0)

    cprime = lambda sj: (poly_jet((a1, 0, 0, 1.0), sj) * poly_jet((a2, 0, 0, 1.0), sj) * a).recip()
    lo_seed, hi_seed = _quadratic_seeds()
    xc, zc = 0.5 * (cfg.rect[0] + cfg.rect[1]), 0.5 * (cfg.rect[2] + cfg.rect[3])
    ref1, ref2 = lo_seed(xc, zc), hi_seed(xc, zc)
    prims = {
        (r, ref): _Primitive(lambda sj, r=r: jpow(sj, r) * cprime(sj), ref=ref)
        for r in (0, 1)
        for ref in (ref1, ref2)
    }

    def comp2(nuj):  # integral of s^2 C'(s), closed form in w = s^3
        wj = jpow(nuj, 3)
        return (1.0 / (3 * a * (a2 - a1))) * (jlog(wj + a1) - jlog(wj + a2))

    def comp_m1(nuj):  # integral of s^-1 C'(s), partial fractions in w = s^3
        wj = jpow(nuj, 3)
        return (1.0 / (3 * a)) * (
            jlog(wj) * (1.0 / (a1 * a2))
            - jlog(wj + a1) * (1.0 / (a1 * (a2 - a1)))
            + jlog(wj + a2) * (1.0 / (a2 * (a2 - a1)))
        )

    def sigma(xj):
        return (1.0 / (3 * c)) * jlog(jpow(xj, -3) * c + a)

    def fields(x, z, m):
        xj, zj = jet_seed(x, z, m)
        n1, n2 = _quadratic_slope_jets(x, z, m)
        out = {
            "a0": comp2(n1) * sc1 + comp2(n2) * sc2,
            "a1": prims[(1, ref1)](n1) * sc1 + prims[(1, ref2)](n2) * sc2,
            "a2": prims[(0, ref1)](n1) * sc1 + prims[(0, ref2)](n2) * sc2,
            "W": comp_m1(n1) * sc1 + comp_m1(n2) * sc2 + sigma(xj) * ssg,
        }
        out["f"] = out["a0"]
        return out

    sigma_x = _scaled_arr(
        lambda x: -1.0 / (np.asarray(x, dtype=float) * (a * np.asarray(x, dtype=float) ** 3 + c)),
        ssg,
    )
    sq = lambda tj: tj * tj
    cfn = lambda s: 1.0 / (a * (s ** 3 + a1) * (s ** 3 + a2))
    general = GeneralQuadruple(
        branch1=SlopeBranch(kind="implicit", theta=sq, seed=lo_seed, cprime=_scaled_arr(cfn, sc1)),
        branch2=SlopeBranch(kind="implicit", theta=sq, seed=hi_seed, cprime=_scaled_arr(cfn, sc2)),
        theta_z=lambda z: np.zeros(np.shape(np.asarray(z))),
        sigma_x=sigma_x,
    )

    def wf_res(w, f):
        mu = 3 * a * (a2 - a1) * f
        t1 = a * (a2 - a1 * np.exp(-mu)) / (a2 - a1)
        t2 = a * (a2 * np.exp(mu) - a1) / (a2 - a1)
        if np.any(np.real(t1) <= 0) or np.any(np.real(t2) <= 0):
            raise DomainError("two-log relation: log argument not positive")
        return 3 * c * (a2 - a1) * w - a2 * np.log(t1) + a1 * np.log(t2)

    def forms(x, z):
        x = np.asarray(x, dtype=float)
        z = np.asarray(z, dtype=float)
        root = np.sqrt(z * z + 4 * x)
        n1, n2 = (z - root) / 2, (z + root) / 2
        p1 = general.branch1.cprime(n1) / (-root)
        p2 = general.branch2.cprime(n2) / root
        return {
            "f_x": n1 ** 2 * p1 + n2 ** 2 * p2,
            "f_z": n1 ** 3 * p1 + n2 ** 3 * p2,
            "W_x": p1 / n1 + p2 / n2 + sigma_x(x),
            "W_z": p1 + p2,
        }

    def q_vals(alpha, x, z):
        return -x ** 3 + alpha * (z ** 3 + 3 * x * z) + alpha ** 2

    domain = SafeDomain(
        rect=tuple(cfg.rect),
        predicates=(
            ("slopes_real", lambda x, z: z * z + 4 * x - EPS),
            ("x_negative", lambda x, z: -x - EPS),
            ("z_positive", lambda x, z: z - EPS),
            ("bottom_log_arg_1", lambda x, z: q_vals(a1, x, z) - EPS),
            ("bottom_log_arg_2", lambda x, z: q_vals(a2, x, z) - EPS),
            ("sigma_log_arg", lambda x, z: a + c * x ** -3.0 - EPS),
        ),
    )
    return FieldBundle(
        family=cfg.tag,
        n=3,
        params={"a": a, "alpha1": a1, "alpha2": a2, "c": c},
        domain=domain,
        wf_relation="two_log",
        mutation_slots=("sigma", "c1", "c2"),
        fields_fn=fields,
        general_quadruple=general,
        wf_residual=wf_res,
        derivative_forms=forms,
        config=cfg,
        mutations=dict(scales),
    )


# ---------------------------------------------------------------------------
# dispatch, serialization, canonical parameter sets
# ---------------------------------------------------------------------------

_BUILDERS = {
    "trivial": _build_trivial,
    "m1_implicit": _build_m1,
    "degenerate": _build_degenerate,
    "m3_sigma_const": _build_sigma_const,
    "m3_l1_const": _build_l1_const,
    "m3_theta_const": _build_theta_const,
    "m3_hodograph_example": _build_hodograph_example,
    "m3_general": _build_general,
    "m3_general_e0": _build_general_e0,
    "mn_theta_const": _build_n_theta_const,
}


def make_family(cfg, mutations: dict | None = None) -> FieldBundle:
    """Build the field bundle for a family configuration."""
    builder = _BUILDERS.get(cfg.tag)
    if builder is None:
        raise ConfigError(f"unknown family tag {cfg.tag!r}")
    bundle = builder(cfg, dict(mutations or {}))
    for name in bundle.mutations:
        if name not in bundle.mutation_slots:
            raise ConfigError(
                f"family {cfg.tag!r} has no derivative function {name!r} to mutate"
            )
    return bundle


def _num(v):
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(u, (int, float)) for u in v):
        return complex(v[0], v[1])
    return v


def family_from_dict(d: dict):
    """Parse the JSON form of a family configuration (tag field ``family``)."""
    if not isinstance(d, dict) or "family" not in d:
        raise ConfigError("family config must be an object with a 'family' tag")
    d = dict(d)
    tag = d.pop("family")
    try:
        if tag == "trivial":
            terms = tuple((_num(lam), tuple(map(_num, coeffs))) for lam, coeffs in d.pop("terms"))
            return TrivialConfig(n=int(d.pop("n")), terms=terms, **_rect_kw(d))
        if tag == "m1_implicit":
            return M1ImplicitConfig(f_coeffs=tuple(d.pop("F")),
                                    seed_lambda=float(d.pop("seed_lambda", 1.0)), **_rect_kw(d))
        if tag == "degenerate":
            return DegenerateConfig(c_coeffs=tuple(d.pop("C")), g_coeffs=tuple(d.pop("G")),
                                    seed_a=float(d.pop("seed_a", 1.0)), **_rect_kw(d))
        if tag == "m3_sigma_const":
            return SigmaConstConfig(nu=tuple(d.pop("nu")), A=float(d.pop("A", 1.0)),
                                    k=float(d.pop("k", 1.0)), d1=float(d.pop("d1", 0.0)),
                                    d2=float(d.pop("d2", 0.0)), **_rect_kw(d))
        if tag == "m3_l1_const":
            return L1ConstConfig(nu=tuple(d.pop("nu")), D=float(d.pop("D", 1.0)),
                                 k=float(d.pop("k", 1.0)),
                                 dtilde_mode=d.pop("dtilde_mode", "nu1_plus_nu2"), **_rect_kw(d))
        if tag == "m3_theta_const":
            return ThetaConstConfig(nu=tuple(d.pop("nu")), E=float(d.pop("E", 1.0)),
                                    k=float(d.pop("k", 1.0)), **_rect_kw(d))
        if tag == "m3_hodograph_example":
            return HodographExampleConfig(k=float(d.pop("k", 1.0)), alpha=float(d.pop("alpha", 1.0)),
                                          beta=float(d.pop("beta", 2.0)), **_rect_kw(d))
        if tag == "m3_general":
            return GeneralNuConfig(g=float(d.pop("g", -1.0)), **_rect_kw(d))
        if tag == "m3_general_e0":
            c = d.pop("c", None)
            return GeneralNuE0Config(a=float(d.pop("a", 1.0)), alpha1=float(d.pop("alpha1", 1.0)),
                                     alpha2=float(d.pop("alpha2", 2.0)),
                                     c=None if c is None else float(c), **_rect_kw(d))
        if tag == "mn_theta_const":
            return NThetaConstConfig(n=int(d.pop("n")), nu=tuple(d.pop("nu")),
                                     E=float(d.pop("E", 1.0)), k=float(d.pop("k", 0.1)),
                                     c=float(d.pop("c", 1.0)), cbar=float(d.pop("cbar", 1.0)),
                                     **_rect_kw(d))
    except KeyError as exc:
        raise ConfigError(f"family {tag!r}: missing required field {exc}") from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"family {tag!r}: malformed field value ({exc})") from None
    raise ConfigError(f"unknown family tag {tag!r}")


def _rect_kw(d: dict) -> dict:
    out = {}
    if "rect" in d:
        rect = d.pop("rect")
        if len(rect) != 4:
            raise ConfigError("rect must be [x_lo, x_hi, z_lo, z_hi]")
        out["rect"] = tuple(float(v) for v in rect)
    if d:
        raise ConfigError(f"unknown family config fields: {sorted(d)}")
    return out


def family_to_dict(cfg) -> dict:
    """Inverse of :func:`family_from_dict`."""
    out = {"family": cfg.tag, "rect": list(cfg.rect)}
    if cfg.tag == "trivial":
        out["n"] = cfg.n
        out["terms"] = [
            [_num_out(lam), [_num_out(c) for c in coeffs]] for lam, coeffs in cfg.terms
        ]
    elif cfg.tag == "m1_implicit":
        out.update(F=list(cfg.f_coeffs), seed_lambda=cfg.seed_lambda)
    elif cfg.tag == "degenerate":
        out.update(C=list(cfg.c_coeffs), G=list(cfg.g_coeffs), seed_a=cfg.seed_a)
    elif cfg.tag == "m3_sigma_const":
        out.update(nu=list(cfg.nu), A=cfg.A, k=cfg.k, d1=cfg.d1, d2=cfg.d2)
    elif cfg.tag == "m3_l1_const":
        out.update(nu=list(cfg.nu), D=cfg.D, k=cfg.k, dtilde_mode=cfg.dtilde_mode)
    elif cfg.tag == "m3_theta_const":
        out.update(nu=list(cfg.nu), E=cfg.E, k=cfg.k)
    elif cfg.tag == "m3_hodograph_example":
        out.update(k=cfg.k, alpha=cfg.alpha, beta=cfg.beta)
    elif cfg.tag == "m3_general":
        out.update(g=cfg.g)
    elif cfg.tag == "m3_general_e0":
        out.update(a=cfg.a, alpha1=cfg.alpha1, alpha2=cfg.alpha2, c=cfg.c)
    elif cfg.tag == "mn_theta_const":
        out.update(n=cfg.n, nu=list(cfg.nu), E=cfg.E, k=cfg.k, c=cfg.c, cbar=cfg.cbar)
    else:  # pragma: no cover
        raise ConfigError(f"unknown family tag {cfg.tag!r}")
    return out


def _num_out(v):
    v = complex(v)
    if v.imag == 0:
        return v.real
    return [v.real, v.imag]


def canonical_config(tag: str):
    """The reference parameter set each family is verified with."""
    if tag == "trivial":
        return TrivialConfig(n=2, terms=(((1 + 0j), (0, 0, 1.0)), ((-1 + 0j), (0, 0, 1.0))))
    if tag == "m1_implicit":
        return M1ImplicitConfig(f_coeffs=(0.0, 0.0, 0.0, 1.0), seed_lambda=1.2)
    if tag == "degenerate":
        return DegenerateConfig(c_coeffs=(0.0, 0.0, 1.0), g_coeffs=(0.0, 1.0), seed_a=2.0)
    if tag == "m3_sigma_const":
        return SigmaConstConfig(nu=(1.0, 2.0), A=1.0, k=1.0)
    if tag == "m3_l1_const":
        return L1ConstConfig(nu=(1.0, 2.0), D=1.0, k=1.0)
    if tag == "m3_theta_const":
        return ThetaConstConfig(nu=(1.0, 2.0), E=1.0, k=1.0)
    if tag == "m3_hodograph_example":
        return HodographExampleConfig(k=1.0, alpha=1.0, beta=2.0)
    if tag == "m3_general":
        return GeneralNuConfig(g=-1.0)
    if tag == "m3_general_e0":
        return GeneralNuE0Config(a=1.0, alpha1=1.0, alpha2=2.0)
    if tag == "mn_theta_const":
        return NThetaConstConfig(n=4, nu=(1.0, 2.0), E=1.0, k=0.1)
    raise ConfigError(f"unknown family tag {tag!r}")
