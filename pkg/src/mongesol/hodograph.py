"""Hodograph-plane machinery and the shared implicit scalar solver.

The degree-two construction works in the transformed plane ``(b, c)`` where
the quasilinear system becomes linear and is resolved by one potential
``R(b, c)`` with ``x = R_c``, ``z = R_b``.  This module provides:

* ``invert_hodograph`` - damped 2-D Newton recovering ``(b, c)`` from ``(x, z)``;
* ``factorization_check`` - residuals of the slope/derivative matching;
* ``schrodinger_solve`` - the zero-energy second-order ODE for the separable
  ansatz, integrated with a fixed-step classical 4th-order scheme;
* ``assemble_r_integral`` - superposition of separable modes with an
  independent finite-difference residual check;
* ``solve_implicit`` / ``implicit_jet`` - branch-tracked scalar solve of
  ``x + lam*z = F(lam)``, in values and in jets.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ConvergenceError, FoldError, MongesolError, QuadratureError
from .jets import Jet2, compose_series, jet_partial, jet_seed

__all__ = [
    "invert_hodograph",
    "factorization_check",
    "schrodinger_solve",
    "assemble_r_integral",
    "solve_implicit",
    "implicit_jet",
    "OdeSolution",
    "RIntegralResult",
]


# ---------------------------------------------------------------------------
# implicit scalar solve: x + lam*z = F(lam)
# ---------------------------------------------------------------------------


def solve_implicit(
    f: Callable[[Jet2], Jet2],
    x,
    z,
    seed,
    *,
    tol: float = 1e-12,
    max_iter: int = 60,
    fold_tol: float = 1e-8,
) -> np.ndarray:
    """Root ``lam`` of ``x + lam*z - F(lam) = 0`` on the branch through ``seed``.

    ``f`` evaluates F as a univariate jet (the variable sits in the x slot).
    Damped Newton; a fold point (``z - F'(lam)`` vanishing at the root) is an
    error, not a branch jump.  Vectorizes over arrays of points.
    """
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    lam = np.broadcast_to(np.asarray(seed, dtype=float), np.broadcast_shapes(x.shape, z.shape)).copy()
    x, z = np.broadcast_to(x, lam.shape), np.broadcast_to(z, lam.shape)

    def residual(l):
        lj, _ = jet_seed(l, 0.0, 1)
        fj = f(lj)
        return x + l * z - fj.value, z - jet_partial(fj, 1, 0)

    g, gp = residual(lam)
    for _ in range(max_iter):
        if np.max(np.abs(g)) <= tol:
            break
        if np.any(np.abs(gp) < fold_tol):
            raise FoldError("implicit solve at a fold point: z - F'(lam) ~ 0")
        step = g / gp
        new = lam - step
        gn, gpn = residual(new)
        # halve the step until the merit decreases (per point)
        for _ in range(40):
            worse = np.abs(gn) > np.abs(g)
            if not np.any(worse):
                break
            step = np.where(worse, step / 2, step)
            new = lam - step
            gn, gpn = residual(new)
        lam, g, gp = new, gn, gpn
    else:
        raise ConvergenceError(f"implicit solve: no convergence in {max_iter} iterations")
    if np.any(np.abs(gp) < fold_tol):
        raise FoldError("implicit solve converged onto a fold point (z = F'(lam))")
    return lam


def implicit_jet(f: Callable[[Jet2], Jet2], xj: Jet2, zj: Jet2, lam0) -> Jet2:
    """Jet of the implicit branch ``lam(x, z)`` with ``x + lam*z = F(lam)``.

    ``lam0`` are the already-solved values at the base points.  Newton in the
    jet algebra doubles the correct nilpotent order each pass.
    """
    m = xj.m
    lam = Jet2.constant(np.asarray(lam0), m)
    passes = max(1, (m).bit_length() + 1)
    for _ in range(passes):
        fj = _univariate_on_jet(f, lam)
        fpj = _univariate_on_jet(f, lam, derivative=1)
        g = xj + lam * zj - fj
        gp = zj - fpj
        lam = lam - g / gp
    return lam


def _univariate_on_jet(f: Callable[[Jet2], Jet2], a: Jet2, derivative: int = 0) -> Jet2:
    """Apply a univariate jet-function to a Jet2-valued argument."""
    tj, _ = jet_seed(a.value, 0.0, a.m + derivative)
    fj = f(tj)
    for _ in range(derivative):
        fj = fj.dx()
    # recompose: Taylor coefficients of f about a.value, Horner in (a - value)
    tk = [fj.c[k, 0] for k in range(a.m + 1)]
    return compose_series(tk, a)


# ---------------------------------------------------------------------------
# 2-D Newton inversion of the potential map
# ---------------------------------------------------------------------------


def invert_hodograph(
    r: Callable[[Jet2, Jet2], Jet2],
    x: float,
    z: float,
    seed: tuple[float, float],
    *,
    tol: float = 1e-10,
    max_iter: int = 50,
) -> tuple[float, float]:
    """Solve ``R_c = x, R_b = z`` for ``(b, c)`` by damped Newton from ``seed``.

    Raises ``FoldError`` on a singular Jacobian (caustic) and
    ``ConvergenceError`` on iteration exhaustion.
    """
    b, c = float(seed[0]), float(seed[1])

    def eval_point(bv, cv):
        bj, cj = jet_seed(bv, cv, 2)
        rj = r(bj, cj)
        f1 = jet_partial(rj, 0, 1) - x   # R_c - x
        f2 = jet_partial(rj, 1, 0) - z   # R_b - z
        j11 = jet_partial(rj, 1, 1)      # d(R_c)/db
        j12 = jet_partial(rj, 0, 2)      # d(R_c)/dc
        j21 = jet_partial(rj, 2, 0)      # d(R_b)/db
        j22 = jet_partial(rj, 1, 1)      # d(R_b)/dc
        return np.array([f1, f2], dtype=float), np.array([[j11, j12], [j21, j22]], dtype=float)

    fvec, jac = eval_point(b, c)
    for _ in range(max_iter):
        merit = abs(fvec[0]) + abs(fvec[1])
        if merit <= tol:
            return b, c
        det = jac[0, 0] * jac[1, 1] - jac[0, 1] * jac[1, 0]
        scale = max(abs(jac).max(), 1e-30)
        if abs(det) < 1e-14 * scale * scale:
            raise FoldError("hodograph inversion: singular Jacobian (fold caustic)")
        step = np.linalg.solve(jac, fvec)
        t = 1.0
        for _ in range(40):
            nb, nc = b - t * step[0], c - t * step[1]
            nf, nj = eval_point(nb, nc)
            if abs(nf[0]) + abs(nf[1]) < merit:
                break
            t /= 2
        else:
            raise ConvergenceError("hodograph inversion: damping failed to reduce the merit")
        b, c, fvec, jac = nb, nc, nf, nj
    raise ConvergenceError(f"hodograph inversion: no convergence in {max_iter} iterations")


def factorization_check(w_b, w_c, nu1, nu2):
    """Residual pair of the slope matching: ``(nu1+nu2-W_b, nu1*nu2+W_c)``."""
    return nu1 + nu2 - w_b, nu1 * nu2 + w_c


# ---------------------------------------------------------------------------
# separable modes: w'' = k^2 W_c(c) w
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OdeSolution:
    """Two fundamental solutions of the zero-energy mode equation."""

    k: float
    c_grid: np.ndarray
    w1: np.ndarray
    w1p: np.ndarray
    w2: np.ndarray
    w2p: np.ndarray

    @property
    def wronskian(self) -> np.ndarray:
        return self.w1 * self.w2p - self.w2 * self.w1p

    @property
    def wronskian_drift(self) -> float:
        # the ODE has no first-derivative term, so the Wronskian must stay 1
        return float(np.max(np.abs(self.wronskian - 1.0)))


def schrodinger_solve(
    w_c_profile: Callable[[np.ndarray], np.ndarray],
    k: float,
    c_range: tuple[float, float],
    steps: int,
) -> OdeSolution:
    """Integrate ``w'' = k^2 W_c(c) w`` from initial data (1,0) and (0,1).

    Fixed-step classical 4th-order integrator; step count is the accuracy
    knob (no adaptivity).  Non-finite profile values are an error.
    """
    if steps < 100:
        raise ValueError("schrodinger_solve needs at least 100 steps")
    c0, c1 = float(c_range[0]), float(c_range[1])
    h = (c1 - c0) / steps
    grid = c0 + h * np.arange(steps + 1)

    def pot(c):
        v = k * k * np.asarray(w_c_profile(c), dtype=float)
        if not np.all(np.isfinite(v)):
            raise MongesolError(f"non-finite potential profile value at c={c!r}")
        return v

    # y = (w, w'), both fundamental solutions as columns
    w = np.array([[1.0, 0.0], [0.0, 1.0]])
    ws = np.empty((steps + 1, 2))
    wps = np.empty((steps + 1, 2))
    ws[0], wps[0] = w[0], w[1]
    for i in range(steps):
        c = grid[i]

        def f(cv, y):
            return np.vstack([y[1], pot(cv) * y[0]])

        y = np.vstack([ws[i], wps[i]])
        k1 = f(c, y)
        k2 = f(c + h / 2, y + h / 2 * k1)
        k3 = f(c + h / 2, y + h / 2 * k2)
        k4 = f(c + h, y + h * k3)
        y = y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        ws[i + 1], wps[i + 1] = y[0], y[1]
    return OdeSolution(k, grid, ws[:, 0], wps[:, 0], ws[:, 1], wps[:, 1])


@dataclass(frozen=True)
class RIntegralResult:
    b_grid: np.ndarray
    c_grid: np.ndarray
    r_values: np.ndarray          # shape (nb, nc)
    residual_max: float           # max |R_cc - W_c R_bb| over the interior
    residual_mean: float
    wronskian_drift: float
    node_doubling_change: float | None


def assemble_r_integral(
    f1: Callable[[float], float],
    f2: Callable[[float], float],
    k_nodes: Sequence[float],
    w_c_profile: Callable[[np.ndarray], np.ndarray],
    b_range: tuple[float, float],
    c_range: tuple[float, float],
    *,
    nb: int = 25,
    steps: int = 2000,
    mode: str = "sum",
    doubling_tol: float = 1e-6,
) -> RIntegralResult:
    """Superpose separable modes into ``R(b, c)`` and check its equation.

    ``mode="sum"`` treats the nodes as a discrete superposition (unit
    weights); ``mode="trapezoid"`` integrates over the node grid and checks
    convergence by doubling the nodes (failure raises ``QuadratureError``).
    The reported residual differentiates R twice in c by central finite
    differences of the integrated modes, independently of the mode equation
    used to build them; the b derivatives are analytic.
    """
    k_nodes = [float(k) for k in k_nodes]
    if not k_nodes:
        raise ValueError("k_nodes must be nonempty")
    if mode not in ("sum", "trapezoid"):
        raise ValueError(f"unknown quadrature mode {mode!r}")

    def build(nodes):
        weights = _weights(nodes, mode)
        b = np.linspace(b_range[0], b_range[1], nb)
        sols = [schrodinger_solve(w_c_profile, k, c_range, steps) for k in nodes]
        c = sols[0].c_grid
        r = np.zeros((nb, c.size))
        rbb = np.zeros_like(r)
        for wgt, k, sol in zip(weights, nodes, sols):
            amp = wgt * (f1(k) * sol.w1 + f2(k) * sol.w2)  # shape (nc,)
            ekb = np.exp(k * b)[:, None]
            r += ekb * amp[None, :]
            rbb += (k * k) * ekb * amp[None, :]
        drift = max(s.wronskian_drift for s in sols)
        return b, c, r, rbb, drift

    b, c, r, rbb, drift = build(k_nodes)

    # second derivative in c by a 7-point stencil on a strided subgrid; the
    # stride keeps the step near 1e-2 so stencil roundoff stays below 1e-10
    h_ode = c[1] - c[0]
    stride = max(1, int(round(0.01 * (c[-1] - c[0]) / h_ode)))
    cs, rs, rbbs = c[::stride], r[:, ::stride], rbb[:, ::stride]
    h = cs[1] - cs[0]
    st = np.array([2.0, -27.0, 270.0, -490.0, 270.0, -27.0, 2.0]) / 180.0
    rcc = sum(coef * rs[:, i: rs.shape[1] - (6 - i)] for i, coef in enumerate(st)) / (h * h)
    resid = np.abs(rcc - np.asarray(w_c_profile(cs[3:-3]))[None, :] * rbbs[:, 3:-3])

    change = None
    if mode == "trapezoid" and len(k_nodes) >= 2:
        refined = _midpoint_refine(k_nodes)
        _, _, r2, _, _ = build(refined)
        change = float(np.max(np.abs(r2 - r)))
        if change > doubling_tol * max(1.0, float(np.max(np.abs(r)))):
            raise QuadratureError(
                f"k-quadrature not converged: node doubling changed R by {change:.3e}"
            )

    return RIntegralResult(
        b_grid=b,
        c_grid=c,
        r_values=r,
        residual_max=float(np.max(resid)),
        residual_mean=float(np.mean(resid)),
        wronskian_drift=drift,
        node_doubling_change=change,
    )


def _weights(nodes, mode):
    if mode == "sum" or len(nodes) == 1:
        return [1.0] * len(nodes)
    w = np.zeros(len(nodes))
    diffs = np.diff(np.asarray(nodes))
    w[:-1] += diffs / 2
    w[1:] += diffs / 2
    return list(w)


def _midpoint_refine(nodes):
    out = [nodes[0]]
    for a, b in zip(nodes[:-1], nodes[1:]):
        out.extend([(a + b) / 2, b])
    return out
