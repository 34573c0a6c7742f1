"""Grid-level verification engine.

Runs the identity checks a configured family is supposed to satisfy --
derivative-chain compatibility, functional dependence of the top and bottom
fields, the tagged closed-form relation between them (plus an independent
quadrature reconstruction of both from the derivative-level functions), the
four-function constraint at random probe points, and a full reconstruction
of the underlying potential with an n-th order finite-difference oracle --
and aggregates everything into a deterministic :class:`ResidualReport`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import ConfigError, DomainError, QuadratureError
from .families import FieldBundle
from .functional_eq import four_function_residual, variable_slope_residual
from .jets import jet_partial

__all__ = [
    "GridSpec",
    "CheckResult",
    "ResidualReport",
    "DEFAULT_TOLERANCES",
    "KNOWN_CHECKS",
    "admissible_grid",
    "check_compatibility",
    "check_dependence",
    "check_wf_relation",
    "check_equation",
    "reconstruct_u",
    "richardson_ratio",
    "run_suite",
    "default_checks",
]

KNOWN_CHECKS = ("compat", "dependence", "wf", "eq5", "eq10", "reconstruct")

DEFAULT_TOLERANCES = {
    "compat": 1e-9,
    "dependence": 1e-9,
    "wf": 1e-9,
    "wf_quadrature": 1e-6,
    "eq5": 1e-9,
    "eq10": 1e-9,
    "reconstruct": 1e-6,
    "path_consistency": 1e-6,
}


@dataclass(frozen=True)
class GridSpec:
    """Rectangular evaluation grid plus the jet/FD parameters."""

    x_lo: float
    x_hi: float
    z_lo: float
    z_hi: float
    nx: int = 21
    nz: int = 21
    m: int = 2
    fd_h: float | None = None  # None: reconstruction uses the grid spacing

    def __post_init__(self):
        if self.nx < 5 or self.nz < 5:
            raise ConfigError("grid needs nx, nz >= 5")
        if self.fd_h is not None and not (1e-6 <= self.fd_h <= 1e-2):
            raise ConfigError("fd_h must lie in [1e-6, 1e-2]")

    @classmethod
    def for_bundle(cls, bundle: FieldBundle, nx: int = 21, nz: int = 21, **kw) -> "GridSpec":
        x_lo, x_hi, z_lo, z_hi = bundle.domain.rect
        return cls(x_lo, x_hi, z_lo, z_hi, nx=nx, nz=nz, **kw)

    def axes(self):
        return (np.linspace(self.x_lo, self.x_hi, self.nx),
                np.linspace(self.z_lo, self.z_hi, self.nz))

    def meta(self) -> dict:
        return {
            "x_lo": self.x_lo, "x_hi": self.x_hi, "z_lo": self.z_lo, "z_hi": self.z_hi,
            "nx": self.nx, "nz": self.nz, "m": self.m, "fd_h": self.fd_h,
        }


@dataclass(frozen=True)
class CheckResult:
    name: str
    max_abs: float
    mean_abs: float
    argmax: tuple[float, float]
    tolerance: float
    passed: bool
    extra: dict = field(default_factory=dict)


@dataclass
class ResidualReport:
    meta: dict
    checks: dict

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def to_json_dict(self) -> dict:
        return {
            "meta": self.meta,
            "passed": self.passed,
            "checks": {
                name: {
                    "max_abs": c.max_abs,
                    "mean_abs": c.mean_abs,
                    "argmax": list(c.argmax),
                    "tolerance": c.tolerance,
                    "passed": c.passed,
                    "extra": c.extra,
                }
                for name, c in self.checks.items()
            },
        }

    def csv_rows(self) -> list[list[str]]:
        rows = [["check", "max_abs", "mean_abs", "argmax_x", "argmax_z", "tolerance", "passed"]]
        for name, c in self.checks.items():
            rows.append([
                name, _fmt(c.max_abs), _fmt(c.mean_abs), _fmt(c.argmax[0]), _fmt(c.argmax[1]),
                _fmt(c.tolerance), str(c.passed).lower(),
            ])
        return rows


def _fmt(v) -> str:
    return f"{float(v):.17g}"


def _result(name, resid, x, z, tol, extra=None) -> CheckResult:
    resid = np.abs(np.asarray(resid))
    if resid.size == 0:
        raise DomainError(f"check {name!r}: no admissible points to evaluate")
    i = int(np.argmax(resid))
    mx = float(resid.flat[i])
    return CheckResult(
        name=name,
        max_abs=mx,
        mean_abs=float(np.mean(resid)),
        argmax=(float(np.ravel(x)[i]), float(np.ravel(z)[i])),
        tolerance=tol,
        passed=bool(mx <= tol),
        extra=extra or {},
    )


def admissible_grid(bundle: FieldBundle, grid: GridSpec):
    """Flat arrays of the grid points inside the bundle's safe domain."""
    xs, zs = grid.axes()
    xg, zg = np.meshgrid(xs, zs, indexing="ij")
    ok = bundle.domain.mask(xg, zg)
    x, z = xg[ok], zg[ok]
    if x.size < 10:
        raise DomainError(
            f"safe domain exhausted: only {x.size} admissible grid points (need >= 10)"
        )
    return x, z


# ---------------------------------------------------------------------------
# individual checks
# ---------------------------------------------------------------------------


def check_compatibility(bundle: FieldBundle, grid: GridSpec, tol: float) -> CheckResult:
    """Residuals of the derivative chain, including the top link through W'.

    The top link compares d/dx of the last chain field against W'(a0) d/dz a0,
    with W' taken from the family's explicit top map when it has one and from
    the x-route ratio W_x / (d/dx a0) otherwise (the z-route is the trivially
    exact chain identity and would have no teeth).
    """
    x, z = admissible_grid(bundle, grid)
    fl = bundle.eval_fields(x, z, grid.m)
    n = bundle.n
    worst = np.zeros(x.shape)
    per_link = {}
    for k in range(n - 1):
        r = np.abs(jet_partial(fl[f"a{k}"], 1, 0) - jet_partial(fl[f"a{k + 1}"], 0, 1))
        per_link[f"link_{k}"] = float(np.max(r))
        worst = np.maximum(worst, r)
    a_top_x = jet_partial(fl[f"a{n - 1}"], 1, 0)
    a0_z = jet_partial(fl["a0"], 0, 1)
    if bundle.wprime_fn is not None:
        wp = bundle.wprime_fn(x, z, fl)
        r = np.abs(a_top_x - wp * a0_z)
        used = x.size
    else:
        f_x = jet_partial(fl["a0"], 1, 0)
        w_x = jet_partial(fl["W"], 1, 0)
        scale = float(np.max(np.abs(f_x)))
        keep = np.abs(f_x) > 1e-8 * max(scale, 1e-30)
        r = np.zeros(x.shape)
        r[keep] = np.abs(a_top_x[keep] - (w_x[keep] / f_x[keep]) * a0_z[keep])
        used = int(np.count_nonzero(keep))
    per_link["link_top"] = float(np.max(r)) if r.size else 0.0
    per_link["top_link_points"] = used
    worst = np.maximum(worst, r)
    return _result("compat", worst, x, z, tol, extra=per_link)


def check_dependence(bundle: FieldBundle, grid: GridSpec, tol: float) -> CheckResult:
    """Normalized Jacobian between the bottom and top fields."""
    x, z = admissible_grid(bundle, grid)
    fl = bundle.eval_fields(x, z, grid.m)
    f_x, f_z = jet_partial(fl["f"], 1, 0), jet_partial(fl["f"], 0, 1)
    w_x, w_z = jet_partial(fl["W"], 1, 0), jet_partial(fl["W"], 0, 1)
    jac = f_x * w_z - f_z * w_x
    den = (np.sqrt(np.abs(f_x) ** 2 + np.abs(f_z) ** 2)
           * np.sqrt(np.abs(w_x) ** 2 + np.abs(w_z) ** 2) + 1e-30)
    return _result("dependence", np.abs(jac) / den, x, z, tol)


def check_wf_relation(bundle: FieldBundle, grid: GridSpec, tol: float,
                      quad_tol: float) -> list[CheckResult]:
    """Pointwise residual of the tagged closed-form relation.

    When the family exposes its derivative-level forms, the bottom and top
    fields are additionally rebuilt by quadrature of those forms along grid
    lines and compared against the closed forms; a disagreement here flags a
    broken antiderivative rather than a broken family.
    """
    if bundle.wf_residual is None:
        raise ConfigError(f"family {bundle.family!r} carries no W-f relation (tag is None)")
    x, z = admissible_grid(bundle, grid)
    fl = bundle.eval_fields(x, z, grid.m)
    wv, fv = fl["W"].value, fl["f"].value
    out = []
    try:
        resid = bundle.wf_residual(wv, fv)
        out.append(_result("wf", resid, x, z, tol, extra={"relation": bundle.wf_relation}))
    except DomainError as exc:
        out.append(CheckResult("wf", math.inf, math.inf, (math.nan, math.nan), tol, False,
                               extra={"relation": bundle.wf_relation, "error": str(exc)}))
    if bundle.derivative_forms is not None:
        out.append(_quadrature_crosscheck(bundle, grid, quad_tol))
    return out


def _quadrature_crosscheck(bundle: FieldBundle, grid: GridSpec, tol: float) -> CheckResult:
    """Rebuild f and W by line quadrature of the derivative-level forms."""
    xs, zs = grid.axes()
    xg, zg = np.meshgrid(xs, zs, indexing="ij")
    ok = bundle.domain.mask(xg, zg)
    if not np.any(ok):
        raise DomainError("quadrature cross-check: no admissible grid points")
    # reference node: admissible point closest to the rectangle centre
    xc = 0.5 * (grid.x_lo + grid.x_hi)
    zc = 0.5 * (grid.z_lo + grid.z_hi)
    dist = np.where(ok, (xg - xc) ** 2 + (zg - zc) ** 2, np.inf)
    i0, j0 = np.unravel_index(int(np.argmin(dist)), dist.shape)

    refine = 32
    fx_row, wx_row, row_ok = _row_forms(bundle, xs, zs[j0], refine)
    f_row, w_row = _cumulative_simpson(fx_row, wx_row, xs, refine, i0)
    fz_col, wz_col, col_ok = _col_forms(bundle, xs, zs, refine)
    f_col, w_col = _cumulative_simpson_cols(fz_col, wz_col, zs, refine, j0)

    fl0 = bundle.fields_fn(np.array([xs[i0]]), np.array([zs[j0]]), 2)
    f_ref, w_ref = fl0["f"].value[0], fl0["W"].value[0]
    f_quad = f_ref + f_row[:, None] + f_col
    w_quad = w_ref + w_row[:, None] + w_col

    # a target point is usable if its row segment to i0 and column segment are clean
    path_ok = np.zeros_like(ok)
    for i in range(len(xs)):
        ri = row_ok[min(i, i0):max(i, i0) + 1] if i != i0 else np.array([True])
        if not np.all(ri):
            continue
        for j in range(len(zs)):
            cj = col_ok[i, min(j, j0):max(j, j0) + 1] if j != j0 else np.array([True])
            if ok[i, j] and np.all(cj):
                path_ok[i, j] = True
    if not np.any(path_ok):
        raise DomainError("quadrature cross-check: no admissible integration paths")

    fl = bundle.fields_fn(xg[path_ok], zg[path_ok], 2)
    resid = np.maximum(np.abs(f_quad[path_ok] - fl["f"].value),
                       np.abs(w_quad[path_ok] - fl["W"].value))
    return _result("wf_quadrature", resid, xg[path_ok], zg[path_ok], tol,
                   extra={"points": int(np.count_nonzero(path_ok))})


def _fine_axis(nodes, refine):
    cells = np.diff(nodes)
    offs = np.arange(refine + 1) / refine
    return nodes[:-1, None] + cells[:, None] * offs[None, :]  # (ncell, refine+1)


def _row_forms(bundle, xs, z0, refine):
    fine = _fine_axis(xs, refine)
    zz = np.full_like(fine, z0)
    okf = bundle.domain.mask(fine, zz)
    with np.errstate(all="ignore"):
        forms = bundle.derivative_forms(fine, zz)
    # off-domain cells only feed paths that get filtered out; keep them from
    # poisoning the cumulative sums with non-finite values
    f_x = np.where(okf, forms["f_x"], 0.0)
    w_x = np.where(okf, forms["W_x"], 0.0)
    row_ok = np.ones(len(xs), dtype=bool)
    row_ok[:-1] &= np.all(okf, axis=1)
    row_ok[1:] &= np.all(okf, axis=1)
    return f_x, w_x, row_ok


def _col_forms(bundle, xs, zs, refine):
    fine = _fine_axis(zs, refine)  # (nz-1, r+1)
    xg = xs[:, None, None] + 0.0 * fine[None, :, :]
    zg = np.broadcast_to(fine[None, :, :], xg.shape)
    okf = bundle.domain.mask(xg, zg)
    with np.errstate(all="ignore"):
        forms = bundle.derivative_forms(xg, zg)
    f_z = np.where(okf, forms["f_z"], 0.0)
    w_z = np.where(okf, forms["W_z"], 0.0)
    col_ok = np.ones((len(xs), len(zs)), dtype=bool)
    col_ok[:, :-1] &= np.all(okf, axis=2)
    col_ok[:, 1:] &= np.all(okf, axis=2)
    return f_z, w_z, col_ok


def _simpson_weights(refine):
    w = np.ones(refine + 1)
    w[1:-1:2], w[2:-1:2] = 4.0, 2.0
    return w / 3.0


def _cumulative_simpson(fv, wv, nodes, refine, i0):
    h = np.diff(nodes) / refine
    w = _simpson_weights(refine)
    cf = np.concatenate([[0.0], np.cumsum(np.sum(fv * w, axis=1) * h)])
    cw = np.concatenate([[0.0], np.cumsum(np.sum(wv * w, axis=1) * h)])
    return cf - cf[i0], cw - cw[i0]


def _cumulative_simpson_cols(fv, wv, nodes, refine, j0):
    h = np.diff(nodes) / refine
    w = _simpson_weights(refine)
    cf = np.concatenate([np.zeros((fv.shape[0], 1)),
                         np.cumsum(np.sum(fv * w, axis=2) * h, axis=1)], axis=1)
    cw = np.concatenate([np.zeros((wv.shape[0], 1)),
                         np.cumsum(np.sum(wv * w, axis=2) * h, axis=1)], axis=1)
    return cf - cf[:, j0:j0 + 1], cw - cw[:, j0:j0 + 1]


def check_equation(bundle: FieldBundle, rng: np.random.Generator, probes: int,
                   tol: float, which: str) -> CheckResult:
    """Constraint residual at random safe points (relative-normalized)."""
    x, z = _sample_points(bundle, rng, probes)
    if which == "eq5":
        if bundle.quadruple is None:
            raise ConfigError(f"family {bundle.family!r} has no constant-slope quadruple (eq5)")
        raw = four_function_residual(bundle.quadruple, x, z)
        rel = four_function_residual(bundle.quadruple, x, z, relative=True)
    elif which == "eq10":
        if bundle.general_quadruple is None:
            raise ConfigError(f"family {bundle.family!r} has no variable-slope quadruple (eq10)")
        raw = variable_slope_residual(bundle.general_quadruple, x, z)
        rel = variable_slope_residual(bundle.general_quadruple, x, z, relative=True)
    else:
        raise ConfigError(f"unknown equation check {which!r}")
    return _result(which, raw, x, z, tol,
                   extra={"max_rel": float(np.max(np.abs(rel))), "probes": int(x.size)})


def _sample_points(bundle: FieldBundle, rng: np.random.Generator, count: int):
    x_lo, x_hi, z_lo, z_hi = bundle.domain.rect
    xs: list[float] = []
    zs: list[float] = []
    for _ in range(200):
        x = rng.uniform(x_lo, x_hi, count)
        z = rng.uniform(z_lo, z_hi, count)
        ok = bundle.domain.mask(x, z)
        need = count - len(xs)
        xs.extend(x[ok][:need])
        zs.extend(z[ok][:need])
        if len(xs) >= count:
            return np.array(xs), np.array(zs)
    raise DomainError(f"could not sample {count} safe points (domain too thin)")


# ---------------------------------------------------------------------------
# reconstruction of the underlying potential
# ---------------------------------------------------------------------------

_FD_STENCILS = {
    1: (np.array([-0.5, 0.0, 0.5]), 1 / 6),
    2: (np.array([1.0, -2.0, 1.0]), 1 / 12),
    3: (np.array([-0.5, 1.0, 0.0, -1.0, 0.5]), 1 / 4),
    4: (np.array([1.0, -4.0, 6.0, -4.0, 1.0]), 1 / 6),
}


def reconstruct_u(bundle: FieldBundle, grid: GridSpec, tol: float,
                  path_tol: float = 1e-6) -> CheckResult:
    """Rebuild U by repeated line quadrature and check the original equation.

    The chain fields are the n-th mixed partials of U; integrating the pair
    ``(a^{j+1} dx + a^j dz)`` n times produces U up to an irrelevant
    polynomial.  The reported residual applies an order-n central stencil to
    U in each direction and pushes the z-result through the family's top map,
    so the check is independent of the jets used to build the fields.  The
    finite-difference truncation budget C*h^2 is added to the tolerance and
    recorded.
    """
    n = bundle.n
    if n > 4:
        raise ConfigError("reconstruction supports degree n <= 4 (stencil table)")
    if grid.fd_h is not None:
        grid = GridSpec(grid.x_lo, grid.x_hi, grid.z_lo, grid.z_hi,
                        nx=max(5, int(round((grid.x_hi - grid.x_lo) / grid.fd_h)) + 1),
                        nz=max(5, int(round((grid.z_hi - grid.z_lo) / grid.fd_h)) + 1),
                        m=grid.m)
    xs, zs = grid.axes()
    xg, zg = np.meshgrid(xs, zs, indexing="ij")
    if not np.all(bundle.domain.mask(xg, zg)):
        raise DomainError("reconstruction needs a fully admissible rectangle; shrink the grid")
    hx, hz = xs[1] - xs[0], zs[1] - zs[0]

    fl = bundle.eval_fields(xg, zg, 2)
    levels = [_real_field(fl[f"a{j}"].value, f"a{j}") for j in range(n)]
    levels.append(_real_field(fl["W"].value, "W"))

    # both quadrature paths are O(h^2) approximations, so their disagreement
    # carries the same trapezoid truncation allowance as the residual itself
    second = 0.0
    for j in range(n):
        second = max(second,
                     float(np.max(np.abs(jet_partial(fl[f"a{j}"], 2, 0)))),
                     float(np.max(np.abs(jet_partial(fl[f"a{j}"], 0, 2)))))
    span_x, span_z = grid.x_hi - grid.x_lo, grid.z_hi - grid.z_lo
    path_budget = 3.0 * n * (hx ** 2 * span_x + hz ** 2 * span_z) / 12.0 * second

    path_defect = 0.0
    for _ in range(n):
        nxt = []
        for j in range(len(levels) - 1):
            pot, defect = _potential(levels[j + 1], levels[j], hx, hz)
            path_defect = max(path_defect, defect)
            nxt.append(pot)
        levels = nxt
    if path_defect > path_tol + path_budget:
        raise QuadratureError(
            f"quadrature path inconsistency {path_defect:.3e} above "
            f"{path_tol + path_budget:.3e}: the field bundle is not integrable"
        )
    u = levels[0]

    st, err_c = _FD_STENCILS[n]
    w = len(st) // 2
    fdx = sum(c * u[i: u.shape[0] - (len(st) - 1 - i), w:-w] for i, c in enumerate(st)) / hx ** n
    fdz = sum(c * u[w:-w, i: u.shape[1] - (len(st) - 1 - i)] for i, c in enumerate(st)) / hz ** n
    xi, zi = xg[w:-w, w:-w], zg[w:-w, w:-w]
    w_of = bundle.w_of_f(fdz.ravel(), xi.ravel(), zi.ravel()).reshape(fdz.shape)
    resid = np.abs(fdx - _real_field(w_of, "W(f)"))

    trunc, floor = _fd_budget(bundle, fl, u, st, n, err_c, hx, hz, second)
    eff_tol = tol + trunc + floor
    out = _result("reconstruct", resid, xi, zi, eff_tol,
                  extra={"fd_budget": trunc, "fd_roundoff_floor": floor,
                         "base_tolerance": tol, "path_budget": path_budget,
                         "path_consistency": path_defect, "hx": hx, "hz": hz})
    return out


def _real_field(v, what):
    v = np.asarray(v)
    if np.iscomplexobj(v):
        scale = max(float(np.max(np.abs(v))), 1.0)
        if np.max(np.abs(v.imag)) > 1e-9 * scale:
            raise DomainError(f"reconstruction needs real fields; {what} has a large imaginary part")
        return v.real.copy()
    return v


def _potential(gx, gz, hx, hz):
    """Potential of the closed form gx dx + gz dz on the grid, both paths."""
    row = np.concatenate([[0.0], np.cumsum((gx[1:, 0] + gx[:-1, 0]) / 2 * hx)])
    col = np.concatenate([np.zeros((gz.shape[0], 1)),
                          np.cumsum((gz[:, 1:] + gz[:, :-1]) / 2 * hz, axis=1)], axis=1)
    pot = row[:, None] + col
    col0 = np.concatenate([[0.0], np.cumsum((gz[0, 1:] + gz[0, :-1]) / 2 * hz)])
    rows = np.concatenate([np.zeros((1, gx.shape[1])),
                           np.cumsum((gx[1:, :] + gx[:-1, :]) / 2 * hx, axis=0)], axis=0)
    alt = col0[None, :] + rows
    return pot, float(np.max(np.abs(pot - alt)))


def _fd_budget(bundle, fl, u, st, n, err_c, hx, hz, second):
    """Error allowance of the oracle: stencil truncation, propagated trapezoid
    truncation, and the roundoff floor of dividing n-th differences by h^n."""
    wxx = float(np.max(np.abs(jet_partial(fl["W"], 2, 0))))
    a0zz = float(np.max(np.abs(jet_partial(fl["a0"], 0, 2))))
    f_z = np.abs(jet_partial(fl["f"], 0, 1))
    w_z = np.abs(jet_partial(fl["W"], 0, 1))
    healthy = f_z > 0.05 * max(float(np.max(f_z)), 1e-30)
    slope = float(np.max(w_z[healthy] / f_z[healthy])) if np.any(healthy) else 1.0
    fd_part = err_c * (hx ** 2 * wxx + hz ** 2 * slope * a0zz)
    quad_part = n * (hx ** 2 + hz ** 2) / 12.0 * second
    floor = (50.0 * np.finfo(float).eps * (float(np.max(np.abs(u))) + 1.0)
             * float(np.sum(np.abs(st))) * (1.0 + slope) / min(hx, hz) ** n)
    return 3.0 * (fd_part + quad_part), floor


def richardson_ratio(bundle: FieldBundle, grid: GridSpec, tol: float) -> tuple[float, CheckResult, CheckResult]:
    """Residual ratio under halving the reconstruction step."""
    coarse = reconstruct_u(bundle, grid, tol)
    fine_grid = GridSpec(grid.x_lo, grid.x_hi, grid.z_lo, grid.z_hi,
                         nx=2 * grid.nx - 1, nz=2 * grid.nz - 1, m=grid.m)
    fine = reconstruct_u(bundle, fine_grid, tol)
    denom = fine.max_abs if fine.max_abs > 0 else 1e-300
    return coarse.max_abs / denom, coarse, fine


# ---------------------------------------------------------------------------
# suite driver
# ---------------------------------------------------------------------------


def default_checks(bundle: FieldBundle) -> list[str]:
    checks = ["compat", "dependence"]
    if bundle.wf_residual is not None:
        checks.append("wf")
    if bundle.quadruple is not None:
        checks.append("eq5")
    if bundle.general_quadruple is not None:
        checks.append("eq10")
    return checks


def run_suite(
    bundle: FieldBundle,
    grid: GridSpec,
    checks: Iterable[str],
    tolerances: dict | None = None,
    seed: int = 0,
    probes: int = 100,
) -> ResidualReport:
    """Run the selected checks and assemble the report."""
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    for name in tol:
        if name not in DEFAULT_TOLERANCES:
            raise ConfigError(f"unknown tolerance name {name!r}")
        if tol[name] <= 0:
            raise ConfigError(f"tolerance {name!r} must be positive")
    checks = list(checks)
    for name in checks:
        if name not in KNOWN_CHECKS:
            raise ConfigError(f"unknown check name {name!r}; known: {KNOWN_CHECKS}")

    rng = np.random.default_rng(seed)
    results: dict[str, CheckResult] = {}
    for name in checks:
        if name == "compat":
            results[name] = check_compatibility(bundle, grid, tol["compat"])
        elif name == "dependence":
            results[name] = check_dependence(bundle, grid, tol["dependence"])
        elif name == "wf":
            for res in check_wf_relation(bundle, grid, tol["wf"], tol["wf_quadrature"]):
                results[res.name] = res
        elif name in ("eq5", "eq10"):
            results[name] = check_equation(bundle, rng, probes, tol[name], name)
        elif name == "reconstruct":
            results[name] = reconstruct_u(bundle, grid, tol["reconstruct"],
                                          tol["path_consistency"])
    meta = {
        "family": bundle.family,
        "params": bundle.params,
        "mutations": bundle.mutations,
        "grid": grid.meta(),
        "seed": seed,
        "probes": probes,
        "checks": checks,
        "tolerances": {k: tol[k] for k in sorted(tol)},
        "timestamp": None,
    }
    return ResidualReport(meta=meta, checks=results)
