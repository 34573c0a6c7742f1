"""Batch front end: construct families, verify them, sweep parameters.

Configs are JSON, outputs are CSV/JSON with 17-significant-digit numbers so
runs diff cleanly; probe sampling is seeded, so identical config plus seed
gives byte-identical reports.  Exit codes: 0 all checks pass, 1 a check
failed (report still written), 2 configuration error, 3 safe-domain error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from .errors import ConfigError, DomainError, MongesolError
from .families import family_from_dict, make_family
from .verifier import (
    DEFAULT_TOLERANCES,
    GridSpec,
    ResidualReport,
    admissible_grid,
    default_checks,
    run_suite,
)

__all__ = ["main", "RunConfig", "cmd_construct", "cmd_verify", "cmd_sweep"]


@dataclasses.dataclass
class RunConfig:
    family_dict: dict
    grid: dict | None = None
    checks: list | None = None
    tolerances: dict = dataclasses.field(default_factory=dict)
    probes: int = 100
    seed: int = 0
    out: str = "."
    mutate: dict = dataclasses.field(default_factory=dict)

    @classmethod
    def load(cls, path: str) -> "RunConfig":
        try:
            raw = json.loads(Path(path).read_text())
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}")
        if not isinstance(raw, dict) or "family" not in raw:
            raise ConfigError("config must be a JSON object with a 'family' section")
        known = {"family", "grid", "checks", "tolerances", "probes", "seed", "out", "mutate"}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config sections: {sorted(unknown)}")
        return cls(
            family_dict=raw["family"],
            grid=raw.get("grid"),
            checks=raw.get("checks"),
            tolerances=dict(raw.get("tolerances") or {}),
            probes=int(raw.get("probes", 100)),
            seed=int(raw.get("seed", 0)),
            out=raw.get("out", "."),
            mutate=dict(raw.get("mutate") or {}),
        )

    def bundle(self):
        cfg = family_from_dict(self.family_dict)
        return make_family(cfg, mutations=self.mutate or None)

    def grid_spec(self, bundle) -> GridSpec:
        if self.grid is None:
            return GridSpec.for_bundle(bundle)
        g = dict(self.grid)
        rect = g.pop("rect", None)
        if rect is not None:
            x_lo, x_hi, z_lo, z_hi = (float(v) for v in rect)
        else:
            x_lo, x_hi, z_lo, z_hi = bundle.domain.rect
            x_lo = float(g.pop("x_lo", x_lo))
            x_hi = float(g.pop("x_hi", x_hi))
            z_lo = float(g.pop("z_lo", z_lo))
            z_hi = float(g.pop("z_hi", z_hi))
        known = {"nx", "nz", "m", "fd_h"}
        unknown = set(g) - known
        if unknown:
            raise ConfigError(f"unknown grid fields: {sorted(unknown)}")
        return GridSpec(x_lo, x_hi, z_lo, z_hi,
                        nx=int(g.get("nx", 21)), nz=int(g.get("nz", 21)),
                        m=int(g.get("m", 2)),
                        fd_h=None if g.get("fd_h") is None else float(g["fd_h"]))


def _fmt(v) -> str:
    return f"{float(v):.17g}"


def _write_report(report: ResidualReport, out_dir: Path):
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.json").write_text(
        json.dumps(report.to_json_dict(), indent=2, sort_keys=False) + "\n"
    )
    with (out_dir / "report.csv").open("w", newline="") as fh:
        csv.writer(fh).writerows(report.csv_rows())


def cmd_construct(config: RunConfig, out_dir: Path) -> int:
    """Evaluate the family's fields on the admissible grid into fields.csv."""
    bundle = config.bundle()
    grid = config.grid_spec(bundle)
    x, z = admissible_grid(bundle, grid)
    fl = bundle.eval_fields(x, z, max(2, grid.m))
    names = [f"a{j}" for j in range(bundle.n)] + ["W", "f"]
    values = {name: np.asarray(fl[name].value) for name in names}
    complex_cols = any(
        np.iscomplexobj(v) and np.max(np.abs(v.imag)) > 1e-12 for v in values.values()
    )
    header = ["x", "z"]
    for name in names:
        header.extend([f"{name}_re", f"{name}_im"] if complex_cols else [name])
    out_dir.mkdir(parents=True, exist_ok=True)
    with (out_dir / "fields.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i in range(x.size):
            row = [_fmt(x[i]), _fmt(z[i])]
            for name in names:
                v = values[name].ravel()[i]
                if complex_cols:
                    row.extend([_fmt(np.real(v)), _fmt(np.imag(v))])
                else:
                    row.append(_fmt(np.real(v)))
            writer.writerow(row)
    print(f"wrote {x.size} rows to {out_dir / 'fields.csv'}")
    return 0


def cmd_verify(config: RunConfig, out_dir: Path) -> int:
    """Run the configured checks; report always written, exit 0 iff all pass."""
    bundle = config.bundle()
    grid = config.grid_spec(bundle)
    checks = config.checks if config.checks is not None else default_checks(bundle)
    report = run_suite(bundle, grid, checks, tolerances=config.tolerances,
                       seed=config.seed, probes=config.probes)
    _write_report(report, out_dir)
    for name, res in report.checks.items():
        status = "pass" if res.passed else "FAIL"
        print(f"{name:16s} {status}  max_abs={res.max_abs:.3e}  tol={res.tolerance:.3e}")
    print(f"report: {out_dir / 'report.json'}")
    return 0 if report.passed else 1


def cmd_sweep(config: RunConfig, param: str, values: list[float], out_dir: Path) -> int:
    """Re-verify the family for each value of one numeric parameter."""
    if not values:
        raise ConfigError("sweep needs a nonempty values list")
    base = dict(config.family_dict)
    if param not in base:
        raise ConfigError(
            f"family {base.get('family')!r} has no parameter {param!r} to sweep"
        )
    rows = [["value", "check", "max_abs", "mean_abs", "tolerance", "passed"]]
    all_pass = True
    for v in values:
        fd = dict(base)
        fd[param] = v
        sub = dataclasses.replace(config, family_dict=fd)
        bundle = sub.bundle()
        grid = sub.grid_spec(bundle)
        checks = sub.checks if sub.checks is not None else default_checks(bundle)
        report = run_suite(bundle, grid, checks, tolerances=sub.tolerances,
                           seed=sub.seed, probes=sub.probes)
        for name, res in report.checks.items():
            rows.append([_fmt(v), name, _fmt(res.max_abs), _fmt(res.mean_abs),
                         _fmt(res.tolerance), str(res.passed).lower()])
            all_pass &= res.passed
    out_dir.mkdir(parents=True, exist_ok=True)
    with (out_dir / "sweep.csv").open("w", newline="") as fh:
        csv.writer(fh).writerows(rows)
    print(f"wrote {len(rows) - 1} rows to {out_dir / 'sweep.csv'}")
    return 0 if all_pass else 1


def _parse_tol(pairs) -> dict:
    out = {}
    for item in pairs or []:
        if "=" not in item:
            raise ConfigError(f"--tol expects name=value, got {item!r}")
        name, _, val = item.partition("=")
        try:
            out[name] = float(val)
        except ValueError:
            raise ConfigError(f"--tol {name}: {val!r} is not a number")
        if name not in DEFAULT_TOLERANCES:
            raise ConfigError(f"--tol: unknown tolerance name {name!r}")
        if out[name] <= 0:
            raise ConfigError(f"--tol {name}: tolerance must be positive")
    return out


def _parse_mutate(pairs) -> dict:
    out = {}
    for item in pairs or []:
        if "=" not in item:
            raise ConfigError(f"--mutate expects name=factor, got {item!r}")
        name, _, val = item.partition("=")
        try:
            out[name] = float(val)
        except ValueError:
            raise ConfigError(f"--mutate {name}: {val!r} is not a number")
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="mongesol",
        description="Construct and verify explicit solution families of the "
                    "degree-n Monge equation.",
    )
    sub = p.add_subparsers(dest="command", required=True)
    for name, desc in (
        ("construct", "evaluate fields on the safe grid into fields.csv"),
        ("verify", "run the verification suite and write report.json/csv"),
        ("sweep", "verify across a list of values of one family parameter"),
    ):
        sp = sub.add_parser(name, help=desc)
        sp.add_argument("--config", required=True, help="path to the JSON run config")
        sp.add_argument("--out", default=None, help="output directory (default: config 'out')")
        sp.add_argument("--tol", action="append", metavar="NAME=VAL",
                        help="tolerance override, repeatable")
        sp.add_argument("--seed", type=int, default=None, help="probe-sampling seed")
        if name == "verify":
            sp.add_argument("--mutate", action="append", metavar="NAME=FACTOR",
                            help="scale one derivative function (sensitivity hook)")
        if name == "sweep":
            sp.add_argument("--param", required=True, help="family parameter to sweep")
            sp.add_argument("--values", required=True,
                            help="comma-separated list of parameter values")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = RunConfig.load(args.config)
        config.tolerances.update(_parse_tol(args.tol))
        if args.seed is not None:
            config.seed = args.seed
        if getattr(args, "mutate", None):
            config.mutate.update(_parse_mutate(args.mutate))
        out_dir = Path(args.out if args.out is not None else config.out)
        if args.command == "construct":
            return cmd_construct(config, out_dir)
        if args.command == "verify":
            return cmd_verify(config, out_dir)
        if args.command == "sweep":
            try:
                values = [float(v) for v in args.values.split(",") if v.strip() != ""]
            except ValueError:
                raise ConfigError(f"--values must be comma-separated numbers: {args.values!r}")
            return cmd_sweep(config, args.param, values, out_dir)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return 3
    except MongesolError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
