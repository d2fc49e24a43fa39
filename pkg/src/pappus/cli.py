"""Command-line front end.

    pappus verify [--only ID ...]
    pappus curve C D [--b-max B] [--grid N]
    pappus orbit A B C D [--depth K]
    pappus invariants A B C D

Exit codes: 0 success, 1 certification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import lemmas
from .boxes import PappusParams, commutator
from .duality import (DEFAULT_TOL, curve_csv, curve_svg, psi_value, solve_polarity,
                      trace_curve)
from .errors import NotElliptic, NoPolarity, ParamOutOfRange, PappusError
from .kernel import scalar_str, tau
from .morph import (MAX_DEPTH, MorphParams, generate_orbit, morphed_generators, nesting_report,
                    orbit_to_csv, orbit_to_json, orbit_to_svg, theta_closed_form)

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
FORMATS = ("json", "csv", "svg")


@dataclass
class RunConfig:
    tol: Fraction = DEFAULT_TOL
    depth: int = 5
    grid: int = 40
    out: Path = Path(".")
    formats: tuple = FORMATS
    only: list = field(default_factory=list)

    def __post_init__(self):
        self.tol = Fraction(self.tol)
        if self.tol <= 0:
            raise ValueError("tolerance must be positive")
        if not 0 <= self.depth <= MAX_DEPTH:
            raise ValueError(f"depth must be between 0 and {MAX_DEPTH}")
        if self.grid < 1:
            raise ValueError("grid must be positive")
        bad = set(self.formats) - set(FORMATS)
        if bad:
            raise ValueError(f"unknown formats {sorted(bad)}")
        self.out = Path(self.out)


def rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _formats(text: str) -> tuple:
    return tuple(x.strip() for x in text.split(",") if x.strip())


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="TOML file with default option values")
    common.add_argument("--tol", type=rational, help="bisection tolerance (default 2^-40)")
    common.add_argument("--depth", type=int, help=f"orbit depth (at most {MAX_DEPTH})")
    common.add_argument("--grid", type=int, help="number of grid steps")
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("--format", type=_formats, help="comma-separated subset of json,csv,svg")

    p = argparse.ArgumentParser(prog="pappus", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="run the certifier suite")
    v.add_argument("--only", action="append", default=None, metavar="ID",
                   choices=sorted(lemmas.default_registry()), help="run only this certifier")

    c = sub.add_parser("curve", parents=[common], help="trace a duality curve")
    c.add_argument("c", type=rational)
    c.add_argument("d", type=rational)
    c.add_argument("--b-max", type=rational, default=Fraction(5))

    o = sub.add_parser("orbit", parents=[common], help="morphed orbit and nesting check")
    for name in "abcd":
        o.add_argument(name, type=rational)

    i = sub.add_parser("invariants", parents=[common], help="trace invariants at a parameter")
    for name in "abcd":
        i.add_argument(name, type=rational)
    return p


def load_config(args) -> RunConfig:
    values = {}
    if args.config is not None:
        with open(args.config, "rb") as fh:
            data = tomllib.load(fh)
        for key in ("tol", "depth", "grid", "out"):
            if key in data:
                values[key] = Fraction(str(data[key])) if key == "tol" else data[key]
        if "format" in data:
            values["formats"] = tuple(data["format"])
    for key, attr in (("tol", "tol"), ("depth", "depth"), ("grid", "grid"), ("out", "out"),
                      ("format", "formats")):
        val = getattr(args, key, None)
        if val is not None:
            values[attr] = val
    if getattr(args, "only", None):
        values["only"] = args.only
    return RunConfig(**values)


def _write(cfg: RunConfig, name: str, text: str) -> Path:
    cfg.out.mkdir(parents=True, exist_ok=True)
    path = cfg.out / name
    path.write_text(text)
    return path


def cmd_verify(cfg: RunConfig) -> int:
    certs = lemmas.run_all(only=cfg.only or None)
    print(lemmas.summary_table(certs))
    for x in certs:
        for o in x.failures():
            print(f"  {x.lemma}: FAILED {o.claim}")
        for dsc in x.discrepancies:
            print(f"  {x.lemma}: discrepancy in {dsc['name']}: computed {dsc['computed']}, "
                  f"listed {dsc['printed']}")
    path = _write(cfg, "certificates.json", lemmas.bundle_json(certs))
    print(f"wrote {path}")
    return EXIT_OK if all(x.passed for x in certs) else EXIT_FAIL


def cmd_curve(cfg: RunConfig, c, d, b_max) -> int:
    if b_max <= 1:
        raise ParamOutOfRange("b-max must exceed 1")
    grid = [1 + (b_max - 1) * Fraction(k, cfg.grid) for k in range(1, cfg.grid + 1)]
    rows = trace_curve(c, d, grid, cfg.tol)
    lo = min(r[1] for r in rows)
    hi = max(r[2] for r in rows)
    print(f"curve ({c}, {d}): {len(rows)} points, a in [{float(lo):.12g}, {float(hi):.12g}]")
    if "csv" in cfg.formats:
        print(f"wrote {_write(cfg, 'curve.csv', curve_csv(rows))}")
    if "svg" in cfg.formats:
        print(f"wrote {_write(cfg, 'region.svg', curve_svg(rows, b_max))}")
    return EXIT_OK


def cmd_orbit(cfg: RunConfig, a, b, c, d) -> int:
    params = (a, b, c, d)
    orbit = generate_orbit(params, cfg.depth)
    strict = not MorphParams(a, b).is_identity
    bad = nesting_report(orbit, strict)
    ok = bad is None
    kind = "strict" if strict else "closed"
    print(f"{len(orbit)} boxes at depth {cfg.depth}; {kind} nesting certificate: "
          f"{'pass' if ok else 'FAIL'}")
    if bad is not None:
        print(f"  boxes {bad[0]!r} and {bad[1]!r} are neither nested nor disjoint")
    if "svg" in cfg.formats:
        print(f"wrote {_write(cfg, 'orbit.svg', orbit_to_svg(orbit))}")
    if "json" in cfg.formats:
        print(f"wrote {_write(cfg, 'orbit.json', orbit_to_json(orbit, params, ok))}")
    if "csv" in cfg.formats:
        print(f"wrote {_write(cfg, 'orbit.csv', orbit_to_csv(orbit))}")
    return EXIT_OK if ok else EXIT_FAIL


def invariants(a, b, c, d) -> dict:
    """Trace invariants of the morphed generators, as exact values where possible."""
    PappusParams(c, d)
    MorphParams(a, b)
    r1, r2m = morphed_generators(a, b, c, d)
    out = {
        "tau_r1_r2sq": tau(r1 @ r2m @ r2m),
        "tau_r1sq_r2": tau(r1 @ r1 @ r2m),
        "comm_diff": commutator(r2m, r1).trace() - commutator(r1, r2m).trace(),
        "tr_r1_r2": (r1 @ r2m).trace(),
        "psi": psi_value(a, b, c, d),
        "in_theta": theta_closed_form((a, b)),
    }
    try:
        pol = solve_polarity(r1, r2m, tol=float("inf"))
        out["duality_residual"] = pol.residual
        out["polarity_exact"] = pol.exact
    except (NotElliptic, NoPolarity):
        out["duality_residual"] = None
        out["polarity_exact"] = False
    return out


def cmd_invariants(cfg: RunConfig, a, b, c, d) -> int:
    vals = invariants(a, b, c, d)
    for key, val in vals.items():
        if isinstance(val, Fraction):
            val = scalar_str(val)
        elif isinstance(val, float):
            val = f"{val:.3e}"
        print(f"{key:<18} {val}")
    if "json" in cfg.formats and cfg.out != Path("."):
        text = json.dumps({k: scalar_str(v) if isinstance(v, Fraction) else v for k, v in vals.items()},
                          indent=1)
        print(f"wrote {_write(cfg, 'invariants.json', text)}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args)
    except (ValueError, OSError, tomllib.TOMLDecodeError) as exc:
        parser.error(str(exc))
    try:
        if args.command == "verify":
            return cmd_verify(cfg)
        if args.command == "curve":
            return cmd_curve(cfg, args.c, args.d, args.b_max)
        if args.command == "orbit":
            return cmd_orbit(cfg, args.a, args.b, args.c, args.d)
        return cmd_invariants(cfg, args.a, args.b, args.c, args.d)
    except ParamOutOfRange as exc:
        print(f"pappus: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PappusError as exc:
        print(f"pappus: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
