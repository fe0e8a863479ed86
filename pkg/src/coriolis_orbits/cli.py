"""
Command-line front end.

Subcommands
-----------
classify
    Region, characteristic periods and bifurcation numbers for given Hessian eigenvalues.
rt4bp
    Libration points, region degrees and vertical bifurcation numbers of the
    restricted triangular four-body problem; optionally continues the
    vertical families and writes one CSV per branch.
degree
    Brouwer degree of ``V'`` on one tracked region.

Exit codes: 0 success, 1 an asserted claim failed, 2 invalid input,
3 Brouwer index required but missing, 4 a tracked region has no zero.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .classify import MissingBrouwerIndexError, SpectralData, emanation_report, vertical_period
from .dynamics import Bounds, HamiltonianSystem, NoOrbitFound, continue_branch, default_workers
from .rt4bp import REGION_NAMES, MassTriple, RegionLostZeroError, adaptive_region_degrees, analyze, find_librations, region_degrees

__all__ = ["main", "build_parser", "parse_masses", "format_json", "CSV_HEADER", "SCHEMA_VERSION"]

log = logging.getLogger("coriolis_orbits")

SCHEMA_VERSION = "1"
CSV_HEADER = ("step", "T", "amplitude", "max|z|", "samples")
EXIT_CLAIM, EXIT_INPUT, EXIT_INDEX, EXIT_REGION = 1, 2, 3, 4


class InputError(ValueError):
    pass


def _round(obj):
    if isinstance(obj, dict):
        return {str(k): _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _round(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return None
        x = float(f"{x:.12g}")
        return 0.0 if x == 0 else x
    return obj


def format_json(doc: dict) -> str:
    """Deterministic JSON: schema field first, floats at 12 significant digits."""
    return json.dumps({"schema": SCHEMA_VERSION, **_round(doc)}, indent=2, allow_nan=False)


def parse_masses(text: str, normalize: bool = False) -> MassTriple:
    if text.strip().lower() == "eq":
        return MassTriple.equal()
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError as exc:
        raise InputError(f"cannot parse masses {text!r}") from exc
    if len(vals) != 3:
        raise InputError("expected three comma-separated masses")
    try:
        return MassTriple.normalized(*vals) if normalize else MassTriple(*vals)
    except ValueError as exc:
        hint = "" if normalize else " (use --normalize to rescale)"
        raise InputError(f"{exc}{hint}") from exc


def _positive(text: str) -> float:
    x = float(text)
    if not (x > 0 and math.isfinite(x)):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return x


def _positive_int(text: str) -> int:
    x = int(text)
    if x <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return x


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="coriolis-orbits", description=__doc__.split("\n\n")[0].strip())
    p.add_argument("-v", "--verbose", action="store_true", help="progress logs on stderr")
    p.add_argument("--config", type=Path, help="file of key=value lines supplying option defaults")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="classify an equilibrium from its Hessian eigenvalues")
    c.add_argument("--beta1", type=float, required=True)
    c.add_argument("--beta2", type=float, required=True)
    c.add_argument("--beta3", type=_positive)
    c.add_argument("--ib", type=int, help="Brouwer index (required on the coordinate axes)")

    r = sub.add_parser("rt4bp", help="analyse the restricted triangular four-body problem")
    r.add_argument("--masses", required=True, help="'eq' or m1,m2,m3 summing to 3*sqrt(3)")
    r.add_argument("--normalize", action="store_true", help="rescale the masses to sum to 3*sqrt(3)")
    r.add_argument("--eps", type=_positive, default=0.05, help="initial region offset")
    r.add_argument("--spacing", type=_positive, default=0.02, help="Newton seeding grid spacing")
    r.add_argument("--continue", dest="continue_", action="store_true", help="continue vertical families")
    r.add_argument("--max-steps", type=_positive_int, default=20)
    r.add_argument("--regions", help="comma-separated subset of regions to continue from")
    r.add_argument("--out", type=Path, default=Path("."), help="directory for branch CSV files")

    d = sub.add_parser("degree", help="Brouwer degree of V' on one region")
    d.add_argument("--region", required=True, choices=REGION_NAMES)
    d.add_argument("--masses", required=True)
    d.add_argument("--normalize", action="store_true")
    d.add_argument("--eps", type=_positive, help="fixed offset (default: 0.05, reduced if a zero is too close)")
    return p


def _config_args(path: Path, parser: argparse.ArgumentParser, command: str) -> list[str]:
    """Translate ``key=value`` lines into option strings placed before the command-line ones."""
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction)).choices[command]
    flags = {a.dest: a for a in sub._actions}
    out = []
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        dest = key.replace("-", "_")
        dest = "continue_" if dest == "continue" else dest
        if dest not in flags or not flags[dest].option_strings:
            raise InputError(f"{path}:{lineno}: unknown option {key!r} for {command}")
        action = flags[dest]
        opt = action.option_strings[-1]
        if isinstance(action, argparse._StoreTrueAction):
            if value.lower() in ("1", "true", "yes", "on"):
                out.append(opt)
            elif value.lower() not in ("0", "false", "no", "off"):
                raise InputError(f"{path}:{lineno}: expected a boolean for {key}")
        else:
            out += [opt, value]
    return out


def _parse(argv: Sequence[str]) -> argparse.Namespace:
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", type=Path)
    known, _ = pre.parse_known_args(argv)
    argv = list(argv)
    commands = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction)).choices
    idx = next((i for i, tok in enumerate(argv) if tok in commands), None)
    if known.config is not None and idx is not None:
        # config values come first so explicit flags still override them
        extra = _config_args(known.config, parser, argv[idx])
        argv = argv[: idx + 1] + extra + argv[idx + 1:]
    return parser.parse_args(argv)


# --- commands ------------------------------------------------------------------


def cmd_classify(args) -> tuple[dict, int]:
    betas = SpectralData(args.beta1, args.beta2, args.beta3)
    rep = emanation_report(betas, args.ib)
    doc = {"command": "classify", **rep.to_dict()}
    predictions = [
        {"period": t, "gamma": g, "statement": "branch of closed orbits emanates"}
        for t, g in rep.gammas
    ]
    if "no_planar_orbits" in rep.flags:
        predictions.insert(0, {"statement": "no closed orbits near equilibrium (planar)"})
    doc["predictions"] = predictions
    return doc, 0


def _branch_csv(path: Path, branch) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        for row in branch.to_rows():
            samples = ";".join(" ".join(f"{x:.12g}" for x in pt) for pt in row["samples"])
            w.writerow([row["step"], f"{row['T']:.12g}", f"{row['amplitude']:.12g}",
                        f"{row['max_abs_z']:.12g}", samples])


def cmd_rt4bp(args) -> tuple[dict, int]:
    m = parse_masses(args.masses, args.normalize)
    log.info("locating libration points")
    result = analyze(m, eps=args.eps, spacing=args.spacing)
    doc = {"command": "rt4bp", **result.to_dict()}
    claims = {
        "at_least_seven_branches": result.seven_branches,
        "degrees_match_index_sums": result.degrees_consistent,
    }
    if args.continue_:
        wanted = set(REGION_NAMES if not args.regions else args.regions.split(","))
        unknown = wanted - set(REGION_NAMES)
        if unknown:
            raise InputError(f"unknown regions {sorted(unknown)}")
        sys3 = HamiltonianSystem.rt4bp(m, 3, equilibria=[lp.position for lp in result.points])
        jobs = [(k, lp) for k, lp in enumerate(result.points)
                if lp.region_tag in wanted and lp.vertical_gamma != 0]
        args.out.mkdir(parents=True, exist_ok=True)

        def run(job):
            k, lp = job
            q0 = np.array([lp.position[0], lp.position[1], 0.0])
            T0 = vertical_period(lp.betas.beta3)
            log.info("continuing vertical family from %s point %d (T0 = %.6f)", lp.region_tag, k, T0)
            try:
                br = continue_branch(sys3, q0, T0, max_steps=args.max_steps, bounds=Bounds(),
                                     gamma=lp.vertical_gamma)
            except NoOrbitFound as exc:
                return k, lp, None, str(exc)
            return k, lp, br, None

        with ThreadPoolExecutor(max_workers=default_workers()) as ex:
            outcomes = list(ex.map(run, jobs))
        branches = []
        for k, lp, br, err in outcomes:
            entry = {"point": k, "region": lp.region_tag, "origin_period": vertical_period(lp.betas.beta3)}
            if br is None:
                entry.update({"status": "failed", "error": err})
            else:
                path = args.out / f"branch_{lp.region_tag}_{k}.csv"
                _branch_csv(path, br)
                entry.update({"status": br.status, "steps": len(br.orbits), "csv": str(path),
                              "initial_period": br.orbits[0].T,
                              "extrapolated_period": br.extrapolated_period()})
            branches.append(entry)
        doc["branches"] = branches
    doc["claims"] = claims
    return doc, 0 if all(claims.values()) else EXIT_CLAIM


def cmd_degree(args) -> tuple[int, int]:
    m = parse_masses(args.masses, args.normalize)
    if args.eps is not None:
        return region_degrees(m, args.eps)[args.region], 0
    pts = [lp.position for lp in find_librations(m)]
    degrees, _ = adaptive_region_degrees(m, pts)
    return degrees[args.region], 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _parse(argv)
    except SystemExit as exc:  # argparse reports invalid flags with status 2
        return int(exc.code or 0)
    except (InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        if args.command == "classify":
            doc, code = cmd_classify(args)
        elif args.command == "rt4bp":
            doc, code = cmd_rt4bp(args)
        else:
            value, code = cmd_degree(args)
            print(value)
            return code
    except MissingBrouwerIndexError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INDEX
    except RegionLostZeroError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REGION
    except (InputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(format_json(doc))
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
