"""Command-line harness.

    jetcount jet       FILE (--scheme NAME | --morphism NAME) --k K
    jetcount count     FILE --scheme NAME --p P --k K [--method M] [--jetring]
    jetcount fiber     FILE --morphism NAME --y Y --p P --k K [--filter F]
    jetcount table     FILE --morphism NAME --primes 3,5 --kmax K [--out DIR]
    jetcount diagnose  FILE --morphism NAME --primes 3,5 --kmax K [--out DIR]
    jetcount presburger {eval,sup,classify} TEXT [--q Q] [--s S]

Exit status: 0 on success, 1 when a work budget refuses the job, 2 on
parse or validation errors.  Settings come from flags, then ``--config``
(a JSON object keyed by flag name), then defaults.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from .counting import count_fiber, count_points, count_points_jetring
from .deffile import load_definitions
from .diagnostics import (
    InsufficientCoverage,
    ScanSpec,
    Verdict,
    esmooth_diagnostic,
    frs_diagnostic,
    jetflat_diagnostic,
    scan_gh,
)
from .limits import DEFAULT_BUDGET, DEFAULT_PRIME_FLOOR, BudgetExceeded, Limits, is_prime
from .presburger import classify_nonneg, eval_constructible, parse_constructible, sup_over_domain
from .schemes import check_morphism, jet_morphism, jet_prolong

EXIT_OK, EXIT_BUDGET, EXIT_INVALID = 0, 1, 2

DEFAULTS = {
    "budget": DEFAULT_BUDGET,
    "prime_floor": DEFAULT_PRIME_FLOOR,
    "primes": "3,5",
    "kmax": 3,
    "cap": 256,
    "seed": 0,
    "jobs": None,
    "method": "auto",
    "out": None,
}


class ConfigError(ValueError):
    pass


def _parse_primes(text) -> list[int]:
    if isinstance(text, (list, tuple)):
        items = list(text)
    else:
        items = [t for t in str(text).replace(" ", "").split(",") if t]
    try:
        primes = [int(t) for t in items]
    except ValueError:
        raise ConfigError(f"--primes: not a list of integers: {text!r}") from None
    bad = [p for p in primes if not is_prime(p)]
    if bad or not primes:
        raise ConfigError(f"--primes: not prime: {bad}")
    return primes


def _frac(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget", type=int, default=None)
    common.add_argument("--prime-floor", dest="prime_floor", type=int, default=None)
    common.add_argument("--config", type=Path, default=None)
    common.add_argument("--jobs", type=int, default=None)

    scan = argparse.ArgumentParser(add_help=False)
    scan.add_argument("file", type=Path)
    scan.add_argument("--morphism", required=True)
    scan.add_argument("--primes", default=None)
    scan.add_argument("--kmax", type=int, default=None)
    scan.add_argument("--cap", type=int, default=None)
    scan.add_argument("--seed", type=int, default=None)
    scan.add_argument("--method", choices=("naive", "tree", "auto"), default=None)
    scan.add_argument("--out", type=Path, default=None)

    ap = argparse.ArgumentParser(prog="jetcount", description=__doc__.split("\n\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("jet", parents=[common], help="print jet equations")
    p.add_argument("file", type=Path)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--scheme")
    g.add_argument("--morphism")
    p.add_argument("--k", type=int, required=True)

    p = sub.add_parser("count", parents=[common], help="count points of a scheme mod p^k")
    p.add_argument("file", type=Path)
    p.add_argument("--scheme", required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--method", choices=("naive", "tree", "auto"), default="auto")
    p.add_argument("--jetring", action="store_true", help="count over F_p[t]/(t^k) instead")

    p = sub.add_parser("fiber", parents=[common], help="count one fiber mod p^k")
    p.add_argument("file", type=Path)
    p.add_argument("--morphism", required=True)
    p.add_argument("--y", required=True, help="colon-separated target residues")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--filter", choices=("all", "singular"), default="all")
    p.add_argument("--method", choices=("naive", "tree", "auto"), default="auto")

    sub.add_parser("table", parents=[common, scan], help="scan g and h into a CSV table")
    sub.add_parser("diagnose", parents=[common, scan], help="scan and write all three verdicts")

    p = sub.add_parser("presburger", parents=[common], help="constructible-function tools")
    p.add_argument("action", choices=("eval", "sup", "classify"))
    p.add_argument("function")
    p.add_argument("--q", default=None)
    p.add_argument("--s", type=int, default=None)
    return ap


def _effective(args) -> dict:
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None) is not None:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"--config {args.config}: {exc}") from None
        if not isinstance(loaded, dict):
            raise ConfigError(f"--config {args.config}: expected a JSON object")
        unknown = set(loaded) - set(DEFAULTS)
        if unknown:
            raise ConfigError(f"--config {args.config}: unknown keys {sorted(unknown)}")
        cfg.update(loaded)
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    if cfg["jobs"] is None:
        cfg["jobs"] = os.cpu_count() or 1
    if int(cfg["kmax"]) < 1:
        raise ConfigError("--kmax must be at least 1")
    return cfg


def _limits(cfg) -> Limits:
    return Limits(int(cfg["budget"]), int(cfg["prime_floor"]))


def _write(out: Path | None, name: str, text: str) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    out.mkdir(parents=True, exist_ok=True)
    (out / name).write_text(text)


def _config_echo(args, cfg) -> str:
    echo = {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items() if k != "config"}
    echo.update({k: cfg[k] for k in ("budget", "prime_floor", "primes", "kmax", "cap", "seed", "method")})
    echo["primes"] = _parse_primes(cfg["primes"])
    echo.pop("jobs", None)
    echo.pop("out", None)
    return json.dumps(echo, indent=2, sort_keys=True) + "\n"


def _verdict_or_note(kind: str, fn) -> Verdict:
    try:
        return fn()
    except InsufficientCoverage as exc:
        return Verdict(kind, "inconclusive", None, [], {}, [f"insufficient coverage: {exc}"])


def _run(args) -> int:
    cfg = _effective(args)
    limits = _limits(cfg)
    cmd = args.command

    if cmd == "presburger":
        f = parse_constructible(args.function)
        if args.action == "classify":
            res = classify_nonneg(f)
            line = res.answer
            if res.answer == "counterexample":
                line += f" s={res.s} q={_frac(res.q)} value={_frac(res.value)}"
            print(line)
        elif args.action == "eval":
            if args.q is None or args.s is None:
                raise ConfigError("presburger eval needs --q and --s")
            print(_frac(eval_constructible(f, Fraction(args.q), args.s)))
        else:
            if args.q is None:
                raise ConfigError("presburger sup needs --q")
            res = sup_over_domain(f, Fraction(args.q))
            if hasattr(res, "sup"):
                print(f"bounded sup={_frac(res.sup)} argmax={res.argmax} tail={res.tail_bound}")
            else:
                c, a, b = res.term
                print(f"unbounded term=({_frac(c)},{a},{b}) witness_s={res.witness_s}")
        return EXIT_OK

    defs = load_definitions(args.file)

    def scheme(name):
        if name not in defs.schemes:
            raise ConfigError(f"no scheme named {name!r} in {args.file}")
        return defs.schemes[name]

    def morphism(name):
        if name not in defs.morphisms:
            raise ConfigError(f"no morphism named {name!r} in {args.file}")
        return defs.morphisms[name]

    if cmd == "jet":
        if args.k < 0:
            raise ConfigError("--k must be non-negative")
        if args.scheme:
            for e in jet_prolong(scheme(args.scheme), args.k).scheme.equations:
                print(e)
        else:
            for c in jet_morphism(morphism(args.morphism), args.k).morphism.components:
                print(c)
        return EXIT_OK

    if cmd == "count":
        X = scheme(args.scheme)
        if args.jetring:
            res = count_points_jetring(X, args.p, args.k, limits)
        else:
            res = count_points(X, args.p, args.k, args.method, limits)
        print(res.count)
        return EXIT_OK

    if cmd == "fiber":
        try:
            y = [int(v) for v in args.y.split(":")]
        except ValueError:
            raise ConfigError(f"--y: expected colon-separated integers, got {args.y!r}") from None
        res = count_fiber(morphism(args.morphism), y, args.p, args.k, args.filter, args.method, limits)
        print(res.count)
        return EXIT_OK

    # table / diagnose
    phi = morphism(args.morphism)
    primes = _parse_primes(cfg["primes"])
    bad = check_morphism(phi, min(primes), seed=int(cfg["seed"]))
    if bad:
        raise ConfigError(f"morphism {phi.name} leaves its target at F_{min(primes)} point {bad[0]}")
    spec = ScanSpec(phi, tuple(primes), int(cfg["kmax"]), int(cfg["cap"]), int(cfg["seed"]),
                    method=str(cfg["method"]))
    table = scan_gh(spec, limits, jobs=int(cfg["jobs"]))
    out = Path(cfg["out"]) if cfg["out"] is not None else None
    if out is not None:
        _write(out, "config.json", _config_echo(args, cfg))
    _write(out, "gh_table.csv", table.to_csv())
    if cmd == "diagnose":
        frs = _verdict_or_note("FRS", lambda: frs_diagnostic(table))
        es = _verdict_or_note("E-smooth", lambda: esmooth_diagnostic(table))
        jf = _verdict_or_note("jet-flat", lambda: jetflat_diagnostic(table, phi.target.declared_dim, frs))
        doc = json.dumps([v.to_dict(spec) for v in (frs, es, jf)], indent=2, sort_keys=True) + "\n"
        _write(out, "verdicts.json", doc)
    return EXIT_BUDGET if table.truncated else EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        return _run(args)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
