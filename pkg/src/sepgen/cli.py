"""Command-line interface.

Every command prints one JSON object (or a TSV table with ``--format tsv``).
Counts are decimal strings. Exit codes: 0 ok, 1 verification failed,
2 invalid input, 3 infeasible under the guard, 4 integrality violation.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import counting, gencalc, matrix_algebra as ma, oracle, verify
from .errors import InvalidInput, SepgenError
from .finite_field import DEFAULT_GUARD, as_prime_power

log = logging.getLogger("sepgen")


@dataclass(frozen=True)
class Config:
    guard: int = DEFAULT_GUARD
    cache_dir: Path | None = None  # None disables the disk cache
    fmt: str = "json"
    samples: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if self.guard < 1:
            raise InvalidInput("guard must be >= 1")
        if self.fmt not in ("json", "tsv"):
            raise InvalidInput("format must be json or tsv")

    def context(self) -> gencalc.OracleContext:
        store = oracle.CacheStore(self.cache_dir) if self.cache_dir else None
        return gencalc.OracleContext(self.guard, store)


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise InvalidInput(f"{name} must be an integer, got {raw!r}") from None


def config_from_args(args) -> Config:
    guard = args.guard if args.guard is not None else _env_int("SEPGEN_GUARD", DEFAULT_GUARD)
    cache = None if args.no_cache else oracle.resolve_cache_dir(args.cache_dir)
    return Config(guard=guard, cache_dir=cache, fmt=args.format)


# -- output ------------------------------------------------------------------------

def _tsv_cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (dict, list)):
        return json.dumps(v, separators=(",", ":"))
    return str(v)


def render(obj: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(obj, indent=2)
    if "rows" in obj and isinstance(obj["rows"], list) and obj["rows"]:
        header = list(obj["rows"][0])
        lines = ["\t".join(header)] + ["\t".join(_tsv_cell(row[k]) for k in header) for row in obj["rows"]]
    else:
        lines = ["\t".join(obj), "\t".join(_tsv_cell(v) for v in obj.values())]
    return "\n".join(lines)


# -- argument helpers ------------------------------------------------------------------

def int_range(text: str) -> list[int]:
    """'5', '1..6' or '1,3,5'."""
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            return list(range(int(a), int(b) + 1))
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, a..b or a,b,c; got {text!r}") from None


def part_arg(text: str) -> dict:
    try:
        kv = dict(item.split("=", 1) for item in text.split(","))
        return {"n": int(kv.get("n", 1)), "m": int(kv.get("m", 1)), "r": int(kv["r"])}
    except (ValueError, KeyError):
        raise argparse.ArgumentTypeError(f"expected n=N,m=M,r=R; got {text!r}") from None


def _positive(name: str, v: int, minimum: int = 1):
    if v < minimum:
        raise InvalidInput(f"--{name} must be >= {minimum}, got {v}")


# -- commands ------------------------------------------------------------------------

def cmd_nfield(args, cfg: Config) -> dict:
    qs, ns, gs = args.q, args.n, args.g
    for q in qs:
        as_prime_power(q)
    for n in ns:
        _positive("n", n)
    for g in gs:
        _positive("g", g, 0)
    if len(qs) == len(ns) == len(gs) == 1:
        return {"N": str(counting.n_etale(qs[0], ns[0], gs[0]))}
    rows = [{"q": str(q), "n": str(n), "g": str(g), "N": str(counting.n_etale(q, n, g))}
            for q in qs for n in ns for g in gs]
    return {"rows": rows}


def cmd_count_etale(args, cfg: Config) -> dict:
    _positive("n", args.n)
    _positive("g", args.g)
    store = oracle.CacheStore(cfg.cache_dir) if cfg.cache_dir else None
    qv = as_prime_power(args.q).value
    res = oracle.cached(
        store, oracle.cache_key("etale", qv, args.n, 1, args.g, "exhaustive"),
        lambda: oracle.count_etale(qv, args.n, args.g, guard=cfg.guard, parts=args.parts, workers=args.workers),
    )
    out = res.to_json()
    out["formula"] = str(counting.n_etale(qv, args.n, args.g))
    return out


def _spec_from_args(args) -> gencalc.AlgebraSpec:
    if args.spec:
        try:
            text = Path(args.spec).read_text(encoding="utf-8")
        except OSError as exc:
            raise InvalidInput(f"cannot read spec file: {exc}") from None
        return gencalc.AlgebraSpec.from_json(text)
    if args.q is None or not args.part:
        raise InvalidInput("give --spec FILE or --q Q with at least one --part n=N,m=M,r=R")
    return gencalc.AlgebraSpec.build(args.q, args.part)


def cmd_gen(args, cfg: Config) -> dict:
    spec = _spec_from_args(args)
    res = gencalc.gen_algebra(spec, args.mode, cfg.context())
    return res.to_json(breakdown=args.breakdown)


def cmd_count_matrix(args, cfg: Config) -> dict:
    for name in ("n", "m"):
        _positive(name, getattr(args, name))
    _positive("g", args.g, 0)
    qv = as_prime_power(args.q).value
    store = oracle.CacheStore(cfg.cache_dir) if cfg.cache_dir else None
    if args.mode == "exact":
        key = oracle.cache_key("matrix", qv, args.n, args.m, args.g, "exhaustive")
        res = oracle.cached(store, key, lambda: oracle.count_matrix(
            qv, args.n, args.m, args.g, guard=cfg.guard, parts=args.parts, workers=args.workers))
    else:
        samples = args.samples if args.samples is not None else cfg.samples
        seed = args.seed if args.seed is not None else cfg.seed
        _positive("samples", samples)
        key = oracle.cache_key("matrix", qv, args.n, args.m, args.g, "montecarlo", samples, seed)
        res = oracle.cached(store, key, lambda: oracle.estimate_matrix_fraction(qv, args.n, args.m, args.g, samples, seed))
    return res.to_json()


def cmd_intervals(args, cfg: Config) -> dict:
    for name in ("n", "m", "g"):
        _positive(name, getattr(args, name))
    return gencalc.intervals(args.q, args.n, args.m, args.g, args.mode, cfg.context()).to_json()


def cmd_pair(args, cfg: Config) -> dict:
    _positive("n", args.n)
    if args.m < 2:
        raise InvalidInput("the generating pair needs --m >= 2")
    alg = ma.matrix_algebra(args.q, args.n, args.m)
    rng = np.random.default_rng(args.seed)
    A, B = ma.random_pair(alg, rng)
    return {
        "q": str(alg.q), "n": str(alg.n), "m": str(alg.m),
        "field": alg.field.descriptor(),
        "A": ma.matrix_to_json(A),
        "B": ma.matrix_to_json(B),
        "generates": ma.generates_full(alg.tuple(A, B)),
        "shifts_generate": all(ma.generates_full(alg.tuple(*pr)) for pr in ma.shifted_family(A, B)),
    }


def cmd_verify(args, cfg: Config) -> dict:
    fault = counting.inject_fault(args.inject_fault) if args.inject_fault else contextlib.nullcontext()
    with fault:
        checks = verify.run(args.suite, cfg.context())
    rows = [{"suite": c.suite, "check": c.name, "result": "pass" if c.passed else "FAIL", "detail": c.detail}
            for c in checks]
    return {"passed": all(c.passed for c in checks), "rows": rows}


# -- parser ----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sepgen", description="Generators of separable algebras over finite fields.")
    ap.add_argument("--guard", type=int, default=None, help="max tuples per exhaustive task (env SEPGEN_GUARD)")
    ap.add_argument("--cache-dir", default=None, help="oracle cache directory (env SEPGEN_CACHE)")
    ap.add_argument("--no-cache", action="store_true", help="do not read or write the oracle cache")
    ap.add_argument("--format", choices=("json", "tsv"), default="json")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("nfield", help="exact N_{q,n}(g); ranges like 1..6 give a table")
    p.add_argument("--q", type=int_range, required=True)
    p.add_argument("--n", type=int_range, required=True)
    p.add_argument("--g", type=int_range, required=True)
    p.set_defaults(func=cmd_nfield)

    p = sub.add_parser("count-etale", help="brute-force count of generating tuples of F_{q^n}")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--parts", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_count_etale)

    p = sub.add_parser("gen", help="minimal number of generators of a separable algebra")
    p.add_argument("--spec", help='JSON file {"q": Q, "parts": [{"n":..,"m":..,"r":..}]}')
    p.add_argument("--q", type=int)
    p.add_argument("--part", type=part_arg, action="append", help="n=N,m=M,r=R (repeatable)")
    p.add_argument("--mode", choices=gencalc.MODES, default=gencalc.ALLOW_ORACLE)
    p.add_argument("--breakdown", action="store_true", help="include per-part results")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("count-matrix", help="|S_g| and N_{q,n,m}(g) by enumeration or sampling")
    for name in ("q", "n", "m", "g"):
        p.add_argument(f"--{name}", type=int, required=True)
    p.add_argument("--mode", choices=("exact", "montecarlo"), default="exact")
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--parts", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_count_matrix)

    p = sub.add_parser("intervals", help="the multiplicity sets I_0(g), I_1(g)")
    for name in ("q", "n", "m", "g"):
        p.add_argument(f"--{name}", type=int, required=True)
    p.add_argument("--mode", choices=gencalc.MODES, default=gencalc.ALLOW_ORACLE)
    p.set_defaults(func=cmd_intervals)

    p = sub.add_parser("pair", help="a random explicit generating pair of M_m(F_{q^n})")
    for name in ("q", "n", "m"):
        p.add_argument(f"--{name}", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_pair)

    p = sub.add_parser("verify", help="run invariant suites")
    p.add_argument("--suite", choices=verify.SUITES + ("all",), default="all")
    p.add_argument("--inject-fault", default=None, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr)
    try:
        cfg = config_from_args(args)
        out = args.func(args, cfg)
    except SepgenError as exc:
        kind = {2: "invalid-input", 3: "infeasible", 4: "integrality"}.get(exc.exit_code, "error")
        print(render({"error": kind, "message": str(exc)}, getattr(args, "format", "json")))
        return exc.exit_code
    print(render(out, cfg.fmt))
    if args.command == "verify" and not out["passed"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
