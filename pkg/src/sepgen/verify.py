"""Invariant suites behind ``sepgen verify``.

Each check returns a :class:`Check`; an exception inside a check counts as a
failure with the exception text as detail.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import counting, gencalc, matrix_algebra as ma, oracle
from .finite_field import DEFAULT_GUARD, as_prime_power


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    passed: bool
    detail: str = ""


def _run(suite, name, fn) -> Check:
    try:
        ok, detail = fn()
    except Exception as exc:  # noqa: BLE001 - any crash is a failed check
        return Check(suite, name, False, f"{type(exc).__name__}: {exc}")
    return Check(suite, name, bool(ok), detail)


# -- formula ------------------------------------------------------------------

def etale_grid(limit: int = 10**6, qs=(2, 3, 4, 5, 7, 8, 9), ns=range(1, 9), gs=range(1, 5)):
    for q in qs:
        for n in ns:
            for g in gs:
                if q ** (n * g) <= limit:
                    yield q, n, g


def _formula_oracle(limit):
    bad = []
    cases = 0
    for q, n, g in etale_grid(limit):
        cases += 1
        got = oracle.count_etale(q, n, g).normalized
        want = counting.n_etale(q, n, g)
        if got != want:
            bad.append((q, n, g, want, got))
    return not bad, f"{cases} cases" + (f"; mismatches {bad[:3]}" if bad else "")


def _burnside():
    bad = [(q, n, g) for q in (2, 3, 5) for n in range(1, 61) for g in range(0, 9)
           if not counting.burnside_identity_check(q, n, g)]
    return not bad, f"failures {bad[:3]}" if bad else "q in {2,3,5}, n <= 60, g <= 8"


def formula_suite(limit: int = 10**6):
    s = "formula"
    spots = {(2, 2, 2): 6, (2, 6, 1): 9, (2, 3, 1): 2}
    yield _run(s, "spot values", lambda: (
        all(counting.n_etale(*k) == v for k, v in spots.items()), str(spots)))
    yield _run(s, "formula = oracle", lambda: _formula_oracle(limit))
    yield _run(s, "burnside identity", _burnside)


# -- bounds -------------------------------------------------------------------

FEASIBLE_MATRIX_CASES = [(2, 1, 2, 1), (2, 1, 2, 2), (2, 1, 2, 3), (3, 1, 2, 1), (3, 1, 2, 2), (2, 2, 2, 1), (2, 1, 3, 1)]


def _etale_bounds_grid():
    bad = []
    for q in (2, 3, 4, 5, 7, 8, 9):
        for n in range(1, 13):
            for g in range(1, 7):
                if not counting.etale_bounds(q, n, g).contains(counting.n_etale(q, n, g)):
                    bad.append((q, n, g))
    return not bad, f"failures {bad[:3]}" if bad else "q<=9, n<=12, g<=6"


def _matrix_containment(ctx):
    rows = []
    ok = True
    for q, n, m, g in FEASIBLE_MATRIX_CASES:
        N = ctx.n_matrix(q, n, m, g)
        b = counting.matrix_bounds(q, n, m, g)
        ok &= b.contains(N)
        rows.append(f"({q},{n},{m},{g}): {b.lower}<={N}<={b.upper}")
    return ok, "; ".join(rows)


def _s2_lower(ctx):
    out = []
    ok = True
    for q, n, m in ((2, 1, 2), (3, 1, 2)):
        S2 = ctx.n_matrix(q, n, m, 2) * counting.group_order_c(q, n, m)
        ok &= S2 >= q ** (n * m * m)
        out.append(f"|S_2|({q},{n},{m})={S2}")
    return ok, ", ".join(out)


def rank_inequality_holds(q: int, d: int, g: int) -> bool:
    lhs = Fraction(counting.rank_count(q, d, g), q ** (d * g))
    rhs = 1 - sum(Fraction(q**i, q**g) for i in range(d))
    return lhs >= rhs


def bounds_suite(ctx: gencalc.OracleContext):
    s = "bounds"
    yield _run(s, "etale bounds bracket N", _etale_bounds_grid)
    yield _run(s, "matrix bounds contain oracle N", lambda: _matrix_containment(ctx))
    yield _run(s, "|S_2| >= q^(n m^2)", lambda: _s2_lower(ctx))
    yield _run(s, "spanning-count inequality", lambda: (
        all(rank_inequality_holds(q, d, g) for q in (2, 3) for d in range(1, 7) for g in range(0, 13)),
        "q in {2,3}, d <= 6, g <= 12"))


# -- orbits --------------------------------------------------------------------

def free_action(q: int, n: int, m: int, g: int, guard: int = DEFAULT_GUARD):
    """(all generating orbits have size C, |S_g| divisible by C, |S_g|, C)."""
    alg = ma.matrix_algebra(q, n, m)
    C = counting.group_order_c(q, n, m)
    maps = ma.automorphism_maps(alg, guard)
    total = oracle.matrix_tuple_count(q, n, m, g)
    vecs = oracle._digits(np.arange(total, dtype=np.int64), alg.p, g * alg.dim).reshape(total, g, alg.dim)
    sizes_ok = True
    S = 0
    for v in vecs:
        if oracle._generates_vectors(alg, v):
            S += 1
            imgs = np.einsum("gd,cde->cge", v, maps) % alg.p
            if len(np.unique(imgs.reshape(len(maps), -1), axis=0)) != C:
                sizes_ok = False
    return sizes_ok, S % C == 0, S, C


def group_order_cases(limit: int = 10**4):
    for q in (2, 3, 4, 5, 7, 8, 9):
        for n in range(1, 5):
            for m in range(1, 4):
                if q ** (n * m * m) <= limit:
                    yield q, n, m


def _group_orders(limit):
    bad = []
    for q, n, m in group_order_cases(limit):
        got = sum(1 for _ in ma.enumerate_automorphisms(ma.matrix_algebra(q, n, m)))
        if got != counting.group_order_c(q, n, m):
            bad.append((q, n, m, got))
    return not bad, f"mismatches {bad}" if bad else f"all cases with q^(n m^2) <= {limit}"


def _triple():
    parts = []
    ok = True
    for q in (2, 3):
        t = ma.upper_triangular_triple(q)
        dim, triv = ma.span_closure_dim(t), ma.stabilizer_is_trivial(t)
        ok &= dim == 3 and triv
        parts.append(f"q={q}: dim {dim}, trivial stabilizer {triv}")
    return ok, "; ".join(parts)


def pair_cases(max_dim: int = 64):
    for q in (2, 3, 4, 5):
        e = as_prime_power(q).e
        for n in (1, 2, 3):
            for m in (2, 3, 4):
                if e * n * m * m <= max_dim:
                    yield q, n, m


def constructive_pairs(draws: int, seed: int = 0, max_dim: int = 64):
    """(pairs checked, failures) over the grid, including all shifts."""
    checked, failures = 0, []
    for q, n, m in pair_cases(max_dim):
        alg = ma.matrix_algebra(q, n, m)
        rng = np.random.default_rng([seed, q, n, m])
        for _ in range(draws):
            A, B = ma.random_pair(alg, rng)
            for pair in [(A, B)] + ma.shifted_family(A, B):
                checked += 1
                if not ma.generates_full(alg.tuple(*pair)):
                    failures.append((q, n, m))
    return checked, failures


def orbits_suite(pair_draws: int = 5):
    s = "orbits"

    def _free():
        out, ok = [], True
        for q in (2, 3):
            sizes, div, S, C = free_action(q, 1, 2, 2)
            ok &= sizes and div
            out.append(f"q={q}: |S_2|={S}, C={C}")
        return ok, "; ".join(out)

    yield _run(s, "free action on generating tuples", _free)
    yield _run(s, "group order = enumeration", lambda: _group_orders(10**4))
    yield _run(s, "upper-triangular triple", _triple)

    def _pairs():
        checked, fails = constructive_pairs(pair_draws)
        return not fails, f"{checked} pairs" + (f", failures {fails[:3]}" if fails else "")

    yield _run(s, "constructed pairs generate", _pairs)


# -- intervals ---------------------------------------------------------------------

def _intervals_212(ctx):
    rep = gencalc.intervals(2, 1, 2, 2, ctx=ctx)
    ok = rep.I0.as_set() == set(range(3, 17)) and rep.I1.as_set() == {1, 2}
    ok &= rep.I0.as_set() | rep.I1.as_set() == set(range(rep.N_prev + 1, rep.N_curr + 1))
    ok &= rep.i1_lower_bounds["first-column"] <= len(rep.I1)
    return ok, f"I0={rep.I0.to_json()}, I1={rep.I1.to_json()}"


def _offsets(ctx):
    rep = gencalc.intervals(2, 1, 2, 2, ctx=ctx)
    ok = all(gencalc.gen_offset(2, 1, 2, r, ctx=ctx) == 0 for r in rep.I0)
    ok &= all(gencalc.gen_offset(2, 1, 2, r, ctx=ctx) == 1 for r in rep.I1)
    return ok, "offset 0 on I0, 1 on I1"


def _etale_brackets(rmax):
    bad = [(q, n, r) for q in (2, 3, 4, 5) for n in range(1, 7) for r in range(1, rmax + 1)
           if not gencalc.etale_bracket_check(q, n, r)
           or (n == 1 and gencalc.gen_pure_etale(q, 1, r) != gencalc.etale_bracket(q, 1, r)[0])]
    return not bad, f"failures {bad[:3]}" if bad else f"r <= {rmax}"


def random_etale_specs(count: int, seed: int, max_dim: int = 10**4):
    rng = random.Random(seed)
    for _ in range(count):
        q = rng.choice((2, 3, 4))
        parts, dim = [], 0
        for _ in range(rng.randint(1, 4)):
            n = rng.randint(1, 8)
            room = (max_dim - dim) // n
            if room < 1:
                break
            r = rng.randint(1, min(room, rng.choice((3, 30, 300, 3000, 10**4))))
            parts.append((n, 1, r))
            dim += n * r
        yield gencalc.AlgebraSpec.build(q, parts or [(1, 1, 1)])


def _dimension_bound(count):
    bad = [s for s in random_etale_specs(count, seed=7) if not gencalc.etale_dimension_bound_check(s)]
    tight = all(gencalc.gen_algebra(gencalc.AlgebraSpec.build(q, [(1, 1, d)])).lo == counting.ceil_log(d, q)
                for q in (2, 3, 4) for d in range(1, 300))
    return not bad and tight, f"{count} random specs; equality on (F_q)^d"


def intervals_suite(ctx: gencalc.OracleContext, rmax: int = 2000, specs: int = 200):
    s = "intervals"
    yield _run(s, "I0/I1 at (2,1,2), g=2", lambda: _intervals_212(ctx))
    yield _run(s, "gen offset matches I0/I1", lambda: _offsets(ctx))
    yield _run(s, "etale two-value bracket", lambda: _etale_brackets(rmax))
    yield _run(s, "dimension bound", lambda: _dimension_bound(specs))
    yield _run(s, "(1,1) has empty I1", lambda: (
        all(len(gencalc.intervals(q, 1, 1, g).I1) == 0 for q in (2, 3, 4) for g in range(1, 8)), "q in {2,3,4}, g <= 7"))


SUITES = ("formula", "bounds", "orbits", "intervals")


def run(suite: str, ctx: gencalc.OracleContext | None = None) -> list[Check]:
    ctx = ctx or gencalc.OracleContext()
    names = SUITES if suite == "all" else (suite,)
    out: list[Check] = []
    for name in names:
        if name == "formula":
            out.extend(formula_suite())
        elif name == "bounds":
            out.extend(bounds_suite(ctx))
        elif name == "orbits":
            out.extend(orbits_suite())
        elif name == "intervals":
            out.extend(intervals_suite(ctx))
        else:
            raise ValueError(f"unknown suite {name!r}")
    return out
