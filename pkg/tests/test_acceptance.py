"""One test per acceptance criterion; each prints a single PASS/FAIL line."""

import itertools
import time
from fractions import Fraction

from sepgen import counting, gencalc, matrix_algebra as ma, oracle, verify


def test_criterion_01_formula_equals_oracle(report):
    start = time.perf_counter()
    bad, cases = [], 0
    for q, n, g in verify.etale_grid(10**6):
        cases += 1
        if oracle.count_etale(q, n, g).normalized != counting.n_etale(q, n, g):
            bad.append((q, n, g))
    spots = (counting.n_etale(2, 2, 2), counting.n_etale(2, 6, 1), counting.n_etale(2, 3, 1))
    elapsed = time.perf_counter() - start
    report(1, not bad and spots == (6, 9, 2) and elapsed < 120,
           f"formula = oracle on {cases} cases with q^(ng) <= 10^6, spots {spots}, {elapsed:.1f}s")


def test_criterion_02_burnside(report):
    bad = [(q, n, g) for q in (2, 3, 5) for n in range(1, 61) for g in range(0, 9)
           if sum(d * counting.n_etale(q, d, g) for d in counting.divisors(n)) != q ** (g * n)]
    report(2, not bad, f"sum_d d N_(q,d)(g) = q^(gn) for q in {{2,3,5}}, n <= 60, g <= 8; failures {bad[:3]}")


def _m2f2_generates(a, b):
    """Closure of {0, 1, a, b} under + and * in M_2(F_2), matrices as 4-bit tuples."""

    def mul(x, y):
        return ((x[0] * y[0] + x[1] * y[2]) % 2, (x[0] * y[1] + x[1] * y[3]) % 2,
                (x[2] * y[0] + x[3] * y[2]) % 2, (x[2] * y[1] + x[3] * y[3]) % 2)

    s = {(0, 0, 0, 0), (1, 0, 0, 1), a, b}
    while True:
        t = s | {tuple((u + v) % 2 for u, v in zip(x, y)) for x in s for y in s} | {mul(x, y) for x in s for y in s}
        if t == s:
            return len(s) == 16
        s = t


def test_criterion_03_matrix_anchor(report):
    res = oracle.count_matrix(2, 1, 2, 2)
    mats = list(itertools.product(range(2), repeat=4))
    independent = sum(_m2f2_generates(a, b) for a in mats for b in mats)
    b = counting.matrix_bounds(2, 1, 2, 2)
    pair_lower = counting.ceil_div(2**4, 6)
    all_tuples = 2**8 // 6
    ok = (res.raw_count == independent == 96 and res.normalized == 16
          and pair_lower == 3 <= 16 <= all_tuples == 42 and b.upper == 32 and 16 <= b.upper
          and res.raw_count >= 2**4)
    report(3, ok, f"|S_2| = {res.raw_count} (set closure {independent}), N = {res.normalized}, "
                  f"{pair_lower} <= 16 <= {all_tuples}, 16 <= {b.upper}, 96 >= 16")


def test_criterion_04_free_action(report):
    parts, ok = [], True
    for q in (2, 3):
        sizes, divisible, S, C = verify.free_action(q, 1, 2, 2)
        ok &= sizes and divisible
        parts.append(f"q={q}: |S_2|={S}, C={C}, orbits all size C: {sizes}")
    report(4, ok, "; ".join(parts))


def test_criterion_05_upper_triangular_triple(report):
    parts, ok = [], True
    for q in (2, 3):
        t = ma.upper_triangular_triple(q)
        dim, trivial, gen = ma.span_closure_dim(t), ma.stabilizer_is_trivial(t), ma.generates_full(t)
        ok &= dim == 3 and trivial and not gen
        parts.append(f"q={q}: dim {dim}, trivial stabilizer {trivial}, generates {gen}")
    report(5, ok, "; ".join(parts))


def test_criterion_06_constructive_pairs(report):
    start = time.perf_counter()
    checked, failures = verify.constructive_pairs(draws=100, seed=2024)
    cases = len(list(verify.pair_cases()))
    report(6, checked > 0 and not failures,
           f"{checked} pairs (with shifts) over {cases} (q,n,m) cases, {len(failures)} failures, "
           f"{time.perf_counter() - start:.1f}s")


def test_criterion_07_etale_bracket(report):
    bad = []
    for q in (2, 3, 4, 5):
        for n in range(1, 7):
            # walk r upward, tracking gen incrementally
            g = 0
            for r in range(1, 10**4 + 1):
                while counting.n_etale(q, n, g) < r:
                    g += 1
                lo, hi = gencalc.etale_bracket(q, n, r)
                if not lo <= g <= hi or (n == 1 and g != lo):
                    bad.append((q, n, r))
    spot = gencalc.gen_pure_etale(2, 2, 7) == 3 and gencalc.etale_bracket_check(2, 2, 7)
    report(7, not bad and spot, f"q in {{2,3,4,5}}, n <= 6, r <= 10^4; failures {bad[:3]}")


def test_criterion_08_dimension_bound(report):
    specs = list(verify.random_etale_specs(500, seed=11))
    bad = [s for s in specs if not all(p.m == 1 for p in s.parts) or s.dimension > 10**4
           or gencalc.gen_algebra(s).value > counting.ceil_log(s.dimension, s.q.value)]
    tight = [(q, d) for q in (2, 3, 4) for d in range(1, 10**4 + 1, 37)
             if gencalc.gen_algebra(gencalc.AlgebraSpec.build(q, [(1, 1, d)])).value != counting.ceil_log(d, q)]
    report(8, len(specs) == 500 and not bad and not tight,
           f"500 random etale specs within ceil(log_q dim); equality on (F_q)^d; failures {len(bad)}, {len(tight)}")


def test_criterion_09_intervals(report):
    ctx = gencalc.OracleContext()
    rep = gencalc.intervals(2, 1, 2, 2, ctx=ctx)
    I0, I1 = rep.I0.as_set(), rep.I1.as_set()
    partition = not I0 & I1 and I0 | I1 == set(range(rep.N_prev + 1, rep.N_curr + 1))
    bound = rep.i1_lower_bounds["first-column"]
    floor = lambda r: counting.ceil_log(6 * r, 2**4)  # noqa: E731
    offsets = all(gencalc.gen_pure_matrix(2, 1, 2, r, ctx=ctx).value == floor(r) for r in I0) and all(
        gencalc.gen_pure_matrix(2, 1, 2, r, ctx=ctx).value == floor(r) + 1 for r in I1)
    ok = I0 == set(range(3, 17)) and I1 == {1, 2} and partition and bound == 1 <= len(I1) and offsets
    report(9, ok, f"I0 = {min(I0)}..{max(I0)}, I1 = {sorted(I1)}, partition {partition}, "
                  f"floor(2^3/6) = {bound} <= {len(I1)}, offsets {offsets}")


def _rank_gf2(cols):
    basis = []
    for v in cols:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
    return len(basis)


def test_criterion_10_rank_counts(report):
    exhaustive = all(
        counting.rank_count(2, d, g) == sum(_rank_gf2(c) == d for c in itertools.product(range(2**d), repeat=g))
        for d in range(1, 4) for g in range(0, 4)
    )
    inequality = all(
        Fraction(counting.rank_count(q, d, g), q ** (d * g)) >= 1 - sum(Fraction(q**i, q**g) for i in range(d))
        for q in (2, 3) for d in range(1, 7) for g in range(0, 13)
    )
    report(10, exhaustive and inequality,
           f"rank counts = enumeration for d, g <= 3: {exhaustive}; inequality on d <= 6, g <= 12: {inequality}")


def test_criterion_11_montecarlo(report):
    target = Fraction(96, 256)
    tried = []
    for seed in (0, 1):  # one re-seed allowed on a miss
        res = oracle.estimate_matrix_fraction(2, 1, 2, 2, samples=10**4, seed=seed)
        tried.append(f"seed {seed}: [{res.ci_low:.4f}, {res.ci_high:.4f}]")
        if res.ci_low <= target <= res.ci_high:
            break
    else:
        res = None
    report(11, res is not None, f"99% interval contains 0.375; {'; '.join(tried)}")
