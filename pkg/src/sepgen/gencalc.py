"""Minimal number of generators of a separable F_q-algebra.

A separable algebra over F_q is a product of pure parts M_m(F_{q^n})^r. The
answer for the whole algebra is the maximum over its pure parts. An étale
part (m = 1) is exact by the Möbius count. A matrix part is pinned to two
consecutive values and then resolved by bounds or, if allowed and small
enough, by the exhaustive oracle.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

from .counting import ceil_log, group_order_c, matrix_bounds, n_etale
from .errors import Infeasible, InvalidInput
from .finite_field import DEFAULT_GUARD, PrimePower, as_prime_power
from .oracle import CacheStore, cache_key, cached, count_matrix, matrix_tuple_count

log = logging.getLogger(__name__)

BOUNDS_ONLY = "bounds-only"
ALLOW_ORACLE = "allow-oracle"
MODES = (BOUNDS_ONLY, ALLOW_ORACLE)


@dataclass(frozen=True)
class Part:
    n: int
    m: int
    r: int


@dataclass(frozen=True)
class AlgebraSpec:
    q: PrimePower
    parts: tuple[Part, ...]

    @classmethod
    def build(cls, q, parts) -> "AlgebraSpec":
        """Validate and canonicalize: merge equal (n, m) by summing r, sort by (n, m)."""
        q = as_prime_power(q)
        merged: dict[tuple[int, int], int] = {}
        for part in parts:
            if isinstance(part, dict):
                try:
                    part = Part(part["n"], part["m"], part["r"])
                except KeyError as exc:
                    raise InvalidInput(f"part is missing {exc}") from None
            elif not isinstance(part, Part):
                part = Part(*part)
            for name in ("n", "m", "r"):
                v = getattr(part, name)
                if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                    raise InvalidInput(f"part {name} must be a positive integer, got {v!r}")
            merged[part.n, part.m] = merged.get((part.n, part.m), 0) + part.r
        if not merged:
            raise InvalidInput("an algebra needs at least one part")
        return cls(q, tuple(Part(n, m, r) for (n, m), r in sorted(merged.items())))

    @classmethod
    def from_json(cls, text: str) -> "AlgebraSpec":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidInput(f"spec is not valid JSON: {exc}") from None
        if not isinstance(obj, dict) or "q" not in obj or not isinstance(obj.get("parts"), list):
            raise InvalidInput('spec must look like {"q": 4, "parts": [{"n": 3, "m": 1, "r": 5}]}')
        return cls.build(obj["q"], obj["parts"])

    @property
    def dimension(self) -> int:
        """F_q-dimension."""
        return sum(p.n * p.m * p.m * p.r for p in self.parts)


@dataclass(frozen=True)
class GenResult:
    status: str  # "exact" | "bracket"
    lo: int
    hi: int
    method: str  # formula | bound-resolved | oracle-resolved | bracket-only
    parts: tuple[tuple[Part, "GenResult"], ...] = field(default=(), compare=False)

    @property
    def value(self) -> int | None:
        return self.lo if self.status == "exact" else None

    @classmethod
    def exact(cls, value: int, method: str) -> "GenResult":
        return cls("exact", value, value, method)

    def to_json(self, breakdown: bool = False) -> dict:
        if self.status == "exact":
            out = {"status": "exact", "gen": str(self.lo), "method": self.method}
        else:
            out = {"status": "bracket", "lo": str(self.lo), "hi": str(self.hi), "method": self.method}
        if breakdown and self.parts:
            out["parts"] = [
                {"n": str(p.n), "m": str(p.m), "r": str(p.r), **res.to_json()} for p, res in self.parts
            ]
        return out


# -- pure étale parts --------------------------------------------------------------

def gen_pure_etale(q, n: int, r: int) -> int:
    """min {g >= 0 : r <= N_{q,n}(g)}."""
    qv = as_prime_power(q).value
    if r < 1:
        raise InvalidInput("r must be >= 1")
    g = 0
    while n_etale(qv, n, g) < r:
        g += 1
    return g


def etale_bracket(q, n: int, r: int) -> tuple[int, int]:
    """(k, k + 1) with k = ceil((1/n) log_q(n r)), exact."""
    qv = as_prime_power(q).value
    k = ceil_log(n * r, qv**n)
    return k, k + 1


def etale_bracket_check(q, n: int, r: int) -> bool:
    lo, hi = etale_bracket(q, n, r)
    return lo <= gen_pure_etale(q, n, r) <= hi


def etale_dimension_bound_check(spec: AlgebraSpec) -> bool:
    """gen(E) <= ceil(log_q dim E) for an étale algebra E."""
    if any(p.m != 1 for p in spec.parts):
        raise InvalidInput("dimension bound applies to étale algebras only")
    res = gen_algebra(spec)
    return res.hi <= ceil_log(spec.dimension, spec.q.value)


# -- pure matrix parts ---------------------------------------------------------------

class OracleContext:
    """Where and how much the oracle may enumerate."""

    def __init__(self, guard: int = DEFAULT_GUARD, store: CacheStore | None = None):
        self.guard = guard
        self.store = store
        self._memo: dict[tuple, int] = {}

    def feasible(self, q: int, n: int, m: int, g: int) -> bool:
        return matrix_tuple_count(q, n, m, g) <= self.guard

    def n_matrix(self, q: int, n: int, m: int, g: int) -> int:
        """Exact N_{q,n,m}(g); raises Infeasible beyond the guard."""
        if m == 1:
            return n_etale(q, n, g)
        if g == 0:
            return 0
        key = (q, n, m, g)
        if key not in self._memo:
            if not self.feasible(q, n, m, g):
                raise Infeasible(f"N_{{{q},{n},{m}}}({g})", matrix_tuple_count(q, n, m, g), self.guard)
            res = cached(
                self.store,
                cache_key("matrix", q, n, m, g, "exhaustive"),
                lambda: count_matrix(q, n, m, g, guard=self.guard),
            )
            self._memo[key] = res.normalized
        return self._memo[key]


_DEFAULT_CONTEXT = OracleContext()


def bracket_floor(q: int, n: int, m: int, r: int) -> int:
    """ceil((1/(n m^2)) log_q(C r)), compared exactly as C r <= q^(g n m^2)."""
    return ceil_log(group_order_c(q, n, m) * r, q ** (n * m * m))


def gen_pure_matrix(q, n: int, m: int, r: int, mode: str = ALLOW_ORACLE, ctx: OracleContext | None = None) -> GenResult:
    """gen(M_m(F_{q^n})^r) for m >= 2."""
    qv = as_prime_power(q).value
    if m < 2:
        raise InvalidInput("gen_pure_matrix needs m >= 2; use gen_pure_etale")
    if r < 1:
        raise InvalidInput("r must be >= 1")
    if mode not in MODES:
        raise InvalidInput(f"mode must be one of {MODES}")
    ctx = ctx or _DEFAULT_CONTEXT
    g0 = bracket_floor(qv, n, m, r)
    lo, hi = max(g0, 2), g0 + 1  # a noncommutative algebra needs two generators
    if lo == hi:
        return GenResult.exact(lo, "bound-resolved")
    bounds = matrix_bounds(qv, n, m, g0)
    if r <= bounds.lower:
        return GenResult.exact(g0, "bound-resolved")
    if r > bounds.upper:
        return GenResult.exact(g0 + 1, "bound-resolved")
    if mode == ALLOW_ORACLE and ctx.feasible(qv, n, m, g0):
        N = ctx.n_matrix(qv, n, m, g0)
        return GenResult.exact(g0 if r <= N else g0 + 1, "oracle-resolved")
    return GenResult("bracket", g0, g0 + 1, "bracket-only")


def gen_part(q: PrimePower, part: Part, mode: str, ctx: OracleContext | None) -> GenResult:
    if part.m == 1:
        return GenResult.exact(gen_pure_etale(q, part.n, part.r), "formula")
    return gen_pure_matrix(q, part.n, part.m, part.r, mode, ctx)


def gen_algebra(spec: AlgebraSpec, mode: str = ALLOW_ORACLE, ctx: OracleContext | None = None) -> GenResult:
    """Maximum over pure parts, with interval semantics for unresolved parts.

    The result is the interval [max lo_i, max hi_i]; it is exact when the two
    ends coincide.
    """
    if not spec.parts:
        raise InvalidInput("an algebra needs at least one part")
    results = tuple((p, gen_part(spec.q, p, mode, ctx)) for p in spec.parts)
    lo = max(res.lo for _, res in results)
    hi = max(res.hi for _, res in results)
    if lo != hi:
        return GenResult("bracket", lo, hi, "bracket-only", results)
    # report how the winning value was obtained; prefer the cheapest exact method
    order = ("formula", "bound-resolved", "oracle-resolved")
    winners = [res.method for _, res in results if res.status == "exact" and res.lo == lo]
    method = min(winners, key=order.index) if winners else "bound-resolved"
    return GenResult("exact", lo, lo, method, results)


# -- the sets I_0(g), I_1(g) --------------------------------------------------------------

@dataclass(frozen=True)
class Interval:
    """Integers in (lo_exclusive, hi_inclusive]."""

    lo_exclusive: int
    hi_inclusive: int

    def __len__(self):
        return max(0, self.hi_inclusive - self.lo_exclusive)

    def __contains__(self, r: int):
        return self.lo_exclusive < r <= self.hi_inclusive

    def __iter__(self):
        return iter(range(self.lo_exclusive + 1, self.hi_inclusive + 1))

    def as_set(self) -> set[int]:
        return set(self)

    def to_json(self) -> dict:
        if not len(self):
            return {"empty": True}
        return {"empty": False, "first": str(self.lo_exclusive + 1), "last": str(self.hi_inclusive)}


@dataclass(frozen=True)
class IntervalReport:
    q: int
    n: int
    m: int
    g: int
    C: int
    boundary_floor: int  # floor(q^((g-1) n m^2) / C)
    N_prev: int | None
    N_curr: int | None
    N_prev_bounds: tuple[int, int]
    N_curr_bounds: tuple[int, int]
    I0: Interval | None
    I1: Interval | None
    n_source: str  # formula | oracle | bounds-only
    i1_lower_bounds: dict = field(default_factory=dict)
    i1_lower_bound_variants: dict = field(default_factory=dict)

    @property
    def N_exact(self) -> bool:
        return self.N_prev is not None and self.N_curr is not None

    def to_json(self) -> dict:
        out = {
            "q": str(self.q), "n": str(self.n), "m": str(self.m), "g": str(self.g),
            "C": str(self.C),
            "boundary_floor": str(self.boundary_floor),
            "N_exact": self.N_exact,
            "N_source": self.n_source,
        }
        for key, val, bnd in (("N_prev", self.N_prev, self.N_prev_bounds), ("N", self.N_curr, self.N_curr_bounds)):
            if val is not None:
                out[key] = str(val)
            else:
                out[key + "_lower"], out[key + "_upper"] = str(bnd[0]), str(bnd[1])
        for name, iv in (("I0", self.I0), ("I1", self.I1)):
            out[name] = iv.to_json() if iv is not None else {"resolved": False}
            if iv is not None:
                out[name + "_size"] = str(len(iv))
        out["I1_size_lower_bounds"] = {k: str(v) for k, v in self.i1_lower_bounds.items()}
        return out


def _n_value(q: int, n: int, m: int, g: int, mode: str, ctx: OracleContext):
    """(exact or None, (lower, upper), source)."""
    if m == 1:
        v = n_etale(q, n, g)
        return v, (v, v), "formula"
    if g == 0:
        return 0, (0, 0), "formula"
    b = matrix_bounds(q, n, m, g)
    if b.lower == b.upper:
        return b.lower, (b.lower, b.upper), "bounds-only"
    if mode == ALLOW_ORACLE and ctx.feasible(q, n, m, g):
        v = ctx.n_matrix(q, n, m, g)
        return v, (v, v), "oracle"
    return None, (b.lower, b.upper), "bounds-only"


def intervals(q, n: int, m: int, g: int, mode: str = ALLOW_ORACLE, ctx: OracleContext | None = None) -> IntervalReport:
    """I_0(g) = (C^-1 q^((g-1) n m^2), N(g)],  I_1(g) = (N(g-1), C^-1 q^((g-1) n m^2)]."""
    qv = as_prime_power(q).value
    if g < 1:
        raise InvalidInput("g must be >= 1")
    if mode not in MODES:
        raise InvalidInput(f"mode must be one of {MODES}")
    ctx = ctx or _DEFAULT_CONTEXT
    C = group_order_c(qv, n, m)
    K = n * m * m
    boundary = qv ** ((g - 1) * K) // C
    prev, prev_b, src_prev = _n_value(qv, n, m, g - 1, mode, ctx)
    curr, curr_b, src_curr = _n_value(qv, n, m, g, mode, ctx)
    sources = {src_prev, src_curr}
    source = "formula" if sources == {"formula"} else "oracle" if "oracle" in sources else "bounds-only"
    if prev is None or curr is None:
        source = "bounds-only"

    lower_bounds, variants = {}, {}
    if n >= 2:
        lower_bounds["subfield"] = qv ** ((g - 1) * m * m) // C
        variants["subfield_alt_exponent"] = qv ** (g * m * m) // C
    if m >= 2:
        lower_bounds["first-column"] = qv ** ((g - 1) * n * (m * m - m + 1)) // C
        variants["first-column_alt_exponent"] = qv ** (g * n * (m * m - m + 1)) // C
    if variants:
        log.debug("I_1(%d) lower bounds %s; alternative exponents give %s", g, lower_bounds, variants)

    return IntervalReport(
        q=qv, n=n, m=m, g=g, C=C, boundary_floor=boundary,
        N_prev=prev, N_curr=curr, N_prev_bounds=prev_b, N_curr_bounds=curr_b,
        I0=Interval(boundary, curr) if curr is not None else None,
        I1=Interval(prev, boundary) if prev is not None else None,
        n_source=source,
        i1_lower_bounds=lower_bounds,
        i1_lower_bound_variants=variants,
    )


def gen_offset(q, n: int, m: int, r: int, mode: str = ALLOW_ORACLE, ctx: OracleContext | None = None) -> int | None:
    """gen(A_r) minus the bracket's lower value ceil(log_{q^(n m^2)}(C r)), or None if unresolved."""
    qv = as_prime_power(q).value
    res = gen_part(as_prime_power(q), Part(n, m, r), mode, ctx)
    if res.status != "exact":
        return None
    return res.lo - ceil_log(group_order_c(qv, n, m) * r, qv ** (n * m * m))
