"""Exact closed-form counts and bounds, all in Python integers.

Every division that must be exact is checked; a remainder raises
:class:`~sepgen.errors.IntegralityError`. Rational bounds are converted to
integers by exact floor/ceiling, never through floats.
"""

from __future__ import annotations

import contextlib
import functools
from dataclasses import dataclass

from .errors import IntegralityError, InvalidInput
from .finite_field import as_prime_power, divisors_of, factorize

# Test-only fault switches; see inject_fault().
_FAULTS: set[str] = set()


@contextlib.contextmanager
def inject_fault(name: str):
    """Temporarily corrupt a computation to prove the verification harness notices.

    Known faults: ``"moebius-sign"`` flips the sign of mu on the largest
    squarefree divisor in :func:`n_etale`.
    """
    _FAULTS.add(name)
    n_etale.cache_clear()
    try:
        yield
    finally:
        _FAULTS.discard(name)
        n_etale.cache_clear()


def _positive(name: str, v: int, minimum: int = 1) -> int:
    if isinstance(v, bool) or not isinstance(v, int) or v < minimum:
        raise InvalidInput(f"{name} must be an integer >= {minimum}, got {v!r}")
    return v


def _q(q) -> int:
    return as_prime_power(q).value


def divisors(n: int) -> list[int]:
    return divisors_of(_positive("n", n))


def moebius(n: int) -> int:
    _positive("n", n)
    f = factorize(n)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def exact_div(a: int, b: int, what: str = "") -> int:
    quo, rem = divmod(a, b)
    if rem:
        raise IntegralityError(f"{what or 'quotient'}: {a} is not divisible by {b}")
    return quo


def ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def ceil_log(x: int, base: int) -> int:
    """Least k >= 0 with base**k >= x, by exact integer comparison."""
    if base < 2:
        raise InvalidInput("base must be >= 2")
    if x <= 1:
        return 0
    hi = 1
    while base**hi < x:
        hi *= 2
    lo = hi // 2  # base**lo < x, or lo == 0
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if base**mid >= x:
            hi = mid
        else:
            lo = mid
    return hi if base**lo < x else lo


# -- étale counts --------------------------------------------------------------

@functools.lru_cache(maxsize=1 << 16)
def _n_etale(q: int, n: int, g: int) -> int:
    total = 0
    ds = divisors_of(n)
    for d in ds:
        mu = moebius(d)
        if "moebius-sign" in _FAULTS and d == max(x for x in ds if moebius(x)):
            mu = -mu
        if mu:
            total += mu * q ** (g * n // d)
    return exact_div(total, n, f"N_{{{q},{n}}}({g})")


def n_etale(q, n: int, g: int) -> int:
    """Number of Galois orbits of size n of generating g-tuples in F_{q^n}.

    Equivalently the number of maximal ideals of F_q[x_1..x_g] with residue
    field F_{q^n}:  (1/n) * sum_{d | n} mu(d) q^(g n / d).
    """
    return _n_etale(_q(q), _positive("n", n), _positive("g", g, 0))


n_etale.cache_clear = _n_etale.cache_clear


def burnside_identity_check(q, n: int, g: int) -> bool:
    """sum_{d | n} d N_{q,d}(g) == q^(g n)."""
    qv = _q(q)
    return sum(d * n_etale(qv, d, g) for d in divisors(n)) == qv ** (g * n)


@dataclass(frozen=True)
class BoundPair:
    lower: int
    upper: int
    lower_ref: str
    upper_ref: str

    def __post_init__(self):
        if self.lower < 0 or self.lower > self.upper:
            raise IntegralityError(f"bad bound pair {self.lower} > {self.upper}")

    def contains(self, value: int) -> bool:
        return self.lower <= value <= self.upper


def etale_bounds(q, n: int, g: int) -> BoundPair:
    """Integer bounds  (1/n) q^(gn) (1 - 1/q) <= N_{q,n}(g) <= (1/n) q^(gn)."""
    qv = _q(q)
    _positive("n", n)
    _positive("g", g)
    top = qv ** (g * n)
    return BoundPair(
        lower=ceil_div(top * (qv - 1), n * qv),
        upper=top // n,
        lower_ref="etale-density",
        upper_ref="free-orbits",
    )


# -- matrix algebra counts --------------------------------------------------------

def pgl_order(q, n: int, m: int) -> int:
    qn = _q(q) ** _positive("n", n)
    _positive("m", m)
    gl = 1
    for i in range(m):
        gl *= qn**m - qn**i
    return exact_div(gl, qn - 1, "|GL| / (q^n - 1)")


def group_order_c(q, n: int, m: int) -> int:
    """Order of Aut_{F_q}(M_m(F_{q^n})) = n |PGL_m(F_{q^n})|."""
    return n * pgl_order(q, n, m)


def rank_count(q, d: int, g: int) -> int:
    """Number of d x g matrices over F_q of rank d (g-tuples spanning F_q^d)."""
    qv = _q(q)
    _positive("d", d)
    _positive("g", g, 0)
    if g < d:
        return 0
    out = 1
    for i in range(d):
        out *= qv**g - qv**i
    return out


def matrix_bounds(q, n: int, m: int, g: int) -> BoundPair:
    """Best integer bounds on N_{q,n,m}(g) from the closed-form estimates.

    Lower candidates: the generating-pair family (needs g, m >= 2) and tuples
    that already span M over F_q. Upper candidates: all tuples, and all tuples
    minus those inside the subalgebra M_m(F_q) (n >= 2) or inside the
    subalgebra of matrices vanishing below the (1,1) entry in column 1 (m >= 2).
    """
    qv = _q(q)
    _positive("n", n)
    _positive("m", m)
    _positive("g", g, 0)
    if m == 1:
        v = n_etale(qv, n, g)
        return BoundPair(v, v, "etale-formula", "etale-formula")
    if g == 0:
        return BoundPair(0, 0, "no-generators", "no-generators")
    C = group_order_c(qv, n, m)
    K = n * m * m
    lowers = [(0, "trivial")]
    if g >= 2:
        lowers.append((ceil_div(qv ** ((g - 1) * K), C), "generating-pairs"))
    lowers.append((ceil_div(rank_count(qv, K, g), C), "spanning-tuples"))
    uppers = [(qv ** (g * K) // C, "all-tuples")]
    if n >= 2:
        uppers.append(((qv ** (g * K) - qv ** (g * m * m)) // C, "avoid-Mm(Fq)"))
    uppers.append(((qv ** (g * K) - qv ** (g * n * (m * m - m + 1))) // C, "avoid-first-column"))
    lo, lo_ref = max(lowers, key=lambda t: t[0])
    hi, hi_ref = min(uppers, key=lambda t: t[0])
    return BoundPair(lo, hi, lo_ref, hi_ref)
