"""Explicit finite fields F_{p^D} = F_p[x]/(f) with f canonically chosen.

Elements are coefficient vectors in the power basis 1, x, ..., x^{D-1},
constant term first. The modulus f is the lexicographically least monic
irreducible polynomial of degree D over F_p (constant term compared first).

A subfield F_q with q = p^e, e | D, is never modelled separately: it is the
fixed field of the e-th power of Frobenius inside the one big field.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import FieldMismatch, Infeasible, InvalidInput
from .linalg import mat_power

DEFAULT_GUARD = 10**7
_MAX_ENUMERABLE = 2**63


# -- integers -----------------------------------------------------------------

def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def factorize(n: int) -> dict[int, int]:
    """Trial-division factorization of a positive integer."""
    if n < 1:
        raise InvalidInput(f"cannot factor {n}")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@dataclass(frozen=True)
class PrimePower:
    """q = p**e with p prime and e >= 1."""

    p: int
    e: int

    def __post_init__(self):
        if not isinstance(self.p, int) or not is_prime(self.p):
            raise InvalidInput(f"{self.p} is not prime")
        if not isinstance(self.e, int) or self.e < 1:
            raise InvalidInput(f"exponent must be >= 1, got {self.e}")

    @property
    def value(self) -> int:
        return self.p**self.e

    @classmethod
    def from_int(cls, q: int) -> "PrimePower":
        if isinstance(q, bool) or not isinstance(q, int) or q < 2:
            raise InvalidInput(f"q must be a prime power >= 2, got {q!r}")
        f = factorize(q)
        if len(f) != 1:
            raise InvalidInput(f"q = {q} is not a prime power")
        (p, e), = f.items()
        return cls(p, e)

    def __int__(self):
        return self.value

    def __str__(self):
        return str(self.value)


def as_prime_power(q) -> PrimePower:
    return q if isinstance(q, PrimePower) else PrimePower.from_int(q)


# -- polynomials over F_p, coefficient lists constant term first ---------------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mulmod(a: list[int], b: list[int], f: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    prod = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] += ai * bj
    return _poly_mod([c % p for c in prod], f, p)


def _poly_mod(a: list[int], f: list[int], p: int) -> list[int]:
    """Remainder of ``a`` modulo a monic ``f``."""
    a = _trim(list(a))
    df = len(f) - 1
    while len(a) - 1 >= df:
        lead = a[-1]
        shift = len(a) - 1 - df
        for i, fi in enumerate(f):
            a[shift + i] = (a[shift + i] - lead * fi) % p
        _trim(a)
    return a


def _poly_sub(a: list[int], b: list[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)]
    return _trim(out)


def _poly_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        inv = pow(b[-1], -1, p)
        b = [(c * inv) % p for c in b]
        a, b = b, _poly_mod(a, b, p)
    if a:
        inv = pow(a[-1], -1, p)
        a = [(c * inv) % p for c in a]
    return a


def _x_pow_p_iter(f: list[int], p: int, k: int) -> list[int]:
    """x^(p^k) mod f."""
    r = _poly_mod([0, 1], f, p)
    for _ in range(k):
        r = _poly_powmod(r, p, f, p)
    return r


def _poly_powmod(a: list[int], k: int, f: list[int], p: int) -> list[int]:
    result = [1]
    base = _poly_mod(a, f, p)
    while k:
        if k & 1:
            result = _poly_mulmod(result, base, f, p)
        base = _poly_mulmod(base, base, f, p)
        k >>= 1
    return result


def is_irreducible(f, p: int) -> bool:
    """Rabin's test for a monic polynomial f over F_p (constant term first).

    f is irreducible of degree D iff x^(p^D) = x mod f and
    gcd(x^(p^(D/l)) - x, f) = 1 for every prime l | D.
    """
    f = _trim([c % p for c in f])
    D = len(f) - 1
    if D < 1 or f[-1] != 1:
        return False
    if D == 1:
        return True
    x = [0, 1]
    if _poly_sub(_x_pow_p_iter(f, p, D), x, p):
        return False
    for ell in factorize(D):
        h = _poly_sub(_x_pow_p_iter(f, p, D // ell), x, p)
        if len(_poly_gcd(f, h, p)) != 1:
            return False
    return True


def canonical_modulus(p: int, D: int) -> tuple[int, ...]:
    """Lexicographically least monic irreducible polynomial of degree D over F_p."""
    if D == 1:
        return (0, 1)
    # a zero constant term means divisible by x, so start the scan at 1
    for low in itertools.product(range(1, p), *[range(p)] * (D - 1)):
        f = list(low) + [1]
        if is_irreducible(f, p):
            return tuple(f)
    raise AssertionError(f"no irreducible polynomial of degree {D} over F_{p}")


# -- fields and elements ----------------------------------------------------------

class ExtensionField:
    """The field F_{p^D} with its canonical modulus.

    Build instances with :func:`make_field`; they are cached per (p, D) so two
    fields compare equal exactly when they are the same object.
    """

    def __init__(self, p: int, D: int, modulus: tuple[int, ...]):
        self.p = p
        self.D = D
        self.modulus = modulus
        self.order = p**D

    def __repr__(self):
        return f"ExtensionField(p={self.p}, D={self.D}, modulus={list(self.modulus)})"

    def __reduce__(self):
        return (make_field, (self.p, self.D))

    def descriptor(self) -> dict:
        return {"p": self.p, "D": self.D, "modulus": list(self.modulus)}

    # construction of elements
    def __call__(self, coeffs) -> "FieldElement":
        if isinstance(coeffs, int):
            return self.from_int(coeffs)
        coeffs = [int(c) % self.p for c in coeffs]
        if len(coeffs) > self.D:
            coeffs = _poly_mod(coeffs, list(self.modulus), self.p)
        coeffs = coeffs + [0] * (self.D - len(coeffs))
        return FieldElement(self, tuple(coeffs))

    def from_int(self, c: int) -> "FieldElement":
        """Image of the integer c in the prime subfield."""
        return FieldElement(self, (c % self.p,) + (0,) * (self.D - 1))

    @property
    def zero(self) -> "FieldElement":
        return self.from_int(0)

    @property
    def one(self) -> "FieldElement":
        return self.from_int(1)

    @property
    def x(self) -> "FieldElement":
        """Class of the indeterminate, a root of the modulus."""
        return self([0, 1])

    def check_enumerable(self, guard: int = DEFAULT_GUARD):
        if self.order > _MAX_ENUMERABLE or self.order > guard:
            raise Infeasible(f"enumerating F_{self.p}^{self.D}", self.order, guard)

    def elements(self, guard: int = DEFAULT_GUARD):
        """All elements, lexicographic in the coefficient vector."""
        self.check_enumerable(guard)
        for coeffs in itertools.product(range(self.p), repeat=self.D):
            yield FieldElement(self, coeffs)

    def coefficient_table(self, guard: int = DEFAULT_GUARD) -> np.ndarray:
        """(order, D) array of all coefficient vectors in enumeration order."""
        self.check_enumerable(guard)
        idx = np.arange(self.order, dtype=np.int64)
        cols = [(idx // self.p ** (self.D - 1 - i)) % self.p for i in range(self.D)]
        return np.stack(cols, axis=1)

    def index_of(self, coeffs) -> int:
        """Position of an element in enumeration order."""
        out = 0
        for c in coeffs:
            out = out * self.p + int(c)
        return out

    # F_p-linear structure
    @functools.cached_property
    def basis_mul_matrices(self) -> np.ndarray:
        """(D, D, D) array: slice t is the matrix of multiplication by x^t."""
        out = np.zeros((self.D, self.D, self.D), dtype=np.int64)
        for t in range(self.D):
            xt = [0] * t + [1]
            for s in range(self.D):
                xs = [0] * s + [1]
                row = _poly_mulmod(xs, xt, list(self.modulus), self.p)
                out[t, s, : len(row)] = row
        out.setflags(write=False)
        return out

    def mul_matrix(self, a: "FieldElement") -> np.ndarray:
        """Matrix M with ``v @ M`` = coefficients of v * a."""
        self._check(a)
        c = np.array(a.coeffs, dtype=np.int64)
        return np.tensordot(c, self.basis_mul_matrices, axes=1) % self.p

    @functools.cached_property
    def _frobenius_base(self) -> np.ndarray:
        out = np.zeros((self.D, self.D), dtype=np.int64)
        f = list(self.modulus)
        for s in range(self.D):
            row = _poly_powmod([0] * s + [1], self.p, f, self.p)
            out[s, : len(row)] = row
        return out

    @functools.lru_cache(maxsize=None)
    def frobenius_matrix(self, k: int) -> np.ndarray:
        """Matrix of a -> a^(p^k) acting on coefficient rows."""
        m = mat_power(self._frobenius_base, k % self.D, self.p)
        m.setflags(write=False)
        return m

    def subfield_generator(self, e: int) -> "FieldElement":
        """A fixed element w with F_p[w] = F_{p^e}, the subfield of order p^e."""
        if e < 1 or self.D % e:
            raise InvalidInput(f"F_{self.p}^{e} is not a subfield of F_{self.p}^{self.D}")
        g = self.primitive_element
        return g ** ((self.order - 1) // (self.p**e - 1))

    @functools.cached_property
    def primitive_element(self) -> "FieldElement":
        """First element in enumeration order generating the multiplicative group."""
        n = self.order - 1
        if n == 1:
            return self.one
        exps = [n // ell for ell in factorize(n)]
        for coeffs in itertools.product(range(self.p), repeat=self.D):
            a = FieldElement(self, coeffs)
            if a.is_zero():
                continue
            if all(not (a**k).is_one() for k in exps):
                return a
        raise AssertionError("multiplicative group is not cyclic?")

    def subfield_elements(self, e: int) -> list["FieldElement"]:
        """The p^e elements of the subfield F_{p^e}, as F_p-combinations of w^i."""
        w = self.subfield_generator(e)
        powers = [w**i for i in range(e)]
        out = []
        for cs in itertools.product(range(self.p), repeat=e):
            acc = self.zero
            for c, wi in zip(cs, powers):
                acc = acc + wi * c
            out.append(acc)
        return out

    def _check(self, a: "FieldElement"):
        if not isinstance(a, FieldElement) or a.field is not self:
            raise FieldMismatch(f"{a!r} is not an element of {self!r}")


@functools.lru_cache(maxsize=None)
def _make_field(p: int, D: int) -> ExtensionField:
    return ExtensionField(p, D, canonical_modulus(p, D))


def make_field(p: int, D: int) -> ExtensionField:
    """The field F_{p^D} with its canonical modulus (cached)."""
    if isinstance(p, bool) or not isinstance(p, int) or not is_prime(p):
        raise InvalidInput(f"{p!r} is not prime")
    if isinstance(D, bool) or not isinstance(D, int) or D < 1:
        raise InvalidInput(f"degree must be a positive integer, got {D!r}")
    return _make_field(p, D)


class FieldElement:
    __slots__ = ("field", "coeffs")

    def __init__(self, field: ExtensionField, coeffs: tuple[int, ...]):
        self.field = field
        self.coeffs = tuple(coeffs)

    def __repr__(self):
        return f"FieldElement({list(self.coeffs)}, p={self.field.p}, D={self.field.D})"

    def __str__(self):
        return to_json(self)

    def __eq__(self, other):
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.field is other.field and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.field.p, self.field.D, self.coeffs))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_one(self) -> bool:
        return self.coeffs[0] == 1 and not any(self.coeffs[1:])

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, int) and not isinstance(other, bool):
            return self.field.from_int(other)
        self.field._check(other)
        return other

    def __add__(self, other):
        other = self._coerce(other)
        p = self.field.p
        return FieldElement(self.field, tuple((a + b) % p for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        p = self.field.p
        return FieldElement(self.field, tuple((-a) % p for a in self.coeffs))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        f = self.field
        prod = _poly_mulmod(list(self.coeffs), list(other.coeffs), list(f.modulus), f.p)
        return FieldElement(f, tuple(prod) + (0,) * (f.D - len(prod)))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = self.field.one
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def inverse(self) -> "FieldElement":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in a finite field")
        return self ** (self.field.order - 2)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()


# -- functional surface ------------------------------------------------------------

def add(a: FieldElement, b: FieldElement) -> FieldElement:
    a.field._check(b)
    return a + b


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    a.field._check(b)
    return a * b


def neg(a: FieldElement) -> FieldElement:
    return -a


def inv(a: FieldElement) -> FieldElement:
    return a.inverse()


def power(a: FieldElement, k: int) -> FieldElement:
    if k < 0:
        raise InvalidInput("exponent must be non-negative")
    return a**k


def frobenius(a: FieldElement, k: int) -> FieldElement:
    """a^(p^k) by square-and-multiply."""
    if k < 0:
        raise InvalidInput("Frobenius power must be non-negative")
    return a ** (a.field.p**k)


def subfield_degree(a: FieldElement, q, n: int) -> int:
    """Degree of a over F_q inside F_{q^n}: the least d | n with a^(q^d) = a."""
    q = as_prime_power(q)
    F = a.field
    if F.p != q.p or F.D != q.e * n:
        raise InvalidInput(f"element of F_{F.p}^{F.D} is not in F_{q}^{n}")
    for d in divisors_of(n):
        if a ** (q.value**d) == a:
            return d
    raise AssertionError("unreachable: a^(q^n) = a for all a")


def divisors_of(n: int) -> list[int]:
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def subfield_degree_table(F: ExtensionField, q, n: int, guard: int = DEFAULT_GUARD) -> np.ndarray:
    """Vectorised subfield_degree over every element of F, in enumeration order."""
    q = as_prime_power(q)
    if F.p != q.p or F.D != q.e * n:
        raise InvalidInput(f"F_{F.p}^{F.D} is not F_{q}^{n}")
    table = F.coefficient_table(guard)
    deg = np.zeros(len(table), dtype=np.int64)
    for d in divisors_of(n):
        fixed = ((table @ F.frobenius_matrix(q.e * d)) % F.p == table).all(axis=1)
        deg[(deg == 0) & fixed] = d
    return deg


def to_json(a: FieldElement) -> str:
    return "[" + ",".join(str(c) for c in a.coeffs) + "]"


def from_json(F: ExtensionField, text) -> FieldElement:
    import json

    coeffs = json.loads(text) if isinstance(text, str) else list(text)
    if len(coeffs) != F.D or any(not isinstance(c, int) or not 0 <= c < F.p for c in coeffs):
        raise InvalidInput(f"bad element serialization {text!r} for {F!r}")
    return FieldElement(F, tuple(coeffs))


def lcm_all(values) -> int:
    out = 1
    for v in values:
        out = math.lcm(out, int(v))
    return out
