"""M_m(F_{q^n}) as an F_q-algebra, computed through F_p-linear algebra.

A matrix is stored as an (m, m, D) array of F_p coordinates (D = e*n, q = p^e).
Its flattening, of length e*n*m^2, is the coordinate vector used for every
span computation. Products go through the regular representation
M_m(F_{p^D}) -> M_{mD}(F_p), whose (i, j) block is multiplication by a_ij.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass

import numpy as np

from . import linalg
from .counting import group_order_c
from .errors import FieldMismatch, Infeasible, IntegralityError, InvalidInput
from .finite_field import (
    DEFAULT_GUARD,
    ExtensionField,
    FieldElement,
    PrimePower,
    as_prime_power,
    make_field,
    subfield_degree,
)


class MatrixAlgebra:
    """The ambient algebra M_m(F_{q^n}); obtain instances via :func:`matrix_algebra`."""

    def __init__(self, q: PrimePower, n: int, m: int):
        self.q = q
        self.n = n
        self.m = m
        self.p = q.p
        self.field: ExtensionField = make_field(q.p, q.e * n)
        self.D = self.field.D
        self.dim = self.D * m * m  # dimension over F_p

    def __repr__(self):
        return f"MatrixAlgebra(q={self.q}, n={self.n}, m={self.m})"

    def __reduce__(self):
        return (matrix_algebra, (self.q.value, self.n, self.m))

    def context(self) -> dict:
        return {"q": self.q.value, "n": self.n, "m": self.m}

    @functools.cached_property
    def w(self) -> FieldElement:
        """Fixed generator of F_q over F_p."""
        return self.field.subfield_generator(self.q.e)

    # -- building matrices
    def _wrap(self, coeffs) -> "Matrix":
        arr = np.asarray(coeffs, dtype=np.int64).reshape(self.m, self.m, self.D) % self.p
        arr.setflags(write=False)
        return Matrix(self, arr)

    def zero(self) -> "Matrix":
        return self._wrap(np.zeros((self.m, self.m, self.D)))

    def identity(self) -> "Matrix":
        return self.scalar(self.field.one)

    def scalar(self, c: FieldElement) -> "Matrix":
        self.field._check(c)
        arr = np.zeros((self.m, self.m, self.D), dtype=np.int64)
        for i in range(self.m):
            arr[i, i] = c.coeffs
        return self._wrap(arr)

    def elementary(self, i: int, j: int, c: FieldElement | None = None) -> "Matrix":
        """c * E_{i,j} with 0-based indices (c defaults to 1)."""
        c = self.field.one if c is None else c
        self.field._check(c)
        arr = np.zeros((self.m, self.m, self.D), dtype=np.int64)
        arr[i, j] = c.coeffs
        return self._wrap(arr)

    def from_entries(self, rows) -> "Matrix":
        """Build from an m x m nested list of FieldElements or coefficient lists."""
        if len(rows) != self.m or any(len(r) != self.m for r in rows):
            raise InvalidInput(f"expected a {self.m}x{self.m} matrix")
        arr = np.zeros((self.m, self.m, self.D), dtype=np.int64)
        for i, row in enumerate(rows):
            for j, a in enumerate(row):
                if isinstance(a, FieldElement):
                    self.field._check(a)
                    arr[i, j] = a.coeffs
                else:
                    arr[i, j] = self.field(a).coeffs
        return self._wrap(arr)

    def from_vector(self, vec) -> "Matrix":
        return self._wrap(np.asarray(vec))

    def random_matrix(self, rng: np.random.Generator) -> "Matrix":
        return self._wrap(rng.integers(0, self.p, size=self.dim))

    def random_element(self, rng: np.random.Generator, nonzero: bool = False) -> FieldElement:
        while True:
            a = FieldElement(self.field, tuple(int(c) for c in rng.integers(0, self.p, size=self.D)))
            if not (nonzero and a.is_zero()):
                return a

    def tuple(self, *mats: "Matrix") -> "MatrixTuple":
        return MatrixTuple(self, tuple(mats))

    # -- F_p-linear machinery
    def to_regular(self, coeffs: np.ndarray) -> np.ndarray:
        """(..., m, m, D) coordinates -> (..., mD, mD) regular representation."""
        L = self.field.basis_mul_matrices
        c = np.asarray(coeffs, dtype=np.int64).reshape(coeffs.shape[:-3] + (self.m, self.m, self.D))
        reg = np.einsum("...ijt,tsu->...isju", c, L) % self.p
        return reg.reshape(c.shape[:-3] + (self.m * self.D, self.m * self.D))

    def from_regular(self, reg: np.ndarray) -> np.ndarray:
        rows = reg[..., :: self.D, :]
        return rows.reshape(reg.shape[:-2] + (self.m, self.m, self.D))

    def right_mult_map(self, s: "Matrix") -> np.ndarray:
        """Matrix R on coordinate vectors with vec(X) @ R = vec(X s)."""
        return np.kron(np.eye(self.m, dtype=np.int64), self.to_regular(s.coeffs))

    @functools.cached_property
    def fq_identity_basis(self) -> np.ndarray:
        """Coordinates of w^i * I for i < e: an F_p-basis of the line F_q * I."""
        w, I = self.w, self.identity()
        return np.stack([(I * w**i).vector for i in range(self.q.e)])

    # -- subfields used for shifts
    def fq_elements(self) -> list[FieldElement]:
        return self.field.subfield_elements(self.q.e)


@functools.lru_cache(maxsize=None)
def _matrix_algebra(q: int, n: int, m: int) -> MatrixAlgebra:
    return MatrixAlgebra(PrimePower.from_int(q), n, m)


def matrix_algebra(q, n: int, m: int) -> MatrixAlgebra:
    q = as_prime_power(q)
    for name, v in (("n", n), ("m", m)):
        if isinstance(v, bool) or not isinstance(v, int) or v < 1:
            raise InvalidInput(f"{name} must be a positive integer, got {v!r}")
    return _matrix_algebra(q.value, n, m)


@dataclass(frozen=True, eq=False)
class Matrix:
    algebra: MatrixAlgebra
    coeffs: np.ndarray

    @property
    def m(self) -> int:
        return self.algebra.m

    @property
    def vector(self) -> np.ndarray:
        return self.coeffs.reshape(-1)

    def entry(self, i: int, j: int) -> FieldElement:
        return FieldElement(self.algebra.field, tuple(int(c) for c in self.coeffs[i, j]))

    def rows(self) -> list[list[FieldElement]]:
        return [[self.entry(i, j) for j in range(self.m)] for i in range(self.m)]

    def _same(self, other: "Matrix"):
        if not isinstance(other, Matrix) or other.algebra is not self.algebra:
            raise FieldMismatch(f"matrix over {other!r} does not belong to {self.algebra!r}")

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.algebra is other.algebra and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash((id(self.algebra), self.coeffs.tobytes()))

    def __repr__(self):
        body = "; ".join(" ".join(str(list(self.coeffs[i, j])) for j in range(self.m)) for i in range(self.m))
        return f"Matrix[{body}]"

    def __add__(self, other):
        self._same(other)
        return self.algebra._wrap(self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._same(other)
        return self.algebra._wrap(self.coeffs - other.coeffs)

    def __neg__(self):
        return self.algebra._wrap(-self.coeffs)

    def __mul__(self, other):
        A = self.algebra
        if isinstance(other, Matrix):
            self._same(other)
            prod = A.to_regular(self.coeffs) @ A.to_regular(other.coeffs) % A.p
            return A._wrap(A.from_regular(prod))
        if isinstance(other, int) and not isinstance(other, bool):
            other = A.field.from_int(other)
        if isinstance(other, FieldElement):
            A.field._check(other)
            return A._wrap(self.coeffs @ A.field.mul_matrix(other))
        return NotImplemented

    def __rmul__(self, other):
        # scalars are central
        return self.__mul__(other)

    def is_zero(self) -> bool:
        return not self.coeffs.any()


def identity(algebra: MatrixAlgebra) -> Matrix:
    return algebra.identity()


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    return a + b


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    if not isinstance(b, Matrix):
        raise InvalidInput("mat_mul expects two matrices; use mat_scale for scalars")
    return a * b


def mat_scale(a: Matrix, c: FieldElement) -> Matrix:
    return a * c


@dataclass(frozen=True, eq=False)
class MatrixTuple:
    """A g-tuple of matrices; equality is positional."""

    algebra: MatrixAlgebra
    matrices: tuple[Matrix, ...]

    def __post_init__(self):
        for M in self.matrices:
            if not isinstance(M, Matrix) or M.algebra is not self.algebra:
                raise FieldMismatch("all matrices in a tuple must share one algebra")

    @classmethod
    def from_vectors(cls, algebra: MatrixAlgebra, vecs: np.ndarray) -> "MatrixTuple":
        vecs = np.asarray(vecs).reshape(-1, algebra.dim)
        return cls(algebra, tuple(algebra.from_vector(v) for v in vecs))

    @property
    def g(self) -> int:
        return len(self.matrices)

    @property
    def vectors(self) -> np.ndarray:
        if not self.matrices:
            return np.zeros((0, self.algebra.dim), dtype=np.int64)
        return np.stack([M.vector for M in self.matrices])

    def __len__(self):
        return len(self.matrices)

    def __iter__(self):
        return iter(self.matrices)

    def __getitem__(self, i):
        return self.matrices[i]

    def __eq__(self, other):
        if not isinstance(other, MatrixTuple):
            return NotImplemented
        return self.algebra is other.algebra and self.matrices == other.matrices

    def __hash__(self):
        return hash((id(self.algebra), self.vectors.tobytes()))


# -- generation ---------------------------------------------------------------

def closure_rank(seed: np.ndarray, maps: list[np.ndarray], p: int, stop_at: int | None = None) -> int:
    """Dimension of the smallest subspace containing ``seed`` and stable under ``maps``.

    Only vectors that are new at each round are pushed through the maps again.
    """
    basis, piv = linalg.row_reduce(seed, p)
    frontier = basis
    while len(frontier) and maps:
        if stop_at is not None and len(basis) >= stop_at:
            break
        cand = np.vstack([(frontier @ R) % p for R in maps])
        fresh, _ = linalg.row_reduce(linalg.reduce_against(cand, basis, piv, p), p)
        if not len(fresh):
            break
        basis, piv = linalg.row_reduce(np.vstack([basis, fresh]), p)
        frontier = fresh
    return len(basis)


def _closure_inputs(t: MatrixTuple):
    A = t.algebra
    seed = np.vstack([A.fq_identity_basis, t.vectors])
    maps = [A.right_mult_map(M) for M in t.matrices]
    if A.q.e > 1:
        maps.append(A.right_mult_map(A.identity() * A.w))
    return seed, maps


def span_closure_dim(t: MatrixTuple, stop_at: int | None = None) -> int:
    """F_p-dimension of the unital F_q-subalgebra generated by the tuple.

    A subspace containing 1 and closed under right multiplication by each
    generator (and by w * 1) contains every word, so it is the subalgebra.
    """
    seed, maps = _closure_inputs(t)
    return closure_rank(seed, maps, t.algebra.p, stop_at)


def generates_full(t: MatrixTuple) -> bool:
    full = t.algebra.dim
    return span_closure_dim(t, stop_at=full) == full


def spans_linearly(t: MatrixTuple) -> bool:
    """True if the entries plus F_q * 1 already span M over F_p."""
    A = t.algebra
    return linalg.rank(np.vstack([A.fq_identity_basis, t.vectors]), A.p) == A.dim


# -- the explicit generating pair -------------------------------------------------

def construct_pair(algebra: MatrixAlgebra, alphas, beta_entries, u: FieldElement) -> tuple[Matrix, Matrix]:
    """Superdiagonal A = sum alpha_i E_{i,i+1} and a full B with
    beta_{m,1} forced to u / (alpha_1 ... alpha_{m-1}).

    ``beta_entries`` is row-major of length m^2; its (m, 1) entry is overwritten.
    """
    A_ = algebra
    m, F = A_.m, A_.field
    if m < 2:
        raise InvalidInput("the generating pair needs m >= 2")
    alphas = list(alphas)
    beta_entries = list(beta_entries)
    if len(alphas) != m - 1 or len(beta_entries) != m * m:
        raise InvalidInput(f"need {m - 1} alphas and {m * m} beta entries")
    for a in alphas + beta_entries + [u]:
        F._check(a)
    if any(a.is_zero() for a in alphas):
        raise InvalidInput("every alpha must be nonzero")
    if u.is_zero() or subfield_degree(u, A_.q, A_.n) != A_.n:
        raise InvalidInput("u must be a nonzero generator of F_{q^n} over F_q")
    prod = F.one
    for a in alphas:
        prod = prod * a
    rows_a = [[F.zero] * m for _ in range(m)]
    for i, a in enumerate(alphas):
        rows_a[i][i + 1] = a
    rows_b = [beta_entries[i * m : (i + 1) * m] for i in range(m)]
    rows_b[m - 1][0] = u / prod
    return A_.from_entries(rows_a), A_.from_entries(rows_b)


def random_generator_element(algebra: MatrixAlgebra, rng: np.random.Generator) -> FieldElement:
    """A uniformly random nonzero u with F_q[u] = F_{q^n}."""
    while True:
        u = algebra.random_element(rng, nonzero=True)
        if subfield_degree(u, algebra.q, algebra.n) == algebra.n:
            return u


def random_pair(algebra: MatrixAlgebra, rng: np.random.Generator) -> tuple[Matrix, Matrix]:
    """construct_pair with random admissible alphas, betas and u."""
    m = algebra.m
    alphas = [algebra.random_element(rng, nonzero=True) for _ in range(m - 1)]
    betas = [algebra.random_element(rng) for _ in range(m * m)]
    return construct_pair(algebra, alphas, betas, random_generator_element(algebra, rng))


def shifted_family(A: Matrix, B: Matrix, q=None) -> list[tuple[Matrix, Matrix]]:
    """The q pairs (A + gamma * 1, B) for gamma in F_q."""
    alg = A.algebra
    if q is not None and as_prime_power(q) != alg.q:
        raise InvalidInput(f"q = {q} does not match {alg!r}")
    return [(A + alg.scalar(gamma), B) for gamma in alg.fq_elements()]


def upper_triangular_triple(q) -> MatrixTuple:
    """(E_11, E_12, E_22) in M_2(F_q): trivial stabilizer, yet not generating."""
    alg = matrix_algebra(q, 1, 2)
    return alg.tuple(alg.elementary(0, 0), alg.elementary(0, 1), alg.elementary(1, 1))


# -- automorphisms ---------------------------------------------------------------

def canonical_projective(M: Matrix) -> Matrix:
    """Scale so the first nonzero entry (row-major) is 1."""
    for i in range(M.m):
        for j in range(M.m):
            a = M.entry(i, j)
            if not a.is_zero():
                return M * a.inverse()
    raise InvalidInput("zero matrix has no projective class")


@dataclass(frozen=True, eq=False)
class Automorphism:
    """X -> P * sigma^k(X) * P^-1, sigma the q-power Frobenius on entries."""

    algebra: MatrixAlgebra
    frobenius_power: int
    projective_matrix: Matrix

    def __eq__(self, other):
        if not isinstance(other, Automorphism):
            return NotImplemented
        return (
            self.algebra is other.algebra
            and self.frobenius_power == other.frobenius_power
            and self.projective_matrix == other.projective_matrix
        )

    def __hash__(self):
        return hash((self.frobenius_power, self.projective_matrix))

    @functools.cached_property
    def linear_map(self) -> np.ndarray:
        A = self.algebra
        p = A.p
        basis = np.eye(A.dim, dtype=np.int64).reshape(A.dim, A.m, A.m, A.D)
        frob = A.field.frobenius_matrix(A.q.e * self.frobenius_power)
        moved = (basis @ frob) % p
        P = A.to_regular(self.projective_matrix.coeffs)
        P_inv = linalg.inverse(P, p)
        conj = (P @ A.to_regular(moved) % p) @ P_inv % p
        return A.from_regular(conj).reshape(A.dim, A.dim)

    def inverse(self) -> "Automorphism":
        A = self.algebra
        k = self.frobenius_power
        P_inv = A._wrap(A.from_regular(linalg.inverse(A.to_regular(self.projective_matrix.coeffs), A.p)))
        back = (-k) % A.n
        Q = A._wrap(P_inv.coeffs @ A.field.frobenius_matrix(A.q.e * back))
        return Automorphism(A, back, canonical_projective(Q))

    def apply(self, t: MatrixTuple) -> MatrixTuple:
        return apply_automorphism(self, t)


def apply_automorphism(phi: Automorphism, t: MatrixTuple) -> MatrixTuple:
    if t.algebra is not phi.algebra:
        raise FieldMismatch("automorphism and tuple live in different algebras")
    return MatrixTuple.from_vectors(t.algebra, (t.vectors @ phi.linear_map) % t.algebra.p) if t.g else t


def _check_group_size(algebra: MatrixAlgebra, guard: int) -> int:
    C = group_order_c(algebra.q.value, algebra.n, algebra.m)
    if C > guard:
        raise Infeasible(f"enumerating G({algebra.q},{algebra.n},{algebra.m})", C, guard)
    return C


def _projective_representatives(algebra: MatrixAlgebra):
    """Invertible matrices whose first nonzero entry is 1, row-major order."""
    A = algebra
    F = A.field
    table = F.coefficient_table()
    one = np.array(F.one.coeffs)
    mm = A.m * A.m
    full = A.m * A.D
    for lead in range(mm):
        rest = mm - lead - 1
        for combo in itertools.product(range(F.order), repeat=rest):
            arr = np.zeros((mm, A.D), dtype=np.int64)
            arr[lead] = one
            if rest:
                arr[lead + 1 :] = table[list(combo)]
            if linalg.rank(A.to_regular(arr.reshape(A.m, A.m, A.D)), A.p) == full:
                yield A._wrap(arr)


def enumerate_automorphisms(algebra: MatrixAlgebra, guard: int = DEFAULT_GUARD):
    """All C automorphisms, Frobenius power outermost."""
    C = _check_group_size(algebra, guard)
    reps = list(_projective_representatives(algebra))
    if algebra.n * len(reps) != C:
        raise IntegralityError(f"enumerated {algebra.n * len(reps)} automorphisms, expected {C}")
    for k in range(algebra.n):
        for P in reps:
            yield Automorphism(algebra, k, P)


@functools.lru_cache(maxsize=32)
def automorphism_maps(algebra: MatrixAlgebra, guard: int = DEFAULT_GUARD) -> np.ndarray:
    """(C, dim, dim) stack of linear maps, in enumeration order."""
    maps = np.stack([phi.linear_map for phi in enumerate_automorphisms(algebra, guard)])
    maps.setflags(write=False)
    return maps


def orbit_images(t: MatrixTuple, guard: int = DEFAULT_GUARD) -> np.ndarray:
    """(C, g*dim) array of the images of t under every automorphism."""
    maps = automorphism_maps(t.algebra, guard)
    imgs = np.einsum("gd,cde->cge", t.vectors, maps) % t.algebra.p
    return imgs.reshape(len(maps), -1)


def orbit_size(t: MatrixTuple, guard: int = DEFAULT_GUARD) -> int:
    return len(np.unique(orbit_images(t, guard), axis=0))


def stabilizer_order(t: MatrixTuple, guard: int = DEFAULT_GUARD) -> int:
    imgs = orbit_images(t, guard)
    return int((imgs == t.vectors.reshape(1, -1)).all(axis=1).sum())


def stabilizer_is_trivial(t: MatrixTuple, guard: int = DEFAULT_GUARD) -> bool:
    return stabilizer_order(t, guard) == 1


# -- serialization -----------------------------------------------------------------

def matrix_to_json(M: Matrix) -> dict:
    out = M.algebra.context()
    out["entries"] = [[int(c) for c in M.coeffs[i, j]] for i in range(M.m) for j in range(M.m)]
    return out


def matrix_from_json(obj: dict) -> Matrix:
    alg = matrix_algebra(obj["q"], obj["n"], obj["m"])
    entries = obj["entries"]
    if len(entries) != alg.m * alg.m:
        raise InvalidInput("wrong number of entries")
    for e in entries:
        if len(e) != alg.D or any(not isinstance(c, int) or not 0 <= c < alg.p for c in e):
            raise InvalidInput(f"bad entry {e!r}")
    return alg._wrap(np.array(entries))
