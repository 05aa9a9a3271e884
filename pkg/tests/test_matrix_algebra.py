import itertools

import numpy as np
import pytest

from sepgen import matrix_algebra as ma
from sepgen.counting import group_order_c
from sepgen.errors import InvalidInput


# -- independent oracle: subalgebra as a set, closed under + and * ---------------


def _mul(a, b, m, p):
    return tuple(
        sum(a[i * m + k] * b[k * m + j] for k in range(m)) % p for i in range(m) for j in range(m)
    )


def subalgebra_size(gens, m, p):
    """Size of the unital F_p-subalgebra of M_m(F_p) generated by ``gens``."""
    one = tuple(int(i == j) for i in range(m) for j in range(m))
    elems = {tuple([0] * (m * m)), one, *gens}
    while True:
        new = set(elems)
        for a in elems:
            for b in elems:
                new.add(tuple((x + y) % p for x, y in zip(a, b)))
                new.add(_mul(a, b, m, p))
        if new == elems:
            return len(elems)
        elems = new


def as_flat(M):
    return tuple(int(M.coeffs[i, j, 0]) for i in range(M.m) for j in range(M.m))


@pytest.fixture
def m2f2():
    return ma.matrix_algebra(2, 1, 2)


# -- arithmetic -------------------------------------------------------------------


def test_elementary_calculus(m2f2):
    E = m2f2.elementary
    assert E(0, 1) * E(1, 0) == E(0, 0)
    assert (E(0, 1) * E(0, 1)).is_zero()
    assert m2f2.identity() * E(1, 0) == E(1, 0)
    assert ma.mat_mul(ma.identity(m2f2), E(0, 1)) == E(0, 1)


def test_entries_and_scalars():
    alg = ma.matrix_algebra(4, 1, 2)
    F = alg.field
    M = alg.from_entries([[F.x, F.one], [F.zero, F.x + 1]])
    assert M.entry(0, 0) == F.x and M.rows()[1][1] == F.x + 1
    assert ma.mat_scale(M, F.x) == alg.scalar(F.x) * M
    assert ma.mat_add(M, M).is_zero()  # characteristic 2


def test_regular_representation_is_multiplicative():
    alg = ma.matrix_algebra(2, 2, 2)
    rng = np.random.default_rng(1)
    for _ in range(20):
        X, Y = alg.random_matrix(rng), alg.random_matrix(rng)
        lhs = alg.to_regular((X * Y).coeffs)
        rhs = alg.to_regular(X.coeffs) @ alg.to_regular(Y.coeffs) % alg.p
        assert np.array_equal(lhs, rhs)
        assert np.array_equal(alg.from_regular(alg.to_regular(X.coeffs)), X.coeffs)


def test_right_mult_map():
    alg = ma.matrix_algebra(3, 1, 2)
    rng = np.random.default_rng(2)
    X, S = alg.random_matrix(rng), alg.random_matrix(rng)
    assert np.array_equal(X.vector @ alg.right_mult_map(S) % 3, (X * S).vector)


def test_associativity_random():
    alg = ma.matrix_algebra(3, 2, 3)
    rng = np.random.default_rng(3)
    for _ in range(10):
        X, Y, Z = (alg.random_matrix(rng) for _ in range(3))
        assert (X * Y) * Z == X * (Y * Z)


# -- span closure -------------------------------------------------------------------


def test_span_closure_examples(m2f2):
    E = m2f2.elementary
    assert ma.span_closure_dim(m2f2.tuple()) == 1
    assert ma.span_closure_dim(ma.upper_triangular_triple(2)) == 3
    spanning = m2f2.tuple(E(0, 0), E(0, 1), E(1, 0), E(1, 1))
    assert ma.spans_linearly(spanning)
    assert ma.span_closure_dim(spanning) == 4


def test_identity_line_dimension():
    # F_q * 1 has F_p-dimension e
    assert ma.span_closure_dim(ma.matrix_algebra(4, 1, 2).tuple()) == 2
    assert ma.span_closure_dim(ma.matrix_algebra(8, 1, 2).tuple()) == 3


def test_all_pairs_in_m2f2_match_set_closure(m2f2):
    mats = [m2f2.from_vector(np.array(v)) for v in itertools.product(range(2), repeat=4)]
    hits = 0
    for A, B in itertools.product(mats, repeat=2):
        size = subalgebra_size([as_flat(A), as_flat(B)], 2, 2)
        dim = ma.span_closure_dim(m2f2.tuple(A, B))
        assert size == 2**dim
        hits += ma.generates_full(m2f2.tuple(A, B))
    assert hits == 96


def test_sampled_pairs_in_m2f3_match_set_closure():
    alg = ma.matrix_algebra(3, 1, 2)
    rng = np.random.default_rng(4)
    for _ in range(40):
        A, B = alg.random_matrix(rng), alg.random_matrix(rng)
        assert subalgebra_size([as_flat(A), as_flat(B)], 2, 3) == 3 ** ma.span_closure_dim(alg.tuple(A, B))


@pytest.mark.parametrize("q,n,m", [(2, 1, 2), (3, 1, 3), (4, 2, 2)])
def test_scalar_tuples_never_generate(q, n, m):
    alg = ma.matrix_algebra(q, n, m)
    rng = np.random.default_rng(5)
    t = alg.tuple(*(alg.scalar(alg.random_element(rng)) for _ in range(3)))
    assert not ma.generates_full(t)


def test_spanning_implies_generating():
    rng = np.random.default_rng(6)
    for q, n, m, g in [(2, 1, 2, 4), (3, 1, 2, 4), (4, 1, 2, 3), (2, 2, 2, 8)]:
        alg = ma.matrix_algebra(q, n, m)
        for _ in range(50):
            t = alg.tuple(*(alg.random_matrix(rng) for _ in range(g)))
            if ma.spans_linearly(t):
                assert ma.generates_full(t)


# -- the explicit pair ----------------------------------------------------------------


def test_construct_pair_smallest(m2f2):
    F = m2f2.field
    A, B = ma.construct_pair(m2f2, [F.one], [F.zero] * 4, F.one)
    assert A == m2f2.elementary(0, 1) and B == m2f2.elementary(1, 0)
    assert ma.generates_full(m2f2.tuple(A, B))


def test_construct_pair_over_f4():
    alg = ma.matrix_algebra(2, 2, 2)
    F = alg.field
    alpha = F.x + 1
    A, B = ma.construct_pair(alg, [alpha], [F.zero] * 4, F.x)
    assert B.entry(1, 0) == F.x / alpha
    assert ma.span_closure_dim(alg.tuple(A, B)) == 8


def test_construct_pair_validation(m2f2):
    F = m2f2.field
    with pytest.raises(InvalidInput):
        ma.construct_pair(m2f2, [F.zero], [F.zero] * 4, F.one)
    with pytest.raises(InvalidInput):
        ma.construct_pair(m2f2, [F.one], [F.zero] * 3, F.one)
    alg = ma.matrix_algebra(2, 2, 2)
    with pytest.raises(InvalidInput):
        ma.construct_pair(alg, [alg.field.one], [alg.field.zero] * 4, alg.field.one)  # u in F_2


def test_random_pairs_generate_m3f3():
    alg = ma.matrix_algebra(3, 1, 3)
    rng = np.random.default_rng(7)
    for _ in range(100):
        A, B = ma.random_pair(alg, rng)
        assert ma.generates_full(alg.tuple(A, B))


def test_shifted_family():
    alg = ma.matrix_algebra(4, 1, 2)
    A, B = ma.random_pair(alg, np.random.default_rng(8))
    fam = ma.shifted_family(A, B, 4)
    assert len(fam) == 4
    assert len({alg.tuple(*pr) for pr in fam}) == 4
    assert all(ma.generates_full(alg.tuple(*pr)) for pr in fam)
    assert len(ma.shifted_family(*ma.random_pair(ma.matrix_algebra(2, 1, 2), np.random.default_rng(0)), q=2)) == 2
    with pytest.raises(InvalidInput):
        ma.shifted_family(A, B, 2)


# -- automorphisms ---------------------------------------------------------------------


@pytest.mark.parametrize("q,n,m,count", [(2, 1, 2, 6), (2, 2, 1, 2), (3, 1, 2, 24), (4, 1, 2, 60), (2, 2, 2, 120)])
def test_automorphism_counts(q, n, m, count):
    alg = ma.matrix_algebra(q, n, m)
    autos = list(ma.enumerate_automorphisms(alg))
    assert len(autos) == count == group_order_c(q, n, m)
    assert len(set(autos)) == count


def test_automorphisms_are_algebra_maps():
    alg = ma.matrix_algebra(2, 2, 2)
    rng = np.random.default_rng(9)
    X, Y = alg.random_matrix(rng), alg.random_matrix(rng)
    for phi in ma.enumerate_automorphisms(alg):
        fX, fY, fXY = phi.apply(alg.tuple(X, Y, X * Y))
        assert fX * fY == fXY
        assert phi.apply(alg.tuple(alg.identity()))[0] == alg.identity()


def test_identity_and_inverse_automorphism():
    alg = ma.matrix_algebra(4, 1, 2)
    rng = np.random.default_rng(10)
    t = alg.tuple(alg.random_matrix(rng), alg.random_matrix(rng))
    autos = list(ma.enumerate_automorphisms(alg))
    ident = [phi for phi in autos if phi.frobenius_power == 0 and phi.projective_matrix == alg.identity()]
    assert len(ident) == 1 and ma.apply_automorphism(ident[0], t) == t
    for phi in autos:
        assert phi.inverse().apply(phi.apply(t)) == t


def test_generation_is_automorphism_invariant_exhaustively(m2f2):
    maps = ma.automorphism_maps(m2f2)
    for vecs in itertools.product(itertools.product(range(2), repeat=4), repeat=2):
        t = ma.MatrixTuple.from_vectors(m2f2, np.array(vecs))
        gen = ma.generates_full(t)
        for R in maps:
            assert ma.generates_full(ma.MatrixTuple.from_vectors(m2f2, t.vectors @ R % 2)) == gen


@pytest.mark.parametrize("g", [2, 3])
def test_orbit_size_law(m2f2, g):
    C = group_order_c(2, 1, 2)
    S = 0
    for vecs in itertools.product(itertools.product(range(2), repeat=4), repeat=g):
        t = ma.MatrixTuple.from_vectors(m2f2, np.array(vecs))
        if ma.generates_full(t):
            S += 1
            assert ma.orbit_size(t) == C
            assert ma.stabilizer_is_trivial(t)
    assert S % C == 0


def test_stabilizers():
    for q in (2, 3):
        t = ma.upper_triangular_triple(q)
        assert ma.stabilizer_is_trivial(t) and not ma.generates_full(t)
    m2f2 = ma.matrix_algebra(2, 1, 2)
    assert ma.stabilizer_order(m2f2.tuple()) == 6
    assert not ma.stabilizer_is_trivial(m2f2.tuple())


def test_upper_triangular_triple_entries():
    t = ma.upper_triangular_triple(2)
    assert [as_flat(M) for M in t] == [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 0, 1)]


def test_canonical_projective():
    alg = ma.matrix_algebra(3, 1, 2)
    F = alg.field
    M = alg.from_entries([[F.zero, F(2)], [F(1), F(1)]])
    C = ma.canonical_projective(M)
    assert C.entry(0, 1) == F.one
    assert C == alg.scalar(F(2)) * M


# -- serialization ------------------------------------------------------------------------


def test_matrix_json_round_trip():
    alg = ma.matrix_algebra(4, 2, 2)
    M = alg.random_matrix(np.random.default_rng(11))
    obj = ma.matrix_to_json(M)
    assert ma.matrix_from_json(obj) == M
    bad = dict(obj, entries=obj["entries"][:-1])
    with pytest.raises(InvalidInput):
        ma.matrix_from_json(bad)
