import random

import pytest

from ditalg.bigraph import Bigraph, Factor
from ditalg.fixtures import ex1, ex2, exi, exk, exa
from ditalg.interlace import certify
from ditalg.modcat import (
    EndAlgebra, MorphismPair, Rep, algebra_radical, compose, decompose,
    direct_sum, hom, hom_dim, identity_morphism, in_hom, is_indecomposable,
    is_isomorphism, iso_test, jordan_at, simple_at, split_idempotent,
    transport_structure, zero_morphism, morphism_sum, morphism_scale,
)
from ditalg.scalars import PrimeField, Poly, QQ
from ditalg.scalars.linalg import Mat

F2 = PrimeField(2)
F3 = PrimeField(3)
F5 = PrimeField(5)
F101 = PrimeField(101)


def p1_rep(dit):
    """k -> k identity module over EX1-like fixtures."""
    F = dit.field
    r = Rep(dit, {"1": 1, "2": 1})
    r.arrow_ops["a"] = Mat(F, 1, 1, [[F.one]])
    return r


def kron_rep(dit, a, b):
    F = dit.field
    r = Rep(dit, {"1": 1, "2": 1})
    r.arrow_ops["a"] = Mat(F, 1, 1, [[F.from_int(a)]])
    r.arrow_ops["b"] = Mat(F, 1, 1, [[F.from_int(b)]])
    return r


# -- hom dimensions ----------------------------------------------------------

def test_hom_ex1_simples():
    d = ex1(F5)
    certify(d)
    s1, s2 = simple_at(d, "1"), simple_at(d, "2")
    assert hom_dim(d, s1, s1) == 1
    assert hom_dim(d, s1, s2) == 0
    assert hom_dim(d, s2, s1) == 0


def test_hom_ex2_simples():
    # The U-condition a f0 = f0 a + f1(delta a) with a acting as zero on both
    # sides forces f1(v) = 0, so hom(S1, S2) vanishes: consistent with the
    # regularization equivalence EX2-Mod ~ (k x k)-Mod.
    d = ex2(F5)
    certify(d)
    s1, s2 = simple_at(d, "1"), simple_at(d, "2")
    assert hom_dim(d, s1, s2) == 0
    assert hom_dim(d, s2, s1) == 0
    assert hom_dim(d, s1, s1) == 1
    # f1 is not free on a-killed sums either: End(S1 + S2) is 2-dimensional
    M = direct_sum([s1, s2])
    assert hom_dim(d, M, M) == 2


def test_hom_validates_membership():
    d = ex2(F5)
    s1, s2 = simple_at(d, "1"), simple_at(d, "2")
    for f in hom(d, s1, s2):
        assert in_hom(d, s1, s2, f)


# -- composition --------------------------------------------------------------

def test_identity_neutral():
    d = ex2(F5)
    certify(d)
    M = p1_rep(d)
    N = direct_sum([simple_at(d, "1"), simple_at(d, "2")])
    for f in hom(d, M, N):
        idm = identity_morphism(M)
        idn = identity_morphism(N)
        assert compose(d, f, idm, M, M, N) == f
        assert compose(d, idn, f, M, N, N) == f


def test_compose_associative_random():
    d = ex2(F101)
    certify(d)
    rng = random.Random(5)
    M = direct_sum([simple_at(d, "1"), simple_at(d, "2")])
    homMM = hom(d, M, M)

    def rand_endo():
        out = zero_morphism(M, M)
        for h in homMM:
            out = morphism_sum(out, morphism_scale(h, F101.random(rng)))
        return out

    for _ in range(50):
        f, g, h = rand_endo(), rand_endo(), rand_endo()
        lhs = compose(d, h, compose(d, g, f, M, M, M), M, M, M)
        rhs = compose(d, compose(d, h, g, M, M, M), f, M, M, M)
        assert lhs == rhs
        assert in_hom(d, M, M, compose(d, g, f, M, M, M))


# -- isomorphisms -------------------------------------------------------------

def test_identity_is_isomorphism():
    d = ex1(F5)
    certify(d)
    M = p1_rep(d)
    inv = is_isomorphism(d, identity_morphism(M), M, M)
    assert inv == identity_morphism(M)


def test_zero_f0_not_iso():
    d = ex2(F5)
    certify(d)
    s1, s2 = simple_at(d, "1"), simple_at(d, "2")
    M = direct_sum([s1, s2])
    f = zero_morphism(M, M)
    f.f1["v"] = Mat(F5, 1, 1, [[F5.one]])
    assert is_isomorphism(d, f, M, M) is None


def test_phantom_iso_from_transport():
    # The regularization phantom: (1, f1) is an isomorphism from the
    # transported structure onto M; over EX2 it identifies the a = 1 module
    # with S1 (+) S2.
    d = ex2(F5)
    certify(d)
    M = p1_rep(d)  # a acts as 1
    f0 = {p: Mat.identity_of(F5, M.dims[p]) for p in d.bigraph.point_order}
    f1 = {"v": Mat(F5, 1, 1, [[F5.one]])}
    Mt = transport_structure(d, M, f0, f1)
    assert Mt.arrow_ops["a"].is_zero()  # a = 1 - f1(v) = 0
    f = MorphismPair(f0, f1)
    assert in_hom(d, Mt, M, f)
    g = is_isomorphism(d, f, Mt, M)
    assert g is not None
    assert compose(d, g, f, Mt, M, Mt) == identity_morphism(Mt)
    assert compose(d, f, g, M, Mt, M) == identity_morphism(M)
    # consequence: over EX2 the a = 1 module is decomposable
    assert iso_test(d, direct_sum([simple_at(d, "1"), simple_at(d, "2")]), M)


def test_random_triangular_isos_invert(subtests=None):
    d = ex2(F101)
    certify(d)
    M = direct_sum([simple_at(d, "1"), simple_at(d, "2"), simple_at(d, "1")])
    rng = random.Random(9)
    for _ in range(30):
        f = identity_morphism(M)
        for p in f.f0:
            n = M.dims[p]
            m = Mat(F101, n, n, [[F101.random(rng) for _ in range(n)] for _ in range(n)])
            if not F101.is_zero(m.det()):
                f.f0[p] = m
        f.f1["v"] = Mat(F101, M.dims["2"], M.dims["1"],
                        [[F101.random(rng) for _ in range(M.dims["1"])]
                         for _ in range(M.dims["2"])])
        g = is_isomorphism(d, f, M, M)
        assert g is not None
        assert compose(d, g, f, M, M, M) == identity_morphism(M)


# -- transport ---------------------------------------------------------------

def test_roiter_transport_yields_valid_module():
    d = ex2(F5)
    certify(d)
    N = direct_sum([simple_at(d, "1"), simple_at(d, "2")])
    rng = random.Random(3)
    f0 = {p: Mat.identity_of(F5, N.dims[p]) for p in d.bigraph.point_order}
    f1 = {"v": Mat(F5, 1, 1, [[F5.from_int(2)]])}
    M = transport_structure(d, N, f0, f1)
    assert M.validate() is None
    f = MorphismPair(f0, f1)
    assert in_hom(d, M, N, f)


def test_transport_annihilates_ideal():
    d = exi(F5)
    certify(d)
    N = Rep(d, {"1": 1, "2": 1, "3": 1})
    N.arrow_ops["a"] = Mat(F5, 1, 1, [[F5.one]])
    N.arrow_ops["b"] = Mat(F5, 1, 1, [[F5.zero]])
    assert N.validate() is None
    f0 = {p: Mat(F5, N.dims[p], N.dims[p], [[F5.from_int(2)]]) for p in d.bigraph.point_order}
    f1 = {"u": Mat(F5, 1, 1, [[F5.one]])}
    M = transport_structure(d, N, f0, f1)
    assert M.validate() is None


# -- idempotent splitting and decomposition ------------------------------------

def test_split_identity_idempotent():
    d = ex1(F5)
    certify(d)
    M = p1_rep(d)
    e = identity_morphism(M)
    M1, M2, h = split_idempotent(d, M, e)
    assert M1.total_dim() == M.total_dim() and M2.total_dim() == 0


def test_split_zero_idempotent():
    d = ex1(F5)
    certify(d)
    M = p1_rep(d)
    e = zero_morphism(M, M)
    M1, M2, h = split_idempotent(d, M, e)
    assert M1.total_dim() == 0 and M2.total_dim() == M.total_dim()


def test_split_projection_with_phantom():
    # Over EX2 the a = 1 module carries the idempotent (diag(1,0), f1 = 1):
    # membership in U forces the phantom part.  Splitting recovers the simples.
    d = ex2(F5)
    certify(d)
    M = p1_rep(d)
    e = zero_morphism(M, M)
    e.f0["1"] = Mat.identity_of(F5, 1)
    e.f1["v"] = Mat(F5, 1, 1, [[F5.one]])
    assert in_hom(d, M, M, e)
    assert compose(d, e, e, M, M, M) == e
    M1, M2, h = split_idempotent(d, M, e)
    assert {M1.dim_vector(), M2.dim_vector()} == {(1, 0), (0, 1)}
    S = direct_sum([M1, M2])
    hinv = is_isomorphism(d, h, S, M)
    assert hinv is not None
    # h^-1 e h is the block identity
    blk = compose(d, hinv, compose(d, e, h, S, M, M), S, M, S)
    expect = zero_morphism(S, S)
    for p in d.bigraph.point_order:
        n1 = M1.dims[p]
        m = Mat(F5, S.dims[p], S.dims[p])
        for i in range(n1):
            m.data[i][i] = F5.one
        expect.f0[p] = m
    assert blk == expect


def test_split_plain_projection_ex1():
    d = ex1(F5)
    certify(d)
    s1 = simple_at(d, "1")
    M = direct_sum([s1, s1])
    e = zero_morphism(M, M)
    e.f0["1"] = Mat(F5, 2, 2, [[1, 1], [0, 0]])  # idempotent, nontrivial
    assert compose(d, e, e, M, M, M) == e
    M1, M2, _ = split_idempotent(d, M, e)
    assert M1.dim_vector() == (1, 0) and M2.dim_vector() == (1, 0)


def test_decompose_simple():
    d = ex1(F5)
    certify(d)
    s1 = simple_at(d, "1")
    parts = decompose(d, s1)
    assert len(parts) == 1 and parts[0].dim_vector() == (1, 0)


def test_decompose_p1_plus_s2():
    d = ex1(F2)
    certify(d)
    M = direct_sum([p1_rep(d), simple_at(d, "2")])
    parts = decompose(d, M)
    assert sorted(p.dim_vector() for p in parts) == [(0, 1), (1, 1)]
    for p in parts:
        assert is_indecomposable(d, p)


def test_kronecker_11_indecomposable():
    d = exk(F3)
    certify(d)
    M = kron_rep(d, 1, 0)
    assert is_indecomposable(d, M)
    parts = decompose(d, M)
    assert len(parts) == 1


def test_decompose_seed_stability():
    d = ex1(F2)
    certify(d)
    M = direct_sum([p1_rep(d), p1_rep(d), simple_at(d, "1")])
    parts1 = decompose(d, M)
    parts2 = decompose(d, M)
    assert sorted(p.dim_vector() for p in parts1) == sorted(p.dim_vector() for p in parts2)
    assert sorted(p.dim_vector() for p in parts1) == [(1, 0), (1, 1), (1, 1)]


# -- iso tests ----------------------------------------------------------------

def test_iso_self():
    d = exk(F3)
    certify(d)
    M = kron_rep(d, 1, 2)
    assert iso_test(d, M, M)


def test_simples_not_iso():
    d = ex1(F5)
    certify(d)
    assert not iso_test(d, simple_at(d, "1"), simple_at(d, "2"))


def test_kronecker_family_pairwise_noniso():
    d = exk(F3)
    certify(d)
    reps = [kron_rep(d, 1, lam) for lam in range(3)] + [kron_rep(d, 0, 1)]
    for i in range(len(reps)):
        for j in range(len(reps)):
            assert iso_test(d, reps[i], reps[j]) == (i == j)


def test_iso_invariant_under_conjugation():
    d = exk(F5)
    certify(d)
    F = F5
    M = Rep(d, {"1": 2, "2": 2})
    M.arrow_ops["a"] = Mat(F, 2, 2, [[1, 0], [0, 1]])
    M.arrow_ops["b"] = Mat(F, 2, 2, [[0, 1], [0, 0]])
    g1 = Mat(F, 2, 2, [[1, 2], [0, 1]])
    g2 = Mat(F, 2, 2, [[3, 1], [1, 4]])
    assert not F.is_zero(g2.det())
    N = Rep(d, {"1": 2, "2": 2})
    N.arrow_ops["a"] = g2 * M.arrow_ops["a"] * g1.inverse()
    N.arrow_ops["b"] = g2 * M.arrow_ops["b"] * g1.inverse()
    assert iso_test(d, M, N)


# -- rational points -----------------------------------------------------------

def test_jordan_blocks_at_rational_point():
    F = F5
    b = Bigraph(F, [("1", Factor.rational([Poly.from_ints(F, [0, 1])]))])
    from ditalg.tensor import Differential, Layer
    from ditalg.interlace import Dit, IdealData
    layer = Layer(b)
    d = Dit(layer, Differential(layer, {}), IdealData(), name="loop-point")
    certify(d)
    j1 = jordan_at(d, "1", F.from_int(1), 2)
    assert j1.validate() is None
    with pytest.raises(Exception):
        jordan_at(d, "1", F.zero, 1)  # x inverted: eigenvalue 0 is forbidden
    j2 = jordan_at(d, "1", F.from_int(2), 2)
    assert not iso_test(d, j1, j2)
    assert iso_test(d, j1, j1)
    assert is_indecomposable(d, j1)
    M = direct_sum([j1, jordan_at(d, "1", F.from_int(1), 1)])
    parts = decompose(d, M)
    assert sorted(p.total_dim() for p in parts) == [1, 2]


# -- endomorphism algebra radical ------------------------------------------------

def test_algebra_radical_known_cases():
    # k[t]/(t^2) over F2: radical is (t)
    F = F2
    table = [[[F.one, F.zero], [F.zero, F.one]], [[F.zero, F.one], [F.zero, F.zero]]]
    rad = algebra_radical(F, table, 2)
    assert len(rad) == 1
    # k x k: radical 0
    table2 = [[[F.one, F.zero], [F.zero, F.zero]], [[F.zero, F.zero], [F.zero, F.one]]]
    # basis e1, e2 orthogonal idempotents
    table2 = [[[F.one, F.zero], [F.zero, F.zero]],
              [[F.zero, F.zero], [F.zero, F.one]]]
    assert algebra_radical(F, table2, 2) == []


def test_algebra_radical_group_algebra_f2c2():
    # F2[C2] = F2[t]/(t^2-1) = F2[t]/((t-1)^2): radical dim 1
    F = F2
    # basis 1, g with g^2 = 1
    table = [[[F.one, F.zero], [F.zero, F.one]],
             [[F.zero, F.one], [F.one, F.zero]]]
    rad = algebra_radical(F, table, 2)
    assert len(rad) == 1


def test_end_of_indecomposable_local():
    d = ex1(F2)
    certify(d)
    M = p1_rep(d)
    E = EndAlgebra(d, M)
    assert E.dim == 1
