import random
from fractions import Fraction
from itertools import combinations
from math import factorial

import pytest

from liepair.algebra import ONE, add_into, sym_dim_upto, sym_index, sym_index_upto
from liepair.connection import connection_from_b, default_connection, perturb_connection
from liepair.enveloping import (
    PBW, action_intertwining_defect, build_enveloping, build_quotient,
    check_coalgebra_morphism, overlap_defects, symmetrization, transported_action_defects,
)
from liepair.liealg import LieAlgebra, bott_action, make_pair

from conftest import pair_of


def env_of(name, N):
    return build_enveloping(pair_of(name).cad, N)


def test_normal_form_examples():
    L = LieAlgebra.from_brackets(2, {})
    env = build_enveloping(make_pair(L, []).cad, 2)
    assert env.normal_form((1, 0)) == {(0, 1): ONE}
    # Heisenberg in the input order x, y, z (A = 0 keeps it)
    H = LieAlgebra.from_brackets(3, {(0, 1): [0, 0, 1]})
    env = build_enveloping(make_pair(H, []).cad, 2)
    assert env.normal_form((1, 0)) == {(0, 1): ONE, (2,): -ONE}
    S = LieAlgebra.from_brackets(3, {(0, 1): [-2, 0, 0], (0, 2): [0, 1, 0], (1, 2): [0, 0, -2]})
    env = build_enveloping(make_pair(S, []).cad, 2)
    assert env.normal_form((2, 0)) == {(0, 2): ONE, (1,): -ONE}


def test_confluent_and_counted(example):
    env = env_of(example, 6)
    assert overlap_defects(env) == []
    for N in range(7):
        assert env.dimension(N) == sym_dim_upto(env.n, N)


def test_normal_form_associative(example):
    env = env_of(example, 4)
    rng = random.Random(2)
    for _ in range(20):
        w = tuple(rng.randrange(env.n) for _ in range(rng.randint(1, 4)))
        k = rng.randint(0, len(w))
        assert env.mul(env.normal_form(w[:k]), env.normal_form(w[k:])) == env.normal_form(w)


def test_quotient_dimensions(example):
    p = pair_of(example)
    for N in range(7):
        Q = build_quotient(p, env_of(example, N + 1), N)
        assert len(Q.basis) == sym_dim_upto(p.q, N)
    Q = build_quotient(pair_of("sl2-borel"), env_of("sl2-borel", 4), 3)
    assert Q.basis == [(), (0,), (0, 0), (0, 0, 0)]


def test_quotient_needs_room():
    with pytest.raises(ValueError):
        build_quotient(pair_of("sl2-borel"), env_of("sl2-borel", 3), 3)


def test_quotient_of_full_algebra():
    S = LieAlgebra.from_brackets(3, {(0, 1): [-2, 0, 0], (0, 2): [0, 1, 0], (1, 2): [0, 0, -2]})
    p = make_pair(S, [[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    Q = build_quotient(p, build_enveloping(p.cad, 4), 3)
    assert Q.basis == [()]


def test_pbw_anchor_examples():
    p = pair_of("sl2-borel")
    pbw = PBW(p, default_connection(p), 5)
    assert pbw.images[()] == {(): ONE}
    for n in range(6):
        assert pbw.power([ONE], n) == {(0,) * n: ONE}
    hp = pair_of("heisenberg-center")
    hpbw = PBW(hp, default_connection(hp), 3)
    assert hpbw.power([ONE, 0], 2) == {(0, 0): ONE}
    # x y = 1/2 (xy + yx) + 1/2 z, and z lies in U(L)A
    assert hpbw.images[(0, 1)] == {(0, 1): ONE}


def _polarized(pbw, m):
    """(1/n!) sum over nonempty S of (-1)^(n-|S|) PBW((sum_S b_i)^n)."""
    n = len(m)
    q = pbw.q
    out = {}
    for k in range(1, n + 1):
        for S in combinations(range(n), k):
            v = [Fraction(0)] * q
            for i in S:
                v[m[i]] += 1
            add_into(out, pbw.power(v, n), Fraction((-1) ** (n - k), factorial(n)))
    return out


@pytest.mark.parametrize("perturbed", [False, True])
def test_pbw_matches_polarization(example, perturbed):
    p = pair_of(example)
    nab = default_connection(p)
    if perturbed:
        nab = perturb_connection(p, nab, random.Random(4))
    pbw = PBW(p, nab, 4)
    for m in sym_index_upto(p.q, 4):
        if m:
            assert pbw.images[m] == _polarized(pbw, m)
    for b in range(p.q):
        assert pbw.images[(b,)] == {(b,): ONE}


def test_pbw_symbol_and_round_trip(example):
    p = pair_of(example)
    pbw = PBW(p, perturb_connection(p, default_connection(p), random.Random(8)), 5)
    for d in range(6):
        blk = pbw.degree_block(d)
        assert blk == [[Fraction(int(i == k)) for k in range(len(blk))] for i in range(len(blk))]
    for m in pbw.basis:
        assert pbw.inverse(pbw.images[m]) == {m: ONE}
        assert pbw.apply(pbw.inverse({m: ONE})) == {m: ONE}
    rng = random.Random(9)
    for _ in range(50):
        s = {m: Fraction(rng.randint(-5, 5), rng.randint(1, 3)) for m in rng.sample(pbw.basis, min(4, len(pbw.basis)))}
        s = {m: c for m, c in s.items() if c}
        assert pbw.inverse(pbw.apply(s)) == s


def test_pbw_inverse_example():
    p = pair_of("sl2-borel")
    pbw = PBW(p, default_connection(p), 3)
    assert pbw.inverse({(0, 0): ONE}) == {(0, 0): ONE}
    assert pbw.inverse({(): ONE}) == {(): ONE}


def test_pbw_overflow():
    p = pair_of("sl2-borel")
    pbw = PBW(p, default_connection(p), 2)
    with pytest.raises(OverflowError):
        pbw.power([ONE], 3)
    with pytest.raises(OverflowError):
        pbw.apply({(0, 0, 0): ONE})


@pytest.mark.parametrize("name,N", [("sl2-borel", 4), ("heisenberg-center", 3),
                                    ("sl2-iwasawa-matched", 4), ("semidirect-aff1", 4)])
def test_coalgebra_morphism(name, N):
    p = pair_of(name)
    for nab in (default_connection(p), perturb_connection(p, default_connection(p), random.Random(0))):
        assert check_coalgebra_morphism(PBW(p, nab, N), N) == []


def test_transport_examples():
    hp = pair_of("heisenberg-center")
    pbw = PBW(hp, default_connection(hp), 4)
    assert all(not pbw.delta(0, {m: ONE}) for m in pbw.basis)
    p = pair_of("sl2-borel")
    pbw = PBW(p, default_connection(p), 4)
    assert pbw.delta(1, {(0,): ONE}) == {(0,): -2 * ONE}
    assert pbw.delta(0, {(0, 0): ONE}) == {(0,): -2 * ONE}


def test_transported_action_invariants(example):
    p = pair_of(example)
    for nab in (default_connection(p), perturb_connection(p, default_connection(p), random.Random(6))):
        assert transported_action_defects(PBW(p, nab, 5)) == []


def test_intertwining_defect_examples():
    sp = pair_of("semidirect-aff1")
    pbw = PBW(sp, default_connection(sp), 5)
    assert action_intertwining_defect(pbw, bott_action(sp), 0) == {}
    p = pair_of("sl2-borel")
    pbw = PBW(p, default_connection(p), 3)
    d = action_intertwining_defect(pbw, bott_action(p), 0)
    assert d[(0, 0)] == {(0,): -2 * ONE}


def test_matched_abelian_b_is_symmetrization():
    # Heisenberg with A = span(x): B = span(y, z) is abelian, zero B-connection
    H = LieAlgebra.from_brackets(3, {(0, 1): [0, 0, 1]})
    p = make_pair(H, [[1, 0, 0]])
    nab = connection_from_b(p, [[[0] * 2] * 2] * 2)
    pbw = PBW(p, nab, 4)
    for m in sym_index_upto(p.q, 4):
        assert pbw.images[m] == pbw.Q.cls(symmetrization(pbw.env, m))


def test_matched_pbw_agrees_with_recursion_in_UB():
    p = pair_of("sl2-iwasawa-matched")
    bconn = [[[-1, 0], [0, 0]], [[0, -1], [0, 0]]]
    pbw = PBW(p, connection_from_b(p, bconn), 4)
    # B on its own, as the pair (B, 0) with the same basis
    cB = [[p.cad[i][k][:p.q] for k in range(p.q)] for i in range(p.q)]
    B = LieAlgebra(cB, ["x", "y"])
    pb = make_pair(B, [])
    mats = [[[bconn[b][b2][b3] for b2 in range(2)] for b3 in range(2)] for b in range(2)]
    from liepair.connection import ExtendedConnection
    nb = ExtendedConnection.from_adapted(pb, mats)
    pbwB = PBW(pb, nb, 4)
    # U(B) -> Q is the identity on normal-ordered B monomials
    for m in sym_index_upto(2, 4):
        assert pbw.images[m] == pbwB.images[m]


def test_symmetrization_has_identity_symbol():
    env = env_of("sl2-borel", 4)
    for m in sym_index(3, 3):
        s = symmetrization(env, m)
        assert all(len(k) < 3 or k == m for k in s)
        assert s[m] == ONE
