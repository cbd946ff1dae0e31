import random
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from liepair import catalog
from liepair.algebra import ext_index, rank
from liepair.liealg import (
    Cochain, LieAlgebra, NotAComplement, NotASubalgebra, PairError, bott_action,
    ce_differential, check_matched_pair, cohomology, flatness_defects, hom_module,
    make_pair, tensor_module, trivial_module, validate_lie,
)

from conftest import pair_of

SL2 = {(0, 1): [-2, 0, 0], (0, 2): [0, 1, 0], (1, 2): [0, 0, -2]}   # basis e, h, f


def sl2():
    return LieAlgebra.from_brackets(3, SL2, ["e", "h", "f"])


def test_sl2_valid():
    assert validate_lie(sl2()) == []


def test_abelian_valid():
    assert validate_lie(LieAlgebra.from_brackets(4, {})) == []


def test_perturbed_entry_reports_jacobi_at_efh():
    L = sl2()
    L.c[0][2][1] = Fraction(2)      # one raw entry only; c[f][e][h] stays -1
    bad = validate_lie(L)
    jac = [b for b in bad if b["kind"] == "jacobi"]
    assert jac and all(sorted(b["indices"]) == [0, 1, 2] for b in jac)
    assert {b["component"] for b in jac} == {1}
    assert any(b["kind"] == "antisymmetry" and b["indices"] == [0, 2, 1] for b in bad)


def test_symmetric_rescaling_is_still_lie():
    L = LieAlgebra.from_brackets(3, {(0, 1): [-2, 0, 0], (0, 2): [0, 2, 0], (1, 2): [0, 0, -2]})
    assert validate_lie(L) == []


def test_jacobi_violation_in_antisymmetric_tensor():
    L = LieAlgebra.from_brackets(3, {(0, 1): [-2, 0, 0], (0, 2): [1, 1, 0], (1, 2): [0, 0, -2]})
    bad = validate_lie(L)
    assert [b["kind"] for b in bad] == ["jacobi"]
    assert bad[0]["indices"] == [0, 1, 2] and bad[0]["component"] == 0 and bad[0]["value"] == 2


def test_make_pair_examples():
    p = make_pair(sl2(), [[1, 0, 0], [0, 1, 0]])
    assert p.q == 1 and p.j_rows == [[0, 0, 1]]
    H = LieAlgebra.from_brackets(3, {(0, 1): [0, 0, 1]})
    p = make_pair(H, [[0, 0, 1]])
    assert p.q == 2 and p.j_rows == [[1, 0, 0], [0, 1, 0]]
    with pytest.raises(NotASubalgebra) as exc:
        make_pair(sl2(), [[1, 0, 0], [0, 0, 1]])
    assert exc.value.value == [0, 1, 0]


def test_make_pair_errors():
    with pytest.raises(PairError):
        make_pair(sl2(), [[1, 0, 0], [2, 0, 0]])
    with pytest.raises(NotAComplement):
        make_pair(sl2(), [[1, 0, 0], [0, 1, 0]], [[1, 1, 0]])
    with pytest.raises(NotAComplement):
        make_pair(sl2(), [[1, 0, 0], [0, 1, 0]], [[0, 0, 1], [0, 1, 1]])


def test_degenerate_pairs():
    p = make_pair(sl2(), [])
    assert p.q == 3 and p.r == 0 and p.is_degenerate
    p = make_pair(sl2(), [[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert p.q == 0 and p.is_degenerate


def test_pair_invariants(example):
    p = pair_of(example)
    for b in range(p.q):
        e = [Fraction(int(i == b)) for i in range(p.q)]
        assert p.pr(p.j(e)) == e
    for a in range(p.r):
        assert not any(p.pr(p.a_vector(a)))
    assert rank(p.A_rows, p.n) + p.q == p.n


def test_bott_examples():
    p = pair_of("sl2-borel")
    bott = bott_action(p)
    assert bott.action[1] == [[-2]]      # h . f = -2 f
    assert bott.action[0] == [[0]]       # e . f = pr(h) = 0
    hc = bott_action(pair_of("heisenberg-center"))
    assert all(not any(map(any, m)) for m in hc.action)


def test_bott_flat(example):
    assert flatness_defects(bott_action(pair_of(example))) == []


def test_ce_example_borel():
    p = pair_of("sl2-borel")
    bott = bott_action(p)
    d = ce_differential(bott, Cochain(0, [[Fraction(1)]]))
    assert d.values == [[0], [-2]]


def _modules(p):
    bott = bott_action(p)
    yield bott
    yield hom_module(bott, 2, symmetric=False)
    yield hom_module(bott, 2, symmetric=True)
    yield tensor_module(bott, trivial_module(p.a_constants(), 2))


def test_d_squared_zero(example):
    p = pair_of(example)
    rng = random.Random(0)
    for m in _modules(p):
        for deg in range(p.r + 1):
            vals = [[Fraction(rng.randint(-3, 3)) for _ in range(m.dim)] for _ in ext_index(p.r, deg)]
            dd = ce_differential(m, ce_differential(m, Cochain(deg, vals)))
            assert dd.is_zero()


def test_euler_characteristic(example):
    p = pair_of(example)
    for m in _modules(p):
        chi = sum((-1) ** k * cohomology(m, k)[0] for k in range(p.r + 1))
        assert chi == sum((-1) ** k * comb(p.r, k) * m.dim for k in range(p.r + 1))


def test_cohomology_trivial_abelian():
    for r in range(4):
        L = LieAlgebra.from_brackets(r + 1, {})
        p = make_pair(L, [[int(i == k) for i in range(r + 1)] for k in range(r)])
        m = trivial_module(p.a_constants())
        for k in range(r + 1):
            assert cohomology(m, k)[0] == comb(r, k)
        assert cohomology(m, r + 1)[0] == 0


def test_matched_pair_examples():
    p = make_pair(sl2(), [[1, 0, -1]], [[0, 1, 0], [1, 0, 0]])
    assert check_matched_pair(p)
    assert check_matched_pair(pair_of("sl2-borel"))
    H = LieAlgebra.from_brackets(3, {(0, 1): [0, 0, 1]})
    assert check_matched_pair(make_pair(H, [[1, 0, 0]]))
    assert not check_matched_pair(make_pair(H, [[0, 0, 1]]))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_abelian_extensions(seed):
    # semidirect products h |x V with random diagonalizable h-action are Lie
    rng = random.Random(seed)
    n = rng.randint(2, 4)
    br = {(0, k): [0] * k + [rng.randint(-3, 3)] + [0] * (n - k - 1) for k in range(1, n)}
    L = LieAlgebra.from_brackets(n, br)
    assert validate_lie(L) == []
    p = make_pair(L, [[1] + [0] * (n - 1)])
    assert flatness_defects(bott_action(p)) == []


def test_catalog_pairs_build(example):
    doc = catalog.get(example)
    assert validate_lie(doc.lie_algebra()) == []
    doc.pair()
