import itertools
import re

import pytest

from sofic.errors import ParseError, UnsupportedGroup
from sofic.fixtures import F2_TO_S5
from sofic.groups import AbelianGroup, FiniteGroup, FreeGroup, cyclic_group
from sofic.monoids import FINITE, NONAMENABLE
from sofic.structured import make_bicyclic, make_coset_monoid, make_free_times_semilattice


def rewrite(word):
    """Normal form of a p/q word by deleting 'pq' until none is left."""
    while "pq" in word:
        word = word.replace("pq", "", 1)
    return (word.count("q"), word.count("p"))


def bicyclic_word(a, b):
    return "q" * a + "p" * b


def test_bicyclic_examples():
    B = make_bicyclic()
    assert B.multiply((0, 1), (1, 0)) == (0, 0)
    assert B.multiply((1, 0), (0, 1)) == (1, 1)
    assert B.multiply((2, 3), (1, 4)) == (2, 6)


def test_bicyclic_matches_rewriting():
    B = make_bicyclic()
    R = range(11)
    for a, b, c, d in itertools.product(R, R, R, R):
        assert B.multiply((a, b), (c, d)) == rewrite(bicyclic_word(a, b) + bicyclic_word(c, d))


def test_bicyclic_units_and_labels():
    B = make_bicyclic()
    assert B.is_unit(B.one) and not B.is_unit(B.p) and not B.is_unit(B.q)
    assert B.declared["units_equal_j_class"] is False
    for x in [(0, 0), (1, 0), (0, 1), (2, 3), (1, 1)]:
        assert B.parse(B.label(x)) == x
    assert B.label((2, 3)) == "q^2p^3"
    assert B.parse("pq") == B.one
    with pytest.raises(ParseError):
        B.parse("pz")
    # 1 = pq with p a non-unit: the J-class of 1 is not the unit group
    assert B.multiply(B.p, B.q) == B.one


def test_bicyclic_encoding_round_trip():
    B = make_bicyclic()
    for x in [(0, 0), (3, 5)]:
        assert B.decode(B.encode(x)) == x
    with pytest.raises(ParseError):
        B.decode(b"not python")


def Zcosets():
    return make_coset_monoid(AbelianGroup(1), [2, 3])


def test_coset_examples():
    C = make_coset_monoid(AbelianGroup(1), [2])
    assert C.multiply(C.parse("1+2Z"), C.parse("0+2Z")) == C.parse("1+2Z")
    C = Zcosets()
    assert C.multiply(C.parse("{3}"), C.parse("{4}")) == C.parse("{7}")
    whole = C.multiply(C.parse("1+2Z"), C.parse("1+3Z"))
    assert whole == C.parse("Z") == C.parse("0+Z")
    assert C.label(whole) == "0+Z"


def test_coset_family_and_units():
    C = Zcosets()
    assert len(C.subgroups) == 4          # 0, 2Z, 3Z, Z
    assert C.is_unit(C.parse("{-5}")) and not C.is_unit(C.parse("1+2Z"))
    u = C.parse("{5}")
    assert C.multiply(u, C.unit_inverse(u)) == C.one
    assert C.parse("5+2Z") == C.parse("1+2Z")
    assert C.parse("-1+3Z") == C.parse("2+3Z")


def test_coset_translate_matches_multiplication():
    C = Zcosets()
    for h in range(1, len(C.subgroups)):
        assert C.subgroup_index(h) <= 12
        for rep in range(-6, 7):
            s = C.coset((rep,), h)
            sq = C.stabiliser_quotient(s)
            for g in range(-10, 11):
                gh = sq.hom((g,))
                assert sq.translate(s, gh) == C.multiply(s, C.from_group((g,)))
                if gh == sq.quotient.identity:
                    assert C.multiply(s, C.from_group((g,))) == s
            for g, k in itertools.product(range(-4, 5), repeat=2):
                Q = sq.quotient
                assert sq.hom((g + k,)) == Q.multiply(sq.hom((g,)), sq.hom((k,)))


def test_coset_associative_on_samples():
    C = Zcosets()
    sample = [C.coset((r,), h) for h in range(len(C.subgroups)) for r in range(-2, 3)]
    for x, y, z in itertools.product(sample, repeat=3):
        assert C.multiply(C.multiply(x, y), z) == C.multiply(x, C.multiply(y, z))


def test_coset_over_z2_lattices():
    C = make_coset_monoid(AbelianGroup(2), [[(2, 0)], [(0, 3)]], names=["A", "B"])
    x = C.coset((1, 1), 1)
    assert C.label(x) == "(1,1)+A"
    assert C.parse("(3,1)+A") == x
    j = C.multiply(x, C.coset((0, 1), 2))
    assert C.subgroup_index(j[0]) == 6
    assert C.stabiliser_quotient(j).status == FINITE


def test_coset_over_finite_group_requires_normal():
    S3 = FiniteGroup.from_permutations([(1, 2, 0), (1, 0, 2)], 3)
    A3 = [S3.index_of(p) for p in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]]
    C = make_coset_monoid(S3, [A3])
    s = C.coset(S3.index_of((1, 0, 2)), 1)
    sq = C.stabiliser_quotient(s)
    assert sq.quotient.order == 2
    for g in S3.elements():
        assert sq.translate(s, sq.hom(g)) == C.multiply(s, C.from_group(g))
    with pytest.raises(UnsupportedGroup):
        make_coset_monoid(S3, [[S3.identity, S3.index_of((1, 0, 2))]])


def test_coset_unsupported_group():
    with pytest.raises(UnsupportedGroup):
        make_coset_monoid(FreeGroup(2), [])


def test_free_times_semilattice_examples():
    M = make_free_times_semilattice(2, [F2_TO_S5])
    x, X, y, Y = M.parse("x"), M.parse("X"), M.parse("y"), M.parse("Y")
    assert M.multiply(x, X) == M.one
    assert M.parse("x^-1") == X
    assert M.multiply(x, M.parse("(y,0)")) == M.parse("(xy,0)")
    assert M.multiply(M.parse("(xy,0)"), M.parse("(Y,0)")) == M.parse("(x,0)")
    s = M.parse("(y,0)")
    q = M.stabiliser_quotient(s)
    assert q.status == NONAMENABLE
    assert q.translate(s, q.hom(M.to_group(x))) == M.multiply(s, x)
    assert M.declared["orbit_amenability"] == "none"
    assert M.declared["units_equal_j_class"] is True


def test_free_rank_one_is_amenable():
    M = make_free_times_semilattice(1)
    assert M.stabiliser_quotient(M.parse("(x,0)")).amenable_capable
