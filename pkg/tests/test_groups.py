from fractions import Fraction as F

import pytest

from sofic.errors import EmptySet, NoSeparatingQuotient, NotAmenableCapable, SearchBudgetExceeded
from sofic.fixtures import F2_TO_S5
from sofic.groups import (AbelianGroup, FiniteGroup, FreeGroup, cyclic_group, find_folner,
                          folner_quality, joint_quotient_image, measure_group_action,
                          parse_group, sofic_group_action)
from sofic.monoids import AMENABLE, FINITE, StabiliserQuotient

Z, Z2 = AbelianGroup(1), AbelianGroup(2)
PM1 = [(1,), (-1,)]
E2 = [(1, 0), (-1, 0), (0, 1), (0, -1)]


def interval(a, b):
    return [(i,) for i in range(a, b)]


def test_quality_examples():
    assert folner_quality(Z, PM1, interval(0, 10)) == F(8, 10)
    box = [(i, j) for i in range(10) for j in range(10)]
    assert folner_quality(Z2, E2, box) == F(64, 100)
    G = cyclic_group(5)
    assert folner_quality(G, [1, 2], G.elements()) == 1


def test_quality_empty():
    with pytest.raises(EmptySet):
        folner_quality(Z, [], interval(0, 3))
    with pytest.raises(EmptySet):
        folner_quality(Z, PM1, [])


def test_find_folner_examples():
    found = find_folner(Z, PM1, F(1, 5))
    assert sorted(found.elements) == interval(0, 11)
    assert found.quality == F(9, 11)
    G = cyclic_group(6)
    assert found.quality_for(PM1) == F(9, 11)
    assert sorted(find_folner(G, [1], F(1, 2)).elements) == G.elements()


def test_find_folner_is_smallest_box_for_z():
    # the box [0, n) has quality (n - 2)/n; the least n beating 1 - delta
    for delta in (F(1, 3), F(1, 7), F(2, 9), F(1, 50)):
        found = find_folner(Z, PM1, delta)
        n = len(found.elements)
        assert F(n - 2, n) > 1 - delta >= F(n - 3, n - 1)


@pytest.mark.parametrize("G, K", [
    (Z, [(2,), (-3,)]),
    (Z2, E2 + [(1, 1)]),
    (parse_group("ZxZ/3"), [(1, 0), (0, 1)]),
])
@pytest.mark.parametrize("delta", [F(1, 2), F(1, 10), F(1, 40)])
def test_find_folner_strict(G, K, delta):
    found = find_folner(G, K, delta)
    assert folner_quality(G, K, found.elements) > 1 - delta


def test_find_folner_refusals():
    with pytest.raises(NotAmenableCapable):
        find_folner(FreeGroup(2), [(1,)], F(1, 5))
    with pytest.raises(SearchBudgetExceeded) as exc:
        find_folner(Z2, E2, F(1, 1000), budget=500)
    assert exc.value.best_quality is not None


def test_parse_group_and_labels():
    G = parse_group("Z^2xZ/3")
    assert G.describe().startswith("Z^3") and G.free_rank == 2
    assert G.parse("(1,2,4)") == G.parse("(1,2,1)")
    assert parse_group("Z/6").order == 6
    assert parse_group("Z/6").describe() == "Z/6"


def test_free_group_words():
    Fg = FreeGroup(2)
    x, y = Fg.parse("x"), Fg.parse("y")
    assert Fg.multiply(x, Fg.inverse(x)) == Fg.identity
    w = Fg.parse("xyX")
    assert Fg.label(w) == "xyX"
    assert Fg.parse("x y x^-1") == w
    assert Fg.multiply(Fg.multiply(w, x), y) == Fg.parse("xyy")


def test_sofic_action_finite():
    G = cyclic_group(4)
    w = sofic_group_action(G, G.elements(), F(1, 100))
    assert w.size == 4 and w.kind == "regular"
    assert w.certificate["mult_defect"] == 0 and w.certificate["sep_overlap"] == 0
    assert w.certificate["identity_moves"] == 0


def test_sofic_action_abelian_sink():
    w = sofic_group_action(Z, PM1, F(1, 5))
    assert w.kind == "folner+sink"
    assert w.size == w.certificate["F_P_size"] + 1
    assert w.certificate["mult_defect"] <= F(1, 5) and w.certificate["sep_overlap"] <= F(1, 5)
    assert w.certificate["identity_moves"] == 0
    # independent re-measurement
    m, s, moved = measure_group_action(Z, PM1, w.size, w.table)
    assert (m, s, moved) == (w.certificate["mult_defect"], w.certificate["sep_overlap"], 0)


def test_sofic_action_abelian_z2_small_delta():
    delta = F(1, 20)
    w = sofic_group_action(Z2, E2, delta)
    assert w.certificate["mult_defect"] <= delta and w.certificate["sep_overlap"] <= delta


def test_sofic_action_free_group():
    Fg = FreeGroup(2, [F2_TO_S5])
    K = [Fg.parse(s) for s in ("x", "y", "X", "Y")]
    w = sofic_group_action(Fg, K, F(1, 10))
    assert w.size == 120
    assert w.certificate["mult_defect"] == 0 and w.certificate["sep_overlap"] == 0
    with pytest.raises(NoSeparatingQuotient):
        # x^5 and the identity have the same image
        sofic_group_action(Fg, [Fg.identity, Fg.parse("xxxxx")], F(1, 10))


def _mod(n):
    Q = AbelianGroup(0, (n,))
    return StabiliserQuotient(Q, lambda g, Q=Q: Q.reduce(g), lambda x, q: x, FINITE)


def test_joint_quotient_image():
    Gbar, bar = joint_quotient_image(Z, [_mod(2)])
    assert Gbar.order == 2
    Gbar, bar = joint_quotient_image(Z, [_mod(2), _mod(3)])
    assert Gbar.order == 6
    assert len({bar((n,)) for n in range(6)}) == 6
    for a in range(-5, 6):
        for b in range(-5, 6):
            assert bar((a + b,)) == Gbar.multiply(bar((a,)), bar((b,)))
    Gbar, bar = joint_quotient_image(Z, [])
    assert Gbar.order == 1 and bar((7,)) == Gbar.identity


def test_joint_image_of_free_group_is_finite_subgroup():
    Fg = FreeGroup(2)
    S5 = FiniteGroup.from_permutations(list(F2_TO_S5), 5)
    gens = [S5.index_of(p) for p in F2_TO_S5]

    def hom(w):
        out = S5.identity
        for letter in w:
            g = gens[abs(letter) - 1]
            out = S5.multiply(out, g if letter > 0 else S5.inverse(g))
        return out

    q = StabiliserQuotient(S5, hom, lambda x, g: x, FINITE)
    Gbar, bar = joint_quotient_image(Fg, [q, q])
    assert Gbar.order == 120


def test_infinite_image_uses_pushforward():
    Q = Z
    q = StabiliserQuotient(Q, lambda g: g, lambda x, g: x, AMENABLE)
    Gbar, bar = joint_quotient_image(Z, [q, _mod(2)])
    assert not Gbar.is_finite
    found = find_folner(Gbar, [bar((1,)), bar((-1,))], F(1, 5))
    assert found.quality_for([bar((1,)), bar((-1,))]) > F(4, 5)
    assert "pushforward" in Gbar.strategy
