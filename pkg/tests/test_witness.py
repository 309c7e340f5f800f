import base64
import json
from fractions import Fraction as F

import numpy as np
import pytest

from sofic.errors import CapExceeded, IdentityViolated, MalformedFile, MissingTable
from sofic.fixtures import load_fixture
from sofic.monoids import make_cyclic_group_monoid, make_finite_monoid
from sofic.witness import (ActionWitness, DefectReport, check_witness, diagonal_power_exponent,
                           diagonal_power_report, diagonal_power_witness, passes, read_witness,
                           witness_from_action, write_witness)


def z2_witness(N, table_a):
    M = make_cyclic_group_monoid(2)
    K = [0, 1]
    tabs = {0: np.arange(N), 1: np.asarray(table_a)}
    return M, K, witness_from_action(M, K, N, lambda m: tabs[m])


def brute_report(M, K, W):
    """Definition-level recount, one point at a time."""
    N = W.N
    t = lambda m: W.table_for(M.encode(m))
    mult = {}
    for g in K:
        for h in K:
            gh = M.multiply(g, h)
            mult[M.label(g), M.label(h)] = F(sum(1 for x in range(N) if t(g)[t(h)[x]] != t(gh)[x]), N)
    sep = {}
    for i, g in enumerate(K):
        for h in K[i + 1:]:
            sep[M.label(g), M.label(h)] = F(sum(1 for x in range(N) if t(g)[x] == t(h)[x]), N)
    return mult, sep


def test_free_z2_action():
    M, K, W = z2_witness(2, [1, 0])
    rep = check_witness(M, K, W)
    assert rep.max_mult_defect == 0
    assert rep.sep_overlap("0", "1") == 0
    assert passes(rep, 0)


def test_one_fixed_point_of_four():
    M, K, W = z2_witness(4, [0, 2, 1, 3])
    rep = check_witness(M, K, W)
    assert rep.sep_overlap("0", "1") == F(2, 4)
    M, K, W = z2_witness(4, [0, 2, 3, 1])
    rep = check_witness(M, K, W)
    assert rep.sep_overlap("0", "1") == F(1, 4)
    assert rep.N == 4


def test_single_point_perturbation():
    M = load_fixture("T2")
    K = M.elements()
    W = diagonal_power_witness(M, K, F(1, 5))
    base = check_witness(M, K, W)
    assert base.max_mult_defect == 0
    k = M.parse("10")
    row = W.index(M.encode(k))
    x = 3
    W.tables[row, x] = (W.tables[row, x] + 1) % W.N
    rep = check_witness(M, K, W)
    mult, sep = brute_report(M, K, W)
    for g, h, d in rep.mult_defects:
        assert d == mult[g, h]
    for g, h, d in rep.sep_overlaps:
        assert d == sep[g, h]
    changed = {(g, h) for (g, h, d), (_, _, d0) in zip(rep.mult_defects, base.mult_defects) if d != d0}
    assert changed
    # only pairs that read the rewired table can move
    for g, h in changed:
        gh = M.label(M.multiply(M.parse(g), M.parse(h)))
        assert "10" in (g, h, gh)
    # pairs with the identity compare a table with itself
    assert rep.mult_defect("10", "01") == 0 and rep.mult_defect("01", "10") == 0


def test_checker_matches_brute_force_on_random_tables():
    rng = np.random.default_rng(3)
    M = load_fixture("T2")
    K = M.elements()
    for _ in range(5):
        N = int(rng.integers(1, 40))
        W = witness_from_action(M, K, N, lambda m: rng.integers(0, N, N) if m != M.one else np.arange(N))
        rep = check_witness(M, K, W)
        mult, sep = brute_report(M, K, W)
        assert {(g, h): d for g, h, d in rep.mult_defects} == mult
        assert {(g, h): d for g, h, d in rep.sep_overlaps} == sep
        assert all(d.denominator in range(1, N + 1) and N % d.denominator == 0
                   for _, _, d in rep.mult_defects)


def test_missing_table():
    M, K, W = z2_witness(2, [1, 0])
    T = load_fixture("T2")
    with pytest.raises(MissingTable):
        check_witness(T, T.elements(), W)


def test_identity_violation():
    M = make_cyclic_group_monoid(2)
    W = ActionWitness(3, [M.encode(0), M.encode(1)], ["0", "1"],
                      np.array([[1, 0, 2], [1, 0, 2]]), [(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)])
    rep = check_witness(M, [0, 1], W)
    assert rep.identity_violations == 2
    assert not passes(rep, F(1))
    with pytest.raises(IdentityViolated):
        check_witness(M, [0, 1], W, strict=True)


def test_inconsistent_products():
    M = make_cyclic_group_monoid(2)
    W = ActionWitness(2, [M.encode(0), M.encode(1)], ["0", "1"],
                      np.array([[0, 1], [1, 0]]), [(1, 1, 1)])
    with pytest.raises(MalformedFile):
        check_witness(M, [0, 1], W)


@pytest.mark.parametrize("mult, sep, eps, ok", [
    (F(0), F(0), F(0), True),
    (F(1, 4), F(0), F(1, 5), False),
    (F(0), F(1, 5), F(1, 5), True),
    (F(1, 5), F(1, 5), F(1, 5), True),
    (F(0), F(1, 5) + F(1, 10**9), F(1, 5), False),
])
def test_passes_boundaries(mult, sep, eps, ok):
    rep = DefectReport(10, [("a", "a", mult)], [("a", "b", sep)], 0)
    assert passes(rep, eps) is ok


def test_diagonal_power_semilattice():
    M = load_fixture("SL2")
    K = [M.parse("0"), M.parse("1")]
    n, p = diagonal_power_exponent(M, K, F(1, 10))
    assert (n, p) == (4, F(1, 2))
    W = diagonal_power_witness(M, K, F(1, 10))
    rep = check_witness(M, K, W)
    assert W.N == 16 and rep.sep_overlap("0", "1") == F(1, 16)
    assert all(d == 0 for _, _, d in rep.mult_defects)


def test_diagonal_power_group():
    M = make_cyclic_group_monoid(3)
    n, p = diagonal_power_exponent(M, M.elements(), F(1, 1000))
    assert (n, p) == (1, 0)
    rep = check_witness(M, M.elements(), diagonal_power_witness(M, M.elements(), F(1, 1000)))
    assert rep.max_mult_defect == 0 and rep.max_sep_overlap == 0


def test_diagonal_power_t2():
    M = load_fixture("T2")
    K = M.elements()
    rows = M.rows
    p = max(F(sum(rows[g][m] == rows[h][m] for m in range(4)), 4)
            for g in K for h in K if g < h)
    n, q = diagonal_power_exponent(M, K, F(1, 5))
    assert q == p == F(1, 2) and n == 3
    rep = check_witness(M, K, diagonal_power_witness(M, K, F(1, 5)))
    assert passes(rep, F(1, 5))


@pytest.mark.parametrize("name, eps", [("SL2", F(1, 10)), ("T2", F(1, 5)), ("T3", F(1, 3)),
                                       ("Z2xSL2", F(1, 7))])
def test_implicit_mode_matches_materialised(name, eps):
    M = load_fixture(name)
    K = M.elements()[:6]
    W = diagonal_power_witness(M, K, eps)
    assert check_witness(M, K, W).to_json() == diagonal_power_report(M, K, eps).to_json()


def test_diagonal_power_cap():
    M = load_fixture("T3")
    K = M.elements()
    with pytest.raises(CapExceeded) as exc:
        diagonal_power_witness(M, K, F(1, 10**6), cap=10**5)
    assert exc.value.needed > 10**5
    rep = diagonal_power_report(M, K, F(1, 10**6))
    assert passes(rep, F(1, 10**6))


def test_round_trip(tmp_path):
    M = load_fixture("T2")
    W = diagonal_power_witness(M, M.elements(), F(1, 5))
    text = W.to_json()
    assert ActionWitness.from_json(text) == W
    assert ActionWitness.from_json(text).to_json() == text
    path = tmp_path / "w.json"
    write_witness(path, W)
    assert path.read_text() == text
    assert read_witness(path) == W


def test_minimal_handwritten_witness():
    M = make_finite_monoid([[0]], ["e"])
    enc = base64.b64encode(M.encode(0)).decode()
    text = json.dumps({"N": 1, "elements": [{"enc": enc, "label": "e"}], "tables": [[0]],
                       "products": [[0, 0, 0]]})
    W = ActionWitness.from_json(text)
    assert passes(check_witness(M, [0], W), 0)


@pytest.mark.parametrize("text, where", [
    ('{"N": 2, "elements": [', "line 1"),
    ('[]', "top level"),
    ('{"N": 0, "elements": [], "tables": [], "products": []}', "N"),
    ('{"N": 2, "elements": [{"enc": "AAAAAA==", "label": "a"}], "tables": [[0, 2]], "products": []}',
     "tables[0][1]"),
    ('{"N": 2, "elements": [{"enc": "@@", "label": "a"}], "tables": [[0, 1]], "products": []}',
     "elements[0].enc"),
    ('{"N": 2, "elements": [{"enc": "AAAAAA==", "label": "a"}], "tables": [[0, 1]], "products": [[0, 0, 5]]}',
     "products[0]"),
    ('{"N": 2, "elements": [{"enc": "AAAAAA==", "label": "a"}], "tables": [[0]], "products": []}',
     "tables[0]"),
])
def test_malformed_files(text, where):
    with pytest.raises(MalformedFile) as exc:
        ActionWitness.from_json(text)
    assert where in str(exc.value)


def test_truncated_file():
    M = load_fixture("T2")
    text = diagonal_power_witness(M, M.elements(), F(1, 5)).to_json()
    with pytest.raises(MalformedFile):
        ActionWitness.from_json(text[: len(text) // 2])


@pytest.mark.parametrize("workers", [1, 2, 3, 8, 64])
def test_worker_invariance(workers):
    M = load_fixture("T3")
    K = M.elements()[:8]
    W = diagonal_power_witness(M, K, F(1, 20))
    assert check_witness(M, K, W, workers=workers).to_json() == check_witness(M, K, W).to_json()


def test_relabelling_points_changes_nothing():
    M = load_fixture("T2")
    K = M.elements()
    W = diagonal_power_witness(M, K, F(1, 5))
    perm = np.random.default_rng(0).permutation(W.N)
    inv = np.argsort(perm)
    tables = np.stack([perm[t[inv]] for t in W.tables])
    V = ActionWitness(W.N, W.encodings, W.labels, tables, W.products)
    assert check_witness(M, K, V).to_json() == check_witness(M, K, W).to_json()
