"""Named monoids used by the CLI and the test-suite.

Element grammars (labels are exactly what ``M.label`` prints and ``M.parse`` reads):

  trivial       "e"
  SL2           "1", "0"
  Z2, Z3        "0", "1", "2" (residues)
  T1..T5        image strings: "021" is the map 0->0, 1->2, 2->1
  Z2xSL2 etc.   "(a,b)" with a, b labels of the two factors
  bicyclic      words in p and q with optional exponents: "q^2p^3", "qp", "1"
  coset-Z-2-3   singletons "{3}", "{-1}"; cosets "1+2Z", "0+3Z"; "Z" for the whole group
  F2xS          units are reduced words "xyX" (capitals are inverses, "x^-1" also
                accepted); non-units "(w,0)", e.g. "(y,0)"
"""
from .groups import AbelianGroup
from .monoids import (direct_product, make_cyclic_group_monoid, make_finite_monoid,
                      make_semilattice, make_transformation_monoid)
from .structured import make_bicyclic, make_coset_monoid, make_free_times_semilattice

# x -> the 5-cycle (0 1 2 3 4), y -> the 4-cycle (0 1 2 3); together they generate S_5
# and no generator image is an involution, so x, y and their inverses stay distinct
F2_TO_S5 = ((1, 2, 3, 4, 0), (1, 2, 3, 0, 4))


def _trivial():
    return make_finite_monoid([[0]], ["e"], name="trivial")


def _named(M, name):
    M.name = name
    return M


FIXTURES = {
    "trivial": ("trivial monoid", _trivial),
    "SL2": ("2-element semilattice", make_semilattice),
    "Z2": ("cyclic group of order 2", lambda: make_cyclic_group_monoid(2)),
    "Z3": ("cyclic group of order 3", lambda: make_cyclic_group_monoid(3)),
    "T1": ("full transformation monoid of degree 1", lambda: make_transformation_monoid(1)),
    "T2": ("full transformation monoid of degree 2", lambda: make_transformation_monoid(2)),
    "T3": ("full transformation monoid of degree 3", lambda: make_transformation_monoid(3)),
    "T4": ("full transformation monoid of degree 4", lambda: make_transformation_monoid(4)),
    "Z2xSL2": ("Z/2 times the 2-element semilattice",
               lambda: direct_product(make_cyclic_group_monoid(2), make_semilattice())),
    "SL2xSL2": ("square of the 2-element semilattice",
                lambda: direct_product(make_semilattice(), make_semilattice())),
    "Z3xT2": ("Z/3 times T2",
              lambda: direct_product(make_cyclic_group_monoid(3), make_transformation_monoid(2))),
    "bicyclic": ("bicyclic monoid <p,q | pq = 1>", make_bicyclic),
    "coset-Z-2-3": ("cosets of 2Z, 3Z and their joins in Z",
                    lambda: _named(make_coset_monoid(AbelianGroup(1), [2, 3]), "coset-Z-2-3")),
    "F2xS": ("free group of rank 2 times the 2-element semilattice",
             lambda: _named(make_free_times_semilattice(2, [F2_TO_S5]), "F2xS")),
}

# finite fixtures small enough for exhaustive Green oracles
SMALL_FINITE = ("trivial", "SL2", "Z2", "Z3", "T1", "T2", "T3", "Z2xSL2", "SL2xSL2", "Z3xT2")


def fixture_names():
    return list(FIXTURES)


def load_fixture(name):
    try:
        _, make = FIXTURES[name]
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; try one of {', '.join(FIXTURES)}") from None
    M = make()
    if getattr(M, "name", None) in (None, "finite", "monoid"):
        M.name = name
    return M


def describe_fixture(name):
    return FIXTURES[name][0]
