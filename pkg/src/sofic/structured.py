"""Infinite monoids supplied as structured oracles.

Each family exposes the ``Monoid`` interface together with a ``declared``
dictionary of structural facts that cannot be computed in general.  Keys:

``units_equal_j_class``  the J-class of 1 is exactly the group of units
``nonunits_finite``      M \\ G is finite
``finite_r_classes``     every R-class outside G is finite
``left_cancellative`` / ``right_cancellative``
``orbit_amenability``    "all", "none" or "unknown": whether every
                         stabiliser quotient of the unit group is amenable

``verified`` names the declared facts that the test-suite checks by
exhaustive computation on finite samples; the rest are trusted.
"""
import ast
import re

from . import lattice
from .errors import ParseError, UnsupportedGroup
from .groups import AbelianGroup, FiniteGroup, FreeGroup
from .monoids import AMENABLE, FINITE, NONAMENABLE, Monoid, StabiliserQuotient


class StructuredMonoid(Monoid):
    declared: dict = {}
    verified: tuple = ()

    def encode(self, a):
        return repr(a).encode("ascii")

    def decode(self, data):
        try:
            return ast.literal_eval(data.decode("ascii"))
        except (ValueError, SyntaxError, UnicodeDecodeError):
            raise ParseError(f"bad element encoding {data!r}") from None

    @property
    def units_equal_j_class(self):
        return self.declared["units_equal_j_class"]


# -- bicyclic monoid -------------------------------------------------------------

_BICYCLIC_TOKEN = re.compile(r"([pq])(?:\^(\d+))?")


class Bicyclic(StructuredMonoid):
    """<p, q | pq = 1>; the pair (a, b) stands for q^a p^b.

    The identity is the only unit, while p is a right-invertible non-unit, so
    the J-class of 1 (everything) is strictly larger than the unit group.
    """
    name = "bicyclic"
    one = (0, 0)
    p = (0, 1)
    q = (1, 0)
    declared = {
        "units_equal_j_class": False,
        "nonunits_finite": False,
        "finite_r_classes": False,
        "left_cancellative": False,
        "right_cancellative": False,
        "orbit_amenability": "all",
    }
    verified = ("units_equal_j_class",)

    def __init__(self):
        self._trivial = FiniteGroup([[0]], labels=["1"])

    def multiply(self, x, y):
        a, b = x
        c, d = y
        m = min(b, c)
        return (a + c - m, b + d - m)

    def is_unit(self, x):
        return x == (0, 0)

    def unit_inverse(self, x):
        if x != (0, 0):
            raise ValueError(f"{self.label(x)} is not a unit")
        return x

    @property
    def unit_group(self):
        return self._trivial

    def to_group(self, u):
        self.unit_inverse(u)
        return 0

    def from_group(self, g):
        return (0, 0)

    def stabiliser_quotient(self, s):
        return StabiliserQuotient(self._trivial, lambda g: 0, lambda x, q: x, FINITE)

    def label(self, x):
        a, b = x
        if a == b == 0:
            return "1"
        out = ""
        if a:
            out += "q" if a == 1 else f"q^{a}"
        if b:
            out += "p" if b == 1 else f"p^{b}"
        return out

    def parse(self, text):
        t = text.replace(" ", "")
        if t in ("", "1"):
            return self.one
        pos, out = 0, self.one
        for match in _BICYCLIC_TOKEN.finditer(t):
            if match.start() != pos:
                break
            k = int(match.group(2) or 1)
            out = self.multiply(out, (0, k) if match.group(1) == "p" else (k, 0))
            pos = match.end()
        if pos != len(t):
            raise ParseError(f"cannot parse bicyclic element {text!r}")
        return out


def make_bicyclic():
    return Bicyclic()


# -- monoid of cosets ----------------------------------------------------------------

class _LatticeCosets:
    """Subgroups of Z^m / R as lattices containing R."""

    def __init__(self, G, subgroups, names):
        self.G = G
        self.m = G.dim
        gens = []
        for s in subgroups:
            if isinstance(s, int):
                s = [(s,)]
            gens.append([tuple(v) for v in s])
        self.given = [lattice.hnf(list(G.relations) + g, self.m) for g in gens]
        self.custom_names = list(names) if names else None

    def trivial(self):
        return self.G.relations

    def join(self, a, b):
        return lattice.join(a, b, self.m)

    def canon(self, x, H):
        return lattice.reduce(x, H)

    def add(self, x, y, H):
        return lattice.reduce(tuple(a + b for a, b in zip(x, y)), H)

    def quotient(self, H):
        Q = AbelianGroup.from_relations(self.m, H)
        status = FINITE if Q.is_finite else AMENABLE
        return Q, Q.reduce, status

    def default_name(self, H):
        if self.m == 1 and not self.G.relations and len(H) == 1:
            n = H[0][0]
            return "Z" if n == 1 else f"{n}Z"
        return "<" + ";".join("(" + ",".join(map(str, r)) + ")" for r in H) + ">"

    def index(self, H):
        Q = AbelianGroup.from_relations(self.m, H)
        return Q.order


class _FiniteCosets:
    """Normal subgroups of a finite table group as sorted element tuples."""

    def __init__(self, G, subgroups, names):
        self.G = G
        self.given = []
        for s in subgroups:
            H = self._closure(set(s) | {G.identity})
            for g in G.elements():
                gi = G.inverse(g)
                if any(G.multiply(G.multiply(gi, h), g) not in H for h in H):
                    raise UnsupportedGroup("coset monoids need normal subgroups")
            self.given.append(tuple(sorted(H)))
        self.custom_names = list(names) if names else None

    def _closure(self, S):
        H = set(S)
        frontier = list(H)
        while frontier:
            nxt = []
            for a in frontier:
                for b in list(H):
                    for c in (self.G.multiply(a, b), self.G.multiply(b, a)):
                        if c not in H:
                            H.add(c)
                            nxt.append(c)
            frontier = nxt
        return H

    def trivial(self):
        return (self.G.identity,)

    def join(self, a, b):
        return tuple(sorted(self._closure(set(a) | set(b))))

    def canon(self, x, H):
        return min(self.G.multiply(x, h) for h in H)

    def add(self, x, y, H):
        return self.canon(self.G.multiply(x, y), H)

    def quotient(self, H):
        reps = sorted({self.canon(g, H) for g in self.G.elements()})
        pos = {r: i for i, r in enumerate(reps)}
        table = [[pos[self.canon(self.G.multiply(a, b), H)] for b in reps] for a in reps]
        Q = FiniteGroup(table, labels=[self.G.label(r) + "H" for r in reps], identity=pos[self.canon(self.G.identity, H)])
        Q.reps = reps
        return Q, lambda g: pos[self.canon(g, H)], FINITE

    def default_name(self, H):
        return "<" + ",".join(self.G.label(h) for h in H) + ">"

    def index(self, H):
        return self.G.order // len(H)


class CosetMonoid(StructuredMonoid):
    """Cosets a + H of the joins H of a family of normal subgroups, multiplied setwise.

    Elements are pairs (subgroup id, canonical representative); subgroup 0 is
    the trivial subgroup, whose cosets are the units.  The join-closed family
    of subgroups is materialised at construction.
    """
    name = "coset"
    verified = ("units_equal_j_class",)

    def __init__(self, G, subgroups, names=None):
        if isinstance(G, AbelianGroup):
            self._sub = _LatticeCosets(G, subgroups, names)
        elif isinstance(G, FiniteGroup):
            self._sub = _FiniteCosets(G, subgroups, names)
        else:
            raise UnsupportedGroup(f"no Følner provider for cosets of {G.describe()}")
        self.G = G
        sub = self._sub
        family = [sub.trivial()]
        for H in sub.given:
            if H not in family:
                family.append(H)
        changed = True
        while changed:
            changed = False
            for a in list(family):
                for b in list(family):
                    c = sub.join(a, b)
                    if c not in family:
                        family.append(c)
                        changed = True
        self.subgroups = family
        self._sid = {H: i for i, H in enumerate(family)}
        self._join = [[self._sid[sub.join(a, b)] for b in family] for a in family]
        names_by_sid = {}
        for i, H in enumerate(family):
            if sub.custom_names and H in sub.given:
                names_by_sid[i] = sub.custom_names[sub.given.index(H)]
            else:
                names_by_sid[i] = sub.default_name(H)
        self.subgroup_names = [names_by_sid[i] for i in range(len(family))]
        self._quot = {}
        self.one = (0, G.identity)
        finite = G.is_finite
        nontrivial = len(family) > 1
        self.declared = {
            "units_equal_j_class": True,
            "nonunits_finite": finite,
            "finite_r_classes": finite,
            "left_cancellative": not nontrivial,
            "right_cancellative": not nontrivial,
            "orbit_amenability": "all",
        }

    def coset(self, rep, subgroup_id):
        return (subgroup_id, self._sub.canon(rep, self.subgroups[subgroup_id]))

    def multiply(self, x, y):
        h, a = x
        k, b = y
        j = self._join[h][k]
        return (j, self._sub.add(a, b, self.subgroups[j]))

    def is_unit(self, x):
        return x[0] == 0

    def unit_inverse(self, x):
        if x[0] != 0:
            raise ValueError(f"{self.label(x)} is not a unit")
        return (0, self.G.inverse(x[1]))

    @property
    def unit_group(self):
        return self.G

    def to_group(self, u):
        return u[1]

    def from_group(self, g):
        return (0, g)

    def stabiliser_quotient(self, s):
        h = s[0]
        if h == 0:
            raise ValueError("stabiliser quotients are defined on non-units")
        if h not in self._quot:
            H = self.subgroups[h]
            Q, hom, status = self._sub.quotient(H)
            if isinstance(Q, AbelianGroup):
                def translate(x, q, H=H):
                    return (x[0], self._sub.add(x[1], q, H))
            else:
                def translate(x, q, H=H, Q=Q):
                    return (x[0], self._sub.add(x[1], Q.reps[q], H))
            self._quot[h] = StabiliserQuotient(Q, hom, translate, status)
        return self._quot[h]

    def subgroup_index(self, h):
        return self._sub.index(self.subgroups[h])

    def label(self, x):
        h, a = x
        if h == 0:
            return "{" + self.G.label(a) + "}"
        return f"{self.G.label(a)}+{self.subgroup_names[h]}"

    def parse(self, text):
        t = text.strip()
        if t.startswith("{") and t.endswith("}"):
            return (0, self.G.parse(t[1:-1]))
        by_length = sorted(range(1, len(self.subgroups)), key=lambda i: -len(self.subgroup_names[i]))
        for h in by_length:
            name = self.subgroup_names[h]
            if t == name:
                return self.coset(self.G.identity, h)
            if t.endswith("+" + name):
                return self.coset(self.G.parse(t[: -len(name) - 1]), h)
        raise ParseError(f"cannot parse coset {text!r}")


def make_coset_monoid(G, subgroups, names=None):
    """Monoid of cosets of the given normal subgroups of G and all their joins.

    For an AbelianGroup each subgroup is a list of generating vectors (an int
    n stands for nZ when G = Z); for a FiniteGroup it is a set of elements.
    """
    return CosetMonoid(G, subgroups, names)


# -- free group x semilattice ------------------------------------------------------

class FreeTimesSemilattice(StructuredMonoid):
    """F x {0, 1} with F free of the given rank.

    Units are F x {1}; they act transitively and freely on F x {0}, so the only
    non-unit orbit has trivial stabiliser and quotient F itself.
    """
    name = "free-x-semilattice"
    verified = ("units_equal_j_class",)

    def __init__(self, rank, quotient_data=()):
        self.F = FreeGroup(rank, quotient_data)
        self.one = ((), 1)
        if rank == 0:
            status = FINITE
        else:
            status = AMENABLE if self.F.amenable else NONAMENABLE
        self._status = status
        self.declared = {
            "units_equal_j_class": True,
            "nonunits_finite": rank == 0,
            "finite_r_classes": rank == 0,
            "left_cancellative": False,
            "right_cancellative": False,
            "orbit_amenability": "none" if status == NONAMENABLE else "all",
        }

    def multiply(self, x, y):
        return (self.F.multiply(x[0], y[0]), x[1] & y[1])

    def is_unit(self, x):
        return x[1] == 1

    def unit_inverse(self, x):
        if x[1] != 1:
            raise ValueError(f"{self.label(x)} is not a unit")
        return (self.F.inverse(x[0]), 1)

    @property
    def unit_group(self):
        return self.F

    def to_group(self, u):
        return u[0]

    def from_group(self, g):
        return (g, 1)

    def stabiliser_quotient(self, s):
        if s[1] == 1:
            raise ValueError("stabiliser quotients are defined on non-units")
        F = self.F
        return StabiliserQuotient(F, lambda g: g, lambda x, g: (F.multiply(x[0], g), 0), self._status)

    def label(self, x):
        w, b = x
        if b == 1:
            return self.F.label(w)
        return f"({self.F.label(w)},0)"

    def parse(self, text):
        t = text.replace(" ", "")
        m = re.fullmatch(r"\((.*),([01])\)", t)
        if m:
            return (self.F.parse(m.group(1)), int(m.group(2)))
        return (self.F.parse(t), 1)


def make_free_times_semilattice(rank, quotient_data=()):
    return FreeTimesSemilattice(rank, quotient_data)
