"""Group handles, Følner sets and finite approximate actions of groups.

Four kinds of group appear:

* ``FiniteGroup`` -- an explicit Cayley table (units of a finite monoid,
  permutation groups induced on orbits).
* ``AbelianGroup`` -- a finitely generated abelian group Z^m / L with the
  relation lattice L in Hermite normal form.  Covers Z^r, finite abelian
  groups and all their quotients.
* ``FreeGroup`` -- a free group of finite rank carrying homomorphisms onto
  finite permutation groups (residually finite; amenable only for rank <= 1).
* ``ImageGroup`` -- the image of a group in a finite direct product of
  quotients, with elements stored as tuples of component images.

All proportions are ``fractions.Fraction``.
"""
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import lattice
from .errors import (EmptySet, NoSeparatingQuotient, NotAmenableCapable,
                     ParseError, SearchBudgetExceeded)

DEFAULT_SEARCH_BUDGET = 1_000_000
LINEAR_STEPS = 64


class Group:
    kind = "abstract"
    identity = None
    amenable = None

    def multiply(self, a, b):
        raise NotImplementedError

    def inverse(self, a):
        raise NotImplementedError

    def encode(self, a) -> bytes:
        return repr(a).encode("ascii")

    def label(self, a) -> str:
        return repr(a)

    def parse(self, text):
        raise ParseError(f"{self.describe()} has no element syntax")

    @property
    def is_finite(self) -> bool:
        return False

    @property
    def order(self):
        return len(self.elements()) if self.is_finite else None

    def elements(self):
        raise TypeError(f"{self.describe()} is infinite")

    def generators(self):
        raise NotImplementedError

    def folner_candidate(self, n):
        """The n-th member of a growing Følner sequence (finite groups: the group)."""
        if self.is_finite:
            return self.elements()
        raise NotAmenableCapable(f"{self.describe()} has no Følner provider")

    def describe(self) -> str:
        return self.kind

    def power(self, a, k):
        r = self.identity
        base = a if k >= 0 else self.inverse(a)
        for _ in range(abs(k)):
            r = self.multiply(r, base)
        return r


def compose(p, q):
    """Left-to-right composition: first p, then q."""
    return tuple(q[x] for x in p)


def invert_permutation(p):
    inv = [0] * len(p)
    for i, x in enumerate(p):
        inv[x] = i
    return tuple(inv)


class FiniteGroup(Group):
    kind = "finite-table"
    amenable = True

    def __init__(self, table, labels=None, identity=None, perms=None):
        rows = [list(map(int, r)) for r in table]
        n = len(rows)
        if identity is None:
            identity = next(e for e in range(n)
                            if all(rows[e][x] == x == rows[x][e] for x in range(n)))
        self._rows = rows
        self.identity = identity
        self._inv = [next(y for y in range(n) if rows[x][y] == identity) for x in range(n)]
        self.labels = list(labels) if labels is not None else [str(i) for i in range(n)]
        self._perms = perms
        self._perm_index = {p: i for i, p in enumerate(perms)} if perms is not None else None

    @classmethod
    def from_permutations(cls, generators, degree=None):
        """Closure of the given permutations under left-to-right composition."""
        gens = [tuple(g) for g in generators]
        if degree is None:
            degree = len(gens[0]) if gens else 0
        ident = tuple(range(degree))
        elems = [ident]
        seen = {ident: 0}
        frontier = [ident]
        while frontier:
            nxt = []
            for p in frontier:
                for g in gens:
                    q = compose(p, g)
                    if q not in seen:
                        seen[q] = len(elems)
                        elems.append(q)
                        nxt.append(q)
            frontier = nxt
        table = [[seen[compose(p, q)] for q in elems] for p in elems]
        labels = ["[" + ",".join(map(str, p)) + "]" for p in elems]
        return cls(table, labels=labels, identity=0, perms=elems)

    @property
    def is_finite(self):
        return True

    @property
    def order(self):
        return len(self._rows)

    @property
    def table(self):
        return self._rows

    def multiply(self, a, b):
        return self._rows[a][b]

    def inverse(self, a):
        return self._inv[a]

    def elements(self):
        return list(range(len(self._rows)))

    def generators(self):
        gens = []
        reached = {self.identity}
        for x in range(len(self._rows)):
            if x not in reached:
                gens.append(x)
                reached = set(self._closure(gens))
        return gens

    def _closure(self, gens):
        out = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for a in frontier:
                for g in gens:
                    b = self._rows[a][g]
                    if b not in out:
                        out.add(b)
                        nxt.append(b)
            frontier = nxt
        return out

    def perm(self, a):
        return self._perms[a]

    def index_of(self, perm):
        return self._perm_index[tuple(perm)]

    def label(self, a):
        return self.labels[a]

    def parse(self, text):
        try:
            return self.labels.index(text.strip())
        except ValueError:
            raise ParseError(f"unknown group element {text!r}") from None

    def is_abelian(self):
        r = self._rows
        n = len(r)
        return all(r[a][b] == r[b][a] for a in range(n) for b in range(a + 1, n))

    def element_order(self, a):
        k, x = 1, a
        while x != self.identity:
            x = self._rows[x][a]
            k += 1
        return k

    def describe(self):
        return f"finite group of order {self.order}"


def cyclic_group(n):
    return FiniteGroup([[(i + j) % n for j in range(n)] for i in range(n)])


class AbelianGroup(Group):
    """Z^m modulo a relation lattice.

    ``AbelianGroup(rank=r, torsion=(d1, ..., dk))`` is Z^r + Z/d1 + ... + Z/dk;
    ``AbelianGroup.from_relations(m, rows)`` is Z^m / <rows>.
    """
    kind = "fg-abelian"
    amenable = True

    def __init__(self, rank=1, torsion=()):
        m = rank + len(torsion)
        rel = []
        for i, d in enumerate(torsion):
            if d <= 0:
                raise ValueError("torsion coefficients must be positive")
            row = [0] * m
            row[rank + i] = d
            rel.append(row)
        self._setup(m, lattice.hnf(rel, m))

    @classmethod
    def from_relations(cls, m, rows):
        g = cls.__new__(cls)
        g._setup(m, lattice.hnf(rows, m))
        return g

    def _setup(self, m, basis):
        self.dim = m
        self.relations = basis
        self.identity = (0,) * m
        self._pivots = {lattice.pivot_column(r): r[lattice.pivot_column(r)] for r in basis}

    def __eq__(self, other):
        return (isinstance(other, AbelianGroup) and self.dim == other.dim
                and self.relations == other.relations)

    def __hash__(self):
        return hash((self.dim, self.relations))

    def reduce(self, v):
        return lattice.reduce(v, self.relations)

    def multiply(self, a, b):
        return self.reduce(tuple(x + y for x, y in zip(a, b)))

    def inverse(self, a):
        return self.reduce(tuple(-x for x in a))

    @property
    def is_finite(self):
        return len(self.relations) == self.dim

    @property
    def order(self):
        if not self.is_finite:
            return None
        out = 1
        for p in self._pivots.values():
            out *= p
        return out

    @property
    def free_rank(self):
        return self.dim - len(self.relations)

    def elements(self):
        if not self.is_finite:
            raise TypeError(f"{self.describe()} is infinite")
        return [tuple(v) for v in itertools.product(*(range(self._pivots[c]) for c in range(self.dim)))]

    def generators(self):
        out = []
        for c in range(self.dim):
            e = self.reduce(tuple(int(i == c) for i in range(self.dim)))
            if any(e) and e not in out:
                out.append(e)
        return out

    def folner_candidate(self, n):
        """Box with side n in the free coordinates, full range in the torsion ones."""
        ranges = [range(self._pivots[c]) if c in self._pivots else range(n)
                  for c in range(self.dim)]
        return [tuple(v) for v in itertools.product(*ranges)]

    def label(self, a):
        if self.dim == 1:
            return str(a[0])
        return "(" + ",".join(map(str, a)) + ")"

    def parse(self, text):
        t = text.strip()
        try:
            if t.startswith("("):
                vals = tuple(int(x) for x in t.strip("()").split(",") if x.strip())
            else:
                vals = (int(t),)
        except ValueError:
            raise ParseError(f"cannot parse group element {text!r}") from None
        if len(vals) != self.dim:
            raise ParseError(f"{text!r} is not an element of Z^{self.dim}")
        return self.reduce(vals)

    def describe(self):
        if not self.relations:
            return "Z" if self.dim == 1 else f"Z^{self.dim}"
        if self.dim == 1:
            n = abs(self.relations[0][0])
            return "trivial" if n == 1 else f"Z/{n}"
        rels = ";".join("(" + ",".join(map(str, r)) + ")" for r in self.relations)
        return f"Z^{self.dim}/<{rels}>"


def parse_group(text):
    """Parse "Z", "Z^2", "Z/6", "Z^2xZ/3", ... into an AbelianGroup."""
    rank, torsion = 0, []
    for part in text.replace(" ", "").split("x"):
        if part == "Z":
            rank += 1
        elif part.startswith("Z^"):
            rank += int(part[2:])
        elif part.startswith("Z/"):
            torsion.append(int(part[2:]))
        else:
            raise ParseError(f"cannot parse group {text!r}")
    if rank == 0 and not torsion:
        raise ParseError(f"cannot parse group {text!r}")
    return AbelianGroup(rank=rank, torsion=tuple(torsion))


LETTERS = "xyzuvwabcdefghijklmnopqrst"


class FreeGroup(Group):
    """Free group on ``rank`` letters x, y, z, ...; capitals denote inverses.

    Words are reduced tuples of nonzero ints (+i / -i for the i-th generator,
    1-based).  ``quotient_homs`` lists homomorphisms to finite permutation
    groups, each given by the images of the generators.
    """
    kind = "residually-finite"

    def __init__(self, rank, quotient_homs=()):
        if rank < 0 or rank > len(LETTERS):
            raise ValueError("unsupported rank")
        self.rank = rank
        self.identity = ()
        self.quotient_homs = [[tuple(p) for p in hom] for hom in quotient_homs]
        for hom in self.quotient_homs:
            if len(hom) != rank:
                raise ValueError("a quotient hom needs one image per generator")
        self.amenable = rank <= 1

    def multiply(self, a, b):
        out = list(a)
        for x in b:
            if out and out[-1] == -x:
                out.pop()
            else:
                out.append(x)
        return tuple(out)

    def inverse(self, a):
        return tuple(-x for x in reversed(a))

    def generators(self):
        return [(i,) for i in range(1, self.rank + 1)]

    def folner_candidate(self, n):
        if self.rank == 0:
            return [()]
        if self.rank == 1:
            return [(1,) * k for k in range(n)]
        raise NotAmenableCapable(f"{self.describe()} is not amenable")

    @property
    def is_finite(self):
        return self.rank == 0

    def elements(self):
        if self.rank:
            raise TypeError(f"{self.describe()} is infinite")
        return [()]

    def image(self, hom_index, word):
        gens = self.quotient_homs[hom_index]
        degree = len(gens[0]) if gens else 0
        p = tuple(range(degree))
        for x in word:
            g = gens[abs(x) - 1]
            p = compose(p, g if x > 0 else invert_permutation(g))
        return p

    def label(self, a):
        if not a:
            return "1"
        return "".join(LETTERS[x - 1] if x > 0 else LETTERS[-x - 1].upper() for x in a)

    def parse(self, text):
        t = text.replace(" ", "")
        if t in ("", "1", "e"):
            return ()
        word = ()
        i = 0
        while i < len(t):
            ch = t[i]
            idx = LETTERS.find(ch.lower())
            if idx < 0 or idx >= self.rank:
                raise ParseError(f"bad letter {ch!r} in word {text!r}")
            sign = 1 if ch.islower() else -1
            i += 1
            if t.startswith("^-1", i):
                sign = -sign
                i += 3
            word = self.multiply(word, (sign * (idx + 1),))
        return word

    def describe(self):
        return f"free group of rank {self.rank}"


class ImageGroup(Group):
    """Image of ``source`` under the product of homomorphisms into ``components``."""
    kind = "product-image"

    def __init__(self, source, components, homs, strategy=None):
        self.source = source
        self.components = list(components)
        self.homs = list(homs)
        self.identity = tuple(c.identity for c in self.components)
        self._elements = None
        if self.is_finite:
            self.amenable = True
            self.strategy = strategy or "finite image: F is the whole group"
        else:
            self.amenable = True if source.amenable else None
            self.strategy = strategy or "measured pushforward of the source Følner sequence"

    def image(self, g):
        return tuple(h(g) for h in self.homs)

    def multiply(self, a, b):
        return tuple(c.multiply(x, y) for c, x, y in zip(self.components, a, b))

    def inverse(self, a):
        return tuple(c.inverse(x) for c, x in zip(self.components, a))

    @property
    def is_finite(self):
        return all(c.is_finite for c in self.components)

    def elements(self):
        if self._elements is None:
            if not self.is_finite:
                raise TypeError(f"{self.describe()} is infinite")
            if self.source.is_finite:
                out = dict.fromkeys(self.image(g) for g in self.source.elements())
            else:
                gens = [self.image(g) for g in self.source.generators()]
                out = {self.identity: None}
                frontier = [self.identity]
                while frontier:
                    nxt = []
                    for a in frontier:
                        for g in gens:
                            b = self.multiply(a, g)
                            if b not in out:
                                out[b] = None
                                nxt.append(b)
                    frontier = nxt
            self._elements = list(out)
        return list(self._elements)

    def generators(self):
        return [self.image(g) for g in self.source.generators()]

    def folner_candidate(self, n):
        if self.is_finite:
            return self.elements()
        if self.amenable is not True:
            raise NotAmenableCapable(f"{self.describe()} has no Følner provider")
        return list(dict.fromkeys(self.image(g) for g in self.source.folner_candidate(n)))

    def label(self, a):
        return "(" + ",".join(c.label(x) for c, x in zip(self.components, a)) + ")"

    def describe(self):
        parts = " x ".join(c.describe() for c in self.components) or "1"
        size = f" of order {self.order}" if self.is_finite else ""
        return f"image of {self.source.describe()} in {parts}{size}"


# -- Følner sets -------------------------------------------------------------

def folner_quality(G, K, F):
    """Exact proportion of f in F with k*f in F for every k in K."""
    K = list(K)
    F = list(F)
    if not K or not F:
        raise EmptySet("K and F must be nonempty")
    members = set(F)
    good = sum(1 for f in members if all(G.multiply(k, f) in members for k in K))
    return Fraction(good, len(members))


@dataclass
class FolnerSet:
    group: Group
    elements: list
    quality: Fraction = None
    K: list = field(default_factory=list)

    def quality_for(self, K):
        K = list(K)
        if not K:
            return Fraction(1)
        return folner_quality(self.group, K, self.elements)

    def __len__(self):
        return len(self.elements)


def _search(test, candidate, budget):
    """Smallest-index candidate passing ``test``.

    Linear scan for the first steps, then doubling followed by bisection.
    Returns (n, candidate, value); raises SearchBudgetExceeded when the
    candidates outgrow the budget.
    """
    best = None
    n, last_fail = 1, 0
    while True:
        F = candidate(n)
        if len(F) > budget:
            raise SearchBudgetExceeded(
                f"candidate of size {len(F)} exceeds search budget {budget}", best)
        ok, value = test(F)
        if best is None or value > best:
            best = value
        if ok:
            break
        last_fail = n
        n = n + 1 if n < LINEAR_STEPS else 2 * n
    lo, hi = last_fail + 1, n
    found = (hi, F, value)
    while lo < hi:
        mid = (lo + hi) // 2
        Fm = candidate(mid)
        ok, v = test(Fm)
        if ok:
            hi = mid
            found = (mid, Fm, v)
        else:
            lo = mid + 1
    return found


def find_folner(G, K, delta, budget=DEFAULT_SEARCH_BUDGET):
    """A finite F with quality(K, F) > 1 - delta strictly."""
    delta = Fraction(delta)
    if not 0 < delta:
        raise ValueError("delta must be positive")
    K = list(dict.fromkeys(K))
    if G.amenable is not True:
        raise NotAmenableCapable(f"{G.describe()} has no Følner provider")
    if G.is_finite:
        F = G.elements()
        return FolnerSet(G, F, Fraction(1), K)
    if not K:
        return FolnerSet(G, [G.identity], Fraction(1), K)
    threshold = 1 - delta

    def test(F):
        q = folner_quality(G, K, F)
        return q > threshold, q

    _, F, q = _search(test, G.folner_candidate, budget)
    return FolnerSet(G, F, q, K)


# -- finite approximate actions of groups ------------------------------------

@dataclass
class GroupActionWitness:
    """A finite set P (points 0..size-1) with an action of group elements on it."""
    group: Group
    size: int
    kind: str
    act: Callable
    certificate: dict = field(default_factory=dict)

    def table(self, g):
        return np.fromiter((self.act(g, p) for p in range(self.size)), dtype=np.int64, count=self.size)


def _acting_set(G, K):
    acting = list(dict.fromkeys([G.identity] + K + [G.multiply(g, h) for g in K for h in K]))
    pos = {a: i for i, a in enumerate(acting)}
    triples = [(pos[g], pos[h], pos[G.multiply(g, h)]) for g in K for h in K]
    pairs = [(pos[g], pos[h]) for i, g in enumerate(K) for h in K[i + 1:]]
    return acting, triples, pairs


def measure_group_action(G, K, size, table_for):
    """Exact (max multiplicative defect, max separation overlap, identity moves)."""
    from .witness import measure_tables
    K = list(dict.fromkeys(K))
    acting, triples, pairs = _acting_set(G, K)
    tables = np.stack([table_for(a) for a in acting]) if size else np.zeros((len(acting), 0), np.int64)
    mult, agree, moved = measure_tables(tables, triples, pairs, 0)
    mx = max((Fraction(int(c), size) for c in mult), default=Fraction(0))
    sx = max((Fraction(int(c), size) for c in agree), default=Fraction(0))
    return mx, sx, moved


def _regular_action(G, K, delta):
    elems = G.elements()
    pos = {e: i for i, e in enumerate(elems)}

    def act(g, p):
        return pos[G.multiply(g, elems[p])]

    return GroupActionWitness(G, len(elems), "regular", act)


def _sink_action(G, K, delta, budget):
    """Følner set F_P plus an absorbing sink point."""
    def build(F):
        pos = {f: i for i, f in enumerate(F)}
        sink = len(F)

        def act(g, p):
            if p == sink:
                return sink
            return pos.get(G.multiply(g, F[p]), sink)
        return act

    def test(F):
        act = build(F)
        size = len(F) + 1
        m, s, _ = measure_group_action(
            G, K, size, lambda g: np.fromiter((act(g, p) for p in range(size)), np.int64, size))
        worst = max(m, s)
        return worst <= delta, 1 - worst

    if all(k == G.identity for k in K):
        F = [G.identity]
    else:
        _, F, _ = _search(test, G.folner_candidate, budget)
    w = GroupActionWitness(G, len(F) + 1, "folner+sink", build(F))
    w.certificate["F_P_size"] = len(F)
    return w


def _quotient_action(G, K):
    for idx in range(len(G.quotient_homs)):
        images = [G.image(idx, k) for k in K]
        if len(set(images)) == len(images):
            break
    else:
        raise NoSeparatingQuotient(
            f"no supplied finite quotient of {G.describe()} is injective on K")
    gens = [G.image(idx, g) for g in G.generators()]
    degree = len(G.quotient_homs[idx][0]) if G.quotient_homs[idx] else 0
    img = FiniteGroup.from_permutations(gens, degree)

    def act(g, p):
        return img.multiply(img.index_of(G.image(idx, g)), p)

    w = GroupActionWitness(G, img.order, "quotient-regular", act)
    w.certificate["quotient_index"] = idx
    w.certificate["quotient_order"] = img.order
    return w


def sofic_group_action(G, K, delta, budget=DEFAULT_SEARCH_BUDGET):
    """A finite (K, delta)-action of G.

    Finite groups act on themselves by left multiplication; residually finite
    handles act through the regular representation of the first supplied
    finite quotient injective on K; other amenable groups act on a Følner
    set plus a sink.
    """
    delta = Fraction(delta)
    K = list(dict.fromkeys(K))
    if G.is_finite:
        w = _regular_action(G, K, delta)
    elif G.kind == "residually-finite" and G.quotient_homs:
        w = _quotient_action(G, K)
    elif G.amenable is True:
        w = _sink_action(G, K, delta, budget)
    else:
        raise NotAmenableCapable(f"no sofic approximation provider for {G.describe()}")
    mult, sep, moved = measure_group_action(G, K, w.size, w.table)
    w.certificate.update({"delta": delta, "mult_defect": mult, "sep_overlap": sep,
                          "identity_moves": moved})
    return w


def joint_quotient_image(G, quotients):
    """The image of G in the product of the given stabiliser quotients."""
    quotients = list(quotients)
    Gbar = ImageGroup(G, [q.quotient for q in quotients], [q.hom for q in quotients])
    return Gbar, Gbar.image
