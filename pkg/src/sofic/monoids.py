"""Monoids: the common interface, Cayley-table monoids and their constructors.

Elements are canonical hashable values (table indices for finite monoids,
tuples of ints for the structured families), so value equality coincides
with equality of the byte encodings.
"""
import itertools
import json
import struct
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

from ._backend import kernels
from .errors import BadIndex, CapExceeded, InvalidMonoid, NoIdentity, NotAssociative, ParseError
from .groups import FiniteGroup, Group

MAX_TABLE_SIZE = 100_000
MAX_TRANSFORMATION_DEGREE = 5

# orbit quotient status values
FINITE = "finite"
AMENABLE = "amenable-provider"
NONAMENABLE = "declared-nonamenable"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class StabiliserQuotient:
    """G modulo the pointwise stabiliser of one right-translation orbit."""
    quotient: Group
    hom: Callable
    translate: Callable
    status: str

    @property
    def amenable_capable(self):
        return self.status in (FINITE, AMENABLE)


class Monoid:
    """Interface shared by table monoids and the structured families.

    Subclasses provide ``one``, ``multiply``, ``is_unit``, ``unit_inverse``,
    ``encode``/``decode``, ``label``/``parse``, the unit group with the maps
    ``to_group``/``from_group``, and ``stabiliser_quotient`` for non-units.
    """
    one = None
    is_finite = False
    name = "monoid"

    def multiply(self, a, b):
        raise NotImplementedError

    def is_unit(self, a) -> bool:
        raise NotImplementedError

    def unit_inverse(self, a):
        raise NotImplementedError

    def encode(self, a) -> bytes:
        raise NotImplementedError

    def decode(self, data: bytes):
        raise NotImplementedError

    def label(self, a) -> str:
        raise NotImplementedError

    def parse(self, text: str):
        raise NotImplementedError

    @property
    def unit_group(self) -> Group:
        raise NotImplementedError

    def to_group(self, u):
        raise NotImplementedError

    def from_group(self, g):
        raise NotImplementedError

    def stabiliser_quotient(self, s) -> StabiliserQuotient:
        raise NotImplementedError

    @property
    def units_equal_j_class(self) -> bool:
        raise NotImplementedError


def word_product(M, word):
    out = M.one
    for x in word:
        out = M.multiply(out, x)
    return out


class FiniteMonoid(Monoid):
    """Monoid given by a validated Cayley table; elements are indices."""
    is_finite = True

    def __init__(self, table, names, identity, name="finite"):
        self.table = np.ascontiguousarray(table, dtype=np.int64)
        self.table.setflags(write=False)
        self.names = tuple(names)
        self.one = int(identity)
        self.name = name
        self._by_name = {s: i for i, s in enumerate(self.names)}
        self._quotients = {}

    @property
    def size(self):
        return len(self.names)

    @cached_property
    def rows(self):
        return self.table.tolist()

    def elements(self):
        return list(range(self.size))

    def multiply(self, a, b):
        return self.rows[a][b]

    @cached_property
    def units(self):
        e, r = self.one, self.rows
        return [u for u in range(self.size)
                if any(r[u][v] == e and r[v][u] == e for v in range(self.size))]

    @cached_property
    def _unit_pos(self):
        return {u: i for i, u in enumerate(self.units)}

    def is_unit(self, a):
        return a in self._unit_pos

    def unit_inverse(self, a):
        if not self.is_unit(a):
            raise ValueError(f"{self.label(a)} is not a unit")
        return next(v for v in self.units if self.rows[a][v] == self.one)

    @cached_property
    def unit_group(self):
        units, pos, r = self.units, self._unit_pos, self.rows
        table = [[pos[r[a][b]] for b in units] for a in units]
        return FiniteGroup(table, labels=[self.names[u] for u in units], identity=pos[self.one])

    def to_group(self, u):
        return self._unit_pos[u]

    def from_group(self, g):
        return self.units[g]

    def orbit(self, s):
        return list(dict.fromkeys(self.rows[s][u] for u in self.units))

    def stabiliser_quotient(self, s):
        """The permutation group induced by the units on the orbit of s."""
        if self.is_unit(s):
            raise ValueError("stabiliser quotients are defined on non-units")
        orbit = self.orbit(s)
        key = min(orbit)
        if key not in self._quotients:
            orbit = self.orbit(key)
            opos = {o: i for i, o in enumerate(orbit)}
            r = self.rows
            perms = [tuple(opos[r[o][u]] for o in orbit) for u in self.units]
            quotient = FiniteGroup.from_permutations(list(dict.fromkeys(perms)), len(orbit))
            qidx = [quotient.index_of(p) for p in perms]

            def hom(g, qidx=qidx):
                return qidx[g]

            def translate(x, q, opos=opos, orbit=orbit, quotient=quotient):
                return orbit[quotient.perm(q)[opos[x]]]

            self._quotients[key] = StabiliserQuotient(quotient, hom, translate, FINITE)
        return self._quotients[key]

    @cached_property
    def units_equal_j_class(self):
        from .green import j_class_of_identity_is_units
        return j_class_of_identity_is_units(self)

    def encode(self, a):
        return struct.pack(">I", a)

    def decode(self, data):
        (a,) = struct.unpack(">I", data)
        if not 0 <= a < self.size:
            raise ParseError(f"index {a} out of range")
        return a

    def label(self, a):
        return self.names[a]

    def parse(self, text):
        try:
            return self._by_name[text.strip()]
        except KeyError:
            raise ParseError(f"unknown element {text!r} of {self.name}") from None

    def to_dict(self):
        return {"size": self.size, "identity": self.one, "names": list(self.names),
                "table": self.rows}

    def to_json(self):
        return json.dumps(self.to_dict(), separators=(",", ":"), ensure_ascii=False) + "\n"

    @classmethod
    def from_json(cls, text, name="file"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise BadIndex(f"monoid file: {exc.msg} at line {exc.lineno} column {exc.colno}") from None
        if not isinstance(doc, dict) or not {"size", "identity", "names", "table"} <= doc.keys():
            raise BadIndex("monoid file needs keys size, identity, names, table")
        M = make_finite_monoid(doc["table"], doc["names"], name=name)
        if M.size != doc["size"]:
            raise BadIndex(f"declared size {doc['size']} but table has {M.size} rows")
        if M.one != doc["identity"]:
            raise NoIdentity()
        return M

    def __repr__(self):
        return f"FiniteMonoid({self.name}, size={self.size})"


def make_finite_monoid(table, names=None, name="finite", cap=MAX_TABLE_SIZE):
    """Validate a Cayley table and return the monoid it defines."""
    try:
        rows = [list(r) for r in table]
    except TypeError:
        raise BadIndex("table must be a sequence of rows") from None
    n = len(rows)
    if n == 0:
        raise BadIndex("table is empty")
    if n > cap:
        raise CapExceeded("table monoid size", n, cap)
    for i, r in enumerate(rows):
        if len(r) != n:
            raise BadIndex(f"row {i} has {len(r)} entries, expected {n}")
        for j, x in enumerate(r):
            if isinstance(x, bool) or not isinstance(x, (int, np.integer)) or not 0 <= x < n:
                raise BadIndex(f"entry ({i}, {j}) = {x!r} is not an index in [0, {n})")
    if names is None:
        names = [str(i) for i in range(n)]
    names = [str(s) for s in names]
    if len(names) != n:
        raise BadIndex(f"{len(names)} names for {n} elements")
    if len(set(names)) != n:
        raise BadIndex("element names must be distinct")
    t = np.array(rows, dtype=np.int64)
    identity = None
    for e in range(n):
        if np.array_equal(t[e], np.arange(n)) and np.array_equal(t[:, e], np.arange(n)):
            identity = e
            break
    if identity is None:
        raise NoIdentity()
    bad = kernels.find_nonassociative(t)
    if bad is not None:
        raise NotAssociative(bad)
    return FiniteMonoid(t, names, identity, name=name)


def make_transformation_monoid(n, cap=MAX_TRANSFORMATION_DEGREE):
    """Full transformation monoid T_n, composed left to right.

    Maps are tuples f with f[i] the image of i, named by their image string;
    (f*g)[i] = g[f[i]].
    """
    if n < 1:
        raise ValueError("degree must be positive")
    if n > cap:
        raise CapExceeded("transformation degree", n, cap)
    maps = list(itertools.product(range(n), repeat=n))
    pos = {f: i for i, f in enumerate(maps)}
    table = [[pos[tuple(g[f[i]] for i in range(n))] for g in maps] for f in maps]
    names = ["".join(map(str, f)) for f in maps]
    return make_finite_monoid(table, names, name=f"T{n}")


def make_cyclic_group_monoid(n):
    table = [[(i + j) % n for j in range(n)] for i in range(n)]
    return make_finite_monoid(table, [str(i) for i in range(n)], name=f"Z{n}")


def make_semilattice():
    """The 2-element semilattice {0, 1} under multiplication; 1 is the identity."""
    return make_finite_monoid([[0, 0], [0, 1]], ["0", "1"], name="SL2")


def direct_product(M, N, cap=MAX_TABLE_SIZE):
    size = M.size * N.size
    if size > cap:
        raise CapExceeded("direct product size", size, cap)
    m, n = M.rows, N.rows
    table = [[m[a][c] * N.size + n[b][d] for c in range(M.size) for d in range(N.size)]
             for a in range(M.size) for b in range(N.size)]
    names = [f"({x},{y})" for x in M.names for y in N.names]
    return make_finite_monoid(table, names, name=f"{M.name}x{N.name}")


def cancellativity_check(M):
    """{'left': ax = ay implies x = y, 'right': xa = ya implies x = y}."""
    t = M.table
    n = M.size
    left = all(len(np.unique(t[a])) == n for a in range(n))
    right = all(len(np.unique(t[:, a])) == n for a in range(n))
    return {"left": left, "right": right}


def read_monoid(path, name=None):
    with open(path, encoding="utf-8") as fh:
        return FiniteMonoid.from_json(fh.read(), name=name or str(path))


def write_monoid(path, M):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(M.to_json())


__all__ = [
    "Monoid", "FiniteMonoid", "StabiliserQuotient", "InvalidMonoid", "word_product",
    "make_finite_monoid", "make_transformation_monoid", "make_cyclic_group_monoid",
    "make_semilattice", "direct_product", "cancellativity_check", "read_monoid", "write_monoid",
]
