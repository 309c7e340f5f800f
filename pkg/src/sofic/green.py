"""Green's relations, egg-boxes and Schützenberger groups of finite monoids.

Partitions are tuples of class ids indexed by element; ids are assigned in
order of each class's smallest member, so two algorithms producing the same
partition produce identical tuples.
"""
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache

from ._backend import kernels
from .groups import FiniteGroup, compose

RIGHT, LEFT, TWO_SIDED = 0, 1, 2


def _canon(keys):
    ids = {}
    return tuple(ids.setdefault(k, len(ids)) for k in keys)


def _join(a, b):
    """Finest partition coarser than both a and b."""
    parent = list(range(len(a)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for part in (a, b):
        first = {}
        for x, c in enumerate(part):
            if c in first:
                ra, rb = find(first[c]), find(x)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
            else:
                first[c] = x
    return _canon(find(x) for x in range(len(a)))


@dataclass
class GreenStructure:
    monoid: object
    r_class: tuple
    l_class: tuple
    h_class: tuple
    d_class: tuple
    j_class: tuple
    eggbox: dict = field(default_factory=dict)

    @property
    def unit_class_id(self):
        return self.h_class[self.monoid.one]

    def members(self, partition, cls):
        part = getattr(self, partition)
        return [x for x, c in enumerate(part) if c == cls]

    def count(self, partition):
        return len(set(getattr(self, partition)))


def _build(M, r, l, j, d=None):
    h = _canon(zip(r, l))
    if d is None:
        d = _join(r, l)
    eggbox = {}
    for x in range(M.size):
        box = eggbox.setdefault(d[x], {"rows": [], "cols": [], "cells": {}})
        if r[x] not in box["rows"]:
            box["rows"].append(r[x])
        if l[x] not in box["cols"]:
            box["cols"].append(l[x])
        box["cells"].setdefault((r[x], l[x]), h[x])
    return GreenStructure(M, tuple(r), tuple(l), h, tuple(d), tuple(j), eggbox)


def green_relations(M):
    """Green's relations via strongly connected components of the Cayley graphs."""
    return _green_cached(M)


@lru_cache(maxsize=64)
def _green_cached(M):
    t = M.table
    r = tuple(int(c) for c in kernels.scc_labels(t, RIGHT))
    l = tuple(int(c) for c in kernels.scc_labels(t, LEFT))
    j = tuple(int(c) for c in kernels.scc_labels(t, TWO_SIDED))
    return _build(M, r, l, j)


def green_relations_definitional(M):
    """Oracle: compare principal ideals Mx, xM, MxM directly; D by its definition."""
    rows = M.rows
    n = M.size
    right = [frozenset(rows[x]) for x in range(n)]
    left = [frozenset(rows[m][x] for m in range(n)) for x in range(n)]
    two = [frozenset(rows[y][b] for y in left[x] for b in range(n)) for x in range(n)]
    r = _canon(right)
    l = _canon(left)
    j = _canon(two)
    # x D y iff some z has Mx = Mz and zM = yM
    d_keys = []
    for x in range(n):
        related = frozenset(y for y in range(n)
                            if any(left[z] == left[x] and right[z] == right[y] for z in range(n)))
        d_keys.append(related)
    return _build(M, r, l, j, _canon(d_keys))


def group_of_units(M):
    return list(M.units), M.unit_group


def j_class_of_identity_is_units(M):
    g = green_relations(M)
    j1 = set(g.members("j_class", g.j_class[M.one]))
    return j1 == set(M.units)


@dataclass
class SchutzGroup:
    h_class: tuple
    perms: tuple

    @property
    def order(self):
        return len(self.perms)

    @property
    def abelian(self):
        return all(compose(p, q) == compose(q, p) for p in self.perms for q in self.perms)

    def as_group(self):
        return FiniteGroup.from_permutations(self.perms, len(self.h_class))

    def element_orders(self):
        ident = tuple(range(len(self.h_class)))
        out = Counter()
        for p in self.perms:
            k, x = 1, p
            while x != ident:
                x = compose(x, p)
                k += 1
            out[k] += 1
        return out


def schutzenberger_group(M, h, green=None):
    """Permutations of the H-class h realised by right translations that fix it setwise."""
    g = green or green_relations(M)
    H = g.members("h_class", h)
    pos = {x: i for i, x in enumerate(H)}
    members = set(H)
    rows = M.rows
    perms = {}
    for m in range(M.size):
        image = [rows[x][m] for x in H]
        if set(image) == members:
            perms.setdefault(tuple(pos[y] for y in image), None)
    return SchutzGroup(tuple(H), tuple(perms))


@dataclass
class CircleAction:
    domain: tuple
    act: dict        # (H-class id, unit element) -> H-class id

    def __call__(self, h, g):
        return self.act[h, g]


def circle_action(M, d, green=None):
    """Action of the units on the H-classes of the D-class d by right translation."""
    g = green or green_relations(M)
    rows = M.rows
    domain = tuple(dict.fromkeys(g.h_class[x] for x in range(M.size) if g.d_class[x] == d))
    act = {}
    for hid in domain:
        reps = g.members("h_class", hid)
        for u in M.units:
            images = {g.h_class[rows[x][u]] for x in reps}
            if len(images) != 1:
                raise ValueError(f"circle action not well defined on H-class {hid}")
            act[hid, u] = images.pop()
    return CircleAction(domain, act)


def is_regular_element(M, x):
    rows = M.rows
    return any(rows[rows[x][y]][x] == x for y in range(M.size))


def eggbox_summary(M, green=None):
    """One record per D-class: egg-box shape, regularity and Schützenberger data."""
    g = green or green_relations(M)
    out = []
    for d in sorted(g.eggbox):
        box = g.eggbox[d]
        members = g.members("d_class", d)
        first_h = box["cells"][box["rows"][0], box["cols"][0]]
        S = schutzenberger_group(M, first_h, g)
        grid = [[len(g.members("h_class", box["cells"][r, c])) if (r, c) in box["cells"] else 0
                 for c in box["cols"]] for r in box["rows"]]
        out.append({
            "d_class": d,
            "size": len(members),
            "contains_identity": M.one in members,
            "r_classes": len(box["rows"]),
            "l_classes": len(box["cols"]),
            "h_classes": len(box["cells"]),
            "h_size": grid[0][0],
            "regular": all(is_regular_element(M, x) for x in members),
            "schutzenberger_order": S.order,
            "schutzenberger_abelian": S.abelian,
            "grid": grid,
            "rows": [[[M.label(x) for x in g.members("h_class", box["cells"][r, c])]
                      if (r, c) in box["cells"] else [] for c in box["cols"]]
                     for r in box["rows"]],
        })
    return out


def render_eggbox(summary):
    """Aligned ASCII egg-boxes; each cell shows the size of its H-class."""
    lines = []
    for rec in summary:
        flags = ["regular" if rec["regular"] else "non-regular"]
        if rec["contains_identity"]:
            flags.append("units")
        lines.append(f"D-class {rec['d_class']}: {rec['r_classes']} R x {rec['l_classes']} L, "
                     f"|H| = {rec['h_size']}, Schutzenberger order {rec['schutzenberger_order']}"
                     f"{' abelian' if rec['schutzenberger_abelian'] else ''} ({', '.join(flags)})")
        width = max(len(str(v)) for row in rec["grid"] for v in row)
        sep = "+" + "+".join("-" * (width + 2) for _ in rec["grid"][0]) + "+"
        lines.append(sep)
        for row in rec["grid"]:
            lines.append("|" + "|".join(f" {v:>{width}} " for v in row) + "|")
            lines.append(sep)
        for r, row in enumerate(rec["rows"]):
            lines.append("  R" + str(r) + ": " + "  ".join("{" + ",".join(cell) + "}" for cell in row))
        lines.append("")
    return "\n".join(lines).rstrip() + "\n"
