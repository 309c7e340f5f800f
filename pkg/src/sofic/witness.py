"""Finite (K, eps)-action witnesses and their exact defect measurement.

A witness stores tables only for the identity, K and the products K*K; those
are the only elements the three action conditions ever inspect.
"""
import base64
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ._backend import kernels
from .errors import CapExceeded, IdentityViolated, MalformedFile, MissingTable

DEFAULT_GROUND_CAP = 20_000_000


def fmt(q):
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


@dataclass(eq=False)
class ActionWitness:
    N: int
    encodings: list
    labels: list
    tables: np.ndarray
    products: list = field(default_factory=list)

    def __post_init__(self):
        self.tables = np.ascontiguousarray(self.tables, dtype=np.int64).reshape(len(self.encodings), self.N)
        self.products = [tuple(map(int, p)) for p in self.products]
        self._index = {e: i for i, e in enumerate(self.encodings)}

    def index(self, encoding):
        return self._index.get(encoding)

    def table_for(self, encoding):
        i = self._index.get(encoding)
        if i is None:
            raise MissingTable(f"no table for element {encoding!r}")
        return self.tables[i]

    def __eq__(self, other):
        if not isinstance(other, ActionWitness):
            return NotImplemented
        return (self.N == other.N and self.encodings == other.encodings
                and self.labels == other.labels and self.products == other.products
                and np.array_equal(self.tables, other.tables))

    def to_json(self) -> str:
        doc = {
            "N": self.N,
            "elements": [{"enc": base64.b64encode(e).decode("ascii"), "label": lab}
                         for e, lab in zip(self.encodings, self.labels)],
            "tables": self.tables.tolist(),
            "products": [list(p) for p in self.products],
        }
        return json.dumps(doc, separators=(",", ":"), ensure_ascii=False) + "\n"

    @classmethod
    def from_json(cls, text):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MalformedFile(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
        return _witness_from_doc(doc)


def _need(cond, message, position):
    if not cond:
        raise MalformedFile(message, position)


def _witness_from_doc(doc):
    _need(isinstance(doc, dict), "witness must be a JSON object", "top level")
    for key in ("N", "elements", "tables", "products"):
        _need(key in doc, f"missing key {key!r}", "top level")
    N = doc["N"]
    _need(isinstance(N, int) and not isinstance(N, bool) and N >= 1, "N must be a positive integer", "N")
    elements = doc["elements"]
    _need(isinstance(elements, list) and elements, "elements must be a nonempty list", "elements")
    encodings, labels = [], []
    for i, el in enumerate(elements):
        pos = f"elements[{i}]"
        _need(isinstance(el, dict) and isinstance(el.get("enc"), str)
              and isinstance(el.get("label"), str), "element needs string 'enc' and 'label'", pos)
        try:
            encodings.append(base64.b64decode(el["enc"], validate=True))
        except ValueError:
            raise MalformedFile("invalid base64", pos + ".enc") from None
        labels.append(el["label"])
    _need(len(set(encodings)) == len(encodings), "duplicate element encodings", "elements")
    tables = doc["tables"]
    _need(isinstance(tables, list) and len(tables) == len(encodings),
          "need one table per element", "tables")
    for i, row in enumerate(tables):
        _need(isinstance(row, list) and len(row) == N, f"table must have {N} entries", f"tables[{i}]")
        for j, x in enumerate(row):
            if not (isinstance(x, int) and not isinstance(x, bool) and 0 <= x < N):
                raise MalformedFile(f"entry {x!r} not a point in [0, {N})", f"tables[{i}][{j}]")
    products = doc["products"]
    _need(isinstance(products, list), "products must be a list", "products")
    E = len(encodings)
    for i, p in enumerate(products):
        _need(isinstance(p, list) and len(p) == 3
              and all(isinstance(x, int) and 0 <= x < E for x in p),
              "product must be [i, j, k] element indices", f"products[{i}]")
    return ActionWitness(N, encodings, labels, np.array(tables, dtype=np.int64), products)


def write_witness(path, witness):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(witness.to_json())


def read_witness(path):
    with open(path, encoding="utf-8") as fh:
        return ActionWitness.from_json(fh.read())


# -- measurement --------------------------------------------------------------

def measure_tables(tables, triples, pairs, identity_row, workers=1):
    """Raw defect counts over all points, partitioned into ``workers`` blocks.

    Counts are summed exactly, so the result does not depend on ``workers``.
    """
    tables = np.ascontiguousarray(tables, dtype=np.int64)
    N = tables.shape[1]
    triples = np.asarray(triples, dtype=np.int64).reshape(-1, 3)
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    workers = max(1, int(workers))
    bounds = [N * i // workers for i in range(workers + 1)]
    blocks = [(bounds[i], bounds[i + 1]) for i in range(workers) if bounds[i] < bounds[i + 1]]

    def run(block):
        return kernels.count_defects(tables, triples, pairs, identity_row, *block)

    if len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=len(blocks)) as pool:
            parts = list(pool.map(run, blocks))
    else:
        parts = [run(b) for b in blocks]
    mult = np.zeros(len(triples), dtype=np.int64)
    agree = np.zeros(len(pairs), dtype=np.int64)
    moved = 0
    for m, a, v in parts:
        mult += m
        agree += a
        moved += int(v)
    return mult, agree, moved


@dataclass
class DefectReport:
    N: int
    mult_defects: list      # (g label, h label, Fraction) for ordered pairs of K
    sep_overlaps: list      # (g label, h label, Fraction) for g != h
    identity_violations: int

    @property
    def max_mult_defect(self):
        return max((d for _, _, d in self.mult_defects), default=Fraction(0))

    @property
    def max_sep_overlap(self):
        return max((d for _, _, d in self.sep_overlaps), default=Fraction(0))

    def mult_defect(self, g, h):
        for a, b, d in self.mult_defects:
            if (a, b) == (g, h):
                return d
        raise KeyError((g, h))

    def sep_overlap(self, g, h):
        for a, b, d in self.sep_overlaps:
            if {a, b} == {g, h}:
                return d
        raise KeyError((g, h))

    def to_dict(self):
        return {
            "N": self.N,
            "identity_violations": self.identity_violations,
            "max_mult_defect": fmt(self.max_mult_defect),
            "max_sep_overlap": fmt(self.max_sep_overlap),
            "mult_defects": [{"g": g, "h": h, "defect": fmt(d)} for g, h, d in self.mult_defects],
            "sep_overlaps": [{"g": g, "h": h, "overlap": fmt(d)} for g, h, d in self.sep_overlaps],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), separators=(",", ":"), ensure_ascii=False) + "\n"


def passes(report, eps):
    eps = Fraction(eps)
    return (report.identity_violations == 0 and report.max_mult_defect <= eps
            and report.max_sep_overlap <= eps)


def _dedupe(M, K):
    out = {}
    for k in K:
        out.setdefault(M.encode(k), k)
    return list(out.values())


def check_witness(M, K, W, workers=1, strict=False):
    """Measure W against the (K, eps)-action conditions for the monoid M.

    Products g*h are recomputed in M; a missing table raises MissingTable.
    With ``strict`` an identity table that moves a point raises
    IdentityViolated; otherwise the count is reported.
    """
    K = _dedupe(M, K)

    def idx(x):
        enc = M.encode(x)
        i = W.index(enc)
        if i is None:
            raise MissingTable(f"witness has no table for {M.label(x)}")
        return i

    one = idx(M.one)
    kidx = [idx(k) for k in K]
    recorded = {(i, j): k for i, j, k in W.products}
    triples = []
    for g, gi in zip(K, kidx):
        for h, hi in zip(K, kidx):
            ghi = idx(M.multiply(g, h))
            if (gi, hi) in recorded and recorded[gi, hi] != ghi:
                raise MalformedFile(f"product {M.label(g)}*{M.label(h)} recorded inconsistently",
                                    "products")
            triples.append((gi, hi, ghi))
    pairs = [(kidx[a], kidx[b]) for a in range(len(K)) for b in range(a + 1, len(K))]
    mult, agree, moved = measure_tables(W.tables, triples, pairs, one, workers)
    if strict and moved:
        raise IdentityViolated(f"identity table moves {moved} points")
    labels = [M.label(k) for k in K]
    N = W.N
    mult_list = [(labels[a], labels[b], Fraction(int(mult[a * len(K) + b]), N))
                 for a in range(len(K)) for b in range(len(K))]
    sep_list = []
    c = 0
    for a in range(len(K)):
        for b in range(a + 1, len(K)):
            sep_list.append((labels[a], labels[b], Fraction(int(agree[c]), N)))
            c += 1
    return DefectReport(N, mult_list, sep_list, moved)


def witness_from_action(M, K, N, act, cap=DEFAULT_GROUND_CAP):
    """Tabulate ``act(m, x)`` for m in {1} + K + K*K on points 0..N-1."""
    if N > cap:
        raise CapExceeded("ground set", N, cap)
    K = _dedupe(M, K)
    acting = {M.encode(M.one): M.one}
    for k in K:
        acting.setdefault(M.encode(k), k)
    for g in K:
        for h in K:
            gh = M.multiply(g, h)
            acting.setdefault(M.encode(gh), gh)
    elems = list(acting.values())
    encs = list(acting)
    pos = {e: i for i, e in enumerate(encs)}
    tables = np.stack([np.asarray(act(m), dtype=np.int64) for m in elems])
    products = [(pos[M.encode(g)], pos[M.encode(h)], pos[M.encode(M.multiply(g, h))])
                for g in K for h in K]
    return ActionWitness(N, encs, [M.label(m) for m in elems], tables, products)


# -- diagonal-power oracle ------------------------------------------------------

def _agreement(M, K):
    rows = M.rows
    n = M.size
    best = Fraction(0)
    per_pair = {}
    for a in range(len(K)):
        for b in range(a + 1, len(K)):
            ga, gb = rows[K[a]], rows[K[b]]
            c = Fraction(sum(1 for m in range(n) if ga[m] == gb[m]), n)
            per_pair[a, b] = c
            best = max(best, c)
    return best, per_pair


def diagonal_power_exponent(M, K, eps):
    """Smallest n >= 1 with p**n <= eps, p the worst agreement fraction in K."""
    eps = Fraction(eps)
    K = _dedupe(M, K)
    p, _ = _agreement(M, K)
    if p == 0:
        return 1, p
    if eps <= 0:
        raise ValueError("eps = 0 is unreachable: two elements of K agree somewhere")
    n = 1
    while p ** n > eps:
        n += 1
    return n, p


def diagonal_power_witness(M, K, eps, cap=DEFAULT_GROUND_CAP):
    """Genuine left action of M on M^n by componentwise multiplication."""
    K = _dedupe(M, K)
    n, _ = diagonal_power_exponent(M, K, eps)
    size = M.size
    N = size ** n
    if N > cap:
        raise CapExceeded("diagonal power ground set", N, cap)
    x = np.arange(N, dtype=np.int64)
    digits = [(x // size ** i) % size for i in range(n)]
    table = np.asarray(M.table, dtype=np.int64)

    def act(m):
        row = table[m]
        out = np.zeros(N, dtype=np.int64)
        for i, d in enumerate(digits):
            out += row[d] * size ** i
        return out

    return witness_from_action(M, K, N, act, cap=cap)


def diagonal_power_report(M, K, eps):
    """Report for the diagonal power witness without materialising M^n.

    Componentwise left multiplication is a genuine action (no multiplicative
    defect) and two elements agree on a tuple iff they agree on every
    component, so each overlap is the single-copy agreement to the n-th power.
    """
    K = _dedupe(M, K)
    n, _ = diagonal_power_exponent(M, K, eps)
    _, per_pair = _agreement(M, K)
    labels = [M.label(k) for k in K]
    mult = [(g, h, Fraction(0)) for g in labels for h in labels]
    sep = [(labels[a], labels[b], per_pair[a, b] ** n)
           for a in range(len(K)) for b in range(a + 1, len(K))]
    return DefectReport(M.size ** n, mult, sep, 0)
