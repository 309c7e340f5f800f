"""Interpreted implementations of the hot kernels.

Same signatures and results as the compiled ``_kernels`` extension; used when
the extension is not built or ``SOFIC_PURE_PYTHON=1`` is set.
"""
import numpy as np

RIGHT, LEFT, TWO_SIDED = 0, 1, 2


def find_nonassociative(table):
    """Return the first triple (i, j, k) with (ij)k != i(jk), or None."""
    t = np.asarray(table).tolist()
    n = len(t)
    for i in range(n):
        ti = t[i]
        for j in range(n):
            rij = t[ti[j]]
            tj = t[j]
            for k in range(n):
                if rij[k] != ti[tj[k]]:
                    return (i, j, k)
    return None


def _successors(t, v, mode):
    n = len(t)
    if mode == RIGHT:
        return t[v]
    if mode == LEFT:
        return [t[m][v] for m in range(n)]
    return t[v] + [t[m][v] for m in range(n)]


def scc_labels(table, mode):
    """Strongly connected components of a Cayley graph of the table.

    mode RIGHT: x -> x*m, LEFT: x -> m*x, TWO_SIDED: both.  Components are
    numbered in order of their smallest member.
    """
    t = np.asarray(table).tolist()
    n = len(t)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    comp = [-1] * n
    stack = []
    counter = 0
    ncomp = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, _successors(t, root, mode), 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, succ, i = work[-1]
            advanced = False
            while i < len(succ):
                w = succ[i]
                i += 1
                if index[w] == -1:
                    work[-1] = (v, succ, i)
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, _successors(t, w, mode), 0))
                    advanced = True
                    break
                if on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                if low[v] < low[u]:
                    low[u] = low[v]
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp[w] = ncomp
                    if w == v:
                        break
                ncomp += 1
    return _canonical(comp)


def _canonical(comp):
    relabel = {}
    out = np.empty(len(comp), dtype=np.int64)
    for x, c in enumerate(comp):
        if c not in relabel:
            relabel[c] = len(relabel)
        out[x] = relabel[c]
    return out


def count_defects(tables, triples, pairs, identity_row, lo, hi):
    """Count defects of an action over the points [lo, hi).

    tables[e][x] is the image of point x under acting element e.  For every
    triple (g, h, gh) count points with g.(h.x) != (gh).x; for every pair
    (g, h) count points with g.x == h.x; count points moved by the identity.
    """
    rows = {}

    def row(e):
        r = rows.get(e)
        if r is None:
            r = rows[e] = np.asarray(tables[e]).tolist()
        return r

    mult = np.zeros(len(triples), dtype=np.int64)
    for a, (g, h, gh) in enumerate(np.asarray(triples).tolist()):
        tg, th, tgh = row(g), row(h), row(gh)
        c = 0
        for x in range(lo, hi):
            if tg[th[x]] != tgh[x]:
                c += 1
        mult[a] = c
    agree = np.zeros(len(pairs), dtype=np.int64)
    for a, (g, h) in enumerate(np.asarray(pairs).tolist()):
        tg, th = row(g), row(h)
        c = 0
        for x in range(lo, hi):
            if tg[x] == th[x]:
                c += 1
        agree[a] = c
    t1 = row(identity_row)
    moved = 0
    for x in range(lo, hi):
        if t1[x] != x:
            moved += 1
    return mult, agree, moved
