"""Integer lattices in Z^m kept in Hermite normal form.

A subgroup of Z^m is stored as the tuple of its HNF rows: upper echelon,
positive pivots, entries above each pivot reduced into [0, pivot).  Two
generating sets give the same subgroup iff their HNFs are equal.
"""


def hnf(rows, m):
    work = [list(r) for r in rows if any(r)]
    for r in work:
        if len(r) != m:
            raise ValueError(f"generator {r} is not in Z^{m}")
    result = []
    for col in range(m):
        while True:
            nz = [r for r in work if r[col] != 0]
            if len(nz) <= 1:
                break
            nz.sort(key=lambda r: abs(r[col]))
            piv = nz[0]
            for r in nz[1:]:
                q = r[col] // piv[col]
                for c in range(col, m):
                    r[c] -= q * piv[c]
            work = [r for r in work if any(r)]
        nz = [r for r in work if r[col] != 0]
        if nz:
            piv = nz[0]
            work = [r for r in work if r is not piv]
            if piv[col] < 0:
                piv = [-x for x in piv]
            result.append(piv)
    for i, row in enumerate(result):
        c = pivot_column(row)
        for j in range(i):
            q = result[j][c] // row[c]
            if q:
                result[j] = [a - q * b for a, b in zip(result[j], row)]
    return tuple(tuple(r) for r in result)


def pivot_column(row):
    for c, x in enumerate(row):
        if x:
            return c
    raise ValueError("zero row has no pivot")


def reduce(vector, basis):
    """Canonical representative of vector modulo the lattice spanned by an HNF basis."""
    v = list(vector)
    for row in basis:
        c = pivot_column(row)
        q = v[c] // row[c]
        if q:
            v = [a - q * b for a, b in zip(v, row)]
    return tuple(v)


def join(a, b, m):
    return hnf(list(a) + list(b), m)


def contains(basis, vector):
    return not any(reduce(vector, basis))


def is_sublattice(small, big):
    return all(contains(big, r) for r in small)
