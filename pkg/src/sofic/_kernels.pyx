# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels.  Signatures mirror ``sofic._pure``."""
import numpy as np
from libc.stdint cimport int64_t
from libc.stdlib cimport malloc, free

RIGHT, LEFT, TWO_SIDED = 0, 1, 2


def find_nonassociative(table):
    cdef const int64_t[:, ::1] t = np.ascontiguousarray(table, dtype=np.int64)
    cdef Py_ssize_t n = t.shape[0], i, j, k
    cdef int64_t ij
    cdef Py_ssize_t bi = -1, bj = -1, bk = -1
    with nogil:
        for i in range(n):
            for j in range(n):
                ij = t[i, j]
                for k in range(n):
                    if t[ij, k] != t[i, t[j, k]]:
                        bi = i; bj = j; bk = k
                        break
                if bi >= 0:
                    break
            if bi >= 0:
                break
    if bi < 0:
        return None
    return (bi, bj, bk)


cdef inline int64_t _succ(const int64_t[:, ::1] t, Py_ssize_t n, int mode,
                          int64_t v, Py_ssize_t i) noexcept nogil:
    if mode == 0:
        return t[v, i]
    if mode == 1:
        return t[i, v]
    if i < n:
        return t[v, i]
    return t[i - n, v]


def scc_labels(table, int mode):
    cdef const int64_t[:, ::1] t = np.ascontiguousarray(table, dtype=np.int64)
    cdef Py_ssize_t n = t.shape[0]
    cdef Py_ssize_t degree = 2 * n if mode == 2 else n
    out = np.full(n, -1, dtype=np.int64)
    cdef int64_t[::1] comp = out
    cdef int64_t *index = <int64_t *> malloc(n * sizeof(int64_t))
    cdef int64_t *low = <int64_t *> malloc(n * sizeof(int64_t))
    cdef char *on_stack = <char *> malloc(n * sizeof(char))
    cdef int64_t *stack = <int64_t *> malloc(n * sizeof(int64_t))
    cdef int64_t *work_v = <int64_t *> malloc(n * sizeof(int64_t))
    cdef int64_t *work_i = <int64_t *> malloc(n * sizeof(int64_t))
    cdef Py_ssize_t sp = 0, wp = 0, root, i
    cdef int64_t v, w, u, counter = 0, ncomp = 0
    if (index == NULL or low == NULL or on_stack == NULL or stack == NULL
            or work_v == NULL or work_i == NULL):
        free(index); free(low); free(on_stack); free(stack); free(work_v); free(work_i)
        raise MemoryError()
    try:
        with nogil:
            for i in range(n):
                index[i] = -1
                on_stack[i] = 0
            for root in range(n):
                if index[root] != -1:
                    continue
                index[root] = counter
                low[root] = counter
                counter += 1
                stack[sp] = root; sp += 1
                on_stack[root] = 1
                work_v[wp] = root; work_i[wp] = 0; wp += 1
                while wp > 0:
                    v = work_v[wp - 1]
                    i = work_i[wp - 1]
                    w = -1
                    while i < degree:
                        w = _succ(t, n, mode, v, i)
                        i += 1
                        if index[w] == -1:
                            break
                        if on_stack[w] and index[w] < low[v]:
                            low[v] = index[w]
                        w = -1
                    work_i[wp - 1] = i
                    if w != -1:
                        index[w] = counter
                        low[w] = counter
                        counter += 1
                        stack[sp] = w; sp += 1
                        on_stack[w] = 1
                        work_v[wp] = w; work_i[wp] = 0; wp += 1
                        continue
                    wp -= 1
                    if wp > 0:
                        u = work_v[wp - 1]
                        if low[v] < low[u]:
                            low[u] = low[v]
                    if low[v] == index[v]:
                        while True:
                            sp -= 1
                            w = stack[sp]
                            on_stack[w] = 0
                            comp[w] = ncomp
                            if w == v:
                                break
                        ncomp += 1
            # renumber by smallest member
            for i in range(n):
                index[i] = -1
            counter = 0
            for i in range(n):
                if index[comp[i]] == -1:
                    index[comp[i]] = counter
                    counter += 1
                comp[i] = index[comp[i]]
    finally:
        free(index); free(low); free(on_stack); free(stack); free(work_v); free(work_i)
    return out


def count_defects(tables, triples, pairs, Py_ssize_t identity_row,
                  Py_ssize_t lo, Py_ssize_t hi):
    cdef const int64_t[:, ::1] t = np.ascontiguousarray(tables, dtype=np.int64)
    cdef const int64_t[:, ::1] tr = np.ascontiguousarray(
        np.asarray(triples, dtype=np.int64).reshape(-1, 3))
    cdef const int64_t[:, ::1] pr = np.ascontiguousarray(
        np.asarray(pairs, dtype=np.int64).reshape(-1, 2))
    mult_out = np.zeros(tr.shape[0], dtype=np.int64)
    agree_out = np.zeros(pr.shape[0], dtype=np.int64)
    cdef int64_t[::1] mult = mult_out
    cdef int64_t[::1] agree = agree_out
    cdef Py_ssize_t a, x
    cdef int64_t g, h, gh, c, moved = 0
    with nogil:
        for a in range(tr.shape[0]):
            g = tr[a, 0]; h = tr[a, 1]; gh = tr[a, 2]
            c = 0
            for x in range(lo, hi):
                if t[g, t[h, x]] != t[gh, x]:
                    c += 1
            mult[a] = c
        for a in range(pr.shape[0]):
            g = pr[a, 0]; h = pr[a, 1]
            c = 0
            for x in range(lo, hi):
                if t[g, x] == t[h, x]:
                    c += 1
            agree[a] = c
        for x in range(lo, hi):
            if t[identity_row, x] != x:
                moved += 1
    return mult_out, agree_out, int(moved)
