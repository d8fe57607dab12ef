# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled twins of the loops in ``_pykernels``.

Each kernel runs on machine integers when the operand sizes provably fit
and falls back to Python-object arithmetic otherwise, so results never
depend on which path ran.
"""
from libc.stdlib cimport malloc, free
from orbitrel.kernels import _pykernels

cdef long long _LIMIT = 1LL << 62


def conv_trunc(a, b, Py_ssize_t n):
    cdef Py_ssize_t la = min(len(a), n)
    cdef Py_ssize_t lb = min(len(b), n)
    cdef Py_ssize_t i, j
    cdef long long *ca
    cdef long long *cb
    cdef long long *acc
    cdef int small = 1
    if n <= 0:
        return []
    for i in range(la):
        if a[i].bit_length() > 28:
            small = 0
            break
    if small:
        for j in range(lb):
            if b[j].bit_length() > 28:
                small = 0
                break
    if small and n <= 60:
        ca = <long long *> malloc(la * sizeof(long long) + 1)
        cb = <long long *> malloc(lb * sizeof(long long) + 1)
        acc = <long long *> malloc(n * sizeof(long long))
        try:
            for i in range(la):
                ca[i] = a[i]
            for j in range(lb):
                cb[j] = b[j]
            for i in range(n):
                acc[i] = 0
            for i in range(la):
                if ca[i] == 0:
                    continue
                for j in range(min(lb, n - i)):
                    acc[i + j] += ca[i] * cb[j]
            return [acc[i] for i in range(n)]
        finally:
            free(ca)
            free(cb)
            free(acc)
    cdef list out = [0] * n
    cdef object x, y
    for i in range(la):
        x = a[i]
        if not x:
            continue
        for j in range(min(lb, n - i)):
            y = b[j]
            if y:
                out[i + j] = out[i + j] + x * y
    return out


cdef int _nondegenerate_c(long long *terms, int k):
    cdef int full = (1 << k) - 1
    cdef int mask, i
    cdef long long s
    for mask in range(1, full):
        s = 0
        for i in range(k):
            if mask & (1 << i):
                s += terms[i]
        if s == 0:
            return 0
    return 1


def mann_box_search(coeffs, long long base, rhs, int bound, bint min_zero):
    cdef int k = len(coeffs)
    cdef int i, e
    cdef long long s
    if k == 0 or k > 20:
        return _pykernels.mann_box_search(coeffs, base, rhs, bound, min_zero)
    # int64 path needs every partial sum bounded by sum|c| * base**bound
    total = sum(abs(c) for c in coeffs) * base ** bound
    if total >= _LIMIT or abs(rhs) >= _LIMIT:
        return _pykernels.mann_box_search(coeffs, base, rhs, bound, min_zero)
    cdef long long crhs = rhs
    cdef long long *cc = <long long *> malloc(k * sizeof(long long))
    cdef long long *pw = <long long *> malloc((bound + 1) * sizeof(long long))
    cdef long long *terms = <long long *> malloc(k * sizeof(long long))
    cdef int *t = <int *> malloc(k * sizeof(int))
    found = []
    try:
        for i in range(k):
            cc[i] = coeffs[i]
            t[i] = 0
        pw[0] = 1
        for e in range(1, bound + 1):
            pw[e] = pw[e - 1] * base
        while True:
            s = 0
            for i in range(k):
                terms[i] = cc[i] * pw[t[i]]
                s += terms[i]
            if s == crhs:
                if min_zero:
                    e = bound + 1
                    for i in range(k):
                        if t[i] < e:
                            e = t[i]
                    if e == 0 and _nondegenerate_c(terms, k):
                        found.append(tuple([t[i] for i in range(k)]))
                elif _nondegenerate_c(terms, k):
                    found.append(tuple([t[i] for i in range(k)]))
            # odometer, last coordinate fastest (lex order)
            i = k - 1
            while i >= 0:
                t[i] += 1
                if t[i] <= bound:
                    break
                t[i] = 0
                i -= 1
            if i < 0:
                break
        return found
    finally:
        free(cc)
        free(pw)
        free(terms)
        free(t)


def box_points(rows, rhs, lo, hi, Py_ssize_t limit):
    cdef int n = len(lo)
    cdef int m = len(rows)
    cdef int i, r
    cdef long long s
    cdef int ok
    if n == 0 or n > 32:
        return _pykernels.box_points(rows, rhs, lo, hi, limit)
    big = max([abs(x) for x in lo] + [abs(x) for x in hi] + [0])
    cbig = max([abs(c) for row in rows for c in row] + [abs(x) for x in rhs] + [0])
    if big >= (1 << 20) or cbig >= (1 << 20) or n * big * cbig >= (1 << 60):
        return _pykernels.box_points(rows, rhs, lo, hi, limit)
    cdef long long *A = <long long *> malloc((m * n + 1) * sizeof(long long))
    cdef long long *b = <long long *> malloc((m + 1) * sizeof(long long))
    cdef long long *w = <long long *> malloc(n * sizeof(long long))
    cdef long long *l = <long long *> malloc(n * sizeof(long long))
    cdef long long *h = <long long *> malloc(n * sizeof(long long))
    found = []
    try:
        for i in range(n):
            l[i] = lo[i]
            h[i] = hi[i]
            w[i] = l[i]
            if l[i] > h[i]:
                return []
        for r in range(m):
            b[r] = rhs[r]
            for i in range(n):
                A[r * n + i] = rows[r][i]
        while True:
            ok = 1
            for r in range(m):
                s = 0
                for i in range(n):
                    s += A[r * n + i] * w[i]
                if s > b[r]:
                    ok = 0
                    break
            if ok:
                found.append(tuple([w[i] for i in range(n)]))
                if len(found) >= limit:
                    break
            i = n - 1
            while i >= 0:
                w[i] += 1
                if w[i] <= h[i]:
                    break
                w[i] = l[i]
                i -= 1
            if i < 0:
                break
        return found
    finally:
        free(A)
        free(b)
        free(w)
        free(l)
        free(h)
