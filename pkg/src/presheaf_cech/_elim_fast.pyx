# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Machine-integer fraction-free Gauss-Jordan elimination.

Runs the algorithm of ``_elim.rref_int`` on int64 with checked arithmetic.
Inputs that do not fit, or intermediate values that overflow, are handed to
the pure-Python big-integer kernel, so results never depend on the backend.
"""
from libc.stdlib cimport malloc, free
from libc.stdint cimport int64_t

from presheaf_cech import _elim

cdef extern from "<limits.h>":
    long long LLONG_MIN

cdef extern from *:
    """
    static int pc_mul_ovf(long long a, long long b, long long *r) {
        return __builtin_mul_overflow(a, b, r);
    }
    static int pc_sub_ovf(long long a, long long b, long long *r) {
        return __builtin_sub_overflow(a, b, r);
    }
    """
    int pc_mul_ovf(long long a, long long b, long long *r) nogil
    int pc_sub_ovf(long long a, long long b, long long *r) nogil


cdef inline int64_t _gcd(int64_t a, int64_t b) noexcept nogil:
    cdef int64_t t
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b:
        t = a % b
        a = b
        b = t
    return a


cdef Py_ssize_t _reduce(int64_t *a, int64_t *tmp, Py_ssize_t m, Py_ssize_t n,
                       Py_ssize_t *piv, Py_ssize_t *npiv) noexcept nogil:
    # returns n on success, else the column at which int64 overflowed;
    # rows are only written once their update has fully succeeded
    cdef Py_ssize_t r = 0, c, p, i, j
    cdef int64_t g, pv, f, s, t, h, best
    cdef long long prod1, prod2, diff
    cdef int64_t *prow
    cdef int64_t *row
    cdef bint ovf
    npiv[0] = 0
    for c in range(n):
        if r == m:
            break
        p = -1
        best = 0
        for i in range(r, m):
            f = a[i * n + c]
            if f < 0:
                f = -f
            if f and (p < 0 or f < best):
                p = i
                best = f
                if best == 1:
                    break
        if p < 0:
            continue
        if p != r:
            for j in range(n):
                t = a[r * n + j]
                a[r * n + j] = a[p * n + j]
                a[p * n + j] = t
        prow = a + r * n
        g = 0
        for j in range(n):
            g = _gcd(g, prow[j])
        if prow[c] < 0:
            g = -g
        if g != 1:
            for j in range(n):
                prow[j] = prow[j] // g
        pv = prow[c]
        for i in range(m):
            if i == r:
                continue
            row = a + i * n
            f = row[c]
            if f == 0:
                continue
            g = _gcd(f, pv)
            s = pv // g
            t = f // g
            h = 0
            ovf = False
            for j in range(n):
                if (pc_mul_ovf(s, row[j], &prod1) or pc_mul_ovf(t, prow[j], &prod2)
                        or pc_sub_ovf(prod1, prod2, &diff) or diff == LLONG_MIN):
                    ovf = True
                    break
                tmp[j] = diff
                h = _gcd(h, diff)
            if ovf:
                return c
            if h > 1:
                for j in range(n):
                    row[j] = tmp[j] // h
            else:
                for j in range(n):
                    row[j] = tmp[j]
        piv[npiv[0]] = c
        npiv[0] += 1
        r += 1
    return n


def rref_int(rows, ncols):
    """Drop-in replacement for ``_elim.rref_int``."""
    cdef Py_ssize_t m = len(rows)
    cdef Py_ssize_t n = ncols
    cdef Py_ssize_t i, j, npiv = 0
    cdef int64_t *a
    cdef int64_t *tmp
    cdef Py_ssize_t *piv
    cdef Py_ssize_t stop
    if m == 0 or n == 0:
        return _elim.rref_int(rows, ncols)
    a = <int64_t *> malloc(m * n * sizeof(int64_t))
    tmp = <int64_t *> malloc(n * sizeof(int64_t))
    piv = <Py_ssize_t *> malloc(n * sizeof(Py_ssize_t))
    if a == NULL or tmp == NULL or piv == NULL:
        free(a)
        free(tmp)
        free(piv)
        raise MemoryError()
    try:
        try:
            for i in range(m):
                row = rows[i]
                for j in range(n):
                    # keep |entries| well inside int64 so negation cannot overflow
                    v = row[j]
                    if v > 4611686018427387903 or v < -4611686018427387903:
                        raise OverflowError
                    a[i * n + j] = v
        except OverflowError:
            return _elim.rref_int(rows, ncols)
        with nogil:
            stop = _reduce(a, tmp, m, n, piv, &npiv)
        out = [[a[i * n + j] for j in range(n)] for i in range(m)]
        pivots = [piv[i] for i in range(npiv)]
        if stop < n:
            return _elim.resume(out, ncols, stop, pivots)
        return out, pivots
    finally:
        free(a)
        free(tmp)
        free(piv)
