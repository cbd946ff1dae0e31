# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled hot kernels; same results as ``_kernels_py``."""

from fractions import Fraction
from math import gcd, lcm

cdef object _ONE = Fraction(1)
cdef object _ZERO = Fraction(0)


cdef inline void _acc(dict res, tuple m, object v):
    cdef object old = res.get(m)
    if old is not None:
        v = old + v
    if v:
        res[m] = v
    elif old is not None:
        del res[m]


cdef dict _left_mul(Py_ssize_t k, tuple mono, list brackets, dict cache):
    cdef tuple key = (k, mono)
    cdef object hit = cache.get(key)
    if hit is not None:
        return <dict>hit
    cdef dict res
    cdef Py_ssize_t i, l
    cdef tuple rest, m, m2
    cdef object c, c2
    if len(mono) == 0 or k <= <Py_ssize_t>mono[0]:
        res = {(k,) + mono: _ONE}
        cache[key] = res
        return res
    i = <Py_ssize_t>mono[0]
    rest = mono[1:]
    res = {}
    for m, c in _left_mul(k, rest, brackets, cache).items():
        for m2, c2 in _left_mul(i, m, brackets, cache).items():
            _acc(res, m2, c * c2)
    for l, c in (<list>(<list>brackets[k])[i]):
        for m2, c2 in _left_mul(l, rest, brackets, cache).items():
            _acc(res, m2, c * c2)
    cache[key] = res
    return res


def left_mul(k, mono, brackets, cache):
    """Normal form of ``x_k * x_mono`` in U(L); see ``_kernels_py.left_mul``."""
    return _left_mul(k, mono, brackets, cache)


cdef list _primitive(list v):
    cdef object g = 0
    cdef Py_ssize_t c
    for c in range(len(v)):
        if v[c]:
            g = gcd(g, v[c])
            if g == 1:
                return v
    if g == 0 or g == 1:
        return v
    return [x // g for x in v]


def rref_inplace(list rows, Py_ssize_t ncols):
    """Gauss-Jordan elimination in place; returns pivot columns.

    Eliminates over integer rows (each Fraction row scaled by its common
    denominator) and divides back once at the end. Rows must have length ncols.
    """
    cdef Py_ssize_t nrows = len(rows)
    cdef Py_ssize_t r = 0, col, i, p, c
    cdef list pivots = []
    cdef list ints = []
    cdef list prow, row, nz
    cdef object den, pv, f, x
    for i in range(nrows):
        row = <list>rows[i]
        den = 1
        for c in range(ncols):
            x = row[c]
            if x:
                den = lcm(den, x.denominator)
        ints.append([(row[c].numerator * den) // row[c].denominator for c in range(ncols)])
    for col in range(ncols):
        if r == nrows:
            break
        p = -1
        for i in range(r, nrows):
            if (<list>ints[i])[col]:
                p = i
                break
        if p < 0:
            continue
        if p != r:
            ints[p], ints[r] = ints[r], ints[p]
        prow = _primitive(<list>ints[r])
        if prow[col] < 0:
            prow = [-x for x in prow]
        ints[r] = prow
        pv = prow[col]
        nz = [c for c in range(col, ncols) if prow[c]]
        for i in range(nrows):
            if i == r:
                continue
            row = <list>ints[i]
            f = row[col]
            if f:
                if pv != 1:
                    row = [x * pv for x in row]
                for c in nz:
                    row[c] = row[c] - f * prow[c]
                ints[i] = _primitive(row)
        pivots.append(col)
        r += 1
    for i in range(nrows):
        row = <list>rows[i]
        prow = <list>ints[i]
        if i < r:
            pv = prow[pivots[i]]
            for c in range(ncols):
                row[c] = Fraction(prow[c], pv) if prow[c] else _ZERO
        else:
            for c in range(ncols):
                row[c] = _ZERO
    return pivots
