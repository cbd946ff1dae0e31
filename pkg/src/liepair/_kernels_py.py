"""Pure-Python hot kernels.

Same signatures and semantics as the compiled ``_kernels`` extension; used
when the extension is not built. Monomials are sorted tuples of generator
indices, elements are ``{monomial: Fraction}`` dicts with no zero values.
"""

from fractions import Fraction


def left_mul(k, mono, brackets, cache):
    """Normal form of ``x_k * x_mono`` in U(L).

    ``brackets[k][i]`` lists ``(l, c)`` with ``[x_k, x_i] = sum c x_l``.
    Uses x_k x_i -> x_i x_k + [x_k, x_i] for k > i. The returned dict is
    shared through ``cache`` and must not be mutated.
    """
    key = (k, mono)
    hit = cache.get(key)
    if hit is not None:
        return hit
    if not mono or k <= mono[0]:
        res = {(k,) + mono: Fraction(1)}
        cache[key] = res
        return res
    i = mono[0]
    rest = mono[1:]
    res = {}
    for m, c in left_mul(k, rest, brackets, cache).items():
        for m2, c2 in left_mul(i, m, brackets, cache).items():
            v = res.get(m2, 0) + c * c2
            if v:
                res[m2] = v
            else:
                res.pop(m2, None)
    for l, c in brackets[k][i]:
        for m2, c2 in left_mul(l, rest, brackets, cache).items():
            v = res.get(m2, 0) + c * c2
            if v:
                res[m2] = v
            else:
                res.pop(m2, None)
    cache[key] = res
    return res


def rref_inplace(rows, ncols):
    """Gauss-Jordan elimination of a list of Fraction rows, in place.

    Returns the pivot column list; rows past the rank end up zero.
    """
    pivots = []
    nrows = len(rows)
    r = 0
    for col in range(ncols):
        if r == nrows:
            break
        p = -1
        for i in range(r, nrows):
            if rows[i][col]:
                p = i
                break
        if p < 0:
            continue
        if p != r:
            rows[p], rows[r] = rows[r], rows[p]
        prow = rows[r]
        inv = 1 / prow[col]
        if inv != 1:
            for c in range(col, ncols):
                if prow[c]:
                    prow[c] *= inv
        nz = [c for c in range(col, ncols) if prow[c]]
        for i in range(nrows):
            if i == r:
                continue
            row = rows[i]
            f = row[col]
            if f:
                for c in nz:
                    row[c] -= f * prow[c]
        pivots.append(col)
        r += 1
    return pivots
