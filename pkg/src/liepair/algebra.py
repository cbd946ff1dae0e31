"""Exact linear algebra and combinatorics over the rationals.

Scalars are :class:`fractions.Fraction`. Matrices are lists of rows, vectors
are lists; nothing here mutates its arguments.
"""

from fractions import Fraction
from itertools import combinations, combinations_with_replacement
from math import comb

from .kernels import rref_inplace

Q = Fraction
ZERO = Fraction(0)
ONE = Fraction(1)


# -- scalars ---------------------------------------------------------------

def to_q(x):
    """Parse a rational from int, Fraction or a ``"p/q"`` / ``"p"`` string."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        if not s or any(ch in s for ch in ".eE"):
            raise ValueError(f"not a rational string: {x!r}")
        return Fraction(s)
    raise TypeError(f"cannot read {type(x).__name__} as a rational")


def q_str(x):
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


# -- matrices ----------------------------------------------------------------

def zeros(rows, cols):
    return [[ZERO] * cols for _ in range(rows)]


def identity(n):
    m = zeros(n, n)
    for i in range(n):
        m[i][i] = ONE
    return m


def ncols_of(m, cols=None):
    if cols is not None:
        return cols
    return len(m[0]) if m else 0


def matmul(a, b):
    n = len(b[0]) if b else 0
    out = []
    for row in a:
        acc = [ZERO] * n
        for k, x in enumerate(row):
            if x:
                bk = b[k]
                for j in range(n):
                    if bk[j]:
                        acc[j] += x * bk[j]
        out.append(acc)
    return out


def matvec(m, v):
    return [sum((x * y for x, y in zip(row, v) if x and y), ZERO) for row in m]


def transpose(m, cols=None):
    cols = ncols_of(m, cols)
    return [[m[i][j] for i in range(len(m))] for j in range(cols)]


def rref(m, cols=None):
    """Reduced row echelon form and the strictly increasing pivot columns."""
    cols = ncols_of(m, cols)
    rows = [[Fraction(x) for x in row] for row in m]
    pivots = rref_inplace(rows, cols)
    return rows, pivots


def rank(m, cols=None):
    return len(rref(m, cols)[1])


def solve(m, b, cols=None):
    """One exact solution x of ``m x = b``, or None when b is not in the column space."""
    if len(b) != len(m):
        raise ValueError(f"dimension mismatch: {len(m)} rows, rhs of length {len(b)}")
    cols = ncols_of(m, cols)
    aug = [list(row) + [Fraction(bi)] for row, bi in zip(m, b)]
    rows = [[Fraction(x) for x in row] for row in aug]
    pivots = rref_inplace(rows, cols + 1)
    if pivots and pivots[-1] == cols:
        return None
    x = [ZERO] * cols
    for r, p in enumerate(pivots):
        x[p] = rows[r][cols]
    return x


def kernel_basis(m, cols=None):
    """Basis of the right kernel; one vector per free column."""
    cols = ncols_of(m, cols)
    r, pivots = rref(m, cols)
    pset = set(pivots)
    basis = []
    for f in range(cols):
        if f in pset:
            continue
        v = [ZERO] * cols
        v[f] = ONE
        for i, p in enumerate(pivots):
            v[p] = -r[i][f]
        basis.append(v)
    return basis


def inverse(m):
    """Exact inverse of a square matrix; raises ValueError when singular."""
    n = len(m)
    aug = [list(row) + e for row, e in zip(m, identity(n))]
    rows, pivots = rref(aug, 2 * n)
    if pivots[:n] != list(range(n)):
        raise ValueError("singular matrix")
    return [row[n:] for row in rows[:n]]


def row_space_contains(m, v, cols=None):
    return solve(transpose(m, cols), v) is not None if m else not any(v)


# -- combinatorics -----------------------------------------------------------

def shuffles(p, q):
    """All (p, q)-shuffles as image tuples, lexicographic.

    A shuffle sends slots 0..p-1 and p..p+q-1 increasingly; it is determined
    by the image set of the first p slots.
    """
    if p < 0 or q < 0:
        raise ValueError("shuffle sizes must be non-negative")
    n = p + q
    out = []
    for first in combinations(range(n), p):
        fs = set(first)
        out.append(first + tuple(i for i in range(n) if i not in fs))
    return out


def koszul_sign(perm, degrees):
    """Koszul sign of permuting graded symbols: v_perm(0) ... = sign * v_0 ...

    Each inverted pair of slots contributes (-1)^(d_i d_j).
    """
    if len(perm) != len(degrees):
        raise ValueError("permutation and degrees differ in length")
    odd = 0
    n = len(perm)
    for a in range(n):
        da = degrees[perm[a]]
        if not da % 2:
            continue
        for b in range(a + 1, n):
            if perm[a] > perm[b] and degrees[perm[b]] % 2:
                odd ^= 1
    return -1 if odd else 1


def perm_sign(seq):
    """Sign of the permutation sorting ``seq``; 0 when it has repeats."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0
    s = 1
    for a in range(len(seq)):
        for b in range(a + 1, len(seq)):
            if seq[a] > seq[b]:
                s = -s
    return s


def sym_index(q, k):
    """Weakly increasing k-tuples over range(q): the monomial basis of S^k."""
    return list(combinations_with_replacement(range(q), k))


def sym_index_upto(q, n):
    out = []
    for k in range(n + 1):
        out.extend(sym_index(q, k))
    return out


def ext_index(r, p):
    """Strictly increasing p-tuples over range(r): the basis of the p-th exterior power."""
    return list(combinations(range(r), p))


def sym_dim(q, k):
    if k == 0:
        return 1
    return comb(q + k - 1, k)


def sym_dim_upto(q, n):
    return sum(sym_dim(q, k) for k in range(n + 1))


def set_partitions(items):
    """All set partitions of a list, each as a list of blocks (lists)."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


# -- sparse elements ---------------------------------------------------------

def add_into(acc, other, scale=ONE):
    """acc += scale * other for ``{key: Fraction}`` dicts, dropping zeros."""
    if not scale:
        return acc
    for k, v in other.items():
        x = acc.get(k, ZERO) + scale * v
        if x:
            acc[k] = x
        else:
            acc.pop(k, None)
    return acc


def sym_mul(m1, m2):
    return tuple(sorted(m1 + m2))


def sym_product(*elements):
    """Product in the symmetric algebra of dict elements keyed by monomials."""
    out = {(): ONE}
    for el in elements:
        nxt = {}
        for m, c in out.items():
            for m2, c2 in el.items():
                key = sym_mul(m, m2)
                nxt[key] = nxt.get(key, ZERO) + c * c2
        out = {k: v for k, v in nxt.items() if v}
    return out


def vec_to_sym(v):
    """Degree-one symmetric element from a coordinate vector."""
    return {(i,): Fraction(x) for i, x in enumerate(v) if x}


def deconcatenate(mono):
    """Deconcatenation coproduct of a monomial: sum over subsets of positions."""
    out = {}
    n = len(mono)
    for k in range(n + 1):
        for pos in combinations(range(n), k):
            ps = set(pos)
            left = tuple(mono[i] for i in pos)
            right = tuple(mono[i] for i in range(n) if i not in ps)
            out[(left, right)] = out.get((left, right), 0) + 1
    return {k: Fraction(v) for k, v in out.items()}
