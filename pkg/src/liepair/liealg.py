"""Lie algebras by structure constants, Lie pairs, A-modules and CE cohomology.

Everything lives over a point, so Lie algebroids are Lie algebras and the
anchor is the zero map (:data:`ANCHOR`). Vectors of L are coordinate lists in
the input basis unless a name says ``adapted``: the adapted basis of a pair
lists the complement (splitting) rows first and the A rows last.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .algebra import (
    ONE, ZERO, ext_index, inverse, kernel_basis, matmul, matvec,
    perm_sign, rank, rref, solve, sym_index, transpose, zeros,
)

#: anchor of every algebroid in scope; the base manifold is a point
ANCHOR = 0


class PairError(ValueError):
    """Invalid Lie pair input."""


class NotASubalgebra(PairError):
    def __init__(self, i, j, value):
        self.indices = (i, j)
        self.value = value
        super().__init__(f"[A_{i}, A_{j}] = {value} is not in A")


class NotAComplement(PairError):
    pass


class LieAlgebra:
    """Finite-dimensional Lie algebra, ``[x_i, x_j] = sum_k c[i][j][k] x_k``."""

    def __init__(self, c, names=None):
        self.dim = n = len(c)
        self.c = [[[Fraction(x) for x in c[i][j]] for j in range(n)] for i in range(n)]
        self.names = list(names) if names is not None else [f"x{i}" for i in range(n)]
        if len(self.names) != n:
            raise ValueError("basis_names length differs from dimension")

    @classmethod
    def from_brackets(cls, dim, brackets, names=None):
        """Build from ``{(i, j): coeffs}`` with i < j; antisymmetry is filled in."""
        c = [[[ZERO] * dim for _ in range(dim)] for _ in range(dim)]
        for (i, j), coeffs in brackets.items():
            for k, x in enumerate(coeffs):
                c[i][j][k] = Fraction(x)
                c[j][i][k] = -Fraction(x)
        return cls(c, names)

    def bracket(self, u, v):
        n = self.dim
        out = [ZERO] * n
        for i in range(n):
            if not u[i]:
                continue
            for j in range(n):
                if not v[j]:
                    continue
                s = u[i] * v[j]
                cij = self.c[i][j]
                for k in range(n):
                    if cij[k]:
                        out[k] += s * cij[k]
        return out

    def basis_vector(self, i):
        v = [ZERO] * self.dim
        v[i] = ONE
        return v

    def is_abelian(self):
        return not any(x for plane in self.c for row in plane for x in row)


def validate_lie(L):
    """Every antisymmetry and Jacobi violation, as records with indices."""
    n = L.dim
    out = []
    for i in range(n):
        for j in range(i, n):
            for k in range(n):
                s = L.c[i][j][k] + L.c[j][i][k]
                if s:
                    out.append({"kind": "antisymmetry", "indices": [i, j, k], "value": s})
    e = L.basis_vector
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                xi, xj, xk = e(i), e(j), e(k)
                t1 = L.bracket(L.bracket(xi, xj), xk)
                t2 = L.bracket(L.bracket(xj, xk), xi)
                t3 = L.bracket(L.bracket(xk, xi), xj)
                for m in range(n):
                    s = t1[m] + t2[m] + t3[m]
                    if s:
                        out.append({"kind": "jacobi", "indices": [i, j, k],
                                    "component": m, "value": s})
    return out


def default_complement(A_rows, n):
    """Standard basis vectors at the non-pivot coordinates of rref(A_rows)."""
    if A_rows:
        _, pivots = rref(A_rows, n)
    else:
        pivots = []
    ps = set(pivots)
    rows = []
    for i in range(n):
        if i not in ps:
            v = [ZERO] * n
            v[i] = ONE
            rows.append(v)
    return rows


class LiePair:
    """A Lie algebra L with subalgebra A and a chosen complement image(j)."""

    def __init__(self, L, A_rows, j_rows):
        self.L = L
        self.A_rows = [[Fraction(x) for x in r] for r in A_rows]
        self.j_rows = [[Fraction(x) for x in r] for r in j_rows]
        n = L.dim
        self.n = n
        self.r = len(self.A_rows)
        self.q = len(self.j_rows)
        self.P = self.j_rows + self.A_rows
        # adapted coordinates y of v satisfy v = P^T y
        self._to_adapted = inverse(transpose(self.P, n)) if n else []
        P = self.P
        self.cad = [[self.to_adapted(L.bracket(P[i], P[j])) for j in range(n)]
                    for i in range(n)]

    # coordinates
    def to_adapted(self, v):
        return matvec(self._to_adapted, v) if self.n else []

    def from_adapted(self, y):
        n = self.n
        out = [ZERO] * n
        for i, yi in enumerate(y):
            if yi:
                for k in range(n):
                    out[k] += yi * self.P[i][k]
        return out

    def pr(self, v):
        """Projection L -> E = L/A in the E basis (classes of the j rows)."""
        return self.to_adapted(v)[:self.q]

    def j(self, b):
        """Splitting E -> L."""
        y = list(b) + [ZERO] * self.r
        return self.from_adapted(y)

    def a_vector(self, alpha):
        return list(self.A_rows[alpha])

    def adapted_bracket(self, y1, y2):
        n = self.n
        out = [ZERO] * n
        for i in range(n):
            if not y1[i]:
                continue
            for k in range(n):
                if not y2[k]:
                    continue
                s = y1[i] * y2[k]
                row = self.cad[i][k]
                for m in range(n):
                    if row[m]:
                        out[m] += s * row[m]
        return out

    def a_constants(self):
        """Structure constants of A in its own basis."""
        q, r = self.q, self.r
        return [[self.cad[q + a][q + b][q:] for b in range(r)] for a in range(r)]

    @property
    def is_degenerate(self):
        return self.r == 0 or self.q == 0


def make_pair(L, A_rows, j_rows=None):
    n = L.dim
    A_rows = [[Fraction(x) for x in r] for r in A_rows]
    for r_ in A_rows:
        if len(r_) != n:
            raise PairError("A row length differs from dim L")
    if A_rows and rank(A_rows, n) != len(A_rows):
        raise PairError("A rows are not linearly independent")
    At = transpose(A_rows, n) if A_rows else None
    for i in range(len(A_rows)):
        for k in range(i + 1, len(A_rows)):
            v = L.bracket(A_rows[i], A_rows[k])
            if At is None or solve(At, v) is None:
                raise NotASubalgebra(i, k, v)
    if j_rows is None:
        j_rows = default_complement(A_rows, n)
    else:
        j_rows = [[Fraction(x) for x in r] for r in j_rows]
        if any(len(r_) != n for r_ in j_rows):
            raise NotAComplement("complement row length differs from dim L")
        if len(j_rows) + len(A_rows) != n or rank(A_rows + j_rows, n) != n:
            raise NotAComplement("rows do not span a complement of A")
    return LiePair(L, A_rows, j_rows)


def check_matched_pair(p):
    """True iff image(j) is a subalgebra, so L = A + B is a matched pair."""
    q = p.q
    for b1 in range(q):
        for b2 in range(b1 + 1, q):
            if any(p.cad[b1][b2][q:]):
                return False
    return True


# -- modules and cochains --------------------------------------------------

class AModule:
    """Representation of A: one matrix per A basis vector (acting on columns)."""

    def __init__(self, a_consts, action, dim, check=True):
        self.a_consts = a_consts
        self.action = action
        self.dim = dim
        self.r = len(a_consts)
        if check:
            bad = flatness_defects(self)
            if bad:
                raise AssertionError(f"action is not flat: {bad[0]}")

    def act(self, alpha, v):
        return matvec(self.action[alpha], v)


def flatness_defects(m):
    out = []
    for a in range(m.r):
        for b in range(a + 1, m.r):
            lhs = zeros(m.dim, m.dim)
            for g, c in enumerate(m.a_consts[a][b]):
                if c:
                    for i in range(m.dim):
                        for k in range(m.dim):
                            lhs[i][k] += c * m.action[g][i][k]
            ab = matmul(m.action[a], m.action[b])
            ba = matmul(m.action[b], m.action[a])
            for i in range(m.dim):
                for k in range(m.dim):
                    if lhs[i][k] != ab[i][k] - ba[i][k]:
                        out.append({"a": a, "b": b, "entry": [i, k],
                                    "value": lhs[i][k] - ab[i][k] + ba[i][k]})
    return out


def bott_action(p):
    """A acting on E = L/A by a . b = pr[a, j(b)]."""
    q, r = p.q, p.r
    action = []
    for a in range(r):
        m = zeros(q, q)
        for b in range(q):
            col = p.cad[q + a][b]
            for b2 in range(q):
                m[b2][b] = col[b2]
        action.append(m)
    return AModule(p.a_constants(), action, q)


def trivial_module(a_consts, dim=1):
    r = len(a_consts)
    return AModule(a_consts, [zeros(dim, dim) for _ in range(r)], dim)


def tensor_module(m1, m2):
    """m1 (x) m2 with a acting by rho1(a) (x) 1 + 1 (x) rho2(a); index i1*dim2 + i2."""
    d1, d2 = m1.dim, m2.dim
    action = []
    for a in range(m1.r):
        x = zeros(d1 * d2, d2 * d1)
        r1, r2 = m1.action[a], m2.action[a]
        for i1 in range(d1):
            for i2 in range(d2):
                row = i1 * d2 + i2
                for k1 in range(d1):
                    if r1[i1][k1]:
                        x[row][k1 * d2 + i2] += r1[i1][k1]
                for k2 in range(d2):
                    if r2[i2][k2]:
                        x[row][i1 * d2 + k2] += r2[i2][k2]
        action.append(x)
    return AModule(m1.a_consts, action, d1 * d2)


def hom_keys(q, k, symmetric):
    return sym_index(q, k) if symmetric else list(product(range(q), repeat=k))


def hom_act(rho, T, q, symmetric):
    """(a.T)(m) = rho T(m) - sum_t T(.., rho m_t, ..) for T: E^k -> E as a dict."""
    out = {}
    for key, val in T.items():
        rv = matvec(rho, val)
        if any(rv):
            out[key] = [x + y for x, y in zip(out.get(key, [ZERO] * q), rv)]
    # substitution terms: T(.., rho e_i, ..) picks up T at keys reached by replacing
    keys = list(T.keys())
    k = len(keys[0]) if keys else 0
    for key in hom_keys(q, k, symmetric):
        acc = [ZERO] * q
        hit = False
        for t in range(k):
            col = key[t]
            for c in range(q):
                w = rho[c][col]
                if not w:
                    continue
                sub = key[:t] + (c,) + key[t + 1:]
                if symmetric:
                    sub = tuple(sorted(sub))
                val = T.get(sub)
                if val is None:
                    continue
                hit = True
                for o in range(q):
                    acc[o] -= w * val[o]
        if hit:
            cur = out.get(key, [ZERO] * q)
            out[key] = [x + y for x, y in zip(cur, acc)]
    return {kk: v for kk, v in out.items() if any(v)}


def hom_module(m, k, symmetric):
    """Module Hom(E^k, E) (or Hom(S^k E, E)) induced from an action on E.

    Flat index of a tensor component is ``key_index * q + out``.
    """
    q = m.dim
    keys = hom_keys(q, k, symmetric)
    dim = len(keys) * q
    action = []
    for a in range(m.r):
        x = zeros(dim, dim)
        for ki, key in enumerate(keys):
            for o in range(q):
                unit = [ZERO] * q
                unit[o] = ONE
                img = hom_act(m.action[a], {key: unit}, q, symmetric)
                col = ki * q + o
                for kk, v in img.items():
                    kj = keys.index(kk)
                    for o2 in range(q):
                        if v[o2]:
                            x[kj * q + o2][col] += v[o2]
        action.append(x)
    mod = AModule(m.a_consts, action, dim)
    mod.keys = keys
    return mod


def hom_to_vec(T, keys, q):
    v = [ZERO] * (len(keys) * q)
    for ki, key in enumerate(keys):
        val = T.get(key)
        if val:
            for o in range(q):
                v[ki * q + o] = val[o]
    return v


def vec_to_hom(v, keys, q):
    out = {}
    for ki, key in enumerate(keys):
        val = v[ki * q:(ki + 1) * q]
        if any(val):
            out[key] = list(val)
    return out


@dataclass
class Cochain:
    """p-cochain: ``values[i]`` is the V-vector at the i-th increasing p-tuple."""
    p: int
    values: list = field(default_factory=list)

    def vec(self):
        return [x for v in self.values for x in v]

    def is_zero(self):
        return not any(x for v in self.values for x in v)


def cochain_from_vec(v, p, r, dim):
    n = len(ext_index(r, p))
    return Cochain(p, [list(v[i * dim:(i + 1) * dim]) for i in range(n)])


def zero_cochain(p, r, dim):
    return Cochain(p, [[ZERO] * dim for _ in ext_index(r, p)])


def _eval(omega, index_of, args, dim):
    """omega on an arbitrary tuple of A basis indices (alternating)."""
    s = perm_sign(args)
    if not s:
        return None
    v = omega.values[index_of[tuple(sorted(args))]]
    return v if s > 0 else [-x for x in v]


def ce_differential(m, c):
    """(d w)(a_0..a_p) = sum_i (-1)^i a_i.w(..^i..) + sum_{i<j} (-1)^(i+j) w([a_i,a_j], ..)."""
    p, r, dim = c.p, m.r, m.dim
    if p + 1 > r:
        return Cochain(p + 1, [])
    index_of = {t: i for i, t in enumerate(ext_index(r, p))}
    out = []
    for J in ext_index(r, p + 1):
        acc = [ZERO] * dim
        for i in range(p + 1):
            rest = J[:i] + J[i + 1:]
            w = c.values[index_of[rest]]
            if any(w):
                aw = m.act(J[i], w)
                sg = -1 if i % 2 else 1
                for o in range(dim):
                    acc[o] += sg * aw[o]
        for i in range(p + 1):
            for k in range(i + 1, p + 1):
                rest = J[:i] + J[i + 1:k] + J[k + 1:]
                sg = -1 if (i + k) % 2 else 1
                for g, cg in enumerate(m.a_consts[J[i]][J[k]]):
                    if not cg:
                        continue
                    w = _eval(c, index_of, (g,) + rest, dim)
                    if w is None:
                        continue
                    for o in range(dim):
                        acc[o] += sg * cg * w[o]
        out.append(acc)
    return Cochain(p + 1, out)


def ce_matrix(m, p):
    """Matrix of d_A from C^p to C^(p+1) in flat coordinates."""
    r, dim = m.r, m.dim
    n_in = len(ext_index(r, p)) * dim
    n_out = len(ext_index(r, p + 1)) * dim if p + 1 <= r else 0
    mat = zeros(n_out, n_in)
    for col in range(n_in):
        e = [ZERO] * n_in
        e[col] = ONE
        img = ce_differential(m, cochain_from_vec(e, p, r, dim)).vec()
        for row, x in enumerate(img):
            mat[row][col] = x
    return mat


class Cohomology:
    """H^p(A; V) with representatives and class coordinates."""

    def __init__(self, m, p):
        self.module = m
        self.p = p
        r, dim = m.r, m.dim
        if p < 0 or p > r:
            self.dim = 0
            self.reps = []
            self.image = []
            self.n = 0
            return
        self.n = len(ext_index(r, p)) * dim
        d_here = ce_matrix(m, p)
        ker = kernel_basis(d_here, self.n) if d_here else [
            [ONE if i == k else ZERO for i in range(self.n)] for k in range(self.n)]
        if p > 0:
            d_prev = ce_matrix(m, p - 1)
            cols = transpose(d_prev, len(d_prev[0]) if d_prev else 0)
            image = [cols[i] for i in _independent_rows(cols, self.n)] if cols else []
        else:
            image = []
        self.image = image
        reps = []
        cur = list(image)
        for v in ker:
            if rank(cur + [v], self.n) > len(cur):
                cur.append(v)
                reps.append(v)
        self.reps = reps
        self.dim = len(reps)
        # columns: reps then image vectors
        self._basis = reps + image

    def rep_cochains(self):
        m = self.module
        return [cochain_from_vec(v, self.p, m.r, m.dim) for v in self.reps]

    def is_exact(self, c):
        v = c.vec() if isinstance(c, Cochain) else c
        if not any(v):
            return True
        if not self.image:
            return False
        return solve(transpose(self.image, self.n), v) is not None

    def coords(self, c):
        """Coordinates of a cocycle's class on the representative basis."""
        v = c.vec() if isinstance(c, Cochain) else c
        if not self._basis:
            if any(v):
                raise ValueError("not a cocycle")
            return []
        x = solve(transpose(self._basis, self.n), v)
        if x is None:
            raise ValueError("not a cocycle")
        return x[:self.dim]


def _independent_rows(rows, n):
    keep = []
    cur = []
    for i, row in enumerate(rows):
        if rank(cur + [row], n) > len(cur):
            cur.append(row)
            keep.append(i)
    return keep


def cohomology(m, p):
    """(dim H^p, representative cochains)."""
    h = Cohomology(m, p)
    return h.dim, h.rep_cochains()
