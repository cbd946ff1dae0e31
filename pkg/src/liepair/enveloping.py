"""Truncated U(L), the quotient U(L)/U(L)A, the recursive PBW map and the
A-action it transports onto S(E).

Generators of U(L) are the adapted basis of a pair: indices 0..q-1 are the
splitting j(E), q..n-1 span A. A normal-ordered monomial is a sorted index
tuple, so every A letter sits at its right end and U(L)A is spanned by the
monomials that contain one. Elements are ``{monomial: Fraction}`` dicts;
Q-elements are keyed by pure-E monomials, as are elements of S(E).
"""

from fractions import Fraction
from itertools import permutations
from math import factorial

from . import kernels
from .algebra import (
    ONE, ZERO, add_into, deconcatenate, rank, sym_dim_upto, sym_index,
    sym_index_upto, sym_mul,
)


class PBWFalsified(ArithmeticError):
    """The PBW map failed to be a filtered isomorphism."""


def _brackets_table(consts):
    n = len(consts)
    return [[[(l, Fraction(c)) for l, c in enumerate(consts[k][i]) if c] for i in range(n)]
            for k in range(n)]


class TruncatedEnveloping:
    """U(L) in normal-ordered monomials, up to filtration degree N."""

    def __init__(self, consts, N, names=None):
        self.n = len(consts)
        self.N = N
        self.names = names or [f"x{i}" for i in range(self.n)]
        self.brackets = _brackets_table(consts)
        self._cache = {}

    def left_mul(self, k, mono):
        return kernels.left_mul(k, mono, self.brackets, self._cache)

    def gen_times(self, k, el):
        out = {}
        for m, c in el.items():
            add_into(out, self.left_mul(k, m), c)
        return out

    def vec_times(self, y, el):
        """(sum_k y_k x_k) * el."""
        out = {}
        for k, yk in enumerate(y):
            if yk:
                add_into(out, self.gen_times(k, el), yk)
        return out

    def normal_form(self, word):
        el = {(): ONE}
        for k in reversed(word):
            el = self.gen_times(k, el)
        return el

    def mul(self, u, v):
        out = {}
        for m, c in u.items():
            add_into(out, self.normal_form_times(m, v), c)
        return out

    def normal_form_times(self, word, el):
        for k in reversed(word):
            el = self.gen_times(k, el)
        return el

    def basis(self, N=None):
        return sym_index_upto(self.n, self.N if N is None else N)

    def dimension(self, N=None):
        return len(self.basis(N))


def overlap_defects(env):
    """Diamond-lemma overlaps x_k x_j x_i (k > j > i) reduced both ways."""
    out = []
    n = env.n
    for k in range(n):
        for j in range(k):
            for i in range(j):
                left = env.mul(env.normal_form((k, j)), {(i,): ONE})
                right = env.mul({(k,): ONE}, env.normal_form((j, i)))
                diff = add_into(dict(left), right, -ONE)
                if diff:
                    out.append({"overlap": [k, j, i], "defect": diff})
    return out


def build_enveloping(consts, N, names=None):
    """Truncated enveloping algebra; rewriting confluence is asserted."""
    if N < 0:
        raise ValueError("truncation degree must be non-negative")
    env = TruncatedEnveloping(consts, N, names)
    bad = overlap_defects(env)
    if bad:
        raise AssertionError(f"rewriting is not confluent: {bad[0]}")
    return env


class QuotientCoalgebra:
    """Q_N = U(L)^{<=N} / (U(L)A)^{<=N} with the descended coproduct."""

    def __init__(self, pair, env, N, check=True):
        self.pair = pair
        self.env = env
        self.N = N
        self.q = pair.q
        self.basis = sym_index_upto(self.q, N)
        if check:
            self._check_cokernel()
            self._check_coproduct()

    def _ideal_rows(self):
        q, n, N = self.q, self.env.n, self.N
        rows = []
        for u in self.env.basis(N - 1) if N >= 1 else []:
            for a in range(q, n):
                rows.append(self.env.normal_form(u + (a,)))
        return rows

    def _check_cokernel(self):
        q, N = self.q, self.N
        ubasis = self.env.basis(N)
        index = {m: i for i, m in enumerate(ubasis)}
        rows = self._ideal_rows()
        for el in rows:
            for m in el:
                if all(x < q for x in m):
                    raise AssertionError(f"left ideal meets the j-monomials at {m}")
        mat = [[ZERO] * len(ubasis) for _ in rows]
        for r, el in enumerate(rows):
            for m, c in el.items():
                mat[r][index[m]] = c
        ideal_dim = rank(mat, len(ubasis)) if rows else 0
        if len(ubasis) - ideal_dim != sym_dim_upto(q, N):
            raise AssertionError("dim Q_N differs from dim S^{<=N}(E)")
        self.ideal_dim = ideal_dim

    def _check_coproduct(self):
        for el in self._ideal_rows():
            acc = {}
            for m, c in el.items():
                for (l, r), k in deconcatenate(m).items():
                    if all(x < self.q for x in l) and all(x < self.q for x in r):
                        acc[(l, r)] = acc.get((l, r), ZERO) + c * k
            if any(acc.values()):
                raise AssertionError("coproduct does not descend to the quotient")

    def cls(self, u):
        """Class of an element of U(L)."""
        q = self.q
        return {m: c for m, c in u.items() if all(x < q for x in m)}

    def lmul(self, k, qel):
        """x_k . [qel] for an adapted generator index k."""
        return self.cls(self.env.gen_times(k, qel))

    def lmul_vec(self, y, qel):
        return self.cls(self.env.vec_times(y, qel))

    @staticmethod
    def coproduct(qel):
        out = {}
        for m, c in qel.items():
            add_into(out, deconcatenate(m), c)
        return out


def build_quotient(pair, env, N, check=True):
    if env.N < N + 1:
        raise ValueError("enveloping truncation must be at least N + 1")
    return QuotientCoalgebra(pair, env, N, check)


def derivation_action(mat, mono):
    """Matrix ``mat`` on E extended to S(E) as a derivation, on one monomial."""
    out = {}
    q = len(mat)
    for t, b in enumerate(mono):
        rest = mono[:t] + mono[t + 1:]
        for c in range(q):
            w = mat[c][b]
            if w:
                key = sym_mul(rest, (c,))
                v = out.get(key, ZERO) + w
                if v:
                    out[key] = v
                else:
                    out.pop(key)
    return out


def derivation_apply(mat, el):
    out = {}
    for m, c in el.items():
        add_into(out, derivation_action(mat, m), c)
    return out


class PBW:
    """PBW: S^{<=N}(E) -> Q_N for a pair, extended connection and truncation N.

    Basis images come from the power recursion polarized over the factors:
    PBW(b_1...b_n) = 1/n sum_t ( j(b_t) PBW(rest) - PBW(nabla_{j(b_t)} rest) ).
    """

    def __init__(self, pair, nabla, N, env=None, check=True):
        if N < 0:
            raise ValueError("truncation degree must be non-negative")
        self.pair = pair
        self.nabla = nabla
        self.N = N
        self.q = q = pair.q
        names = None
        if env is None or env.N < N + 1:
            env = build_enveloping(pair.cad, N + 1, names)
        self.env = env
        self.Q = build_quotient(pair, env, N, check=check)
        self.basis = sym_index_upto(q, N)
        self.images = {(): {(): ONE}}
        for deg in range(1, N + 1):
            for m in sym_index(q, deg):
                self.images[m] = self._image(m)
        self._check_symbol()
        self._delta = {}

    def _image(self, m):
        n = len(m)
        acc = {}
        Q = self.Q
        for t in range(n):
            b = m[t]
            rest = m[:t] + m[t + 1:]
            add_into(acc, Q.lmul(b, self.images[rest]))
            corr = derivation_action(self.nabla.mats[b], rest)
            add_into(acc, self.apply(corr), -ONE)
        inv = Fraction(1, n)
        return {k: v * inv for k, v in acc.items()}

    def _check_symbol(self):
        for m, img in self.images.items():
            d = len(m)
            for k, v in img.items():
                if len(k) > d or (len(k) == d and v != (ONE if k == m else ZERO)):
                    raise PBWFalsified(f"PBW({m}) has symbol term {k}: {v}")

    def apply(self, s):
        """PBW of a symmetric element (dict over monomials)."""
        out = {}
        for m, c in s.items():
            if len(m) > self.N:
                raise OverflowError(f"degree {len(m)} exceeds truncation {self.N}")
            add_into(out, self.images[m], c)
        return out

    def inverse(self, qel):
        """Exact inverse, peeling off top-degree terms (identity symbol)."""
        rem = dict(qel)
        out = {}
        while rem:
            d = max(len(m) for m in rem)
            if d > self.N:
                raise OverflowError(f"degree {d} exceeds truncation {self.N}")
            top = [(m, c) for m, c in rem.items() if len(m) == d]
            for m, c in top:
                out[m] = out.get(m, ZERO) + c
                add_into(rem, self.images[m], -c)
        return {m: c for m, c in out.items() if c}

    def power(self, b, n):
        """PBW(b^n) by the recursion on powers, for an E vector b."""
        if n > self.N:
            raise OverflowError(f"degree {n} exceeds truncation {self.N}")
        p = self.pair
        jy = list(b) + [ZERO] * p.r
        nab = self.nabla.op_adapted(jy)
        cur = {(): ONE}
        bpow = {(): ONE}
        bvec = {(i,): Fraction(x) for i, x in enumerate(b) if x}
        for _ in range(n):
            nxt = self.Q.lmul_vec(jy, cur)
            add_into(nxt, self.apply(derivation_apply(nab, bpow)), -ONE)
            cur = nxt
            bpow = _sym_times(bpow, bvec)
        return cur

    def matrix(self):
        """Columns = PBW images of the S^{<=N} basis in the Q_N basis."""
        idx = {m: i for i, m in enumerate(self.basis)}
        mat = [[ZERO] * len(self.basis) for _ in self.basis]
        for j, m in enumerate(self.basis):
            for k, v in self.images[m].items():
                mat[idx[k]][j] = v
        return mat

    def degree_block(self, d):
        """Top-degree part of PBW on S^d (the symbol); identity when filtered."""
        basis = sym_index(self.q, d)
        idx = {m: i for i, m in enumerate(basis)}
        mat = [[ZERO] * len(basis) for _ in basis]
        for j, m in enumerate(basis):
            for k, v in self.images[m].items():
                if len(k) == d:
                    mat[idx[k]][j] = v
        return mat

    # transported action --------------------------------------------------

    def delta(self, alpha, s):
        """delta_a = PBW^-1 o (left multiplication by a) o PBW on S^{<=N}."""
        out = {}
        for m, c in s.items():
            key = (alpha, m)
            img = self._delta.get(key)
            if img is None:
                img = self.inverse(self.Q.lmul(self.q + alpha, self.images[m]))
                self._delta[key] = img
            add_into(out, img, c)
        return out

    def delta_vec(self, avec, s):
        out = {}
        for alpha, x in enumerate(avec):
            if x:
                add_into(out, self.delta(alpha, s), x)
        return out


def _sym_times(a, b):
    out = {}
    for m, c in a.items():
        for m2, c2 in b.items():
            k = sym_mul(m, m2)
            out[k] = out.get(k, ZERO) + c * c2
    return {k: v for k, v in out.items() if v}


def pbw_power(pbw, b, n):
    return pbw.power(b, n)


def pbw_inverse(pbw, qel):
    return pbw.inverse(qel)


def tensor_apply(f, g, el2):
    """(f (x) g) on a dict keyed by monomial pairs; f, g map monomials to dicts."""
    out = {}
    for (l, r), c in el2.items():
        fl, gr = f(l), g(r)
        for m1, c1 in fl.items():
            for m2, c2 in gr.items():
                k = (m1, m2)
                v = out.get(k, ZERO) + c * c1 * c2
                if v:
                    out[k] = v
                else:
                    out.pop(k, None)
    return out


def check_coalgebra_morphism(pbw, N=None):
    """Defects of Delta_Q PBW = (PBW (x) PBW) Delta_S and of the counit, on a basis."""
    N = pbw.N if N is None else N
    img = lambda m: pbw.images[m]
    out = []
    for m in sym_index_upto(pbw.q, N):
        lhs = QuotientCoalgebra.coproduct(pbw.images[m])
        rhs = tensor_apply(img, img, deconcatenate(m))
        diff = add_into(dict(lhs), rhs, -ONE)
        if diff:
            out.append({"check": "coproduct", "monomial": list(m), "defect": diff})
        counit = pbw.images[m].get((), ZERO)
        if counit != (ONE if not m else ZERO):
            out.append({"check": "counit", "monomial": list(m), "defect": counit})
    return out


def bott_coderivation(bott, alpha, s):
    return derivation_apply(bott.action[alpha], s)


def action_intertwining_defect(pbw, bott, alpha):
    """delta_a minus the Bott derivation, per basis monomial (zero entries dropped)."""
    out = {}
    for m in pbw.basis:
        d = add_into(dict(pbw.delta(alpha, {m: ONE})), derivation_action(bott.action[alpha], m), -ONE)
        if d:
            out[m] = d
    return out


def transported_action_defects(pbw):
    """Exhaustive check of the transported A-action on S^{<=N}(E).

    delta(1) = 0, no constant term and no degree increase, co-Leibniz rule
    against deconcatenation, and flatness delta_[a,b] = [delta_a, delta_b].
    """
    out = []
    r = pbw.pair.r
    basis = pbw.basis
    for a in range(r):
        one = pbw.delta(a, {(): ONE})
        if one:
            out.append({"check": "unit", "a": a, "defect": one})
        for m in basis:
            img = pbw.delta(a, {m: ONE})
            for k in img:
                if len(k) > len(m):
                    out.append({"check": "filtration", "a": a, "monomial": list(m), "term": list(k)})
                if m and not k:
                    out.append({"check": "augmentation", "a": a, "monomial": list(m)})
            lhs = QuotientCoalgebra.coproduct(img)
            dl = lambda x, a=a: pbw.delta(a, {x: ONE})
            ident = lambda x: {x: ONE}
            cop = deconcatenate(m)
            rhs = tensor_apply(dl, ident, cop)
            add_into(rhs, tensor_apply(ident, dl, cop))
            diff = add_into(dict(lhs), rhs, -ONE)
            if diff:
                out.append({"check": "coderivation", "a": a, "monomial": list(m), "defect": diff})
    consts = pbw.pair.a_constants()
    for a in range(r):
        for b in range(a + 1, r):
            for m in basis:
                s = {m: ONE}
                lhs = pbw.delta_vec(consts[a][b], s)
                ab = pbw.delta(a, pbw.delta(b, s))
                ba = pbw.delta(b, pbw.delta(a, s))
                diff = add_into(add_into(dict(lhs), ab, -ONE), ba)
                if diff:
                    out.append({"check": "flatness", "a": a, "b": b, "monomial": list(m), "defect": diff})
    return out


def symmetrization(env, mono):
    """(1/n!) sum over orderings of the word, in normal form (abelian-B oracle helper)."""
    out = {}
    perms = list(permutations(range(len(mono))))
    for p in perms:
        add_into(out, env.normal_form(tuple(mono[i] for i in p)))
    f = Fraction(1, factorial(len(mono)))
    return {k: v * f for k, v in out.items()}
