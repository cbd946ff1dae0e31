"""Kapranov tensors R_k, L-infinity[1] multibrackets on (wedge A*) (x) E, and the
identities they satisfy.

Conventions:

* an element of wedge^p A* (x) E has degree p; basis keys are ``(I, b, c)``
  with I an increasing tuple of A indices, b an E index and c an index of the
  coefficient algebra (0 for the rationals);
* forms are evaluated with the determinant convention, a^I(a_I) = 1;
* R_k(a; m) is the raw S^k -> S^1 Taylor coefficient of delta_a on the
  monomial m, with no combinatorial prefactor.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product

from .algebra import (
    ONE, ZERO, add_into, ext_index, koszul_sign, perm_sign, set_partitions,
    shuffles, solve, sym_index, sym_index_upto, sym_mul, sym_product, transpose,
    deconcatenate, matmul,
)
from .enveloping import PBW, QuotientCoalgebra, tensor_apply
from .liealg import (
    AModule, Cochain, Cohomology, bott_action, ce_differential, ce_matrix,
    check_matched_pair, flatness_defects, hom_module, hom_to_vec, tensor_module, vec_to_hom,
)


class KapranovError(ValueError):
    pass


def _vadd(u, v, s=ONE):
    return [x + s * y for x, y in zip(u, v)]


def _evec(d, q):
    """Degree-one part of a symmetric element as an E vector."""
    v = [ZERO] * q
    for m, c in d.items():
        if len(m) == 1:
            v[m[0]] += c
    return v


class KapranovStructure:
    """Bott action plus R_k for 2 <= k <= N.

    ``R[k][a]`` maps each degree-k monomial of E to the E vector R_k(a; m).
    """

    def __init__(self, pair, nabla, N, pbw, bott, R):
        self.pair = pair
        self.nabla = nabla
        self.N = N
        self.pbw = pbw
        self.bott = bott
        self.R = R
        self.q = pair.q
        self.r = pair.r

    def value(self, k, a, args):
        """R_k(a; args) for a list of E basis indices."""
        if k == 1:
            return [self.bott.action[a][o][args[0]] for o in range(self.q)]
        return self.R[k][a].get(tuple(sorted(args)), [ZERO] * self.q)

    def value_vecs(self, k, a, vecs):
        """R_k(a; v_1, ..., v_k) for E vectors, multilinearly."""
        out = [ZERO] * self.q
        terms = [((), ONE)]
        for v in vecs:
            terms = [(t + (i,), c * x) for t, c in terms for i, x in enumerate(v) if x]
        for t, c in terms:
            out = _vadd(out, self.value(k, a, list(t)), c)
        return out

    def is_zero(self):
        return not any(any(v) for k in self.R for per in self.R[k] for v in per.values())

    def hom(self, k, a):
        """R_k(a) as a dict-tensor on monomials."""
        return {m: list(v) for m, v in self.R[k][a].items() if any(v)}


def extract(pair, nabla, N, pbw=None):
    """Kapranov tensors from the PBW-transported A-action."""
    if pbw is None or pbw.N < N:
        pbw = PBW(pair, nabla, N)
    q, r = pair.q, pair.r
    bott = bott_action(pair)
    for a in range(r):
        for b in range(q):
            got = _evec(pbw.delta(a, {(b,): ONE}), q)
            want = [bott.action[a][o][b] for o in range(q)]
            if got != want:
                raise AssertionError("unary part of the transported action is not Bott")
    R = {}
    for k in range(2, N + 1):
        R[k] = []
        for a in range(r):
            table = {}
            for m in sym_index(q, k):
                table[m] = _evec(pbw.delta(a, {m: ONE}), q)
            R[k].append(table)
    return KapranovStructure(pair, nabla, N, pbw, bott, R)


def coderivation_from_taylor(K, a, mono):
    """sum over nonempty position subsets S of D_|S|(m_S) . m_(rest)."""
    out = {}
    n = len(mono)
    for k in range(1, n + 1):
        for pos in combinations(range(n), k):
            ps = set(pos)
            sub = [mono[i] for i in pos]
            rest = tuple(mono[i] for i in range(n) if i not in ps)
            v = K.value(k, a, sub)
            for c, x in enumerate(v):
                if x:
                    key = sym_mul(rest, (c,))
                    out[key] = out.get(key, ZERO) + x
    return {m: c for m, c in out.items() if c}


def reconstruction_defects(K):
    """Coderivation rebuilt from {Bott, R_k} against the transported delta_a."""
    out = []
    for a in range(K.r):
        for m in sym_index_upto(K.q, K.N):
            got = coderivation_from_taylor(K, a, m)
            want = K.pbw.delta(a, {m: ONE})
            diff = add_into(dict(got), want, -ONE)
            if diff:
                out.append({"a": a, "monomial": list(m), "defect": diff})
    return out


# -- forms -------------------------------------------------------------------

def wedge(*index_tuples):
    """(sign, sorted tuple) of a^I1 ^ a^I2 ^ ...; sign 0 on repeats."""
    seq = [i for t in index_tuples for i in t]
    s = perm_sign(seq)
    return s, tuple(sorted(seq))


# -- coefficient algebras ---------------------------------------------------

class CoefficientAlgebraError(ValueError):
    def __init__(self, axiom, instance):
        self.axiom = axiom
        self.instance = instance
        super().__init__(f"{axiom} fails at {instance}")


class CoefficientAlgebra:
    """Finite-dimensional commutative associative algebra with an A-action.

    ``mult[i][j]`` is the product of basis elements i, j as a vector;
    ``action[a]`` is a matrix acting on coordinate columns.
    """

    def __init__(self, mult, unit, action, a_consts, check=True):
        self.dim = len(mult)
        self.mult = [[[Fraction(x) for x in v] for v in row] for row in mult]
        self.unit = [Fraction(x) for x in unit]
        self.action = [[[Fraction(x) for x in row] for row in m] for m in action]
        self.a_consts = a_consts
        if check:
            self.validate()

    @classmethod
    def rationals(cls, a_consts):
        r = len(a_consts)
        return cls([[[ONE]]], [ONE], [[[ZERO]] for _ in range(r)], a_consts)

    @classmethod
    def dual_numbers(cls, a_consts, action=None):
        """Q[eps]/(eps^2) on the basis (1, eps); trivial action unless given."""
        r = len(a_consts)
        mult = [[[1, 0], [0, 1]], [[0, 1], [0, 0]]]
        if action is None:
            action = [[[0, 0], [0, 0]] for _ in range(r)]
        return cls(mult, [1, 0], action, a_consts)

    def times(self, u, v):
        out = [ZERO] * self.dim
        for i, x in enumerate(u):
            if not x:
                continue
            for j, y in enumerate(v):
                if y:
                    out = _vadd(out, self.mult[i][j], x * y)
        return out

    def act(self, a, v):
        m = self.action[a]
        return [sum((m[i][k] * v[k] for k in range(self.dim)), ZERO) for i in range(self.dim)]

    def module(self):
        return AModule(self.a_consts, self.action, self.dim, check=False)

    def validate(self):
        d = self.dim
        e = [[ONE if i == k else ZERO for i in range(d)] for k in range(d)]
        for i in range(d):
            for j in range(d):
                if self.times(e[i], e[j]) != self.times(e[j], e[i]):
                    raise CoefficientAlgebraError("commutativity", (i, j))
                for k in range(d):
                    if self.times(self.times(e[i], e[j]), e[k]) != self.times(e[i], self.times(e[j], e[k])):
                        raise CoefficientAlgebraError("associativity", (i, j, k))
            if self.times(self.unit, e[i]) != e[i]:
                raise CoefficientAlgebraError("unit", (i,))
        for a in range(len(self.action)):
            for i in range(d):
                for j in range(d):
                    lhs = self.act(a, self.times(e[i], e[j]))
                    rhs = _vadd(self.times(self.act(a, e[i]), e[j]), self.times(e[i], self.act(a, e[j])))
                    if lhs != rhs:
                        raise CoefficientAlgebraError("derivation", (a, i, j))
        bad = flatness_defects(AModule(self.a_consts, self.action, d, check=False))
        if bad:
            raise CoefficientAlgebraError("flatness", bad[0])


# -- the L-infinity[1] algebra ------------------------------------------------

class TruncationOverflow(KapranovError):
    pass


class LinftyAlgebra:
    """Multibrackets lambda_k on (wedge A*) (x) E (x) C.

    lambda_1 is the CE differential of E (x) C; for k >= 2,
    lambda_k(x_1 e_1, ..., x_k e_k) = (-1)^(|x_1|+...+|x_k|) x_1^...^x_k^R_k(e_1..e_k),
    extended C-multilinearly.
    """

    def __init__(self, K, coeff=None):
        self.K = K
        self.coeff = coeff if coeff is not None else CoefficientAlgebra.rationals(K.pair.a_constants())
        self.q, self.r = K.q, K.r
        self.dc = self.coeff.dim
        self.module = tensor_module(K.bott, self.coeff.module()) if self.r else None
        self._ext = {p: {t: i for i, t in enumerate(ext_index(self.r, p))} for p in range(self.r + 1)}

    def basis(self, p=None):
        degs = range(self.r + 1) if p is None else [p]
        return [(I, b, c) for d in degs for I in ext_index(self.r, d)
                for b in range(self.q) for c in range(self.dc)]

    @staticmethod
    def degree(key):
        return len(key[0])

    # lambda_1 --------------------------------------------------------------
    def _to_cochains(self, x):
        by_p = {}
        dim = self.q * self.dc
        for (I, b, c), v in x.items():
            p = len(I)
            if p not in by_p:
                by_p[p] = Cochain(p, [[ZERO] * dim for _ in ext_index(self.r, p)])
            by_p[p].values[self._ext[p][I]][b * self.dc + c] += v
        return by_p

    def _from_cochain(self, ch):
        out = {}
        for i, I in enumerate(ext_index(self.r, ch.p)):
            for idx, v in enumerate(ch.values[i]):
                if v:
                    out[(I, idx // self.dc, idx % self.dc)] = v
        return out

    def d(self, x):
        if not self.r:
            return {}
        out = {}
        for ch in self._to_cochains(x).values():
            add_into(out, self._from_cochain(ce_differential(self.module, ch)))
        return out

    # lambda_k --------------------------------------------------------------
    def lam(self, k, args):
        if len(args) != k:
            raise ValueError("arity mismatch")
        if k == 1:
            return self.d(args[0])
        if k > self.K.N:
            raise TruncationOverflow(f"lambda_{k} needs R_{k} beyond truncation {self.K.N}")
        out = {}
        terms = [((), ONE)]
        for x in args:
            terms = [(t + (key,), c * v) for t, c in terms for key, v in x.items()]
        for t, c in terms:
            add_into(out, self._lam_basis(k, t), c)
        return out

    def _lam_basis(self, k, keys):
        forms = [key[0] for key in keys]
        sign = -1 if sum(len(I) for I in forms) % 2 else 1
        cprod = None
        for key in keys:
            e = [ONE if i == key[2] else ZERO for i in range(self.dc)]
            cprod = e if cprod is None else self.coeff.times(cprod, e)
        if not any(cprod):
            return {}
        es = [key[1] for key in keys]
        out = {}
        for a in range(self.r):
            s, J = wedge(*forms, (a,))
            if not s:
                continue
            val = self.K.value(k, a, es)
            for o, x in enumerate(val):
                if not x:
                    continue
                for ci, y in enumerate(cprod):
                    if y:
                        key = (J, o, ci)
                        out[key] = out.get(key, ZERO) + sign * s * x * y
        return {kk: v for kk, v in out.items() if v}

    def jacobi_defect(self, args):
        """sum_k sum_(k, n-k)-shuffles eps * lambda_(n-k+1)(lambda_k(..), ..) for homogeneous args."""
        n = len(args)
        degs = [_homog_degree(x) for x in args]
        out = {}
        for k in range(1, n + 1):
            for sigma in shuffles(k, n - k):
                eps = koszul_sign(sigma, degs)
                inner = self.lam(k, [args[i] for i in sigma[:k]])
                if not inner:
                    continue
                outer = self.lam(n - k + 1, [inner] + [args[i] for i in sigma[k:]])
                add_into(out, outer, Fraction(eps))
        return out


def _homog_degree(x):
    degs = {len(k[0]) for k in x}
    if len(degs) > 1:
        raise ValueError("argument is not homogeneous")
    return degs.pop() if degs else 0


def multibracket(K, k, args, coeff=None):
    return LinftyAlgebra(K, coeff).lam(k, args)


def jacobi_defect(K, n, args, coeff=None):
    if len(args) != n:
        raise ValueError("need n arguments")
    return LinftyAlgebra(K, coeff).jacobi_defect(args)


def exhaustive_jacobi(K, n, coeff=None, basis=None):
    """Every basis-argument n-tuple; returns the first failures (empty when exact)."""
    alg = LinftyAlgebra(K, coeff)
    basis = alg.basis() if basis is None else basis
    fails = []
    count = 0
    for tup in product(basis, repeat=n):
        count += 1
        d = alg.jacobi_defect([{key: ONE} for key in tup])
        if d:
            fails.append({"args": [list(map(_jsonable, key)) for key in tup], "defect": d})
            if len(fails) >= 5:
                break
    return fails, count


def _jsonable(x):
    return list(x) if isinstance(x, tuple) else x


def multilinearity_defects(K, k, samples, rng):
    """lambda_k(.., xi x, ..) against +-xi lambda_k(.., x, ..) on random basis data."""
    alg = LinftyAlgebra(K)
    basis = alg.basis()
    r = K.r
    out = []
    for _ in range(samples):
        keys = [rng.choice(basis) for _ in range(k)]
        t = rng.randrange(k)
        xi = tuple(sorted(rng.sample(range(r), rng.randint(0, r)))) if r else ()
        I, b, c = keys[t]
        s, J = wedge(xi, I)
        if not s:
            continue
        moved = list(keys)
        moved[t] = (J, b, c)
        lhs = alg.lam(k, [{moved[i]: (Fraction(s) if i == t else ONE)} for i in range(k)])
        base = alg.lam(k, [{key: ONE} for key in keys])
        # xi passes lambda (degree 1) and the preceding arguments
        pre = sum(len(keys[i][0]) for i in range(t))
        sign = -1 if (len(xi) * (1 + pre)) % 2 else 1
        rhs = {}
        for (L_, o, ci), v in base.items():
            s2, J2 = wedge(xi, L_)
            if s2:
                key = (J2, o, ci)
                rhs[key] = rhs.get(key, ZERO) + sign * s2 * v
        rhs = {kk: v for kk, v in rhs.items() if v}
        if add_into(dict(lhs), rhs, -ONE):
            out.append({"keys": keys, "slot": t, "form": list(xi)})
    return out


# -- formal vector fields ---------------------------------------------------

class FormalVectorField:
    """Sum of terms a^I (x) X with X in S^k(E*) (x) E.

    ``terms[(I, m)]`` is the E vector X(m) for an increasing form index I and
    a degree-k monomial m.
    """

    def __init__(self, terms=None, q=0, overflow=False):
        self.terms = {k: list(v) for k, v in (terms or {}).items() if any(v)}
        self.q = q
        self.overflow = overflow

    def __add__(self, other):
        t = {k: list(v) for k, v in self.terms.items()}
        for k, v in other.terms.items():
            t[k] = _vadd(t.get(k, [ZERO] * self.q), v)
        return FormalVectorField(t, self.q, self.overflow or other.overflow)

    def scale(self, c):
        return FormalVectorField({k: [c * x for x in v] for k, v in self.terms.items()}, self.q, self.overflow)

    def components(self):
        """{(I, arity): {m: vector}}."""
        out = {}
        for (I, m), v in self.terms.items():
            out.setdefault((I, len(m)), {})[m] = v
        return out

    def is_zero(self):
        return not self.terms


def compose(X, Y, i, j, q):
    """(X o Y)(m) = sum over (j, i-1)-shuffles X(Y(m_first j), m_rest), on all monomials."""
    out = {}
    n = i + j - 1
    for m in sym_index(q, n):
        acc = [ZERO] * q
        for pos in combinations(range(n), j):
            ps = set(pos)
            ym = tuple(m[t] for t in pos)
            rest = tuple(m[t] for t in range(n) if t not in ps)
            yv = Y.get(ym)
            if yv is None:
                continue
            for c, x in enumerate(yv):
                if not x:
                    continue
                xv = X.get(sym_mul(rest, (c,)))
                if xv is None:
                    continue
                acc = _vadd(acc, xv, x)
        if any(acc):
            out[m] = acc
    return out


def nr_bracket(X, Y, N=None):
    """[xi X, eta Y] = (xi ^ eta) (X o Y - Y o X); components above arity N dropped and flagged."""
    q = X.q or Y.q
    out = {}
    overflow = X.overflow or Y.overflow
    for (I, i), xt in X.components().items():
        for (J, j), yt in Y.components().items():
            s, IJ = wedge(I, J)
            if not s:
                continue
            n = i + j - 1
            if N is not None and n > N:
                overflow = True
                continue
            xy = compose(xt, yt, i, j, q)
            yx = compose(yt, xt, j, i, q)
            for m in set(xy) | set(yx):
                v = _vadd(xy.get(m, [ZERO] * q), yx.get(m, [ZERO] * q), -ONE)
                key = (IJ, m)
                out[key] = _vadd(out.get(key, [ZERO] * q), v, Fraction(s))
    return FormalVectorField(out, q, overflow)


def kapranov_field(K, ks=None):
    """R = sum_a a^a (x) R(a) as a formal vector field."""
    terms = {}
    for k in (ks if ks is not None else range(2, K.N + 1)):
        for a in range(K.r):
            for m, v in K.R[k][a].items():
                if any(v):
                    terms[((a,), m)] = list(v)
    return FormalVectorField(terms, K.q)


def maurer_cartan_defect(K, k):
    """Degree-k part of d_A R + 1/2 [R, R], keyed by (I, m) with |I| = 2."""
    if not 2 <= k <= K.N:
        raise ValueError("MC degree must lie in 2..N")
    q = K.q
    out = {}
    if K.r >= 2:
        mod = hom_module(K.bott, k, symmetric=True)
        values = [hom_to_vec(K.R[k][a], mod.keys, q) for a in range(K.r)]
        dR = ce_differential(mod, Cochain(1, values))
        for i, I in enumerate(ext_index(K.r, 2)):
            for m, v in vec_to_hom(dR.values[i], mod.keys, q).items():
                out[(I, m)] = v
    quad = FormalVectorField({}, q)
    for i in range(2, k):
        j = k + 1 - i
        if j < 2:
            continue
        quad = quad + nr_bracket(kapranov_field(K, [i]), kapranov_field(K, [j]))
    for key, v in quad.scale(Fraction(1, 2)).terms.items():
        out[key] = _vadd(out.get(key, [ZERO] * q), v)
    return {kk: v for kk, v in out.items() if any(v)}


def jacobi_mc_crosscheck(K, n):
    """Jacobi on degree-0 basis arguments against the degree-n MC component.

    The n-ary Jacobi sum on (e_1, ..., e_n) equals the MC 2-form evaluated on
    the same arguments, factor 1. Returns the list of mismatches.
    """
    alg = LinftyAlgebra(K)
    mc = maurer_cartan_defect(K, n)
    out = []
    for m in sym_index(K.q, n):
        jac = alg.jacobi_defect([{((), b, 0): ONE} for b in m])
        for I in ext_index(K.r, 2):
            for o in range(K.q):
                lhs = jac.get((I, o, 0), ZERO)
                rhs = mc.get((I, m), [ZERO] * K.q)[o]
                if lhs != rhs:
                    out.append({"monomial": list(m), "form": list(I), "component": o,
                                "jacobi": lhs, "mc": rhs})
    return out


# -- R_2 against the Atiyah cocycle ------------------------------------------

@dataclass
class R2Comparison:
    c: object              # Fraction, or None when both classes vanish
    beta: object           # 0-cochain vector in Hom(S^2 E, E)
    calibrating: bool      # True when the class is nonzero and fixes c


def sym_atiyah(alpha, q, r):
    """sym(alpha)(a; b, c) = 1/2 (alpha(a; b) c + alpha(a; c) b) on S^2 monomials."""
    half = Fraction(1, 2)
    out = []
    for a in range(r):
        t = {}
        for (b, c) in sym_index(q, 2):
            v = _vadd(alpha.value(a, b, c), alpha.value(a, c, b))
            t[(b, c)] = [half * x for x in v]
        out.append(t)
    return out


def compare_r2_atiyah(K, alpha):
    """Solve c sym(alpha) = R_2 + d_A beta; raise when no (c, beta) exists."""
    q, r = K.q, K.r
    if 2 > K.N:
        raise ValueError("need N >= 2")
    mod = hom_module(K.bott, 2, symmetric=True)
    keys = mod.keys
    sa = sym_atiyah(alpha, q, r)
    sv = [x for a in range(r) for x in hom_to_vec(sa[a], keys, q)]
    rv = [x for a in range(r) for x in hom_to_vec(K.R[2][a], keys, q)]
    d0 = ce_matrix(mod, 0)
    nb = mod.dim
    # unknowns (c, beta): c * sv - d0 beta = rv
    rows = [[sv[i]] + [-d0[i][k] for k in range(nb)] for i in range(len(sv))]
    x = solve(rows, rv, 1 + nb) if rows else [ONE]
    if x is None:
        raise KapranovError("R_2 is not cohomologous to any multiple of sym(alpha)")
    calibrating = not Cohomology(mod, 1).is_exact(sv) if sv else False
    if not calibrating:
        # both classes vanish, so c is undetermined; keep a primitive of R_2
        beta = solve([[-v for v in row] for row in d0], rv, nb) if d0 else []
        return R2Comparison(None, beta, False)
    if x[0] == 0:
        raise KapranovError("calibration constant vanished")
    return R2Comparison(x[0], x[1:], True)


# -- matched pairs -------------------------------------------------------------

def torsion_defects(pair, bmats):
    """nabla_b b' - nabla_b' b - [b, b'] on the B basis (E identified with image(j))."""
    q = pair.q
    out = []
    for b in range(q):
        for b2 in range(q):
            lhs = [bmats[b][o][b2] - bmats[b2][o][b] for o in range(q)]
            br = pair.cad[b][b2][:q]
            if lhs != br:
                out.append({"b": b, "b2": b2})
    return out


def flatness_defects_b(pair, bmats):
    q = pair.q
    out = []
    for b in range(q):
        for b2 in range(b + 1, q):
            ab = matmul(bmats[b], bmats[b2])
            ba = matmul(bmats[b2], bmats[b])
            br = pair.cad[b][b2][:q]
            for i in range(q):
                for k in range(q):
                    rhs = sum((br[g] * bmats[g][i][k] for g in range(q)), ZERO)
                    if ab[i][k] - ba[i][k] != rhs:
                        out.append({"b": b, "b2": b2, "entry": [i, k]})
    return out


NORMALIZATIONS = ("sum", "mean")


def covariant_differential(pair, bmats, T, k, normalization="sum", a_leg=True):
    """(d T)(a; b_0..b_k) = sum_i [nabla_{b_i} T(a; ..^i..) - sum_{j != i} T(a; .., nabla_{b_i} b_j, ..)
    - T(nabla_{b_i} a; ..^i..)].

    ``T[a]`` is a table on degree-k monomials. B acts on A by the A-component
    of the bracket; ``a_leg=False`` drops that term. normalization "mean"
    divides by k + 1.
    """
    if not check_matched_pair(pair):
        raise KapranovError("pair is not matched")
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"normalization must be one of {NORMALIZATIONS}")
    q, r = pair.q, pair.r
    scale = ONE if normalization == "sum" else Fraction(1, k + 1)
    out = []
    for a, table in enumerate(T):
        res = {}
        for m in sym_index(q, k + 1):
            acc = [ZERO] * q
            for i in range(k + 1):
                bi = m[i]
                rest = m[:i] + m[i + 1:]
                tv = table.get(tuple(rest))
                if tv:
                    nb = bmats[bi]
                    acc = _vadd(acc, [sum((nb[o][c] * tv[c] for c in range(q)), ZERO) for o in range(q)])
                for jj in range(k):
                    bj = rest[jj]
                    for c in range(q):
                        w = bmats[bi][c][bj]
                        if not w:
                            continue
                        sub = tuple(sorted(rest[:jj] + (c,) + rest[jj + 1:]))
                        tv2 = table.get(sub)
                        if tv2:
                            acc = _vadd(acc, tv2, -w)
                if a_leg:
                    for a2 in range(r):
                        w = pair.cad[bi][q + a][q + a2]
                        tv3 = T[a2].get(tuple(rest)) if w else None
                        if tv3:
                            acc = _vadd(acc, tv3, -w)
            if any(acc):
                res[m] = [scale * x for x in acc]
        out.append(res)
    return out


def b_connection_mats(nabla):
    q = nabla.pair.q
    return [nabla.mats[b] for b in range(q)]


def matched_recursion_check(pair, nabla, K, k, normalization="mean", a_leg=True):
    """R_{k+1} - d^nabla R_k; the connection's j-part must be flat and torsion free."""
    if not check_matched_pair(pair):
        raise KapranovError("matched recursion requested on a pair that is not matched")
    bm = b_connection_mats(nabla)
    if torsion_defects(pair, bm):
        raise KapranovError("B-connection has torsion")
    if flatness_defects_b(pair, bm):
        raise KapranovError("B-connection is not flat")
    if k + 1 > K.N:
        raise ValueError("k + 1 exceeds truncation")
    dT = covariant_differential(pair, bm, [K.R[k][a] for a in range(K.r)], k, normalization, a_leg)
    out = []
    for a in range(K.r):
        for m in sym_index(K.q, k + 1):
            lhs = K.R[k + 1][a].get(m, [ZERO] * K.q)
            rhs = dT[a].get(m, [ZERO] * K.q)
            if lhs != rhs:
                out.append({"a": a, "monomial": list(m), "R": lhs, "dR": rhs})
    return out


def calibrate_normalization(pair, nabla, K, a_leg=True):
    """The normalization under which R_3 = d R_2; None when neither works."""
    for norm in NORMALIZATIONS:
        if not matched_recursion_check(pair, nabla, K, 2, norm, a_leg):
            return norm
    return None


# -- cohomology bracket --------------------------------------------------------

@dataclass
class CohomologyBracket:
    dims: dict
    table: dict = field(default_factory=dict)   # ((p, i), (p2, j)) -> coords in H^(p+p2+1)
    well_defined: bool = True
    jacobi: bool = True
    trivial: bool = True
    failures: list = field(default_factory=list)


def cohomology_bracket(K, coeff=None):
    """Bracket on H(A; E (x) C) induced by lambda_2, with its checks."""
    alg = LinftyAlgebra(K, coeff)
    r = K.r
    if r == 0 or K.q == 0:
        return CohomologyBracket({})
    mod = alg.module
    coh = {p: Cohomology(mod, p) for p in range(r + 1)}
    dims = {p: coh[p].dim for p in coh}
    res = CohomologyBracket(dims)
    reps = {}
    for p in coh:
        for i, ch in enumerate(coh[p].rep_cochains()):
            reps[(p, i)] = alg._from_cochain(ch)
    if K.N < 2:
        return res

    def to_vec(x, p):
        chs = alg._to_cochains(x)
        ch = chs.get(p)
        return ch.vec() if ch else [ZERO] * coh[p].n if p in coh else []

    def class_of(x, p):
        if p > r:
            return []
        v = to_vec(x, p)
        dv = ce_differential(mod, Cochain(p, alg._to_cochains(x)[p].values)) if x else None
        if dv is not None and not dv.is_zero():
            raise AssertionError("bracket of cocycles is not closed")
        return coh[p].coords(v)

    for (p1, i), x in reps.items():
        for (p2, j), y in reps.items():
            z = alg.lam(2, [x, y])
            p = p1 + p2 + 1
            coords = class_of(z, p) if z else [ZERO] * (dims.get(p, 0))
            res.table[((p1, i), (p2, j))] = coords
            if any(coords):
                res.trivial = False
    # representative independence: shift x by d(w) for every basis w
    for (p1, i), x in reps.items():
        if p1 == 0:
            continue
        for w in alg.basis(p1 - 1):
            dw = alg.d({w: ONE})
            if not dw:
                continue
            for (p2, j), y in reps.items():
                diff = alg.lam(2, [dw, y])
                p = p1 + p2 + 1
                if diff and p <= r and not coh[p].is_exact(to_vec(diff, p)):
                    res.well_defined = False
                    res.failures.append({"check": "representative", "rep": [p1, i], "w": list(map(_jsonable, w))})
    # graded Jacobi on classes
    keys = list(reps)
    for a in keys:
        for b in keys:
            for c in keys:
                args = [reps[a], reps[b], reps[c]]
                degs = [a[0], b[0], c[0]]
                tot = {}
                for sigma in shuffles(2, 1):
                    eps = koszul_sign(sigma, degs)
                    inner = alg.lam(2, [args[sigma[0]], args[sigma[1]]])
                    if inner:
                        add_into(tot, alg.lam(2, [inner, args[sigma[2]]]), Fraction(eps))
                p = sum(degs) + 2
                if tot and p <= r and not coh[p].is_exact(to_vec(tot, p)):
                    res.jacobi = False
                    res.failures.append({"check": "jacobi", "classes": [list(a), list(b), list(c)]})
    return res


def tensor_coefficients(K, coeff):
    """L-infinity data on (wedge A*) (x) E (x) C; the algebra is validated first."""
    coeff.validate()
    return LinftyAlgebra(K, coeff)


# -- canonicity ------------------------------------------------------------------

def phi_apply(phi1, Phi, mono, q):
    """Coalgebra map with Taylor coefficients (phi1, Phi_k) on a monomial.

    Sum over set partitions of the positions of the product of block images.
    """
    out = {}
    for part in set_partitions(list(range(len(mono)))):
        factors = []
        ok = True
        for block in part:
            letters = tuple(sorted(mono[i] for i in block))
            if len(block) == 1:
                col = [phi1[o][letters[0]] for o in range(q)]
                v = col
            else:
                v = Phi.get(len(block), {}).get(letters)
                if v is None:
                    ok = False
                    break
            factors.append({(o,): x for o, x in enumerate(v) if x})
        if not ok:
            continue
        add_into(out, sym_product(*factors))
    return out


def phi_apply_el(phi1, Phi, el, q):
    out = {}
    for m, c in el.items():
        add_into(out, phi_apply(phi1, Phi, m, q), c)
    return out


def _delta_el(K, a, el):
    return K.pbw.delta(a, el)


def intertwining_residual(K1, K2, phi1, Phi, degree):
    """pr_E(Phi delta1_a s - delta2_a Phi s) over all a and degree-d monomials."""
    q = K1.q
    res = []
    for a in range(K1.r):
        for m in sym_index(q, degree):
            lhs = phi_apply_el(phi1, Phi, _delta_el(K1, a, {m: ONE}), q)
            rhs = _delta_el(K2, a, phi_apply(phi1, Phi, m, q))
            diff = add_into(dict(lhs), rhs, -ONE)
            res.extend(_evec(diff, q))
    return res


def basis_change(pair1, pair2):
    """E basis of pair1 in the E basis of pair2: pr2(j1(b))."""
    q = pair1.q
    cols = [pair2.pr(pair1.j([ONE if i == b else ZERO for i in range(q)])) for b in range(q)]
    return transpose(cols, q)


def structure_isomorphism(K1, K2, N=None):
    """Coalgebra isomorphism Phi of S^{<=N}(E) with Phi delta1_a = delta2_a Phi, or None.

    Phi_1 is the identification of the two E bases; each higher Taylor
    coefficient Phi_k enters the degree-k intertwining equation linearly.
    """
    N = min(K1.N, K2.N) if N is None else N
    q = K1.q
    phi1 = basis_change(K1.pair, K2.pair)
    Phi = {}
    for d in range(2, N + 1):
        keys = sym_index(q, d)
        zero = {m: [ZERO] * q for m in keys}
        Phi[d] = zero
        r0 = intertwining_residual(K1, K2, phi1, Phi, d)
        cols = []
        for m in keys:
            for o in range(q):
                trial = {mm: list(v) for mm, v in zero.items()}
                trial[m][o] = ONE
                Phi[d] = trial
                rv = intertwining_residual(K1, K2, phi1, Phi, d)
                cols.append([x - y for x, y in zip(rv, r0)])
        Phi[d] = zero
        if not r0 or not any(r0):
            continue
        mat = transpose(cols, len(r0))
        x = solve(mat, [-y for y in r0], len(cols))
        if x is None:
            return None
        sol = {}
        for idx, m in enumerate(keys):
            sol[m] = x[idx * q:(idx + 1) * q]
        Phi[d] = sol
    return phi1, Phi


def isomorphism_defects(K1, K2, phi1, Phi, N=None):
    """Full substitution check: intertwining on all of S^{<=N} and the coalgebra law."""
    N = min(K1.N, K2.N) if N is None else N
    q = K1.q
    out = []
    for a in range(K1.r):
        for m in sym_index_upto(q, N):
            lhs = phi_apply_el(phi1, Phi, _delta_el(K1, a, {m: ONE}), q)
            rhs = _delta_el(K2, a, phi_apply(phi1, Phi, m, q))
            if add_into(dict(lhs), rhs, -ONE):
                out.append({"check": "intertwining", "a": a, "monomial": list(m)})
    f = lambda mm: phi_apply(phi1, Phi, mm, q)
    for m in sym_index_upto(q, N):
        lhs = QuotientCoalgebra.coproduct(f(m))
        rhs = tensor_apply(f, f, deconcatenate(m))
        if add_into(dict(lhs), rhs, -ONE):
            out.append({"check": "coalgebra", "monomial": list(m)})
    return out
