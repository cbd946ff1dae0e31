"""L-connections on E = L/A extending the Bott action, curvature, Atiyah cocycle."""

from dataclasses import dataclass
from fractions import Fraction

from .algebra import ONE, ZERO, matmul, solve, transpose, zeros
from .liealg import (
    Cochain, bott_action, ce_differential, ce_matrix, hom_keys, hom_module,
)


class ConnectionShapeError(ValueError):
    """Connection tensor of the wrong shape."""


class ExtendedConnection:
    """Bilinear map L x E -> E.

    ``tensor[l][b][b2]`` is the b2-coefficient of nabla_{x_l} b in the input
    basis of L; ``mats[i]`` is the matrix of nabla along the i-th adapted
    basis vector of the pair, acting on E column vectors.
    """

    def __init__(self, pair, tensor):
        n, q = pair.n, pair.q
        if len(tensor) != n or any(len(t) != q or any(len(row) != q for row in t)
                                   for t in tensor):
            raise ConnectionShapeError(f"connection tensor must have shape [{n}][{q}][{q}]")
        self.pair = pair
        self.tensor = [[[Fraction(x) for x in row] for row in t] for t in tensor]
        # input-basis operators
        self._ops = [transpose(t, q) for t in self.tensor]
        self.mats = [self.op(pair.P[i]) for i in range(n)]

    @classmethod
    def from_adapted(cls, pair, mats):
        """Build from operators along the adapted basis."""
        n, q = pair.n, pair.q
        tensor = []
        for l in range(n):
            e = [ZERO] * n
            e[l] = ONE
            y = pair.to_adapted(e)
            m = zeros(q, q)
            for i, yi in enumerate(y):
                if yi:
                    for a in range(q):
                        for b in range(q):
                            m[a][b] += yi * mats[i][a][b]
            tensor.append(transpose(m, q))
        return cls(pair, tensor)

    def op(self, x):
        """Matrix of nabla_x for x in input coordinates."""
        q = self.pair.q
        m = zeros(q, q)
        for l, xl in enumerate(x):
            if xl:
                ol = self._ops[l]
                for a in range(q):
                    for b in range(q):
                        if ol[a][b]:
                            m[a][b] += xl * ol[a][b]
        return m

    def op_adapted(self, y):
        q = self.pair.q
        m = zeros(q, q)
        for i, yi in enumerate(y):
            if yi:
                for a in range(q):
                    for b in range(q):
                        m[a][b] += yi * self.mats[i][a][b]
        return m

    def __eq__(self, other):
        return isinstance(other, ExtendedConnection) and self.tensor == other.tensor


def default_connection(p):
    """nabla_x b = pr[x, j(b)] on every basis vector of L."""
    n, q = p.n, p.q
    tensor = []
    for l in range(n):
        x = p.L.basis_vector(l)
        tensor.append([p.pr(p.L.bracket(x, p.j(_unit(q, b)))) for b in range(q)])
    return ExtendedConnection(p, tensor)


def connection_from_b(p, b_conn):
    """L-connection with Bott A-part and the given B-connection on the j-part.

    ``b_conn[b][b2][b3]`` is the b3-coefficient of nabla_{j(b)} b2.
    """
    q = p.q
    bott = bott_action(p)
    mats = []
    for b in range(q):
        m = zeros(q, q)
        for b2 in range(q):
            for b3 in range(q):
                m[b3][b2] = Fraction(b_conn[b][b2][b3])
        mats.append(m)
    mats.extend(bott.action)
    return ExtendedConnection.from_adapted(p, mats)


def perturb_connection(p, nabla, rng, scale=3):
    """Random rational change on the j-slots only; A-slots stay Bott."""
    q = p.q
    mats = [[list(row) for row in m] for m in nabla.mats]
    for b in range(q):
        for i in range(q):
            for k in range(q):
                mats[b][i][k] += Fraction(rng.randint(-scale, scale), rng.randint(1, scale))
    return ExtendedConnection.from_adapted(p, mats)


def _unit(q, b):
    v = [ZERO] * q
    v[b] = ONE
    return v


def validate_connection(p, nabla):
    """Every (a, b) where nabla_a b differs from the Bott action."""
    bott = bott_action(p)
    q = p.q
    out = []
    for a in range(p.r):
        got = nabla.mats[q + a]
        want = bott.action[a]
        for b in range(q):
            for b2 in range(q):
                if got[b2][b] != want[b2][b]:
                    out.append({"a": a, "b": b, "component": b2,
                                "got": got[b2][b], "bott": want[b2][b]})
    return out


def curvature(p, nabla, x, y):
    """R(x, y) = nabla_x nabla_y - nabla_y nabla_x - nabla_[x,y], x and y in input coordinates."""
    nx, ny = nabla.op(x), nabla.op(y)
    nxy = nabla.op(p.L.bracket(x, y))
    a, b = matmul(nx, ny), matmul(ny, nx)
    q = p.q
    return [[a[i][k] - b[i][k] - nxy[i][k] for k in range(q)] for i in range(q)]


@dataclass
class AtiyahCocycle:
    """alpha(a; b) = R(a, j(b)) in End(E), as a 1-cochain in Hom(E (x) E, E)."""
    pair: object
    alpha: list      # alpha[a][b] is a q x q matrix
    cochain: Cochain
    module: object

    def value(self, a, b, c):
        """alpha(a; b) c as an E vector."""
        m = self.alpha[a][b]
        return [m[i][c] for i in range(len(m))]

    def is_zero(self):
        return self.cochain.is_zero()


def atiyah_module(p):
    """E* (x) End(E) = Hom(E (x) E, E) with the action induced by Bott."""
    return hom_module(bott_action(p), 2, symmetric=False)


def atiyah_cocycle(p, nabla, check=True):
    q, r = p.q, p.r
    alpha = [[curvature(p, nabla, p.a_vector(a), p.j(_unit(q, b))) for b in range(q)]
             for a in range(r)]
    mod = atiyah_module(p)
    keys = hom_keys(q, 2, symmetric=False)
    values = []
    for a in range(r):
        v = [ZERO] * (len(keys) * q)
        for ki, (b, c) in enumerate(keys):
            for o in range(q):
                v[ki * q + o] = alpha[a][b][o][c]
        values.append(v)
    coc = AtiyahCocycle(p, alpha, Cochain(1, values), mod)
    if check and not is_cocycle(coc):
        raise AssertionError("Atiyah cocycle is not d_A-closed")
    return coc


def is_cocycle(alpha):
    return ce_differential(alpha.module, alpha.cochain).is_zero()


def is_coboundary(p, alpha):
    """A 0-cochain beta of Hom(E (x) E, E) with d_A beta = alpha, or None."""
    if not is_cocycle(alpha):
        raise ValueError("input cochain is not closed")
    rhs = alpha.cochain.vec()
    mod = alpha.module
    if not any(rhs):
        return Cochain(0, [[ZERO] * mod.dim])
    d0 = ce_matrix(mod, 0)
    x = solve(d0, rhs, mod.dim) if d0 else None
    if x is None:
        return None
    return Cochain(0, [x])


class ClassIndependenceFailure(AssertionError):
    """Two extended connections gave non-cohomologous Atiyah cocycles."""


def class_independence(p, nabla1, nabla2):
    """beta with alpha(nabla1) - alpha(nabla2) = d_A beta; failure is a bug."""
    a1, a2 = atiyah_cocycle(p, nabla1), atiyah_cocycle(p, nabla2)
    diff = [x - y for x, y in zip(a1.cochain.vec(), a2.cochain.vec())]
    r = p.r
    dim = a1.module.dim
    values = [diff[i * dim:(i + 1) * dim] for i in range(r)]
    d = AtiyahCocycle(p, None, Cochain(1, values), a1.module)
    beta = is_coboundary(p, d)
    if beta is None:
        raise ClassIndependenceFailure("Atiyah classes of the two connections differ")
    return beta


def compatible_connection_exists(p):
    """An extended connection with vanishing Atiyah cocycle, or None.

    The cocycle is affine in the j-slots of the connection, so the search is
    one linear solve around the default connection.
    """
    q = p.q
    base = default_connection(p)
    a0 = atiyah_cocycle(p, base).cochain.vec()
    if not any(a0):
        return base
    slots = [(b, i, k) for b in range(q) for i in range(q) for k in range(q)]
    cols = []
    for (b, i, k) in slots:
        mats = [[list(row) for row in m] for m in base.mats]
        mats[b][i][k] += ONE
        v = atiyah_cocycle(p, ExtendedConnection.from_adapted(p, mats), check=False).cochain.vec()
        cols.append([x - y for x, y in zip(v, a0)])
    m = transpose(cols, len(a0))
    x = solve(m, [-y for y in a0], len(slots))
    if x is None:
        return None
    mats = [[list(row) for row in m_] for m_ in base.mats]
    for (b, i, k), xv in zip(slots, x):
        mats[b][i][k] += xv
    witness = ExtendedConnection.from_adapted(p, mats)
    if not atiyah_cocycle(p, witness).is_zero():
        raise AssertionError("witness search produced a nonzero cocycle")
    return witness
