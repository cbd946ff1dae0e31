"""Pair documents: JSON <-> LiePair, connections and B-connections."""

import json

from .algebra import q_str, to_q
from .connection import ExtendedConnection, connection_from_b, default_connection
from .liealg import LieAlgebra, make_pair


class DocumentError(ValueError):
    def __init__(self, path, msg):
        self.path = path
        super().__init__(f"{path}: {msg}")


def _q(x, path):
    try:
        return to_q(x)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise DocumentError(path, f"bad rational {x!r} ({exc})") from None


def _rows(rows, n, path):
    if not isinstance(rows, list):
        raise DocumentError(path, "expected a list of rows")
    out = []
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            raise DocumentError(f"{path}[{i}]", f"expected a row of length {n}")
        out.append([_q(x, f"{path}[{i}][{k}]") for k, x in enumerate(row)])
    return out


def _tensor(t, shape, path):
    if not shape:
        return _q(t, path)
    if not isinstance(t, list) or len(t) != shape[0]:
        raise DocumentError(path, f"expected an array of length {shape[0]}")
    return [_tensor(x, shape[1:], f"{path}[{i}]") for i, x in enumerate(t)]


class PairDocument:
    def __init__(self, name, dimension, basis_names, brackets, A_rows,
                 complement=None, connection=None, b_connection=None):
        self.name = name
        self.dimension = dimension
        self.basis_names = basis_names
        self.brackets = brackets          # {(i, j): coeffs} with i < j
        self.A_rows = A_rows
        self.complement = complement
        self.connection = connection
        self.b_connection = b_connection

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict):
            raise DocumentError("$", "document must be an object")
        for key in ("name", "dimension", "structure_constants", "subalgebra_A"):
            if key not in d:
                raise DocumentError("$", f"missing field {key!r}")
        n = d["dimension"]
        if not isinstance(n, int) or isinstance(n, bool) or n < 0:
            raise DocumentError("$.dimension", "must be a non-negative integer")
        names = d.get("basis_names", [f"x{i}" for i in range(n)])
        if not isinstance(names, list) or len(names) != n or not all(isinstance(s, str) for s in names):
            raise DocumentError("$.basis_names", f"expected {n} strings")
        brackets = {}
        sc = d["structure_constants"]
        if not isinstance(sc, list):
            raise DocumentError("$.structure_constants", "expected a list")
        for t, ent in enumerate(sc):
            p = f"$.structure_constants[{t}]"
            if not isinstance(ent, dict) or not {"i", "j", "coeffs"} <= set(ent):
                raise DocumentError(p, "expected {i, j, coeffs}")
            i, j = ent["i"], ent["j"]
            if not (isinstance(i, int) and isinstance(j, int) and 0 <= i < j < n):
                raise DocumentError(p, "need integer indices 0 <= i < j < dimension")
            if (i, j) in brackets:
                raise DocumentError(p, f"duplicate bracket ({i}, {j})")
            coeffs = ent["coeffs"]
            if not isinstance(coeffs, list) or len(coeffs) != n:
                raise DocumentError(f"{p}.coeffs", f"expected {n} entries")
            brackets[(i, j)] = [_q(x, f"{p}.coeffs[{k}]") for k, x in enumerate(coeffs)]
        A_rows = _rows(d["subalgebra_A"], n, "$.subalgebra_A")
        comp = d.get("splitting_complement")
        comp = None if comp is None else _rows(comp, n, "$.splitting_complement")
        q = n - len(A_rows)
        conn = d.get("connection")
        if conn is not None:
            conn = _tensor(conn, (n, q, q), "$.connection")
        bconn = d.get("b_connection")
        if bconn is not None:
            bconn = _tensor(bconn, (q, q, q), "$.b_connection")
        return cls(d["name"], n, names, brackets, A_rows, comp, conn, bconn)

    def to_dict(self):
        d = {
            "name": self.name,
            "dimension": self.dimension,
            "basis_names": list(self.basis_names),
            "structure_constants": [
                {"i": i, "j": j, "coeffs": [q_str(x) for x in c]}
                for (i, j), c in sorted(self.brackets.items())
            ],
            "subalgebra_A": [[q_str(x) for x in r] for r in self.A_rows],
        }
        if self.complement is not None:
            d["splitting_complement"] = [[q_str(x) for x in r] for r in self.complement]
        if self.connection is not None:
            d["connection"] = _ser(self.connection)
        if self.b_connection is not None:
            d["b_connection"] = _ser(self.b_connection)
        return d

    def lie_algebra(self):
        return LieAlgebra.from_brackets(self.dimension, self.brackets, self.basis_names)

    def pair(self, complement=None):
        comp = self.complement if complement is None else complement
        return make_pair(self.lie_algebra(), self.A_rows, comp)

    def connection_for(self, pair):
        """Explicit connection, else the B-connection lift, else the default."""
        if self.connection is not None:
            return ExtendedConnection(pair, self.connection)
        if self.b_connection is not None:
            return connection_from_b(pair, self.b_connection)
        return default_connection(pair)


def _ser(t):
    if isinstance(t, list):
        return [_ser(x) for x in t]
    return q_str(t)


def loads(text):
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None
    return PairDocument.from_dict(d)


def load(path):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def dumps(doc):
    return json.dumps(doc.to_dict(), indent=2, sort_keys=False) + "\n"
