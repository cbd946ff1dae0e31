"""Built-in example pairs, as pair documents."""

import copy

from .io import PairDocument

_RAW = {
    "sl2-borel": {
        "name": "sl2-borel",
        "dimension": 3,
        "basis_names": ["e", "h", "f"],
        "structure_constants": [
            {"i": 0, "j": 1, "coeffs": ["-2", "0", "0"]},
            {"i": 0, "j": 2, "coeffs": ["0", "1", "0"]},
            {"i": 1, "j": 2, "coeffs": ["0", "0", "-2"]},
        ],
        "subalgebra_A": [["1", "0", "0"], ["0", "1", "0"]],
    },
    "heisenberg-center": {
        "name": "heisenberg-center",
        "dimension": 3,
        "basis_names": ["x", "y", "z"],
        "structure_constants": [{"i": 0, "j": 1, "coeffs": ["0", "0", "1"]}],
        "subalgebra_A": [["0", "0", "1"]],
    },
    "semidirect-aff1": {
        "name": "semidirect-aff1",
        "dimension": 2,
        "basis_names": ["h", "v"],
        "structure_constants": [{"i": 0, "j": 1, "coeffs": ["0", "1"]}],
        "subalgebra_A": [["1", "0"]],
    },
    # A = span(e - f), B = span(h/2, e) with a flat torsion-free connection on B
    "sl2-iwasawa-matched": {
        "name": "sl2-iwasawa-matched",
        "dimension": 3,
        "basis_names": ["e", "h", "f"],
        "structure_constants": [
            {"i": 0, "j": 1, "coeffs": ["-2", "0", "0"]},
            {"i": 0, "j": 2, "coeffs": ["0", "1", "0"]},
            {"i": 1, "j": 2, "coeffs": ["0", "0", "-2"]},
        ],
        "subalgebra_A": [["1", "0", "-1"]],
        "splitting_complement": [["0", "1/2", "0"], ["1", "0", "0"]],
        "b_connection": [
            [["-1", "0"], ["0", "0"]],
            [["0", "-1"], ["0", "0"]],
        ],
    },
    "abelian-2-1": {
        "name": "abelian-2-1",
        "dimension": 2,
        "basis_names": ["u", "w"],
        "structure_constants": [],
        "subalgebra_A": [["0", "1"]],
    },
}

NAMES = list(_RAW)


def get(name):
    if name not in _RAW:
        raise KeyError(f"unknown example {name!r}; known: {', '.join(NAMES)}")
    return PairDocument.from_dict(_RAW[name])


def raw(name):
    get(name)
    return copy.deepcopy(_RAW[name])
