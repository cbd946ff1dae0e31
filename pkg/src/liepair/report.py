"""Check records, deterministic JSON and markdown rendering."""

import hashlib
import json
import time
from fractions import Fraction

from .algebra import q_str

VERSION = "0.1.0"
PASS, FAIL, TRIVIAL = "pass", "fail", "trivial"


def monomial_name(m, names):
    """(0, 0, 1) -> "e^2*f"; () -> "1"."""
    if not m:
        return "1"
    parts = []
    i = 0
    while i < len(m):
        k = i
        while k < len(m) and m[k] == m[i]:
            k += 1
        parts.append(names[m[i]] if k - i == 1 else f"{names[m[i]]}^{k - i}")
        i = k
    return "*".join(parts)


def form_name(I, names):
    return "^".join(names[i] + "*" for i in I) if I else "1"


def jsonify(x):
    if isinstance(x, Fraction):
        return q_str(x)
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not allowed in reports")
    if isinstance(x, dict):
        return {str(k) if not isinstance(k, tuple) else ",".join(map(str, k)): jsonify(v)
                for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonify(v) for v in x]
    raise TypeError(f"cannot serialize {type(x).__name__}")


class Report:
    def __init__(self, command, doc_text, flags, timings=False):
        self.command = command
        self.digest = hashlib.sha256(doc_text.encode("utf-8")).hexdigest() if doc_text else None
        self.flags = flags
        self.timings = timings
        self.checks = []
        self._t = None

    def start(self):
        self._t = time.perf_counter()

    def add(self, cid, status, details=None):
        elapsed = None
        if self.timings and self._t is not None:
            elapsed = f"{time.perf_counter() - self._t:.3f}"
        self.checks.append({"id": cid, "status": status, "details": jsonify(details or {}),
                            "elapsed": elapsed})
        self._t = time.perf_counter()

    def failed(self):
        return any(c["status"] == FAIL for c in self.checks)

    def to_dict(self):
        counts = {s: sum(c["status"] == s for c in self.checks) for s in (PASS, FAIL, TRIVIAL)}
        return {
            "tool": "liepair",
            "version": VERSION,
            "command": self.command,
            "input_digest": self.digest,
            "flags": jsonify(self.flags),
            "checks": self.checks,
            "summary": counts,
        }


def to_json(d):
    return json.dumps(d, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def to_markdown(d):
    """Rendered from the JSON report only."""
    lines = [f"# liepair {d['command']}", ""]
    lines.append(f"- version: {d['version']}")
    if d.get("input_digest"):
        lines.append(f"- input digest: `{d['input_digest']}`")
    s = d["summary"]
    lines.append(f"- pass {s['pass']}, fail {s['fail']}, trivial {s['trivial']}")
    lines += ["", "| check | status |", "|---|---|"]
    for c in d["checks"]:
        lines.append(f"| {c['id']} | {c['status']} |")
    for c in d["checks"]:
        if c["details"]:
            lines += ["", f"## {c['id']}", "", "```json",
                      json.dumps(c["details"], indent=2, sort_keys=True, ensure_ascii=False), "```"]
    return "\n".join(lines) + "\n"
