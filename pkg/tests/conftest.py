import functools

import pytest

from liepair import catalog
from liepair.connection import default_connection
from liepair.kapranov import extract

ACCEPTANCE = {}


@functools.lru_cache(maxsize=None)
def pair_of(name, complement=None):
    doc = catalog.get(name)
    comp = None if complement is None else [list(r) for r in complement]
    return doc.pair(comp)


@functools.lru_cache(maxsize=None)
def kapranov_of(name, N, doc_connection=True):
    doc = catalog.get(name)
    p = pair_of(name)
    nabla = doc.connection_for(p) if doc_connection else default_connection(p)
    return extract(p, nabla, N)


@pytest.fixture(params=catalog.NAMES)
def example(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, label = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d} {'PASS' if ok else 'FAIL'}  {label}")
