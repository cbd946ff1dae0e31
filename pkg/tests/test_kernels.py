import os
import random
import subprocess
import sys
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from liepair import kernels
from liepair.enveloping import _brackets_table

impls = [kernels.python_impl] + ([kernels.compiled_impl] if kernels.compiled_impl else [])


def test_backend_selected():
    assert kernels.BACKEND in ("compiled", "python")
    if kernels.compiled_impl is not None and os.environ.get("LIEPAIR_KERNELS") != "python":
        assert kernels.BACKEND == "compiled"


def test_forced_fallback():
    code = ("from liepair import kernels; assert kernels.BACKEND == 'python';"
            "from liepair.cli import main; import sys;"
            "sys.exit(main(['examples', '--list']) or None)")
    env = dict(os.environ, LIEPAIR_KERNELS="python")
    assert subprocess.run([sys.executable, "-c", code], env=env, capture_output=True).returncode == 0


def _random_consts(rng, n):
    c = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(n):
                if rng.random() < 0.3:
                    x = Fraction(rng.randint(-3, 3), rng.randint(1, 2))
                    c[i][j][k], c[j][i][k] = x, -x
    return c


@pytest.mark.skipif(kernels.compiled_impl is None, reason="extension not built")
@pytest.mark.parametrize("seed", range(5))
def test_left_mul_backends_agree(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 4)
    br = _brackets_table(_random_consts(rng, n))
    cp, cc = {}, {}
    for _ in range(40):
        k = rng.randrange(n)
        mono = tuple(sorted(rng.randrange(n) for _ in range(rng.randint(0, 4))))
        assert kernels.python_impl.left_mul(k, mono, br, cp) == kernels.compiled_impl.left_mul(k, mono, br, cc)


rows_st = st.integers(1, 5).flatmap(lambda c: st.lists(
    st.lists(st.fractions(min_value=-4, max_value=4, max_denominator=3), min_size=c, max_size=c),
    min_size=1, max_size=5))


@pytest.mark.parametrize("impl", impls, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
@given(rows=rows_st)
def test_rref_backends_agree(impl, rows):
    ncols = len(rows[0])
    a = [list(r) for r in rows]
    b = [list(r) for r in rows]
    pa = kernels.python_impl.rref_inplace(a, ncols)
    pb = impl.rref_inplace(b, ncols)
    assert pa == pb and a == b
