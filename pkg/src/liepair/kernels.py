"""Backend selection for the hot kernels.

The compiled extension is used when importable; otherwise the pure-Python
module. ``LIEPAIR_KERNELS=python`` forces the fallback. Both stay reachable (``python_impl``, ``compiled_impl``) so tests and
the benchmark can compare them.
"""

import os

from . import _kernels_py as python_impl

try:
    from . import _kernels as compiled_impl
except ImportError:  # extension not built
    compiled_impl = None

if compiled_impl is not None and os.environ.get("LIEPAIR_KERNELS") != "python":
    _impl, BACKEND = compiled_impl, "compiled"
else:
    _impl, BACKEND = python_impl, "python"

left_mul = _impl.left_mul
rref_inplace = _impl.rref_inplace
