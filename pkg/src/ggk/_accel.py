"""Select the compiled table kernels when available, else the pure-Python ones.

Set ``GGK_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _kernels_py as python_kernels

compiled_kernels = None
if os.environ.get("GGK_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as compiled_kernels  # type: ignore[no-redef]
    except ImportError:  # extension not built
        compiled_kernels = None

kernels = compiled_kernels if compiled_kernels is not None else python_kernels
BACKEND = "cython" if compiled_kernels is not None else "python"

find_nonassociative = kernels.find_nonassociative
closure = kernels.closure
find_nonnormal = kernels.find_nonnormal
find_nonhomomorphic = kernels.find_nonhomomorphic
