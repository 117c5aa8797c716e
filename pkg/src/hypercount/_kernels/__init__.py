"""Hot loops, with a compiled build and a pure-Python fallback.

The compiled module is used when it imports; set ``HYPERCOUNT_PURE_PYTHON=1``
to force the fallback.  ``BACKEND`` is whichever one was selected.
"""

import os

from . import _pykernels as python_backend

try:
    from . import _ckernels as compiled_backend
except ImportError:  # extension not built
    compiled_backend = None

if compiled_backend is not None and os.environ.get("HYPERCOUNT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    BACKEND = compiled_backend
else:
    BACKEND = python_backend

__all__ = ["BACKEND", "python_backend", "compiled_backend"]
