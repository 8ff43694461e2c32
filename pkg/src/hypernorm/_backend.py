"""Pick the compiled kernels when available, else the numpy fallback.

Set ``HYPERNORM_PURE=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _fallback

fallback = _fallback

if os.environ.get("HYPERNORM_PURE", "") not in ("", "0"):
    kernels = _fallback
    COMPILED = False
else:
    try:
        from . import _kernels as kernels  # type: ignore[attr-defined]
        COMPILED = True
    except ImportError:  # extension not built
        kernels = _fallback
        COMPILED = False

NAME = "cython" if COMPILED else "numpy"
