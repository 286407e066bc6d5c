"""Hot state-vector kernels with a selectable backend.

The numba backend is used when numba imports cleanly. Setting the
environment variable ``MCWALK_DISABLE_NUMBA`` to anything other than
``""`` or ``"0"`` forces the pure-numpy path. The choice is made once at
import time and exposed as :data:`BACKEND`.
"""

import os

_disabled = os.environ.get("MCWALK_DISABLE_NUMBA", "") not in ("", "0")

if _disabled:
    from ._numpy import apply_local, marginal_probs, permute_local

    BACKEND = "numpy"
else:
    try:
        from ._numba import apply_local, marginal_probs, permute_local

        BACKEND = "numba"
    except ImportError:  # numba missing or broken
        from ._numpy import apply_local, marginal_probs, permute_local

        BACKEND = "numpy"

__all__ = ["BACKEND", "apply_local", "marginal_probs", "permute_local"]
