"""Kernel backend selection.

Set ``TAILSIM_BACKEND=numpy`` to bypass numba entirely. The default is
``numba`` when it can be imported, otherwise the pure-numpy kernels are used.
"""

import os

_requested = os.environ.get("TAILSIM_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ImportError(
        f"TAILSIM_BACKEND must be 'numba' or 'numpy', got {_requested!r}"
    )

if _requested == "numba":
    try:
        import numba  # noqa: F401

        BACKEND = "numba"
    except ImportError:  # pragma: no cover - numba is optional
        BACKEND = "numpy"
else:
    BACKEND = "numpy"
