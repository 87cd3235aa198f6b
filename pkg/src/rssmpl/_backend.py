"""Select the estimator kernel at import: compiled extension if present,
numpy fallback otherwise.

Set ``RSSMPL_BACKEND=python`` or ``RSSMPL_BACKEND=cython`` to force one
(forcing ``cython`` fails loudly if the extension was not built).
"""

from __future__ import annotations

import os

_forced = os.environ.get("RSSMPL_BACKEND", "")
if _forced not in ("", "cython", "python"):
    raise ImportError(f"RSSMPL_BACKEND must be 'cython' or 'python', got {_forced!r}")

if _forced == "python":
    from . import _mpl_kernel_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _mpl_kernel as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        if _forced == "cython":
            raise
        from . import _mpl_kernel_py as _impl

        BACKEND = "python"

pooled_mpl_curve = _impl.pooled_mpl_curve
