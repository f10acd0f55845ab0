"""Kernel backend selection.

Imports the compiled extension when available, otherwise the pure-Python
fallback. Set ``UNELISA_PURE=1`` to force the fallback (used by the backend
benchmark and the parity tests).
"""

from __future__ import annotations

import os

if os.environ.get("UNELISA_PURE", "") not in ("", "0"):
    from . import _pure as _impl
else:
    try:
        from . import _fast as _impl  # type: ignore[no-redef]
    except ImportError:
        from . import _pure as _impl  # type: ignore[no-redef]

gibbs_chain = _impl.gibbs_chain
cd_lasso_logistic = _impl.cd_lasso_logistic


def backend() -> str:
    """Name of the active kernel backend: 'compiled' or 'pure'."""
    return _impl.BACKEND_NAME


__all__ = ["gibbs_chain", "cd_lasso_logistic", "backend"]
