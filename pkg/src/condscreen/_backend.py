"""Pick the compiled kernels when available, else the numpy fallback.

Set ``CONDSCREEN_BACKEND=python`` to force the fallback.
"""
import os

from . import _fallback

if os.environ.get("CONDSCREEN_BACKEND", "").lower() == "python":
    _compiled = None
else:
    try:
        from . import _core as _compiled
    except ImportError:  # extension not built
        _compiled = None

if _compiled is not None:
    BACKEND = "cython"
    csirs_columns = _compiled.csirs_columns
    dcov_columns = _compiled.dcov_columns
else:
    BACKEND = "python"
    csirs_columns = _fallback.csirs_columns
    dcov_columns = _fallback.dcov_columns

__all__ = ["BACKEND", "csirs_columns", "dcov_columns"]
