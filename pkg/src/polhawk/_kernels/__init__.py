"""Kernel backend selection: compiled extension when available, NumPy
fallback otherwise.  Set POLHAWK_FORCE_PURE=1 to force the fallback."""

import os

from . import pure

if os.environ.get("POLHAWK_FORCE_PURE") == "1":
    _impl = pure
    BACKEND = "pure"
else:
    try:
        from . import _core as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = pure
        BACKEND = "pure"

rotate_then_affine = _impl.rotate_then_affine
affine_then_rotate = _impl.affine_then_rotate
abs2_rows = _impl.abs2_rows
accumulate_tri = _impl.accumulate_tri
