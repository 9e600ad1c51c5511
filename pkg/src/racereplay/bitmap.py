"""Address-set bitmaps: backend selection between compiled and pure Python.

The compiled extension is preferred when importable; set the environment
variable ``RACEREPLAY_BITMAP=py`` (or ``ext``) before import to force a
backend. Both backends implement the same class and module-level helper.
"""

from __future__ import annotations

import os

from ._kernels import bitmap_py

_FORCED = os.environ.get("RACEREPLAY_BITMAP", "").strip().lower()

if _FORCED in ("py", "python", "pure"):
    _impl = bitmap_py
    BACKEND = "py"
elif _FORCED in ("", "ext", "c"):
    try:
        from ._kernels import bitmap_ext as _impl
        BACKEND = "ext"
    except ImportError:
        _impl = bitmap_py
        BACKEND = "py"
    if _FORCED and BACKEND != "ext":
        raise ImportError("RACEREPLAY_BITMAP=ext requested but the compiled "
                          "bitmap extension is not available")
else:
    raise ImportError(f"unknown RACEREPLAY_BITMAP value {_FORCED!r}")

MultilevelBitmap = _impl.BitmapCore
race_witnesses = _impl.race_witnesses
NODE_PAYLOAD = _impl.NODE_PAYLOAD


def available_backends():
    """Mapping of backend name -> kernel module, for benchmarks and tests."""
    out = {"py": bitmap_py}
    try:
        from ._kernels import bitmap_ext
        out["ext"] = bitmap_ext
    except ImportError:
        pass
    return out


def from_addresses(addresses) -> "MultilevelBitmap":
    bm = MultilevelBitmap()
    for a in addresses:
        bm.insert(a)
    return bm
