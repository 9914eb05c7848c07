"""Backend selection for the hot kernels.

The compiled (Cython) backend is used when its extension module built;
otherwise the numpy fallback in :mod:`kfreewalk.kernels.pure` is used.
Set ``KFREEWALK_BACKEND=pure`` to force the fallback (e.g. for the
backend benchmark), or ``KFREEWALK_BACKEND=compiled`` to fail loudly if
the extension is missing.  Both backends are bit-for-bit equivalent.
"""

from __future__ import annotations

import os

from . import pure

_choice = os.environ.get("KFREEWALK_BACKEND", "auto")

if _choice == "pure":
    _backend = pure
elif _choice == "compiled":
    from . import _compiled as _backend  # type: ignore[no-redef]
else:
    try:
        from . import _compiled as _backend  # type: ignore[no-redef]
    except ImportError:
        _backend = pure

BACKEND = "pure" if _backend is pure else "compiled"

mobius_segment = _backend.mobius_segment
kfree_segment = _backend.kfree_segment
walk_hits = _backend.walk_hits


def available_backends() -> dict:
    """Name -> module map of importable backends (for tests/benchmarks)."""
    out = {"pure": pure}
    try:
        from . import _compiled
        out["compiled"] = _compiled
    except ImportError:
        pass
    return out
