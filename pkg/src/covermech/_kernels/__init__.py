"""Kernel backend selection.

The compiled extension is used when importable; `COVERMECH_PURE=1` in the
environment forces the pure-Python fallback.  Both backends are semantic
twins, so selection never changes results, only speed.
"""

from __future__ import annotations

import os

from . import _pure

if os.environ.get("COVERMECH_PURE", "") not in ("", "0"):
    _impl = _pure
    BACKEND = "pure"
else:
    try:
        from . import _fast as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _pure
        BACKEND = "pure"

min_cost_vertex_cover = _impl.min_cost_vertex_cover
maximal_independent_sets = _impl.maximal_independent_sets
max_weight_independent_set = _impl.max_weight_independent_set
max_flow = _impl.max_flow

__all__ = [
    "BACKEND",
    "min_cost_vertex_cover",
    "maximal_independent_sets",
    "max_weight_independent_set",
    "max_flow",
]
