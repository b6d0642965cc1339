"""Kernel backend selection.

The compiled extension is preferred; the pure-Python module is the
fallback.  Set ``DIFFCODES_PURE_PYTHON=1`` to force the fallback (used by
the equivalence tests and the benchmark).
"""

import os

from . import _fallback

if os.environ.get("DIFFCODES_PURE_PYTHON"):
    _impl = _fallback
else:
    try:
        from . import _core as _impl
    except ImportError:
        _impl = _fallback

BACKEND = _impl.BACKEND

swap_chunk = _impl.swap_chunk
sep_chunk = _impl.sep_chunk
gap_chunk = _impl.gap_chunk
coupled_gap_chunk = _impl.coupled_gap_chunk
metropolis_chunk = _impl.metropolis_chunk
flip_decode_run = _impl.flip_decode_run
bp_decode_run = _impl.bp_decode_run
bp_decode_serial = _impl.bp_decode_serial
bp_posteriors = _impl.bp_posteriors

fallback = _fallback


def compiled_available() -> bool:
    return BACKEND == "compiled"
