"""Backend selection for the hot loops.

The compiled extension is used when it imports; otherwise the pure-Python
module takes over. ``ANTIWICK_BACKEND=python`` forces the fallback and
``ANTIWICK_BACKEND=compiled`` makes a missing extension an error.
"""
import os

from . import _pykernels

_choice = os.environ.get("ANTIWICK_BACKEND", "auto").lower()
if _choice not in ("auto", "python", "compiled"):
    raise ImportError(f"ANTIWICK_BACKEND must be auto, python or compiled, got {_choice!r}")

_impl = _pykernels
if _choice != "python":
    try:
        from . import _ckernels as _impl
    except ImportError:
        if _choice == "compiled":
            raise

BACKEND = _impl.BACKEND
linearized_product = _impl.linearized_product
wick_product = _impl.wick_product
evaluate = _impl.evaluate

# packed keys must fit an unsigned 64-bit integer with headroom
MAX_PACKED = 2**63


def backends():
    """All importable kernel modules, keyed by name."""
    found = {"python": _pykernels}
    try:
        from . import _ckernels

        found["compiled"] = _ckernels
    except ImportError:
        pass
    return found


def packable(m, N):
    return (N + 1) ** m < MAX_PACKED


def for_shape(m, N):
    """Kernel module for an (m, N) shape; wide shapes go to the dict-keyed fallback."""
    if _impl is not _pykernels and not packable(m, N):
        return _pykernels
    return _impl
