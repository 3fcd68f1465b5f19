"""Kernel backend selection.

The compiled Cython kernels are used when they were built; otherwise the
pure-Python versions. ``SENTNET_BACKEND=python`` forces the fallback.
"""
import os

from sentnet import _pykernels

try:
    from sentnet import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["cython"] = _ckernels


def available():
    return sorted(_BACKENDS)


def _default():
    forced = os.environ.get("SENTNET_BACKEND", "").strip().lower()
    if forced:
        if forced not in _BACKENDS:
            raise ImportError(f"SENTNET_BACKEND={forced!r} is not available (have {available()})")
        return _BACKENDS[forced]
    return _ckernels if _ckernels is not None else _pykernels


DEFAULT = _default()


def get(name=None):
    """Return the kernel module called ``name`` (default: the import-time choice)."""
    if name is None:
        return DEFAULT
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(f"unknown backend {name!r}; available: {available()}") from None
