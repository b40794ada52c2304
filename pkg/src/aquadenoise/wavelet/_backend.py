"""Kernel backend selection.

The compiled Cython kernels are used when the extension was built; otherwise
the numpy implementation is used. Setting ``AQUADENOISE_PURE_PYTHON=1`` forces
the fallback.
"""

import importlib
import os

from aquadenoise.wavelet import _pykernels

BACKENDS = ("cython", "python")


def load(name: str):
    """Import the kernel module for backend ``name`` ("cython" or "python")."""
    if name == "python":
        return _pykernels
    if name == "cython":
        return importlib.import_module("aquadenoise.wavelet._ckernels")
    raise ValueError(f"unknown kernel backend {name!r}; expected one of {BACKENDS}")


def available() -> list[str]:
    names = []
    for name in BACKENDS:
        try:
            load(name)
        except ImportError:
            continue
        names.append(name)
    return names


def _select():
    if os.environ.get("AQUADENOISE_PURE_PYTHON", "").strip() not in ("", "0"):
        return "python", _pykernels
    try:
        return "cython", load("cython")
    except ImportError:
        return "python", _pykernels


BACKEND, kernels = _select()
