"""Kernel selection: the compiled extension when importable, else pure NumPy.

Set ``ADIABOUND_PURE_PYTHON=1`` to force the fallback.
"""
from __future__ import annotations

import os

from . import _kernels_py

_KERNELS = {"python": _kernels_py.evolve_chunk}

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None
else:
    _KERNELS["cython"] = _compiled.evolve_chunk

if os.environ.get("ADIABOUND_PURE_PYTHON") or _compiled is None:
    DEFAULT = "python"
else:
    DEFAULT = "cython"


def available() -> list[str]:
    return sorted(_KERNELS)


def get(name: str | None = None):
    name = name or DEFAULT
    try:
        return _KERNELS[name]
    except KeyError:
        raise ValueError(f"unknown kernel backend {name!r}; have {available()}") from None
