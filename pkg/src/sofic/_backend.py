"""Kernel selection.

The compiled extension is used when importable; ``SOFIC_PURE_PYTHON=1``
forces the interpreted fallback.
"""
import importlib
import os

from . import _pure


def _load():
    if os.environ.get("SOFIC_PURE_PYTHON", "") not in ("", "0"):
        return _pure, "python"
    try:
        return importlib.import_module("sofic._kernels"), "cython"
    except ImportError:
        return _pure, "python"


kernels, BACKEND = _load()


def available():
    """Names of the backends importable in this environment."""
    names = ["python"]
    try:
        importlib.import_module("sofic._kernels")
        names.insert(0, "cython")
    except ImportError:
        pass
    return names


def get(name):
    if name == "python":
        return _pure
    if name == "cython":
        return importlib.import_module("sofic._kernels")
    raise ValueError(f"unknown backend {name!r}")
