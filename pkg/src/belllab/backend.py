"""Kernel backend selection.

The hot loops (trial outcome generation, the symplectic integrator, the CHSH
grid scan) exist twice: compiled in belllab._core and in numpy in
belllab._core_py. The compiled module is preferred when importable; set
BELLLAB_BACKEND=python or BELLLAB_BACKEND=compiled to force one. Both produce
bit-identical results, so the choice only affects speed.
"""

from __future__ import annotations

import os

from . import _core_py

try:
    from . import _core  # type: ignore[attr-defined]
except ImportError:
    _core = None  # type: ignore[assignment]

_CHOICES = {
    "": None,
    "auto": None,
    "compiled": "compiled",
    "c": "compiled",
    "cython": "compiled",
    "python": "python",
    "py": "python",
    "numpy": "python",
}


def select_backend(name: str | None = None):
    """Return (kernel module, backend name) for an explicit or default choice."""
    if name is None:
        name = os.environ.get("BELLLAB_BACKEND", "")
    key = name.strip().lower()
    if key not in _CHOICES:
        raise ValueError(f"unknown backend {name!r}; use 'compiled' or 'python'")
    choice = _CHOICES[key]
    if choice == "compiled":
        if _core is None:
            raise RuntimeError(
                "compiled kernels requested but belllab._core is not built; "
                "reinstall with a C compiler or use BELLLAB_BACKEND=python"
            )
        return _core, "compiled"
    if choice == "python":
        return _core_py, "python"
    if _core is not None:
        return _core, "compiled"
    return _core_py, "python"


kernels, BACKEND = select_backend()

COMPILED_AVAILABLE = _core is not None
