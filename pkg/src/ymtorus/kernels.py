"""Backend selection for the hot kernels.

Two interchangeable implementations exist: a compiled Cython extension
(``ymtorus._speedups``) and a pure-numpy fallback (``ymtorus._kernels_py``).
The compiled one is preferred when importable; set
``YMTORUS_FORCE_BACKEND=pure`` or ``=compiled`` to override, or call
:func:`use_backend` before computing (the run manifests record which
backend produced an output so reruns can pin it).
"""

from __future__ import annotations

import os

from . import _kernels_py
from .errors import ConfigError

try:
    from . import _speedups as _compiled
except ImportError:  # extension not built; fallback still provides everything
    _compiled = None

_BACKENDS = {"pure": _kernels_py}
if _compiled is not None:
    _BACKENDS["compiled"] = _compiled


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def _pick_default() -> str:
    forced = os.environ.get("YMTORUS_FORCE_BACKEND")
    if forced:
        if forced not in _BACKENDS:
            raise ConfigError(
                f"YMTORUS_FORCE_BACKEND={forced!r} not available "
                f"(choices: {', '.join(available_backends())})"
            )
        return forced
    return "compiled" if "compiled" in _BACKENDS else "pure"


_active_name = _pick_default()
_active = _BACKENDS[_active_name]


def use_backend(name: str) -> None:
    """Switch the active backend; raises ConfigError if unavailable."""
    global _active, _active_name
    if name not in _BACKENDS:
        raise ConfigError(
            f"kernel backend {name!r} not available (choices: {', '.join(available_backends())})"
        )
    _active_name = name
    _active = _BACKENDS[name]


def active_backend() -> str:
    return _active_name


def get_backend(name: str):
    """Backend module by name, for side-by-side comparisons and benchmarks."""
    if name not in _BACKENDS:
        raise ConfigError(f"kernel backend {name!r} not available")
    return _BACKENDS[name]


def curvature(coords, n, m):
    return _active.curvature(coords, n, m)


def residual(coords, n, m, eq_delta):
    return _active.residual(coords, n, m, eq_delta)


def objective(coords, n, m, eq_delta):
    return _active.objective(coords, n, m, eq_delta)


def gradient_fd(coords, n, m, eq_delta, h):
    return _active.gradient_fd(coords, n, m, eq_delta, h)
