"""Backend selection for the hot numeric kernels.

Two interchangeable implementations exist: ``numba`` (jit-compiled, the
default when numba imports cleanly) and ``numpy`` (pure vectorized
fallback). Set the environment variable ``DOORRMST_BACKEND`` to ``numba``
or ``numpy`` before first use to force one; the choice is resolved once
and cached for the process.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable

from ..errors import BackendUnavailable
from . import numpy_impl

ENV_VAR = "DOORRMST_BACKEND"
BACKEND_NAMES = ("numba", "numpy")


@dataclass(frozen=True)
class Backend:
    name: str
    event_times: Callable
    tier_estimate: Callable


_NUMPY_BACKEND = Backend(
    name=numpy_impl.NAME,
    event_times=numpy_impl.event_times,
    tier_estimate=numpy_impl.tier_estimate,
)


def _load_numba_backend() -> Backend:
    from . import numba_impl

    return Backend(
        name=numba_impl.NAME,
        event_times=numba_impl.event_times,
        tier_estimate=numba_impl.tier_estimate,
    )


def load_backend(name: str | None = None) -> Backend:
    """Backend by name; ``None`` means numba when importable, else numpy."""
    if name is None or name == "":
        try:
            return _load_numba_backend()
        except ImportError:
            return _NUMPY_BACKEND
    if name == "numpy":
        return _NUMPY_BACKEND
    if name == "numba":
        try:
            return _load_numba_backend()
        except ImportError as exc:
            raise BackendUnavailable(
                f"{ENV_VAR}=numba requested but numba cannot be imported"
            ) from exc
    raise BackendUnavailable(
        f"unknown backend {name!r}; valid values: {', '.join(BACKEND_NAMES)}"
    )


_active: Backend | None = None


def active_backend() -> Backend:
    """Process-wide backend, resolved from ``DOORRMST_BACKEND`` on first use."""
    global _active
    if _active is None:
        _active = load_backend(os.environ.get(ENV_VAR) or None)
    return _active
