"""Backend selection for the enumeration kernel.

The compiled extension is used when it imports; otherwise, or when
``BPREDUCE_PURE_PYTHON=1`` is set, the pure-Python twin is used. Both expose
``count_animals(dim, nmax, split_depth, n_tasks, task_index)``.
"""

from __future__ import annotations

import logging
import os

from . import _fallback

log = logging.getLogger(__name__)

BACKEND = "python"
_compiled = None

if os.environ.get("BPREDUCE_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:  # extension not built
        log.debug("compiled kernel unavailable, using pure-Python enumeration")
        _compiled = None


def count_animals(dim: int, nmax: int, split_depth: int = 0, n_tasks: int = 1,
                  task_index: int = 0, backend: str | None = None):
    backend = backend or BACKEND
    if backend == "cython":
        if _compiled is None:
            raise RuntimeError("compiled kernel is not available")
        try:
            return _compiled.count_animals(dim, nmax, split_depth, n_tasks, task_index)
        except OverflowError:
            log.warning("128-bit overflow in kernel; widening to arbitrary precision")
            backend = "python"
    if backend == "python":
        return _fallback.count_animals(dim, nmax, split_depth, n_tasks, task_index)
    raise ValueError(f"unknown backend {backend!r}")


def available_backends() -> list[str]:
    return ["cython", "python"] if _compiled is not None else ["python"]
