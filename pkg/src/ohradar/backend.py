"""Selects the window-loop implementation at import time.

The compiled extension is used when it is importable; otherwise the
pure-Python loops take over. Set ``OHRADAR_BACKEND=python`` to force the
fallback.
"""

from __future__ import annotations

import logging
import os

from . import _reference

log = logging.getLogger(__name__)

KERNEL_NAMES = ("proposed_stats", "ca_stats", "os_stats", "cha_stats", "trunc_stats")


def _load_compiled():
    try:
        from . import _kernels
    except ImportError as exc:
        log.info("compiled kernels unavailable (%s); using pure-Python loops", exc)
        return None
    return _kernels


_compiled = None if os.environ.get("OHRADAR_BACKEND", "").lower() == "python" else _load_compiled()

BACKENDS = {"python": _reference}
if _compiled is not None:
    BACKENDS["compiled"] = _compiled

_active = "compiled" if _compiled is not None else "python"


def active() -> str:
    return _active


def kernels(name: str | None = None):
    """Return the kernel module for ``name`` (default: the active backend)."""
    name = name or _active
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} not available; have {sorted(BACKENDS)}") from None


def use(name: str) -> None:
    """Switch the active backend for subsequent detector calls."""
    global _active
    kernels(name)
    _active = name
