"""Convergence diagnostics for self-adjoint operators on weighted discrete spaces."""

from resolvlab._core import *  # noqa: F401,F403
from resolvlab import _core

__all__ = [name for name in dir(_core) if not name.startswith("_")]
