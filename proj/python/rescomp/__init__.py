"""Encoder error compensation with a sigmoid network or a Fourier-series model."""

from ._core import *  # noqa: F401,F403
from ._core import RescompError

__all__ = [name for name in dir() if not name.startswith("_")]
