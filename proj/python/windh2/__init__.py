"""Risk-aware dispatch for a wind + battery + hydrogen system."""

from windh2._core import *  # noqa: F401,F403
from windh2._core import __doc__  # noqa: F401
