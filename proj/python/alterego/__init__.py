"""Sector-allocation recommendations.

The heavy lifting lives in the compiled extension; this package just
re-exports it.
"""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401
