"""Online multi-object tracking with time-evolving template banks."""

from ._dttm import *  # noqa: F401,F403
from ._dttm import __doc__  # noqa: F401

__version__ = "0.1.0"
