"""SDP bounds on quantum channel capacities."""

from ._qcap import *  # noqa: F401,F403
from ._qcap import __doc__  # noqa: F401
