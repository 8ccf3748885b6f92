"""Occupancy-measure learner for online constrained layered MDPs."""

from ucpd._ucpd import *  # noqa: F401,F403
from ucpd._ucpd import __doc__  # noqa: F401
