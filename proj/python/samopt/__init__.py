"""Arnoldi sampling and stochastic trust-region optimization."""

from ._samopt import *  # noqa: F401,F403
from ._samopt import __doc__  # noqa: F401
