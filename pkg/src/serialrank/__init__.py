"""Spectral ranking from pairwise comparisons by seriation of a similarity matrix."""

from .baselines import *  # noqa: F401,F403
from .compdata import *  # noqa: F401,F403
from .errors import (  # noqa: F401
    ConnectivityError,
    ConvergenceError,
    DegeneracyError,
    DegenerateDegreeError,
    DegenerateNoiseError,
    InvalidParameterError,
    InvalidSizeError,
    ParseError,
    RangeError,
    SerialRankError,
)
from .harness import *  # noqa: F401,F403
from .metrics import *  # noqa: F401,F403
from .similarity import *  # noqa: F401,F403
from .spectral import *  # noqa: F401,F403

__version__ = "0.1.0"
