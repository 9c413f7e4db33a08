"""
Moment paths compared by the qwdirac cross-check
"""

from .base import MomentPath, PathResult
from .finite_time import FiniteTime
from .momentum import Asymptotic
from .velocity import Law
from .walk import KSpace, RealSpace

__all__ = [
    'MomentPath',
    'PathResult',
    'Asymptotic',
    'Law',
    'FiniteTime',
    'RealSpace',
    'KSpace'
]
