"""
qwdirac

Discrete-time simple quantum walks, the free Dirac equation in momentum
space with an ultraviolet cutoff, and the closed-form pseudovelocity laws
that both converge to, with cross-checks between them.
"""

__version__ = "1.0.0"

from .algebra import PhysParams, QubitState, gamma, pauli, qubit
from .core import CrossCheck, DiracProblem, WalkProblem
from .exceptions import ConvergenceError, DomainError, QWDiracError
from .laws import DiracLimitLaw, KonnoLaw, TwoDimLaw, law_moment
from .monitoring import MonitoringService, monitor, track_call
from .paths import MomentPath

__all__ = [
    "PhysParams",
    "QubitState",
    "gamma",
    "pauli",
    "qubit",
    "CrossCheck",
    "DiracProblem",
    "WalkProblem",
    "MomentPath",
    "KonnoLaw",
    "TwoDimLaw",
    "DiracLimitLaw",
    "law_moment",
    "MonitoringService",
    "monitor",
    "track_call",
    "QWDiracError",
    "DomainError",
    "ConvergenceError",
]
