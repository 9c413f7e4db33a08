"""
Walk paths: exact real-space sums and the k-space integral
"""

import threading
from typing import List, Optional

from ..algebra import MultiIndex
from ..exceptions import ConvergenceError
from ..walk import WalkState, evolve, moment, moment_kspace
from .base import MomentPath, PathResult


class RealSpace(MomentPath):
    """sum_x x^alpha P(x, t) over the evolved walk"""

    def __init__(self, crosscheck=None, config=None):
        super().__init__(crosscheck, config)
        self._state: Optional[WalkState] = None
        self._lock = threading.Lock()

    def state(self) -> WalkState:
        with self._lock:
            if self._state is None:
                problem = self.problem
                self._state = evolve(problem.q, problem.coin, problem.t)
            return self._state

    def compute(self, alpha: MultiIndex) -> List[PathResult]:
        value = moment(self.state(), alpha)
        return [self.result(alpha, value, 0.0, True, t=self.problem.t)]


class KSpace(MomentPath):
    """Psi_hat^dagger (i d/dk)^alpha Psi_hat averaged over the Brillouin zone"""

    def compute(self, alpha: MultiIndex) -> List[PathResult]:
        problem = self.problem
        tolerance = self.config.get("tolerance", 1e-6)
        try:
            value = moment_kspace(problem.q, problem.coin, problem.t, alpha, self.config.get("grid"), tolerance)
        except ConvergenceError as exc:
            return [self.failed(alpha, exc, t=problem.t)]
        return [self.result(alpha, value, tolerance, True, t=problem.t)]
