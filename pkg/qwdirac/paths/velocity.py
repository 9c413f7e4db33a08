"""
Velocity-space path: moments of the closed-form Dirac limit law
"""

from typing import List

from ..algebra import MultiIndex
from ..exceptions import ConvergenceError
from ..laws import law_moment
from .base import MomentPath, PathResult


class Law(MomentPath):
    """Integral of v^alpha against nu_Dirac over the velocity support"""

    def compute(self, alpha: MultiIndex) -> List[PathResult]:
        problem = self.problem
        self.status = "running"
        try:
            result = law_moment(problem.law, alpha, problem.spec, self.strict)
        except ConvergenceError as exc:
            return [self.failed(alpha, exc)]
        finally:
            self.status = "ready"
        return [self.result(alpha, result.value, result.error, result.converged, details={"evaluations": result.evaluations})]
