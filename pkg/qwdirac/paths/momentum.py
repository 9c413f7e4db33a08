"""
Momentum-space path: the long-time moment as a cutoff-ball quadrature
"""

from typing import List

from ..algebra import MultiIndex
from ..dirac import asymptotic_moment
from ..exceptions import ConvergenceError
from .base import MomentPath, PathResult


class Asymptotic(MomentPath):
    """lim t^-|alpha| <X^alpha> from the |C_j|^2-weighted momentum integral"""

    def compute(self, alpha: MultiIndex) -> List[PathResult]:
        problem = self.problem
        self.status = "running"
        try:
            result = asymptotic_moment(problem.q, alpha, problem.ball, problem.params, problem.spec, self.strict)
        except ConvergenceError as exc:
            return [self.failed(alpha, exc)]
        finally:
            self.status = "ready"
        return [self.result(alpha, result.value, result.error, result.converged, details={"evaluations": result.evaluations})]
