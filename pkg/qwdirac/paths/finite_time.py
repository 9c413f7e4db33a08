"""
Finite-time path: <V^alpha> at each scheduled t from the evolved spinor
"""

from typing import List

from loguru import logger

from ..algebra import MultiIndex
from ..dirac import finite_time_moment
from ..exceptions import ConvergenceError
from .base import MomentPath, PathResult


class FiniteTime(MomentPath):
    """One result per time in the problem's schedule"""

    def compute(self, alpha: MultiIndex) -> List[PathResult]:
        problem = self.problem
        results = []
        for t in problem.times:
            logger.debug(f"finite-time moment alpha={alpha} at t={t}")
            try:
                moment = finite_time_moment(problem.q, alpha, problem.ball, t, problem.grid, problem.params)
            except ConvergenceError as exc:
                results.append(self.failed(alpha, exc, t=t))
                continue
            results.append(
                self.result(
                    alpha,
                    moment.value,
                    moment.error,
                    True,
                    t=t,
                    details={"shell_mass": moment.shell_mass, "step": moment.step},
                )
            )
        return results
