"""
Cross-check orchestration for qwdirac

A CrossCheck owns one problem (a cutoff Dirac packet or a simple walk),
registers the moment paths that apply to it and runs them over a list of
multi-indices. Results come back in a fixed order whatever the thread count.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from loguru import logger

from .algebra import DIMENSIONLESS, MultiIndex, PhysParams, QubitState, multi_index
from .dirac import CutoffBall, GridSpec
from .laws import DiracLimitLaw
from .monitoring import MonitoringService, monitor
from .paths import Asymptotic, FiniteTime, KSpace, Law, MomentPath, PathResult, RealSpace
from .quadrature import IntegrationSpec
from .walk import CoinOperator

MAX_DEFAULT_THREADS = 8


def default_threads() -> int:
    """QWDIRAC_THREADS, else the CPU count capped at 8"""
    value = os.environ.get("QWDIRAC_THREADS")
    if value:
        try:
            threads = int(value)
        except ValueError:
            logger.warning(f"ignoring non-integer QWDIRAC_THREADS={value!r}")
        else:
            if threads >= 1:
                return threads
            logger.warning(f"ignoring QWDIRAC_THREADS={value!r}; it must be >= 1")
    return min(os.cpu_count() or 1, MAX_DEFAULT_THREADS)


@dataclass(frozen=True)
class DiracProblem:
    """Cutoff Dirac packet: dimension, Lambda, qubit and finite-time schedule"""
    d: int
    cutoff_ratio: float
    q: QubitState
    params: PhysParams = DIMENSIONLESS
    times: Tuple[float, ...] = ()
    spec: Optional[IntegrationSpec] = None
    grid: Optional[GridSpec] = None

    @property
    def ball(self) -> CutoffBall:
        return CutoffBall.from_ratio(self.cutoff_ratio, self.d, self.params)

    @property
    def law(self) -> DiracLimitLaw:
        return DiracLimitLaw.from_qubit(self.d, self.cutoff_ratio, self.q, self.params)


@dataclass(frozen=True)
class WalkProblem:
    """Simple walk from q at the origin after t steps"""
    coin: CoinOperator
    q: QubitState
    t: int

    @property
    def d(self) -> int:
        return self.coin.d


Problem = Union[DiracProblem, WalkProblem]


@dataclass
class CrossCheckEntry:
    """All path results for one multi-index, with their pairwise deviations"""
    alpha: MultiIndex
    results: List[PathResult] = field(default_factory=list)

    @property
    def deviations(self) -> Dict[str, float]:
        return {
            f"{a.label}~{b.label}": abs(a.value - b.value)
            for a, b in combinations(self.results, 2)
        }

    @property
    def converged(self) -> bool:
        return all(r.converged for r in self.results)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "alpha": list(self.alpha),
            "converged": self.converged,
            "results": [r.as_dict() for r in self.results],
            "deviations": self.deviations,
        }


class CrossCheck:
    """Runs every enabled moment path for a problem and compares them"""

    def __init__(
        self,
        problem: Problem,
        config: Optional[Dict[str, Any]] = None,
        monitoring: Optional[MonitoringService] = None,
    ):
        self.problem = problem
        self.config = config or {}
        self.strict = bool(self.config.get("strict", False))
        self.threads = int(self.config.get("threads") or default_threads())
        self.paths: Dict[str, MomentPath] = {}
        self.monitoring = monitoring or monitor

        self._initialize_paths()

        logger.info(f"Cross-check initialized with paths {list(self.paths)}")

    def _initialize_paths(self):
        """Register the paths that apply to the problem type"""
        if isinstance(self.problem, DiracProblem):
            path_classes = {
                'asymptotic': Asymptotic,
                'law': Law,
                'finitetime': FiniteTime,
            }
        else:
            path_classes = {
                'realspace': RealSpace,
                'kspace': KSpace,
            }

        path_config = self.config.get("paths", {})
        for name, path_class in path_classes.items():
            settings = path_config.get(name, {})
            if name == 'finitetime' and not self.problem.times:
                continue
            if settings.get('enabled', True):
                self.paths[name] = path_class(crosscheck=self, config=settings)
                logger.debug(f"Registered {name} path")

    def get_path(self, name: str) -> Optional[MomentPath]:
        """Get path by name"""
        return self.paths.get(name)

    def run(self, alphas: Sequence[Sequence[int]]) -> List[CrossCheckEntry]:
        """Evaluate every (alpha, path) pair on the worker pool"""
        indices = list(dict.fromkeys(multi_index(alpha, self.problem.d) for alpha in alphas))
        jobs = [(alpha, path) for alpha in indices for path in self.paths.values()]
        logger.info(f"Running {len(jobs)} moment jobs on {self.threads} threads")

        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            futures = [pool.submit(path.compute, alpha) for alpha, path in jobs]
            outputs = [future.result() for future in futures]

        entries = {alpha: CrossCheckEntry(alpha) for alpha in indices}
        for (alpha, _), results in zip(jobs, outputs):
            entries[alpha].results.extend(results)
        return [entries[alpha] for alpha in indices]

    def report(self, alphas: Sequence[Sequence[int]]) -> Dict[str, Any]:
        """Versioned JSON-ready report with timing statistics"""
        entries = self.run(alphas)
        return {
            "schema": 1,
            "paths": list(self.paths),
            "entries": [entry.as_dict() for entry in entries],
            "converged": all(entry.converged for entry in entries),
            "timings": self.monitoring.get_stats(),
        }
