"""
Base moment path for the qwdirac cross-check
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from loguru import logger

from ..algebra import MultiIndex
from ..exceptions import ConvergenceError


@dataclass(frozen=True)
class PathResult:
    """One moment value produced by one path"""
    path: str
    alpha: MultiIndex
    value: float
    error: float
    converged: bool
    t: Optional[float] = None
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def label(self) -> str:
        return self.path if self.t is None else f"{self.path}@t={self.t:g}"

    def as_dict(self) -> Dict[str, Any]:
        out = {
            "path": self.path,
            "value": self.value,
            "error": self.error,
            "converged": self.converged,
        }
        if self.t is not None:
            out["t"] = self.t
        out.update(self.details)
        return out


class MomentPath(ABC):
    """Base class for every way of computing a joint moment"""

    def __init__(self, crosscheck=None, config: Optional[Dict[str, Any]] = None):
        self.crosscheck = crosscheck
        self.config = config or {}
        self.role = self.__class__.__name__.lower()
        self.status = "ready"

        logger.debug(f"Initialized {self.role} path")

    @property
    def problem(self):
        return self.crosscheck.problem

    @property
    def strict(self) -> bool:
        return bool(self.crosscheck and self.crosscheck.strict)

    @abstractmethod
    def compute(self, alpha: MultiIndex) -> List[PathResult]:
        """Moment(s) for one multi-index"""
        pass

    def get_status(self) -> str:
        return self.status

    def result(self, alpha: MultiIndex, value: float, error: float, converged: bool, **kwargs) -> PathResult:
        return PathResult(path=self.role, alpha=alpha, value=value, error=error, converged=converged, **kwargs)

    def failed(self, alpha: MultiIndex, exc: ConvergenceError, t: Optional[float] = None) -> PathResult:
        """Non-converged marker, or re-raise under strict mode"""
        if self.strict:
            raise exc
        logger.warning(f"{self.role} path failed for alpha={alpha}: {exc}")
        value = exc.estimate if exc.estimate is not None else float("nan")
        error = exc.error if exc.error is not None else float("inf")
        return self.result(alpha, value, error, False, t=t, details={"message": str(exc)})

    def compare_with(self, other_path: str, alpha: MultiIndex) -> Tuple[float, ...]:
        """Deviations between this path and another registered path"""
        if self.crosscheck:
            other = self.crosscheck.get_path(other_path)
            if other:
                mine = self.compute(alpha)
                theirs = other.compute(alpha)
                return tuple(abs(a.value - b.value) for a in mine for b in theirs)

        logger.warning(f"Could not compare with {other_path}")
        return ()
