"""
Figure data: one table per panel, each panel with fixed parameters

Figures 1-3 tabulate the closed-form densities (Konno at a = 1/sqrt(2),
mu2 at p = 1/2, the 3D cutoff Dirac density at Lambda = 1 and 10).
Figures 4-7 pair a walk panel (a) with a cutoff Dirac panel (b). For the
two-dimensional walk (figures 4 and 5) panel (a) is the simulated
pseudovelocity histogram next to the mu2 surface.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List

import numpy as np
import pandas as pd
from loguru import logger

from .algebra import DIMENSIONLESS, QubitState, normalized_qubit, qubit
from .exceptions import DomainError
from .export import grid_frame, histogram_frame
from .laws import KonnoLaw, dirac_mu, dirac_nu, konno_mu, konno_nu, mu2, support_radius
from .monitoring import track_call
from .walk import coin2, evolve, pseudovelocity_histogram

SQRT_HALF = math.sqrt(0.5)


@dataclass(frozen=True)
class Panel:
    """One emitted table"""
    name: str
    frame: pd.DataFrame
    parameters: Dict[str, Any] = field(default_factory=dict)


def velocity_axis(points: int, lower: float = -1.0, upper: float = 1.0) -> np.ndarray:
    return np.linspace(lower, upper, points)


def konno_panel(name: str, a: complex, b: complex, q: QubitState, points: int) -> Panel:
    law = KonnoLaw(a=a, b=b, q=q)
    v = velocity_axis(points)
    frame = pd.DataFrame({"v": v, "mu": konno_mu(v, law.a_abs), "nu": konno_nu(v, law)})
    return Panel(name, frame, {"a": a, "b": b, "q": q.amplitudes, "slope": law.slope})


def dirac_radial_panel(name: str, d: int, cutoff_ratio: float, points: int) -> Panel:
    v = velocity_axis(points, 0.0, DIMENSIONLESS.c)
    frame = pd.DataFrame({"v": v, "mu": dirac_mu(d, v, cutoff_ratio)})
    return Panel(name, frame, {"d": d, "lambda": cutoff_ratio, "v_max": support_radius(cutoff_ratio)})


def dirac_nu_panel(name: str, d: int, cutoff_ratio: float, q: QubitState, points: int) -> Panel:
    axes = [velocity_axis(points)] * d
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    nu = dirac_nu(d, mesh, cutoff_ratio, q)
    frame = grid_frame(axes, {"nu": nu})
    return Panel(name, frame, {"d": d, "lambda": cutoff_ratio, "q": q.amplitudes})


def mu2_panel(name: str, p: float, points: int) -> Panel:
    axes = [velocity_axis(points)] * 2
    v1, v2 = np.meshgrid(*axes, indexing="ij")
    return Panel(name, grid_frame(axes, {"mu": mu2(v1, v2, p)}), {"p": p})


def walk2_panel(name: str, p: float, q: QubitState, t: int, bins: int) -> Panel:
    """Simulated 2D pseudovelocity histogram with mu2 at the bin centres"""
    state = evolve(q, coin2(p), t)
    histogram = pseudovelocity_histogram(state, bins)
    c1, c2 = np.meshgrid(*histogram.centers, indexing="ij")
    frame = histogram_frame(histogram, {"mu2": mu2(c1, c2, p)})
    return Panel(name, frame, {"p": p, "q": q.amplitudes, "t": t, "bins": bins})


def _figure1(config) -> List[Panel]:
    v = velocity_axis(config.grid)
    return [Panel("fig1", pd.DataFrame({"v": v, "mu": konno_mu(v, SQRT_HALF)}), {"a_abs": SQRT_HALF})]


def _figure2(config) -> List[Panel]:
    return [mu2_panel("fig2", 0.5, config.grid)]


def _figure3(config) -> List[Panel]:
    return [
        dirac_radial_panel("fig3_lambda1", 3, 1.0, config.grid),
        dirac_radial_panel("fig3_lambda10", 3, 10.0, config.grid),
    ]


def _figure4(config) -> List[Panel]:
    qa = qubit((0.5, -0.5j, -0.5, 0.5j))
    qb = qubit((SQRT_HALF, SQRT_HALF, 0, 0))
    return [
        walk2_panel("fig4a", 0.5, qa, config.t, config.bins),
        dirac_nu_panel("fig4b", 2, 1.0, qb, config.grid),
    ]


def _figure5(config) -> List[Panel]:
    qa = qubit((0.5, 0.5j, 0.5j, -0.5))
    scale = 1.0 / (2.0 * math.sqrt(2.0))
    qb = qubit((-(1 + 1j) * scale, -(1 + 1j) * scale, (1 + 1j) * scale, (1 - 1j) * scale))
    return [
        walk2_panel("fig5a", 0.5, qa, config.t, config.bins),
        dirac_nu_panel("fig5b", 2, 1.0, qb, config.grid),
    ]


def _figure6(config) -> List[Panel]:
    a = 1j * math.sqrt(0.7)
    b = 1j * math.sqrt(0.3)
    qa = qubit((SQRT_HALF, 1j * SQRT_HALF))
    qb = qubit((SQRT_HALF, SQRT_HALF, 0, 0))
    return [
        konno_panel("fig6a", a, b, qa, config.grid),
        dirac_nu_panel("fig6b", 1, 3.0, qb, config.grid),
    ]


def _figure7(config) -> List[Panel]:
    a = complex(math.sqrt(0.7))
    b = 1j * math.sqrt(0.3)
    qa = qubit((1 / math.sqrt(5), 2j / math.sqrt(5)))
    qb = normalized_qubit((1, 1, 2, 2))
    return [
        konno_panel("fig7a", a, b, qa, config.grid),
        dirac_nu_panel("fig7b", 1, 3.0, qb, config.grid),
    ]


FIGURES: Dict[int, Callable[[Any], List[Panel]]] = {
    1: _figure1,
    2: _figure2,
    3: _figure3,
    4: _figure4,
    5: _figure5,
    6: _figure6,
    7: _figure7,
}


@track_call("figures", "figure_panels")
def figure_panels(config) -> List[Panel]:
    """Panels for config.figure using its grid, t and bins settings"""
    builder = FIGURES.get(config.figure)
    if builder is None:
        raise DomainError(f"unknown figure id {config.figure!r}; expected 1..7")
    panels = builder(config)
    logger.info(f"Figure {config.figure}: {len(panels)} panel(s)")
    return panels


__all__ = [
    "Panel",
    "FIGURES",
    "figure_panels",
    "konno_panel",
    "dirac_radial_panel",
    "dirac_nu_panel",
    "mu2_panel",
    "walk2_panel",
    "velocity_axis",
]
