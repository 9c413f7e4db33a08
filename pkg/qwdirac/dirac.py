"""
Free Dirac dynamics in momentum space with an ultraviolet cutoff

One engine serves d = 1..4 momentum components. The component p_j couples
through gamma_j for j = 1..3; for d = 4 the fourth component couples through
gamma_5. Momenta are numpy arrays of shape (..., d) and every function
broadcasts over the leading axes.

H(p) = gamma_4 (i c sum_j gamma_j p_j + m c^2), E(p) = sqrt((pc)^2 + (mc^2)^2),
U(p) = (sqrt(E + mc^2) I + i c sum_j gamma_j p_j / sqrt(E + mc^2)) / sqrt(2E)
with U H U^dagger = E gamma_4. Row j of U is w_j^dagger, so C = U q.
"""

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from numpy.typing import ArrayLike, NDArray

from .algebra import DIMENSIONLESS, IDENTITY4, PhysParams, QubitState, gamma, multi_index
from .exceptions import ConvergenceError, DomainError
from .monitoring import track_call
from .quadrature import IntegrationResult, IntegrationSpec, ball_volume, integrate_ball, monomial

ACTIVE_GAMMAS = {1: (1,), 2: (1, 2), 3: (1, 2, 3), 4: (1, 2, 3, 5)}

_GAMMA4 = gamma(4)
_ENERGY_SIGNS = np.array([1.0, 1.0, -1.0, -1.0])


def _gamma_stack(d: int) -> NDArray[np.complex128]:
    if d not in ACTIVE_GAMMAS:
        raise DomainError(f"momentum dimension must be in 1..4, got {d!r}")
    return np.stack([gamma(nu) for nu in ACTIVE_GAMMAS[d]])


def as_momentum(p: ArrayLike, d: Optional[int] = None) -> NDArray[np.float64]:
    """Validate momenta of shape (..., d)"""
    p = np.asarray(p, dtype=float)
    if p.ndim == 0:
        p = p.reshape(1)
    if p.shape[-1] not in ACTIVE_GAMMAS or (d is not None and p.shape[-1] != d):
        raise DomainError(f"momentum must have {d or '1..4'} components, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise DomainError("momentum components must be finite")
    return p


@dataclass(frozen=True)
class CutoffBall:
    """Momentum ball |p| < cutoff in d dimensions"""
    cutoff: float
    d: int

    def __post_init__(self):
        if not self.cutoff > 0:
            raise DomainError(f"cutoff lambda must be positive, got {self.cutoff!r}")
        if self.d not in ACTIVE_GAMMAS:
            raise DomainError(f"momentum dimension must be in 1..4, got {self.d!r}")

    @classmethod
    def from_ratio(cls, cutoff_ratio: float, d: int, params: PhysParams = DIMENSIONLESS) -> "CutoffBall":
        """Ball for the dimensionless cutoff Lambda = lambda/(mc)"""
        if not cutoff_ratio > 0:
            raise DomainError(f"cutoff ratio Lambda must be positive, got {cutoff_ratio!r}")
        return cls(cutoff=params.cutoff_momentum(cutoff_ratio), d=d)

    @property
    def volume(self) -> float:
        return ball_volume(self.d, self.cutoff)


@dataclass(frozen=True)
class SpectralData:
    """Energy, FWT matrix and projection coefficients at one momentum"""
    energy: float
    fwt: NDArray[np.complex128]
    coefficients: NDArray[np.complex128]

    @property
    def rows(self) -> Tuple[NDArray[np.complex128], ...]:
        """w_j^dagger for j = 1..4"""
        return tuple(self.fwt[j] for j in range(4))

    @property
    def eigenvectors(self) -> Tuple[NDArray[np.complex128], ...]:
        """w_j: the first two have energy +E, the last two -E"""
        return tuple(self.fwt[j].conj() for j in range(4))


def energy(p: ArrayLike, params: PhysParams = DIMENSIONLESS) -> NDArray[np.float64]:
    p = as_momentum(p)
    pc2 = np.sum(p ** 2, axis=-1) * params.c ** 2
    return np.sqrt(pc2 + params.rest_energy ** 2)


def _momentum_term(p: NDArray[np.float64], params: PhysParams) -> NDArray[np.complex128]:
    """i c sum_j gamma_j p_j"""
    return 1j * params.c * np.einsum("...k,kab->...ab", p, _gamma_stack(p.shape[-1]))


def hamiltonian(p: ArrayLike, params: PhysParams = DIMENSIONLESS) -> NDArray[np.complex128]:
    p = as_momentum(p)
    inner = _momentum_term(p, params) + params.rest_energy * IDENTITY4
    return _GAMMA4 @ inner


def fwt_matrix(p: ArrayLike, params: PhysParams = DIMENSIONLESS) -> NDArray[np.complex128]:
    """Foldy-Wouthuysen-Tani matrix U(p)"""
    p = as_momentum(p)
    e = energy(p, params)
    root = np.sqrt(e + params.rest_energy)[..., None, None]
    u = root * IDENTITY4 + _momentum_term(p, params) / root
    return u / np.sqrt(2.0 * e)[..., None, None]


def coefficients(q: QubitState, p: ArrayLike, params: PhysParams = DIMENSIONLESS) -> NDArray[np.complex128]:
    """C_j(p) = w_j(p)^dagger q, shape (..., 4)"""
    _require_spinor(q)
    return fwt_matrix(p, params) @ q.vector


def spectral(p: ArrayLike, q: QubitState, params: PhysParams = DIMENSIONLESS) -> SpectralData:
    """Spectral record at a single momentum"""
    p = as_momentum(p)
    if p.ndim != 1:
        raise DomainError("spectral() takes a single momentum point")
    _require_spinor(q)
    u = fwt_matrix(p, params)
    return SpectralData(energy=float(energy(p, params)), fwt=u, coefficients=u @ q.vector)


def propagator(p: ArrayLike, t: float, params: PhysParams = DIMENSIONLESS) -> NDArray[np.complex128]:
    """U^dagger diag(e^{-iEt/hbar} x2, e^{+iEt/hbar} x2) U = exp(-i H t / hbar)"""
    p = as_momentum(p)
    u = fwt_matrix(p, params)
    phases = np.exp(-1j * energy(p, params)[..., None] * _ENERGY_SIGNS * t / params.hbar)
    return np.swapaxes(u.conj(), -1, -2) @ (phases[..., :, None] * u)


def walk_operator(p: ArrayLike, params: PhysParams = DIMENSIONLESS) -> NDArray[np.complex128]:
    """One-step operator V(p) = exp(-i H(p) / hbar); V^t = propagator(p, t) for integer t"""
    return propagator(p, 1.0, params)


def evolve_spinor(q: QubitState, p: ArrayLike, t: float, params: PhysParams = DIMENSIONLESS) -> NDArray[np.complex128]:
    """Psi_hat(p, t) = e^{-iEt/hbar}(w1 C1 + w2 C2) + e^{iEt/hbar}(w3 C3 + w4 C4)"""
    _require_spinor(q)
    p = as_momentum(p)
    u = fwt_matrix(p, params)
    c = u @ q.vector
    phases = np.exp(-1j * energy(p, params)[..., None] * _ENERGY_SIGNS * t / params.hbar)
    return np.einsum("...ji,...j->...i", u.conj(), phases * c)


def momentum_to_velocity(p: ArrayLike, params: PhysParams = DIMENSIONLESS) -> NDArray[np.float64]:
    """v_j = c^2 p_j / E(p), which is also dE/dp_j"""
    p = as_momentum(p)
    return params.c ** 2 * p / energy(p, params)[..., None]


def velocity_to_momentum(v: ArrayLike, params: PhysParams = DIMENSIONLESS) -> NDArray[np.float64]:
    """p_j = m v_j / sqrt(1 - v^2/c^2); requires |v| < c"""
    v = as_momentum(v)
    beta2 = np.sum(v ** 2, axis=-1) / params.c ** 2
    if np.any(beta2 >= 1.0):
        raise DomainError("velocity must satisfy |v| < c")
    return params.m * v / np.sqrt(1.0 - beta2)[..., None]


def jacobian(p: ArrayLike, params: PhysParams = DIMENSIONLESS) -> NDArray[np.float64]:
    """det dv/dp = (c^2/E)^d (mc^2/E)^2; for d = 3 this is c^10 m^2 / E^5"""
    p = as_momentum(p)
    e = energy(p, params)
    d = p.shape[-1]
    return (params.c ** 2 / e) ** d * (params.rest_energy / e) ** 2


def jacobian_velocity(v: ArrayLike, params: PhysParams = DIMENSIONLESS) -> NDArray[np.float64]:
    """The same Jacobian in velocity form, (1 - v^2/c^2)^{(d+2)/2} / m^d"""
    v = as_momentum(v)
    d = v.shape[-1]
    beta2 = np.sum(v ** 2, axis=-1) / params.c ** 2
    return (1.0 - beta2) ** ((d + 2) / 2) / params.m ** d


def ball_normalization(cutoff: float, d: int, params: PhysParams = DIMENSIONLESS) -> float:
    """Norm of the constant unit spinor on the cutoff ball: vol(B_lambda) / (2 pi hbar)^d"""
    return ball_volume(d, cutoff) / (2.0 * math.pi * params.hbar) ** d


def _require_spinor(q: QubitState):
    if q.n != 4:
        raise DomainError(f"Dirac dynamics needs a 4-component qubit, got {q.n}")


def moment_weight(q: QubitState, p: ArrayLike, alpha: Sequence[int], params: PhysParams = DIMENSIONLESS) -> NDArray[np.float64]:
    """(|C1|^2 + |C2|^2 + (-1)^|alpha| (|C3|^2 + |C4|^2)) prod_j (dE/dp_j)^alpha_j"""
    p = as_momentum(p)
    weights = np.abs(coefficients(q, p, params)) ** 2
    sign = -1.0 if sum(alpha) % 2 else 1.0
    branch = weights[..., 0] + weights[..., 1] + sign * (weights[..., 2] + weights[..., 3])
    return branch * monomial(momentum_to_velocity(p, params), alpha)


@track_call("dirac", "asymptotic_moment")
def asymptotic_moment(
    q: QubitState,
    alpha: Sequence[int],
    ball: CutoffBall,
    params: PhysParams = DIMENSIONLESS,
    spec: Optional[IntegrationSpec] = None,
    strict: bool = False,
) -> IntegrationResult:
    """lim t^-|alpha| <prod X_j^alpha_j> as a normalized momentum-space integral

    The momentum measure d^dp/(2 pi hbar)^d and the cutoff normalization
    vol(B)/(2 pi hbar)^d cancel, leaving the ball average of moment_weight.
    """
    _require_spinor(q)
    alpha = multi_index(alpha, ball.d)
    if not any(alpha):
        return IntegrationResult(1.0, 0.0, 0, True)
    result = integrate_ball(lambda p: moment_weight(q, p, alpha, params), ball.d, ball.cutoff, spec)
    return result.scaled(1.0 / ball.volume).checked(f"asymptotic moment {alpha}", strict)


@dataclass(frozen=True)
class GridSpec:
    """Momentum grid for finite-time moments"""
    points_per_axis: Optional[int] = None
    max_phase_step: float = 0.25

    def resolve(self, d: int) -> int:
        if self.points_per_axis is not None:
            return self.points_per_axis
        return {1: 1 << 18, 2: 512, 3: 64, 4: 24}[d]


@dataclass(frozen=True)
class FiniteTimeMoment:
    value: float
    error: float
    shell_mass: float
    step: float


# central stencils (offsets, coefficients) for the n-th derivative, times h^n
_STENCILS = {
    1: ((-1, 1), (-0.5, 0.5)),
    2: ((-1, 0, 1), (1.0, -2.0, 1.0)),
    3: ((-2, -1, 1, 2), (-0.5, 1.0, -1.0, 0.5)),
    4: ((-2, -1, 0, 1, 2), (1.0, -4.0, 6.0, -4.0, 1.0)),
}


def _derivative(values: NDArray[np.complex128], axis: int, order: int, h: float) -> NDArray[np.complex128]:
    """Central difference along a periodic-free axis; edge rows are left invalid"""
    offsets, weights = _STENCILS[order]
    out = np.zeros_like(values)
    for offset, weight in zip(offsets, weights):
        out += weight * np.roll(values, -offset, axis=axis)
    return out / h ** order


def _finite_time_on_grid(
    q: QubitState, alpha: Sequence[int], ball: CutoffBall, t: float, n: int, params: PhysParams
) -> Tuple[float, float, float]:
    d = ball.d
    h = 2.0 * ball.cutoff / n
    axis = -ball.cutoff + h * (np.arange(n) + 0.5)
    p = np.stack(np.meshgrid(*([axis] * d), indexing="ij"), axis=-1)
    radius = np.sqrt(np.sum(p ** 2, axis=-1))
    inside = radius < ball.cutoff
    psi = evolve_spinor(q, p, t, params)
    psi[~inside] = 0.0

    derived = psi
    for j, order in enumerate(alpha):
        if order:
            derived = _derivative(derived, j, order, h) * (1j * params.hbar) ** order
    reach = math.sqrt(sum((len(_STENCILS[a][0]) // 2) ** 2 for a in alpha if a))
    interior = radius < ball.cutoff - h * max(2.0, reach)
    cell = h ** d
    density = np.sum(psi.conj() * derived, axis=-1).real
    value = float(np.sum(density[interior])) * cell / ball.volume
    shell = 1.0 - float(np.count_nonzero(interior)) * cell / ball.volume
    return value / t ** sum(alpha), max(shell, 0.0), h


@track_call("dirac", "finite_time_moment")
def finite_time_moment(
    q: QubitState,
    alpha: Sequence[int],
    ball: CutoffBall,
    t: float,
    grid: Optional[GridSpec] = None,
    params: PhysParams = DIMENSIONLESS,
) -> FiniteTimeMoment:
    """<prod V_j^alpha_j> at time t from central differences of Psi_hat(p, t)

    Derivatives are taken only at grid points at least two steps inside the
    cutoff sphere; the excluded shell's share of the ball is returned as
    shell_mass. The error is the change against a grid with half the points.
    """
    _require_spinor(q)
    alpha = multi_index(alpha, ball.d)
    if not t > 0:
        raise DomainError(f"finite-time moments need t > 0, got {t!r}")
    if any(a > 4 for a in alpha):
        raise DomainError(f"finite-time moments support exponents up to 4 per axis, got {alpha}")
    if not any(alpha):
        return FiniteTimeMoment(1.0, 0.0, 0.0, 0.0)

    grid = grid or GridSpec()
    n = grid.resolve(ball.d)
    h = 2.0 * ball.cutoff / n
    v_max = params.c * ball.cutoff / math.hypot(params.m * params.c, ball.cutoff)
    phase_step = h * t * v_max / params.hbar
    if phase_step > grid.max_phase_step:
        raise ConvergenceError(
            f"momentum grid too coarse for t={t}: phase step {phase_step:.3g} rad exceeds {grid.max_phase_step}"
        )

    value, shell, step_size = _finite_time_on_grid(q, alpha, ball, t, n, params)
    coarse, _, _ = _finite_time_on_grid(q, alpha, ball, t, n // 2, params)
    if shell > 1e-3:
        logger.warning(f"finite-time moment excludes a boundary shell holding {shell:.2e} of the cutoff ball")
    return FiniteTimeMoment(value=value, error=abs(value - coarse), shell_mass=shell, step=step_size)


@dataclass(frozen=True)
class BoxSpec:
    """Periodic position box of side `length` with `points` sites per axis"""
    length: float
    points: int

    @property
    def spacing(self) -> float:
        return self.length / self.points


@dataclass(frozen=True)
class PositionDistribution:
    """Normalized |Psi(x, t)|^2 on the box lattice"""
    t: float
    axis: NDArray[np.float64]
    probabilities: NDArray[np.float64]

    @property
    def d(self) -> int:
        return self.probabilities.ndim

    def coordinates(self) -> Tuple[NDArray[np.float64], ...]:
        return tuple(np.meshgrid(*([self.axis] * self.d), indexing="ij"))

    def mass_outside(self, radius: float) -> float:
        r = np.sqrt(sum(x ** 2 for x in self.coordinates()))
        return float(np.sum(self.probabilities[r > radius]))

    def pseudovelocities(self) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
        if not self.t > 0:
            raise DomainError("pseudovelocity X/t needs t > 0")
        velocities = np.stack([x.ravel() for x in self.coordinates()], axis=-1) / self.t
        return velocities, self.probabilities.ravel()

    def as_dict(self):
        """Site -> probability for the nonzero sites"""
        coords = self.coordinates()
        nonzero = np.argwhere(self.probabilities > 0)
        return {
            tuple(float(x[tuple(i)]) for x in coords): float(self.probabilities[tuple(i)])
            for i in nonzero
        }


@track_call("dirac", "synth_position")
def synth_position(
    q: QubitState,
    ball: CutoffBall,
    t: float,
    box: BoxSpec,
    params: PhysParams = DIMENSIONLESS,
) -> PositionDistribution:
    """Position distribution of the cutoff wave packet on a periodic box

    Psi(x, t) = sum_p e^{ipx/hbar} Psi_hat(p, t) over the box's momentum
    lattice restricted to |p| < cutoff. Needs c t < L/2 (no wraparound) and
    cutoff below the Nyquist momentum pi hbar / a.
    """
    _require_spinor(q)
    if t < 0:
        raise DomainError(f"time must be >= 0, got {t!r}")
    a = box.spacing
    if not params.c * t < box.length / 2:
        raise DomainError(f"box of length {box.length} wraps around: need c t < L/2, got c t = {params.c * t}")
    nyquist = math.pi * params.hbar / a
    if not ball.cutoff < nyquist:
        raise DomainError(f"cutoff {ball.cutoff} is not below the grid Nyquist momentum {nyquist:.6g}")

    d = ball.d
    n = box.points
    k_axis = 2.0 * math.pi * params.hbar * np.fft.fftfreq(n, d=a)
    p = np.stack(np.meshgrid(*([k_axis] * d), indexing="ij"), axis=-1)
    inside = np.sum(p ** 2, axis=-1) < ball.cutoff ** 2
    psi_hat = np.zeros(p.shape[:-1] + (4,), dtype=np.complex128)
    psi_hat[inside] = evolve_spinor(q, p[inside], t, params)

    psi = np.fft.ifftn(psi_hat, axes=tuple(range(d)))
    probabilities = np.fft.fftshift(np.sum(np.abs(psi) ** 2, axis=-1))
    probabilities /= np.sum(probabilities)
    axis = a * (np.arange(n) - n // 2)
    logger.debug(f"Synthesised {d}D position distribution at t={t} on {n}^{d} sites")
    return PositionDistribution(t=t, axis=axis, probabilities=probabilities)


__all__ = [
    "ACTIVE_GAMMAS",
    "CutoffBall",
    "SpectralData",
    "GridSpec",
    "FiniteTimeMoment",
    "BoxSpec",
    "PositionDistribution",
    "as_momentum",
    "energy",
    "hamiltonian",
    "fwt_matrix",
    "coefficients",
    "spectral",
    "propagator",
    "walk_operator",
    "evolve_spinor",
    "momentum_to_velocity",
    "velocity_to_momentum",
    "jacobian",
    "jacobian_velocity",
    "ball_normalization",
    "moment_weight",
    "asymptotic_moment",
    "finite_time_moment",
    "synth_position",
]
