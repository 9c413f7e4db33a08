"""
Simple quantum walks on Z^d, d = 1, 2

A walk state stores its wavefunction on the box [-R, R]^d with R = t.
Entries outside the L1 ball of radius t are never written, so they stay
exactly zero and are not reported as occupied sites.

Shift convention: after the coin, component 2j-1 (the e^{+ik_j} phase of
S(k)) moves by -e_j and component 2j moves by +e_j. With the identity coin
and q = (1, 0) the walker sits at x = -t.
"""

import math
from dataclasses import dataclass
from typing import Callable, Dict, Iterator, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from numpy.typing import ArrayLike, NDArray

from .algebra import (
    DIMENSIONLESS,
    MultiIndex,
    PhysParams,
    QubitState,
    check_unitary,
    ensure_finite,
    multi_index,
)
from .exceptions import ConvergenceError, DomainError
from .monitoring import track_call

Site = Tuple[int, ...]


@dataclass(frozen=True)
class CoinOperator:
    """The 2d x 2d unitary quantum die"""
    d: int
    matrix: NDArray[np.complex128]
    a: Optional[complex] = None
    b: Optional[complex] = None
    p: Optional[float] = None

    @property
    def supports_limit_law(self) -> bool:
        """Konno's law needs 0 < |a| < 1; the 2D density needs p in (0, 1)"""
        if self.d == 1:
            return 0.0 < abs(self.a) < 1.0
        return self.p is not None


def coin1(a: complex, b: complex, tol: float = 1e-9) -> CoinOperator:
    """The U(2) coin with rows (a, b), (-conj(b), conj(a))"""
    a = ensure_finite(complex(a), "coin entry a")
    b = ensure_finite(complex(b), "coin entry b")
    norm2 = abs(a) ** 2 + abs(b) ** 2
    if abs(norm2 - 1.0) > tol:
        raise DomainError(f"coin entries must satisfy |a|^2 + |b|^2 = 1 within {tol:g}, got {norm2!r}")
    if a == 0:
        logger.warning("coin with a = 0 is fine for simulation but has no Konno limit law")
    matrix = np.array([[a, b], [-b.conjugate(), a.conjugate()]], dtype=np.complex128)
    matrix.flags.writeable = False
    return CoinOperator(d=1, matrix=matrix, a=a, b=b)


def coin2(p: float) -> CoinOperator:
    """The p-parameterized 4 x 4 coin; p = 1/2 is the Grover coin"""
    p = float(p)
    if not 0.0 < p < 1.0:
        raise DomainError(f"coin parameter p must lie in (0, 1), got {p!r}")
    q = 1.0 - p
    r = math.sqrt(p * q)
    matrix = np.array(
        [
            [-p, q, r, r],
            [q, -p, r, r],
            [r, r, -q, p],
            [r, r, p, -q],
        ],
        dtype=np.complex128,
    )
    matrix.flags.writeable = False
    if not check_unitary(matrix, 1e-12):
        raise DomainError(f"coin2({p!r}) failed the unitarity check")
    return CoinOperator(d=2, matrix=matrix, p=p)


@dataclass(frozen=True)
class WalkState:
    """Wavefunction Psi(x, t) on the box [-radius, radius]^d

    amplitudes has shape (2d, 2*radius+1, ..., 2*radius+1).
    """
    d: int
    t: int
    amplitudes: NDArray[np.complex128]

    @property
    def radius(self) -> int:
        return (self.amplitudes.shape[1] - 1) // 2

    def axis(self) -> NDArray[np.int64]:
        return np.arange(-self.radius, self.radius + 1)

    def coordinates(self) -> Tuple[NDArray[np.int64], ...]:
        """Site coordinates broadcast to the box shape, one array per axis"""
        return tuple(np.meshgrid(*([self.axis()] * self.d), indexing="ij"))

    def probabilities(self) -> NDArray[np.float64]:
        """P(x, t) on the box"""
        return np.sum(np.abs(self.amplitudes) ** 2, axis=0)

    def total_probability(self) -> float:
        return float(np.sum(self.probabilities()))

    def amplitude(self, site: Sequence[int]) -> NDArray[np.complex128]:
        """Amplitude vector at one site (zeros outside the box)"""
        if len(site) != self.d:
            raise DomainError(f"site {tuple(site)} must have {self.d} coordinates")
        if any(abs(x) > self.radius for x in site):
            return np.zeros(2 * self.d, dtype=np.complex128)
        index = tuple(x + self.radius for x in site)
        return self.amplitudes[(slice(None),) + index].copy()

    def sites(self) -> Iterator[Tuple[Site, NDArray[np.complex128]]]:
        """Occupied sites with their amplitudes, in lexicographic order"""
        occupied = np.argwhere(np.any(self.amplitudes != 0, axis=0))
        for index in occupied:
            site = tuple(int(i) - self.radius for i in index)
            yield site, self.amplitudes[(slice(None),) + tuple(index)].copy()


def _frozen_state(d: int, t: int, amplitudes: NDArray[np.complex128]) -> WalkState:
    amplitudes.flags.writeable = False
    return WalkState(d=d, t=t, amplitudes=amplitudes)


def initial_state(q: QubitState, d: int) -> WalkState:
    """All amplitude at the origin"""
    if q.n != 2 * d:
        raise DomainError(f"a {d}D walk needs a {2 * d}-component qubit, got {q.n}")
    amplitudes = np.zeros((2 * d,) + (1,) * d, dtype=np.complex128)
    amplitudes[(slice(None),) + (0,) * d] = q.vector
    return _frozen_state(d, 0, amplitudes)


def step(s: WalkState, c: CoinOperator, prune: float = 0.0) -> WalkState:
    """Apply the coin at every site, then shift each component one site"""
    if s.d != c.d:
        raise DomainError(f"walk dimension {s.d} does not match coin dimension {c.d}")
    d = s.d
    width = 2 * s.radius + 1
    mixed = np.tensordot(c.matrix, s.amplitudes, axes=([1], [0]))
    new = np.zeros((2 * d,) + (width + 2,) * d, dtype=np.complex128)
    for component in range(2 * d):
        axis, direction = divmod(component, 2)
        offset = 0 if direction == 0 else 2
        index = [slice(1, width + 1)] * d
        index[axis] = slice(offset, offset + width)
        new[(component,) + tuple(index)] = mixed[component]
    if prune > 0.0:
        new[np.abs(new) < prune] = 0.0
    return _frozen_state(d, s.t + 1, new)


@track_call("walk", "evolve")
def evolve(q: QubitState, c: CoinOperator, t: int, prune: float = 0.0) -> WalkState:
    """t steps of the walk from q at the origin"""
    if t < 0:
        raise DomainError(f"number of steps must be >= 0, got {t!r}")
    state = initial_state(q, c.d)
    for _ in range(t):
        state = step(state, c, prune)
    logger.debug(f"Evolved {c.d}D walk to t={t} (total probability {state.total_probability():.15f})")
    return state


def distribution(s: WalkState) -> Dict[Site, float]:
    """P(x, t) at every occupied site"""
    probabilities = s.probabilities()
    occupied = np.argwhere(probabilities > 0)
    return {
        tuple(int(i) - s.radius for i in index): float(probabilities[tuple(index)])
        for index in occupied
    }


def moment(s: WalkState, alpha: Sequence[int]) -> float:
    """Joint moment sum_x prod_j x_j^alpha_j P(x, t) by direct summation"""
    alpha = multi_index(alpha, s.d)
    weight = s.probabilities()
    for x, power in zip(s.coordinates(), alpha):
        if power:
            weight = weight * x.astype(float) ** power
    return float(np.sum(weight))


def walk_operator_sqw(c: CoinOperator, k: ArrayLike) -> NDArray[np.complex128]:
    """V(k) = S(k) A at the momenta k of shape (..., d)"""
    k = np.asarray(k, dtype=float)
    if k.shape[-1] != c.d:
        raise DomainError(f"momentum must have {c.d} components, got shape {k.shape}")
    phases = _shift_phases(k)
    return phases[..., :, None] * c.matrix


def _shift_phases(k: NDArray[np.float64]) -> NDArray[np.complex128]:
    """Diagonal of S(k): (e^{ik_1}, e^{-ik_1}, e^{ik_2}, e^{-ik_2}, ...)"""
    signs = np.array([1.0, -1.0])
    return np.exp(1j * (k[..., :, None] * signs).reshape(k.shape[:-1] + (2 * k.shape[-1],)))


def _kspace_moment_on_grid(q: QubitState, c: CoinOperator, t: int, alpha: MultiIndex, n: int) -> float:
    d = c.d
    axis = -math.pi + 2.0 * math.pi * np.arange(n) / n
    k = np.stack(np.meshgrid(*([axis] * d), indexing="ij"), axis=-1)
    phases = _shift_phases(k)
    psi = np.broadcast_to(q.vector, k.shape[:-1] + (2 * d,)).copy()
    for _ in range(t):
        psi = phases * (psi @ c.matrix.T)

    spatial = tuple(range(d))
    coefficients = np.fft.ifftn(psi, axes=spatial)
    x = np.fft.fftfreq(n, d=1.0 / n)
    factor = np.ones((n,) * d)
    for j, power in enumerate(alpha):
        if power:
            shape = [1] * d
            shape[j] = n
            factor = factor * (x ** power).reshape(shape)
    derived = np.fft.fftn(coefficients * factor[..., None], axes=spatial)
    return float(np.mean(np.sum(psi.conj() * derived, axis=-1)).real)


def moment_kspace(
    q: QubitState,
    c: CoinOperator,
    t: int,
    alpha: Sequence[int],
    n_grid: Optional[int] = None,
    tol: float = 1e-6,
) -> float:
    """Joint moment from the k-space integral of Psi_hat^dagger (i d/dk)^alpha Psi_hat

    Psi_hat(k, t) = V(k)^t q is built on a uniform periodic k-grid and
    differentiated spectrally. The value on n points is checked against the
    value on 2n points; a grid too coarse for t (n <= 2t) aliases and fails
    that check.
    """
    alpha = multi_index(alpha, c.d)
    if t < 0:
        raise DomainError(f"number of steps must be >= 0, got {t!r}")
    if q.n != 2 * c.d:
        raise DomainError(f"a {c.d}D walk needs a {2 * c.d}-component qubit, got {q.n}")
    n = n_grid or max(8, 1 << (2 * t + 1).bit_length())
    coarse = _kspace_moment_on_grid(q, c, t, alpha, n)
    fine = _kspace_moment_on_grid(q, c, t, alpha, 2 * n)
    scale = max(1.0, abs(fine))
    if abs(coarse - fine) > tol * scale:
        raise ConvergenceError(
            f"k-grid with {n} points is too coarse for t={t}: {coarse!r} vs {fine!r} on {2 * n} points",
            estimate=fine,
            error=abs(coarse - fine),
        )
    return fine


@dataclass(frozen=True)
class Histogram:
    """Probability mass per pseudovelocity bin"""
    edges: Tuple[NDArray[np.float64], ...]
    masses: NDArray[np.float64]

    @property
    def centers(self) -> Tuple[NDArray[np.float64], ...]:
        return tuple(0.5 * (e[1:] + e[:-1]) for e in self.edges)

    def densities(self) -> NDArray[np.float64]:
        """Mass divided by bin volume"""
        volume = np.ones_like(self.masses)
        for j, e in enumerate(self.edges):
            shape = [1] * len(self.edges)
            shape[j] = e.size - 1
            volume = volume * np.diff(e).reshape(shape)
        return self.masses / volume


def pseudovelocities(s: WalkState) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Velocities x/t of the occupied sites (N, d) and their probabilities"""
    if s.t < 1:
        raise DomainError("pseudovelocity X/t needs t >= 1")
    probabilities = s.probabilities()
    occupied = probabilities > 0
    velocities = np.stack([x[occupied] for x in s.coordinates()], axis=-1) / s.t
    return velocities, probabilities[occupied]


def pseudovelocity_histogram(s: WalkState, bins: int) -> Histogram:
    """Histogram of P over v = x/t with `bins` bins per axis on [-1, 1]"""
    if bins < 1:
        raise DomainError(f"number of bins must be >= 1, got {bins!r}")
    velocities, weights = pseudovelocities(s)
    masses, edges = np.histogramdd(velocities, bins=bins, range=[(-1.0, 1.0)] * s.d, weights=weights)
    return Histogram(edges=tuple(edges), masses=masses)


def velocity_mass(s: WalkState, outside: Callable[[NDArray[np.float64]], NDArray[np.bool_]]) -> float:
    """Probability of the pseudovelocities selected by `outside`"""
    velocities, weights = pseudovelocities(s)
    return float(np.sum(weights[outside(velocities)]))


def excess_mass_interval(s: WalkState, edge: float) -> float:
    """P(|V_1| > edge)"""
    return velocity_mass(s, lambda v: np.abs(v[:, 0]) > edge)


def excess_mass_ellipse(s: WalkState, p: float, margin: float) -> float:
    """Mass outside the ellipse with semi-axes sqrt(p) + margin, sqrt(1-p) + margin"""
    a1 = math.sqrt(p) + margin
    a2 = math.sqrt(1.0 - p) + margin
    return velocity_mass(s, lambda v: (v[:, 0] / a1) ** 2 + (v[:, 1] / a2) ** 2 >= 1.0)


def dispersion_sqw1(c: CoinOperator, k: float) -> Tuple[float, float]:
    """Eigenphases (omega, -omega) of V(k); cos(omega) = Re(e^{ik} a)

    det V(k) = |a|^2 + |b|^2 = 1, so the eigenvalues are e^{+-i omega}.
    """
    if c.d != 1:
        raise DomainError("dispersion_sqw1 needs a one-dimensional coin")
    cos_omega = (complex(math.cos(k), math.sin(k)) * c.a).real
    omega = math.acos(min(1.0, max(-1.0, cos_omega)))
    return omega, -omega


def group_velocity_sqw1(c: CoinOperator, k: ArrayLike) -> NDArray[np.float64]:
    """d omega / dk of the upper dispersion branch"""
    if c.d != 1:
        raise DomainError("group_velocity_sqw1 needs a one-dimensional coin")
    k = np.asarray(k, dtype=float)
    rotated = np.exp(1j * k) * c.a
    sin_omega = np.sqrt(np.clip(1.0 - rotated.real ** 2, 0.0, None))
    safe = np.where(sin_omega > 1e-15, sin_omega, 1.0)
    return np.where(sin_omega > 1e-15, rotated.imag / safe, 0.0)


def effective_hamiltonian_sqw1(c: CoinOperator, k: float, params: PhysParams = DIMENSIONLESS) -> NDArray[np.complex128]:
    """H(k) with V(k) = exp(-i H(k) / hbar), from the spectral projectors of V"""
    omega, _ = dispersion_sqw1(c, k)
    v = walk_operator_sqw(c, [k])
    identity = np.eye(2, dtype=np.complex128)
    if abs(math.sin(omega)) < 1e-12:
        return -params.hbar * omega * identity
    up = complex(math.cos(omega), math.sin(omega))
    projector_up = (v - up.conjugate() * identity) / (up - up.conjugate())
    projector_down = identity - projector_up
    return -params.hbar * omega * (projector_up - projector_down)


__all__ = [
    "CoinOperator",
    "coin1",
    "coin2",
    "WalkState",
    "Histogram",
    "initial_state",
    "step",
    "evolve",
    "distribution",
    "moment",
    "walk_operator_sqw",
    "moment_kspace",
    "pseudovelocities",
    "pseudovelocity_histogram",
    "velocity_mass",
    "excess_mass_interval",
    "excess_mass_ellipse",
    "dispersion_sqw1",
    "group_velocity_sqw1",
    "effective_hamiltonian_sqw1",
]
