"""
Closed-form pseudovelocity limit laws and their moments

- Konno's law for the one-dimensional walk: nu(v) = mu(v; |a|) (1 - s v).
- The two-dimensional walk density mu2 on the ellipse v1^2/p + v2^2/(1-p) < 1.
- The cutoff Dirac laws nu(v) = mu_d(|v|; Lambda) (1 + sum_j c_j v_j / c).

Dirac densities are taken with respect to d^d(v/c); the raw density per
d^d v is dirac_mu / c^d.
"""

import math
from dataclasses import dataclass, field
from functools import singledispatch
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .algebra import DIMENSIONLESS, PhysParams, QubitState, gamma, multi_index
from .dirac import ACTIVE_GAMMAS
from .exceptions import DomainError
from .monitoring import track_call
from .quadrature import (
    IntegrationResult,
    IntegrationSpec,
    Method,
    ball_volume,
    integrate_1d,
    integrate_ball,
    integrate_ellipse,
    monomial,
    sphere_area,
)

# ---------------------------------------------------------------------------
# One-dimensional walk
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KonnoLaw:
    """Konno's limit law for the coin (a, b) and initial qubit q"""
    a: complex
    b: complex
    q: QubitState

    def __post_init__(self):
        norm2 = abs(self.a) ** 2 + abs(self.b) ** 2
        if abs(norm2 - 1.0) > 1e-9:
            raise DomainError(f"coin entries must satisfy |a|^2 + |b|^2 = 1, got {norm2!r}")
        if not 0.0 < abs(self.a) < 1.0:
            raise DomainError(f"Konno's law needs 0 < |a| < 1, got |a| = {abs(self.a)!r}")
        if self.q.n != 2:
            raise DomainError(f"Konno's law needs a 2-component qubit, got {self.q.n}")

    d = 1

    @property
    def a_abs(self) -> float:
        return abs(self.a)

    @property
    def slope(self) -> float:
        """s = |q1|^2 - |q2|^2 + 2 Re(q1 conj(q2) a conj(b)) / |a|^2"""
        q1, q2 = self.q.amplitudes
        cross = q1 * q2.conjugate() * self.a * self.b.conjugate()
        return abs(q1) ** 2 - abs(q2) ** 2 + 2.0 * cross.real / self.a_abs ** 2

    def density(self, v: ArrayLike) -> NDArray[np.float64]:
        return konno_nu(v, self)


def konno_mu(v: ArrayLike, a_abs: float) -> NDArray[np.float64]:
    """sqrt(1-|a|^2) / (pi (1-v^2) sqrt(|a|^2-v^2)) on |v| < |a|, else 0"""
    if not 0.0 < a_abs < 1.0:
        raise DomainError(f"Konno density needs 0 < |a| < 1, got {a_abs!r}")
    v = np.asarray(v, dtype=float)
    gap = (a_abs - np.abs(v)) * (a_abs + np.abs(v))
    inside = (np.abs(v) < a_abs) & (gap > 0)
    safe_gap = np.where(inside, gap, 1.0)
    safe_v = np.where(inside, v, 0.0)
    value = math.sqrt(1.0 - a_abs ** 2) / (math.pi * (1.0 - safe_v ** 2) * np.sqrt(safe_gap))
    return np.where(inside, value, 0.0)


def konno_nu(v: ArrayLike, law: KonnoLaw) -> NDArray[np.float64]:
    v = np.asarray(v, dtype=float)
    return konno_mu(v, law.a_abs) * (1.0 - law.slope * v)


def konno_second_moment(a_abs: float) -> float:
    """Closed form of the integral of v^2 mu(v; |a|)"""
    return 1.0 - math.sqrt(1.0 - a_abs ** 2)


# ---------------------------------------------------------------------------
# Two-dimensional walk
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TwoDimLaw:
    """Density of the p-parameterized two-dimensional walk"""
    p: float

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise DomainError(f"2D law parameter p must lie in (0, 1), got {self.p!r}")

    d = 2

    def density(self, v: ArrayLike) -> NDArray[np.float64]:
        v = np.asarray(v, dtype=float)
        return mu2(v[..., 0], v[..., 1], self.p)


def mu2(v1: ArrayLike, v2: ArrayLike, p: float) -> NDArray[np.float64]:
    """2 / (pi^2 (v1+v2+1)(v1-v2+1)(v1+v2-1)(v1-v2-1)) inside the ellipse, else 0"""
    if not 0.0 < p < 1.0:
        raise DomainError(f"2D law parameter p must lie in (0, 1), got {p!r}")
    v1 = np.asarray(v1, dtype=float)
    v2 = np.asarray(v2, dtype=float)
    den = (v1 + v2 + 1.0) * (v1 - v2 + 1.0) * (v1 + v2 - 1.0) * (v1 - v2 - 1.0)
    inside = (v1 ** 2 / p + v2 ** 2 / (1.0 - p) < 1.0) & (den > 0)
    return np.where(inside, 2.0 / (math.pi ** 2 * np.where(inside, den, 1.0)), 0.0)


# ---------------------------------------------------------------------------
# Cutoff Dirac laws
# ---------------------------------------------------------------------------


def support_radius(cutoff_ratio: float, params: PhysParams = DIMENSIONLESS) -> float:
    """v_max = c Lambda / sqrt(1 + Lambda^2)"""
    if not cutoff_ratio > 0:
        raise DomainError(f"cutoff ratio Lambda must be positive, got {cutoff_ratio!r}")
    return params.c * cutoff_ratio / math.sqrt(1.0 + cutoff_ratio ** 2)


def normalization_constant(cutoff: float, params: PhysParams = DIMENSIONLESS, d: int = 3) -> float:
    """Norm of the constant spinor on |p| < lambda: vol(B_lambda)/(2 pi hbar)^d

    For d = 3 this is lambda^3 / (6 pi^2 hbar^3).
    """
    if not cutoff > 0:
        raise DomainError(f"cutoff lambda must be positive, got {cutoff!r}")
    _check_dirac_dimension(d)
    return ball_volume(d, cutoff) / (2.0 * math.pi * params.hbar) ** d


def _check_dirac_dimension(d: int):
    if d not in ACTIVE_GAMMAS:
        raise DomainError(f"Dirac law dimension must be in 1..4, got {d!r}")


def dirac_mu(d: int, v: ArrayLike, cutoff_ratio: float, params: PhysParams = DIMENSIONLESS) -> NDArray[np.float64]:
    """Radial density (1/omega_d) Lambda^-d (1 - v^2/c^2)^{-(d+2)/2} for |v| < v_max

    omega_d is the unit-ball volume, giving the constants 1/2, 1/pi, 3/(4 pi)
    and 2/pi^2 for d = 1..4.
    """
    _check_dirac_dimension(d)
    v_max = support_radius(cutoff_ratio, params)
    v = np.abs(np.asarray(v, dtype=float))
    inside = v < v_max
    beta2 = np.where(inside, (v / params.c) ** 2, 0.0)
    value = (1.0 - beta2) ** (-(d + 2) / 2) / (ball_volume(d) * cutoff_ratio ** d)
    return np.where(inside, value, 0.0)


def dirac_mu_raw(d: int, v: ArrayLike, cutoff_ratio: float, params: PhysParams = DIMENSIONLESS) -> NDArray[np.float64]:
    """dirac_mu per d^d v instead of d^d(v/c)"""
    return dirac_mu(d, v, cutoff_ratio, params) / params.c ** d


def dirac_weight_coeffs(d: int, q: QubitState) -> Tuple[float, ...]:
    """c_j = q^dagger (i gamma_4 gamma_j) q over the active gammas

    d = 3 gives 2Re(q1 q4* + q2 q3*), 2Im(q1* q4 - q2* q3), 2Re(q1 q3* - q2 q4*);
    d = 4 appends 2Im(q1* q3 + q2* q4) from gamma_5.
    """
    _check_dirac_dimension(d)
    if q.n != 4:
        raise DomainError(f"Dirac weights need a 4-component qubit, got {q.n}")
    vector = q.vector
    gamma4 = gamma(4)
    return tuple(
        float(np.real(vector.conj() @ (1j * gamma4 @ gamma(nu)) @ vector))
        for nu in ACTIVE_GAMMAS[d]
    )


@dataclass(frozen=True)
class DiracLimitLaw:
    """nu(v) = mu_d(|v|; Lambda) (1 + sum_j c_j v_j / c)"""
    d: int
    cutoff_ratio: float
    coeffs: Tuple[float, ...]
    params: PhysParams = field(default=DIMENSIONLESS)

    def __post_init__(self):
        _check_dirac_dimension(self.d)
        if not self.cutoff_ratio > 0:
            raise DomainError(f"cutoff ratio Lambda must be positive, got {self.cutoff_ratio!r}")
        if len(self.coeffs) != self.d:
            raise DomainError(f"a {self.d}D Dirac law needs {self.d} weight coefficients, got {len(self.coeffs)}")
        if sum(c * c for c in self.coeffs) > 1.0 + 1e-9:
            raise DomainError("weight coefficients must satisfy sum c_j^2 <= 1")

    @classmethod
    def from_qubit(cls, d: int, cutoff_ratio: float, q: QubitState, params: PhysParams = DIMENSIONLESS) -> "DiracLimitLaw":
        return cls(d=d, cutoff_ratio=cutoff_ratio, coeffs=dirac_weight_coeffs(d, q), params=params)

    @property
    def v_max(self) -> float:
        return support_radius(self.cutoff_ratio, self.params)

    def weight(self, v: ArrayLike) -> NDArray[np.float64]:
        v = np.asarray(v, dtype=float)
        return 1.0 + v @ np.asarray(self.coeffs) / self.params.c

    def density(self, v: ArrayLike) -> NDArray[np.float64]:
        """nu over d^d(v/c) at velocities of shape (..., d)"""
        v = np.asarray(v, dtype=float)
        speed = np.sqrt(np.sum(v ** 2, axis=-1))
        return dirac_mu(self.d, speed, self.cutoff_ratio, self.params) * self.weight(v)

    def min_weight(self) -> float:
        """Smallest value of the weight on the closed support"""
        return 1.0 - math.sqrt(sum(c * c for c in self.coeffs)) * self.v_max / self.params.c


def dirac_nu(d: int, v: ArrayLike, cutoff_ratio: float, q: QubitState, params: PhysParams = DIMENSIONLESS) -> NDArray[np.float64]:
    v = np.asarray(v, dtype=float)
    if v.ndim == 0 or v.shape[-1] != d:
        raise DomainError(f"velocity must have {d} components, got shape {v.shape}")
    return DiracLimitLaw.from_qubit(d, cutoff_ratio, q, params).density(v)


def _radial_integral(d: int, lower: float, upper: float, radial, spec: Optional[IntegrationSpec]) -> IntegrationResult:
    spec = spec or IntegrationSpec(tolerance=1e-11)
    if spec.method not in (None, Method.ADAPTIVE):
        spec = spec.with_method(Method.ADAPTIVE)
    return integrate_1d(lambda v: sphere_area(d) * v ** (d - 1) * radial(v), lower, upper, spec)


def dirac_mu_norm(d: int, cutoff_ratio: float, params: PhysParams = DIMENSIONLESS, spec: Optional[IntegrationSpec] = None) -> IntegrationResult:
    """Integral of dirac_mu over the support, as a radial quadrature"""
    v_max = support_radius(cutoff_ratio, params)
    result = _radial_integral(d, 0.0, v_max, lambda v: dirac_mu(d, v, cutoff_ratio, params), spec)
    return result.scaled(1.0 / params.c ** d)


def law_mass_above(d: int, cutoff_ratio: float, fraction: float, params: PhysParams = DIMENSIONLESS, spec: Optional[IntegrationSpec] = None) -> IntegrationResult:
    """mu_d mass in {|v| > fraction * v_max}"""
    if not 0.0 <= fraction < 1.0:
        raise DomainError(f"fraction must lie in [0, 1), got {fraction!r}")
    v_max = support_radius(cutoff_ratio, params)
    result = _radial_integral(
        d, fraction * v_max, v_max,
        lambda v: dirac_mu(d, v, cutoff_ratio, params), spec,
    )
    return result.scaled(1.0 / params.c ** d)


def dirac_radial_cdf(d: int, r: ArrayLike, cutoff_ratio: float, params: PhysParams = DIMENSIONLESS) -> NDArray[np.float64]:
    """P(|V| <= r) = (s / Lambda)^d with s = (r/c) / sqrt(1 - r^2/c^2)"""
    _check_dirac_dimension(d)
    v_max = support_radius(cutoff_ratio, params)
    r = np.clip(np.asarray(r, dtype=float), 0.0, v_max)
    beta = r / params.c
    s = beta / np.sqrt(1.0 - beta ** 2)
    return np.minimum((s / cutoff_ratio) ** d, 1.0)


def cutoff_norm_quadrature(cutoff: float, d: int = 3, params: PhysParams = DIMENSIONLESS, spec: Optional[IntegrationSpec] = None) -> IntegrationResult:
    """Integral of (mc / 2 pi hbar)^d (1 - v^2/c^2)^{-(d+2)/2} d^d v / c^d over the support

    Equals normalization_constant(cutoff, params, d) by the velocity change of variables.
    """
    _check_dirac_dimension(d)
    ratio = params.cutoff_ratio(cutoff)
    v_max = support_radius(ratio, params)
    prefactor = (params.m * params.c / (2.0 * math.pi * params.hbar)) ** d

    def radial(v):
        beta2 = np.minimum((v / params.c) ** 2, (v_max / params.c) ** 2)
        return prefactor * (1.0 - beta2) ** (-(d + 2) / 2)

    spec = spec or IntegrationSpec(tolerance=1e-12 * normalization_constant(cutoff, params, d))
    return _radial_integral(d, 0.0, v_max, radial, spec).scaled(1.0 / params.c ** d)


# ---------------------------------------------------------------------------
# Moments
# ---------------------------------------------------------------------------

Law = Union[KonnoLaw, TwoDimLaw, DiracLimitLaw]


@singledispatch
def _law_integral(law, alpha: Tuple[int, ...], spec: Optional[IntegrationSpec]) -> IntegrationResult:
    raise DomainError(f"no moment rule for {type(law).__name__}")


@_law_integral.register
def _(law: KonnoLaw, alpha, spec):
    spec = spec or IntegrationSpec(tolerance=1e-10, method=Method.DOUBLE_EXPONENTIAL)
    power = alpha[0]
    return integrate_1d(lambda v: v ** power * konno_nu(v, law), -law.a_abs, law.a_abs, spec)


@_law_integral.register
def _(law: TwoDimLaw, alpha, spec):
    spec = spec or IntegrationSpec(tolerance=1e-7, method=Method.DOUBLE_EXPONENTIAL)
    return integrate_ellipse(lambda v: monomial(v, alpha) * law.density(v), law.p, spec)


@_law_integral.register
def _(law: DiracLimitLaw, alpha, spec):
    scale = 1.0 / law.params.c ** law.d
    return integrate_ball(lambda v: monomial(v, alpha) * law.density(v), law.d, law.v_max, spec).scaled(scale)


@track_call("laws", "law_moment")
def law_moment(law: Law, alpha: Sequence[int], spec: Optional[IntegrationSpec] = None, strict: bool = False) -> IntegrationResult:
    """Velocity-space moment: the integral of prod_j v_j^alpha_j times the law's density"""
    alpha = multi_index(alpha, law.d)
    if not any(alpha):
        return IntegrationResult(1.0, 0.0, 0, True)
    result = _law_integral(law, alpha, spec)
    return result.checked(f"law moment {alpha} of {type(law).__name__}", strict)


def law_norm(law: Law, spec: Optional[IntegrationSpec] = None) -> IntegrationResult:
    """Total mass of the law by direct quadrature of its density"""
    return _law_integral(law, (0,) * law.d, spec)


__all__ = [
    "KonnoLaw",
    "TwoDimLaw",
    "DiracLimitLaw",
    "Law",
    "konno_mu",
    "konno_nu",
    "konno_second_moment",
    "mu2",
    "support_radius",
    "normalization_constant",
    "dirac_mu",
    "dirac_mu_raw",
    "dirac_weight_coeffs",
    "dirac_nu",
    "dirac_mu_norm",
    "law_mass_above",
    "dirac_radial_cdf",
    "cutoff_norm_quadrature",
    "law_moment",
    "law_norm",
]
