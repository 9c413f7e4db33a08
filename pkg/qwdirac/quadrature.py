"""
Quadrature backbone

- integrate_1d: adaptive Gauss-Kronrod (QUADPACK through scipy), tanh-sinh
  with open endpoints, or escalating Gauss-Legendre.
- integrate_ball: radial Gauss-Legendre times a sphere rule (d=1..3, and the
  hyperspherical "tensor" rule for d=4), or seeded Monte-Carlo.
- integrate_ellipse: the ellipse v1^2/p + v2^2/(1-p) < 1, either rescaled to
  the unit disk or mapped onto a rectangle whose corners carry the tangency
  points, then integrated with a tensor tanh-sinh rule.

Integrands of the vectorised rules take an array of shape (N,) (1D) or (N, d)
and return shape (N,). Tolerances are absolute.
"""

import math
from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from numpy.typing import NDArray
from scipy import integrate as sp_integrate
from scipy.special import roots_chebyu, roots_legendre

from .exceptions import ConvergenceError, DomainError

DEFAULT_SEED = 0x5157_4449_5241_43  # fixed 64-bit default

_EPS = np.finfo(float).eps
_TANH_SINH_T_MAX = 4.0
_HALF_PI = 0.5 * math.pi

Integrand1D = Callable[[NDArray[np.float64]], NDArray[np.float64]]
IntegrandND = Callable[[NDArray[np.float64]], NDArray[np.float64]]


class Method(str, Enum):
    """Quadrature method hints"""
    ADAPTIVE = "adaptive"
    DOUBLE_EXPONENTIAL = "double-exponential"
    SPHERICAL_PRODUCT = "spherical-product"
    TENSOR = "tensor"
    MONTE_CARLO = "monte-carlo"


@dataclass(frozen=True)
class IntegrationSpec:
    """Tolerance, budget and method hint for one integration"""
    tolerance: float = 1e-10
    max_evaluations: int = 5_000_000
    method: Optional[Method] = None
    seed: int = DEFAULT_SEED
    samples: int = 200_000

    def __post_init__(self):
        if not self.tolerance > 0:
            raise DomainError(f"integration tolerance must be positive, got {self.tolerance!r}")
        if self.max_evaluations < 1:
            raise DomainError(f"max_evaluations must be >= 1, got {self.max_evaluations!r}")
        if self.method is not None and not isinstance(self.method, Method):
            object.__setattr__(self, "method", Method(self.method))

    def with_method(self, method: Method) -> "IntegrationSpec":
        return replace(self, method=method)


@dataclass(frozen=True)
class IntegrationResult:
    value: float
    error: float
    evaluations: int
    converged: bool

    def __add__(self, other: "IntegrationResult") -> "IntegrationResult":
        return IntegrationResult(
            value=self.value + other.value,
            error=self.error + other.error,
            evaluations=self.evaluations + other.evaluations,
            converged=self.converged and other.converged,
        )

    def scaled(self, factor: float) -> "IntegrationResult":
        return IntegrationResult(self.value * factor, self.error * abs(factor), self.evaluations, self.converged)

    def checked(self, what: str, strict: bool = False) -> "IntegrationResult":
        """Raise ConvergenceError if strict, else warn, when not converged"""
        if not self.converged:
            message = f"{what} did not converge: estimate {self.value!r}, error {self.error:.3g}"
            if strict:
                raise ConvergenceError(message, estimate=self.value, error=self.error)
            logger.warning(message)
        return self


def monomial(v: NDArray[np.float64], alpha: Sequence[int]) -> NDArray[np.float64]:
    """prod_j v_j^alpha_j over the last axis of v"""
    out = np.ones(v.shape[:-1])
    for j, power in enumerate(alpha):
        if power:
            out = out * v[..., j] ** power
    return out


def ball_volume(d: int, radius: float = 1.0) -> float:
    """Volume of the d-dimensional ball"""
    return math.pi ** (d / 2) * radius ** d / math.gamma(d / 2 + 1)


def sphere_area(d: int) -> float:
    """Surface area of the unit sphere S^{d-1} in R^d"""
    return d * ball_volume(d, 1.0)


def _error_floor(value: float) -> float:
    return 64.0 * _EPS * max(abs(value), 1e-300)


def _finish(value: float, error: float, evaluations: int, tolerance: float) -> IntegrationResult:
    error = max(error, _error_floor(value))
    return IntegrationResult(float(value), float(error), int(evaluations), bool(error <= tolerance))


# ---------------------------------------------------------------------------
# One dimension
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _gauss_legendre(n: int) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
    x, w = roots_legendre(n)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


@lru_cache(maxsize=None)
def _tanh_sinh_reference(level: int) -> Tuple[NDArray[np.float64], NDArray[np.float64], NDArray[np.int8]]:
    """Distances to the nearer endpoint of (-1, 1), weights and sides

    Nodes are kept as distances so that points next to an endpoint keep their
    full relative precision.
    """
    h = 2.0 ** -level
    k_max = int(math.ceil(_TANH_SINH_T_MAX / h))
    t = np.arange(-k_max, k_max + 1) * h
    y = _HALF_PI * np.sinh(np.abs(t))
    e = np.exp(-2.0 * y)
    distance = 2.0 * e / (1.0 + e)            # 1 - tanh(|y|)
    sech2 = 4.0 * e / (1.0 + e) ** 2
    weight = h * _HALF_PI * np.cosh(t) * sech2
    side = np.sign(t).astype(np.int8)
    keep = weight > 0
    return distance[keep], weight[keep], side[keep]


def tanh_sinh_rule(a: float, b: float, level: int) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Nodes strictly inside (a, b) and weights of the tanh-sinh rule with step 2^-level"""
    distance, weight, side = _tanh_sinh_reference(level)
    half = 0.5 * (b - a)
    mid = a + half
    x = np.where(side > 0, b - half * distance, np.where(side < 0, a + half * distance, mid))
    inside = (x > a) & (x < b)
    return x[inside], half * weight[inside]


def _integrate_tanh_sinh(f: Integrand1D, a: float, b: float, spec: IntegrationSpec) -> IntegrationResult:
    evaluations = 0
    previous: Optional[float] = None
    value, error = 0.0, math.inf
    for level in range(0, 14):
        x, w = tanh_sinh_rule(a, b, level)
        if evaluations + x.size > spec.max_evaluations and previous is not None:
            break
        value = float(np.sum(w * np.asarray(f(x), dtype=float)))
        evaluations += x.size
        if previous is not None:
            error = abs(value - previous)
            if level >= 3 and max(error, _error_floor(value)) <= spec.tolerance:
                break
        previous = value
    return _finish(value, error, evaluations, spec.tolerance)


def _integrate_gauss_legendre(f: Integrand1D, a: float, b: float, spec: IntegrationSpec) -> IntegrationResult:
    half = 0.5 * (b - a)
    mid = a + half
    evaluations = 0
    previous: Optional[float] = None
    value, error = 0.0, math.inf
    for n in (16, 32, 64, 128, 256, 512, 1024, 2048, 4096):
        if evaluations + n > spec.max_evaluations and previous is not None:
            break
        x, w = _gauss_legendre(n)
        value = float(half * np.sum(w * np.asarray(f(mid + half * x), dtype=float)))
        evaluations += n
        if previous is not None:
            error = abs(value - previous)
            if max(error, _error_floor(value)) <= spec.tolerance:
                break
        previous = value
    return _finish(value, error, evaluations, spec.tolerance)


def _integrate_adaptive(f: Callable[[float], float], a: float, b: float, spec: IntegrationSpec) -> IntegrationResult:
    limit = min(10_000, max(50, spec.max_evaluations // 21))
    value, error, info, *message = sp_integrate.quad(
        lambda x: np.asarray(f(x), dtype=float).item(), a, b,
        epsabs=spec.tolerance, epsrel=0.0, limit=limit, full_output=1,
    )
    error = max(float(error), _error_floor(value))
    return IntegrationResult(float(value), error, int(info["neval"]), bool(not message and error <= spec.tolerance))


def integrate_1d(f: Integrand1D, a: float, b: float, spec: Optional[IntegrationSpec] = None) -> IntegrationResult:
    """Integrate f over (a, b)

    The double-exponential variant never evaluates f at a or b, so it is the
    rule for integrable endpoint singularities.
    """
    spec = spec or IntegrationSpec()
    if not a < b:
        raise DomainError(f"integration interval needs a < b, got ({a!r}, {b!r})")
    method = spec.method or Method.ADAPTIVE
    if method is Method.ADAPTIVE:
        return _integrate_adaptive(f, a, b, spec)
    if method is Method.DOUBLE_EXPONENTIAL:
        return _integrate_tanh_sinh(f, a, b, spec)
    if method in (Method.SPHERICAL_PRODUCT, Method.TENSOR):
        return _integrate_gauss_legendre(f, a, b, spec)
    raise DomainError(f"method {method.value!r} is not available for 1D integrals")


# ---------------------------------------------------------------------------
# Balls
# ---------------------------------------------------------------------------

_BALL_ORDERS = {
    1: (16, 32, 64, 128, 256, 512, 1024, 2048),
    2: (8, 16, 32, 64, 128, 256, 512),
    3: (8, 12, 16, 24, 32, 48, 64, 96, 128),
    4: (6, 8, 12, 16, 24, 32),
}


def _ball_rule(d: int, radius: float, n: int) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Points (N, d) and weights (N,) of the product rule of order n"""
    x, w = _gauss_legendre(n)
    if d == 1:
        return (radius * x)[:, None], radius * w

    r = 0.5 * radius * (x + 1.0)
    wr = 0.5 * radius * w * r ** (d - 1)

    if d == 2:
        n_phi = 2 * n
        phi = 2.0 * math.pi * np.arange(n_phi) / n_phi
        directions = np.stack([np.cos(phi), np.sin(phi)], axis=-1)
        w_dir = np.full(n_phi, 2.0 * math.pi / n_phi)
    elif d == 3:
        directions, w_dir = _sphere_rule(n)
    elif d == 4:
        directions, w_dir = _hypersphere_rule(n)
    else:
        raise DomainError(f"ball dimension must be in 1..4, got {d!r}")

    points = (r[:, None, None] * directions[None, :, :]).reshape(-1, d)
    weights = (wr[:, None] * w_dir[None, :]).reshape(-1)
    return points, weights


@lru_cache(maxsize=None)
def _sphere_rule(n: int) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Gauss-Legendre in cos(theta) times uniform azimuth on S^2"""
    z, wz = _gauss_legendre(n)
    n_phi = 2 * n
    phi = 2.0 * math.pi * np.arange(n_phi) / n_phi
    rho = np.sqrt(1.0 - z ** 2)
    directions = np.stack(
        [
            np.outer(rho, np.cos(phi)).ravel(),
            np.outer(rho, np.sin(phi)).ravel(),
            np.repeat(z, n_phi),
        ],
        axis=-1,
    )
    weights = np.repeat(wz, n_phi) * (2.0 * math.pi / n_phi)
    return directions, weights


@lru_cache(maxsize=None)
def _hypersphere_rule(n: int) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Product rule on S^3: Gauss-Chebyshev (2nd kind) in cos(chi) times the S^2 rule"""
    u, wu = roots_chebyu(n)
    inner, w_inner = _sphere_rule(n)
    sin_chi = np.sqrt(1.0 - u ** 2)
    directions = np.concatenate(
        [
            (sin_chi[:, None, None] * inner[None, :, :]).reshape(-1, 3),
            np.repeat(u, inner.shape[0])[:, None],
        ],
        axis=-1,
    )
    weights = np.outer(wu, w_inner).ravel()
    return directions, weights


def _integrate_ball_product(f: IntegrandND, d: int, radius: float, spec: IntegrationSpec) -> IntegrationResult:
    evaluations = 0
    previous: Optional[float] = None
    value, error = 0.0, math.inf
    for n in _BALL_ORDERS[d]:
        points, weights = _ball_rule(d, radius, n)
        if evaluations + weights.size > spec.max_evaluations and previous is not None:
            break
        value = float(np.sum(weights * np.asarray(f(points), dtype=float)))
        evaluations += weights.size
        if previous is not None:
            error = abs(value - previous)
            if max(error, _error_floor(value)) <= spec.tolerance:
                break
        previous = value
    return _finish(value, error, evaluations, spec.tolerance)


def _uniform_ball_samples(rng: np.random.Generator, n: int, d: int, radius: float) -> NDArray[np.float64]:
    g = rng.standard_normal((n, d))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    r = radius * rng.random(n) ** (1.0 / d)
    return g * r[:, None]


def _integrate_ball_monte_carlo(f: IntegrandND, d: int, radius: float, spec: IntegrationSpec) -> IntegrationResult:
    rng = np.random.default_rng(spec.seed)
    volume = ball_volume(d, radius)
    total = 0.0
    total_sq = 0.0
    n = 0
    batch = max(2, min(spec.samples, spec.max_evaluations))
    value, error = 0.0, math.inf
    while n < spec.max_evaluations:
        batch = min(batch, spec.max_evaluations - n)
        if batch < 2:
            break
        values = np.asarray(f(_uniform_ball_samples(rng, batch, d, radius)), dtype=float)
        total += float(np.sum(values))
        total_sq += float(np.sum(values ** 2))
        n += batch
        mean = total / n
        variance = max(total_sq / n - mean ** 2, 0.0) * n / (n - 1)
        value = volume * mean
        error = volume * math.sqrt(variance / n)
        if error <= spec.tolerance:
            break
        batch *= 2
    return _finish(value, error, n, spec.tolerance)


def integrate_ball(f: IntegrandND, d: int, radius: float, spec: Optional[IntegrationSpec] = None) -> IntegrationResult:
    """Integrate f over the ball |x| < radius in R^d

    d=1..3 default to the spherical-product rule. d=4 defaults to Monte-Carlo
    with the standard error as its error estimate, unless the tensor (or
    spherical-product) hint selects the hyperspherical product rule.
    """
    spec = spec or IntegrationSpec()
    if d not in _BALL_ORDERS:
        raise DomainError(f"ball dimension must be in 1..4, got {d!r}")
    if not radius > 0:
        raise DomainError(f"ball radius must be positive, got {radius!r}")
    method = spec.method
    if method is None:
        method = Method.MONTE_CARLO if d == 4 else Method.SPHERICAL_PRODUCT
    if method is Method.MONTE_CARLO:
        return _integrate_ball_monte_carlo(f, d, radius, spec)
    if method in (Method.SPHERICAL_PRODUCT, Method.TENSOR):
        return _integrate_ball_product(f, d, radius, spec)
    if d == 1:
        return integrate_1d(lambda x: f(np.atleast_1d(x)[:, None]), -radius, radius, spec)
    raise DomainError(f"method {method.value!r} is not available for ball integrals in d={d}")


# ---------------------------------------------------------------------------
# Ellipse
# ---------------------------------------------------------------------------

def ellipse_map(u: NDArray[np.float64], w: NDArray[np.float64], p: float) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Map the rectangle (gamma, 2pi-gamma) x (-gamma, gamma) onto the ellipse

    cos(gamma) = 2p - 1. Returns the points (N, 2) and the Jacobian (N,).
    With s = cos(alpha), t = cos(beta), alpha = (u-w)/2, beta = (u+w)/2, the
    point is v = ((s+t)/2, (s-t)/2) and dv1 dv2 = sin(alpha) sin(beta)/4 du dw.
    """
    alpha = 0.5 * (u - w)
    beta = 0.5 * (u + w)
    s = np.cos(alpha)
    t = np.cos(beta)
    points = np.stack([0.5 * (s + t), 0.5 * (s - t)], axis=-1)
    return points, 0.25 * np.sin(alpha) * np.sin(beta)


def _integrate_ellipse_mapped(f: IntegrandND, p: float, spec: IntegrationSpec) -> IntegrationResult:
    gamma_ = math.acos(2.0 * p - 1.0)
    evaluations = 0
    previous: Optional[float] = None
    value, error = 0.0, math.inf
    for level in range(1, 9):
        u, wu = tanh_sinh_rule(gamma_, 2.0 * math.pi - gamma_, level)
        w, ww = tanh_sinh_rule(-gamma_, gamma_, level)
        if evaluations + u.size * w.size > spec.max_evaluations and previous is not None:
            break
        uu, vv = np.meshgrid(u, w, indexing="ij")
        points, jac = ellipse_map(uu.ravel(), vv.ravel(), p)
        weights = np.outer(wu, ww).ravel() * jac
        value = float(np.sum(weights * np.asarray(f(points), dtype=float)))
        evaluations += weights.size
        if previous is not None:
            error = abs(value - previous)
            if level >= 3 and max(error, _error_floor(value)) <= spec.tolerance:
                break
        previous = value
    return _finish(value, error, evaluations, spec.tolerance)


def integrate_ellipse(f: IntegrandND, p: float, spec: Optional[IntegrationSpec] = None) -> IntegrationResult:
    """Integrate f over the ellipse v1^2/p + v2^2/(1-p) < 1

    The default (double-exponential) path maps the ellipse onto a rectangle
    whose corners are the four points where the ellipse touches the square
    |v1| + |v2| = 1, so densities that blow up there stay integrable in
    both directions. The spherical-product hint rescales the axes to the unit
    disk and uses integrate_ball(d=2); it suits smooth integrands only.
    """
    spec = spec or IntegrationSpec()
    if not 0.0 < p < 1.0:
        raise DomainError(f"ellipse parameter p must lie in (0, 1), got {p!r}")
    method = spec.method or Method.DOUBLE_EXPONENTIAL
    if method is Method.DOUBLE_EXPONENTIAL:
        return _integrate_ellipse_mapped(f, p, spec)
    scale = np.array([math.sqrt(p), math.sqrt(1.0 - p)])
    area_factor = math.sqrt(p * (1.0 - p))
    return integrate_ball(lambda x: f(x * scale) * area_factor, 2, 1.0, spec)


__all__ = [
    "Method",
    "IntegrationSpec",
    "IntegrationResult",
    "DEFAULT_SEED",
    "monomial",
    "ball_volume",
    "sphere_area",
    "tanh_sinh_rule",
    "integrate_1d",
    "integrate_ball",
    "ellipse_map",
    "integrate_ellipse",
]
