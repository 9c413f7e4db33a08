"""
Core algebra: physical constants, Pauli/gamma matrices and qubit states

Every matrix here is a small dense numpy array with value semantics. The
module-level constants are read-only, so they can be shared between threads.
"""

import math
import re
from dataclasses import dataclass
from typing import Iterable, List, Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .exceptions import DomainError

QUBIT_TOLERANCE = 1e-9


@dataclass(frozen=True)
class PhysParams:
    """Rest mass, speed of light and reduced Planck constant"""
    m: float = 1.0
    c: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        for name in ("m", "c", "hbar"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"PhysParams.{name} must be a positive finite real, got {value!r}")

    @property
    def rest_energy(self) -> float:
        return self.m * self.c ** 2

    def cutoff_momentum(self, cutoff_ratio: float) -> float:
        """Convert the dimensionless cutoff Λ = λ/(mc) into λ"""
        return cutoff_ratio * self.m * self.c

    def cutoff_ratio(self, cutoff_momentum: float) -> float:
        """Convert λ into Λ = λ/(mc)"""
        return cutoff_momentum / (self.m * self.c)


DIMENSIONLESS = PhysParams()


def _frozen(matrix: ArrayLike) -> NDArray[np.complex128]:
    out = np.array(matrix, dtype=np.complex128)
    out.flags.writeable = False
    return out


IDENTITY2 = _frozen(np.eye(2))
IDENTITY4 = _frozen(np.eye(4))

_SIGMA = (
    _frozen([[0, 1], [1, 0]]),
    _frozen([[0, -1j], [1j, 0]]),
    _frozen([[1, 0], [0, -1]]),
)


def _spatial_gamma(sigma: NDArray[np.complex128]) -> NDArray[np.complex128]:
    zero = np.zeros((2, 2), dtype=np.complex128)
    return _frozen(np.block([[zero, -1j * sigma], [1j * sigma, zero]]))


_GAMMA_1_TO_4 = tuple(_spatial_gamma(s) for s in _SIGMA) + (
    _frozen(np.block([[np.eye(2), np.zeros((2, 2))], [np.zeros((2, 2)), -np.eye(2)]])),
)
_GAMMA = _GAMMA_1_TO_4 + (
    _frozen(_GAMMA_1_TO_4[0] @ _GAMMA_1_TO_4[1] @ _GAMMA_1_TO_4[2] @ _GAMMA_1_TO_4[3]),
)


def pauli(k: int) -> NDArray[np.complex128]:
    """Return the Pauli matrix σ_k, k ∈ {1, 2, 3}"""
    if k not in (1, 2, 3):
        raise DomainError(f"Pauli index must be 1, 2 or 3, got {k!r}")
    return _SIGMA[k - 1]


def gamma(nu: int) -> NDArray[np.complex128]:
    """Return γ_ν for ν ∈ {1, .., 5}; γ5 is the product γ1γ2γ3γ4"""
    if nu not in (1, 2, 3, 4, 5):
        raise DomainError(f"gamma index must be in 1..5, got {nu!r}")
    return _GAMMA[nu - 1]


def check_unitary(matrix: ArrayLike, tol: float = 1e-12) -> bool:
    """True iff the max entry deviation of M†M from the identity is <= tol"""
    if tol <= 0:
        raise DomainError(f"tolerance must be positive, got {tol!r}")
    m = np.asarray(matrix, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    deviation = m.conj().T @ m - np.eye(m.shape[0])
    return bool(np.max(np.abs(deviation)) <= tol)


def ensure_finite(value: complex, what: str) -> complex:
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise DomainError(f"{what} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class QubitState:
    """Unit-norm internal state with 2 or 4 complex amplitudes"""
    amplitudes: Tuple[complex, ...]

    @property
    def n(self) -> int:
        return len(self.amplitudes)

    @property
    def vector(self) -> NDArray[np.complex128]:
        return np.array(self.amplitudes, dtype=np.complex128)

    def __getitem__(self, index: int) -> complex:
        return self.amplitudes[index]

    def rotated(self, theta: float) -> "QubitState":
        """Global phase rotation q -> e^{iθ} q"""
        phase = complex(math.cos(theta), math.sin(theta))
        return QubitState(tuple(phase * z for z in self.amplitudes))


def qubit(amplitudes: Iterable[complex], tol: float = QUBIT_TOLERANCE) -> QubitState:
    """Validate amplitudes and wrap them as a QubitState

    The norm is checked, never corrected: callers normalize explicitly.
    """
    values = tuple(ensure_finite(complex(z), "qubit amplitude") for z in amplitudes)
    if len(values) not in (2, 4):
        raise DomainError(f"a qubit has 2 or 4 components, got {len(values)}")
    norm2 = sum(abs(z) ** 2 for z in values)
    if abs(norm2 - 1.0) > tol:
        raise DomainError(f"qubit must have unit norm (sum |q_j|^2 = 1 within {tol:g}), got {norm2!r}")
    return QubitState(values)


def normalized_qubit(amplitudes: Iterable[complex]) -> QubitState:
    """Normalize amplitudes and build the qubit"""
    values = np.array(list(amplitudes), dtype=np.complex128)
    norm = float(np.linalg.norm(values))
    if norm == 0.0 or not math.isfinite(norm):
        raise DomainError("cannot normalize a zero or non-finite qubit")
    return qubit(values / norm)


MultiIndex = Tuple[int, ...]


def multi_index(alpha: Iterable[int], d: int) -> MultiIndex:
    """Validate a moment exponent tuple of length d"""
    values = tuple(int(a) for a in alpha)
    if len(values) != d:
        raise DomainError(f"multi-index {values} must have {d} entries")
    if any(a < 0 for a in values):
        raise DomainError(f"multi-index entries must be >= 0, got {values}")
    return values


def random_qubit(n: int, rng: np.random.Generator) -> QubitState:
    """Haar-random unit qubit with n components"""
    z = rng.normal(size=n) + 1j * rng.normal(size=n)
    return normalized_qubit(z)


# ---------------------------------------------------------------------------
# Complex literals: re, imi, re+imi, re-imi, i, -i ('j' works for 'i');
# real parts may be products/quotients of decimals and sqrt(x) factors.
# ---------------------------------------------------------------------------

_TERM_SPLIT = re.compile(r"(?<![eE(*/])(?=[+-])")
_FACTOR = re.compile(r"\s*([*/])?\s*(sqrt\(\s*([^()]+?)\s*\)|(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)")


def _real_factor(body: str, text: str) -> float:
    value, pos = 1.0, 0
    while pos < len(body):
        match = _FACTOR.match(body, pos)
        if match is None or (pos == 0 and match.group(1) == "/"):
            raise DomainError(f"malformed complex literal {text!r}")
        op, token, radicand = match.groups()
        if radicand is not None:
            inner = _real_factor(radicand, text)
            if inner < 0:
                raise DomainError(f"sqrt of a negative number in {text!r}")
            factor = math.sqrt(inner)
        else:
            factor = float(token)
        if op == "/":
            if factor == 0:
                raise DomainError(f"division by zero in {text!r}")
            value /= factor
        else:
            value *= factor
        pos = match.end()
    return value


def parse_complex(text: str) -> complex:
    """Parse a complex literal such as '0.5-0.5i', 'sqrt(7/10)i' or '-i'"""
    source = text.strip().replace(" ", "")
    terms = [t for t in _TERM_SPLIT.split(source) if t]
    if not terms or len(terms) > 2:
        raise DomainError(f"malformed complex literal {text!r}")
    real = imag = None
    for term in terms:
        sign = -1.0 if term[0] == "-" else 1.0
        body = term.lstrip("+-")
        if not body:
            raise DomainError(f"malformed complex literal {text!r}")
        if body[-1] in "ij":
            body = body[:-1].rstrip("*")
            if imag is not None:
                raise DomainError(f"complex literal {text!r} has two imaginary parts")
            imag = sign * (_real_factor(body, text) if body else 1.0)
        else:
            if real is not None:
                raise DomainError(f"complex literal {text!r} has two real parts")
            real = sign * _real_factor(body, text)
    real = 0.0 if real is None else real
    imag = 0.0 if imag is None else imag
    return ensure_finite(complex(real, imag), "complex literal")


def format_complex(z: complex) -> str:
    """Inverse of parse_complex; repr digits keep the round trip exact"""
    z = complex(z)
    if z.imag == 0 and math.copysign(1.0, z.imag) > 0:
        return repr(z.real)
    sign = "-" if math.copysign(1.0, z.imag) < 0 else "+"
    return f"{z.real!r}{sign}{abs(z.imag)!r}i"


def parse_complex_list(text: str) -> List[complex]:
    """Comma-separated complex literals, e.g. '0.70710678,0.70710678i'"""
    parts = [p for p in text.split(",")]
    if not all(p.strip() for p in parts):
        raise DomainError(f"empty component in {text!r}")
    return [parse_complex(p) for p in parts]


__all__ = [
    "PhysParams",
    "DIMENSIONLESS",
    "IDENTITY2",
    "IDENTITY4",
    "QUBIT_TOLERANCE",
    "pauli",
    "gamma",
    "check_unitary",
    "ensure_finite",
    "QubitState",
    "qubit",
    "normalized_qubit",
    "random_qubit",
    "MultiIndex",
    "multi_index",
    "parse_complex",
    "format_complex",
    "parse_complex_list",
]
