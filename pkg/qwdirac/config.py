"""
Run configuration for the qwdirac commands

Each command has a frozen pydantic model. Models serialize to a canonical
block of sorted `key = value` lines and parse back from the same text, so a
config file, the flags and the comment line written into every CSV all
share one format.
"""

import math
import os
from itertools import product
from pathlib import Path
from typing import Any, ClassVar, Dict, Iterable, Literal, Optional, Tuple, Union

from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .algebra import DIMENSIONLESS, QUBIT_TOLERANCE, PhysParams, format_complex, parse_complex, parse_complex_list
from .exceptions import DomainError
from .quadrature import DEFAULT_SEED, Method

ROUNDING_TOLERANCE = 1e-6

LOG_LEVELS = ("TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR", "CRITICAL")


def default_log_level() -> str:
    level = os.environ.get("QWDIRAC_LOG_LEVEL", "WARNING").upper()
    if level not in LOG_LEVELS:
        return "WARNING"
    return level


def renormalized(values: Iterable[complex], what: str) -> Tuple[complex, ...]:
    """Accept printed decimals: norms off by at most 1e-6 are rescaled"""
    values = tuple(complex(z) for z in values)
    norm2 = sum(abs(z) ** 2 for z in values)
    deviation = abs(norm2 - 1.0)
    if deviation <= QUBIT_TOLERANCE:
        return values
    if deviation <= ROUNDING_TOLERANCE:
        logger.warning(f"{what} has norm^2 {norm2!r}; renormalising rounded input")
        scale = 1.0 / math.sqrt(norm2)
        return tuple(z * scale for z in values)
    raise DomainError(f"{what} must have unit norm (sum |z|^2 = 1), got {norm2!r}")


def _parse_complex_tuple(value: Any) -> Any:
    if isinstance(value, str):
        return tuple(parse_complex_list(value))
    return value


def _parse_complex(value: Any) -> Any:
    if isinstance(value, str):
        return parse_complex(value)
    return value


def _parse_float_tuple(value: Any) -> Any:
    if isinstance(value, str):
        parts = [p.strip() for p in value.split(",") if p.strip()]
        try:
            return tuple(float(p) for p in parts)
        except ValueError:
            raise DomainError(f"expected comma-separated numbers, got {value!r}") from None
    return value


def parse_alphas(value: Any) -> Any:
    """'2,0,0;0,2,0' -> ((2, 0, 0), (0, 2, 0))"""
    if isinstance(value, str):
        groups = [g.strip() for g in value.split(";") if g.strip()]
        try:
            return tuple(tuple(int(x) for x in g.split(",")) for g in groups)
        except ValueError:
            raise DomainError(f"multi-indices are ';'-separated lists of integers, got {value!r}") from None
    return value


def all_multi_indices(d: int, max_order: int) -> Tuple[Tuple[int, ...], ...]:
    """Every multi-index of length d with total degree <= max_order, by degree"""
    indices = (a for a in product(range(max_order + 1), repeat=d) if sum(a) <= max_order)
    return tuple(sorted(indices, key=lambda a: (sum(a), tuple(-x for x in a))))


def _format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, complex):
        return format_complex(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, Method):
        return value.value
    if isinstance(value, tuple):
        if value and isinstance(value[0], tuple):
            return ";".join(",".join(str(x) for x in item) for item in value)
        return ",".join(_format_value(x) for x in value)
    return str(value)


# CLI flag names accepted as config keys
KEY_ALIASES = {"lambda": "cutoff", "id": "figure"}


class RunConfig(BaseModel):
    """Settings shared by every command"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    command: ClassVar[str] = "run"

    out: Optional[str] = None
    format: Literal["csv", "json"] = "csv"
    threads: Optional[int] = Field(default=None, ge=1)
    strict: bool = False
    seed: int = Field(default=DEFAULT_SEED, ge=0, lt=2 ** 64)

    def canonical(self) -> str:
        """Sorted `key = value` lines; unset optional fields are left out"""
        data = {key: getattr(self, key) for key in type(self).model_fields}
        lines = [f"{key} = {_format_value(value)}" for key, value in sorted(data.items()) if value is not None]
        return "\n".join(lines) + "\n"

    @classmethod
    def parse_pairs(cls, text: str) -> Dict[str, str]:
        """`key = value` lines to a dict; '#' starts a comment"""
        pairs: Dict[str, str] = {}
        for number, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DomainError(f"config line {number} is not `key = value`: {raw!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            key = key.replace("-", "_")
            key = KEY_ALIASES.get(key, key)
            if not key:
                raise DomainError(f"config line {number} has an empty key")
            if key in pairs:
                raise DomainError(f"config key {key!r} is set twice (line {number})")
            pairs[key] = value
        return pairs

    @classmethod
    def from_text(cls, text: str, overrides: Optional[Dict[str, Any]] = None):
        """Build the model from config text; overrides win over file values"""
        data: Dict[str, Any] = dict(cls.parse_pairs(text))
        data.update(overrides or {})
        return cls.model_validate(data)

    @classmethod
    def from_file(cls, path: Union[str, Path], overrides: Optional[Dict[str, Any]] = None):
        logger.debug(f"Reading {cls.command} config from {path}")
        return cls.from_text(Path(path).read_text(encoding="utf-8"), overrides)


class PhysicsConfig(RunConfig):
    """Adds the physical constants; m = c = hbar = 1 by default"""
    m: float = Field(default=1.0, gt=0)
    c: float = Field(default=1.0, gt=0)
    hbar: float = Field(default=1.0, gt=0)

    @property
    def params(self) -> PhysParams:
        if (self.m, self.c, self.hbar) == (1.0, 1.0, 1.0):
            return DIMENSIONLESS
        return PhysParams(m=self.m, c=self.c, hbar=self.hbar)


class SqwConfig(RunConfig):
    """Simple walk run: coin, initial qubit and number of steps"""
    command: ClassVar[str] = "sqw"

    d: Literal[1, 2] = 1
    a: complex = complex(math.sqrt(0.5))
    b: complex = complex(math.sqrt(0.5))
    p: float = Field(default=0.5, gt=0, lt=1)
    qubit: Tuple[complex, ...]
    t: int = Field(ge=0)
    bins: int = Field(default=50, ge=1)
    margin: float = Field(default=0.05, ge=0)
    output: Literal["distribution", "histogram"] = "distribution"
    check_kspace: bool = False

    @field_validator("a", "b", mode="before")
    @classmethod
    def _complex_entry(cls, value):
        return _parse_complex(value)

    @field_validator("qubit", mode="before")
    @classmethod
    def _qubit_components(cls, value):
        return _parse_complex_tuple(value)

    @field_validator("d", mode="before")
    @classmethod
    def _int_dimension(cls, value):
        return int(value) if isinstance(value, str) else value

    @model_validator(mode="after")
    def _check_walk(self):
        if len(self.qubit) != 2 * self.d:
            raise DomainError(f"a {self.d}D walk needs a {2 * self.d}-component qubit, got {len(self.qubit)}")
        object.__setattr__(self, "qubit", renormalized(self.qubit, "qubit"))
        if self.d == 1:
            a, b = renormalized((self.a, self.b), "coin (a, b)")
            object.__setattr__(self, "a", a)
            object.__setattr__(self, "b", b)
        if self.output == "histogram" and self.t < 1:
            raise DomainError("a pseudovelocity histogram needs t >= 1")
        return self


class DensityConfig(PhysicsConfig):
    """Density tabulation: law selector and its parameters"""
    command: ClassVar[str] = "density"

    law: Literal["konno", "sqw2", "dirac"]
    d: int = Field(default=3, ge=1, le=4)
    cutoff: float = Field(default=1.0, gt=0)
    a: complex = complex(math.sqrt(0.5))
    b: Optional[complex] = None
    p: float = Field(default=0.5, gt=0, lt=1)
    qubit: Optional[Tuple[complex, ...]] = None
    grid: int = Field(default=201, ge=2)
    check_norm: bool = False

    @field_validator("a", "b", mode="before")
    @classmethod
    def _complex_entry(cls, value):
        return _parse_complex(value)

    @field_validator("qubit", mode="before")
    @classmethod
    def _qubit_components(cls, value):
        return _parse_complex_tuple(value)

    @model_validator(mode="after")
    def _check_law(self):
        if self.law == "konno" and not 0.0 < abs(self.a) < 1.0:
            raise DomainError(f"Konno's law needs 0 < |a| < 1, got |a| = {abs(self.a)!r}")
        if self.law == "konno" and self.b is not None:
            a, b = renormalized((self.a, self.b), "coin (a, b)")
            object.__setattr__(self, "a", a)
            object.__setattr__(self, "b", b)
        if self.qubit is not None:
            expected = 2 if self.law == "konno" else 4
            if self.law == "sqw2":
                raise DomainError("the 2D walk density takes no qubit")
            if len(self.qubit) != expected:
                raise DomainError(f"the {self.law} law needs a {expected}-component qubit, got {len(self.qubit)}")
            object.__setattr__(self, "qubit", renormalized(self.qubit, "qubit"))
        return self

    @property
    def coin_b(self) -> complex:
        """b for the Konno weight; defaults to the real sqrt(1 - |a|^2)"""
        if self.b is not None:
            return self.b
        return complex(math.sqrt(max(0.0, 1.0 - abs(self.a) ** 2)))


class MomentsConfig(PhysicsConfig):
    """Dirac moment cross-check"""
    command: ClassVar[str] = "moments"

    d: int = Field(default=3, ge=1, le=4)
    cutoff: float = Field(default=1.0, gt=0)
    qubit: Tuple[complex, ...] = (1 + 0j, 0j, 0j, 0j)
    alphas: Tuple[Tuple[int, ...], ...] = ()
    max_order: int = Field(default=2, ge=0, le=8)
    times: Tuple[float, ...] = ()
    tolerance: float = Field(default=1e-10, gt=0)
    method: Optional[Method] = None
    samples: int = Field(default=200_000, ge=2)
    grid: Optional[int] = Field(default=None, ge=8)
    paths: Tuple[str, ...] = ("asymptotic", "law", "finitetime")

    @field_validator("qubit", mode="before")
    @classmethod
    def _qubit_components(cls, value):
        return _parse_complex_tuple(value)

    @field_validator("alphas", mode="before")
    @classmethod
    def _multi_indices(cls, value):
        return parse_alphas(value)

    @field_validator("times", mode="before")
    @classmethod
    def _schedule(cls, value):
        return _parse_float_tuple(value)

    @field_validator("paths", mode="before")
    @classmethod
    def _split_paths(cls, value):
        if isinstance(value, str):
            return tuple(p.strip() for p in value.split(",") if p.strip())
        return value

    @model_validator(mode="after")
    def _check_moments(self):
        if len(self.qubit) != 4:
            raise DomainError(f"Dirac moments need a 4-component qubit, got {len(self.qubit)}")
        object.__setattr__(self, "qubit", renormalized(self.qubit, "qubit"))
        for alpha in self.alphas:
            if len(alpha) != self.d or any(a < 0 for a in alpha):
                raise DomainError(f"multi-index {alpha} must have {self.d} entries, each >= 0")
        if any(not t > 0 for t in self.times):
            raise DomainError(f"finite-time schedule needs t > 0, got {self.times}")
        unknown = set(self.paths) - {"asymptotic", "law", "finitetime"}
        if unknown:
            raise DomainError(f"unknown moment paths {sorted(unknown)}")
        return self

    @property
    def multi_indices(self) -> Tuple[Tuple[int, ...], ...]:
        return self.alphas or all_multi_indices(self.d, self.max_order)


class FiguresConfig(RunConfig):
    """Figure data emission"""
    command: ClassVar[str] = "figures"

    figure: int = Field(ge=1, le=7)
    t: int = Field(default=100, ge=1)
    grid: int = Field(default=201, ge=2)
    bins: int = Field(default=50, ge=1)


CONFIG_MODELS = {
    model.command: model
    for model in (SqwConfig, DensityConfig, MomentsConfig, FiguresConfig)
}


__all__ = [
    "RunConfig",
    "PhysicsConfig",
    "SqwConfig",
    "DensityConfig",
    "MomentsConfig",
    "FiguresConfig",
    "CONFIG_MODELS",
    "KEY_ALIASES",
    "ROUNDING_TOLERANCE",
    "default_log_level",
    "renormalized",
    "parse_alphas",
    "all_multi_indices",
]
