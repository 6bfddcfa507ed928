"""Bosonic bath: spectral density, Planck occupation and correlation D(omega).

Units with hbar = k_B = 1. The spectral function is the power-law family

    g(omega) = g * omega**s * exp(-omega / omega_c),   omega >= 0,

and the thermal correlation density combines emission and absorption,

    D(omega) = g(omega) (1 + n(omega))   for omega > 0,
    D(omega) = g(-omega) n(-omega)       for omega < 0,

with the value at omega = 0 fixed by the low-frequency limit g(omega) T / omega.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, UnrepresentableValueError

__all__ = [
    "BathParams",
    "Regime",
    "ZeroFreqLimit",
    "planck_occupation",
    "spectral_density",
    "bath_correlation",
    "zero_frequency_limit",
    "REFERENCE_BATH",
]


class Regime(enum.Enum):
    SUB_OHMIC = "sub-ohmic"
    OHMIC = "ohmic"
    SUPER_OHMIC = "super-ohmic"


@dataclass(frozen=True)
class BathParams:
    """Power-law bath with exponential cutoff at temperature ``T``."""

    g: float = 1.0
    s: float = 1.0
    omega_c: float = 100.0
    T: float = 10.0

    def __post_init__(self):
        for name in ("g", "s", "omega_c", "T"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"BathParams.{name} must be finite and > 0, got {value!r}")

    @property
    def regime(self) -> Regime:
        if self.s == 1:
            return Regime.OHMIC
        return Regime.SUPER_OHMIC if self.s > 1 else Regime.SUB_OHMIC


REFERENCE_BATH = BathParams(g=1.0, s=1.0, omega_c=100.0, T=10.0)


class _Kind(enum.Enum):
    FINITE = "finite"
    ZERO = "zero"
    INFINITE = "infinite"


@dataclass(frozen=True)
class ZeroFreqLimit:
    """Tagged value of D0 = lim_{omega->0} g(omega) T / omega.

    Construct through :meth:`finite`, :meth:`zero` or :meth:`infinite`.
    ``float(limit)`` works for the first two and raises for the third, so an
    infinite D0 can never leak into kernel arithmetic as ``inf``.
    """

    kind: _Kind
    _value: float = 0.0

    Kind = _Kind

    @classmethod
    def finite(cls, value: float) -> "ZeroFreqLimit":
        if not (math.isfinite(value) and value > 0):
            raise DomainError(f"finite D0 must be a positive number, got {value!r}")
        return cls(_Kind.FINITE, float(value))

    @classmethod
    def zero(cls) -> "ZeroFreqLimit":
        return cls(_Kind.ZERO, 0.0)

    @classmethod
    def infinite(cls) -> "ZeroFreqLimit":
        return cls(_Kind.INFINITE, 0.0)

    @property
    def is_infinite(self) -> bool:
        return self.kind is _Kind.INFINITE

    @property
    def value(self) -> float:
        if self.is_infinite:
            raise UnrepresentableValueError("D0 is infinite for a sub-ohmic bath (s < 1)")
        return self._value

    def __float__(self) -> float:
        return self.value

    def __str__(self) -> str:
        return "inf" if self.is_infinite else repr(self._value)


def _check_temperature(T):
    if not T > 0:
        raise DomainError(f"temperature must be > 0, got {T!r}")


def _occupation(x):
    # 1/(e^x - 1) written as e^-x / (1 - e^-x): no overflow for large x, no
    # cancellation for small x.
    return np.exp(-x) / -np.expm1(-x)


def planck_occupation(omega, T):
    """Bose-Einstein occupation ``1 / (exp(omega/T) - 1)``.

    Accepts scalars or arrays; ``omega`` must be strictly positive.
    """
    _check_temperature(T)
    w = np.asarray(omega, dtype=float)
    if np.any(~(w > 0)):
        raise DomainError("planck_occupation requires omega > 0")
    out = _occupation(w / T)
    return float(out) if out.ndim == 0 else out


def spectral_density(omega, bath: BathParams):
    """Spectral function ``g * omega**s * exp(-omega/omega_c)`` for omega >= 0."""
    w = np.asarray(omega, dtype=float)
    if np.any(~(w >= 0)):
        raise DomainError("spectral_density is defined for omega >= 0 only")
    out = bath.g * w**bath.s * np.exp(-w / bath.omega_c)
    return float(out) if out.ndim == 0 else out


def zero_frequency_limit(bath: BathParams) -> ZeroFreqLimit:
    """D0 for the bath: ``g*T`` (ohmic), zero (super-ohmic) or infinite (sub-ohmic)."""
    regime = bath.regime
    if regime is Regime.OHMIC:
        return ZeroFreqLimit.finite(bath.g * bath.T)
    if regime is Regime.SUPER_OHMIC:
        return ZeroFreqLimit.zero()
    return ZeroFreqLimit.infinite()


def _correlation_nonzero(w, bath):
    # For w != 0. Both branches written as g |w|^s e^{-|w|/wc} times a
    # thermal factor that stays finite for |w| -> 0 or |w| -> inf.
    a = np.abs(w)
    x = a / bath.T
    prefactor = bath.g * a**bath.s * np.exp(-a / bath.omega_c)
    emission = 1.0 / -np.expm1(-x)   # 1 + n(|w|)
    absorption = np.exp(-x) * emission   # n(|w|)
    return prefactor * np.where(w > 0, emission, absorption)


def bath_correlation(omega, bath: BathParams):
    """Thermal correlation density D(omega) for any real frequency.

    At ``omega == 0`` the regime limit is returned. A sub-ohmic bath has no
    finite D(0) and raises :class:`UnrepresentableValueError` there.
    """
    w = np.asarray(omega, dtype=float)
    if not np.all(np.isfinite(w)):
        raise DomainError("bath_correlation requires finite frequencies")
    zero = w == 0
    if np.any(zero):
        d0 = zero_frequency_limit(bath).value
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(zero, d0, _correlation_nonzero(np.where(zero, 1.0, w), bath))
    else:
        out = _correlation_nonzero(w, bath)
    return float(out) if out.ndim == 0 else out
