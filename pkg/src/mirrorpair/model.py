"""Physical parameters, unit conversions and the classical working point.

Two movable mirrors close a pair of meter cavities (modes a1, a2) and share
a third driven cavity mode b that couples to their relative displacement.
This module holds every experimental constant of that setup, converts drive
powers to photon-flux amplitudes, and computes the classical steady state
around which the dynamics is linearized.

Conventions: mechanical position/momentum are dimensionless with [q, p] = i;
the meter detuning is fixed to zero and the meter amplitude alpha is real.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, fields

import numpy as np
from scipy.constants import hbar as HBAR, k as KB, c as C_LIGHT

from .errors import InvalidParameterError

#: Default drive wavelength (m) used to fix the optical carrier frequencies.
#: Only the ratio P / (hbar * omega) enters the dynamics, so the exact carrier
#: matters little; 1064 nm is the standard Nd:YAG choice.
DEFAULT_WAVELENGTH = 1.064e-6

DEFAULT_OPTICAL_FREQUENCY = 2.0 * np.pi * C_LIGHT / DEFAULT_WAVELENGTH


@dataclass(frozen=True)
class PhysicalParams:
    """All experimental constants of the two-mirror setup, in SI units.

    omega_a, omega_b       optical angular frequencies of meter/entangler modes
    omega_a0, omega_b0     drive laser angular frequencies
    gamma_a, gamma_b       cavity linewidths (1/s)
    big_omega              mechanical angular frequency (rad/s)
    mass                   mirror mass (kg)
    big_gamma              mechanical damping rate (1/s)
    g, big_g               meter / entangler optomechanical couplings (1/s)
    p_in_a, p_in_b         input powers (W)
    delta_b                effective entangler detuning (rad/s)
    temperature            bath temperature (K)
    """

    omega_a: float = DEFAULT_OPTICAL_FREQUENCY
    omega_b: float = DEFAULT_OPTICAL_FREQUENCY
    omega_a0: float = DEFAULT_OPTICAL_FREQUENCY
    omega_b0: float = DEFAULT_OPTICAL_FREQUENCY
    gamma_a: float = 1.0e5
    gamma_b: float = 1.0e5
    big_omega: float = 1.0e5
    mass: float = 1.0e-5
    big_gamma: float = 1.0
    g: float = 0.5
    big_g: float = 5.0
    p_in_a: float = 5.0e-4
    p_in_b: float = 5.0e-3
    delta_b: float = 1.0e5
    temperature: float = 0.1

    def __post_init__(self):
        positive = (
            "omega_a", "omega_b", "omega_a0", "omega_b0",
            "gamma_a", "gamma_b", "big_omega", "mass", "big_gamma",
        )
        for name in positive:
            if not getattr(self, name) > 0:
                raise InvalidParameterError(f"{name} must be strictly positive")
        for name in ("g", "big_g", "p_in_a", "p_in_b"):
            if getattr(self, name) < 0:
                raise InvalidParameterError(f"{name} must be non-negative")
        if self.temperature < 0:
            raise InvalidParameterError("temperature must be >= 0")
        if not self.g < self.big_g:
            warnings.warn(
                "expected entangler coupling big_g > meter coupling g; "
                f"got g={self.g}, big_g={self.big_g}",
                stacklevel=2,
            )

    @classmethod
    def from_dict(cls, values: dict) -> "PhysicalParams":
        known = {f.name for f in fields(cls)}
        unknown = set(values) - known
        if unknown:
            raise InvalidParameterError(
                "unknown parameter keys: %s" % ", ".join(sorted(unknown))
            )
        return cls(**{k: float(v) for k, v in values.items()})


def fig2_params(**overrides) -> PhysicalParams:
    """The default working point used throughout the test suite."""
    return PhysicalParams(**overrides) if overrides else PhysicalParams()


@dataclass(frozen=True)
class SteadyState:
    """Classical amplitudes and static displacements of the working point."""

    alpha: float            # meter intracavity amplitude, real by convention
    beta: complex           # entangler intracavity amplitude
    q1_ss: float
    q2_ss: float
    p1_ss: float = 0.0
    p2_ss: float = 0.0


def power_to_amplitude(power: float, drive_frequency: float) -> float:
    """Photon-flux amplitude sqrt(P / hbar omega) of a drive of power P."""
    if drive_frequency <= 0:
        raise InvalidParameterError("drive_frequency must be strictly positive")
    if power < 0:
        raise InvalidParameterError("power must be non-negative")
    return float(np.sqrt(power / (HBAR * drive_frequency)))


def steady_state(params: PhysicalParams) -> SteadyState:
    """Classical steady state of the driven cavities and the mirrors.

    With the meter on resonance, alpha = sqrt(gamma_a) * alpha_in / (gamma_a/2)
    is real; the entangler amplitude picks up the detuning phase.  The static
    mirror displacements are opposite for the two mirrors: the entangler pushes
    them apart while the meters push them back.
    """
    alpha_in = power_to_amplitude(params.p_in_a, params.omega_a0)
    beta_in = power_to_amplitude(params.p_in_b, params.omega_b0)

    alpha = np.sqrt(params.gamma_a) * alpha_in / (params.gamma_a / 2.0)
    beta = (
        np.sqrt(params.gamma_b) * beta_in
        / (params.gamma_b / 2.0 - 1j * params.delta_b)
    )
    push = (
        params.big_g * abs(beta) ** 2 - params.g * alpha ** 2
    ) / params.big_omega
    return SteadyState(alpha=float(alpha), beta=complex(beta),
                       q1_ss=-push, q2_ss=push)
