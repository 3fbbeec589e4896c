"""Linear quadrature dynamics and frequency-domain spectra.

The fluctuations around the steady state form a 10-component vector

    x = (q1, p1, q2, p2, X_a1, Y_a1, X_a2, Y_a2, X_b, Y_b)

driven by 8 noise channels

    n = (xi_1, xi_2, X^in_a1, Y^in_a1, X^in_a2, Y^in_a2, X^in_b, Y^in_b)

through dx/dt = A x + B n.  Optical quadratures are X = a + a^dag,
Y = -i(a - a^dag).  Spectra use the e^{+i omega t} transform convention with
no 2*pi: S_OP(omega) = integral ds e^{i omega s} <O(0) P(s)>, assembled as
S(omega) = M(omega) D(omega) M(-omega)^T with M the transfer matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.constants import hbar as HBAR, k as KB

from .errors import DriftUnstableError, SingularityError
from .model import PhysicalParams, SteadyState, steady_state

N_STATE = 10
N_NOISE = 8

# State indices.
IQ1, IP1, IQ2, IP2, IXA1, IYA1, IXA2, IYA2, IXB, IYB = range(10)
# Noise indices.
IXI1, IXI2, IXIN1, IYIN1, IXIN2, IYIN2, IXINB, IYINB = range(8)

#: Brownian-noise normalizations.  "corrected" uses the prefactor
#: Gamma*omega/Omega, which preserves the canonical mirror commutator and the
#: classical equipartition limit; "halved" keeps the half-strength prefactor
#: Gamma*omega/(2*Omega) sometimes quoted for this model.
BROWNIAN_KERNELS = ("corrected", "halved")


@dataclass(frozen=True, eq=False)
class LinearSystem:
    """Immutable drift/noise-coupling pair plus the parameters behind it."""

    drift: np.ndarray           # (10, 10) real
    noise_coupling: np.ndarray  # (10, 8) real
    params: PhysicalParams
    steady: SteadyState

    def __post_init__(self):
        self.drift.setflags(write=False)
        self.noise_coupling.setflags(write=False)


def build_linear_system(
    params: PhysicalParams,
    ss: SteadyState | None = None,
    require_stable: bool = False,
) -> LinearSystem:
    """Assemble the linearized quadrature dynamics.

    Each mirror: dq/dt = Omega p; dp/dt = -Omega q - Gamma p, plus radiation
    pressure (-1)^{j+1} g alpha X_aj from its meter and (-1)^j G (Re(beta) X_b
    + Im(beta) Y_b) from the entangler, plus thermal force xi_j.  The meter
    phase quadrature reads the mirror position at rate 2 g alpha; the
    entangler quadratures rotate at the detuning and are pushed by q1 - q2.

    With ``require_stable`` the drift eigenvalues are checked and a
    DriftUnstableError (carrying them) is raised if any real part is
    non-negative.  By default the check is left to the caller: the strongly
    driven working points of interest are formally unstable, and their
    frequency-domain spectra are still evaluated (see README).
    """
    if ss is None:
        ss = steady_state(params)
    galpha = params.g * ss.alpha
    gbeta_r = params.big_g * ss.beta.real
    gbeta_i = params.big_g * ss.beta.imag
    omega_m = params.big_omega

    a = np.zeros((N_STATE, N_STATE))
    for j, (iq, ip, ix, iy) in enumerate(
        [(IQ1, IP1, IXA1, IYA1), (IQ2, IP2, IXA2, IYA2)]
    ):
        sj = 1.0 if j == 0 else -1.0      # (-1)^{j+1} for mirrors 1, 2
        a[iq, ip] = omega_m
        a[ip, iq] = -omega_m
        a[ip, ip] = -params.big_gamma
        a[ip, ix] = sj * galpha
        a[ip, IXB] = -sj * gbeta_r
        a[ip, IYB] = -sj * gbeta_i
        # Meter on resonance: the amplitude quadrature decays freely and the
        # position signal appears only in the phase quadrature.
        a[ix, ix] = -params.gamma_a / 2.0
        a[iy, iq] = 2.0 * sj * galpha
        a[iy, iy] = -params.gamma_a / 2.0
    a[IXB, IXB] = -params.gamma_b / 2.0
    a[IXB, IYB] = -params.delta_b
    a[IXB, IQ1] = 2.0 * gbeta_i
    a[IXB, IQ2] = -2.0 * gbeta_i
    a[IYB, IYB] = -params.gamma_b / 2.0
    a[IYB, IXB] = params.delta_b
    a[IYB, IQ1] = -2.0 * gbeta_r
    a[IYB, IQ2] = 2.0 * gbeta_r

    b = np.zeros((N_STATE, N_NOISE))
    b[IP1, IXI1] = 1.0
    b[IP2, IXI2] = 1.0
    for ix, k in ((IXA1, IXIN1), (IYA1, IYIN1), (IXA2, IXIN2), (IYA2, IYIN2)):
        b[ix, k] = np.sqrt(params.gamma_a)
    b[IXB, IXINB] = np.sqrt(params.gamma_b)
    b[IYB, IYINB] = np.sqrt(params.gamma_b)

    sys = LinearSystem(drift=a, noise_coupling=b, params=params, steady=ss)
    if require_stable and not is_stable(sys):
        raise DriftUnstableError(np.linalg.eigvals(a))
    return sys


def stability_margin(sys: LinearSystem) -> float:
    """Largest real part among drift eigenvalues (negative means stable)."""
    return float(np.linalg.eigvals(sys.drift).real.max())


def is_stable(sys: LinearSystem) -> bool:
    return stability_margin(sys) < 0.0


@dataclass(frozen=True)
class NoiseModel:
    """Input noise spectra: vacuum optical channels plus mirror Brownian force.

    The optical channels are delta-correlated vacuum inputs, so per mode
    <X X> = <Y Y> = 1 and <X Y> = -<Y X> = i, independent of frequency.
    The Brownian force spectrum is
    S_xi(omega) = pref * omega * [coth(hbar omega / 2 kB T) + 1]
    with pref = Gamma/Omega ("corrected" kernel) or Gamma/(2 Omega) ("halved").
    """

    temperature: float
    big_gamma: float
    big_omega: float
    kernel: str = "corrected"

    def __post_init__(self):
        if self.kernel not in BROWNIAN_KERNELS:
            raise ValueError(f"unknown Brownian kernel {self.kernel!r}")

    @classmethod
    def from_params(cls, params: PhysicalParams, kernel: str = "corrected"):
        return cls(
            temperature=params.temperature,
            big_gamma=params.big_gamma,
            big_omega=params.big_omega,
            kernel=kernel,
        )

    def brownian_spectrum(self, omega):
        """Non-symmetrized thermal-force spectrum, elementwise over omega."""
        w = np.asarray(omega, dtype=float)
        pref = self.big_gamma / self.big_omega
        if self.kernel == "halved":
            pref /= 2.0
        if self.temperature == 0.0:
            out = pref * w * (np.sign(w) + 1.0)
        else:
            x = HBAR * w / (2.0 * KB * self.temperature)
            safe = np.where(x == 0.0, 1.0, x)
            # omega -> 0 limit of w*coth(hbar w / 2 kB T) is 2 kB T / hbar.
            wcoth = np.where(
                x == 0.0,
                2.0 * KB * self.temperature / HBAR,
                w / np.tanh(safe),
            )
            out = pref * (wcoth + w)
        return out if out.shape else float(out)

    def commutator_spectrum(self, omega):
        """Antisymmetric part D(omega) - D(-omega)^T in closed form.

        This is the spectrum of the canonical input commutators and carries
        no temperature dependence: the thermal coth terms cancel exactly,
        leaving 2 * pref * omega on the Brownian diagonal and the constant
        +-2i off-diagonals of the optical vacuum blocks.  Evaluating it
        analytically avoids the catastrophic cancellation of differencing
        two nearly equal large thermal spectra at high temperature.

        Accepts a scalar (returns (8, 8)) or shape (n,) (returns (n, 8, 8)).
        """
        w = np.asarray(omega, dtype=float)
        scalar = w.shape == ()
        w = np.atleast_1d(w)
        d = np.zeros(w.shape + (N_NOISE, N_NOISE), dtype=complex)
        pref = self.big_gamma / self.big_omega
        if self.kernel == "halved":
            pref /= 2.0
        d[..., IXI1, IXI1] = 2.0 * pref * w
        d[..., IXI2, IXI2] = 2.0 * pref * w
        for k in (IXIN1, IXIN2, IXINB):
            d[..., k, k + 1] = 2j
            d[..., k + 1, k] = -2j
        return d[0] if scalar else d

    def input_spectrum(self, omega):
        """Non-symmetrized 8x8 input spectral matrix D(omega).

        Accepts a scalar (returns (8, 8)) or an array of shape (n,)
        (returns (n, 8, 8)).
        """
        w = np.asarray(omega, dtype=float)
        scalar = w.shape == ()
        w = np.atleast_1d(w)
        d = np.zeros(w.shape + (N_NOISE, N_NOISE), dtype=complex)
        s_xi = np.atleast_1d(self.brownian_spectrum(w))
        d[..., IXI1, IXI1] = s_xi
        d[..., IXI2, IXI2] = s_xi
        for k in (IXIN1, IXIN2, IXINB):
            d[..., k, k] = 1.0
            d[..., k + 1, k + 1] = 1.0
            d[..., k, k + 1] = 1j
            d[..., k + 1, k] = -1j
        return d[0] if scalar else d


def transfer_matrix(sys: LinearSystem, omega: float) -> np.ndarray:
    """M(omega) = (-i omega I - A)^{-1} B, mapping noise inputs to the state."""
    shifted = -1j * omega * np.eye(N_STATE) - sys.drift
    try:
        return np.linalg.solve(shifted, sys.noise_coupling.astype(complex))
    except np.linalg.LinAlgError as exc:
        raise SingularityError(
            f"shifted drift matrix singular at omega={omega!r}"
        ) from exc


def selected_transfer_rows(sys: LinearSystem, omegas, selectors) -> np.ndarray:
    """Rows c^T M(omega) of the transfer matrix for selection vectors c.

    Solving the adjoint system per selector avoids forming the full transfer
    matrix and, crucially, avoids the catastrophic cancellation that appears
    when nearly-equal large matrix entries are differenced afterwards (the
    relative-momentum response is ~14 orders of magnitude below individual
    mirror responses at strong entangler drive).

    omegas: shape (n,); selectors: shape (10, k).  Returns (n, k, 8).
    """
    w = np.atleast_1d(np.asarray(omegas, dtype=float))
    sel = np.asarray(selectors, dtype=complex)
    eye = np.eye(N_STATE)
    shifted_t = (
        -1j * w[:, None, None] * eye - sys.drift
    ).transpose(0, 2, 1)
    try:
        x = np.linalg.solve(shifted_t, np.broadcast_to(sel, (w.size,) + sel.shape))
    except np.linalg.LinAlgError as exc:
        raise SingularityError("shifted drift matrix singular on grid") from exc
    return x.transpose(0, 2, 1) @ sys.noise_coupling


def spectral_matrix(sys: LinearSystem, noise: NoiseModel, omega: float) -> np.ndarray:
    """Stationary cross-spectral matrix S(omega) = M(omega) D(omega) M(-omega)^T.

    Entry (i, j) is the stationary limit of <x_i(omega) x_j(-omega)>.  Because
    A and B are real, M(-omega) is the conjugate of M(omega) and S is Hermitian
    positive semidefinite whenever D is.
    """
    m_plus = transfer_matrix(sys, omega)
    m_minus = transfer_matrix(sys, -omega)
    return m_plus @ noise.input_spectrum(omega) @ m_minus.T


def hybrid_grid(
    big_omega: float,
    linear_points: int = 2001,
    log_points: int = 512,
    linear_span: tuple = (0.5, 1.5),
    log_span: tuple = (1e-2, 1e2),
) -> np.ndarray:
    """Frequency grid refined around the mechanical resonance.

    A dense linear segment over linear_span * Omega (where the mechanical
    response peaks) merged with a wide log-spaced background grid.
    """
    lin = np.linspace(linear_span[0] * big_omega, linear_span[1] * big_omega,
                      linear_points)
    log = np.geomspace(log_span[0] * big_omega, log_span[1] * big_omega,
                       log_points)
    return np.unique(np.concatenate([lin, log]))
