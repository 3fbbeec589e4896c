"""Homodyne readout of the mirror positions through the meter outputs.

The cavity boundary relation a_out = sqrt(gamma_a) a - a_in turns the meter
phase quadrature into

    Y_out_j(omega) = gain_j(omega) q_j(omega) + refl(omega) Y_in_j(omega),

with gain(omega) = 2 g alpha sqrt(gamma_a) / (gamma_a/2 - i omega) and a pure
phase factor refl(omega) = (gamma_a/2 + i omega) / (gamma_a/2 - i omega) on
the reflected vacuum.  Mirror 2 couples to its meter with the opposite sign,
so its channel carries gain with an extra factor -1; the combiner removes the
orientation so that "sum" always estimates the center-of-mass signal q1 + q2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import (
    IQ1, IQ2, IYA1, IYA2, IYIN1, IYIN2, N_STATE,
    LinearSystem, NoiseModel, selected_transfer_rows,
)
from .errors import GridMismatchError, InvalidParameterError
from .model import PhysicalParams, steady_state

_CHANNELS = {1: (IQ1, IYA1, IYIN1, 1.0), 2: (IQ2, IYA2, IYIN2, -1.0)}


@dataclass(frozen=True)
class ReadoutChannel:
    """Transfer functions of one meter output channel."""

    g_alpha: float
    gamma_a: float
    sign: float = 1.0       # -1 for the mirror-2 channel

    @classmethod
    def for_mirror(cls, params: PhysicalParams, channel: int):
        if channel not in (1, 2):
            raise InvalidParameterError("channel must be 1 or 2")
        ss = steady_state(params)
        return cls(
            g_alpha=params.g * ss.alpha,
            gamma_a=params.gamma_a,
            sign=_CHANNELS[channel][3],
        )

    def gain(self, omega):
        """Position-to-output transfer 2 g alpha sqrt(gamma_a)/(gamma_a/2 - i w)."""
        return (
            2.0 * self.g_alpha * np.sqrt(self.gamma_a)
            / (self.gamma_a / 2.0 - 1j * np.asarray(omega))
        )

    def noise_reflection(self, omega):
        w = np.asarray(omega)
        return (self.gamma_a / 2.0 + 1j * w) / (self.gamma_a / 2.0 - 1j * w)


def gain_condition(params: PhysicalParams, omega: float, threshold: float = 10.0):
    """Measurement-gain figure of merit g^2 alpha^2 / [(gamma_a^2/4 + w^2)/4].

    Returns (ratio, ratio > threshold).  The readout faithfully tracks the
    mirror position only when the ratio is large.
    """
    ss = steady_state(params)
    ratio = (params.g * ss.alpha) ** 2 / (
        (params.gamma_a ** 2 / 4.0 + omega ** 2) / 4.0
    )
    return float(ratio), bool(ratio > threshold)


def _output_selectors(sys: LinearSystem, channel: int):
    iq, iya, iyin, sign = _CHANNELS[channel]
    return iq, iya, iyin, sign


def _r_spectrum(sys, noise, omegas, coeff_fn):
    """Symmetrized output spectrum for noise-space coefficient rows.

    coeff_fn(omega_array) must return rows (n, 8) of the map from noise
    inputs to the output operator.  Returns Re of the hermitian combination
    [S(omega) + S(-omega)] / 2 for the operator against itself.
    """
    w = np.atleast_1d(np.asarray(omegas, dtype=float))
    rp = coeff_fn(w)
    rm = coeff_fn(-w)
    dp = noise.input_spectrum(w)
    dm = noise.input_spectrum(-w)
    plus = np.einsum("nk,nkl,nl->n", rp, dp, rm)
    minus = np.einsum("nk,nkl,nl->n", rm, dm, rp)
    return 0.5 * (plus + minus).real


def output_spectrum(sys: LinearSystem, noise: NoiseModel, omegas, channel: int):
    """Symmetrized spectrum of Y_out_j, assembled directly from the
    input-output relation: gain * q_j response + reflected vacuum, including
    the interference term carried by the correlated intracavity solution."""
    iq, _, iyin, sign = _output_selectors(sys, channel)
    chan = ReadoutChannel.for_mirror(sys.params, channel)
    e_yin = np.zeros(8)
    e_yin[iyin] = 1.0
    q_sel = np.zeros((N_STATE, 1))
    q_sel[iq, 0] = 1.0

    def coeff(w):
        q_rows = selected_transfer_rows(sys, w, q_sel)[:, 0, :]   # (n, 8)
        return (
            sign * chan.gain(w)[:, None] * q_rows
            + chan.noise_reflection(w)[:, None] * e_yin
        )

    out = _r_spectrum(sys, noise, omegas, coeff)
    return out if np.ndim(omegas) else float(out[0])


def output_spectrum_via_transfer(
    sys: LinearSystem, noise: NoiseModel, omegas, channel: int
):
    """Same spectrum assembled from the boundary relation
    Y_out = sqrt(gamma_a) Y_cav - Y_in using the full transfer matrix."""
    _, iya, iyin, _ = _output_selectors(sys, channel)
    e_yin = np.zeros(8)
    e_yin[iyin] = 1.0
    y_sel = np.zeros((N_STATE, 1))
    y_sel[iya, 0] = 1.0
    root_gamma = np.sqrt(sys.params.gamma_a)

    def coeff(w):
        y_rows = selected_transfer_rows(sys, w, y_sel)[:, 0, :]
        return root_gamma * y_rows - e_yin

    out = _r_spectrum(sys, noise, omegas, coeff)
    return out if np.ndim(omegas) else float(out[0])


@dataclass(frozen=True)
class TwoChannelSpectra:
    """Auto- and cross-spectra of the two sign-corrected output currents.

    The stored currents are oriented so each carries +gain * q_j; s12 is the
    hermitian-combination cross spectrum between them.
    """

    omegas: np.ndarray
    s11: np.ndarray
    s22: np.ndarray
    s12: np.ndarray


def two_channel_spectra(sys: LinearSystem, noise: NoiseModel, omegas):
    """Evaluate both oriented output currents and their cross-spectrum."""
    w = np.atleast_1d(np.asarray(omegas, dtype=float))
    coeffs = {}
    for channel in (1, 2):
        iq, _, iyin, sign = _output_selectors(sys, channel)
        chan = ReadoutChannel.for_mirror(sys.params, channel)
        e_yin = np.zeros(8)
        e_yin[iyin] = 1.0
        q_sel = np.zeros((N_STATE, 1))
        q_sel[iq, 0] = 1.0

        def coeff(wa, sign=sign, chan=chan, q_sel=q_sel, e_yin=e_yin):
            q_rows = selected_transfer_rows(sys, wa, q_sel)[:, 0, :]
            raw = (
                sign * chan.gain(wa)[:, None] * q_rows
                + chan.noise_reflection(wa)[:, None] * e_yin
            )
            return sign * raw          # orient so the signal term is +gain*q

        coeffs[channel] = coeff
    dp = noise.input_spectrum(w)
    dm = noise.input_spectrum(-w)

    def cross(ci, cj):
        plus = np.einsum("nk,nkl,nl->n", ci(w), dp, cj(-w))
        minus = np.einsum("nk,nkl,nl->n", ci(-w), dm, cj(w))
        return 0.5 * (plus + minus)

    return TwoChannelSpectra(
        omegas=w,
        s11=cross(coeffs[1], coeffs[1]).real,
        s22=cross(coeffs[2], coeffs[2]).real,
        s12=cross(coeffs[1], coeffs[2]),
    )


def combine_currents(spectra, mode: str, second=None):
    """Combine two channels measured on identical grids.

    mode="sum" estimates the center-of-mass coordinate (q1 + q2); "difference"
    the relative coordinate.  Accepts either a TwoChannelSpectra (preferred,
    includes the cross term) or two plain (omegas, psd) pairs treated as
    uncorrelated channels.  The two vacuum floors add incoherently.
    """
    if mode not in ("sum", "difference"):
        raise InvalidParameterError("mode must be 'sum' or 'difference'")
    s = 1.0 if mode == "sum" else -1.0
    if isinstance(spectra, TwoChannelSpectra):
        return spectra.s11 + spectra.s22 + 2.0 * s * spectra.s12.real
    if second is None:
        raise InvalidParameterError("second channel spectrum required")
    w1, p1 = spectra
    w2, p2 = second
    if np.shape(w1) != np.shape(w2) or not np.array_equal(w1, w2):
        raise GridMismatchError("channel spectra are on different grids")
    return np.asarray(p1) + np.asarray(p2)
