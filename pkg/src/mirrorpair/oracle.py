"""Independent verification machinery.

Three unrelated oracles live here: a time-domain Monte Carlo integrator for
the classical (high-temperature) limit of the linear dynamics, a random
generator of separable two-mode Gaussian states for stress-testing the
variance-product criterion, and the two-mode squeezed vacuum as the canonical
entangled witness.

The SDE path deliberately shares no linear algebra with the frequency-domain
engine beyond the drift matrix itself: it uses matrix exponentials / explicit
Euler stepping and FFT periodograms instead of resolvent solves.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .dynamics import N_NOISE, N_STATE, LinearSystem, NoiseModel, is_stable
from .errors import DriftUnstableError, InvalidParameterError
from .entanglement import GaussianState


@dataclass(frozen=True)
class SdeRun:
    """Settings for one Monte Carlo run."""

    seed: int
    dt: float
    total_time: float
    burn_in: float
    trajectories: int
    record: tuple = ((0,),)   # tuples of state indices summed into one signal
    scheme: str = "euler"     # "euler" or "exact" (exact-in-distribution)

    def __post_init__(self):
        if self.dt <= 0 or self.total_time <= 0 or self.burn_in < 0:
            raise InvalidParameterError("dt, total_time must be > 0; burn_in >= 0")
        if self.trajectories < 1:
            raise InvalidParameterError("trajectories must be >= 1")
        if self.scheme not in ("euler", "exact"):
            raise InvalidParameterError("scheme must be 'euler' or 'exact'")


def _validate_step(sys: LinearSystem, run: SdeRun):
    p = sys.params
    fastest = min(1.0 / p.gamma_a, 1.0 / p.gamma_b, 1.0 / p.big_omega)
    if run.scheme == "euler" and run.dt >= 0.05 * fastest:
        raise InvalidParameterError(
            f"Euler step {run.dt} too coarse; need dt < {0.05 * fastest:.3e}"
        )


def white_noise_intensities(noise: NoiseModel) -> np.ndarray:
    """Per-channel white-noise intensities matching the symmetrized input
    spectra at the mechanical resonance (vacuum optical channels are flat;
    the thermal channel is approximated as white at its resonance value)."""
    d = noise.input_spectrum(noise.big_omega)
    d_minus = noise.input_spectrum(-noise.big_omega)
    sym = 0.5 * (d + d_minus.T)
    return np.real(np.diag(sym)).copy()


def _discretize(sys: LinearSystem, noise: NoiseModel, dt: float, scheme: str):
    """One-step propagator and noise-increment Cholesky factor."""
    a = sys.drift
    b = sys.noise_coupling
    q = b @ np.diag(white_noise_intensities(noise)) @ b.T
    if scheme == "euler":
        phi = np.eye(N_STATE) + a * dt
        cov = q * dt
    else:
        # Van Loan block-exponential for the exact discrete-time noise
        # covariance integral_0^dt e^{As} Q e^{A^T s} ds.
        blk = np.zeros((2 * N_STATE, 2 * N_STATE))
        blk[:N_STATE, :N_STATE] = -a
        blk[:N_STATE, N_STATE:] = q
        blk[N_STATE:, N_STATE:] = a.T
        e = expm(blk * dt)
        phi = e[N_STATE:, N_STATE:].T
        cov = phi @ e[:N_STATE, N_STATE:]
        cov = 0.5 * (cov + cov.T)
    # Small jitter keeps the Cholesky factor defined when channels vanish.
    scale = max(np.abs(cov).max(), 1e-300)
    chol = np.linalg.cholesky(cov + 1e-14 * scale * np.eye(N_STATE))
    return phi, chol


@dataclass(frozen=True)
class OracleSpectra:
    """Averaged periodograms with per-bin standard errors."""

    omegas: np.ndarray            # angular frequencies, >= 0
    psd: np.ndarray               # (n_record, n_bins)
    stderr: np.ndarray

    def at(self, omega: float, signal: int = 0, bins: int = 1):
        """Bin-averaged PSD around omega (averaging `bins` nearest bins)."""
        order = np.argsort(np.abs(self.omegas - omega))[:bins]
        return float(self.psd[signal, order].mean())


def classical_sde_psd(
    sys: LinearSystem, noise: NoiseModel, run: SdeRun
) -> OracleSpectra:
    """Monte Carlo stationary spectra of the classical stochastic dynamics.

    Integrates dx = A x dt + B dW with white-noise intensities matching the
    symmetrized input spectra near resonance, then averages per-trajectory
    periodograms.  Valid as a check of the quantum spectra in the
    high-temperature regime kB T >> hbar Omega where symmetrized quantum and
    classical spectra coincide.
    """
    if not is_stable(sys):
        raise DriftUnstableError(np.linalg.eigvals(sys.drift))
    _validate_step(sys, run)
    phi, chol = _discretize(sys, noise, run.dt, run.scheme)

    n_burn = int(round(run.burn_in / run.dt))
    n_rec = int(round(run.total_time / run.dt))
    n_traj = run.trajectories
    sel = np.zeros((len(run.record), N_STATE))
    for i, idxs in enumerate(run.record):
        for j in idxs:
            sel[i, j] = 1.0

    # Trajectories evolve in parallel as columns of a single generator
    # stream, so a given seed fixes every sample path exactly.
    rng = np.random.default_rng(np.random.SeedSequence(run.seed))
    x = np.zeros((N_STATE, n_traj))
    recorded = np.empty((len(run.record), n_rec, n_traj))
    for step in range(n_burn + n_rec):
        w = rng.standard_normal((N_STATE, n_traj))
        x = phi @ x + chol @ w
        if step >= n_burn:
            recorded[:, step - n_burn, :] = sel @ x

    # Periodogram in the convention S(w) = integral ds e^{iws} <O(0)O(s)>:
    # P(w_k) = dt^2/T |sum_n x_n e^{i w_k t_n}|^2.
    t_rec = n_rec * run.dt
    spec = np.abs(np.fft.rfft(recorded, axis=1)) ** 2 * (run.dt ** 2 / t_rec)
    omegas = 2.0 * np.pi * np.fft.rfftfreq(n_rec, run.dt)
    psd = spec.mean(axis=2)
    stderr = spec.std(axis=2, ddof=1) / np.sqrt(n_traj)
    return OracleSpectra(omegas=omegas, psd=psd, stderr=stderr)


# ---------------------------------------------------------------------------
# Gaussian-state generators


def _rotation(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, s], [-s, c]]).transpose(2, 0, 1)


def _single_mode_covs(rng, n):
    """Random squeezed thermal single-mode covariances, shape (n, 2, 2)."""
    theta = rng.uniform(0.0, np.pi, size=n)
    r = rng.uniform(0.0, 1.5, size=n)
    nbar = rng.exponential(0.5, size=n)
    diag = np.zeros((n, 2, 2))
    diag[:, 0, 0] = np.exp(-2.0 * r)
    diag[:, 1, 1] = np.exp(2.0 * r)
    rot = _rotation(theta)
    covs = rot @ diag @ rot.transpose(0, 2, 1)
    return (nbar + 0.5)[:, None, None] * covs


def sample_separable_covariances(seed, count, max_components: int = 8):
    """Vectorized sampler behind sample_separable_gaussian.

    Returns (covs, means) with shapes (count, 4, 4) and (count, 4).  Each
    state is a random mixture rho = sum_i w_i rho_i1 (x) rho_i2 of products of
    displaced, rotated squeezed thermal states; the covariance includes the
    spread of the component means.
    """
    if count < 1:
        raise InvalidParameterError("count must be >= 1")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    n_comp = rng.integers(2, max_components + 1, size=count)
    covs = np.empty((count, 4, 4))
    means = np.empty((count, 4))
    for k in np.unique(n_comp):
        idx = np.nonzero(n_comp == k)[0]
        m = idx.size * k
        weights = rng.dirichlet(np.ones(k), size=idx.size)        # (b, k)
        c1 = _single_mode_covs(rng, m).reshape(idx.size, k, 2, 2)
        c2 = _single_mode_covs(rng, m).reshape(idx.size, k, 2, 2)
        mu = rng.normal(0.0, 1.0, size=(idx.size, k, 4))
        comp = np.zeros((idx.size, k, 4, 4))
        comp[:, :, :2, :2] = c1
        comp[:, :, 2:, 2:] = c2
        mean = np.einsum("bk,bki->bi", weights, mu)
        second = np.einsum(
            "bk,bkij->bij", weights, comp + np.einsum("bki,bkj->bkij", mu, mu)
        )
        covs[idx] = second - np.einsum("bi,bj->bij", mean, mean)
        means[idx] = mean
    return covs, means


def sample_separable_gaussian(seed, count, max_components: int = 8):
    """Random separable two-mode Gaussian states (physical by construction)."""
    covs, means = sample_separable_covariances(seed, count, max_components)
    return [GaussianState(cov=c, mean=m) for c, m in zip(covs, means)]


def tmsv_state(r: float, local_scalings=None) -> GaussianState:
    """Two-mode squeezed vacuum with squeezing parameter r >= 0.

    Var(q1 + q2) = Var(p1 - p2) = exp(-2 r).  Optional local_scalings
    (s1, s2) apply the local symplectic q_i -> s_i q_i, p_i -> p_i / s_i.
    """
    if r < 0:
        raise InvalidParameterError("r must be >= 0")
    ch, sh = np.cosh(2.0 * r) / 2.0, np.sinh(2.0 * r) / 2.0
    cov = np.diag([ch, ch, ch, ch])
    # Anticorrelated positions, correlated momenta.
    cov[0, 2] = cov[2, 0] = -sh
    cov[1, 3] = cov[3, 1] = sh
    if local_scalings is not None:
        s1, s2 = local_scalings
        scale = np.diag([s1, 1.0 / s1, s2, 1.0 / s2])
        cov = scale @ cov @ scale.T
    return GaussianState(cov=cov)
