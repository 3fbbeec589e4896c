"""Frequency-resolved entanglement degree and the variance-product criterion.

For any frequency-domain operator O(omega) define the hermitian combination
R_O(omega) = [O(omega) + O(-omega)] / 2.  With u = q1 + q2 and v = p1 - p2,
the degree of entanglement is

    E(omega) = <R_u^2> <R_v^2> / |<[R_q1, R_p1]>|^2 .

E < 1 certifies that the two mirrors are inseparable; E < 1/4 additionally
certifies EPR-type correlations.  The underlying inequality is the
variance-product bound for separable states

    Var(|a| q1 + q2/a) * Var(|a| p1 - p2/a) >= |<[q1, p1]>|^2 ,

implemented here as a standalone checker on two-mode Gaussian covariance
matrices (ordering q1, p1, q2, p2; vacuum variance 1/2; [q, p] = i so the
bound is 1).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dynamics import (
    IP1, IP2, IQ1, IQ2, N_STATE, LinearSystem, NoiseModel,
    selected_transfer_rows,
)
from .errors import (
    DegenerateCommutatorError, InvalidParameterError, UnphysicalStateError,
)


def _selector(*pairs):
    c = np.zeros(N_STATE)
    for idx, coeff in pairs:
        c[idx] = coeff
    return c


U_SELECTOR = _selector((IQ1, 1.0), (IQ2, 1.0))
V_SELECTOR = _selector((IP1, 1.0), (IP2, -1.0))
Q1_SELECTOR = _selector((IQ1, 1.0))
P1_SELECTOR = _selector((IP1, 1.0))

#: Symplectic form for (q1, p1, q2, p2) with [q, p] = i.
SYMPLECTIC_FORM = np.array([
    [0.0, 1.0, 0.0, 0.0],
    [-1.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
    [0.0, 0.0, -1.0, 0.0],
])


@dataclass(frozen=True)
class EntanglementPoint:
    """E(omega) at one (omega, T) point together with its ingredients."""

    omega: float
    temperature: float
    var_u: float
    var_v: float
    commutator_sq: float
    degree: float

    @property
    def entangled(self) -> bool:
        return self.degree < 1.0

    @property
    def epr(self) -> bool:
        return self.degree < 0.25


def r_correlation(s_plus, s_minus, c1, c2) -> complex:
    """<R_O R_P> for O = c1 . x, P = c2 . x from spectral matrices at +-omega.

    In the long-measurement-time limit same-sign frequency terms vanish and
    <R_O(omega) R_P(omega)> = [c1^T S(omega) c2 + c1^T S(-omega) c2] / 4.
    """
    c1 = np.asarray(c1, dtype=float)
    c2 = np.asarray(c2, dtype=float)
    return 0.25 * (c1 @ s_plus @ c2 + c1 @ s_minus @ c2)


def degree_sweep(sys: LinearSystem, noise: NoiseModel, omegas) -> dict:
    """Vectorized E(omega) over a frequency grid.

    Returns a dict of arrays: var_u, var_v, commutator_sq, degree.  The
    quadratic forms are evaluated through adjoint solves on the selection
    vectors (see selected_transfer_rows) so that the strongly suppressed
    relative-momentum variance is computed without catastrophic cancellation.
    """
    w = np.atleast_1d(np.asarray(omegas, dtype=float))
    selectors = np.stack(
        [U_SELECTOR, V_SELECTOR, Q1_SELECTOR, P1_SELECTOR], axis=1
    )
    rows_p = selected_transfer_rows(sys, w, selectors)    # (n, 4, 8)
    rows_m = selected_transfer_rows(sys, -w, selectors)
    d_p = noise.input_spectrum(w)                          # (n, 8, 8)
    d_m = noise.input_spectrum(-w)

    def corr(i, j):
        plus = np.einsum("nk,nkl,nl->n", rows_p[:, i], d_p, rows_m[:, j])
        minus = np.einsum("nk,nkl,nl->n", rows_m[:, i], d_m, rows_p[:, j])
        return 0.25 * (plus + minus)

    var_u = corr(0, 0)
    var_v = corr(1, 1)
    # <[R_q1, R_p1]> depends only on the antisymmetric part of the input
    # spectrum, which is available in closed form.  Using it directly keeps
    # the denominator exactly temperature independent instead of extracting
    # it by differencing two nearly equal thermal quadratic forms.
    da_p = noise.commutator_spectrum(w)
    da_m = noise.commutator_spectrum(-w)
    comm = 0.25 * (
        np.einsum("nk,nkl,nl->n", rows_p[:, 2], da_p, rows_m[:, 3])
        + np.einsum("nk,nkl,nl->n", rows_m[:, 2], da_m, rows_p[:, 3])
    )
    comm_sq = np.abs(comm) ** 2
    if np.any(comm_sq == 0.0):
        raise DegenerateCommutatorError(
            "commutator denominator vanished on the grid"
        )
    return {
        "var_u": var_u.real,
        "var_v": var_v.real,
        "commutator_sq": comm_sq,
        "degree": var_u.real * var_v.real / comm_sq,
    }


def degree_of_entanglement(
    sys: LinearSystem, noise: NoiseModel, omega: float
) -> EntanglementPoint:
    """E(omega) at a single frequency (means <u> = <v> = 0 by construction)."""
    out = degree_sweep(sys, noise, [float(omega)])
    return EntanglementPoint(
        omega=float(omega),
        temperature=noise.temperature,
        var_u=float(out["var_u"][0]),
        var_v=float(out["var_v"][0]),
        commutator_sq=float(out["commutator_sq"][0]),
        degree=float(out["degree"][0]),
    )


@dataclass(frozen=True)
class GaussianState:
    """Two-mode Gaussian state: mean over (q1, p1, q2, p2) and 4x4 covariance.

    Covariance entries are symmetrized second moments
    cov_ij = <Delta O_i Delta O_j + Delta O_j Delta O_i> / 2.
    """

    cov: np.ndarray
    mean: np.ndarray = field(default_factory=lambda: np.zeros(4))

    def __post_init__(self):
        cov = np.asarray(self.cov, dtype=float)
        mean = np.asarray(self.mean, dtype=float)
        if cov.shape != (4, 4) or mean.shape != (4,):
            raise InvalidParameterError("cov must be 4x4 and mean length 4")
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "mean", mean)

    def physicality_margin(self) -> float:
        """Smallest eigenvalue of cov + (i/2) Sigma; >= 0 for physical states."""
        h = self.cov + 0.5j * SYMPLECTIC_FORM
        return float(np.linalg.eigvalsh(h).min())

    def require_physical(self, tol: float = 1e-9):
        margin = self.physicality_margin()
        if margin < -tol:
            raise UnphysicalStateError(margin)
        if not np.allclose(self.cov, self.cov.T):
            raise UnphysicalStateError(0.0, "covariance matrix not symmetric")

    @classmethod
    def from_file(cls, path) -> "GaussianState":
        """Load from whitespace-separated text: 4 covariance rows, then an
        optional fifth row holding the mean vector."""
        data = np.loadtxt(Path(path), ndmin=2)
        if data.shape == (4, 4):
            return cls(cov=data)
        if data.shape == (5, 4):
            return cls(cov=data[:4], mean=data[4])
        raise InvalidParameterError(
            f"expected a 4x4 matrix plus optional mean row, got {data.shape}"
        )

    def to_file(self, path):
        rows = self.cov
        if np.any(self.mean):
            rows = np.vstack([self.cov, self.mean])
        np.savetxt(Path(path), rows, fmt="%.17e")


def separability_products(covs, a_values) -> np.ndarray:
    """Vectorized variance products for stacked covariances.

    covs: (..., 4, 4); a_values: (m,).  Returns products of shape (..., m)
    where product[..., k] = Var(|a| q1 + q2/a) * Var(|a| p1 - p2/a) at
    a = a_values[k].
    """
    covs = np.asarray(covs, dtype=float)
    a = np.asarray(a_values, dtype=float)
    if np.any(a == 0.0):
        raise InvalidParameterError("a must be nonzero")
    cu = np.stack([np.abs(a), 1.0 / a], axis=-1)           # (m, 2)
    cv = np.stack([np.abs(a), -1.0 / a], axis=-1)
    qblock = covs[..., 0::2, 0::2]                          # (..., 2, 2)
    pblock = covs[..., 1::2, 1::2]
    var_u = np.einsum("mi,...ij,mj->...m", cu, qblock, cu)
    var_v = np.einsum("mi,...ij,mj->...m", cv, pblock, cv)
    return var_u * var_v


def separability_product(state: GaussianState, a: float = 1.0):
    """Variance product and the separable-state bound for one weighting a.

    product < bound certifies entanglement; product < bound/4 certifies EPR
    correlations.  The bound |<[q1, p1]>|^2 is 1 in this convention.
    """
    if a == 0.0:
        raise InvalidParameterError("a must be nonzero")
    state.require_physical()
    product = float(separability_products(state.cov, [float(a)])[0])
    return product, 1.0


def optimize_separability(state: GaussianState, a_range=(1e-3, 1e3)):
    """Most violating weighting a, by golden-section search on log a.

    Returns (best_a, best_product).  The search runs over positive a; the
    product depends on a only through a^2, so this covers the magnitude
    freedom of the criterion.
    """
    state.require_physical()
    lo, hi = np.log(a_range[0]), np.log(a_range[1])

    def f(la):
        return float(separability_products(state.cov, [np.exp(la)])[0])

    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - invphi * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(200):
        if hi - lo < 1e-12:
            break
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - invphi * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + invphi * (hi - lo)
            f2 = f(x2)
    best_la = x1 if f1 <= f2 else x2
    best = min(
        [(f(best_la), np.exp(best_la)), (f(0.0), 1.0)], key=lambda t: t[0]
    )
    return best[1], best[0]
