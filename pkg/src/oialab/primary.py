"""Capacity-achieving primary transceiver and water-filling.

The primary link diagonalises its channel with the ordered SVD and pours
power over the eigen-modes of ``H11^H H11``. The number of modes it uses
(``m1``) fixes the receive dimensions left free for the secondary link.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .channel import sorted_svd, numerical_rank
from .errors import InvalidSpecError, NumericalError

__all__ = [
    "PrimaryTransceiver", "WaterfillSolution", "primary_transceiver",
    "waterfill", "waterfill_batch", "used_dimensions",
    "transmit_opportunities", "primary_rate", "ZERO_POWER_RTOL",
]

# powers within ZERO_POWER_RTOL * (budget / K) of zero count as unused
ZERO_POWER_RTOL = 1e-12


@dataclass(frozen=True)
class PrimaryTransceiver:
    """Primary precoder ``V1``, post-processor ``D1`` and channel spectrum.

    Attributes
    ----------
    V1 : ndarray (M1, M1)
        Right singular vectors of ``H11``.
    D1 : ndarray (N1, N1)
        ``U^H`` of the ordered SVD of ``H11``.
    U : ndarray (N1, N1)
        Left singular vectors (``D1^H``), kept for the block split.
    lam : ndarray
        The ``min(N1, M1)`` singular values, non-increasing.
    lam_sq : ndarray (M1,)
        Eigenvalues of ``H11^H H11``, zero-padded to length ``M1``.
    """
    V1: np.ndarray
    D1: np.ndarray
    U: np.ndarray
    lam: np.ndarray
    lam_sq: np.ndarray

    @property
    def n1(self):
        return self.D1.shape[0]

    @property
    def m1_antennas(self):
        return self.V1.shape[0]

    def diagonal_gain(self):
        """The ``N1 x M1`` matrix ``Lambda_H11``."""
        L = np.zeros((self.n1, self.m1_antennas))
        k = self.lam.size
        L[np.arange(k), np.arange(k)] = self.lam
        return L


@dataclass(frozen=True)
class WaterfillSolution:
    """Water level, per-dimension powers (input order) and active count."""
    beta: float
    powers: np.ndarray
    m1: int


def primary_transceiver(H11):
    """Capacity-achieving ``(V1, D1)`` for the primary channel ``H11``."""
    H11 = np.asarray(H11)
    if H11.ndim != 2:
        raise InvalidSpecError(f"H11 must be 2-D, got shape {H11.shape}")
    svd = sorted_svd(H11)
    lam = svd.singular_values.copy()
    # numerically-zero modes are exact zeros so they never receive power
    r = numerical_rank(lam, H11.shape)
    lam[r:] = 0.0
    lam_sq = np.zeros(H11.shape[1])
    lam_sq[:lam.size] = lam ** 2
    return PrimaryTransceiver(V1=svd.V, D1=svd.U.conj().T, U=svd.U,
                              lam=lam, lam_sq=lam_sq)


def _check_waterfill_inputs(eigenvalues, noise_var, total_budget):
    if noise_var <= 0 or not np.isfinite(noise_var):
        raise InvalidSpecError(f"noise_var must be > 0, got {noise_var}")
    if total_budget <= 0 or not np.isfinite(total_budget):
        raise InvalidSpecError(f"total_budget must be > 0, got {total_budget}")
    if np.any(eigenvalues < 0) or not np.all(np.isfinite(eigenvalues)):
        raise InvalidSpecError("eigenvalues must be finite and non-negative")


def waterfill_batch(eigenvalues, noise_var, total_budget):
    """Water-filling for a batch of eigenvalue profiles.

    Parameters
    ----------
    eigenvalues : array_like, shape (B, K)
        Non-negative channel gains, any order.
    noise_var : float or array_like (B,)
    total_budget : float or array_like (B,)

    Returns
    -------
    beta : ndarray (B,)
    powers : ndarray (B, K)
        ``max(0, beta - noise/lambda)`` in the input order, zero where the
        gain is zero.
    """
    lam = np.atleast_2d(np.asarray(eigenvalues, dtype=np.float64))
    B, K = lam.shape
    noise = np.broadcast_to(np.asarray(noise_var, dtype=np.float64), (B,))
    budget = np.broadcast_to(np.asarray(total_budget, dtype=np.float64), (B,))
    order = np.argsort(-lam, axis=1, kind="stable")
    lam_sorted = np.take_along_axis(lam, order, axis=1)
    with np.errstate(divide="ignore"):
        levels = np.where(lam_sorted > 0, noise[:, None] / lam_sorted, np.inf)
    beta, k_active = kernels.waterfill_levels(levels, budget)
    if np.any(k_active == 0):
        raise NumericalError("waterfill", "all eigenvalues are zero: no usable dimension")
    active = np.arange(K)[None, :] < k_active[:, None]
    # beta - l_i written as (budget + sum_j (l_j - l_i)) / k: no cancellation
    # when the levels dwarf the budget
    finite = np.where(active, levels, 0.0)
    gaps = np.where(active[:, None, :], finite[:, None, :] - finite[:, :, None], 0.0).sum(axis=2)
    k = np.maximum(k_active, 1)[:, None]
    p_sorted = np.where(active, np.clip((budget[:, None] + gaps) / k, 0.0, None), 0.0)
    powers = np.empty_like(p_sorted)
    np.put_along_axis(powers, order, p_sorted, axis=1)
    return beta, powers


def waterfill(eigenvalues, noise_var, total_budget):
    """Water-filling ``p_n = (beta - noise_var / lambda_n)^+`` saturating the budget.

    The water level is found exactly: eigenvalues are sorted descending and
    the largest active set ``k`` whose closed-form level
    ``beta_k = (budget + noise * sum_{i<=k} 1/lambda_i) / k`` keeps every
    candidate power positive is selected.

    Parameters
    ----------
    eigenvalues : array_like
        Non-negative gains, at least one positive.
    noise_var : float
    total_budget : float
        ``M1 * p1_max`` for the primary link.

    Raises
    ------
    NumericalError
        If every eigenvalue is zero.
    """
    lam = np.asarray(eigenvalues, dtype=np.float64).ravel()
    _check_waterfill_inputs(lam, noise_var, total_budget)
    beta, powers = waterfill_batch(lam[None, :], noise_var, total_budget)
    powers = powers[0]
    floor = ZERO_POWER_RTOL * total_budget / lam.size
    m1 = int(np.count_nonzero(powers > floor))
    return WaterfillSolution(beta=float(beta[0]), powers=powers, m1=m1)


def used_dimensions(solution):
    return solution.m1


def transmit_opportunities(n1, m1):
    """Receive dimensions left free by the primary link, ``S = N1 - m1``."""
    if m1 < 1 or m1 > n1:
        raise InvalidSpecError(f"m1 must lie in [1, N1={n1}], got {m1}")
    return n1 - m1


def primary_rate(transceiver, solution, noise_var, interference_cov=None):
    """Primary rate in bits/s/Hz.

    Without ``interference_cov`` this is the single-user rate
    ``sum log2(1 + lambda_n p_n / sigma^2)``. With the interference-plus-noise
    covariance ``R`` (already rotated by ``U^H``) it is
    ``log2 det(I + R^-1 Lambda P Lambda^H)``.
    """
    lam_sq = transceiver.lam_sq
    p = solution.powers
    if interference_cov is None:
        return float(np.sum(np.log2(1.0 + lam_sq * p / noise_var)))
    R = np.asarray(interference_cov)
    n1 = transceiver.n1
    if R.shape != (n1, n1):
        raise InvalidSpecError(f"interference covariance must be {n1}x{n1}, got {R.shape}")
    k = transceiver.lam.size
    D = np.zeros(n1)
    D[:k] = lam_sq[:k] * p[:k]
    try:
        c_r = np.linalg.cholesky(0.5 * (R + R.conj().T))
    except np.linalg.LinAlgError as exc:
        raise NumericalError("primary_rate", "interference covariance is not positive definite") from exc
    # log det(R + D) - log det(R) with R = C C^H
    Ci = np.linalg.solve(c_r, np.eye(n1))
    M = np.eye(n1) + (Ci * D) @ Ci.conj().T
    sign, logdet = np.linalg.slogdet(M)
    if sign.real <= 0:
        raise NumericalError("primary_rate", "non-positive determinant")
    return float(logdet / np.log(2.0))


def primary_rate_det(transceiver, solution, noise_var):
    """Determinant form ``log2 det(I + Lambda P Lambda^H / sigma^2)`` (cross-check)."""
    L = transceiver.diagonal_gain()
    M = np.eye(transceiver.n1) + (L * solution.powers) @ L.T / noise_var
    return float(np.linalg.slogdet(M)[1] / np.log(2.0))
