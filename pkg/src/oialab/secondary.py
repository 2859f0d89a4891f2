"""Secondary receiver whitening, rate, and power allocation.

The secondary receiver sees the primary's signal as coloured noise with
covariance ``Q``; whitening by ``Q^{-1/2}`` is rate-preserving. Power is
either spread uniformly over the aligned dimensions (UPA) or water-filled
over the eigen-modes of the whitened equivalent channel ``K`` (OPA).
"""

from dataclasses import dataclass

import numpy as np

from .channel import hermitian_inv_sqrt, sorted_svd, SortedSvd
from .errors import InvalidSpecError, NumericalError
from .primary import waterfill

__all__ = [
    "SecondaryNoiseCov", "EquivalentChannel", "SecondaryPa",
    "cci_covariance", "equivalent_channel", "secondary_rate",
    "secondary_rate_direct", "upa", "opa",
]


@dataclass(frozen=True)
class SecondaryNoiseCov:
    Q: np.ndarray
    sigma2_sq: float


@dataclass(frozen=True)
class EquivalentChannel:
    """Whitened channel ``K = Q^{-1/2} H22 V2`` and its SVD."""
    K: np.ndarray
    svd: SortedSvd
    lambda_KHK: np.ndarray

    @property
    def L2(self):
        return self.K.shape[1]


@dataclass(frozen=True)
class SecondaryPa:
    """Diagonal power allocation and the precoder it is applied with.

    ``beta2`` is only set for OPA.
    """
    P2: np.ndarray
    V2_effective: np.ndarray
    beta2: float | None = None

    @property
    def powers(self):
        return np.diag(self.P2).copy()


def cci_covariance(H21, V_H11, P1, sigma2_sq):
    """``Q = H21 V P1 V^H H21^H + sigma2^2 I`` (primary interference plus noise)."""
    H21 = np.asarray(H21)
    P1 = np.asarray(P1, dtype=np.float64)
    p1 = np.diag(P1) if P1.ndim == 2 else P1
    if np.any(p1 < 0):
        raise InvalidSpecError("P1 must be positive semi-definite")
    A = H21 @ np.asarray(V_H11)
    Q = (A * p1) @ A.conj().T + sigma2_sq * np.eye(H21.shape[0])
    return SecondaryNoiseCov(Q=0.5 * (Q + Q.conj().T), sigma2_sq=float(sigma2_sq))


def _q_matrix(Q):
    return Q.Q if isinstance(Q, SecondaryNoiseCov) else np.asarray(Q)


def equivalent_channel(H22, V2, Q):
    W = hermitian_inv_sqrt(_q_matrix(Q))
    K = W @ np.asarray(H22) @ np.asarray(V2)
    L2 = K.shape[1]
    if L2 == 0:
        svd = SortedSvd(U=np.eye(K.shape[0], dtype=complex), singular_values=np.zeros(0),
                        V=np.zeros((0, 0), dtype=complex))
        return EquivalentChannel(K=K, svd=svd, lambda_KHK=np.zeros(0))
    svd = sorted_svd(K)
    lam = np.zeros(L2)
    lam[:svd.singular_values.size] = svd.singular_values ** 2
    return EquivalentChannel(K=K, svd=svd, lambda_KHK=lam)


def secondary_rate(H22, V2, P2, Q):
    """Secondary rate ``log2 det(I + Q^{-1/2} H22 V2 P2 V2^H H22^H Q^{-1/2})``.

    ``P2`` is a vector of diagonal powers or a square matrix. An empty
    precoder gives zero.
    """
    V2 = np.asarray(V2)
    if V2.shape[1] == 0:
        return 0.0
    P2 = np.asarray(P2)
    P2 = np.diag(P2) if P2.ndim == 1 else P2
    try:
        W = hermitian_inv_sqrt(_q_matrix(Q))
    except NumericalError as exc:
        raise NumericalError("secondary_rate", "Q is not positive definite") from exc
    A = W @ np.asarray(H22) @ V2
    M = A @ P2 @ A.conj().T
    ev = np.linalg.eigvalsh(0.5 * (M + M.conj().T))
    return float(np.sum(np.log2(1.0 + np.clip(ev, 0.0, None))))


def secondary_rate_direct(H22, V2, P2, Q):
    """Un-whitened form ``log2 det(I + Q^{-1} H22 V2 P2 V2^H H22^H)``."""
    V2 = np.asarray(V2)
    if V2.shape[1] == 0:
        return 0.0
    P2 = np.asarray(P2)
    P2 = np.diag(P2) if P2.ndim == 1 else P2
    Qm = _q_matrix(Q)
    B = np.asarray(H22) @ V2
    M = np.eye(Qm.shape[0]) + np.linalg.solve(Qm, B @ P2 @ B.conj().T)
    sign, logdet = np.linalg.slogdet(M)
    return float(logdet / np.log(2.0))


def upa(L2, p2_max, M2, V2=None):
    """Uniform allocation ``gamma = M2 p2_max / L2`` on every aligned dimension."""
    if L2 < 0:
        raise InvalidSpecError(f"L2 must be >= 0, got {L2}")
    if V2 is None:
        V2 = np.zeros((M2, L2), dtype=complex)
    if L2 == 0:
        return SecondaryPa(P2=np.zeros((0, 0)), V2_effective=V2)
    gamma = M2 * p2_max / L2
    return SecondaryPa(P2=gamma * np.eye(L2), V2_effective=V2)


def opa(equivalent, p2_max, M2, V2=None):
    """Water-filling ``p_n = (beta2 - 1/lambda_n)^+`` over the modes of ``K^H K``.

    The returned precoder is ``V2 V_K`` so that the optimal input covariance
    is diagonal in the returned basis.
    """
    L2 = equivalent.L2
    if V2 is None:
        V2 = np.eye(L2, dtype=complex)
    if L2 == 0:
        return SecondaryPa(P2=np.zeros((0, 0)), V2_effective=np.asarray(V2)[:, :0])
    lam = equivalent.lambda_KHK
    if not np.any(lam > 0):
        raise NumericalError("opa", "equivalent channel has no positive gain")
    sol = waterfill(lam, 1.0, M2 * p2_max)
    return SecondaryPa(P2=np.diag(sol.powers), V2_effective=np.asarray(V2) @ equivalent.svd.V,
                       beta2=sol.beta)
