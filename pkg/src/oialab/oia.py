"""Opportunistic interference alignment and the zero-forcing baseline.

The secondary transmitter rotates its cross channel into the primary
receiver's eigen-basis, ``H_tilde = U^H H12``, and only has to null the top
``m1`` rows (the receive dimensions the primary actually uses). Zero-forcing
must null all of ``H12`` and therefore never gets more dimensions.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .channel import null_space_basis, sorted_svd, numerical_rank
from .errors import InvalidSpecError
from .primary import primary_rate

__all__ = [
    "PrecoderKind", "EffectiveCrossChannel", "PrecoderSolution",
    "PrimaryInterferenceCov", "effective_cross_channel", "oia_precoder",
    "zfbf_precoder", "primary_interference_cov", "verify_ia_condition",
    "kernel_nesting_residual",
]


class PrecoderKind(str, Enum):
    OIA = "oia"
    ZFBF = "zfbf"


@dataclass(frozen=True)
class EffectiveCrossChannel:
    H_tilde: np.ndarray
    m1: int

    @property
    def H_tilde_1(self):
        """Rows seen by the primary's used receive dimensions (``m1 x M2``)."""
        return self.H_tilde[:self.m1]

    @property
    def H_tilde_2(self):
        return self.H_tilde[self.m1:]


@dataclass(frozen=True)
class PrecoderSolution:
    """Secondary precoder with orthonormal columns; ``L2 = 0`` means silence."""
    V2: np.ndarray
    kind: PrecoderKind

    @property
    def L2(self):
        return self.V2.shape[1]


@dataclass(frozen=True)
class PrimaryInterferenceCov:
    """Interference-plus-noise covariance ``R`` at the primary receiver.

    ``R`` is expressed after the ``U^H`` rotation; ``m1`` selects the block
    split used by the alignment argument.
    """
    R: np.ndarray
    sigma1_sq: float
    m1: int | None = None

    def blocks(self, m1=None):
        """Interference blocks ``(R1, R2, R3)`` with the noise removed."""
        m1 = self.m1 if m1 is None else m1
        if m1 is None:
            raise InvalidSpecError("a block split needs m1")
        X = self.R - self.sigma1_sq * np.eye(self.R.shape[0])
        return X[:m1, :m1], X[:m1, m1:], X[m1:, m1:]


def effective_cross_channel(U_H11, H12, m1):
    """Rotate ``H12`` into the primary eigen-basis and split after row ``m1``."""
    U_H11 = np.asarray(U_H11)
    H12 = np.asarray(H12)
    n1 = U_H11.shape[0]
    if U_H11.shape != (n1, n1) or H12.shape[0] != n1:
        raise InvalidSpecError(
            f"shape mismatch: U is {U_H11.shape}, H12 is {H12.shape}")
    if not 1 <= m1 <= n1:
        raise InvalidSpecError(f"m1 must lie in [1, {n1}], got {m1}")
    return EffectiveCrossChannel(H_tilde=U_H11.conj().T @ H12, m1=int(m1))


def oia_precoder(effective, rank_tol=None):
    """Orthonormal basis of ``Ker(H_tilde_1)``.

    Columns are the trailing ``M2 - rank(H_tilde_1)`` right singular vectors
    of ``H_tilde_1``. Any positive power allocation on them leaves the
    primary's single-user rate untouched.
    """
    V2 = null_space_basis(effective.H_tilde_1, rank_tol=rank_tol)
    return PrecoderSolution(V2=V2, kind=PrecoderKind.OIA)


def zfbf_precoder(H12, rank_tol=None):
    """Orthonormal basis of ``Ker(H12)``; empty when ``H12`` has full column rank."""
    V2 = null_space_basis(np.asarray(H12), rank_tol=rank_tol)
    return PrecoderSolution(V2=V2, kind=PrecoderKind.ZFBF)


def primary_interference_cov(U_H11, H12, V2, P2, sigma1_sq, m1=None):
    """``R = sigma1^2 I + U^H H12 V2 P2 V2^H H12^H U``.

    ``P2`` may be a vector of diagonal powers or a square diagonal matrix.
    """
    U_H11 = np.asarray(U_H11)
    H12 = np.asarray(H12)
    V2 = np.asarray(V2)
    P2 = np.asarray(P2, dtype=np.float64)
    p2 = np.diag(P2) if P2.ndim == 2 else P2
    n1 = U_H11.shape[0]
    if H12.shape[0] != n1 or V2.shape[0] != H12.shape[1] or p2.size != V2.shape[1]:
        raise InvalidSpecError(
            f"dimension mismatch: U {U_H11.shape}, H12 {H12.shape}, V2 {V2.shape}, P2 {P2.shape}")
    if np.any(p2 < 0):
        raise InvalidSpecError("P2 must be positive semi-definite")
    A = U_H11.conj().T @ H12 @ V2
    R = sigma1_sq * np.eye(n1) + (A * p2) @ A.conj().T
    R = 0.5 * (R + R.conj().T)
    return PrimaryInterferenceCov(R=R, sigma1_sq=float(sigma1_sq), m1=m1)


def verify_ia_condition(transceiver, waterfill, R, eps=1e-300):
    """Relative gap between the primary rate with and without interference.

    Returns ``|C_single - C_interf| / max(C_single, eps)``; zero means the
    secondary transmission is invisible to the primary.
    """
    cov = R.R if isinstance(R, PrimaryInterferenceCov) else np.asarray(R)
    sigma1_sq = R.sigma1_sq if isinstance(R, PrimaryInterferenceCov) else None
    if sigma1_sq is None:
        raise InvalidSpecError("verify_ia_condition needs a PrimaryInterferenceCov")
    single = primary_rate(transceiver, waterfill, sigma1_sq)
    interf = primary_rate(transceiver, waterfill, sigma1_sq, cov)
    return abs(single - interf) / max(single, eps)


def kernel_nesting_residual(V_inner, V_outer):
    """Largest column norm of ``V_inner`` outside ``span(V_outer)``.

    Zero (to rounding) when every column of ``V_inner`` lies in the span of
    the orthonormal columns of ``V_outer``.
    """
    V_inner = np.asarray(V_inner)
    if V_inner.shape[1] == 0:
        return 0.0
    V_outer = np.asarray(V_outer)
    proj = V_outer @ (V_outer.conj().T @ V_inner)
    return float(np.max(np.linalg.norm(V_inner - proj, axis=0)))


def cross_channel_rank(effective, rank_tol=None):
    """``rank(H_tilde_1)`` under the library's rank threshold."""
    H1 = effective.H_tilde_1
    if H1.shape[0] == 0:
        return 0
    return numerical_rank(sorted_svd(H1).singular_values, H1.shape, rank_tol)
