"""Channel model and shared linear-algebra primitives.

Channels are i.i.d. circularly-symmetric complex Gaussian with entry
variance ``1/n_cols`` so that ``E[Trace(H H^H)] = n_rows``. The helpers here
(sorted SVD, null-space basis, Hermitian inverse square root) are used by
every downstream module.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidSpecError, NumericalError

__all__ = [
    "Dimensions", "PowerNoiseConfig", "ChannelSet", "SortedSvd",
    "trial_rng", "draw_channel", "draw_channel_set", "sorted_svd",
    "default_rank_tol", "numerical_rank", "null_space_basis",
    "hermitian_inv_sqrt", "db_to_linear",
]

_EPS = np.finfo(np.float64).eps


@dataclass(frozen=True)
class Dimensions:
    """Antenna counts of the two links.

    ``n1``/``m1`` are the primary receive/transmit antennas and ``n2``/``m2``
    the secondary ones.
    """
    n1: int
    m1: int
    n2: int
    m2: int

    def __post_init__(self):
        for name in ("n1", "m1", "n2", "m2"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise InvalidSpecError(f"{name} must be a positive integer, got {value!r}")

    @property
    def alphas(self):
        """Ratios ``alpha_ij = M_j / N_i`` as a dict keyed ``'11'``, ``'12'``, ..."""
        n = {1: self.n1, 2: self.n2}
        m = {1: self.m1, 2: self.m2}
        return {f"{i}{j}": m[j] / n[i] for i in (1, 2) for j in (1, 2)}


@dataclass(frozen=True)
class PowerNoiseConfig:
    """Per-antenna power budgets and receiver noise variances (linear)."""
    p1_max: float
    p2_max: float
    sigma1_sq: float = 1.0
    sigma2_sq: float = 1.0

    def __post_init__(self):
        for name in ("p1_max", "p2_max", "sigma1_sq", "sigma2_sq"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise InvalidSpecError(f"{name} must be finite and > 0, got {value!r}")

    @classmethod
    def from_snr_db(cls, snr1_db, snr2_db, sigma1_sq=1.0, sigma2_sq=1.0):
        """Budgets giving ``SNR_i = p_i,max / sigma_i^2`` at the stated noise floors."""
        return cls(p1_max=db_to_linear(snr1_db) * sigma1_sq,
                   p2_max=db_to_linear(snr2_db) * sigma2_sq,
                   sigma1_sq=sigma1_sq, sigma2_sq=sigma2_sq)

    @property
    def snr1(self):
        return self.p1_max / self.sigma1_sq

    @property
    def snr2(self):
        return self.p2_max / self.sigma2_sq


@dataclass(frozen=True)
class ChannelSet:
    """The four channel matrices ``H_ij`` (receiver i, transmitter j)."""
    H11: np.ndarray
    H12: np.ndarray
    H21: np.ndarray
    H22: np.ndarray

    @property
    def dims(self):
        return Dimensions(n1=self.H11.shape[0], m1=self.H11.shape[1],
                          n2=self.H22.shape[0], m2=self.H22.shape[1])


@dataclass(frozen=True)
class SortedSvd:
    """Full SVD ``A = U diag(s) V^H`` with ``s`` non-increasing.

    ``U`` is ``m x m`` and ``V`` is ``n x n`` (full bases, so trailing
    columns of ``V`` span the kernel).
    """
    U: np.ndarray
    singular_values: np.ndarray
    V: np.ndarray

    def reconstruct(self):
        m, n = self.U.shape[0], self.V.shape[0]
        k = self.singular_values.size
        return (self.U[:, :k] * self.singular_values) @ self.V[:, :k].conj().T \
            if k else np.zeros((m, n), dtype=self.U.dtype)


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=np.float64) / 10.0)


def trial_rng(seed, *key):
    """Counter-based generator for one Monte Carlo substream.

    The stream depends only on ``seed`` and the integer ``key`` (for example
    ``(grid_index, trial_index)``), never on scheduling order, so results are
    reproducible at any worker count.
    """
    seed = int(seed)
    if seed < 0 or seed >= 2**64:
        raise InvalidSpecError(f"seed must be a 64-bit unsigned integer, got {seed}")
    ss = np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def draw_channel(rng, n_rows, n_cols):
    """Draw an ``n_rows x n_cols`` CN(0, 1/n_cols) matrix.

    Real and imaginary parts are independent N(0, 1/(2 n_cols)).
    """
    if n_rows < 1 or n_cols < 1:
        raise InvalidSpecError(f"channel dimensions must be >= 1, got {(n_rows, n_cols)}")
    scale = np.sqrt(0.5 / n_cols)
    parts = rng.standard_normal((n_rows, n_cols, 2))
    return scale * (parts[..., 0] + 1j * parts[..., 1])


def draw_channel_set(rng, dims):
    return ChannelSet(
        H11=draw_channel(rng, dims.n1, dims.m1),
        H12=draw_channel(rng, dims.n1, dims.m2),
        H21=draw_channel(rng, dims.n2, dims.m1),
        H22=draw_channel(rng, dims.n2, dims.m2),
    )


def sorted_svd(A):
    """Full SVD with singular values in non-increasing order.

    LAPACK already returns them sorted; the explicit argsort guards against
    backends that do not.
    """
    A = np.asarray(A)
    if A.ndim != 2 or A.size == 0:
        raise InvalidSpecError(f"sorted_svd needs a non-empty 2-D array, got shape {A.shape}")
    try:
        U, s, Vh = np.linalg.svd(A, full_matrices=True)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("sorted_svd", str(exc)) from exc
    if not np.all(np.isfinite(s)):
        raise NumericalError("sorted_svd", "non-finite singular values")
    order = np.argsort(-s, kind="stable")
    if np.any(order != np.arange(s.size)):
        s = s[order]
        U = np.concatenate([U[:, order], U[:, s.size:]], axis=1)
        Vh = np.concatenate([Vh[order], Vh[s.size:]], axis=0)
    return SortedSvd(U=U, singular_values=s, V=Vh.conj().T)


def default_rank_tol(shape):
    """Relative rank threshold ``max(m, n) * eps * 64``."""
    return max(shape) * _EPS * 64


def numerical_rank(singular_values, shape, rank_tol=None):
    """Count singular values above ``rank_tol * sigma_max``."""
    s = np.asarray(singular_values)
    if s.size == 0 or s[0] == 0:
        return 0
    tol = default_rank_tol(shape) if rank_tol is None else rank_tol
    return int(np.count_nonzero(s > tol * s[0]))


def null_space_basis(A, rank_tol=None, svd=None):
    """Orthonormal basis of ``Ker(A)`` from the trailing right singular vectors.

    Parameters
    ----------
    A : ndarray, shape (m, n)
    rank_tol : float, optional
        Relative threshold on singular values; defaults to
        :func:`default_rank_tol`.
    svd : SortedSvd, optional
        Precomputed decomposition of ``A``.

    Returns
    -------
    ndarray, shape (n, n - rank(A))
        Empty (``n x 0``) when ``A`` has full column rank.
    """
    A = np.asarray(A)
    m, n = A.shape
    if m == 0:
        return np.eye(n, dtype=np.complex128)
    if svd is None:
        svd = sorted_svd(A)
    r = numerical_rank(svd.singular_values, A.shape, rank_tol)
    return svd.V[:, r:]


def hermitian_inv_sqrt(Q, tol=None):
    """Return the Hermitian ``S`` with ``S Q S = I`` for Hermitian PD ``Q``.

    Raises
    ------
    NumericalError
        If an eigenvalue is not positive beyond ``tol`` (relative to the
        largest one), i.e. ``Q`` is not positive definite.
    """
    Q = np.asarray(Q)
    Qh = 0.5 * (Q + Q.conj().T)
    try:
        w, E = np.linalg.eigh(Qh)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("hermitian_inv_sqrt", str(exc)) from exc
    if tol is None:
        tol = Q.shape[0] * _EPS
    if w[0] <= tol * max(abs(w[-1]), 1e-300):
        raise NumericalError("hermitian_inv_sqrt",
                             f"matrix is not positive definite (min eigenvalue {w[0]:.3e})")
    S = (E / np.sqrt(w)) @ E.conj().T
    return 0.5 * (S + S.conj().T)
