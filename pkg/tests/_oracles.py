"""Independent reference implementations used to validate the library.

Each oracle takes a different route from the code under test: bisection
instead of the closed-form active set, determinants instead of eigen-sums,
sampled matrices instead of fixed-point equations.
"""

import numpy as np


def bisection_waterfill(eigs, noise, budget, iters=200):
    """Water level by bisection on ``sum((beta - noise/eig)^+) = budget``."""
    eigs = np.asarray(eigs, dtype=float)
    pos = eigs > 0
    levels = noise / eigs[pos]

    def spent(beta):
        return np.clip(beta - levels, 0.0, None).sum()

    lo, hi = 0.0, levels.max() + budget
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if spent(mid) < budget:
            lo = mid
        else:
            hi = mid
    beta = 0.5 * (lo + hi)
    powers = np.zeros_like(eigs)
    powers[pos] = np.clip(beta - levels, 0.0, None)
    return beta, powers


def logdet2(M):
    sign, ld = np.linalg.slogdet(M)
    assert sign.real > 0
    return ld / np.log(2.0)


def primary_rate_unrotated(H11, V1, p1, H12, V2, p2, sigma_sq):
    """Primary rate from the raw channels, without the ``U^H`` rotation."""
    n1 = H11.shape[0]
    S = (H11 @ V1 * p1) @ (H11 @ V1).conj().T
    R = sigma_sq * np.eye(n1)
    if V2.shape[1]:
        R = R + (H12 @ V2 * p2) @ (H12 @ V2).conj().T
    return logdet2(R + S) - logdet2(R)


def sampled_power_profile(values, masses, n):
    """Length-``n`` power vector whose empirical law approximates the atoms."""
    counts = np.floor(np.asarray(masses) * n).astype(int)
    counts[np.argmax(masses)] += n - counts.sum()
    return np.repeat(values, counts)


def empirical_stieltjes(eigs, z):
    return np.mean(1.0 / (eigs[:, None] - np.atleast_1d(z)[None, :]), axis=0)


def random_hermitian_pd(rng, n, shift=1.0):
    B = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return B @ B.conj().T + shift * np.eye(n)


def bisection_waterfill_batch(eigs, noise, budgets, iters=200):
    """Row-wise :func:`bisection_waterfill` for a ``(B, K)`` array."""
    eigs = np.asarray(eigs, dtype=float)
    with np.errstate(divide="ignore"):
        levels = np.where(eigs > 0, noise / eigs, np.inf)
    lo = np.zeros(eigs.shape[0])
    hi = np.where(np.isfinite(levels), levels, 0.0).max(axis=1) + budgets
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        spent = np.clip(mid[:, None] - levels, 0.0, None).sum(axis=1)
        low = spent < budgets
        lo = np.where(low, mid, lo)
        hi = np.where(low, hi, mid)
    return 0.5 * (lo + hi)
