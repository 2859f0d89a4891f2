"""Hot numeric kernels with numba and pure-numpy implementations.

Two loops dominate runtime: the exact active-set water-filling solve (run
per Monte Carlo trial and over large batches of eigenvalue profiles) and the
damped fixed-point iteration for Stieltjes transforms (run at every node of
the asymptotic-rate quadrature). Each has a ``*_numpy`` and a ``*_numba``
variant with identical semantics; the public names dispatch on
:data:`oialab._accel.HAS_NUMBA`.
"""

import numpy as np

from ._accel import HAS_NUMBA, njit

__all__ = ["waterfill_levels", "stieltjes_fixed_point", "BACKEND"]


# ---------------------------------------------------------------------------
# Water-filling over sorted noise levels
# ---------------------------------------------------------------------------

def waterfill_levels_numpy(levels, budgets):
    """Batched water-filling on ascending noise levels.

    Parameters
    ----------
    levels : ndarray, shape (B, K)
        Per-row noise levels ``n_k`` sorted ascending; ``inf`` marks a
        dimension that can never be used.
    budgets : ndarray, shape (B,)
        Total power per row.

    Returns
    -------
    beta : ndarray, shape (B,)
        Water level, ``nan`` where no level is finite.
    k_active : ndarray of int64, shape (B,)
        Number of active (leading) dimensions.
    """
    levels = np.asarray(levels, dtype=np.float64)
    budgets = np.asarray(budgets, dtype=np.float64)
    K = levels.shape[1]
    with np.errstate(invalid="ignore"):
        cs = np.cumsum(levels, axis=1)
        beta_k = (budgets[:, None] + cs) / np.arange(1, K + 1)
        valid = beta_k > levels
    # the valid set is always a prefix, so its size is the active count
    k_active = valid.sum(axis=1).astype(np.int64)
    beta = np.full(levels.shape[0], np.nan)
    ok = k_active > 0
    beta[ok] = beta_k[ok, k_active[ok] - 1]
    return beta, k_active


@njit
def _waterfill_levels_jit(levels, budgets):
    B, K = levels.shape
    beta = np.empty(B)
    k_active = np.zeros(B, dtype=np.int64)
    for b in range(B):
        acc = 0.0
        best = np.nan
        for k in range(K):
            lev = levels[b, k]
            if not np.isfinite(lev):
                break
            acc += lev
            cand = (budgets[b] + acc) / (k + 1)
            if cand > lev:
                best = cand
                k_active[b] = k + 1
            else:
                break
        beta[b] = best
    return beta, k_active


def waterfill_levels_numba(levels, budgets):
    levels = np.ascontiguousarray(levels, dtype=np.float64)
    budgets = np.ascontiguousarray(budgets, dtype=np.float64)
    return _waterfill_levels_jit(levels, budgets)


# ---------------------------------------------------------------------------
# Stieltjes fixed point  G = -1 / (z - g(G) - h(G))
# ---------------------------------------------------------------------------

def stieltjes_fixed_point_numpy(z, p1, w1, alpha1, p2, w2, alpha2,
                                eta=0.5, tol=1e-12, max_iter=10_000):
    """Damped Picard iteration for the two-group Stieltjes fixed point.

    ``g(u) = sum(w1 * p1 / (1 + p1 * u / alpha1))`` and likewise ``h`` with
    the second group. Pass empty ``p2``/``w2`` for the single-group
    equation. Iteration starts at ``-1/z`` and stops once
    ``|G - rhs(G)| <= tol``.

    Returns
    -------
    G, residual, iterations : ndarray
        One entry per ``z``.
    """
    z = np.asarray(z, dtype=np.float64)
    p1 = np.asarray(p1, dtype=np.float64)
    w1 = np.asarray(w1, dtype=np.float64)
    p2 = np.asarray(p2, dtype=np.float64)
    w2 = np.asarray(w2, dtype=np.float64)
    wp1 = w1 * p1
    wp2 = w2 * p2
    s1 = p1 / alpha1
    s2 = p2 / alpha2

    def rhs(zz, G):
        g = (wp1[None, :] / (1.0 + s1[None, :] * G[:, None])).sum(axis=1)
        h = (wp2[None, :] / (1.0 + s2[None, :] * G[:, None])).sum(axis=1)
        return -1.0 / (zz - g - h)

    G = -1.0 / z
    resid = np.full(z.shape, np.inf)
    iters = np.zeros(z.shape, dtype=np.int64)
    active = np.ones(z.shape, dtype=bool)
    for it in range(max_iter + 1):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        r = rhs(z[idx], G[idx])
        res = np.abs(G[idx] - r)
        resid[idx] = res
        iters[idx] = it
        done = res <= tol
        active[idx[done]] = False
        step = idx[~done]
        if it < max_iter:
            G[step] = (1.0 - eta) * G[step] + eta * r[~done]
    return G, resid, iters


@njit
def _stieltjes_fixed_point_jit(z, wp1, s1, wp2, s2, eta, tol, max_iter):
    n = z.shape[0]
    G_out = np.empty(n)
    resid = np.empty(n)
    iters = np.zeros(n, dtype=np.int64)
    for i in range(n):
        zi = z[i]
        G = -1.0 / zi
        res = np.inf
        for it in range(max_iter + 1):
            acc = 0.0
            for k in range(wp1.shape[0]):
                acc += wp1[k] / (1.0 + s1[k] * G)
            for k in range(wp2.shape[0]):
                acc += wp2[k] / (1.0 + s2[k] * G)
            r = -1.0 / (zi - acc)
            res = abs(G - r)
            iters[i] = it
            if res <= tol:
                break
            if it < max_iter:
                G = (1.0 - eta) * G + eta * r
        G_out[i] = G
        resid[i] = res
    return G_out, resid, iters


def stieltjes_fixed_point_numba(z, p1, w1, alpha1, p2, w2, alpha2,
                                eta=0.5, tol=1e-12, max_iter=10_000):
    z = np.ascontiguousarray(z, dtype=np.float64)
    p1 = np.asarray(p1, dtype=np.float64)
    p2 = np.asarray(p2, dtype=np.float64)
    wp1 = np.ascontiguousarray(np.asarray(w1, dtype=np.float64) * p1)
    wp2 = np.ascontiguousarray(np.asarray(w2, dtype=np.float64) * p2)
    s1 = np.ascontiguousarray(p1 / alpha1)
    s2 = np.ascontiguousarray(p2 / alpha2)
    return _stieltjes_fixed_point_jit(z, wp1, s1, wp2, s2,
                                      float(eta), float(tol), int(max_iter))


if HAS_NUMBA:
    waterfill_levels = waterfill_levels_numba
    stieltjes_fixed_point = stieltjes_fixed_point_numba
    BACKEND = "numba"
else:
    waterfill_levels = waterfill_levels_numpy
    stieltjes_fixed_point = stieltjes_fixed_point_numpy
    BACKEND = "numpy"
