"""Large-system predictions for the opportunistic link.

With every antenna count growing at fixed ratios ``alpha_ij = M_j / N_i``
the eigenvalues of ``H11^H H11`` follow a Marchenko-Pastur law. Integrating
the water-filling rule against it gives the limiting water level, the
fraction of primary modes in use, and the fractions of transmit
opportunities ``S_inf`` and secondary streams ``L2_inf``. The secondary rate
per receive antenna is the integral over the noise level of the gap between
two Stieltjes transforms, each the root of a scalar fixed-point equation.
"""

from dataclasses import dataclass, field
import math

import numpy as np
from scipy import integrate, optimize, special

from . import kernels
from .errors import InvalidSpecError, NumericalError

__all__ = [
    "MpLaw", "AsymptoticModel", "LimitingPowerDistribution",
    "mp_expectation", "asymptotic_waterlevel", "asymptotic_m1",
    "asymptotic_S", "asymptotic_L2", "asymptotic_model",
    "primary_power_distribution", "upa_power_distribution",
    "point_mass", "stieltjes_g_h", "solve_GM1", "solve_GM",
    "asymptotic_rate", "asymptotic_rate_details", "RateIntegral",
    "asymptotic_primary_rate", "opportunistic_rate_upa",
]

_LN2 = math.log(2.0)
QUAD_ABS_TOL = 1e-10
# large integrands (high SNR) cannot reach an absolute 1e-10 in double precision
QUAD_REL_TOL = 1e-12


@dataclass(frozen=True)
class MpLaw:
    """Marchenko-Pastur law of ``H^H H`` for an ``N x M`` channel with entry variance ``1/M``.

    ``ratio`` is ``N / M = 1 / alpha``. The law has an atom of mass
    ``(1 - ratio)^+`` at zero and density
    ``sqrt((x - a)(b - x)) / (2 pi x)`` on ``[a, b]`` with
    ``a, b = (1 -+ sqrt(ratio))^2``.
    """
    ratio: float

    def __post_init__(self):
        if not self.ratio > 0 or not np.isfinite(self.ratio):
            raise InvalidSpecError(f"MP ratio must be finite and > 0, got {self.ratio}")

    @classmethod
    def from_alpha(cls, alpha):
        return cls(1.0 / alpha)

    @property
    def a(self):
        return (1.0 - math.sqrt(self.ratio)) ** 2

    @property
    def b(self):
        return (1.0 + math.sqrt(self.ratio)) ** 2

    @property
    def atom(self):
        return max(0.0, 1.0 - self.ratio)

    def density(self, x):
        x = np.asarray(x, dtype=np.float64)
        a, b = self.a, self.b
        inside = (x > a) & (x < b) & (x > 0)
        out = np.zeros_like(x)
        xi = x[inside]
        out[inside] = np.sqrt((xi - a) * (b - xi)) / (2.0 * np.pi * xi)
        return out


def mp_expectation(law, f, lower_cut=-np.inf, tol=QUAD_ABS_TOL):
    """``E[f(lambda)]`` under the MP law restricted to ``lambda >= lower_cut``.

    The continuous part is integrated over ``[max(a, lower_cut), b]`` with
    QUADPACK's algebraic-endpoint rule so the square-root edges are handled
    exactly. The error target is ``tol`` absolute or ``QUAD_REL_TOL``
    relative, whichever is looser. The zero atom contributes ``f(0) * atom`` only when
    ``lower_cut <= 0``.

    Raises
    ------
    NumericalError
        If the quadrature does not reach ``tol``.
    """
    a, b = law.a, law.b
    lo = max(a, lower_cut)
    total = 0.0
    if lower_cut <= 0 and law.atom > 0:
        total += float(f(0.0)) * law.atom
    if lo >= b:
        return total
    two_pi = 2.0 * np.pi
    if lo > a:
        integrand = lambda x: f(x) * math.sqrt(x - a) / (two_pi * x)
        wvar = (0.0, 0.5)
    elif a > 0:
        integrand = lambda x: f(x) / (two_pi * x)
        wvar = (0.5, 0.5)
    else:
        # ratio == 1: the density behaves like x^{-1/2} at the origin
        integrand = lambda x: f(x) / two_pi
        wvar = (-0.5, 0.5)
    out = integrate.quad(integrand, lo, b, weight="alg", wvar=wvar,
                         epsabs=tol, epsrel=QUAD_REL_TOL, limit=500, full_output=1)
    value, abserr = out[0], out[1]
    if len(out) > 3 or abserr > max(tol, QUAD_REL_TOL * abs(value)):
        raise NumericalError("mp_expectation", "quadrature did not converge", residual=abserr)
    return total + value


def asymptotic_waterlevel(alpha11, p1_max, sigma1_sq, rtol=1e-12):
    """Limiting water level ``beta_inf`` of the primary link.

    Root in ``beta`` of ``E[(beta - sigma^2/lambda)^+] = p1_max`` under the
    MP law with ratio ``1/alpha11``. The left side is continuous and
    strictly increasing once ``beta > sigma^2 / b``, so the root is unique.
    """
    if min(alpha11, p1_max, sigma1_sq) <= 0:
        raise InvalidSpecError("alpha11, p1_max and sigma1_sq must be > 0")
    law = MpLaw.from_alpha(alpha11)

    def excess(beta):
        cut = sigma1_sq / beta
        return mp_expectation(law, lambda x: beta - sigma1_sq / x, lower_cut=cut) - p1_max

    lo = sigma1_sq / law.b
    hi = max(2.0 * lo, p1_max + sigma1_sq)
    for _ in range(200):
        if excess(hi) > 0:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise NumericalError("asymptotic_waterlevel", "could not bracket the water level")
    try:
        beta = optimize.brentq(excess, lo, hi, xtol=1e-300, rtol=rtol, maxiter=500)
    except (ValueError, RuntimeError) as exc:
        raise NumericalError("asymptotic_waterlevel", str(exc)) from exc
    return float(beta)


def asymptotic_m1(alpha11, beta_inf, sigma1_sq):
    """Fraction of primary transmit dimensions in use, ``lim m1 / M1``."""
    if beta_inf <= 0:
        raise InvalidSpecError("beta_inf must be > 0")
    law = MpLaw.from_alpha(alpha11)
    return mp_expectation(law, lambda x: 1.0, lower_cut=sigma1_sq / beta_inf)


def asymptotic_S(alpha11, m1_inf):
    """Transmit opportunities per primary transmit antenna, ``1/alpha11 - m1_inf``."""
    return 1.0 / alpha11 - m1_inf


def asymptotic_L2(alpha11, alpha12, m1_inf):
    """Secondary streams per secondary transmit antenna, ``(1 - alpha11/alpha12 m1_inf)^+``."""
    return max(0.0, 1.0 - alpha11 / alpha12 * m1_inf)


@dataclass(frozen=True)
class AsymptoticModel:
    """Antenna ratios, powers and the derived large-system fractions."""
    alpha11: float
    alpha12: float
    alpha21: float
    alpha22: float
    p1_max: float
    sigma1_sq: float
    p2_max: float
    sigma2_sq: float
    beta_inf: float
    m1_inf: float
    S_inf: float
    L2_inf: float

    def s_bounds(self):
        """Lower and upper bounds on ``S_inf``: ``(1/alpha11 - 1)^+`` and ``1/alpha11``."""
        return max(0.0, 1.0 / self.alpha11 - 1.0), 1.0 / self.alpha11


def asymptotic_model(alpha11, alpha12, alpha21, alpha22,
                     p1_max, sigma1_sq, p2_max, sigma2_sq):
    for name, v in dict(alpha11=alpha11, alpha12=alpha12, alpha21=alpha21,
                        alpha22=alpha22, p1_max=p1_max, sigma1_sq=sigma1_sq,
                        p2_max=p2_max, sigma2_sq=sigma2_sq).items():
        if not v > 0 or not np.isfinite(v):
            raise InvalidSpecError(f"{name} must be finite and > 0, got {v}")
    beta = asymptotic_waterlevel(alpha11, p1_max, sigma1_sq)
    m1 = asymptotic_m1(alpha11, beta, sigma1_sq)
    return AsymptoticModel(
        alpha11=alpha11, alpha12=alpha12, alpha21=alpha21, alpha22=alpha22,
        p1_max=p1_max, sigma1_sq=sigma1_sq, p2_max=p2_max, sigma2_sq=sigma2_sq,
        beta_inf=beta, m1_inf=m1, S_inf=asymptotic_S(alpha11, m1),
        L2_inf=asymptotic_L2(alpha11, alpha12, m1))


# ---------------------------------------------------------------------------
# Limiting power distributions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LimitingPowerDistribution:
    """Compactly supported distribution of per-dimension powers.

    ``atoms`` are exact point masses. A continuous part, when present, is
    carried as quadrature nodes and weights (``nodes``/``node_masses``) so
    expectations are weighted sums either way.
    """
    atom_values: np.ndarray
    atom_masses: np.ndarray
    nodes: np.ndarray = field(default_factory=lambda: np.zeros(0))
    node_masses: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        for arr in (self.atom_values, self.atom_masses, self.nodes, self.node_masses):
            if np.any(np.asarray(arr) < 0):
                raise InvalidSpecError("power distributions must be supported on [0, inf) with non-negative mass")

    @property
    def values(self):
        return np.concatenate([self.atom_values, self.nodes])

    @property
    def masses(self):
        return np.concatenate([self.atom_masses, self.node_masses])

    def total_mass(self):
        return float(self.masses.sum())

    def mean(self):
        return float(self.values @ self.masses)

    def expect(self, f):
        return float(np.asarray(f(self.values)) @ self.masses)


def point_mass(value, mass=1.0):
    return LimitingPowerDistribution(np.array([float(value)]), np.array([float(mass)]))


def _atomic(values, masses):
    values = np.asarray(values, dtype=np.float64)
    masses = np.asarray(masses, dtype=np.float64)
    keep = masses > 0
    return LimitingPowerDistribution(values[keep], masses[keep])


def _jacobi_rule(lo, hi, s, n):
    """Nodes/weights for ``int_lo^hi (hi - x)^{1/2} (x - lo)^s phi(x) dx``."""
    x, w = special.roots_jacobi(n, 0.5, s)
    half = 0.5 * (hi - lo)
    nodes = lo + half * (x + 1.0)
    weights = w * half ** (1.5 + s)
    return nodes, weights


def primary_power_distribution(model, n_nodes=256):
    """Limiting law of the primary water-filling powers.

    Each primary mode with eigenvalue ``lambda`` gets ``(beta_inf -
    sigma1^2/lambda)^+``, so the law is the MP law pushed through that map:
    a continuous part of mass ``m1_inf`` and an atom at zero carrying the
    rest.
    """
    law = MpLaw.from_alpha(model.alpha11)
    a, b = law.a, law.b
    cut = model.sigma1_sq / model.beta_inf
    lo = max(a, cut)
    two_pi = 2.0 * np.pi
    if lo > a:
        lam, w = _jacobi_rule(lo, b, 0.0, n_nodes)
        dens = np.sqrt(lam - a) / (two_pi * lam)
    elif a > 0:
        lam, w = _jacobi_rule(a, b, 0.5, n_nodes)
        dens = 1.0 / (two_pi * lam)
    else:
        lam, w = _jacobi_rule(0.0, b, -0.5, n_nodes)
        dens = np.full_like(lam, 1.0 / two_pi)
    node_masses = w * dens
    powers = model.beta_inf - model.sigma1_sq / lam
    zero_mass = max(0.0, 1.0 - node_masses.sum())
    return LimitingPowerDistribution(
        atom_values=np.array([0.0]), atom_masses=np.array([zero_mass]),
        nodes=np.clip(powers, 0.0, None), node_masses=node_masses)


def upa_power_distribution(model):
    """Spectrum of ``V2 P2 V2^H`` under uniform allocation.

    ``V2`` is a partial isometry, so the spectrum is ``gamma = p2_max /
    L2_inf`` with mass ``L2_inf`` and zero with the remaining mass.
    """
    if model.L2_inf <= 0:
        return point_mass(0.0)
    gamma = model.p2_max / model.L2_inf
    return _atomic([gamma, 0.0], [model.L2_inf, 1.0 - model.L2_inf])


# ---------------------------------------------------------------------------
# Stieltjes transforms
# ---------------------------------------------------------------------------

def stieltjes_g_h(dist, u, alpha):
    """``E[p / (1 + p u / alpha)]`` for ``p`` drawn from ``dist``.

    This is ``g`` when ``dist`` is the primary power law with ``alpha =
    alpha21`` and ``h`` for the secondary law with ``alpha = alpha22``.
    """
    values, masses = dist.values, dist.masses
    denom = 1.0 + values * np.asarray(u, dtype=np.float64)[..., None] / alpha
    live = masses > 0
    if np.any(denom[..., live] <= 0):
        raise NumericalError("stieltjes_g_h", f"singular integrand at u={u}")
    out = (masses * values / denom).sum(axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def _check_z(z):
    z = np.asarray(z, dtype=np.float64)
    if np.any(~(z < 0)):
        raise InvalidSpecError("fixed-point equations are solved for z < 0 only")
    return z


def _solve(z, dist1, alpha1, dist2, alpha2, tol, max_iter, eta, operation):
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(_check_z(z))
    if dist2 is None:
        p2 = w2 = np.zeros(0)
        alpha2 = 1.0
    else:
        p2, w2 = dist2.values, dist2.masses
    G, resid, _ = kernels.stieltjes_fixed_point(
        z, dist1.values, dist1.masses, alpha1, p2, w2, alpha2,
        eta=eta, tol=tol, max_iter=max_iter)
    worst = float(resid.max()) if resid.size else 0.0
    if not worst <= tol:
        raise NumericalError(operation, f"fixed point did not converge in {max_iter} iterations",
                             residual=worst)
    return float(G[0]) if scalar else G


def solve_GM1(z, dist_P1, alpha21, tol=1e-12, max_iter=10_000, eta=0.5):
    """Stieltjes transform of the limiting spectrum of ``H21 V1 P1 V1^H H21^H``.

    Solves ``G = -1 / (z - g(G))`` by damped iteration from ``G0 = -1/z``.
    ``z`` may be a scalar or an array of negative reals.
    """
    return _solve(z, dist_P1, alpha21, None, 1.0, tol, max_iter, eta, "solve_GM1")


def solve_GM(z, dist_P1, dist_P2, alpha21, alpha22, tol=1e-12, max_iter=10_000, eta=0.5):
    """Stieltjes transform of the limiting spectrum of ``M1 + H22 V2 P2 V2^H H22^H``.

    Solves ``G = -1 / (z - g(G) - h(G))``.
    """
    return _solve(z, dist_P1, alpha21, dist_P2, alpha22, tol, max_iter, eta, "solve_GM")


@dataclass(frozen=True)
class RateIntegral:
    """Asymptotic secondary rate and quadrature diagnostics."""
    value: float
    n_nodes: int
    error_estimate: float
    min_integrand: float
    max_residual: float


def _rate_on_rule(n, sigma2_sq, dist_P1, dist_P2, alpha21, alpha22, tol_fp):
    # z = sigma^2 / u maps [sigma^2, inf) onto (0, 1]; the transformed
    # integrand tends to mean(M2)/sigma^2 as u -> 0, so no truncation is needed
    x, w = special.roots_legendre(n)
    u = 0.5 * (x + 1.0)
    w = 0.5 * w
    z = sigma2_sq / u
    g1 = solve_GM1(-z, dist_P1, alpha21, tol=tol_fp)
    g = solve_GM(-z, dist_P1, dist_P2, alpha21, alpha22, tol=tol_fp)
    diff = g1 - g
    value = float(np.sum(w * diff * sigma2_sq / u ** 2)) / _LN2
    return value, float(diff.min())


def asymptotic_rate_details(model, dist_P1, dist_P2, tol=1e-6, max_nodes=4096,
                            tol_fp=1e-12):
    """Asymptotic per-receive-antenna secondary rate with diagnostics.

    Evaluates ``(1/ln 2) int_{sigma2^2}^inf G_M1(-z) - G_M(-z) dz`` with
    Gauss-Legendre rules of doubling size until successive values agree to
    ``tol`` bits.

    Raises
    ------
    NumericalError
        If the quadrature does not settle by ``max_nodes`` or the integrand
        is negative beyond rounding.
    """
    if dist_P2.mean() == 0:
        return RateIntegral(0.0, 0, 0.0, 0.0, 0.0)
    args = (model.sigma2_sq, dist_P1, dist_P2, model.alpha21, model.alpha22, tol_fp)
    n = 16
    prev, mn = _rate_on_rule(n, *args)
    min_seen = mn
    cur = prev
    while True:
        n *= 2
        if n > max_nodes:
            raise NumericalError("asymptotic_rate", "rate integral did not converge",
                                 residual=abs(cur - prev))
        cur, mn = _rate_on_rule(n, *args)
        min_seen = min(min_seen, mn)
        if min_seen < -1e-12:
            raise NumericalError("asymptotic_rate", "negative integrand", residual=min_seen)
        if abs(cur - prev) <= tol:
            return RateIntegral(cur, n, abs(cur - prev), min_seen, tol_fp)
        prev = cur


def asymptotic_rate(model, dist_P1, dist_P2, tol=1e-6):
    """Asymptotic secondary rate per receive antenna (bits/s/Hz)."""
    return asymptotic_rate_details(model, dist_P1, dist_P2, tol=tol).value


def opportunistic_rate_upa(model, n_nodes=256, tol=1e-6):
    """Asymptotic secondary rate per receive antenna under uniform allocation."""
    return asymptotic_rate(model, primary_power_distribution(model, n_nodes),
                           upa_power_distribution(model), tol=tol)


def asymptotic_primary_rate(model):
    """Single-user primary rate per receive antenna in the large-system limit.

    ``alpha11 * E[log2(beta_inf * lambda / sigma1^2)]`` over the modes above
    the water-filling cut.
    """
    law = MpLaw.from_alpha(model.alpha11)
    cut = model.sigma1_sq / model.beta_inf
    val = mp_expectation(law, lambda x: math.log2(model.beta_inf * x / model.sigma1_sq),
                         lower_cut=cut)
    return model.alpha11 * val
