"""Monte Carlo campaigns behind the published curves.

Every campaign draws channels from per-trial counter-based substreams keyed
by ``(configuration, trial)``. The same realisations are reused across the
SNR grid (common random numbers), so curves are smooth and the output does
not depend on how trials are scheduled across workers.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict, replace
import hashlib
import io
import json
import math

import numpy as np

from . import __version__
from .asymptotics import (asymptotic_model, asymptotic_primary_rate,
                          opportunistic_rate_upa)
from .channel import (Dimensions, PowerNoiseConfig, draw_channel, draw_channel_set,
                      db_to_linear, trial_rng, numerical_rank)
from .errors import InvalidSpecError
from .oia import (effective_cross_channel, oia_precoder, zfbf_precoder,
                  primary_interference_cov, verify_ia_condition,
                  kernel_nesting_residual)
from .primary import primary_transceiver, waterfill, waterfill_batch, primary_rate
from .secondary import cci_covariance, equivalent_channel, upa, opa

__all__ = [
    "EXPERIMENTS", "ExperimentSpec", "ResultTable", "LinkSample",
    "default_spec", "simulate_link", "run", "run_to_fraction",
    "run_oia_vs_zfbf", "run_upa_vs_opa", "run_rate_surface",
    "run_asymptote_convergence", "plot_script", "summarize",
]

EXPERIMENTS = ("to-fraction", "oia-vs-zfbf", "upa-vs-opa", "rate-surface",
               "asymptote-convergence")

DEFAULT_SNR_DB = tuple(float(x) for x in range(0, 41, 2))
DEFAULT_TRIALS = 500

IA_TOL = 1e-8
NESTING_TOL = 1e-8
VIOLATION_KEYS = ("s_bounds", "l2_lower_bound", "l2_rank_law", "kernel_nesting",
                  "zfbf_not_larger", "ia_condition")


@dataclass(frozen=True)
class ExperimentSpec:
    """Parameters of one campaign.

    ``configs`` lists antenna configurations; for ``to-fraction`` only
    ``n1``/``m1`` matter and for ``asymptote-convergence`` the sizes come
    from ``sizes`` together with the ratio fields.
    """
    experiment: str
    snr_db: tuple = DEFAULT_SNR_DB
    trials: int = DEFAULT_TRIALS
    seed: int = 0
    configs: tuple = ()
    snr2_db: tuple | None = None
    sizes: tuple = ()
    alpha11: float = 1.0
    alpha12: float = 1.0
    alpha21: float = 1.0
    alpha22: float = 1.0
    sigma_sq: float = 1.0

    def __post_init__(self):
        # normalise sequences so equal specs hash and serialise identically
        object.__setattr__(self, "snr_db", tuple(float(x) for x in self.snr_db))
        if self.snr2_db is not None:
            object.__setattr__(self, "snr2_db", tuple(float(x) for x in self.snr2_db))
        object.__setattr__(self, "configs", tuple(self.configs))
        object.__setattr__(self, "sizes", tuple(int(n) for n in self.sizes))
        if self.experiment not in EXPERIMENTS:
            raise InvalidSpecError(f"unknown experiment {self.experiment!r}; choose from {EXPERIMENTS}")
        if int(self.trials) != self.trials or self.trials < 1:
            raise InvalidSpecError(f"trial count must be >= 1, got {self.trials}")
        if len(self.snr_db) == 0:
            raise InvalidSpecError("SNR grid is empty")
        if not all(np.isfinite(self.snr_db)):
            raise InvalidSpecError("SNR grid must be finite")
        if not 0 <= int(self.seed) < 2**64:
            raise InvalidSpecError("seed must be a 64-bit unsigned integer")
        if self.experiment == "asymptote-convergence":
            if not self.sizes or min(self.sizes) < 1:
                raise InvalidSpecError("asymptote-convergence needs positive sizes")
        elif not self.configs:
            raise InvalidSpecError(f"{self.experiment} needs at least one antenna configuration")

    def to_dict(self):
        d = asdict(self)
        d["configs"] = [[c.n1, c.m1, c.n2, c.m2] for c in self.configs]
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def digest(self):
        return hashlib.sha256(self.to_json().encode()).hexdigest()


def _square(n):
    return Dimensions(n, n, n, n)


def default_spec(experiment, **overrides):
    """Spec with the published antenna settings for ``experiment``."""
    base = {}
    if experiment == "to-fraction":
        n1 = overrides.pop("n_ref", 10)
        alphas = overrides.pop("alpha11_grid", (0.5, 1.0, 2.0))
        base["configs"] = tuple(Dimensions(n1, max(1, round(a * n1)), 1, 1) for a in alphas)
    elif experiment == "oia-vs-zfbf":
        base["configs"] = tuple(
            Dimensions(nr, math.ceil(5 * nr / 4), nr, math.ceil(5 * nr / 4)) for nr in (3, 9))
    elif experiment == "upa-vs-opa":
        base["configs"] = tuple(_square(n) for n in (3, 6, 9))
    elif experiment == "rate-surface":
        base["configs"] = (_square(4),)
    elif experiment == "asymptote-convergence":
        base["sizes"] = (4, 8, 16, 32, 64)
        base["snr_db"] = (10.0,)
    base.update(overrides)
    return ExperimentSpec(experiment=experiment, **base)


# ---------------------------------------------------------------------------
# Result tables
# ---------------------------------------------------------------------------

def summarize(samples, axis=0):
    """Mean, standard error (sample std / sqrt(n)) and count along ``axis``."""
    x = np.asarray(samples, dtype=np.float64)
    n = x.shape[axis]
    mean = x.mean(axis=axis)
    if n > 1:
        stderr = x.std(axis=axis, ddof=1) / math.sqrt(n)
    else:
        stderr = np.zeros_like(mean)
    return mean, stderr, n


def _fmt(v):
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return format(float(v), ".17g")


@dataclass
class ResultTable:
    experiment: str
    columns: list
    rows: list
    metadata: dict = field(default_factory=dict)
    violations: dict = field(default_factory=lambda: {k: 0 for k in VIOLATION_KEYS})
    # per-draw arrays keyed by configuration index; never serialised
    samples: dict = field(default_factory=dict, repr=False)

    def column(self, name):
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows])

    def select(self, **equal):
        """Rows whose named columns equal the given values, as a new table."""
        idx = {k: self.columns.index(k) for k in equal}
        rows = [r for r in self.rows if all(r[idx[k]] == v for k, v in equal.items())]
        return ResultTable(self.experiment, list(self.columns), rows, dict(self.metadata),
                           dict(self.violations))

    def to_csv(self):
        buf = io.StringIO()
        meta = dict(self.metadata)
        meta["violations"] = json.dumps(self.violations, sort_keys=True)
        for key in sorted(meta):
            buf.write(f"# {key}: {meta[key]}\n")
        buf.write(",".join(self.columns) + "\n")
        for row in self.rows:
            buf.write(",".join(_fmt(v) for v in row) + "\n")
        return buf.getvalue()

    def write_csv(self, path):
        try:
            with open(path, "w", newline="") as fh:
                fh.write(self.to_csv())
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc.strerror}") from exc


def _new_table(spec, columns):
    meta = {"experiment": spec.experiment, "seed": spec.seed, "spec": spec.to_json(),
            "spec_hash": spec.digest(), "version": __version__}
    return ResultTable(spec.experiment, columns, [], meta)


# ---------------------------------------------------------------------------
# One link realisation
# ---------------------------------------------------------------------------

@dataclass
class LinkSample:
    """Everything measured on one channel draw at one operating point."""
    m1: int
    S: int
    L2_oia: int
    L2_zfbf: int
    rate_oia_upa: float
    rate_oia_opa: float
    rate_zfbf_upa: float
    rate_zfbf_opa: float
    primary_rate: float
    ia_residual: float
    violations: dict


def _structural_violations(dims, m1, S, L2_oia, rank_h1, L2_zf, nesting, ia_residual):
    n_min = min(dims.n1, dims.m1)
    return {
        "s_bounds": int(not (dims.n1 - n_min <= S <= dims.n1 - 1)),
        "l2_lower_bound": int(L2_oia < max(0, dims.m2 - m1)),
        "l2_rank_law": int(L2_oia != dims.m2 - rank_h1),
        "kernel_nesting": int(nesting > NESTING_TOL),
        "zfbf_not_larger": int(L2_zf > L2_oia),
        "ia_condition": int(not ia_residual <= IA_TOL),
    }


def _secondary_rates(H22, V2, Q, p2_max, m2):
    """(UPA rate, OPA rate) for precoder ``V2`` against noise ``Q``."""
    L2 = V2.shape[1]
    if L2 == 0:
        return 0.0, 0.0
    eq = equivalent_channel(H22, V2, Q)
    lam = eq.lambda_KHK
    gamma = m2 * p2_max / L2
    r_upa = float(np.sum(np.log2(1.0 + gamma * lam)))
    pa = opa(eq, p2_max, m2, V2)
    r_opa = float(np.sum(np.log2(1.0 + lam * pa.powers)))
    return r_upa, r_opa


def simulate_link(channels, power, zfbf=True, transceiver=None, zf_precoder=None):
    """Run the full OIA chain on one channel draw.

    Computes the primary water-filling, the OIA (and optionally ZFBF)
    precoder, both power allocations, the rates and every structural check.
    ``transceiver`` and ``zf_precoder`` let callers reuse the SNR-independent
    parts across an SNR sweep.
    """
    dims = channels.dims
    tr = transceiver if transceiver is not None else primary_transceiver(channels.H11)
    wf = waterfill(tr.lam_sq, power.sigma1_sq, dims.m1 * power.p1_max)
    m1 = wf.m1
    S = dims.n1 - m1
    eff = effective_cross_channel(tr.U, channels.H12, m1)
    h1 = eff.H_tilde_1
    s_h1 = np.linalg.svd(h1, compute_uv=False)
    rank_h1 = numerical_rank(s_h1, h1.shape)
    pre = oia_precoder(eff)
    Q = cci_covariance(channels.H21, tr.V1, wf.powers, power.sigma2_sq)
    r_oia_upa, r_oia_opa = _secondary_rates(channels.H22, pre.V2, Q, power.p2_max, dims.m2)

    if zfbf:
        zf = zf_precoder if zf_precoder is not None else zfbf_precoder(channels.H12)
        r_zf_upa, r_zf_opa = _secondary_rates(channels.H22, zf.V2, Q, power.p2_max, dims.m2)
        L2_zf = zf.L2
        nesting = kernel_nesting_residual(zf.V2, pre.V2)
    else:
        r_zf_upa = r_zf_opa = float("nan")
        L2_zf = 0
        nesting = 0.0

    if pre.L2:
        p2 = np.full(pre.L2, dims.m2 * power.p2_max / pre.L2)
        R = primary_interference_cov(tr.U, channels.H12, pre.V2, p2, power.sigma1_sq, m1)
        ia = verify_ia_condition(tr, wf, R)
    else:
        ia = 0.0
    viol = _structural_violations(dims, m1, S, pre.L2, rank_h1, L2_zf, nesting, ia)
    return LinkSample(m1=m1, S=S, L2_oia=pre.L2, L2_zfbf=L2_zf,
                      rate_oia_upa=r_oia_upa, rate_oia_opa=r_oia_opa,
                      rate_zfbf_upa=r_zf_upa, rate_zfbf_opa=r_zf_opa,
                      primary_rate=primary_rate(tr, wf, power.sigma1_sq),
                      ia_residual=ia, violations=viol)


def _power(spec, snr1_db, snr2_db=None):
    snr2_db = snr1_db if snr2_db is None else snr2_db
    return PowerNoiseConfig.from_snr_db(snr1_db, snr2_db, spec.sigma_sq, spec.sigma_sq)


# ---------------------------------------------------------------------------
# Per-trial workers (module level so they pickle)
# ---------------------------------------------------------------------------

def _trial_to_fraction(spec, ci, t):
    dims = spec.configs[ci]
    rng = trial_rng(spec.seed, ci, t)
    H11 = draw_channel(rng, dims.n1, dims.m1)
    s = np.linalg.svd(H11, compute_uv=False)
    r = numerical_rank(s, H11.shape)
    lam_sq = np.zeros(dims.m1)
    lam_sq[:r] = s[:r] ** 2
    snr = db_to_linear(np.asarray(spec.snr_db))
    budgets = dims.m1 * snr * spec.sigma_sq
    _, powers = waterfill_batch(np.broadcast_to(lam_sq, (snr.size, dims.m1)),
                                spec.sigma_sq, budgets)
    floor = 1e-12 * budgets[:, None] / dims.m1
    m1 = np.count_nonzero(powers > floor, axis=1)
    S = dims.n1 - m1
    n_min = min(dims.n1, dims.m1)
    bad = int(np.count_nonzero((S < dims.n1 - n_min) | (S > dims.n1 - 1)))
    out = np.stack([S / dims.m1, m1 / dims.m1], axis=1)
    return out, {"s_bounds": bad}


def _trial_links(spec, ci, t, zfbf):
    dims = spec.configs[ci]
    rng = trial_rng(spec.seed, ci, t)
    ch = draw_channel_set(rng, dims)
    tr = primary_transceiver(ch.H11)
    zf = zfbf_precoder(ch.H12) if zfbf else None
    rows = []
    viol = {k: 0 for k in VIOLATION_KEYS}
    for snr in spec.snr_db:
        smp = simulate_link(ch, _power(spec, snr), zfbf=zfbf, transceiver=tr, zf_precoder=zf)
        for k, v in smp.violations.items():
            viol[k] += v
        rows.append([smp.rate_oia_upa, smp.rate_oia_opa, smp.rate_zfbf_upa,
                     smp.rate_zfbf_opa, smp.L2_oia, smp.L2_zfbf, smp.S])
    return np.array(rows, dtype=np.float64), viol


def _trial_oia_vs_zfbf(spec, ci, t):
    return _trial_links(spec, ci, t, zfbf=True)


def _trial_upa_vs_opa(spec, ci, t):
    return _trial_links(spec, ci, t, zfbf=False)


def _trial_rate_surface(spec, ci, t):
    dims = spec.configs[ci]
    rng = trial_rng(spec.seed, ci, t)
    ch = draw_channel_set(rng, dims)
    tr = primary_transceiver(ch.H11)
    snr2_grid = spec.snr2_db if spec.snr2_db is not None else spec.snr_db
    out = np.zeros((len(spec.snr_db), len(snr2_grid), 2))
    viol = {k: 0 for k in VIOLATION_KEYS}
    for i, snr1 in enumerate(spec.snr_db):
        pw = _power(spec, snr1)
        wf = waterfill(tr.lam_sq, pw.sigma1_sq, dims.m1 * pw.p1_max)
        eff = effective_cross_channel(tr.U, ch.H12, wf.m1)
        pre = oia_precoder(eff)
        s_h1 = np.linalg.svd(eff.H_tilde_1, compute_uv=False)
        rank_h1 = numerical_rank(s_h1, eff.H_tilde_1.shape)
        v = _structural_violations(dims, wf.m1, dims.n1 - wf.m1, pre.L2, rank_h1, 0, 0.0, 0.0)
        for k in v:
            viol[k] += v[k]
        if pre.L2 == 0:
            continue
        Q = cci_covariance(ch.H21, tr.V1, wf.powers, pw.sigma2_sq)
        eq = equivalent_channel(ch.H22, pre.V2, Q)
        lam = eq.lambda_KHK
        p2 = db_to_linear(np.asarray(snr2_grid)) * spec.sigma_sq
        budgets = dims.m2 * p2
        _, pw_opa = waterfill_batch(np.broadcast_to(lam, (p2.size, lam.size)), 1.0, budgets)
        out[i, :, 0] = np.log2(1.0 + lam * pw_opa).sum(axis=1)
        out[i, :, 1] = np.log2(1.0 + np.outer(budgets / pre.L2, lam)).sum(axis=1)
    return out, viol


def _trial_convergence(spec, ci, t):
    dims = _convergence_dims(spec, spec.sizes[ci])
    rng = trial_rng(spec.seed, ci, t)
    ch = draw_channel_set(rng, dims)
    tr = primary_transceiver(ch.H11)
    rows = []
    viol = {k: 0 for k in VIOLATION_KEYS}
    for snr in spec.snr_db:
        smp = simulate_link(ch, _power(spec, snr), zfbf=False, transceiver=tr)
        for k, v in smp.violations.items():
            viol[k] += v
        rows.append([smp.rate_oia_upa / dims.n2, smp.primary_rate / dims.n1,
                     smp.L2_oia / dims.m2, smp.S / dims.m1])
    return np.array(rows), viol


_TRIAL_FUNCS = {
    "to-fraction": _trial_to_fraction,
    "oia-vs-zfbf": _trial_oia_vs_zfbf,
    "upa-vs-opa": _trial_upa_vs_opa,
    "rate-surface": _trial_rate_surface,
    "asymptote-convergence": _trial_convergence,
}


def _run_chunk(args):
    spec, ci, start, stop = args
    func = _TRIAL_FUNCS[spec.experiment]
    return [func(spec, ci, t) for t in range(start, stop)]


def _collect(spec, ci, workers=1):
    """Stack per-trial outputs in trial order and sum violation counts."""
    if workers > 1:
        bounds = np.linspace(0, spec.trials, min(workers * 4, spec.trials) + 1).astype(int)
        jobs = [(spec, ci, int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, jobs))
        results = [r for part in parts for r in part]
    else:
        results = _run_chunk((spec, ci, 0, spec.trials))
    data = np.stack([r[0] for r in results])
    viol = {k: 0 for k in VIOLATION_KEYS}
    for _, v in results:
        for k, n in v.items():
            viol[k] += n
    return data, viol


def _merge(table, viol):
    for k, n in viol.items():
        table.violations[k] = table.violations.get(k, 0) + n


# ---------------------------------------------------------------------------
# Campaigns
# ---------------------------------------------------------------------------

def run_to_fraction(spec, workers=1):
    """Fraction of transmit opportunities ``S / M1`` against SNR, with ``S_inf``."""
    cols = ["n1", "m1", "alpha11", "snr_db", "s_frac_mean", "s_frac_stderr",
            "m1_frac_mean", "m1_frac_stderr", "trials", "s_inf", "m1_inf"]
    table = _new_table(spec, cols)
    for ci, dims in enumerate(spec.configs):
        data, viol = _collect(spec, ci, workers)
        _merge(table, viol)
        table.samples[ci] = data
        mean, se, n = summarize(data)
        alpha11 = dims.m1 / dims.n1
        for j, snr in enumerate(spec.snr_db):
            model = asymptotic_model(alpha11, 1.0, 1.0, 1.0,
                                     float(db_to_linear(snr)) * spec.sigma_sq, spec.sigma_sq,
                                     1.0, 1.0)
            table.rows.append((dims.n1, dims.m1, alpha11, float(snr), mean[j, 0], se[j, 0],
                               mean[j, 1], se[j, 1], n, model.S_inf, model.m1_inf))
    return table


_LINK_METRICS = ("oia_upa", "oia_opa", "zfbf_upa", "zfbf_opa", "l2_oia", "l2_zfbf", "s")


def _link_table(spec, metrics, workers):
    cols = ["n_r", "n_t", "snr_db"]
    for m in metrics:
        cols += [f"{m}_mean", f"{m}_stderr"]
    cols.append("trials")
    table = _new_table(spec, cols)
    idx = [_LINK_METRICS.index(m) for m in metrics]
    for ci, dims in enumerate(spec.configs):
        data, viol = _collect(spec, ci, workers)
        _merge(table, viol)
        table.samples[ci] = data
        mean, se, n = summarize(data)
        for j, snr in enumerate(spec.snr_db):
            row = [dims.n1, dims.m1, float(snr)]
            for k in idx:
                row += [mean[j, k], se[j, k]]
            row.append(n)
            table.rows.append(tuple(row))
    return table


def run_oia_vs_zfbf(spec, workers=1):
    """Secondary rates of OIA and ZFBF under UPA and OPA, ``SNR1 = SNR2``."""
    return _link_table(spec, _LINK_METRICS, workers)


def run_upa_vs_opa(spec, workers=1):
    """OIA secondary rate under uniform and optimal power allocation."""
    return _link_table(spec, ("oia_upa", "oia_opa", "l2_oia", "s"), workers)


def run_rate_surface(spec, workers=1):
    """Mean OIA secondary rate on a ``(SNR1, SNR2)`` grid."""
    cols = ["n_r", "n_t", "snr1_db", "snr2_db", "opa_mean", "opa_stderr",
            "upa_mean", "upa_stderr", "trials"]
    table = _new_table(spec, cols)
    snr2_grid = spec.snr2_db if spec.snr2_db is not None else spec.snr_db
    for ci, dims in enumerate(spec.configs):
        data, viol = _collect(spec, ci, workers)
        _merge(table, viol)
        table.samples[ci] = data
        mean, se, n = summarize(data)
        for i, s1 in enumerate(spec.snr_db):
            for j, s2 in enumerate(snr2_grid):
                table.rows.append((dims.n1, dims.m1, float(s1), float(s2),
                                   mean[i, j, 0], se[i, j, 0], mean[i, j, 1], se[i, j, 1], n))
    return table


def _convergence_dims(spec, n):
    """Antenna counts at size ``n`` (``N1 = n``) honouring the ratio fields."""
    m1 = max(1, round(spec.alpha11 * n))
    m2 = max(1, round(spec.alpha12 * n))
    n2 = max(1, round(m2 / spec.alpha22))
    return Dimensions(n, m1, n2, m2)


def _check_ratio_consistency(spec):
    implied = spec.alpha11 * spec.alpha22 / spec.alpha12
    if not math.isclose(implied, spec.alpha21, rel_tol=1e-9):
        raise InvalidSpecError(
            f"inconsistent ratios: alpha21 must equal alpha11*alpha22/alpha12 = {implied:g}")


def run_asymptote_convergence(spec, workers=1):
    """Finite-size per-antenna rates against their large-system limits (UPA)."""
    _check_ratio_consistency(spec)
    cols = ["n", "snr_db", "sec_rate_mean", "sec_rate_stderr", "sec_rate_asym", "sec_rel_gap",
            "pri_rate_mean", "pri_rate_stderr", "pri_rate_asym", "pri_rel_gap",
            "l2_frac_mean", "l2_inf", "trials"]
    table = _new_table(spec, cols)
    asym = {}
    for snr in spec.snr_db:
        p = float(db_to_linear(snr)) * spec.sigma_sq
        model = asymptotic_model(spec.alpha11, spec.alpha12, spec.alpha21, spec.alpha22,
                                 p, spec.sigma_sq, p, spec.sigma_sq)
        asym[snr] = (opportunistic_rate_upa(model), asymptotic_primary_rate(model), model.L2_inf)
    for ci, n in enumerate(spec.sizes):
        data, viol = _collect(spec, ci, workers)
        _merge(table, viol)
        table.samples[ci] = data
        mean, se, cnt = summarize(data)
        for j, snr in enumerate(spec.snr_db):
            sec_a, pri_a, l2_inf = asym[snr]
            sec_gap = abs(mean[j, 0] - sec_a) / sec_a if sec_a > 0 else abs(mean[j, 0])
            pri_gap = abs(mean[j, 1] - pri_a) / pri_a
            table.rows.append((int(n), float(snr), mean[j, 0], se[j, 0], sec_a, sec_gap,
                               mean[j, 1], se[j, 1], pri_a, pri_gap, mean[j, 2], l2_inf, cnt))
    return table


_RUNNERS = {
    "to-fraction": run_to_fraction,
    "oia-vs-zfbf": run_oia_vs_zfbf,
    "upa-vs-opa": run_upa_vs_opa,
    "rate-surface": run_rate_surface,
    "asymptote-convergence": run_asymptote_convergence,
}


def run(spec, workers=1):
    """Dispatch ``spec`` to its campaign."""
    return _RUNNERS[spec.experiment](spec, workers=workers)


# ---------------------------------------------------------------------------
# Plot scripts
# ---------------------------------------------------------------------------

_PLOTS = {
    "to-fraction": ("snr_db", "alpha11", ["s_frac_mean", "s_inf"], "S / M1"),
    "oia-vs-zfbf": ("snr_db", "n_r", ["oia_upa_mean", "oia_opa_mean", "zfbf_upa_mean",
                                      "zfbf_opa_mean"], "rate [bits/s/Hz]"),
    "upa-vs-opa": ("snr_db", "n_r", ["oia_upa_mean", "oia_opa_mean"], "rate [bits/s/Hz]"),
    "rate-surface": (None, None, None, "rate [bits/s/Hz]"),
    "asymptote-convergence": ("n", "snr_db", ["sec_rate_mean", "sec_rate_asym",
                                              "pri_rate_mean", "pri_rate_asym"],
                              "rate per antenna [bits/s/Hz]"),
}


def plot_script(table, csv_name):
    """Gnuplot script drawing ``csv_name`` (a path relative to the script)."""
    x, group, ys, ylabel = _PLOTS[table.experiment]
    col = {c: i + 1 for i, c in enumerate(table.columns)}
    lines = [
        f"# generated by oia-lab {__version__} for {table.experiment}",
        "set datafile separator ','",
        "set datafile commentschars '#'",
        "set terminal pngcairo size 900,600",
        f"set output '{table.experiment}.png'",
        "set grid",
    ]
    if table.experiment == "rate-surface":
        lines += [
            "set xlabel 'SNR1 [dB]'", "set ylabel 'SNR2 [dB]'", f"set zlabel '{ylabel}'",
            f"splot '{csv_name}' every ::1 using {col['snr1_db']}:{col['snr2_db']}:{col['opa_mean']} "
            "with points title 'OPA'",
        ]
        return "\n".join(lines) + "\n"
    lines += [f"set xlabel '{x}'", f"set ylabel '{ylabel}'"]
    groups = sorted({r[table.columns.index(group)] for r in table.rows})
    parts = []
    for g in groups:
        for y in ys:
            parts.append(
                f"'{csv_name}' every ::1 using {col[x]}:(${col[group]}=={_fmt(g)} ? ${col[y]} : 1/0) "
                f"with linespoints title '{y} ({group}={_fmt(g)})'")
    lines.append("plot " + ", \\\n     ".join(parts))
    return "\n".join(lines) + "\n"
