"""Monte Carlo experiments over the samplers, with deterministic parallelism.

Every experiment is split into fixed-size tasks; task i draws from the
Philox stream (master_seed, i), accumulates its partial sums in a fixed
order, and the partials are reduced in task order.  Results are therefore
bit-identical for any worker count.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict

import numpy as np

from . import stats, theory, zeta
from .ensembles import (
    CircularRemSampler,
    Seed,
    box_coarsen,
    field_extremes,
    log_charpoly_grid,
    partition_function,
    sojourn_measure,
)
from .specfun import DomainError, EULER_GAMMA, log_barnes_g
from .theory import TWO_PI


class ConfigError(ValueError):
    pass


_ENSEMBLES = ("cue", "rem", "fourier")
TASK_SIZE = 256

_THREAD_VARS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS")


def default_workers() -> int:
    env = os.environ.get("LOGFREEZE_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError("LOGFREEZE_WORKERS must be an integer") from None
    return 1


@dataclass(frozen=True)
class ExperimentConfig:
    """Shared Monte Carlo configuration.

    ``size`` is the matrix dimension N (cue), the lattice size M (rem) or
    the harmonic cutoff K (fourier).
    """

    ensemble: str = "cue"
    size: int = 64
    arc_length: float = TWO_PI
    beta_grid: tuple = ()
    x_grid: tuple = ()
    q_grid: tuple = ()
    n_samples: int = 1024
    n_grid: int | None = None
    master_seed: int = 1
    n_workers: int = 1
    emit_samples: bool = False
    rem_w: float = 1e-6

    def __post_init__(self):
        if self.ensemble not in _ENSEMBLES:
            raise ConfigError(f"unknown ensemble '{self.ensemble}'")
        if self.n_samples < 1:
            raise ConfigError("need at least one sample")
        if not 0 < self.arc_length <= TWO_PI + 1e-12:
            raise ConfigError("arc length must lie in (0, 2 pi]")
        if any(b <= 0 for b in self.beta_grid):
            raise ConfigError("beta grid must be positive")
        if any(not 0.0 < x < 2.0 for x in self.x_grid):
            raise ConfigError("x grid must lie in (0, 2)")
        if self.n_workers < 1:
            raise ConfigError("worker count must be positive")
        if self.size < 2:
            raise ConfigError("system size must be at least 2")

    def as_dict(self) -> dict:
        d = asdict(self)
        d["beta_grid"] = list(self.beta_grid)
        d["x_grid"] = list(self.x_grid)
        d["q_grid"] = list(self.q_grid)
        return d


@dataclass(frozen=True)
class StatisticEstimate:
    name: str
    estimate: float
    stderr: float
    n: int
    theory: float | None = None
    theory_tag: str | None = None


@dataclass
class RunSummary:
    experiment: str
    config: dict
    master_seed: int
    statistics: list[StatisticEstimate] = field(default_factory=list)
    extras: dict = field(default_factory=dict)
    wall_seconds: float = 0.0

    def add(self, name, total, total_sq, n, theory_value=None, tag=None):
        mean = total / n
        var = max(total_sq / n - mean * mean, 0.0)
        se = math.sqrt(var / n) if n > 1 else float("nan")
        self.statistics.append(StatisticEstimate(name, mean, se, n, theory_value, tag))

    def get(self, name: str) -> StatisticEstimate:
        for s in self.statistics:
            if s.name == name:
                return s
        raise KeyError(name)

    def body_dict(self) -> dict:
        """Deterministic content (wall clock excluded)."""
        return {
            "experiment": self.experiment,
            "config": self.config,
            "master_seed": self.master_seed,
            "statistics": [
                {
                    "name": s.name,
                    "estimate": s.estimate,
                    "stderr": s.stderr,
                    "n": s.n,
                    **({"theory": s.theory, "theory_tag": s.theory_tag} if s.theory is not None else {}),
                }
                for s in self.statistics
            ],
            "extras": self.extras,
        }


# ---------------------------------------------------------------------------
# Deterministic fork-join
# ---------------------------------------------------------------------------

def _limit_threads():
    for var in _THREAD_VARS:
        os.environ[var] = "1"


def _task_spans(n_samples: int, task_size: int = TASK_SIZE):
    spans = []
    start = 0
    while start < n_samples:
        count = min(task_size, n_samples - start)
        spans.append((len(spans), count))
        start += count
    return spans


def run_tasks(fn, payloads, n_workers: int):
    """Map fn over payloads; results come back in payload order."""
    if n_workers <= 1 or len(payloads) <= 1:
        return [fn(p) for p in payloads]
    saved = {v: os.environ.get(v) for v in _THREAD_VARS}
    _limit_threads()
    try:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            return list(pool.map(fn, payloads, chunksize=1))
    finally:
        for var, old in saved.items():
            if old is None:
                os.environ.pop(var, None)
            else:
                os.environ[var] = old


_REM_CACHE: dict[tuple[int, float], CircularRemSampler] = {}


def _rem_sampler(m: int, w: float) -> CircularRemSampler:
    key = (m, w)
    if key not in _REM_CACHE:
        _REM_CACHE[key] = CircularRemSampler(m, w)
    return _REM_CACHE[key]


def _cfg_from_dict(d: dict) -> ExperimentConfig:
    d = dict(d)
    for key in ("beta_grid", "x_grid", "q_grid"):
        d[key] = tuple(d[key])
    return ExperimentConfig(**d)


# ---------------------------------------------------------------------------
# Freezing of the normalized free energy
# ---------------------------------------------------------------------------

def _freezing_task(payload) -> dict:
    cfg = _cfg_from_dict(payload["cfg"])
    index, count = payload["index"], payload["count"]
    betas = np.array(cfg.beta_grid)
    rng = Seed(cfg.master_seed, index).generator()
    log_size = math.log(cfg.size)
    acc = np.zeros(len(betas))
    acc_sq = np.zeros(len(betas))
    if cfg.ensemble == "rem":
        sampler = _rem_sampler(cfg.size, cfg.rem_w)
        draws = sampler.draw(rng, count)
        for row in draws:
            shift = -betas[:, None] * row[None, :]
            peak = shift.max(axis=1)
            log_z = peak + np.log(np.sum(np.exp(shift - peak[:, None]), axis=1))
            neg_f = log_z / (betas * log_size)
            acc += neg_f
            acc_sq += neg_f**2
    else:
        for _ in range(count):
            field_v = log_charpoly_grid(
                _phases_from_rng(cfg.size, rng), cfg.arc_length, cfg.n_grid
            )
            log_z = partition_function(field_v, betas, cfg.size)
            neg_f = log_z / (betas * log_size)
            acc += neg_f
            acc_sq += neg_f**2
    return {"sum": acc, "sum_sq": acc_sq, "n": count}


def _phases_from_rng(n, rng):
    from .ensembles import _haar_phases, PhaseVector

    return PhaseVector(n, _haar_phases(n, rng))


def freezing_offset(beta: float, ensemble: str) -> float:
    """Known O(1) part of E{log Z}: the finite-size factors of the typical
    scale plus the Euler-Mascheroni mean of the fluctuation log(Z/Z_e).
    Defined in the high-temperature phase only."""
    if beta >= 1.0:
        return 0.0
    from scipy.special import gammaln

    off = -gammaln(1.0 - beta * beta) + beta * beta * EULER_GAMMA
    if ensemble == "cue":
        off += 2.0 * log_barnes_g(1.0 + beta).real - log_barnes_g(1.0 + 2.0 * beta).real
    return float(off)


def run_freezing(cfg: ExperimentConfig) -> RunSummary:
    if cfg.ensemble not in ("cue", "rem"):
        raise ConfigError("freezing runs use the cue or rem ensemble")
    if not cfg.beta_grid:
        raise ConfigError("freezing needs a beta grid")
    t0 = time.perf_counter()
    payloads = [
        {"cfg": cfg.as_dict(), "index": i, "count": c} for i, c in _task_spans(cfg.n_samples)
    ]
    parts = run_tasks(_freezing_task, payloads, cfg.n_workers)
    total = sum((p["sum"] for p in parts[1:]), parts[0]["sum"])
    total_sq = sum((p["sum_sq"] for p in parts[1:]), parts[0]["sum_sq"])
    n = sum(p["n"] for p in parts)

    summary = RunSummary("freezing", cfg.as_dict(), cfg.master_seed)
    log_size = math.log(cfg.size)
    corrected = []
    for j, beta in enumerate(cfg.beta_grid):
        summary.add(
            f"neg_free_energy_raw[beta={beta:g}]",
            total[j],
            total_sq[j],
            n,
            theory_value=theory.freezing_curve(beta),
            tag="freezing-curve",
        )
        corr = total[j] / n - freezing_offset(beta, cfg.ensemble) / (beta * log_size)
        corrected.append(corr)
        summary.statistics.append(
            StatisticEstimate(
                f"neg_free_energy_corrected[beta={beta:g}]",
                corr,
                summary.statistics[-1].stderr,
                n,
                theory.freezing_curve(beta),
                "freezing-curve",
            )
        )
    frozen = [(b, c) for b, c in zip(cfg.beta_grid, corrected) if b >= 1.5]
    if len(frozen) >= 2:
        slope, _, slope_se = stats.fit_slope([b for b, _ in frozen], [c for _, c in frozen])
        summary.extras["plateau_slope"] = slope
        summary.extras["plateau_slope_stderr"] = slope_se
    summary.wall_seconds = time.perf_counter() - t0
    return summary


# ---------------------------------------------------------------------------
# Distribution of the maximum
# ---------------------------------------------------------------------------

def _max_dist_task(payload) -> dict:
    cfg = _cfg_from_dict(payload["cfg"])
    index, count = payload["index"], payload["count"]
    rng = Seed(cfg.master_seed, index).generator()
    out = np.empty(count)
    if cfg.ensemble == "rem":
        sampler = _rem_sampler(cfg.size, cfg.rem_w)
        draws = sampler.draw(rng, count)
        out[:] = -draws.max(axis=1)
    else:
        for i in range(count):
            field_v = log_charpoly_grid(
                _phases_from_rng(cfg.size, rng), cfg.arc_length, cfg.n_grid
            )
            out[i] = field_extremes(field_v).min_value
    return {"min_v": out}


def estimate_c(mean_max: float, n_dim: int) -> float:
    """Exponent c solving mean_max = e^{gamma} N / (log N)^{c/2}."""
    if mean_max <= 0:
        raise DomainError("mean maximum must be positive")
    if n_dim < 8:
        raise DomainError("need N >= 8")
    loglog = math.log(math.log(n_dim))
    if loglog <= 0:
        raise DomainError("log log N must be positive")
    return 2.0 * (EULER_GAMMA + math.log(n_dim) - math.log(mean_max)) / loglog


def run_max_distribution(cfg: ExperimentConfig) -> tuple[RunSummary, dict]:
    if cfg.ensemble not in ("cue", "rem"):
        raise ConfigError("max-distribution runs use the cue or rem ensemble")
    t0 = time.perf_counter()
    payloads = [
        {"cfg": cfg.as_dict(), "index": i, "count": c} for i, c in _task_spans(cfg.n_samples)
    ]
    parts = run_tasks(_max_dist_task, payloads, cfg.n_workers)
    min_v = np.concatenate([p["min_v"] for p in parts])
    n = len(min_v)

    n_arc = cfg.size * cfg.arc_length / TWO_PI
    shift = theory.recentering_shift(n_arc)
    w = min_v - shift
    b_fit = math.sqrt(w.var(ddof=1) / theory.MAX_VARIANCE_FULL_CIRCLE)
    x_hat = w / b_fit
    fitted_b_const = (1.0 - b_fit) * math.log(n_arc)

    summary = RunSummary("max-dist", cfg.as_dict(), cfg.master_seed)
    summary.add("recentred_min_raw", w.sum(), (w**2).sum(), n)
    summary.add(
        "rescaled_min",
        x_hat.sum(),
        (x_hat**2).sum(),
        n,
        theory_value=theory.MAX_MEAN_FULL_CIRCLE,
        tag="max-density-full-circle",
    )
    mean_max = float(np.exp(-min_v / 2.0).mean())
    se_max = float(np.exp(-min_v / 2.0).std(ddof=1) / math.sqrt(n))
    summary.extras["mean_max_modulus"] = mean_max
    summary.extras["mean_max_modulus_stderr"] = se_max
    summary.extras["c_estimate"] = estimate_c(mean_max, cfg.size)
    summary.extras["b_scale_fit"] = b_fit
    summary.extras["b_fit_log_coefficient"] = fitted_b_const
    if abs(cfg.arc_length - TWO_PI) < 1e-12:
        ks = stats.ks_distance(x_hat, theory.cdf_max_full_circle)
        summary.extras["ks_distance_to_bessel_cdf"] = ks
    summary.wall_seconds = time.perf_counter() - t0
    samples = {"min_v": min_v, "rescaled": x_hat} if cfg.emit_samples else {}
    return summary, samples


# ---------------------------------------------------------------------------
# Sojourn measures
# ---------------------------------------------------------------------------

def _sojourn_task(payload) -> dict:
    cfg = _cfg_from_dict(payload["cfg"])
    index, count = payload["index"], payload["count"]
    rng = Seed(cfg.master_seed, index).generator()
    xs = np.array(cfg.x_grid)
    out = np.empty((count, len(xs)))
    for i in range(count):
        field_v = log_charpoly_grid(
            _phases_from_rng(cfg.size, rng), cfg.arc_length, cfg.n_grid
        )
        out[i] = sojourn_measure(field_v, xs, cfg.size)
    return {"mu": out}


def run_sojourn(cfg: ExperimentConfig) -> tuple[RunSummary, dict]:
    if cfg.ensemble != "cue":
        raise ConfigError("sojourn runs use the cue ensemble")
    if not cfg.x_grid or any(not 0 < x < 1 for x in cfg.x_grid):
        raise ConfigError("sojourn needs an x grid inside (0, 1)")
    t0 = time.perf_counter()
    payloads = [
        {"cfg": cfg.as_dict(), "index": i, "count": c} for i, c in _task_spans(cfg.n_samples)
    ]
    parts = run_tasks(_sojourn_task, payloads, cfg.n_workers)
    mu = np.vstack([p["mu"] for p in parts])
    n = mu.shape[0]

    summary = RunSummary("sojourn", cfg.as_dict(), cfg.master_seed)
    samples = {}
    for j, x in enumerate(cfg.x_grid):
        scale = math.exp(theory.mu_typical(x, cfg.size, cfg.arc_length))
        xi = mu[:, j] / scale
        zero = xi == 0.0
        summary.extras[f"zero_measure_count[x={x:g}]"] = int(zero.sum())
        summary.add(
            f"mean_ratio[x={x:g}]",
            xi.sum(),
            (xi**2).sum(),
            n,
            theory_value=math.exp(theory.sojourn_mean_log(x, cfg.size, cfg.arc_length) - theory.mu_typical(x, cfg.size, cfg.arc_length)),
            tag="sojourn-mean",
        )
        pos = xi[~zero]
        if len(pos) >= 200:
            ks = stats.ks_distance(pos, lambda v: theory.cdf_sojourn_full_circle(v, x))
            summary.extras[f"ks_distance[x={x:g}]"] = ks
        try:
            alpha, alpha_se = stats.tail_exponent(pos, 3.0, 30.0)
            summary.statistics.append(
                StatisticEstimate(
                    f"tail_exponent[x={x:g}]", alpha, alpha_se, len(pos),
                    1.0 + 1.0 / (x * x), "sojourn-tail",
                )
            )
        except stats.EstimationError:
            summary.extras[f"tail_exponent[x={x:g}]"] = "insufficient tail data"
        if cfg.emit_samples:
            samples[f"xi_x{x:g}"] = xi
    summary.wall_seconds = time.perf_counter() - t0
    return summary, samples


# ---------------------------------------------------------------------------
# High-point counting on the lattice model
# ---------------------------------------------------------------------------

def _counting_task(payload) -> dict:
    cfg = _cfg_from_dict(payload["cfg"])
    index, count = payload["index"], payload["count"]
    rng = Seed(cfg.master_seed, index).generator()
    xs = np.array(cfg.x_grid)
    sampler = _rem_sampler(cfg.size, cfg.rem_w)
    draws = sampler.draw(rng, count)
    levels = xs * math.log(cfg.size)
    counts = (draws[:, None, :] > levels[None, :, None]).sum(axis=2)
    return {"counts": counts}


def run_counting(cfg: ExperimentConfig) -> RunSummary:
    if cfg.ensemble != "rem":
        raise ConfigError("counting runs use the rem ensemble")
    if not cfg.x_grid:
        raise ConfigError("counting needs an x grid inside (0, 2)")
    t0 = time.perf_counter()
    payloads = [
        {"cfg": cfg.as_dict(), "index": i, "count": c} for i, c in _task_spans(cfg.n_samples)
    ]
    parts = run_tasks(_counting_task, payloads, cfg.n_workers)
    counts = np.vstack([p["counts"] for p in parts])
    n = counts.shape[0]
    log_m = math.log(cfg.size)

    summary = RunSummary("counting", cfg.as_dict(), cfg.master_seed)
    for j, x in enumerate(cfg.x_grid):
        counting = theory.counting_typical(x, cfg.size)
        ratio = counts[:, j] / math.exp(counting.log_typical)
        zero = ratio == 0.0
        summary.extras[f"zero_count[x={x:g}]"] = int(zero.sum())
        pos = ratio[~zero]
        log_ratio = np.log(pos)
        exponent = (1.0 - x * x / 4.0) + log_ratio.mean() / log_m
        exp_se = log_ratio.std(ddof=1) / math.sqrt(len(pos)) / log_m
        summary.statistics.append(
            StatisticEstimate(
                f"counting_exponent[x={x:g}]", exponent, exp_se, len(pos),
                1.0 - x * x / 4.0, "high-point-count-exponent",
            )
        )
        summary.add(f"count_ratio[x={x:g}]", pos.sum(), (pos**2).sum(), len(pos))
        try:
            alpha, alpha_se = stats.tail_exponent(pos, 2.0, 30.0)
            summary.statistics.append(
                StatisticEstimate(
                    f"ratio_tail_exponent[x={x:g}]", alpha, alpha_se, len(pos),
                    1.0 + 4.0 / (x * x), "count-ratio-tail",
                )
            )
        except stats.EstimationError:
            summary.extras[f"ratio_tail_exponent[x={x:g}]"] = "insufficient tail data"
    summary.wall_seconds = time.perf_counter() - t0
    return summary


# ---------------------------------------------------------------------------
# Box counting / coarse-grained moments
# ---------------------------------------------------------------------------

def dyadic_ladder(n_dim: int, n_grid: int) -> list[int]:
    ladder = []
    nb = 8
    while nb <= n_dim // 8 and n_grid % nb == 0:
        ladder.append(nb)
        nb *= 2
    return ladder


def _box_task(payload) -> dict:
    cfg = _cfg_from_dict(payload["cfg"])
    index, count = payload["index"], payload["count"]
    rng = Seed(cfg.master_seed, index).generator()
    qs = np.array(cfg.q_grid)
    ladder = payload["ladder"]
    out = np.empty((count, len(ladder), len(qs)))
    from .ensembles import FieldGrid

    for i in range(count):
        field_v = log_charpoly_grid(
            _phases_from_rng(cfg.size, rng), cfg.arc_length, cfg.n_grid
        )
        abs_field = FieldGrid(
            field_v.arc_length, field_v.n_grid, field_v.offset, np.exp(-0.5 * field_v.values)
        )
        for a, nb in enumerate(ladder):
            out[i, a] = box_coarsen(abs_field, nb, qs)
    return {"zeta_q": out}


def run_box_counting(cfg: ExperimentConfig) -> RunSummary:
    if cfg.ensemble != "cue":
        raise ConfigError("box counting runs use the cue ensemble")
    qs = cfg.q_grid or (2.0, 3.0)
    if any(not 0 < q < 4 for q in qs):
        raise ConfigError("q grid must lie in (0, 4)")
    # the moment ratio normalizes by the first moment, so q = 1 always rides along
    qs = tuple(sorted(set(float(q) for q in qs) | {1.0}))
    cfg = ExperimentConfig(**{**cfg.as_dict(), "q_grid": qs})
    n_grid = cfg.n_grid or 16 * cfg.size
    ladder = dyadic_ladder(cfg.size, n_grid)
    if len(ladder) < 4:
        raise ConfigError("dyadic ladder too short: need at least 4 scales between 8 and N/8")
    t0 = time.perf_counter()
    payloads = [
        {"cfg": cfg.as_dict(), "index": i, "count": c, "ladder": ladder}
        for i, c in _task_spans(cfg.n_samples)
    ]
    parts = run_tasks(_box_task, payloads, cfg.n_workers)
    zq = np.vstack([p["zeta_q"] for p in parts])  # (n, scales, q)
    n = zq.shape[0]

    summary = RunSummary("box-counting", cfg.as_dict(), cfg.master_seed)
    log_lb = np.log(TWO_PI / np.array(ladder, dtype=float))
    one_idx = list(cfg.q_grid).index(1.0)
    for k, q in enumerate(cfg.q_grid):
        mean_q = zq[:, :, k].mean(axis=0)
        mean_1 = zq[:, :, one_idx].mean(axis=0)
        i_q = mean_q / mean_1**q
        slope, _, slope_se = stats.fit_slope(log_lb, np.log(i_q))
        tau_hat = -slope
        # delete-one jackknife over a stride of samples for the slope error
        jk = []
        for drop in range(0, n, max(1, n // 64)):
            keep = np.ones(n, dtype=bool)
            keep[drop] = False
            mq = zq[keep, :, k].mean(axis=0)
            m1 = zq[keep, :, one_idx].mean(axis=0)
            s_d, _, _ = stats.fit_slope(log_lb, np.log(mq / m1**q))
            jk.append(-s_d)
        jk = np.array(jk)
        tau_se = math.sqrt(max(n - 1, 1) * jk.var()) if len(jk) > 1 else float("nan")
        summary.statistics.append(
            StatisticEstimate(
                f"tau[q={q:g}]", tau_hat, max(tau_se, slope_se), n,
                q * (q - 1.0) / 4.0, "coarse-moment-exponent",
            )
        )
    summary.wall_seconds = time.perf_counter() - t0
    return summary


# ---------------------------------------------------------------------------
# Roughness of the Fourier field
# ---------------------------------------------------------------------------

def _roughness_task(payload) -> dict:
    from .ensembles import _fourier_values

    cfg = _cfg_from_dict(payload["cfg"])
    index, count = payload["index"], payload["count"]
    rng = Seed(cfg.master_seed, index).generator()
    out = np.empty(count)
    n_grid = cfg.n_grid or 4 * cfg.size
    for i in range(count):
        out[i] = np.mean(_fourier_values(cfg.size, n_grid, rng) ** 2)
    return {"roughness": out}


def run_roughness(cfg: ExperimentConfig) -> tuple[RunSummary, dict]:
    if cfg.ensemble != "fourier":
        raise ConfigError("roughness runs use the fourier ensemble")
    if cfg.size < 128:
        raise ConfigError("need at least 128 harmonics")
    t0 = time.perf_counter()
    payloads = [
        {"cfg": cfg.as_dict(), "index": i, "count": c} for i, c in _task_spans(cfg.n_samples)
    ]
    parts = run_tasks(_roughness_task, payloads, cfg.n_workers)
    r = np.concatenate([p["roughness"] for p in parts])
    n = len(r)

    summary = RunSummary("roughness", cfg.as_dict(), cfg.master_seed)
    summary.add("roughness_mean", r.sum(), (r**2).sum(), n)
    cums = stats.sample_cumulants(r)
    skew = cums[2] / cums[1] ** 1.5
    summary.statistics.append(
        StatisticEstimate("roughness_skewness", float(skew), float("nan"), n,
                          stats.GUMBEL_SKEWNESS, "gumbel-skewness")
    )
    loc, scale = stats.gumbel_fit(r)
    ks = stats.ks_distance(r, lambda v: stats.gumbel_cdf(v, loc, scale))
    summary.extras["gumbel_fit_location"] = loc
    summary.extras["gumbel_fit_scale"] = scale
    summary.extras["ks_distance_to_fitted_gumbel"] = ks
    # half the roughness is Gumbel with unit scale and location H_K - gamma
    harmonic = float(np.sum(1.0 / np.arange(1, cfg.size + 1)))
    summary.extras["half_roughness_shift_theory"] = harmonic - EULER_GAMMA
    summary.extras["half_roughness_shift_fitted"] = loc / 2.0
    summary.wall_seconds = time.perf_counter() - t0
    samples = {"roughness": r} if cfg.emit_samples else {}
    return summary, samples


# ---------------------------------------------------------------------------
# Zeta window experiments
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ZetaConfig:
    T: float = 1.0e6
    n_windows: int = 100
    window_length: float = TWO_PI
    beta_grid: tuple = ()
    x_grid: tuple = ()
    points_per_unit: int | None = None
    n_workers: int = 1
    master_seed: int = 1
    emit_samples: bool = False

    def __post_init__(self):
        if not 1.0e3 <= self.T <= 1.0e9:
            raise ConfigError("window experiments support 1e3 <= T <= 1e9")
        if self.n_windows < 1:
            raise ConfigError("need at least one window")
        if not 0 < self.window_length <= TWO_PI + 1e-12:
            raise ConfigError("window length must lie in (0, 2 pi]")

    def as_dict(self) -> dict:
        d = asdict(self)
        d["beta_grid"] = list(self.beta_grid)
        d["x_grid"] = list(self.x_grid)
        return d

    def ppu(self) -> int:
        return self.points_per_unit or zeta.default_points_per_unit(self.T)


_ZETA_BLOCK = 64


def _zeta_window_spans(n_windows: int):
    return _task_spans(n_windows, _ZETA_BLOCK)


def _zeta_cfg_from_dict(d: dict) -> ZetaConfig:
    d = dict(d)
    d["beta_grid"] = tuple(d["beta_grid"])
    d["x_grid"] = tuple(d["x_grid"])
    return ZetaConfig(**d)


def _zeta_max_task(payload) -> dict:
    cfg = _zeta_cfg_from_dict(payload["cfg"])
    start, count = payload["start"], payload["count"]
    rows = np.empty((count, 5))
    for i in range(count):
        t_lo = cfg.T + (start + i) * cfg.window_length
        rec = zeta.scan_window_max(t_lo, cfg.window_length, cfg.ppu())
        rows[i] = (rec.T, rec.L, rec.zeta_max, rec.argmax_t, rec.sigma)
    return {"records": rows}


def run_zeta_max(cfg: ZetaConfig) -> tuple[RunSummary, dict]:
    t0 = time.perf_counter()
    payloads = []
    start = 0
    for _, count in _zeta_window_spans(cfg.n_windows):
        payloads.append({"cfg": cfg.as_dict(), "start": start, "count": count})
        start += count
    parts = run_tasks(_zeta_max_task, payloads, cfg.n_workers)
    records = np.vstack([p["records"] for p in parts])
    zmax = records[:, 2]
    sigma = records[:, 4]
    n = len(zmax)

    summary = RunSummary("zeta-max", cfg.as_dict(), cfg.master_seed)
    summary.add("zeta_max_mean", zmax.sum(), (zmax**2).sum(), n)
    summary.add("sigma_mean", sigma.sum(), (sigma**2).sum(), n)
    n_dim = int(round(math.log(cfg.T)))
    summary.extras["model_dimension"] = n_dim
    for c_exp, tag in ((1.5, "log-correlated"), (0.5, "short-range")):
        delta = math.exp(EULER_GAMMA) * n_dim / math.log(n_dim) ** (c_exp / 2.0)
        summary.extras[f"mean_ratio_c={c_exp:g}"] = float(zmax.mean() / delta)
    summary.extras["c_estimate"] = estimate_c(float(zmax.mean()), n_dim)
    if n >= 10:
        sig_norm, _ = stats.normalize_variance(sigma, theory.MAX_VARIANCE_FULL_CIRCLE)
        ks = stats.ks_distance(sig_norm, theory.cdf_max_full_circle)
        summary.extras["ks_sigma_normalized_vs_bessel"] = float(ks)
    summary.wall_seconds = time.perf_counter() - t0
    samples = {"window_records": records} if cfg.emit_samples else {}
    return summary, samples


def _zeta_freezing_task(payload) -> dict:
    cfg = _zeta_cfg_from_dict(payload["cfg"])
    start, count = payload["start"], payload["count"]
    betas = np.array(cfg.beta_grid)
    out = np.empty((count, len(betas)))
    for i in range(count):
        t_lo = cfg.T + (start + i) * TWO_PI
        out[i] = zeta.zeta_partition(t_lo, betas, cfg.ppu())
    return {"log_z": out}


def run_zeta_freezing(cfg: ZetaConfig) -> RunSummary:
    if not cfg.beta_grid:
        raise ConfigError("zeta freezing needs a beta grid")
    t0 = time.perf_counter()
    payloads = []
    start = 0
    for _, count in _zeta_window_spans(cfg.n_windows):
        payloads.append({"cfg": cfg.as_dict(), "start": start, "count": count})
        start += count
    parts = run_tasks(_zeta_freezing_task, payloads, cfg.n_workers)
    log_z = np.vstack([p["log_z"] for p in parts])
    n = log_z.shape[0]

    summary = RunSummary("zeta-freezing", cfg.as_dict(), cfg.master_seed)
    for j, beta in enumerate(cfg.beta_grid):
        d_vals = np.array([zeta.d_statistic(cfg.T, beta, lz) for lz in log_z[:, j]])
        summary.add(
            f"d_statistic[beta={beta:g}]",
            d_vals.sum(),
            (d_vals**2).sum(),
            n,
            theory_value=theory.freezing_curve(beta),
            tag="freezing-curve",
        )
    summary.wall_seconds = time.perf_counter() - t0
    return summary


def _zeta_measure_task(payload) -> dict:
    cfg = _zeta_cfg_from_dict(payload["cfg"])
    start, count = payload["start"], payload["count"]
    xs = list(cfg.x_grid)
    out = np.empty((count, len(xs)))
    for i in range(count):
        t_lo = cfg.T + (start + i) * cfg.window_length
        for j, x in enumerate(xs):
            out[i, j] = zeta.zeta_high_measure(t_lo, cfg.window_length, x, cfg.ppu())
    return {"mu": out}


def zeta_measure_scale(T: float, x: float, prime_limit: int = 100000) -> float:
    """log of the predicted typical high-value measure scale for zeta
    windows: the arithmetic factor times the full-circle scale with the
    effective dimension log(T/2pi)."""
    n_eff = math.log(T / TWO_PI)
    a = theory.arithmetic_factor(x, prime_limit).value
    return (
        -x * x * math.log(n_eff)
        - 0.5 * math.log(math.pi * math.log(n_eff))
        + 2.0 * log_barnes_g(1.0 + x).real
        - math.log(2.0 * x)
        - log_barnes_g(1.0 + 2.0 * x).real
        - float(_gammaln(1.0 - x * x))
        + math.log(a)
    )


def _gammaln(v):
    from scipy.special import gammaln

    return gammaln(v)


def run_zeta_measure(cfg: ZetaConfig) -> RunSummary:
    if not cfg.x_grid or any(not 0 < x < 1 for x in cfg.x_grid):
        raise ConfigError("zeta measure needs an x grid inside (0, 1)")
    t0 = time.perf_counter()
    payloads = []
    start = 0
    for _, count in _zeta_window_spans(cfg.n_windows):
        payloads.append({"cfg": cfg.as_dict(), "start": start, "count": count})
        start += count
    parts = run_tasks(_zeta_measure_task, payloads, cfg.n_workers)
    mu = np.vstack([p["mu"] for p in parts])
    n = mu.shape[0]

    summary = RunSummary("zeta-measure", cfg.as_dict(), cfg.master_seed)
    for j, x in enumerate(cfg.x_grid):
        scale = math.exp(zeta_measure_scale(cfg.T, x))
        ratio = mu[:, j] / scale
        summary.add(
            f"measure_ratio[x={x:g}]",
            ratio.sum(),
            (ratio**2).sum(),
            n,
            theory_value=math.exp(_gammaln(1.0 - x * x)),
            tag="sojourn-mean",
        )
    summary.wall_seconds = time.perf_counter() - t0
    return summary


def run_diag_correlation(x_grid, prime_limit: int = 100000) -> RunSummary:
    summary = RunSummary("diag-corr", {"x_grid": list(x_grid), "prime_limit": prime_limit}, 0)
    t0 = time.perf_counter()
    for x in x_grid:
        truncated, closed = zeta.diag_correlation(x, prime_limit)
        summary.statistics.append(
            StatisticEstimate(f"truncated_sum[x={x:g}]", truncated, 0.0, 1, closed,
                              "diagonal-correlation")
        )
        summary.extras[f"closed_form[x={x:g}]"] = closed
        summary.extras[f"log_separation_form[x={x:g}]"] = -0.5 * math.log(x)
    summary.wall_seconds = time.perf_counter() - t0
    return summary
