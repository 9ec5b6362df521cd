"""Monte Carlo verification of the covert-sensing trade-off.

Two simulators live here. `simulate_estimation` reproduces the sensor side:
per-mode heterodyne readings of a phase-rotated coherent probe with additive
Gaussian noise of per-quadrature variance (1 + nbar_b (1 - eta))/2, averaged,
normalized, and fed to a two-argument arctangent. `simulate_adversary`
reproduces the adversary side: thermal (geometric) photon counts plus Poisson
dark counts, thresholded on the total. `exact_discrimination_error` computes
the adversary's optimal error exactly through the negative-binomial law of
the total count, which is a sufficient statistic for the two product-thermal
hypotheses.

Randomness and determinism
--------------------------
Trials are processed in fixed chunks of 4096; chunk c of a run draws from
``Generator(Philox(SeedSequence(entropy=seed, spawn_key=(tag, c))))``, so
every trial's draws are a pure function of (config, seed) regardless of how
chunks are scheduled across workers (COVERT_SENSE_THREADS caps the pool).
Per-trial squared errors are written into a single array in trial order and
reduced with numpy's pairwise summation, making results bit-identical for
any worker count. Distribution algorithms: normals via numpy's
``standard_normal``, geometric (Bose-Einstein) counts via the inverse CDF
``k = floor(log1p(-u) / log1p(-1/(1+mean)))`` on a uniform variate, Poisson
and negative-binomial totals via the numpy generator methods.

For fixed-amplitude runs the mode-averaged quadratures are themselves
Gaussian with variance sigma^2 = (1 + nbar_b (1 - eta)) / (2 n eta nbar_s)
per component, exactly; the default path samples that aggregate law directly
(2 draws per trial) instead of materialising n per-mode readings. The
literal per-mode procedure is kept behind ``per_mode=True`` and is the one
used for Gaussian-modulated probes, where each mode's known amplitude and
phase are divided out before averaging.
"""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .covertness import (
    AdversaryModel,
    covert_budget,
    detection_error_lower_bound,
)
from .errors import (
    InvalidArgumentError,
    NumericalFailureError,
    UndefinedAngleError,
)
from .gaussian import ChannelParams
from .metrology import covert_constants

CHUNK_TRIALS = 4096
_WILSON_Z = 1.959963984540054  # 97.5th normal percentile, for 95% intervals

# spawn-key tags keep the substreams of different simulators disjoint
_TAG_ESTIMATION = 0xE5
_TAG_ADVERSARY_H0 = 0xAD0
_TAG_ADVERSARY_H1 = 0xAD1


class Modulation(enum.Enum):
    FIXED_AMPLITUDE = "fixed_amplitude"
    GAUSSIAN_MODULATED = "gaussian_modulated"


class Hypothesis(enum.Enum):
    H0 = "H0"
    H1 = "H1"


@dataclass(frozen=True)
class EstimationConfig:
    """One phase-estimation experiment."""

    theta_true: float
    n: int
    nbar_s: float
    channel: ChannelParams
    trials: int
    seed: int
    modulation: Modulation = Modulation.FIXED_AMPLITUDE

    def __post_init__(self):
        if not -math.pi / 2 < self.theta_true < math.pi / 2:
            raise InvalidArgumentError(
                "theta_true must lie strictly inside (-pi/2, pi/2)"
            )
        if int(self.n) < 1:
            raise InvalidArgumentError("n must be a positive integer")
        if not np.isfinite(self.nbar_s) or self.nbar_s <= 0.0:
            raise InvalidArgumentError("nbar_s must be > 0")
        if int(self.trials) < 1:
            raise InvalidArgumentError("trials must be >= 1")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "trials", int(self.trials))
        object.__setattr__(self, "seed", int(self.seed))


@dataclass(frozen=True)
class EstimationResult:
    """Empirical MSE of the heterodyne phase estimate plus predictions."""

    mse: float
    mse_stderr: float
    sigma2_het_predicted: float
    c_het_over_eps_sqrt_n: float
    trials_used: int


@dataclass(frozen=True)
class DetectionSimResult:
    """Empirical detection rates for the threshold test.

    A single-hypothesis run fills only its own rate (the other is NaN);
    `simulate_detection` fills all three with p_e = (p_fa + p_md) / 2.
    """

    p_fa_hat: float
    p_md_hat: float
    p_e_hat: float
    wilson_halfwidth: float
    threshold_s: float

    def __post_init__(self):
        for name in ("p_fa_hat", "p_md_hat", "p_e_hat"):
            value = getattr(self, name)
            if np.isfinite(value) and not 0.0 <= value <= 1.0:
                raise InvalidArgumentError(f"{name} must lie in [0, 1]")
        if np.isfinite(self.p_fa_hat) and np.isfinite(self.p_md_hat):
            expected = 0.5 * (self.p_fa_hat + self.p_md_hat)
            if np.isfinite(self.p_e_hat) and abs(self.p_e_hat - expected) > 1e-12:
                raise InvalidArgumentError(
                    "p_e_hat must equal (p_fa_hat + p_md_hat)/2"
                )


@dataclass(frozen=True)
class SweepRow:
    """One operating point of the square-root-law sweep."""

    n: int
    nbar_s: float
    mse: float
    mse_eps_sqrtn: float
    c_het: float
    pe_exact: float
    pe_bound: float
    c_coh: float
    c_sq: float
    c_lb: float


def worker_count() -> int:
    """Worker cap from COVERT_SENSE_THREADS (default 1)."""
    raw = os.environ.get("COVERT_SENSE_THREADS")
    if raw is None:
        return 1
    try:
        value = int(raw)
    except ValueError as exc:
        raise InvalidArgumentError(
            f"COVERT_SENSE_THREADS must be a positive integer, got {raw!r}"
        ) from exc
    if value < 1:
        raise InvalidArgumentError("COVERT_SENSE_THREADS must be >= 1")
    return value


def _chunk_rng(seed: int, tag: int, chunk_index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed % 2 ** 64, spawn_key=(tag, chunk_index))
    return np.random.Generator(np.random.Philox(ss))


def _chunk_spans(trials: int) -> list[tuple[int, int, int]]:
    """(chunk_index, start, length) for a fixed chunk size of CHUNK_TRIALS."""
    spans = []
    start = 0
    index = 0
    while start < trials:
        length = min(CHUNK_TRIALS, trials - start)
        spans.append((index, start, length))
        start += length
        index += 1
    return spans


def _run_chunks(fn, trials: int) -> None:
    """Run fn(chunk_index, start, length) over all chunks, possibly in parallel."""
    spans = _chunk_spans(trials)
    workers = min(worker_count(), len(spans))
    if workers <= 1:
        for span in spans:
            fn(*span)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(lambda s: fn(*s), spans))


def heterodyne_estimate(mean_i: float, mean_q: float) -> float:
    """Phase estimate from averaged quadratures: atan2(mean_q, mean_i).

    Range (-pi, pi]; coincides with the single-argument arctangent of
    mean_q / mean_i whenever mean_i > 0 (the high-SNR regime).
    """
    if mean_i == 0.0 and mean_q == 0.0:
        raise UndefinedAngleError("angle of the zero vector is undefined")
    return math.atan2(mean_q, mean_i)


def _wrap_angle(delta: np.ndarray) -> np.ndarray:
    """Wrap angle differences into [-pi, pi)."""
    return (delta + np.pi) % (2.0 * np.pi) - np.pi


def _geometric_counts(rng: np.random.Generator, mean: float, size) -> np.ndarray:
    """Bose-Einstein photon counts via the inverse CDF on a uniform variate.

    k = floor(log1p(-u) / log1p(-p)) with success probability p = 1/(1+mean).
    """
    if mean == 0.0:
        return np.zeros(size, dtype=np.int64)
    u = rng.random(size)
    log_fail = np.log1p(-1.0 / (1.0 + mean))
    return np.floor(np.log1p(-u) / log_fail).astype(np.int64)


def simulate_estimation(
    cfg: EstimationConfig, per_mode: bool | None = None
) -> EstimationResult:
    """Monte Carlo MSE of the heterodyne phase estimator.

    Args:
        cfg: experiment description.
        per_mode: force (True) or suppress (False) literal per-mode sampling.
            Default: aggregate sampling for fixed-amplitude probes (exact,
            see module docstring) and per-mode sampling for Gaussian-modulated
            probes, which require it.

    Each trial produces averaged normalized quadratures; the squared angular
    error of atan2 against theta_true is wrapped into [-pi, pi), so it never
    exceeds pi^2. A trial whose averaged vector lands exactly at the origin
    counts with error pi.
    """
    eta, nb = cfg.channel.eta, cfg.channel.nbar_b
    if per_mode is None:
        per_mode = cfg.modulation is Modulation.GAUSSIAN_MODULATED
    if cfg.modulation is Modulation.GAUSSIAN_MODULATED and not per_mode:
        raise InvalidArgumentError(
            "gaussian_modulated runs require per-mode sampling"
        )

    sigma_q = math.sqrt((1.0 + nb * (1.0 - eta)) / 2.0)
    sigma2_het = (1.0 + nb * (1.0 - eta)) / (2.0 * cfg.n * eta * cfg.nbar_s)
    amp = math.sqrt(eta * cfg.nbar_s)
    cos_t, sin_t = math.cos(cfg.theta_true), math.sin(cfg.theta_true)
    sq_errors = np.empty(cfg.trials)

    def run_aggregate(chunk_index: int, start: int, length: int) -> None:
        rng = _chunk_rng(cfg.seed, _TAG_ESTIMATION, chunk_index)
        noise = rng.standard_normal((length, 2)) * math.sqrt(sigma2_het)
        mean_i = cos_t + noise[:, 0]
        mean_q = sin_t + noise[:, 1]
        sq_errors[start : start + length] = _squared_angle_errors(
            mean_i, mean_q, cfg.theta_true
        )

    def run_fixed_per_mode(chunk_index: int, start: int, length: int) -> None:
        rng = _chunk_rng(cfg.seed, _TAG_ESTIMATION, chunk_index)
        sum_i = np.zeros(length)
        sum_q = np.zeros(length)
        for block in _mode_blocks(cfg.n, length):
            z_i = rng.standard_normal((length, block))
            z_q = rng.standard_normal((length, block))
            sum_i += (amp * cos_t + sigma_q * z_i).sum(axis=1)
            sum_q += (amp * sin_t + sigma_q * z_q).sum(axis=1)
        scale = cfg.n * amp
        sq_errors[start : start + length] = _squared_angle_errors(
            sum_i / scale, sum_q / scale, cfg.theta_true
        )

    def run_modulated(chunk_index: int, start: int, length: int) -> None:
        rng = _chunk_rng(cfg.seed, _TAG_ESTIMATION, chunk_index)
        phase = complex(cos_t, sin_t)
        acc = np.zeros(length, dtype=np.complex128)
        root_eta = math.sqrt(eta)
        for block in _mode_blocks(cfg.n, length, complex_arrays=True):
            a_i = rng.standard_normal((length, block)) * math.sqrt(cfg.nbar_s / 2.0)
            a_q = rng.standard_normal((length, block)) * math.sqrt(cfg.nbar_s / 2.0)
            z_i = rng.standard_normal((length, block))
            z_q = rng.standard_normal((length, block))
            alpha = a_i + 1j * a_q
            r2 = a_i * a_i + a_q * a_q
            obs = root_eta * alpha * phase + sigma_q * (z_i + 1j * z_q)
            # normalize each mode by its known amplitude and phase
            with np.errstate(divide="ignore", invalid="ignore"):
                normalized = obs * np.conj(alpha) / (root_eta * r2)
            normalized[r2 == 0.0] = 0.0
            acc += normalized.sum(axis=1)
        mean_vec = acc / cfg.n
        sq_errors[start : start + length] = _squared_angle_errors(
            mean_vec.real, mean_vec.imag, cfg.theta_true
        )

    if cfg.modulation is Modulation.GAUSSIAN_MODULATED:
        _run_chunks(run_modulated, cfg.trials)
    elif per_mode:
        _run_chunks(run_fixed_per_mode, cfg.trials)
    else:
        _run_chunks(run_aggregate, cfg.trials)

    mse = float(np.mean(sq_errors))
    stderr = (
        float(np.std(sq_errors, ddof=1) / math.sqrt(cfg.trials))
        if cfg.trials > 1
        else 0.0
    )
    # implied covertness parameter of this photon budget; by construction
    # c_het / (eps sqrt(n)) is identically sigma2_het
    mu0 = eta * nb
    eps_implied = (
        cfg.nbar_s * math.sqrt(cfg.n) * (1.0 - eta) / (4.0 * math.sqrt(mu0 * (1.0 + mu0)))
    )
    c_het = covert_constants(cfg.channel).c_het
    return EstimationResult(
        mse=mse,
        mse_stderr=stderr,
        sigma2_het_predicted=sigma2_het,
        c_het_over_eps_sqrt_n=c_het / (eps_implied * math.sqrt(cfg.n)),
        trials_used=cfg.trials,
    )


def _mode_blocks(n: int, chunk_len: int, complex_arrays: bool = False):
    """Split n modes into blocks sized to bound scratch memory.

    The block layout depends only on (n, chunk_len), never on worker count,
    so the draw order is reproducible.
    """
    budget = 2 ** 19 if complex_arrays else 2 ** 21
    block = max(1, budget // max(chunk_len, 1))
    start = 0
    while start < n:
        yield min(block, n - start)
        start += min(block, n - start)


def _squared_angle_errors(
    mean_i: np.ndarray, mean_q: np.ndarray, theta_true: float
) -> np.ndarray:
    at_origin = (mean_i == 0.0) & (mean_q == 0.0)
    theta_hat = np.arctan2(mean_q, mean_i)
    err = _wrap_angle(theta_hat - theta_true)
    sq = err * err
    if np.any(at_origin):
        sq = np.where(at_origin, np.pi ** 2, sq)
    return sq


def wilson_halfwidth(successes: int, trials: int) -> float:
    """Half-width of the 95% Wilson score interval for a binomial rate."""
    if trials < 1:
        raise InvalidArgumentError("trials must be >= 1")
    z = _WILSON_Z
    p_hat = successes / trials
    denom = 1.0 + z * z / trials
    return (
        z
        * math.sqrt(p_hat * (1.0 - p_hat) / trials + z * z / (4.0 * trials * trials))
        / denom
    )


def simulate_adversary(
    n: int,
    nbar_s: float,
    adv: AdversaryModel,
    ch: ChannelParams,
    threshold_s: float,
    trials: int,
    seed: int,
    hypothesis: Hypothesis,
    per_mode: bool = False,
) -> DetectionSimResult:
    """Empirical rates of the threshold test under one hypothesis.

    Per mode the adversary counts thermal photons (geometric with mean
    eta*nbar_b under H0, gamma*nbar_s + eta*nbar_b under H1) plus Poisson
    dark counts; it declares H1 when the total over n modes reaches
    threshold_s. Under H0 the returned p_fa_hat is the declare-H1 rate;
    under H1 the returned p_md_hat is the declare-H0 rate. The default path
    samples the total count directly (negative binomial plus Poisson, which
    is exact); per_mode=True forces the literal per-mode loop.
    """
    if int(n) < 1:
        raise InvalidArgumentError("n must be a positive integer")
    if not np.isfinite(nbar_s) or nbar_s < 0.0:
        raise InvalidArgumentError("nbar_s must be >= 0")
    if int(trials) < 1:
        raise InvalidArgumentError("trials must be >= 1")
    n, trials = int(n), int(trials)
    gamma = adv.resolve_gamma(ch)
    mean_thermal = ch.eta * ch.nbar_b
    if hypothesis is Hypothesis.H1:
        mean_thermal += gamma * nbar_s
    tag = _TAG_ADVERSARY_H0 if hypothesis is Hypothesis.H0 else _TAG_ADVERSARY_H1

    declared = np.empty(trials, dtype=bool)

    def run(chunk_index: int, start: int, length: int) -> None:
        rng = _chunk_rng(seed, tag, chunk_index)
        if per_mode:
            totals = np.zeros(length, dtype=np.int64)
            for block in _mode_blocks(n, length):
                totals += _geometric_counts(rng, mean_thermal, (length, block)).sum(
                    axis=1
                )
                if adv.dark_rate > 0.0:
                    totals += rng.poisson(adv.dark_rate, (length, block)).sum(axis=1)
        else:
            totals = rng.negative_binomial(
                n, 1.0 / (1.0 + mean_thermal), length
            ).astype(np.int64)
            if adv.dark_rate > 0.0:
                totals += rng.poisson(n * adv.dark_rate, length)
        declared[start : start + length] = totals >= threshold_s

    _run_chunks(run, trials)
    declare_rate = float(np.mean(declared))
    halfwidth = wilson_halfwidth(int(np.sum(declared)), trials)
    if hypothesis is Hypothesis.H0:
        return DetectionSimResult(
            p_fa_hat=declare_rate,
            p_md_hat=float("nan"),
            p_e_hat=float("nan"),
            wilson_halfwidth=halfwidth,
            threshold_s=float(threshold_s),
        )
    return DetectionSimResult(
        p_fa_hat=float("nan"),
        p_md_hat=1.0 - declare_rate,
        p_e_hat=float("nan"),
        wilson_halfwidth=halfwidth,
        threshold_s=float(threshold_s),
    )


def simulate_detection(
    n: int,
    nbar_s: float,
    adv: AdversaryModel,
    ch: ChannelParams,
    threshold_s: float,
    trials: int,
    seed: int,
    per_mode: bool = False,
) -> DetectionSimResult:
    """Run both hypotheses and combine into equal-prior error rates."""
    h0 = simulate_adversary(
        n, nbar_s, adv, ch, threshold_s, trials, seed, Hypothesis.H0, per_mode
    )
    h1 = simulate_adversary(
        n, nbar_s, adv, ch, threshold_s, trials, seed, Hypothesis.H1, per_mode
    )
    return DetectionSimResult(
        p_fa_hat=h0.p_fa_hat,
        p_md_hat=h1.p_md_hat,
        p_e_hat=0.5 * (h0.p_fa_hat + h1.p_md_hat),
        wilson_halfwidth=max(h0.wilson_halfwidth, h1.wilson_halfwidth),
        threshold_s=float(threshold_s),
    )


def exact_discrimination_error(
    n: int, nbar_s: float, ch: ChannelParams, tail_tol: float = 1e-12
) -> float:
    """Optimal discrimination error between the adversary's hypotheses.

    Both n-mode hypotheses are i.i.d. geometric across modes, so the total
    photon count is a sufficient statistic and negative-binomially
    distributed; the error of the optimal (photon-counting) measurement is
    (1 - TV/2) / 2 with TV the total variation between the two
    negative-binomial laws, truncated once the combined tail mass of the
    enumeration window falls below tail_tol (absolute truncation error of
    the result is below tail_tol / 4).
    """
    if int(n) < 1:
        raise InvalidArgumentError("n must be a positive integer")
    if int(n) > 10 ** 6:
        raise InvalidArgumentError("n above 1e6 is not supported")
    if not np.isfinite(nbar_s) or nbar_s < 0.0:
        raise InvalidArgumentError("nbar_s must be >= 0")
    if not 0.0 < tail_tol <= 1e-3:
        raise InvalidArgumentError("tail_tol must lie in (0, 1e-3]")
    n = int(n)
    if nbar_s == 0.0:
        return 0.5
    mu0 = ch.eta * ch.nbar_b
    mu1 = (1.0 - ch.eta) * nbar_s + mu0
    p0 = 1.0 / (1.0 + mu0)
    p1 = 1.0 / (1.0 + mu1)

    lo = int(
        min(stats.nbinom.ppf(tail_tol / 8.0, n, p0), stats.nbinom.ppf(tail_tol / 8.0, n, p1))
    )
    hi = int(
        max(
            stats.nbinom.ppf(1.0 - tail_tol / 8.0, n, p0),
            stats.nbinom.ppf(1.0 - tail_tol / 8.0, n, p1),
        )
    )
    width = max(hi - lo, 16)
    achieved = np.inf
    for _ in range(8):
        lo_try = max(0, lo - width // 4)
        hi_try = hi + width // 4
        k = np.arange(lo_try, hi_try + 1)
        pmf0 = stats.nbinom.pmf(k, n, p0)
        pmf1 = stats.nbinom.pmf(k, n, p1)
        achieved = (1.0 - pmf0.sum()) + (1.0 - pmf1.sum())
        if achieved < tail_tol:
            tv = float(np.abs(pmf0 - pmf1).sum())
            return min(max(0.5 * (1.0 - 0.5 * tv), 0.0), 0.5)
        lo, hi, width = lo_try, hi_try, 2 * width
    raise NumericalFailureError(
        f"count enumeration did not converge: tail mass {achieved:.3e} "
        f"above tail_tol {tail_tol:.3e}"
    )


def sweep_scaling(
    n_list: list[int],
    epsilon: float,
    ch: ChannelParams,
    trials: int,
    seed: int,
    theta_true: float = 0.5,
    pe_tail_tol: float = 1e-10,
) -> list[SweepRow]:
    """Square-root-law sweep over mode counts.

    For each n: derive the covert photon budget, run the heterodyne
    estimation Monte Carlo, compute the exact discrimination error and the
    detection-error floor, and emit one row. Each row draws from its own
    substream of `seed`, so the sweep is deterministic as a whole.
    """
    if not n_list:
        raise InvalidArgumentError("n_list must be nonempty")
    n_values = [int(v) for v in n_list]
    if any(v < 1 for v in n_values):
        raise InvalidArgumentError("all n must be positive integers")
    if sorted(n_values) != n_values:
        raise InvalidArgumentError("n_list must be ascending")

    consts = covert_constants(ch)
    rows = []
    for index, n in enumerate(n_values):
        budget = covert_budget(epsilon, n, ch)
        row_seed = int(
            np.random.SeedSequence(
                entropy=seed % 2 ** 64, spawn_key=(0x57EE, index)
            ).generate_state(1, np.uint64)[0]
        )
        est = simulate_estimation(
            EstimationConfig(
                theta_true=theta_true,
                n=n,
                nbar_s=budget.nbar_s,
                channel=ch,
                trials=trials,
                seed=row_seed,
            )
        )
        pe_exact = (
            exact_discrimination_error(n, budget.nbar_s, ch, tail_tol=pe_tail_tol)
            if n <= 10 ** 6
            else float("nan")
        )
        rows.append(
            SweepRow(
                n=n,
                nbar_s=budget.nbar_s,
                mse=est.mse,
                mse_eps_sqrtn=est.mse * epsilon * math.sqrt(n),
                c_het=consts.c_het,
                pe_exact=pe_exact,
                pe_bound=detection_error_lower_bound(budget.nbar_s, n, ch),
                c_coh=consts.c_coh,
                c_sq=consts.c_sq,
                c_lb=consts.c_lb,
            )
        )
    return rows
