"""Monte Carlo estimators over many independent pair-walk trials.

Trial i draws from the stream (master_seed, stream_index + i), so results
are reproducible and independent of scheduling.  Work is split into
fixed-size chunks (CHUNK_TRIALS trials each) regardless of the worker
count; integer statistics accumulate exactly and real-valued sums are
reduced in chunk order, which makes every estimate bit-identical across
``workers`` settings.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numba import njit, int64, uint64
from scipy import stats

from ._validate import check_count, check_dimension, check_time
from .walks import (SeedSpec, _continuous_trial, _discrete_trial,
                    _embedded_trial, _jump_counts_trial)

CHUNK_TRIALS = 1 << 16


@dataclass(frozen=True)
class Estimate:
    """Sample mean with its standard error over independent trials."""
    mean: float
    stderr: float
    trials: int
    seed: SeedSpec

    def to_dict(self):
        return {"mean": self.mean, "stderr": self.stderr,
                "trials": self.trials, "seed": self.seed.to_dict()}


@dataclass(frozen=True)
class ThinningReport:
    """Goodness-of-fit report for the coordinate jump-count distribution."""
    d: int
    horizon: float
    trials: int
    rate: float                       # expected count per coordinate, 2h/d
    coordinate_means: list
    chi_square: list                  # one statistic per coordinate
    chi_square_threshold: float
    chi_square_dof: int
    max_abs_correlation: float
    correlation_threshold: float
    passed: bool
    seed: SeedSpec

    def to_dict(self):
        out = {k: getattr(self, k) for k in (
            "d", "horizon", "trials", "rate", "coordinate_means",
            "chi_square", "chi_square_threshold", "chi_square_dof",
            "max_abs_correlation", "correlation_threshold", "passed")}
        out["seed"] = self.seed.to_dict()
        return out


# ---------------------------------------------------------------------------
# chunk kernels: one jitted loop per statistic, one stream per trial
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def _chunk_equal_at_horizon(d, lim, master, stream0, n):
    diff = np.zeros(d, dtype=np.int64)
    hits = 0
    for i in range(n):
        _, _, zero = _continuous_trial(d, lim, master, stream0 + uint64(i), diff)
        if zero:
            hits += 1
    return hits


@njit(cache=True, nogil=True)
def _chunk_components(d, lim, master, stream0, n):
    diff = np.zeros(d, dtype=np.int64)
    s = int64(0)
    s2 = int64(0)
    for i in range(n):
        comp, _, _ = _continuous_trial(d, lim, master, stream0 + uint64(i), diff)
        s += comp
        s2 += comp * comp
    return s, s2


@njit(cache=True, nogil=True)
def _chunk_occupation(d, lim, master, stream0, n):
    diff = np.zeros(d, dtype=np.int64)
    s = 0.0
    s2 = 0.0
    for i in range(n):
        _, occ, _ = _continuous_trial(d, lim, master, stream0 + uint64(i), diff)
        s += occ
        s2 += occ * occ
    return s, s2


@njit(cache=True, nogil=True)
def _chunk_discrete_counts(d, n_steps, master, stream0, n):
    diff = np.zeros(d, dtype=np.int64)
    s = int64(0)
    s2 = int64(0)
    for i in range(n):
        cnt, _ = _discrete_trial(d, n_steps, master, stream0 + uint64(i), diff)
        s += cnt
        s2 += cnt * cnt
    return s, s2


@njit(cache=True, nogil=True)
def _chunk_embedded_visits(d, n_jumps, master, stream0, n):
    diff = np.zeros(d, dtype=np.int64)
    s = int64(0)
    s2 = int64(0)
    for i in range(n):
        v = _embedded_trial(d, n_jumps, master, stream0 + uint64(i), diff)
        s += v
        s2 += v * v
    return s, s2


@njit(cache=True, nogil=True)
def _chunk_jump_stats(d, lim, master, stream0, n, hist, sums, cross):
    counts = np.zeros(d, dtype=np.int64)
    nbins = hist.shape[1]
    for i in range(n):
        _jump_counts_trial(d, lim, master, stream0 + uint64(i), counts)
        for a in range(d):
            ca = counts[a]
            b = ca if ca < nbins - 1 else nbins - 1
            hist[a, b] += 1
            sums[a] += ca
            for bb in range(d):
                cross[a, bb] += ca * counts[bb]


# ---------------------------------------------------------------------------
# chunked execution
# ---------------------------------------------------------------------------

def _chunk_ranges(trials):
    return [(start, min(CHUNK_TRIALS, trials - start))
            for start in range(0, trials, CHUNK_TRIALS)]


def _map_chunks(fn, trials, workers):
    """Run fn(start, n) over the fixed chunk grid; results in chunk order."""
    ranges = _chunk_ranges(trials)
    if workers <= 1:
        return [fn(s, n) for s, n in ranges]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(fn, s, n) for s, n in ranges]
        return [f.result() for f in futures]


def _moments_to_estimate(s, s2, trials, seed):
    mean = s / trials
    var = max(float(s2) - float(s) * float(s) / trials, 0.0) / (trials - 1)
    return Estimate(float(mean), math.sqrt(var / trials), trials, seed)


def _check_trials(trials, minimum=100):
    trials = check_count(trials, "trials")
    if trials < minimum:
        raise ValueError(f"trials must be >= {minimum}, got {trials}")
    return trials


def _resolve_seed(seed):
    if seed is None:
        return SeedSpec(0)
    if isinstance(seed, int):
        return SeedSpec(seed)
    return seed


# ---------------------------------------------------------------------------
# estimators
# ---------------------------------------------------------------------------

def mc_collision_prob(d, t, trials, seed, workers=1) -> Estimate:
    """Fraction of trials whose walkers coincide at time t.

    Each trial runs the continuous pair simulation to horizon t; the
    analytic value it estimates is i0_scaled(2t/d)^d.
    """
    d = check_dimension(d)
    t = check_time(t)
    trials = _check_trials(trials)
    seed = _resolve_seed(seed)
    master = np.uint64(seed.master_seed)
    base = seed.stream_index

    def run(start, n):
        return _chunk_equal_at_horizon(d, 2.0 * t, master,
                                       np.uint64(base + start), n)

    hits = sum(_map_chunks(run, trials, workers))
    mean = hits / trials
    var = max(hits - hits * hits / trials, 0.0) / (trials - 1)
    return Estimate(float(mean), math.sqrt(var / trials), trials, seed)


def mc_expected_count(d, mode, horizon, trials, seed, workers=1) -> Estimate:
    """Mean collision count: discrete steps or continuous components.

    In discrete mode ``horizon`` is the step count; in continuous mode it
    is the time cutoff.  Matched truncations (steps = horizon) estimate
    the same quantity up to Poisson smearing at the boundary, which is how
    the discrete/continuous equivalence is checked numerically.
    """
    d = check_dimension(d)
    trials = _check_trials(trials)
    seed = _resolve_seed(seed)
    master = np.uint64(seed.master_seed)
    base = seed.stream_index

    if mode == "discrete":
        n_steps = check_count(horizon, "horizon (steps)")

        def run(start, n):
            return _chunk_discrete_counts(d, n_steps, master,
                                          np.uint64(base + start), n)
    elif mode == "continuous":
        horizon = check_time(horizon, "horizon")

        def run(start, n):
            return _chunk_components(d, 2.0 * horizon, master,
                                     np.uint64(base + start), n)
    else:
        raise ValueError(f"mode must be 'discrete' or 'continuous', got {mode!r}")

    parts = _map_chunks(run, trials, workers)
    s = sum(p[0] for p in parts)
    s2 = sum(p[1] for p in parts)
    return _moments_to_estimate(s, s2, trials, seed)


def mc_occupation(d, horizon, trials, seed, workers=1) -> Estimate:
    """Mean coincidence occupation time on [0, horizon].

    Estimates the time integral of the collision probability up to the
    horizon (compare expected_occupation in the analysis module).
    """
    d = check_dimension(d)
    horizon = check_time(horizon, "horizon")
    trials = _check_trials(trials)
    seed = _resolve_seed(seed)
    master = np.uint64(seed.master_seed)
    base = seed.stream_index

    def run(start, n):
        return _chunk_occupation(d, 2.0 * horizon, master,
                                 np.uint64(base + start), n)

    parts = _map_chunks(run, trials, workers)
    s = 0.0
    s2 = 0.0
    for p in parts:          # fixed chunk order: reduction is deterministic
        s += p[0]
        s2 += p[1]
    mean = s / trials
    var = max(s2 - s * s / trials, 0.0) / (trials - 1)
    return Estimate(float(mean), math.sqrt(var / trials), trials, seed)


def mc_embedded_visits(d, n_jumps, trials, seed, workers=1) -> Estimate:
    """Mean origin-visit count of the embedded difference walk."""
    d = check_dimension(d)
    n_jumps = check_count(n_jumps, "n_jumps")
    trials = _check_trials(trials)
    seed = _resolve_seed(seed)
    master = np.uint64(seed.master_seed)
    base = seed.stream_index

    def run(start, n):
        return _chunk_embedded_visits(d, n_jumps, master,
                                      np.uint64(base + start), n)

    parts = _map_chunks(run, trials, workers)
    s = sum(p[0] for p in parts)
    s2 = sum(p[1] for p in parts)
    return _moments_to_estimate(s, s2, trials, seed)


def sample_difference_endpoints(d, n_steps, trials, seed) -> np.ndarray:
    """Final difference vectors X_n - Y_n over many trials (test support)."""
    d = check_dimension(d)
    n_steps = check_count(n_steps, "n_steps")
    trials = check_count(trials, "trials")
    seed = _resolve_seed(seed)
    out = np.empty((trials, d), dtype=np.int64)
    _fill_endpoints(d, n_steps, np.uint64(seed.master_seed),
                    np.uint64(seed.stream_index), trials, out)
    return out


@njit(cache=True, nogil=True)
def _fill_endpoints(d, n_steps, master, stream0, trials, out):
    # _discrete_trial leaves the final difference vector in its scratch
    # array, so passing each output row reuses the exact trial draw order.
    for i in range(trials):
        _discrete_trial(d, n_steps, master, stream0 + uint64(i), out[i])


def thinning_test(d, horizon, trials, seed, workers=1,
                  chi2_quantile=0.999, corr_threshold=None) -> ThinningReport:
    """Check the thinned coordinate jump counts against Poisson(2h/d).

    Per coordinate, a chi-square goodness-of-fit with bins merged to an
    expected count of at least 5; across coordinates, the maximum absolute
    pairwise correlation.  Passing means every chi-square statistic is
    below the chi2_quantile threshold and the correlation is below
    corr_threshold (default 3.2 / sqrt(trials)).
    """
    d = check_dimension(d)
    horizon = check_time(horizon, "horizon")
    if horizon <= 0:
        raise ValueError("horizon must be > 0")
    trials = _check_trials(trials, minimum=1000)
    seed = _resolve_seed(seed)
    master = np.uint64(seed.master_seed)
    base = seed.stream_index
    rate = 2.0 * horizon / d

    nbins = int(rate + 14.0 * math.sqrt(rate + 1.0)) + 3
    hists = []
    sums = []
    crosses = []

    def run(start, n):
        hist = np.zeros((d, nbins), dtype=np.int64)
        ssum = np.zeros(d, dtype=np.int64)
        cross = np.zeros((d, d), dtype=np.int64)
        _chunk_jump_stats(d, 2.0 * horizon, master, np.uint64(base + start),
                          n, hist, ssum, cross)
        return hist, ssum, cross

    for hist, ssum, cross in _map_chunks(run, trials, workers):
        hists.append(hist)
        sums.append(ssum)
        crosses.append(cross)
    hist = np.sum(hists, axis=0)
    ssum = np.sum(sums, axis=0)
    cross = np.sum(crosses, axis=0)

    pmf = stats.poisson.pmf(np.arange(nbins - 1), rate)
    expected = np.append(trials * pmf, trials * stats.poisson.sf(nbins - 2, rate))
    edges = _merge_bins(expected, min_expected=5.0)
    dof = len(edges) - 2
    exp_merged = np.array([expected[a:b].sum() for a, b in zip(edges[:-1], edges[1:])])
    chi = []
    for a in range(d):
        obs = np.array([hist[a, lo:hi].sum() for lo, hi in zip(edges[:-1], edges[1:])])
        chi.append(float(((obs - exp_merged) ** 2 / exp_merged).sum()))
    threshold = float(stats.chi2.ppf(chi2_quantile, dof))

    means = ssum / trials
    max_corr = 0.0
    if d > 1:
        for a in range(d):
            for b in range(a + 1, d):
                cov = (cross[a, b] - ssum[a] * ssum[b] / trials) / (trials - 1)
                va = (cross[a, a] - ssum[a] ** 2 / trials) / (trials - 1)
                vb = (cross[b, b] - ssum[b] ** 2 / trials) / (trials - 1)
                max_corr = max(max_corr, abs(cov / math.sqrt(va * vb)))
    if corr_threshold is None:
        corr_threshold = 3.2 / math.sqrt(trials)

    passed = all(c < threshold for c in chi) and (d == 1 or max_corr < corr_threshold)
    return ThinningReport(
        d=d, horizon=horizon, trials=trials, rate=rate,
        coordinate_means=[float(m) for m in means],
        chi_square=chi, chi_square_threshold=threshold, chi_square_dof=dof,
        max_abs_correlation=float(max_corr),
        correlation_threshold=float(corr_threshold),
        passed=bool(passed), seed=seed)


def _merge_bins(expected, min_expected=5.0):
    """Bin edges (index boundaries) so each merged bin expects >= min_expected."""
    edges = [0]
    acc = 0.0
    for i, e in enumerate(expected):
        acc += e
        if acc >= min_expected:
            edges.append(i + 1)
            acc = 0.0
    if edges[-1] != len(expected):
        edges.append(len(expected))
    # fold a deficient trailing bin into its neighbor
    if len(edges) > 2:
        last = expected[edges[-2]:edges[-1]].sum()
        if last < min_expected:
            edges.pop(-2)
    return edges


__all__ = [
    "CHUNK_TRIALS", "Estimate", "ThinningReport", "mc_collision_prob",
    "mc_expected_count", "mc_occupation", "mc_embedded_visits",
    "sample_difference_endpoints", "thinning_test",
]
