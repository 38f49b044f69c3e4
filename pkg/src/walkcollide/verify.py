"""Self-contained verification suites behind ``walkcollide verify``.

Each suite re-derives a family of invariants at a scale that keeps the
whole run in the tens of seconds: kernel accuracy against quadrature,
formula equivalences, discrete/continuous count identities, threshold
growth diagnostics, leading-constant fits, Poisson thinning, and
determinism of the Monte Carlo layer.  Statistical checks use 3-sigma
bands; with the default seed they are deterministic regression checks,
with a user-supplied seed they carry the usual ~0.3% per-check risk.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import analysis, bessel, montecarlo
from .walks import SeedSpec

DEFAULT_SEED = 123456789

KERNEL_GRID = (0.0, 0.1, 1.0, 5.0, 30.0, 100.0, 1000.0)
SERIES_GRID_D = (1, 2, 3)
SERIES_GRID_T = (0.5, 1.0, 5.0, 20.0)


@dataclass
class Check:
    name: str
    passed: bool
    measured: float
    bound: float
    detail: str = ""

    def to_dict(self):
        return {"name": self.name, "passed": self.passed,
                "measured": self.measured, "bound": self.bound,
                "detail": self.detail}


@dataclass
class SuiteResult:
    suite: str
    passed: bool
    checks: list = field(default_factory=list)

    def to_dict(self):
        return {"suite": self.suite, "passed": self.passed,
                "checks": [c.to_dict() for c in self.checks]}


def _check(checks, name, measured, bound, detail=""):
    checks.append(Check(name, bool(measured <= bound), float(measured),
                        float(bound), detail))


def suite_kernel(seed, workers=1):
    checks = []
    for z in KERNEL_GRID:
        v = bessel.i0_scaled(z).value
        q = bessel.i0_quadrature(z)
        _check(checks, f"i0_scaled vs quadrature z={z}", abs(v - q) / q, 1e-10)
    s, _ = bessel._series(bessel.Z_SWITCH)
    a, _ = bessel._asymptotic(bessel.Z_SWITCH)
    _check(checks, "regime continuity at switch", abs(s - a) / s, 1e-12)
    zs = np.geomspace(1e-3, 1e4, 400)
    vals = np.array([bessel.i0_scaled(float(z)).value for z in zs])
    _check(checks, "strictly decreasing", float(np.max(np.diff(vals))), 0.0,
           detail="max forward difference over a dense grid")
    v6 = bessel.i0_scaled(1e6).value
    _check(checks, "asymptotic law z=1e6", abs(2 * math.pi * 1e6 * v6 * v6 - 1.0),
           1e-3)
    for z in KERNEL_GRID:
        sv = bessel.i0_scaled(z)
        _check(checks, f"err_bound budget z={z}", sv.err_bound,
               1e-12 * sv.value if sv.value > 0 else 1e-12)
    return checks


def suite_series(seed, workers=1):
    checks = []
    for d in SERIES_GRID_D:
        for t in SERIES_GRID_T:
            k = 8
            while bessel.series_prob_tail_bound(t, d, k) >= 1e-14:
                k *= 2
            direct = bessel.series_prob_oracle(t, d, k)
            kern = bessel.coordinate_return_prob(t, d)
            _check(checks, f"series oracle d={d} t={t}", abs(direct - kern),
                   1e-12, detail=f"k_max={k}")
    return checks


def suite_cosine(seed, workers=1):
    checks = []
    worst_exact = 0.0
    worst_ratio = 0.0
    for k in range(31):
        m = analysis.cosine_moment(k)   # raises if quadrature != exact
        worst_exact = max(worst_exact, abs(m.half_period - m.exact))
        worst_ratio = max(worst_ratio, abs(m.ratio_full_to_half - 2.0))
    _check(checks, "half-period vs exact, k<=30", worst_exact, 1e-12)
    _check(checks, "full/half period ratio equals 2, k<=30", worst_ratio, 1e-10)
    return checks


def suite_threshold(seed, workers=1):
    checks = []
    expected = {1: "sqrt", 2: "log", 3: "convergent", 4: "convergent",
                5: "convergent", 6: "convergent"}
    for d in range(1, 7):
        v = analysis.classify_dimension(d)
        ok = (v.growth_diagnostic == expected[d]
              and v.expected_collisions_finite == (d >= 3))
        checks.append(Check(f"classification d={d}", ok, 0.0, 0.0,
                            detail=v.growth_diagnostic))
    v1 = analysis.classify_dimension(1)
    for r in v1.window_ratios:
        _check(checks, "d=1 decade ratio vs sqrt(10)",
               abs(r / math.sqrt(10.0) - 1.0), 0.05)
    v2 = analysis.classify_dimension(2)
    ref = math.log(2.0) / (2.0 * math.pi)
    for w in v2.window_increments:
        _check(checks, "d=2 window increment vs ln2/(2pi)",
               abs(w / ref - 1.0), 0.05)
    return checks


def suite_constant(seed, workers=1):
    checks = []
    for d in range(1, 5):
        fit = analysis.fit_leading_constant(d)
        _check(checks, f"fit vs kernel constant d={d}",
               abs(fit.constant_estimate / fit.kernel_constant - 1.0), 1e-2)
        _check(checks, f"ratio to naive vs 2^-{d}",
               abs(fit.ratio_to_naive * 2.0 ** d - 1.0), 2e-2)
    return checks


def suite_counts(seed, workers=1):
    checks = []
    for d in (1, 2, 3, 4):
        _check(checks, f"dp m=2 equals 1/(2d), d={d}",
               abs(analysis.dp_return_prob(d, 2) - 1.0 / (2 * d)), 1e-15)
    _check(checks, "dp d=2 m=4 equals 9/64",
           abs(analysis.dp_return_prob(2, 4) - 9.0 / 64.0), 1e-15)
    _check(checks, "dp odd m is exactly 0",
           max(analysis.dp_return_prob(3, m) for m in (1, 3, 5, 7, 99)), 0.0)
    _check(checks, "discrete count d=1 n=1 equals 3/2",
           abs(analysis.expected_count_discrete(1, 1) - 1.5), 1e-15)

    n_max = 300
    total = analysis.expected_count_discrete(3, n_max) + \
        analysis.discrete_count_tail(3, n_max)
    occ = analysis.expected_occupation(3, 1e6)
    _check(checks, "count equals twice occupation, d=3",
           abs(total - 2.0 * (occ.value + occ.tail_bound)), 2e-3)

    # stream bases spaced so concurrent estimates never share a trial stream
    trials = 20_000
    disc = montecarlo.mc_expected_count(3, "discrete", n_max, trials,
                                        SeedSpec(seed, 10_000_000), workers)
    cont = montecarlo.mc_expected_count(3, "continuous", float(n_max), trials,
                                        SeedSpec(seed, 20_000_000), workers)
    sigma = math.hypot(disc.stderr, cont.stderr)
    _check(checks, "discrete vs continuous counts, matched horizon",
           abs(disc.mean - cont.mean), 3.0 * sigma)
    exact = analysis.expected_count_discrete(3, n_max)
    _check(checks, "discrete MC vs exact DP", abs(disc.mean - exact),
           3.0 * disc.stderr)
    _check(checks, "continuous MC vs exact DP", abs(cont.mean - exact),
           3.0 * cont.stderr)

    occ_mc = montecarlo.mc_occupation(3, 50.0, trials,
                                      SeedSpec(seed, 30_000_000), workers)
    occ_exact = analysis.expected_occupation(3, 50.0)
    _check(checks, "occupation MC vs quadrature",
           abs(occ_mc.mean - occ_exact.value), 3.0 * occ_mc.stderr)
    return checks


def suite_collision(seed, workers=1):
    checks = []
    trials = 100_000
    stream = 0
    for d in (1, 2, 3):
        for t in (1.0, 5.0, 10.0):
            stream += 1
            est = montecarlo.mc_collision_prob(d, t, trials,
                                               SeedSpec(seed, stream * trials),
                                               workers)
            p = bessel.collision_prob(t, d)
            _check(checks, f"MC vs kernel d={d} t={t}", abs(est.mean - p),
                   3.0 * est.stderr)
    return checks


def suite_thinning(seed, workers=1):
    checks = []
    for d in (2, 3):
        rep = montecarlo.thinning_test(d, 30.0, 20_000,
                                       SeedSpec(seed, d * 10_000_000), workers)
        checks.append(Check(f"thinning gof d={d}", rep.passed,
                            max(rep.chi_square), rep.chi_square_threshold,
                            detail=f"max |corr| {rep.max_abs_correlation:.4f}"))
        for m in rep.coordinate_means:
            _check(checks, f"coordinate mean d={d}", abs(m / rep.rate - 1.0),
                   0.01)
    return checks


def suite_determinism(seed, workers=1):
    checks = []
    s = SeedSpec(seed, 60_000_000)
    a = montecarlo.mc_collision_prob(2, 3.0, 5000, s)
    b = montecarlo.mc_collision_prob(2, 3.0, 5000, s)
    checks.append(Check("repeat run bit-identical", a == b, 0.0, 0.0))
    per_worker = [montecarlo.mc_occupation(3, 5.0, 70_000, s, workers=w)
                  for w in (1, 4)]
    checks.append(Check("workers 1 vs 4 bit-identical",
                        per_worker[0] == per_worker[1], 0.0, 0.0))
    small = montecarlo.mc_collision_prob(2, 3.0, 10_000,
                                         SeedSpec(seed, 70_000_000))
    big = montecarlo.mc_collision_prob(2, 3.0, 40_000,
                                       SeedSpec(seed, 70_000_000))
    _check(checks, "stderr scales like 1/sqrt(trials)",
           abs(small.stderr / big.stderr - 2.0), 0.2)
    return checks


SUITES = {
    "kernel": suite_kernel,
    "series": suite_series,
    "cosine": suite_cosine,
    "threshold": suite_threshold,
    "constant": suite_constant,
    "counts": suite_counts,
    "collision": suite_collision,
    "thinning": suite_thinning,
    "determinism": suite_determinism,
}


def run_suites(names, seed=DEFAULT_SEED, workers=1):
    """Run the named suites ("all" expands); returns (results, all_passed)."""
    if isinstance(names, str):
        names = [names]
    expanded = []
    for n in names:
        if n == "all":
            expanded.extend(SUITES)
        elif n in SUITES:
            expanded.append(n)
        else:
            raise ValueError(f"unknown suite {n!r}; choose from "
                             f"{['all', *SUITES]}")
    results = []
    ok = True
    for name in expanded:
        checks = SUITES[name](seed, workers)
        passed = all(c.passed for c in checks)
        ok = ok and passed
        results.append(SuiteResult(name, passed, checks))
    return results, ok
