r"""Scaled modified Bessel kernel and the collision probabilities built on it.

Everything here revolves around the exponentially scaled modified Bessel
function of the first kind and order zero,

    i0_scaled(z) = e^{-z} I_0(z),   I_0(z) = sum_k (z/2)^{2k} / (k!)^2,

which lives in (0, 1] for z >= 0.  The raw I_0 overflows double precision
near z ~ 700, so the scaled product is the only primitive: the power
series carries the e^{-z} factor through its term recurrence, and the
large-z regime uses the standard asymptotic expansion of e^{-z} I_0(z).

For two independent rate-1 continuous-time walkers on Z^d started
together, each coordinate of the difference jumps at rate 2/d, and

    P(coordinate j agrees at time t) = i0_scaled(2 t / d),
    P(walkers coincide at time t)    = i0_scaled(2 t / d) ** d.

`series_prob_oracle` evaluates the same coordinate probability the long
way round, as a Poisson(2t/d) mixture of symmetric binomial return
probabilities; it exists so tests can cross-check the kernel against an
independently computed sum.
"""

import math
from dataclasses import dataclass

from ._validate import check_dimension as _check_dim
from ._validate import check_time as _check_t
from .quadrature import adaptive_quadrature

Z_SWITCH = 30.0
_SERIES_STOP = 1e-18
_EPS = 2.220446049250313e-16
_LOG_TINY = -745.2  # below this, exp() is a true underflow


@dataclass(frozen=True)
class ScaledBesselValue:
    """One evaluation of e^{-z} I_0(z) with its truncation-error bound."""
    value: float
    regime: str          # "series" or "asymptotic"
    err_bound: float     # absolute bound on truncation + rounding error


@dataclass(frozen=True)
class CollisionProbDetail:
    value: float
    log_value: float
    err_bound: float
    underflowed: bool


def _check_z(z):
    if not (isinstance(z, (int, float)) and math.isfinite(z)) or z < 0:
        raise ValueError(f"argument must be a finite real >= 0, got {z!r}")
    return float(z)


def _series(z):
    """Power series of e^{-z} I_0(z): scale folded into the first term,
    term_{k+1} = term_k * (z/2)^2 / (k+1)^2, summed until a term drops
    below 1e-18 of the running total.  All terms are positive, so there
    is no cancellation."""
    term = math.exp(-z)
    total = term
    q = 0.25 * z * z
    k = 0
    while True:
        k += 1
        term *= q / (k * k)
        total += term
        if term <= _SERIES_STOP * total:
            break
    nxt = term * q / ((k + 1) * (k + 1))
    ratio = q / ((k + 2) * (k + 2))
    tail = nxt / (1.0 - ratio) if ratio < 1.0 else nxt * 2.0
    err = tail + (k + 2) * _EPS * total
    return total, err


def _asymptotic(z):
    """Large-z expansion
    (2 pi z)^{-1/2} * (1 + 1/(8z) + 9/(2!(8z)^2) + 225/(3!(8z)^3) + ...),
    truncated at its smallest term (or once terms are negligible); the
    first omitted term bounds the truncation error."""
    scale = 1.0 / math.sqrt(2.0 * math.pi * z)
    term = 1.0
    total = 1.0
    k = 0
    while True:
        nxt = term * (2 * k + 1) ** 2 / (8.0 * z * (k + 1))
        if nxt >= term:
            # smallest term reached; it bounds the remainder
            break
        k += 1
        term = nxt
        total += term
        if term <= _SERIES_STOP * total:
            nxt = term * (2 * k + 1) ** 2 / (8.0 * z * (k + 1))
            break
    err = scale * (nxt + (k + 2) * _EPS * total)
    return scale * total, err


def i0_scaled(z: float) -> ScaledBesselValue:
    """Evaluate e^{-z} I_0(z) for z >= 0.

    Power series up to Z_SWITCH, asymptotic expansion beyond it.  The two
    regimes agree to ~1e-15 relative at the switch point (checked by the
    regime-continuity invariant test).
    """
    z = _check_z(z)
    if z <= Z_SWITCH:
        value, err = _series(z)
        return ScaledBesselValue(value, "series", err)
    value, err = _asymptotic(z)
    return ScaledBesselValue(value, "asymptotic", err)


def i0_quadrature(z: float, *, atol=1e-14, max_intervals=4096) -> float:
    """Independent evaluation of e^{-z} I_0(z) from the integral formula.

    Uses (1/pi) * integral_0^pi exp(z (cos theta - 1)) dtheta, the scaled
    form of I_0(z) = (1/pi) int_0^pi e^{z cos theta} dtheta, via adaptive
    quadrature.  For large z the integrand is a spike of width ~ z^{-1/2}
    at theta = 0, so the refinement is seeded with breakpoints on that
    scale.  Serves as the oracle for i0_scaled; raises
    QuadratureBudgetError if the tolerance cannot be met in budget.
    """
    z = _check_z(z)
    if z == 0.0:
        return 1.0

    def integrand(theta):
        x = z * (math.cos(theta) - 1.0)
        return math.exp(x) if x > _LOG_TINY else 0.0

    edges = None
    if z > 16.0:
        edges = []
        w = 1.0 / math.sqrt(z)
        while w < math.pi:
            edges.append(w)
            w *= 4.0
    res = adaptive_quadrature(integrand, 0.0, math.pi, atol=atol * math.pi,
                              rtol=1e-13, max_intervals=max_intervals,
                              initial_edges=edges)
    return res.value / math.pi


def coordinate_return_prob(t: float, d: int) -> float:
    """P(one coordinate of the difference walk is 0 at time t) on Z^d."""
    t = _check_t(t)
    d = _check_dim(d)
    return i0_scaled(2.0 * t / d).value


def series_prob_oracle(t: float, d: int, k_max: int) -> float:
    """Coordinate agreement probability summed the direct way.

    Truncated sum over k of
    [Poisson(2t/d) mass at 2k] * [C(2k, k) 2^{-2k}]:
    the jump count of one coordinate is Poisson(2t/d) and a 2k-jump
    symmetric walk returns with probability C(2k, k) 2^{-2k}.  Each term
    is computed from scratch (lgamma for the Poisson mass, exact binomial
    for the combinatorial factor), deliberately not reusing the kernel's
    term recurrence.  Test oracle only; callers pick k_max so that
    series_prob_tail_bound is below their tolerance.
    """
    t = _check_t(t)
    d = _check_dim(d)
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    z = 2.0 * t / d
    if z == 0.0:
        return 1.0
    lz = math.log(z)
    total = 0.0
    for k in range(k_max + 1):
        log_pois = -z + 2 * k * lz - math.lgamma(2 * k + 1)
        binom = float(math.comb(2 * k, k)) * 0.25 ** k
        total += math.exp(log_pois) * binom
    return total


def series_prob_tail_bound(t: float, d: int, k_max: int) -> float:
    """First omitted Poisson mass, doubled to cover the whole tail."""
    t = _check_t(t)
    d = _check_dim(d)
    z = 2.0 * t / d
    if z == 0.0:
        return 0.0
    m = 2 * k_max + 2
    log_mass = -z + m * math.log(z) - math.lgamma(m + 1)
    return 2.0 * math.exp(log_mass)


def collision_prob(t: float, d: int) -> float:
    """P(the two walkers coincide at time t) = i0_scaled(2t/d)^d."""
    return collision_prob_detail(t, d).value


def collision_prob_detail(t: float, d: int) -> CollisionProbDetail:
    """Collision probability with log value and underflow diagnostics.

    The power is taken in log space, so the result is 0.0 only when the
    true value drops below the smallest positive double; that case is
    flagged rather than silently absorbed.
    """
    t = _check_t(t)
    d = _check_dim(d)
    if t == 0.0:
        return CollisionProbDetail(1.0, 0.0, 0.0, False)
    kern = i0_scaled(2.0 * t / d)
    log_p = d * math.log(kern.value)
    if log_p < _LOG_TINY:
        return CollisionProbDetail(0.0, log_p, 0.0, True)
    p = math.exp(log_p)
    err = p * d * (kern.err_bound / kern.value + 2.0 * _EPS)
    return CollisionProbDetail(p, log_p, err, False)
