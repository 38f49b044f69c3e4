"""Adaptive Gauss-Kronrod quadrature with honest error accounting.

A single 7-15 panel rule drives a priority-queue refinement: the interval
with the largest error estimate is bisected until the summed estimate
meets the tolerance or the subdivision budget runs out.  The final value
is accumulated in left-endpoint order so the result does not depend on
refinement scheduling.
"""

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

_EPS = np.finfo(float).eps

# Gauss 7 / Kronrod 15 nodes and weights on [-1, 1].
_XGK = np.array([
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0,
])
_WGK = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
])
_WG = np.array([
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469,
])


@dataclass
class QuadratureResult:
    value: float
    err_estimate: float
    subdivisions: int
    t_range: tuple = (0.0, 0.0)
    tail_bound: float | None = None

    def to_dict(self):
        return {
            "value": self.value,
            "err_estimate": self.err_estimate,
            "subdivisions": self.subdivisions,
            "t_range": list(self.t_range),
            "tail_bound": self.tail_bound,
        }


class QuadratureBudgetError(RuntimeError):
    """Raised when the subdivision budget is exhausted before convergence.

    Carries the partial result so callers can report diagnostics.
    """

    def __init__(self, message, partial):
        super().__init__(message)
        self.partial = partial


def _gk15(f, a, b):
    """Kronrod-15 value and |K15 - G7| error estimate on [a, b]."""
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    fc = f(c)
    kron = _WGK[7] * fc
    gauss = _WG[3] * fc
    absint = _WGK[7] * abs(fc)
    for j in range(7):
        x = h * _XGK[j]
        f1 = f(c - x)
        f2 = f(c + x)
        kron += _WGK[j] * (f1 + f2)
        absint += _WGK[j] * (abs(f1) + abs(f2))
        if j % 2 == 1:
            gauss += _WG[j // 2] * (f1 + f2)
    return kron * h, abs(kron - gauss) * h, absint * h


def adaptive_quadrature(f, a, b, *, atol=1e-12, rtol=1e-10,
                        max_intervals=4096, initial_edges=None):
    """Integrate ``f`` over [a, b].

    Parameters
    ----------
    f : callable
        Scalar integrand.
    a, b : float
        Integration limits, a <= b.
    atol, rtol : float
        Convergence requires err <= max(atol, rtol*|value|, roundoff floor).
    max_intervals : int
        Subdivision budget; exceeding it raises QuadratureBudgetError with
        the partial result attached.
    initial_edges : sequence of float, optional
        Interior breakpoints seeding the refinement, used to pin down
        integrands whose mass is far narrower than [a, b].
    """
    if not (math.isfinite(a) and math.isfinite(b)) or b < a:
        raise ValueError(f"invalid integration range [{a}, {b}]")
    if b == a:
        return QuadratureResult(0.0, 0.0, 0, (a, b))

    edges = [a, b]
    if initial_edges is not None:
        edges.extend(x for x in initial_edges if a < x < b)
        edges = sorted(set(edges))

    heap = []
    tick = 0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, err, absint = _gk15(f, lo, hi)
        heapq.heappush(heap, (-err, tick, lo, hi, val, absint))
        tick += 1

    n = len(heap)
    while True:
        total = sum(item[4] for item in heap)
        err_sum = sum(-item[0] for item in heap)
        floor = 50.0 * _EPS * sum(item[5] for item in heap)
        if err_sum <= max(atol, rtol * abs(total), floor):
            break
        if n >= max_intervals:
            partial = _collect(heap, a, b, n)
            raise QuadratureBudgetError(
                f"quadrature budget of {max_intervals} intervals exhausted on "
                f"[{a}, {b}]: err_estimate={partial.err_estimate:.3e} "
                f"value={partial.value:.6e}", partial)
        _, _, lo, hi, _, _ = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        for seg in ((lo, mid), (mid, hi)):
            val, err, absint = _gk15(f, *seg)
            heapq.heappush(heap, (-err, tick, seg[0], seg[1], val, absint))
            tick += 1
        n += 1

    return _collect(heap, a, b, n)


def _collect(heap, a, b, n):
    items = sorted(heap, key=lambda it: it[2])
    value = 0.0
    err = 0.0
    for item in items:
        value += item[4]
        err += -item[0]
    return QuadratureResult(value, err, n, (a, b))
