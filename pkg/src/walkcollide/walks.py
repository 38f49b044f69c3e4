"""Lattice geometry and pair-walk simulators on Z^d.

Two independent simple random walkers start at the origin.  In discrete
time both move once per step; in continuous time each carries a rate-1
exponential clock, simulated as one superposed rate-2 event stream where
a fair coin picks which walker moves (equivalent by superposition and
thinning, and it halves the random draws).  Collision bookkeeping tracks
only the difference vector X - Y, updated in O(1) per event.

Counting conventions: the shared start counts, so every record has at
least one collision/component.  In continuous time a collision at jump
epoch T_k occupies exactly the interval [T_k, T_{k+1}) (the next event
moves one walker by a unit step, which always breaks the tie), so
components of the coincidence set and collision epochs are in bijection.

Simulators stream-update a CollisionRecord and do not keep trajectories;
``keep_log`` / ``keep_paths`` opt-ins exist for invariant tests and demos.
All randomness is drawn from the counter-keyed streams in ``_rng``, so a
SeedSpec pins down every trajectory bit-for-bit.
"""

from dataclasses import dataclass

import numpy as np
from numba import njit, int64, uint64

from ._rng import stream_state, next_exponential, next_below
from ._validate import DIM_MAX, check_count, check_dimension, check_time

_U64_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class SeedSpec:
    """Master seed plus stream index; distinct pairs give independent streams.

    Both fields are taken modulo 2**64.  The same pair reproduces the
    identical trajectory; Monte Carlo drivers derive per-trial streams as
    stream_index + trial.
    """
    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        object.__setattr__(self, "master_seed", int(self.master_seed) & _U64_MASK)
        object.__setattr__(self, "stream_index", int(self.stream_index) & _U64_MASK)

    def child(self, offset: int) -> "SeedSpec":
        return SeedSpec(self.master_seed, (self.stream_index + offset) & _U64_MASK)

    def numpy_generator(self) -> np.random.Generator:
        """Independent numpy Generator for utility draws (not the simulators)."""
        ss = np.random.SeedSequence(entropy=self.master_seed,
                                    spawn_key=(self.stream_index,))
        return np.random.default_rng(ss)

    def to_dict(self):
        return {"master_seed": self.master_seed, "stream_index": self.stream_index}


@dataclass(frozen=True)
class CollisionRecord:
    """Collision bookkeeping for one simulated pair trajectory."""
    discrete_count: int        # collision epochs, shared start included
    component_count: int       # components of {t: X(t) = Y(t)}; equals the epoch count
    occupation_time: float     # Lebesgue measure of the coincidence set (0.0 in discrete mode)
    horizon: float             # step or time cutoff the trajectory ran to
    mode: str                  # "discrete" or "continuous"
    equal_at_horizon: bool     # X = Y at the cutoff

    def to_dict(self):
        return {
            "discrete_count": self.discrete_count,
            "component_count": self.component_count,
            "occupation_time": self.occupation_time,
            "horizon": self.horizon,
            "mode": self.mode,
            "equal_at_horizon": self.equal_at_horizon,
        }


@dataclass(frozen=True)
class DiscretePairState:
    n: int
    x: np.ndarray
    y: np.ndarray


@dataclass(frozen=True)
class ContinuousPairState:
    t: float
    x: np.ndarray
    y: np.ndarray
    next_event: float


def uniform_step(d: int, rng: np.random.Generator) -> np.ndarray:
    """One uniform unit step: +-e_i, each with probability 1/(2d)."""
    d = check_dimension(d)
    u = int(rng.integers(0, 2 * d))
    step = np.zeros(d, dtype=np.int64)
    step[u >> 1] = 1 if (u & 1) == 0 else -1
    return step


# ---------------------------------------------------------------------------
# jitted trial kernels
#
# Draw protocols are frozen; reproducibility depends on them.
# Continuous pair: per event, one Exponential(1) gap on the rate-2 clock
# (raw time = 2 * real time), then one uniform integer in [0, 4d) encoding
# (step index << 1) | walker.  The gap that overshoots the horizon is
# still drawn.
# Discrete pair: per step, one integer in [0, 2d) for X then one for Y.
# Embedded difference walk: one integer in [0, 2d) per jump.
# Coordinate jump counts: per event, one Exponential(1) gap, then one
# integer in [0, d).
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def _continuous_trial(d, lim, master, stream, diff):
    """One continuous pair up to raw clock time lim = 2 * horizon.

    Returns (component_count, occupation_time, equal_at_end).
    """
    for c in range(d):
        diff[c] = 0
    state = stream_state(master, stream)
    nsym = uint64(4 * d)
    components = 1
    occ_raw = 0.0
    t_raw = 0.0
    nonzero = 0
    zero = True
    while True:
        e, state = next_exponential(state)
        t_next = t_raw + e
        if t_next > lim:
            if zero:
                occ_raw += lim - t_raw
            break
        if zero:
            occ_raw += t_next - t_raw
        t_raw = t_next
        u, state = next_below(state, nsym)
        ui = int64(u)
        step = ui >> 1
        coord = step >> 1
        sign = 1 if (step & 1) == 0 else -1
        if (ui & 1) == 1:
            sign = -sign
        if diff[coord] == 0:
            nonzero += 1
        diff[coord] += sign
        if diff[coord] == 0:
            nonzero -= 1
        zero = nonzero == 0
        if zero:
            components += 1
    return components, 0.5 * occ_raw, zero


@njit(cache=True, nogil=True)
def _continuous_trial_logged(d, lim, master, stream):
    """Same draws as _continuous_trial, but records every event."""
    state = stream_state(master, stream)
    nsym = uint64(4 * d)
    cap = 64
    times = np.empty(cap, dtype=np.float64)
    walker = np.empty(cap, dtype=np.int8)
    coord_arr = np.empty(cap, dtype=np.int16)
    sign_arr = np.empty(cap, dtype=np.int8)
    diff = np.zeros(d, dtype=np.int64)
    n = 0
    components = 1
    occ_raw = 0.0
    t_raw = 0.0
    nonzero = 0
    zero = True
    while True:
        e, state = next_exponential(state)
        t_next = t_raw + e
        if t_next > lim:
            if zero:
                occ_raw += lim - t_raw
            break
        if zero:
            occ_raw += t_next - t_raw
        t_raw = t_next
        u, state = next_below(state, nsym)
        ui = int64(u)
        step = ui >> 1
        coord = step >> 1
        sign = 1 if (step & 1) == 0 else -1
        who = ui & 1
        move = sign if who == 0 else -sign
        if diff[coord] == 0:
            nonzero += 1
        diff[coord] += move
        if diff[coord] == 0:
            nonzero -= 1
        zero = nonzero == 0
        if zero:
            components += 1
        if n == cap:
            cap *= 2
            t2 = np.empty(cap, dtype=np.float64); t2[:n] = times; times = t2
            w2 = np.empty(cap, dtype=np.int8); w2[:n] = walker; walker = w2
            c2 = np.empty(cap, dtype=np.int16); c2[:n] = coord_arr; coord_arr = c2
            s2 = np.empty(cap, dtype=np.int8); s2[:n] = sign_arr; sign_arr = s2
        times[n] = 0.5 * t_raw
        walker[n] = who
        coord_arr[n] = coord
        sign_arr[n] = sign
        n += 1
    return (times[:n].copy(), walker[:n].copy(), coord_arr[:n].copy(),
            sign_arr[:n].copy(), components, 0.5 * occ_raw, zero)


@njit(cache=True, nogil=True)
def _discrete_trial(d, n_steps, master, stream, diff):
    """One discrete pair for n_steps; returns (collision_count, equal_at_end)."""
    for c in range(d):
        diff[c] = 0
    state = stream_state(master, stream)
    n2d = uint64(2 * d)
    count = 1
    nonzero = 0
    for _ in range(n_steps):
        ux, state = next_below(state, n2d)
        ui = int64(ux)
        coord = ui >> 1
        sign = 1 if (ui & 1) == 0 else -1
        if diff[coord] == 0:
            nonzero += 1
        diff[coord] += sign
        if diff[coord] == 0:
            nonzero -= 1
        uy, state = next_below(state, n2d)
        ui = int64(uy)
        coord = ui >> 1
        sign = -1 if (ui & 1) == 0 else 1
        if diff[coord] == 0:
            nonzero += 1
        diff[coord] += sign
        if diff[coord] == 0:
            nonzero -= 1
        if nonzero == 0:
            count += 1
    return count, nonzero == 0


@njit(cache=True, nogil=True)
def _discrete_paths(d, n_steps, master, stream):
    """Same draws as _discrete_trial, returning both walker paths."""
    state = stream_state(master, stream)
    n2d = uint64(2 * d)
    x = np.zeros((n_steps + 1, d), dtype=np.int64)
    y = np.zeros((n_steps + 1, d), dtype=np.int64)
    for n in range(1, n_steps + 1):
        for c in range(d):
            x[n, c] = x[n - 1, c]
            y[n, c] = y[n - 1, c]
        ux, state = next_below(state, n2d)
        ui = int64(ux)
        x[n, ui >> 1] += 1 if (ui & 1) == 0 else -1
        uy, state = next_below(state, n2d)
        ui = int64(uy)
        y[n, ui >> 1] += 1 if (ui & 1) == 0 else -1
    return x, y


@njit(cache=True, nogil=True)
def _embedded_trial(d, n_jumps, master, stream, diff):
    """Visits to the origin of the embedded difference walk (jump 0 counts)."""
    for c in range(d):
        diff[c] = 0
    state = stream_state(master, stream)
    n2d = uint64(2 * d)
    visits = 1
    nonzero = 0
    for _ in range(n_jumps):
        u, state = next_below(state, n2d)
        ui = int64(u)
        coord = ui >> 1
        sign = 1 if (ui & 1) == 0 else -1
        if diff[coord] == 0:
            nonzero += 1
        diff[coord] += sign
        if diff[coord] == 0:
            nonzero -= 1
        if nonzero == 0:
            visits += 1
    return visits


@njit(cache=True, nogil=True)
def _jump_counts_trial(d, lim, master, stream, counts):
    """Per-coordinate jump tallies of the difference process up to lim = 2h."""
    for c in range(d):
        counts[c] = 0
    state = stream_state(master, stream)
    nd = uint64(d)
    t_raw = 0.0
    while True:
        e, state = next_exponential(state)
        t_raw += e
        if t_raw > lim:
            break
        u, state = next_below(state, nd)
        counts[int64(u)] += 1


# ---------------------------------------------------------------------------
# public simulators
# ---------------------------------------------------------------------------

def simulate_discrete_pair(d: int, n_steps: int, seed: SeedSpec,
                           keep_paths: bool = False):
    """Run one discrete pair; optionally return both paths as well.

    The collision count includes step 0 (shared start), so it is >= 1.
    """
    d = check_dimension(d)
    n_steps = check_count(n_steps, "n_steps")
    master, stream = np.uint64(seed.master_seed), np.uint64(seed.stream_index)
    if keep_paths:
        x, y = _discrete_paths(d, n_steps, master, stream)
        equal = np.all(x == y, axis=1)
        count = int(np.count_nonzero(equal))
        rec = CollisionRecord(count, count, 0.0, float(n_steps), "discrete",
                              bool(equal[-1]))
        return rec, (x, y)
    diff = np.zeros(d, dtype=np.int64)
    count, equal_end = _discrete_trial(d, n_steps, master, stream, diff)
    return CollisionRecord(int(count), int(count), 0.0, float(n_steps),
                           "discrete", bool(equal_end))


def simulate_continuous_pair(d: int, horizon: float, seed: SeedSpec,
                             keep_log: bool = False):
    """Run one continuous pair on [0, horizon].

    Returns a CollisionRecord, or (record, ContinuousEventLog) when
    ``keep_log`` is set.  component_count counts the jump epochs (plus the
    start) at which the walkers coincide, which is exactly the number of
    maximal coincidence intervals; occupation_time is their total length
    within the horizon.
    """
    d = check_dimension(d)
    horizon = check_time(horizon, "horizon")
    master, stream = np.uint64(seed.master_seed), np.uint64(seed.stream_index)
    if keep_log:
        times, walker, coord, sign, comp, occ, zero = _continuous_trial_logged(
            d, 2.0 * horizon, master, stream)
        rec = CollisionRecord(int(comp), int(comp), float(occ), horizon,
                              "continuous", bool(zero))
        log = ContinuousEventLog(d, horizon, times, walker, coord, sign)
        return rec, log
    diff = np.zeros(d, dtype=np.int64)
    comp, occ, zero = _continuous_trial(d, 2.0 * horizon, master, stream, diff)
    return CollisionRecord(int(comp), int(comp), float(occ), horizon,
                           "continuous", bool(zero))


def embedded_difference_walk(d: int, n_jumps: int, seed: SeedSpec) -> int:
    """Visits to the origin of the plain difference walk in n_jumps jumps."""
    d = check_dimension(d)
    n_jumps = check_count(n_jumps, "n_jumps")
    diff = np.zeros(d, dtype=np.int64)
    return int(_embedded_trial(d, n_jumps, np.uint64(seed.master_seed),
                               np.uint64(seed.stream_index), diff))


def coordinate_jump_counts(d: int, horizon: float, seed: SeedSpec) -> np.ndarray:
    """Per-coordinate jump counts of the difference process on [0, horizon].

    Each count is Poisson(2 * horizon / d) and the d counts are
    independent (rate-2 stream thinned uniformly over coordinates).
    """
    d = check_dimension(d)
    horizon = check_time(horizon, "horizon")
    if horizon == 0:
        raise ValueError("horizon must be > 0")
    counts = np.zeros(d, dtype=np.int64)
    _jump_counts_trial(d, 2.0 * horizon, np.uint64(seed.master_seed),
                       np.uint64(seed.stream_index), counts)
    return counts


@dataclass(frozen=True)
class ContinuousEventLog:
    """Opt-in event record of one continuous pair trajectory.

    Arrays are indexed by event (jump) number, excluding the start.
    ``times`` are jump epochs in real time, ``walker`` is 0 for X and 1
    for Y, and the moved walker changed coordinate ``coord`` by ``sign``.
    """
    d: int
    horizon: float
    times: np.ndarray
    walker: np.ndarray
    coord: np.ndarray
    sign: np.ndarray

    def __len__(self):
        return len(self.times)

    def walker_paths(self):
        """Positions of X and Y after each event; row 0 is the start."""
        n = len(self.times)
        x = np.zeros((n + 1, self.d), dtype=np.int64)
        y = np.zeros((n + 1, self.d), dtype=np.int64)
        for k in range(n):
            x[k + 1] = x[k]
            y[k + 1] = y[k]
            if self.walker[k] == 0:
                x[k + 1, self.coord[k]] += self.sign[k]
            else:
                y[k + 1, self.coord[k]] += self.sign[k]
        return x, y

    def difference_path(self):
        x, y = self.walker_paths()
        return x - y

    def zero_flags(self):
        """Coincidence indicator after each event (entry 0 is the start)."""
        return ~self.difference_path().any(axis=1)

    def states(self):
        """Iterate ContinuousPairState snapshots, starting at t = 0."""
        x, y = self.walker_paths()
        n = len(self.times)
        for k in range(n + 1):
            t = 0.0 if k == 0 else float(self.times[k - 1])
            nxt = float(self.times[k]) if k < n else float("inf")
            yield ContinuousPairState(t, x[k].copy(), y[k].copy(), nxt)


__all__ = [
    "DIM_MAX", "SeedSpec", "CollisionRecord", "ContinuousEventLog",
    "DiscretePairState", "ContinuousPairState", "uniform_step",
    "simulate_discrete_pair", "simulate_continuous_pair",
    "embedded_difference_walk", "coordinate_jump_counts",
]
