"""Seeded slot-level simulation of the two-node channel.

Random streams
--------------
Replication ``i`` of a run with ``base_seed`` uses the 64-bit seed
:func:`derive_seed` ``(base_seed, i)``: the first ``uint64`` word produced by
``numpy.random.SeedSequence(base_seed, spawn_key=(i,))``. A replication with
seed ``s`` draws from ``Generator(PCG64(s))``, six uniforms per slot in the
fixed column order of :mod:`ehmac._kernel`, in blocks of ``CHUNK`` slots.
Both steps are platform independent and touch no global RNG state.

Measurement conventions
-----------------------
* Packet delay is ``departure_slot - arrival_slot + 1``. A packet arriving at
  the end of slot ``a`` is first eligible in slot ``a + 1``.
* Age at slot ``n`` is ``n - s`` where ``s`` is the last slot with a
  successful S2 delivery before ``n``; slots before any success are skipped.
* ``T`` is the gap between consecutive S2 attempts and ``X`` between
  consecutive S2 successes; both use only slots after burn-in.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from . import _kernel as K
from .model import success_probs
from .params import SystemParams
from .validation import check_int

CHUNK = 1 << 16
DEFAULT_SEED = 20190527
CONFIDENCE = 0.95


class ChannelMode(str, enum.Enum):
    BERNOULLI = "bernoulli"
    SINR = "sinr"


class Transmitter(enum.IntEnum):
    S1 = 1
    S2 = 2


def derive_seed(base_seed: int, index: int) -> int:
    """64-bit seed of replication ``index`` under ``base_seed``."""
    seq = np.random.SeedSequence(int(base_seed), spawn_key=(int(index),))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class SimConfig:
    params: SystemParams
    horizon: int = 1_000_000
    burn_in: int | None = None
    replications: int = 1
    base_seed: int = DEFAULT_SEED
    channel_mode: ChannelMode = ChannelMode.BERNOULLI

    def __post_init__(self):
        horizon = check_int(self.horizon, "horizon", minimum=1)
        burn_in = horizon // 10 if self.burn_in is None else check_int(self.burn_in, "burn_in")
        if burn_in >= horizon:
            raise ValueError(f"burn_in must be < horizon ({horizon}), got {burn_in}")
        seed = check_int(self.base_seed, "base_seed")
        if seed >= 2 ** 64:
            raise ValueError("base_seed must fit in 64 bits")
        object.__setattr__(self, "horizon", horizon)
        object.__setattr__(self, "burn_in", burn_in)
        object.__setattr__(self, "replications",
                           check_int(self.replications, "replications", minimum=1))
        object.__setattr__(self, "base_seed", seed)
        object.__setattr__(self, "channel_mode", ChannelMode(self.channel_mode))

    @property
    def window(self) -> int:
        return self.horizon - self.burn_in


@dataclass(frozen=True)
class SimState:
    """Snapshot of the system at the end of a replication."""

    q_len: int
    battery: int
    aoi: int | None
    arrival_slots: tuple
    slot: int


@dataclass(frozen=True)
class ReplicationStats:
    """Raw integer tallies of one replication."""

    seed: int
    burn_in: int
    horizon: int
    arrivals: int
    delivered: int
    delay_sum: int
    delay_count: int
    aoi_sum: int
    aoi_count: int
    q_nonempty_slots: int
    b_nonempty_slots: int
    s1_departures: int
    s2_attempts: int
    s2_successes: int
    channel_counts: dict  # (node, "solo"/"joint") -> (attempts, successes)
    t_counts: dict
    x_counts: dict
    aoi_anchor: int | None  # last success strictly before the window, if any
    final_state: SimState
    attempt_slots: tuple | None = field(default=None, repr=False)
    success_slots: tuple | None = field(default=None, repr=False)
    diverged: bool = False

    @property
    def window(self) -> int:
        return self.horizon - self.burn_in


@dataclass(frozen=True)
class Estimate:
    """Point estimate with a 95% confidence half-width and standard error."""

    value: float
    ci_half_width: float = math.nan
    std_error: float = math.nan

    def __float__(self):
        return float(self.value)


@dataclass(frozen=True)
class SimResult:
    mean_delay: Estimate
    mean_aoi: Estimate
    throughput: Estimate
    prob_q_nonempty: Estimate
    prob_b_nonempty: Estimate
    success_rate_s2: Estimate
    service_rate: Estimate
    mean_t: Estimate
    second_moment_t: Estimate
    t_histogram: dict
    x_histogram: dict
    diverged: bool
    replications: tuple = field(repr=False, default=())


def resolve_slot_outcomes(active, probs, channel_mode, rng, params: SystemParams | None = None):
    """Success flags ``{Transmitter: bool}`` for the ``active`` transmitters.

    ``rng`` is a ``numpy.random.Generator``; two uniforms are always drawn.
    SINR mode needs ``params`` for the linear SNRs and thresholds.
    """
    active = {Transmitter(a) for a in active}
    a1, a2 = Transmitter.S1 in active, Transmitter.S2 in active
    mode = ChannelMode(channel_mode)
    u1, u2 = rng.random(2)
    if mode is ChannelMode.SINR:
        if params is None:
            raise ValueError("SINR mode needs params for SNRs and thresholds")
        physical = (params.snr1, params.snr2, params.theta1, params.theta2)
    else:
        physical = (1.0, 1.0, 0.0, 0.0)
    ok1, ok2 = K.resolve(a1, a2, u1, u2, _mode_code(mode), probs.p1_solo, probs.p1_joint,
                         probs.p2_solo, probs.p2_joint, *physical)
    flags = {}
    if a1:
        flags[Transmitter.S1] = bool(ok1)
    if a2:
        flags[Transmitter.S2] = bool(ok2)
    return flags


def _mode_code(mode: ChannelMode) -> int:
    return K.MODE_BERNOULLI if mode is ChannelMode.BERNOULLI else K.MODE_SINR


def _gap_counts(slots: np.ndarray) -> dict:
    if slots.size < 2:
        return {}
    values, counts = np.unique(np.diff(slots), return_counts=True)
    return {int(v): int(c) for v, c in zip(values, counts)}


def simulate_replication(config: SimConfig, seed: int, *, keep_trace: bool = False
                         ) -> ReplicationStats:
    """Run one replication and return its raw tallies."""
    p = config.params
    probs = success_probs(p)
    rng = np.random.Generator(np.random.PCG64(int(seed)))
    state, fifo, counters, attempts, successes = K.new_buffers(config.horizon, config.burn_in)
    for start in range(0, config.horizon, CHUNK):
        n = min(CHUNK, config.horizon - start)
        u = rng.random((n, K.N_UNIFORMS))
        K.advance(u, start, config.burn_in, p.lam, p.q1, p.q2, p.delta, p.is_eh,
                  _mode_code(config.channel_mode),
                  probs.p1_solo, probs.p1_joint, probs.p2_solo, probs.p2_joint,
                  p.snr1, p.snr2, p.theta1, p.theta2,
                  state, fifo, counters, attempts, successes)
    attempts = attempts[:state[K.ST_N_ATT]]
    successes = successes[:state[K.ST_N_SUCC]]
    c = [int(v) for v in counters]
    last = int(state[K.ST_LAST_SUCCESS])
    anchor = int(state[K.ST_ANCHOR])
    final = SimState(q_len=int(state[K.ST_TAIL] - state[K.ST_HEAD]),
                     battery=int(state[K.ST_BATTERY]),
                     aoi=None if last == K.NO_SLOT else config.horizon - last,
                     arrival_slots=tuple(fifo[state[K.ST_HEAD]:state[K.ST_TAIL]].tolist()),
                     slot=config.horizon)
    channel_counts = {
        (Transmitter.S1, "solo"): (c[K.C_S1_SOLO_ATT], c[K.C_S1_SOLO_OK]),
        (Transmitter.S1, "joint"): (c[K.C_S1_JOINT_ATT], c[K.C_S1_JOINT_OK]),
        (Transmitter.S2, "solo"): (c[K.C_S2_SOLO_ATT], c[K.C_S2_SOLO_OK]),
        (Transmitter.S2, "joint"): (c[K.C_S2_JOINT_ATT], c[K.C_S2_JOINT_OK]),
    }
    return ReplicationStats(
        seed=int(seed), burn_in=config.burn_in, horizon=config.horizon,
        arrivals=c[K.C_ARRIVALS], delivered=c[K.C_DELIVERED],
        delay_sum=c[K.C_DELAY_SUM], delay_count=c[K.C_DELAY_COUNT],
        aoi_sum=c[K.C_AOI_SUM], aoi_count=c[K.C_AOI_COUNT],
        q_nonempty_slots=c[K.C_Q_NONEMPTY], b_nonempty_slots=c[K.C_B_NONEMPTY],
        s1_departures=c[K.C_S1_DEPARTURES], s2_attempts=c[K.C_S2_ATTEMPTS],
        s2_successes=c[K.C_S2_SUCCESSES], channel_counts=channel_counts,
        t_counts=_gap_counts(attempts), x_counts=_gap_counts(successes),
        aoi_anchor=None if anchor == K.NO_SLOT else anchor, final_state=final,
        attempt_slots=tuple(attempts.tolist()) if keep_trace else None,
        success_slots=tuple(successes.tolist()) if keep_trace else None,
        diverged=(p.is_eh and p.delta == 0.0) or c[K.C_S2_SUCCESSES] == 0,
    )


def _ratio(num: float, den: float) -> float:
    return num / den if den else math.nan


def _per_replication(r: ReplicationStats) -> dict:
    t_total = sum(r.t_counts.values())
    return {
        "mean_delay": _ratio(r.delay_sum, r.delay_count),
        "mean_aoi": math.nan if r.diverged else _ratio(r.aoi_sum, r.aoi_count),
        "throughput": r.s1_departures / r.window,
        "prob_q_nonempty": r.q_nonempty_slots / r.window,
        "prob_b_nonempty": r.b_nonempty_slots / r.window,
        "success_rate_s2": _ratio(r.s2_successes, r.s2_attempts),
        "service_rate": _ratio(r.s1_departures, r.q_nonempty_slots),
        "mean_t": _ratio(sum(k * v for k, v in r.t_counts.items()), t_total),
        "second_moment_t": _ratio(sum(k * k * v for k, v in r.t_counts.items()), t_total),
    }


def _estimate(values: list[float]) -> Estimate:
    """Mean over replications with a Student-t confidence half-width.

    ``math.fsum`` makes the result independent of replication order.
    """
    if any(math.isnan(v) for v in values):
        return Estimate(math.nan)
    n = len(values)
    mean = math.fsum(values) / n
    if n < 2:
        return Estimate(mean)
    var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
    se = math.sqrt(var / n)
    half = float(stats.t.ppf(0.5 + CONFIDENCE / 2, n - 1)) * se
    return Estimate(mean, half, se)


def _normalized(counts: dict) -> dict:
    total = sum(counts.values())
    return {k: counts[k] / total for k in sorted(counts)} if total else {}


def aggregate(reps) -> SimResult:
    """Merge replication tallies. The merge is commutative and associative."""
    reps = tuple(sorted(reps, key=lambda r: r.seed))
    if not reps:
        raise ValueError("nothing to aggregate")
    per = [_per_replication(r) for r in reps]
    est = {name: _estimate([p[name] for p in per]) for name in per[0]}
    t_counts: dict = {}
    x_counts: dict = {}
    for r in reps:
        for k, v in r.t_counts.items():
            t_counts[k] = t_counts.get(k, 0) + v
        for k, v in r.x_counts.items():
            x_counts[k] = x_counts.get(k, 0) + v
    diverged = any(r.diverged for r in reps)
    if diverged:
        est["mean_aoi"] = Estimate(math.nan)
    return SimResult(t_histogram=_normalized(t_counts), x_histogram=_normalized(x_counts),
                     diverged=diverged, replications=reps, **est)


def run_replication(config: SimConfig, seed: int, *, keep_trace: bool = False) -> SimResult:
    """Statistics of a single replication (confidence half-widths are NaN)."""
    return aggregate([simulate_replication(config, seed, keep_trace=keep_trace)])


def run(config: SimConfig, *, keep_trace: bool = False) -> SimResult:
    """Run ``config.replications`` independent replications and aggregate them."""
    reps = [simulate_replication(config, derive_seed(config.base_seed, i), keep_trace=keep_trace)
            for i in range(config.replications)]
    return aggregate(reps)
