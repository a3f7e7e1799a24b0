"""Physical-layer success probabilities and the queue of the grid node S1.

Under Rayleigh fading the received power is exponential, so with linear
mean SNR ``s_i`` and threshold ``t_i``::

    p_solo(i)  = exp(-t_i / s_i)
    p_joint(i) = exp(-t_i / s_i) / (1 + t_i * s_j / s_i)

The S1 queue is a discrete-time Geo/Geo/1 queue with arrival rate ``lam``
and a service rate averaged over the activity of S2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .exceptions import ModeError, StabilityError
from .params import SystemParams


@dataclass(frozen=True)
class SuccessProbs:
    """Decoding probabilities: alone (``solo``) or with the other node active (``joint``)."""

    p1_solo: float
    p1_joint: float
    p2_solo: float
    p2_joint: float


@dataclass(frozen=True)
class QueueAnalysis:
    mu: float
    stable: bool
    q1_threshold: float
    prob_q_nonempty: float
    delay: float
    throughput: float


def _solo_joint(snr_own: float, snr_other: float, theta: float) -> tuple[float, float]:
    solo = math.exp(-theta / snr_own)
    return solo, solo / (1.0 + theta * snr_other / snr_own)


def success_probs(params: SystemParams) -> SuccessProbs:
    """Evaluate the four success probabilities from linear SNRs and thresholds."""
    s1, s2 = params.snr1, params.snr2
    if not (s1 > 0 and s2 > 0 and math.isfinite(s1) and math.isfinite(s2)):
        raise ValueError(f"linear SNRs must be positive and finite, got {s1!r}, {s2!r}")
    p1_solo, p1_joint = _solo_joint(s1, s2, params.theta1)
    p2_solo, p2_joint = _solo_joint(s2, s1, params.theta2)
    return SuccessProbs(p1_solo, p1_joint, p2_solo, p2_joint)


def battery_nonempty_prob(params: SystemParams) -> float:
    """Stationary ``Pr(B != 0) = delta / q2`` of the S2 battery chain.

    Raises
    ------
    ModeError
        If S2 is grid powered (its "battery" is never empty; use 1).
    StabilityError
        If ``delta >= q2``: the chain is then not positive recurrent.
    """
    if not params.is_eh:
        raise ModeError("battery occupancy is only defined when S2 harvests energy")
    if params.delta >= params.q2:
        raise StabilityError(
            f"battery chain not positive recurrent: delta={params.delta} >= q2={params.q2}")
    return params.delta / params.q2


def interference_weighted_success(params: SystemParams, probs: SuccessProbs) -> float:
    """Per-attempt success probability of S1 averaged over S2's activity.

    This is ``mu / q1``; its reciprocal times ``lam`` is the minimum stable ``q1``.
    """
    if params.is_eh:
        # fraction of slots S2 transmits: q2 * Pr(B != 0) == delta
        busy = battery_nonempty_prob(params) * params.q2
    else:
        busy = params.q2
    return probs.p1_solo * (1.0 - busy) + busy * probs.p1_joint


def service_rate(params: SystemParams, probs: SuccessProbs) -> float:
    """Average per-slot service probability ``mu`` of S1."""
    return params.q1 * interference_weighted_success(params, probs)


def geo_geo1_delay(lam: float, mu: float) -> float:
    """Mean packet delay ``(1 - lam)/(mu - lam) + 1/mu`` in slots, ``inf`` if unstable."""
    if not lam < mu:
        return math.inf
    return (1.0 - lam) / (mu - lam) + 1.0 / mu


def geo_geo1_sojourn(lam: float, mu: float) -> float:
    """Exact mean slots from arrival slot to departure slot inclusive.

    For the late-arrival Geo/Geo/1 chain the mean number in system at slot
    start is ``lam (1 - lam)/(mu - lam)``; Little's law gives the sojourn
    ``(1 - lam)/(mu - lam)``, plus the arrival slot itself. This is what the
    simulator measures and serves as a diagnostic next to :func:`geo_geo1_delay`.
    """
    if not lam < mu:
        return math.inf
    return (1.0 - lam) / (mu - lam) + 1.0


def queue_analysis(params: SystemParams, probs: SuccessProbs | None = None) -> QueueAnalysis:
    """Stability, occupancy, delay and throughput of the S1 queue.

    Stability is the strict inequality ``lam < mu``; equality counts as
    unstable. Unstable queues report an infinite delay rather than raising.
    """
    if probs is None:
        probs = success_probs(params)
    per_attempt = interference_weighted_success(params, probs)
    mu = params.q1 * per_attempt
    lam = params.lam
    stable = lam < mu
    q1_threshold = lam / per_attempt if per_attempt > 0 else math.inf
    if stable:
        return QueueAnalysis(mu=mu, stable=True, q1_threshold=q1_threshold,
                             prob_q_nonempty=lam / mu, delay=geo_geo1_delay(lam, mu),
                             throughput=lam)
    return QueueAnalysis(mu=mu, stable=False, q1_threshold=q1_threshold,
                         prob_q_nonempty=1.0, delay=math.inf, throughput=mu)
