"""Average Age of Information of the sensor S2.

The pipeline is::

    pbar2 -> Pr(T = k) -> E[T], E[T^2] -> E[X], E[X^2] -> average AoI

``T`` is the gap between consecutive attempts of S2 and ``X`` the gap between
consecutive successful deliveries. Moments of ``T`` come from one of two
sources:

``MomentSource.PMF_DERIVED``
    Moments of the stated inter-attempt PMF, obtained by truncated numeric
    summation (the value returned) and cross-checked against a closed form
    built from the power-series identities ``sum k r^k = r/(1-r)^2`` and
    ``sum k^2 r^k = r(1+r)/(1-r)^3``.
``MomentSource.PAPER_VERBATIM``
    The published closed-form moment expressions, evaluated exactly as printed.
    They do not agree with the PMF and are kept for auditing only.

In the energy-harvesting case the stated PMF carries less than unit mass
(see :func:`pmf_t_total_mass`); nothing here renormalizes it.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .exceptions import DomainError, TruncationError
from .model import (QueueAnalysis, SuccessProbs, battery_nonempty_prob,
                    interference_weighted_success, queue_analysis, success_probs)
from .params import SystemParams

#: relative agreement required between the closed form and the summation
ORACLE_RTOL = 1e-9


class MomentSource(str, enum.Enum):
    PMF_DERIVED = "pmf"
    PAPER_VERBATIM = "paper"


@dataclass(frozen=True)
class PmfTruncation:
    """Stopping rule for infinite sums over ``k``."""

    tail_tolerance: float = 1e-12
    k_max: int = 100_000

    def __post_init__(self):
        if not self.tail_tolerance > 0:
            raise ValueError(f"tail_tolerance must be > 0, got {self.tail_tolerance!r}")
        if int(self.k_max) < 1:
            raise ValueError(f"k_max must be >= 1, got {self.k_max!r}")


DEFAULT_TRUNCATION = PmfTruncation()


@dataclass(frozen=True)
class AoiAnalysis:
    pbar2: float
    mean_t: float
    second_moment_t: float
    mean_x: float
    second_moment_x: float
    aoi: float
    moment_source: MomentSource


def pbar2(params: SystemParams, probs: SuccessProbs | None = None,
          queue: QueueAnalysis | None = None) -> float:
    """Success probability of an S2 attempt, averaged over S1's activity.

    With a stable S1 queue ``Pr(Q != 0) = lam/mu`` and ``q1`` cancels, leaving
    ``p22 - lam (p22 - p212) / (mu / q1)``. With an unstable queue S1 always
    has a packet and transmits with probability ``q1``.
    """
    if probs is None:
        probs = success_probs(params)
    if queue is None:
        queue = queue_analysis(params, probs)
    if queue.stable:
        denominator = interference_weighted_success(params, probs)
        return probs.p2_solo - params.lam * (probs.p2_solo - probs.p2_joint) / denominator
    return probs.p2_solo * (1.0 - params.q1) + probs.p2_joint * params.q1


# -- inter-attempt time PMF ------------------------------------------------------------

def _battery_weight(params: SystemParams) -> float:
    """``Pr(B != 0)``; a grid-powered S2 always has energy."""
    return battery_nonempty_prob(params) if params.is_eh else 1.0


def _pmf_value(delta: float, q2: float, pb: float, k: int) -> float:
    geometric = (1.0 - q2) ** (k - 1) * q2
    if pb == 1.0:
        return geometric
    charging = math.fsum((1.0 - delta) ** (k - l) * delta ** l * (1.0 - q2) ** (l - 1) * q2
                         for l in range(1, k + 1))
    return (1.0 - pb) * charging + pb * geometric


def pmf_t(params: SystemParams, k: int) -> float:
    """``Pr(T = k)`` evaluated term by term from its defining double sum."""
    if int(k) != k or k < 1:
        raise ValueError(f"k must be a positive integer, got {k!r}")
    return _pmf_value(params.delta, params.q2, _battery_weight(params), int(k))


def _power_tail(r: float, k: int, power: int) -> float:
    """Exact ``sum_{j > k} j**power * r**j`` for ``0 <= r < 1``."""
    if r <= 0.0:
        return 0.0
    head = r ** (k + 1)
    if head == 0.0:
        return 0.0
    n = k + 1
    one = 1.0 - r
    if power == 0:
        return head / one
    if power == 1:
        return head * (n / one + r / one ** 2)
    return head * (n * n / one + 2.0 * n * r / one ** 2 + r * (1.0 + r) / one ** 3)


def _tail_bound(delta: float, q2: float, pb: float, k: int, power: int) -> float:
    """Upper bound on ``sum_{j > k} j**power Pr(T = j)`` from geometric envelopes.

    The charging sum is at most ``q2 delta (1-delta)^j / (1 - delta (2 - q2))``
    and the second component is an exact geometric tail.
    """
    bound = 0.0
    if pb < 1.0 and delta > 0.0:
        envelope = q2 * delta / (1.0 - delta * (2.0 - q2))
        bound += (1.0 - pb) * envelope * _power_tail(1.0 - delta, k, power)
    if pb > 0.0 and q2 < 1.0:
        bound += pb * q2 / (1.0 - q2) * _power_tail(1.0 - q2, k, power)
    return bound


def _summed_moments(delta: float, q2: float, pb: float, trunc: PmfTruncation,
                    power: int) -> tuple[list[float], float]:
    """Truncated sums ``sum_k k**j Pr(T=k)`` for ``j = 0..power``.

    The charging sum is advanced with the recurrence
    ``S_k = (1 - delta) S_{k-1} + delta^k (1-q2)^(k-1) q2``, which follows
    directly from its definition. Returns the sums and the tail bound at the
    stopping point.
    """
    terms: list[list[float]] = [[] for _ in range(power + 1)]
    charging = 0.0
    energy_term = q2  # delta^k (1-q2)^(k-1) q2 without the delta^k factor
    delta_pow = 1.0
    geometric = q2
    check_every = 32
    k = 0
    tail = math.inf
    while k < trunc.k_max:
        k += 1
        delta_pow *= delta
        charging = (1.0 - delta) * charging + delta_pow * energy_term
        energy_term *= 1.0 - q2
        value = (1.0 - pb) * charging + pb * geometric
        geometric *= 1.0 - q2
        kp = 1.0
        for j in range(power + 1):
            terms[j].append(kp * value)
            kp *= k
        if k % check_every == 0 or k == trunc.k_max:
            tail = _tail_bound(delta, q2, pb, k, power)
            if tail <= trunc.tail_tolerance:
                break
    if tail > trunc.tail_tolerance:
        raise TruncationError(
            f"tail bound {tail:.3e} exceeds {trunc.tail_tolerance:.1e} at k_max={trunc.k_max}")
    return [math.fsum(t) for t in terms], tail


def pmf_t_total_mass(params: SystemParams, trunc: PmfTruncation = DEFAULT_TRUNCATION) -> float:
    """Total probability mass of the inter-attempt PMF.

    Truncated sum plus the analytic tail bound. Unity for a grid-powered S2;
    strictly below one in the energy-harvesting case.
    """
    pb = _battery_weight(params)
    (mass,), tail = _summed_moments(params.delta, params.q2, pb, trunc, 0)
    return mass + tail


def _series(r: float, power: int) -> float:
    """``sum_{k>=1} k**power r**k``."""
    if power == 0:
        return r / (1.0 - r)
    if power == 1:
        return r / (1.0 - r) ** 2
    return r * (1.0 + r) / (1.0 - r) ** 3


def closed_form_moments(delta: float, q2: float, pb: float) -> tuple[float, float, float]:
    """Mass, first and second moment of the PMF in closed form.

    Writing ``x = 1 - delta`` and ``y = delta (1 - q2)`` the charging sum
    collapses to ``q2 delta (x^k - y^k) / (x - y)`` with
    ``x - y = 1 - delta (2 - q2) > 0`` whenever ``delta < q2``.
    """
    geometric = (1.0, 1.0 / q2, (2.0 - q2) / q2 ** 2)
    if pb == 1.0 or delta == 0.0:
        return tuple(pb * g for g in geometric)
    x = 1.0 - delta
    y = delta * (1.0 - q2)
    scale = q2 * delta / (x - y)
    return tuple((1.0 - pb) * scale * (_series(x, j) - _series(y, j)) + pb * geometric[j]
                 for j in range(3))


def _paper_moments(delta: float, q2: float, trunc: PmfTruncation) -> tuple[float, float]:
    """Published closed forms for the energy-harvesting case, as printed.

    ``(q2 - delta)/(1 - q2) * A`` is folded into ``(q2 - delta) delta/(1 - delta)``
    (an identity) so that ``q2 = 1`` does not divide zero by zero.
    """
    x = 1.0 - delta
    a = delta * (1.0 - q2) / x
    lead = (q2 - delta) * delta / x  # (q2 - delta)/(1 - q2) * A
    mean_t = (lead * (1.0 - a * x ** 2) * x / (delta ** 2 * (1.0 + a * x ** 2))
              + delta / q2)
    weighted_sum = _paper_square_sum(delta, a, trunc)
    second_t = lead / (1.0 - a) * weighted_sum + delta * (2.0 - q2) / q2 ** 3
    return mean_t, second_t


def _paper_square_sum(delta: float, a: float, trunc: PmfTruncation) -> float:
    """``sum_k k^2 (1-delta)^k (1 - A^k)`` by direct summation."""
    x = 1.0 - delta
    terms = []
    xk = 1.0
    ak = 1.0
    for k in range(1, trunc.k_max + 1):
        xk *= x
        ak *= a
        terms.append(k * k * xk * (1.0 - ak))
        if k % 32 == 0 and _power_tail(x, k, 2) <= trunc.tail_tolerance:
            return math.fsum(terms)
    if _power_tail(x, trunc.k_max, 2) > trunc.tail_tolerance:
        raise TruncationError(f"series did not converge within k_max={trunc.k_max}")
    return math.fsum(terms)


def paper_square_sum_closed_form(delta: float, a: float) -> float:
    """Closed form of ``sum_k k^2 (1-delta)^k (1 - A^k)``."""
    x = 1.0 - delta
    return _series(x, 2) - _series(x * a, 2)


def moments_t(params: SystemParams, source: MomentSource | str = MomentSource.PMF_DERIVED,
              trunc: PmfTruncation = DEFAULT_TRUNCATION) -> tuple[float, float]:
    """``(E[T], E[T^2])`` of the inter-attempt time from the requested source.

    For the PMF-derived source the summed value is returned after checking it
    against :func:`closed_form_moments` to ``ORACLE_RTOL``. A grid-powered S2
    has geometric ``T`` and both sources coincide.

    Raises
    ------
    StabilityError
        Energy harvesting with ``delta >= q2``.
    DomainError
        Energy harvesting with ``delta == 0`` (the sums diverge).
    """
    source = MomentSource(source)
    q2 = params.q2
    if not params.is_eh:
        if source is MomentSource.PAPER_VERBATIM:
            return 1.0 / q2, (2.0 - q2) / q2 ** 2
        pb = 1.0
    else:
        pb = battery_nonempty_prob(params)
        if params.delta == 0.0:
            raise DomainError("inter-attempt moments diverge when delta == 0")
        if source is MomentSource.PAPER_VERBATIM:
            return _paper_moments(params.delta, q2, trunc)
    (_, m1, m2), _ = _summed_moments(params.delta, q2, pb, trunc, 2)
    _, c1, c2 = closed_form_moments(params.delta, q2, pb)
    for name, summed, closed in (("E[T]", m1, c1), ("E[T^2]", m2, c2)):
        if not math.isclose(summed, closed, rel_tol=ORACLE_RTOL):
            raise ArithmeticError(
                f"{name}: summation {summed!r} disagrees with closed form {closed!r}")
    return m1, m2


def moments_x(mean_t: float, second_moment_t: float, pbar2: float) -> tuple[float, float]:
    """``(E[X], E[X^2])`` for ``X`` a geometric(pbar2) sum of i.i.d. ``T`` draws."""
    if not pbar2 > 0:
        raise DomainError(f"pbar2 must be > 0, got {pbar2!r}")
    mean_x = mean_t / pbar2
    second_x = second_moment_t / pbar2 + mean_t ** 2 * 2.0 * (1.0 - pbar2) / pbar2 ** 2
    return mean_x, second_x


def average_aoi(mean_t: float, second_moment_t: float, pbar2: float) -> float:
    """``E[T^2]/(2E[T]) + E[T](1 - pbar2)/pbar2 + 1/2``."""
    if not pbar2 > 0:
        raise DomainError(f"pbar2 must be > 0, got {pbar2!r}")
    return second_moment_t / (2.0 * mean_t) + mean_t * (1.0 - pbar2) / pbar2 + 0.5


def aoi_average(params: SystemParams, probs: SuccessProbs | None = None,
                queue: QueueAnalysis | None = None,
                source: MomentSource | str = MomentSource.PMF_DERIVED,
                trunc: PmfTruncation = DEFAULT_TRUNCATION) -> AoiAnalysis:
    """Average AoI of S2 using the moments from ``source``.

    For a grid-powered S2 the result is additionally checked against
    ``1/(q2 pbar2)``.
    """
    source = MomentSource(source)
    if probs is None:
        probs = success_probs(params)
    if queue is None:
        queue = queue_analysis(params, probs)
    p = pbar2(params, probs, queue)
    if not p > 0:
        raise DomainError(f"S2 never succeeds (pbar2={p!r}); AoI is unbounded")
    mean_t, second_t = moments_t(params, source, trunc)
    mean_x, second_x = moments_x(mean_t, second_t, p)
    aoi = average_aoi(mean_t, second_t, p)
    if not params.is_eh:
        expected = 1.0 / (params.q2 * p)
        if not math.isclose(aoi, expected, rel_tol=ORACLE_RTOL):
            raise ArithmeticError(f"grid AoI {aoi!r} != 1/(q2 pbar2) = {expected!r}")
    return AoiAnalysis(pbar2=p, mean_t=mean_t, second_moment_t=second_t, mean_x=mean_x,
                       second_moment_x=second_x, aoi=aoi, moment_source=source)


def aoi_both(params: SystemParams, probs: SuccessProbs | None = None,
             queue: QueueAnalysis | None = None,
             trunc: PmfTruncation = DEFAULT_TRUNCATION) -> dict[MomentSource, AoiAnalysis]:
    """AoI under both moment sources, keyed by source; never merged."""
    return {src: aoi_average(params, probs, queue, src, trunc) for src in MomentSource}
