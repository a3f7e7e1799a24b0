import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ehmac import (ModeError, StabilityError, SystemParams, battery_nonempty_prob,
                   queue_analysis, service_rate, success_probs)
from ehmac.model import geo_geo1_delay, geo_geo1_sojourn

probability = st.floats(0.01, 1.0)
db = st.floats(-10.0, 25.0)


def oracle(p):
    """High-precision evaluation straight from the definitions."""
    mpmath.mp.dps = 40
    lin = lambda x: mpmath.mpf(10) ** (mpmath.mpf(x) / 10)
    g1, g2, t1, t2 = lin(p.snr1_db), lin(p.snr2_db), lin(p.theta1_db), lin(p.theta2_db)
    p1s, p2s = mpmath.exp(-t1 / g1), mpmath.exp(-t2 / g2)
    p1j, p2j = p1s / (1 + t1 * g2 / g1), p2s / (1 + t2 * g1 / g2)
    busy = mpmath.mpf(p.delta) if p.is_eh else mpmath.mpf(p.q2)
    mu = p.q1 * ((1 - busy) * p1s + busy * p1j)
    lam = mpmath.mpf(p.lam)
    delay = (1 - lam) / (mu - lam) + 1 / mu if lam < mu else mpmath.inf
    return dict(p1s=p1s, p2s=p2s, p1j=p1j, p2j=p2j, mu=mu, delay=delay)


@pytest.mark.parametrize("params", [
    SystemParams(),
    SystemParams(theta1_db=5, theta2_db=5, lam=0.1, q1=1.0, delta=0.5),
    SystemParams(s2_power="grid", q2=0.3, lam=0.2, q1=0.8),
    SystemParams(snr1_db=3, snr2_db=20, theta1_db=-3, theta2_db=7, lam=0.05, q2=0.9, delta=0.1),
])
def test_against_high_precision_oracle(params):
    ref = oracle(params)
    probs = success_probs(params)
    q = queue_analysis(params, probs)
    for name, got in [("p1s", probs.p1_solo), ("p2s", probs.p2_solo), ("p1j", probs.p1_joint),
                      ("p2j", probs.p2_joint), ("mu", q.mu), ("delay", q.delay)]:
        assert got == pytest.approx(float(ref[name]), rel=1e-12), name


def test_neg_inf_threshold_always_decodes():
    probs = success_probs(SystemParams(theta1_db=-math.inf, theta2_db=-math.inf))
    assert probs.p1_solo == probs.p1_joint == probs.p2_solo == probs.p2_joint == 1.0


def test_battery_probability():
    assert battery_nonempty_prob(SystemParams(delta=0.3, q2=0.8)) == pytest.approx(0.375)
    with pytest.raises(StabilityError):
        battery_nonempty_prob(SystemParams(delta=0.8, q2=0.8))
    with pytest.raises(ModeError):
        battery_nonempty_prob(SystemParams(s2_power="grid"))


def test_unstable_queue():
    q = queue_analysis(SystemParams(lam=0.9))
    assert not q.stable and q.delay == math.inf and q.prob_q_nonempty == 1.0
    assert q.throughput == q.mu


def test_stability_is_strict():
    p = SystemParams(lam=0.2)
    mu = queue_analysis(p).mu
    assert not queue_analysis(p.with_(lam=mu)).stable


def test_grid_threshold_uses_q2_weighting():
    p = SystemParams(s2_power="grid", q2=0.5, lam=0.2)
    probs = success_probs(p)
    expected = 0.2 / (0.5 * probs.p1_solo + 0.5 * probs.p1_joint)
    assert queue_analysis(p).q1_threshold == pytest.approx(expected)


def test_geo_geo1_forms():
    assert geo_geo1_delay(0.01, 1.0) == pytest.approx(2.0)
    assert geo_geo1_sojourn(0.01, 1.0) == pytest.approx(2.0)
    assert geo_geo1_delay(0.5, 0.5) == math.inf


@settings(max_examples=200, deadline=None)
@given(snr1=db, snr2=db, t1=db, t2=db)
def test_probabilities_ordered(snr1, snr2, t1, t2):
    s = success_probs(SystemParams(snr1_db=snr1, snr2_db=snr2, theta1_db=t1, theta2_db=t2))
    for solo, joint in [(s.p1_solo, s.p1_joint), (s.p2_solo, s.p2_joint)]:
        assert 0.0 <= joint <= solo <= 1.0


@settings(max_examples=200, deadline=None)
@given(lam=st.floats(0.0, 1.0), q1=probability, q2=probability, delta=st.floats(0.0, 1.0),
       grid=st.booleans())
def test_queue_invariants(lam, q1, q2, delta, grid):
    p = SystemParams(lam=lam, q1=q1, q2=q2, delta=delta * q2 * 0.999,
                     s2_power="grid" if grid else "eh")
    probs = success_probs(p)
    q = queue_analysis(p, probs)
    assert 0.0 <= q.mu <= q1 * probs.p1_solo + 1e-15
    assert q.stable == (lam < q.mu)
    assert q.throughput == pytest.approx(min(lam, q.mu))
    assert 0.0 <= q.prob_q_nonempty <= 1.0
    if q.stable:
        assert q.delay >= 1.0 / q.mu
        # stability in q1 matches the threshold form
        assert (q1 > q.q1_threshold) == q.stable or math.isclose(q1, q.q1_threshold)


@settings(max_examples=100, deadline=None)
@given(lam=st.floats(0.01, 0.3), q1=probability)
def test_delay_increases_with_load(lam, q1):
    p = SystemParams(lam=lam, q1=q1)
    q = queue_analysis(p)
    q2 = queue_analysis(p.with_(lam=lam * 1.01))
    if q2.stable:
        assert q2.delay > q.delay


@settings(max_examples=100, deadline=None)
@given(q1=probability, frac=st.floats(0.0, 0.9), q2=probability)
def test_service_rate_decreases_with_interference(q1, frac, q2):
    p = SystemParams(q1=q1, delta=frac * q2, q2=q2)
    probs = success_probs(p)
    busier = p.with_(delta=(frac + 0.09) * q2)
    assert service_rate(busier, probs) <= service_rate(p, probs) + 1e-15


def test_saturated_battery_rejected():
    with pytest.raises(StabilityError):
        queue_analysis(SystemParams(delta=1.0, q2=1.0))
