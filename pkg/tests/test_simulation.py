import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ehmac import (ChannelMode, SimConfig, SystemParams, derive_seed, queue_analysis,
                   resolve_slot_outcomes, run, run_replication, success_probs)
from ehmac.simulation import Transmitter, aggregate, simulate_replication

SEED = 11


def test_seed_derivation_is_stable():
    assert derive_seed(1, 0) == derive_seed(1, 0)
    assert derive_seed(1, 0) != derive_seed(1, 1) != derive_seed(2, 1)
    assert 0 <= derive_seed(2 ** 64 - 1, 3) < 2 ** 64


@pytest.mark.parametrize("kw", [dict(horizon=0), dict(horizon=10, burn_in=10),
                                dict(replications=0), dict(base_seed=-1),
                                dict(channel_mode="awgn")])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        SimConfig(SystemParams(), **kw)


def test_default_burn_in():
    cfg = SimConfig(SystemParams(), horizon=1000)
    assert cfg.burn_in == 100 and cfg.window == 900


def test_resolve_slot_outcomes_bernoulli():
    probs = success_probs(SystemParams())
    rng = np.random.default_rng(0)
    n = 20000
    hits = sum(resolve_slot_outcomes({1, 2}, probs, "bernoulli", rng)[Transmitter.S1]
               for _ in range(n))
    assert abs(hits / n - probs.p1_joint) < 4 * math.sqrt(probs.p1_joint / n)
    assert resolve_slot_outcomes(set(), probs, "bernoulli", rng) == {}
    out = resolve_slot_outcomes([Transmitter.S2], probs, "bernoulli", rng)
    assert set(out) == {Transmitter.S2}


def test_resolve_slot_outcomes_sinr_needs_params():
    probs = success_probs(SystemParams())
    with pytest.raises(ValueError):
        resolve_slot_outcomes({1}, probs, "sinr", np.random.default_rng(0))
    out = resolve_slot_outcomes({1, 2}, probs, "sinr", np.random.default_rng(0), SystemParams())
    assert set(out) == {Transmitter.S1, Transmitter.S2}


def test_zero_arrivals_gives_no_delay_data():
    res = run(SimConfig(SystemParams(lam=0.0), horizon=20000, replications=2, base_seed=SEED))
    assert math.isnan(res.mean_delay.value)
    assert res.throughput.value == 0.0 and res.prob_q_nonempty.value == 0.0


def test_delta_zero_marks_divergence():
    res = run(SimConfig(SystemParams(delta=0.0), horizon=5000, base_seed=SEED))
    assert res.diverged and math.isnan(res.mean_aoi.value)


def test_grid_attempts_are_geometric():
    p = SystemParams(s2_power="grid", q2=0.4)
    res = run(SimConfig(p, horizon=200_000, replications=4, base_seed=SEED))
    assert res.mean_t.value == pytest.approx(1 / 0.4, rel=0.02)
    assert res.prob_b_nonempty.value == 1.0


def test_eh_attempt_rate_is_delta():
    p = SystemParams(delta=0.3, q2=0.8)
    res = run(SimConfig(p, horizon=200_000, replications=4, base_seed=SEED))
    assert res.mean_t.value == pytest.approx(1 / 0.3, rel=0.02)
    assert sum(res.t_histogram.values()) == pytest.approx(1.0)


def test_stable_service_rate_and_occupancy():
    p = SystemParams(lam=0.2)
    q = queue_analysis(p)
    res = run(SimConfig(p, horizon=200_000, replications=5, base_seed=SEED))
    assert abs(res.service_rate.value - q.mu) < 4 * res.service_rate.std_error + 1e-3
    assert abs(res.throughput.value - 0.2) < 0.01


def test_unstable_queue_serves_at_mu():
    p = SystemParams(lam=0.9)
    q = queue_analysis(p)
    res = run(SimConfig(p, horizon=200_000, replications=4, base_seed=SEED))
    assert res.prob_q_nonempty.value > 0.99
    assert res.throughput.value == pytest.approx(q.mu, rel=0.02)


def test_aggregate_is_order_independent():
    cfg = SimConfig(SystemParams(), horizon=20000, base_seed=SEED)
    reps = [simulate_replication(cfg, derive_seed(SEED, i)) for i in range(4)]
    assert aggregate(reps) == aggregate(reversed(reps))
    with pytest.raises(ValueError):
        aggregate([])


def test_run_replication_single():
    cfg = SimConfig(SystemParams(), horizon=20000)
    res = run_replication(cfg, 5)
    assert math.isnan(res.mean_aoi.ci_half_width) and len(res.replications) == 1


def test_final_state_consistent():
    cfg = SimConfig(SystemParams(lam=0.8), horizon=30000, base_seed=SEED)
    rep = simulate_replication(cfg, 3)
    st_ = rep.final_state
    assert st_.q_len == len(st_.arrival_slots)
    assert list(st_.arrival_slots) == sorted(st_.arrival_slots)
    assert rep.arrivals == rep.delivered + st_.q_len


@settings(max_examples=25, deadline=None)
@given(lam=st.floats(0.0, 1.0), q1=st.floats(0.05, 1.0), q2=st.floats(0.05, 1.0),
       frac=st.floats(0.0, 1.0), grid=st.booleans(), seed=st.integers(0, 2 ** 32),
       mode=st.sampled_from(list(ChannelMode)))
def test_invariants_any_point(lam, q1, q2, frac, grid, seed, mode):
    p = SystemParams(lam=lam, q1=q1, q2=q2, delta=frac, s2_power="grid" if grid else "eh")
    cfg = SimConfig(p, horizon=3000, burn_in=300, channel_mode=mode)
    rep = simulate_replication(cfg, seed, keep_trace=True)
    assert rep.arrivals == rep.delivered + rep.final_state.q_len
    assert rep.s2_successes <= rep.s2_attempts
    assert rep.q_nonempty_slots <= rep.window and rep.b_nonempty_slots <= rep.window
    assert rep.delay_count == 0 or rep.delay_sum >= rep.delay_count
    assert sum(rep.x_counts.values()) == max(0, len(rep.success_slots) - 1)
    assert set(rep.success_slots) <= set(rep.attempt_slots)
    if not grid:
        # each attempt spends one harvested unit
        assert rep.final_state.battery >= 0
    for (att, ok) in rep.channel_counts.values():
        assert 0 <= ok <= att


def test_silent_system_diverges():
    res = run(SimConfig(SystemParams(lam=0.0, delta=0.0), horizon=1000))
    assert res.throughput.value == 0.0 and res.t_histogram == {} and res.diverged


def test_every_slot_fresh_update_has_unit_age():
    p = SystemParams(lam=0.0, q2=1.0, theta1_db=-math.inf, theta2_db=-math.inf, s2_power="grid")
    assert run(SimConfig(p, horizon=10_000)).mean_aoi.value == 1.0


def test_grid_inter_attempt_histogram_is_geometric():
    res = run(SimConfig(SystemParams(s2_power="grid", q2=0.5), horizon=1_000_000))
    ks = set(res.t_histogram) | set(range(1, 40))
    tv = 0.5 * sum(abs(res.t_histogram.get(k, 0.0) - 0.5 ** k) for k in ks)
    assert tv < 0.01


def test_single_replication_matches_run():
    cfg = SimConfig(SystemParams(), horizon=20_000, base_seed=SEED)
    assert run(cfg) == run_replication(cfg, derive_seed(SEED, 0))
