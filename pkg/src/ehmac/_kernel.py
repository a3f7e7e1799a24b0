"""Compiled slot loop. Everything here is internal to :mod:`ehmac.simulation`."""

import math

import numpy as np
from numba import njit

# uniform draw columns, one row per slot
U_S1_COIN, U_S2_COIN, U_CH1, U_CH2, U_ARRIVAL, U_ENERGY = range(6)
N_UNIFORMS = 6

MODE_BERNOULLI = 0
MODE_SINR = 1

# state vector
ST_HEAD, ST_TAIL, ST_BATTERY, ST_LAST_SUCCESS, ST_N_ATT, ST_N_SUCC, ST_ANCHOR = range(7)
N_STATE = 7

# counters; "window" means slots at or after burn-in
(C_ARRIVALS, C_DELIVERED, C_DELAY_SUM, C_DELAY_COUNT, C_AOI_SUM, C_AOI_COUNT,
 C_Q_NONEMPTY, C_B_NONEMPTY, C_S1_DEPARTURES, C_S2_ATTEMPTS, C_S2_SUCCESSES,
 C_S1_SOLO_ATT, C_S1_SOLO_OK, C_S1_JOINT_ATT, C_S1_JOINT_OK,
 C_S2_SOLO_ATT, C_S2_SOLO_OK, C_S2_JOINT_ATT, C_S2_JOINT_OK) = range(19)
N_COUNTERS = 19

NO_SLOT = -1


@njit(cache=True)
def resolve(a1, a2, u1, u2, mode, p1_solo, p1_joint, p2_solo, p2_joint,
            snr1, snr2, theta1, theta2):
    """Decoding outcome of S1 and S2 for one slot.

    Bernoulli mode thresholds the uniforms against the success probabilities;
    SINR mode turns them into unit-mean exponential fading gains and compares
    ``snr_i g_i`` with ``theta_i (1 + interference)``.
    """
    ok1 = False
    ok2 = False
    if mode == MODE_BERNOULLI:
        if a1:
            ok1 = u1 < (p1_joint if a2 else p1_solo)
        if a2:
            ok2 = u2 < (p2_joint if a1 else p2_solo)
    else:
        g1 = -math.log1p(-u1)
        g2 = -math.log1p(-u2)
        if a1:
            interference = snr2 * g2 if a2 else 0.0
            ok1 = snr1 * g1 >= theta1 * (1.0 + interference)
        if a2:
            interference = snr1 * g1 if a1 else 0.0
            ok2 = snr2 * g2 >= theta2 * (1.0 + interference)
    return ok1, ok2


@njit(cache=True)
def advance(u, first_slot, burn_in, lam, q1, q2, delta, eh, mode,
            p1_solo, p1_joint, p2_solo, p2_joint, snr1, snr2, theta1, theta2,
            state, fifo, counters, attempt_slots, success_slots):
    """Run ``len(u)`` slots starting at slot index ``first_slot``.

    Per slot: record occupancy and age, S1 attempts if its queue is non-empty,
    S2 attempts if it has energy (spending one unit), outcomes resolve and are
    acknowledged at once, then data and energy arrive (usable next slot).
    """
    head = state[ST_HEAD]
    tail = state[ST_TAIL]
    battery = state[ST_BATTERY]
    last_success = state[ST_LAST_SUCCESS]
    n_att = state[ST_N_ATT]
    n_succ = state[ST_N_SUCC]
    for i in range(u.shape[0]):
        n = first_slot + i
        in_window = n >= burn_in
        if n == burn_in:
            state[ST_ANCHOR] = last_success
        q_len = tail - head
        has_energy = battery > 0 or not eh
        if in_window:
            if q_len > 0:
                counters[C_Q_NONEMPTY] += 1
            if has_energy:
                counters[C_B_NONEMPTY] += 1
            if last_success != NO_SLOT:
                counters[C_AOI_SUM] += n - last_success
                counters[C_AOI_COUNT] += 1

        a1 = q_len > 0 and u[i, U_S1_COIN] < q1
        a2 = has_energy and u[i, U_S2_COIN] < q2
        if a2 and eh:
            battery -= 1
        ok1, ok2 = resolve(a1, a2, u[i, U_CH1], u[i, U_CH2], mode,
                           p1_solo, p1_joint, p2_solo, p2_joint,
                           snr1, snr2, theta1, theta2)
        if ok1:
            if in_window:
                counters[C_DELAY_SUM] += n - fifo[head] + 1
                counters[C_DELAY_COUNT] += 1
                counters[C_S1_DEPARTURES] += 1
            head += 1
            counters[C_DELIVERED] += 1
        if ok2:
            last_success = n
        if in_window:
            if a1:
                if a2:
                    counters[C_S1_JOINT_ATT] += 1
                    counters[C_S1_JOINT_OK] += ok1
                else:
                    counters[C_S1_SOLO_ATT] += 1
                    counters[C_S1_SOLO_OK] += ok1
            if a2:
                counters[C_S2_ATTEMPTS] += 1
                attempt_slots[n_att] = n
                n_att += 1
                if a1:
                    counters[C_S2_JOINT_ATT] += 1
                    counters[C_S2_JOINT_OK] += ok2
                else:
                    counters[C_S2_SOLO_ATT] += 1
                    counters[C_S2_SOLO_OK] += ok2
                if ok2:
                    counters[C_S2_SUCCESSES] += 1
                    success_slots[n_succ] = n
                    n_succ += 1

        if u[i, U_ARRIVAL] < lam:
            fifo[tail] = n
            tail += 1
            counters[C_ARRIVALS] += 1
        if eh and u[i, U_ENERGY] < delta:
            battery += 1
    state[ST_HEAD] = head
    state[ST_TAIL] = tail
    state[ST_BATTERY] = battery
    state[ST_LAST_SUCCESS] = last_success
    state[ST_N_ATT] = n_att
    state[ST_N_SUCC] = n_succ


def new_buffers(horizon, burn_in):
    state = np.zeros(N_STATE, dtype=np.int64)
    state[ST_LAST_SUCCESS] = NO_SLOT
    state[ST_ANCHOR] = NO_SLOT
    window = horizon - burn_in
    return (state,
            np.empty(horizon, dtype=np.int64),
            np.zeros(N_COUNTERS, dtype=np.int64),
            np.empty(window, dtype=np.int64),
            np.empty(window, dtype=np.int64))
