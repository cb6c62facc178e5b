import math

import numpy as np
import pytest

from aoi_harq.errors import ParameterError
from aoi_harq.harq import HarqModel, ModelKind, TerminalChannel
from aoi_harq.bounds import Population
from aoi_harq.policies import (
    POLICY_IDS,
    Packet,
    age_index,
    default_randomized_weights,
    greedy_max_age,
    policy_code,
    rr_persistent,
    rr_type1,
    stationary_randomized,
)
from aoi_harq.sim import SimConfig, TerminalState, run

M1 = HarqModel(ModelKind.RECIPROCAL_DECAY)


def states_of(h_values, in_flight=()):
    states = [TerminalState(h=h) for h in h_values]
    for i in in_flight:
        states[i].in_flight = True
        states[i].r = 1
    return states


class FixedDraw:
    def __init__(self, u):
        self.u = u

    def random(self):
        return self.u


class TestRoundRobin:
    def test_idle_cursor_sends_new(self):
        act = rr_persistent(states_of([1, 1, 1, 1]), cursor=3)
        assert (act.terminal, act.packet) == (3, Packet.NEW)

    def test_in_flight_cursor_retransmits(self):
        states = states_of([4, 4, 4, 4], in_flight=(3,))
        states[3].r = 2
        act = rr_persistent(states, cursor=3)
        assert (act.terminal, act.packet) == (3, Packet.OLD)

    def test_type1_always_sends_new(self):
        states = states_of([4, 4], in_flight=(1,))
        act = rr_type1(states, cursor=1)
        assert (act.terminal, act.packet) == (1, Packet.NEW)

    def test_cursor_wraps_after_last_terminal_delivers(self):
        # perfect channels: each slot delivers and the cursor cycles
        pop = Population(M1, tuple(TerminalChannel(0.0) for _ in range(3)))
        result = run(SimConfig(pop, "rrp", horizon=9, seed=1))
        assert list(result.deliveries) == [3, 3, 3]

    def test_type1_matches_persistent_on_perfect_channels(self):
        pop = Population(M1, tuple(TerminalChannel(0.0) for _ in range(4)))
        a = run(SimConfig(pop, "rrp", horizon=1000, seed=5))
        b = run(SimConfig(pop, "rr1", horizon=1000, seed=5))
        assert a.avg_aoi == b.avg_aoi
        assert np.array_equal(a.deliveries, b.deliveries)


class TestGreedy:
    def test_picks_first_maximum(self):
        act = greedy_max_age(states_of([3, 5, 5]))
        assert (act.terminal, act.packet) == (1, Packet.NEW)

    def test_initial_tie_goes_to_first(self):
        assert greedy_max_age(states_of([1, 1])).terminal == 0

    def test_cycles_like_round_robin_on_symmetric_perfect_channels(self):
        # warmup=1 skips the start-up slot; after it the ages alternate in
        # the steady pattern (1,2,3) whose mean is exactly 2
        pop = Population(M1, tuple(TerminalChannel(0.0) for _ in range(3)))
        greedy = run(SimConfig(pop, "greedy", horizon=901, seed=2, warmup=1))
        rrp = run(SimConfig(pop, "rrp", horizon=901, seed=2, warmup=1))
        assert greedy.avg_aoi == rrp.avg_aoi == 2.0
        assert np.array_equal(greedy.deliveries, rrp.deliveries)


class TestStationaryRandomized:
    def test_degenerate_weights_pin_terminal(self):
        states = states_of([1, 1])
        for u in (0.0, 0.5, 0.999999):
            act = stationary_randomized(states, [1.0, 0.0], FixedDraw(u))
            assert act.terminal == 0

    def test_persists_on_in_flight_packet(self):
        states = states_of([2, 2], in_flight=(0,))
        act = stationary_randomized(states, [1.0, 0.0], FixedDraw(0.3))
        assert act.packet is Packet.OLD

    def test_invalid_weights_rejected(self):
        states = states_of([1, 1])
        with pytest.raises(ParameterError):
            stationary_randomized(states, [0.5], FixedDraw(0.1))
        with pytest.raises(ParameterError):
            stationary_randomized(states, [-0.1, 1.1], FixedDraw(0.1))
        with pytest.raises(ParameterError):
            stationary_randomized(states, [0.0, 0.0], FixedDraw(0.1))

    def test_uniform_weights_balance_attempts(self):
        pop = Population(M1, (TerminalChannel(0.0), TerminalChannel(0.0)))
        result = run(
            SimConfig(pop, "rand", horizon=1_000_000, seed=3, weights=(1.0, 1.0))
        )
        share = result.attempts[0] / result.attempts.sum()
        sigma = math.sqrt(0.25 / 1_000_000)
        assert abs(share - 0.5) <= 3 * sigma

    def test_default_weights_track_root_mean_attempts(self):
        # attempt shares follow the sqrt(E[K]) weights regardless of HARQ
        # state, since the sampled terminal transmits every slot
        pop = Population(M1, tuple(TerminalChannel(p) for p in (0.25, 0.5, 0.75, 1.0)))
        from aoi_harq.moments import moment_set

        weights = default_randomized_weights(
            [moment_set(M1, ch).ek for ch in pop.channels]
        )
        horizon = 1_000_000
        result = run(SimConfig(pop, "rand", horizon=horizon, seed=4))
        for i, w in enumerate(weights):
            sigma = math.sqrt(w * (1 - w) / horizon)
            assert abs(result.attempts[i] / horizon - w) <= 3 * sigma


class TestAgeIndex:
    def test_reduces_to_greedy_for_homogeneous_moments(self):
        states = states_of([3, 9, 9, 2])
        assert age_index(states, [2.0] * 4).terminal == greedy_max_age(states).terminal

    def test_scales_age_by_root_mean_attempts(self):
        act = age_index(states_of([10, 2]), [4.0, 1.0])  # scores 5 vs 2
        assert (act.terminal, act.packet) == (0, Packet.NEW)

    def test_invariant_under_common_scaling(self):
        states = states_of([7, 5, 11])
        moments = [1.3, 2.9, 4.4]
        base = age_index(states, moments).terminal
        assert age_index(states, [17.0 * m for m in moments]).terminal == base

    def test_persists_on_in_flight_packet(self):
        states = states_of([1, 50], in_flight=(0,))
        act = age_index(states, [1.0, 1.0])
        assert (act.terminal, act.packet) == (0, Packet.OLD)


class TestLegalityAndErgodicity:
    def test_policy_codes_are_stable(self):
        assert POLICY_IDS == ("rrp", "rr1", "greedy", "rand", "index")
        assert [policy_code(p) for p in POLICY_IDS] == [0, 1, 2, 3, 4]
        with pytest.raises(ParameterError):
            policy_code("fifo")

    def test_old_actions_only_with_packet_in_flight(self):
        states = states_of([3, 1, 2], in_flight=(1,))
        for act in (
            rr_persistent(states, 0),
            rr_type1(states, 2),
            greedy_max_age(states),
            stationary_randomized(states, [1, 1, 1], FixedDraw(0.9)),
            age_index(states, [1.0, 1.0, 1.0]),
        ):
            if act.packet is Packet.OLD:
                assert states[act.terminal].in_flight

    def test_round_robin_renewal_structure(self):
        # between consecutive deliveries of any terminal, every other
        # terminal delivers exactly once
        from aoi_harq.policies import rr_persistent as policy
        from aoi_harq.rng import trial_uniform
        from aoi_harq.sim import step

        pop = Population(M1, tuple(TerminalChannel(p) for p in (0.3, 0.6, 0.9, 1.0)))
        states = [TerminalState() for _ in pop.channels]
        cursor = 0
        order = []
        for t in range(1, 4000):
            act = policy(states, cursor)
            delivered = step(
                states,
                act,
                pop.model,
                pop.channels,
                FixedDraw(trial_uniform(11, act.terminal, t)),
            )
            if delivered is not None:
                order.append(delivered)
                cursor = (delivered + 1) % pop.n
        n = pop.n
        for i in range(len(order) - n):
            window = order[i : i + n + 1]
            assert window[0] == window[-1]
            assert sorted(window[:n]) == list(range(n))

    def test_no_terminal_starves_when_p0_below_one(self):
        # delivery counts grow in every window for every policy
        pop = Population(M1, tuple(TerminalChannel(p) for p in (0.2, 0.5, 0.8, 0.95)))
        for policy in POLICY_IDS:
            half = run(SimConfig(pop, policy, horizon=100_000, seed=6))
            full = run(SimConfig(pop, policy, horizon=200_000, seed=6))
            first_window = half.deliveries
            second_window = full.deliveries - half.deliveries
            assert (first_window > 0).all(), policy
            assert (second_window > 0).all(), policy
