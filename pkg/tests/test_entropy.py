"""Distance averages, entropy-rate bounds and the block-entropy oracle.

Golden values below were cross-validated against independent Monte Carlo
oracles (1e7 uniform point pairs, seed 777) during development; the recorded
quadrature/MC z-scores were all below 1.5.
"""

import math

import numpy as np
import pytest

from netentropy import channel, entropy, geometry
from netentropy.channel import ChannelParams, LinkState
from netentropy.entropy import (
    averaged_edge_probability,
    averaged_transition_probability,
    binary_entropy_terms,
    block_entropy_oracle,
    block_entropy_profile,
    conditional_entropy_diagnostics,
    conditional_entropy_given_distance,
    conditional_entropy_unconditioned,
    entropy_rate_bounds,
)
from netentropy.quadrature import QuadratureError, QuadratureSpec

SQ = geometry.SQUARE

# square, r0=0.7, eta=2, nu=500 Hz, B=12 MBd
GOLDEN_P_ON = 0.578500933754          # MC 0.5786023 +- 8.1e-05
GOLDEN_P10_BAR = 7.779580933899e-05   # MC 7.777928e-05 +- 1.2e-08
GOLDEN_P01_BAR = 1.843611145986e-04   # MC 1.844040e-04 +- 1.8e-07
GOLDEN_LOWER = 1.061613528990e-03     # MC 1.061580e-03 +- 8.7e-08
GOLDEN_UPPER = 1.755324341892e-03
GOLDEN_H2 = 1.0817791269e-03

FROZEN = ChannelParams(r0=0.7, eta=2.0, nu=0.0, B=12e6)


class TestBinaryEntropyTerms:
    def test_uniform(self):
        assert binary_entropy_terms([0.5, 0.5]) == 1.0

    def test_degenerate(self):
        assert binary_entropy_terms([1.0]) == 0.0
        assert binary_entropy_terms([0.0]) == 0.0

    def test_hand_value(self):
        assert binary_entropy_terms([0.25, 0.75]) == pytest.approx(0.811278, abs=1e-6)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            binary_entropy_terms([1.1])
        with pytest.raises(ValueError):
            binary_entropy_terms([-0.2, 0.5])


class TestAveragedEdgeProbability:
    def test_everything_connected_limit(self):
        D = SQ.diameter
        params = ChannelParams(r0=1e3 * D, eta=2.0, nu=0.0, B=12e6)
        assert averaged_edge_probability(SQ, params) == pytest.approx(1.0, abs=1e-5)

    def test_nothing_connected_limit(self):
        D = SQ.diameter
        params = ChannelParams(r0=1e-3 * D, eta=2.0, nu=0.0, B=12e6)
        assert averaged_edge_probability(SQ, params) == pytest.approx(0.0, abs=1e-4)

    def test_golden_value(self, paper_params):
        assert averaged_edge_probability(SQ, paper_params) == pytest.approx(
            GOLDEN_P_ON, abs=1e-9)

    def test_matches_monte_carlo(self, paper_params, rng):
        n = 1_000_000
        d = geometry.sample_distance(SQ, rng, size=n)
        sample = channel.connection_probability(d, paper_params)
        se = sample.std(ddof=1) / np.sqrt(n)
        assert abs(averaged_edge_probability(SQ, paper_params) - sample.mean()) < 3 * se


class TestAveragedTransitionProbability:
    def test_frozen_chain(self):
        assert averaged_transition_probability(SQ, FROZEN, LinkState.ON, LinkState.ON) \
            == pytest.approx(1.0, abs=1e-8)
        assert averaged_transition_probability(SQ, FROZEN, LinkState.ON, LinkState.OFF) == 0.0
        assert averaged_transition_probability(SQ, FROZEN, LinkState.OFF, LinkState.ON) == 0.0

    def test_golden_values(self, paper_params):
        assert averaged_transition_probability(
            SQ, paper_params, LinkState.ON, LinkState.OFF) == pytest.approx(
                GOLDEN_P10_BAR, rel=1e-8)
        assert averaged_transition_probability(
            SQ, paper_params, LinkState.OFF, LinkState.ON) == pytest.approx(
                GOLDEN_P01_BAR, rel=1e-8)

    def test_matches_monte_carlo(self, paper_params, rng):
        n = 1_000_000
        d = geometry.sample_distance(SQ, rng, size=n)
        sample = channel.transition_probabilities(d, paper_params)[1]
        se = sample.std(ddof=1) / np.sqrt(n)
        quad = averaged_transition_probability(SQ, paper_params, LinkState.ON, LinkState.OFF)
        assert abs(quad - sample.mean()) < 3 * se

    def test_rows_sum_to_one(self, paper_params):
        for name in geometry.DOMAIN_NAMES:
            dom = geometry.domain_from_name(name)
            for a in (LinkState.OFF, LinkState.ON):
                row = sum(averaged_transition_probability(dom, paper_params, a, LinkState(b))
                          for b in (0, 1))
                assert abs(row - 1.0) < 1e-8


class TestConditionalEntropies:
    def test_frozen_chain_is_deterministic(self):
        # zero up to the normalization error of the quadrature itself
        assert conditional_entropy_unconditioned(SQ, FROZEN) == pytest.approx(0.0, abs=1e-8)
        assert conditional_entropy_given_distance(SQ, FROZEN) == pytest.approx(0.0, abs=1e-12)

    def test_uniform_rows_give_one_bit(self):
        # composition formula with all transition rows (0.5, 0.5)
        moments = np.array([0.4, 0.6, 0.5, 0.5, 0.5, 0.5, np.nan, np.nan, np.nan])
        assert entropy._composition_from_moments(moments) == pytest.approx(1.0, rel=1e-14)

    def test_golden_values(self, paper_params):
        assert conditional_entropy_unconditioned(SQ, paper_params) == pytest.approx(
            GOLDEN_UPPER, abs=1e-9)
        assert conditional_entropy_given_distance(SQ, paper_params) == pytest.approx(
            GOLDEN_LOWER, abs=1e-9)

    def test_conditioning_reduces_entropy(self):
        for name in geometry.DOMAIN_NAMES:
            dom = geometry.domain_from_name(name)
            for eta in (2.0, 3.0, 4.0):
                for nu in (10.0, 500.0):
                    params = ChannelParams(0.7, eta, nu, 12e6)
                    assert conditional_entropy_given_distance(dom, params) <= \
                        conditional_entropy_unconditioned(dom, params) + 1e-12

    def test_hard_connection_shrinks_lower_bound(self):
        # as the connection function hardens the conditional uncertainty of a
        # link given its distance collapses
        for name in geometry.DOMAIN_NAMES:
            dom = geometry.domain_from_name(name)
            soft = conditional_entropy_given_distance(dom, ChannelParams(0.7, 2.0, 500.0, 12e6))
            hard = conditional_entropy_given_distance(dom, ChannelParams(0.7, 8.0, 500.0, 12e6))
            assert hard < soft

    def test_lower_matches_monte_carlo(self, paper_params, rng):
        n = 1_000_000
        d = geometry.sample_distance(SQ, rng, size=n)
        p = channel.connection_probability(d, paper_params)
        p01, p10 = channel.transition_probabilities(d, paper_params)

        def h2(q):
            out = np.zeros_like(q)
            m = (q > 0) & (q < 1)
            out[m] = -q[m] * np.log2(q[m]) - (1 - q[m]) * np.log2(1 - q[m])
            return out

        sample = (1 - p) * h2(p01) + p * h2(p10)
        se = sample.std(ddof=1) / np.sqrt(n)
        assert abs(conditional_entropy_given_distance(SQ, paper_params)
                   - sample.mean()) < 3 * se

    def test_diagnostics_joint_equals_h2(self, paper_params):
        # the joint-consistent conditional entropy is exactly the oracle's h_2
        diag = conditional_entropy_diagnostics(SQ, paper_params)
        _, h = block_entropy_profile(SQ, paper_params, 2)
        assert diag.joint_consistent == pytest.approx(h[1], abs=1e-12)
        assert diag.averaged_composition == pytest.approx(GOLDEN_UPPER, abs=1e-9)
        assert diag.joint_consistent <= diag.averaged_composition


class TestEntropyRateBounds:
    def test_two_nodes_network_equals_edge(self, paper_params):
        b = entropy_rate_bounds(2, SQ, paper_params)
        assert b.network_lower == b.per_edge_lower
        assert b.network_upper == b.per_edge_upper

    def test_scaling_is_exact(self, paper_params):
        b50 = entropy_rate_bounds(50, SQ, paper_params)
        b100 = entropy_rate_bounds(100, SQ, paper_params)
        assert b50.network_upper == math.comb(50, 2) * b50.per_edge_upper
        assert b100.network_upper == math.comb(100, 2) * b100.per_edge_upper
        assert b100.network_upper / b50.network_upper == pytest.approx(
            4950.0 / 1225.0, rel=1e-14)

    def test_paper_point(self, paper_params):
        b = entropy_rate_bounds(50, SQ, paper_params)
        assert b.per_edge_lower == pytest.approx(GOLDEN_LOWER, abs=1e-9)
        assert b.per_edge_upper == pytest.approx(GOLDEN_UPPER, abs=1e-9)
        # fifty-node network dynamics at nu=500 Hz amount to a few bits
        assert 1.0 < b.network_lower < b.network_upper < 3.0

    def test_bounds_in_unit_interval(self):
        for eta in (2.0, 4.0):
            b = entropy_rate_bounds(2, SQ, ChannelParams(0.7, eta, 1000.0, 12e6))
            assert 0.0 <= b.per_edge_lower <= b.per_edge_upper <= 1.0

    def test_small_n_rejected(self, paper_params):
        with pytest.raises(ValueError):
            entropy_rate_bounds(1, SQ, paper_params)

    def test_vanishing_doppler_limit(self):
        for nu in (0.0, 1e-3):
            b = entropy_rate_bounds(2, SQ, ChannelParams(0.7, 2.0, nu, 12e6))
            assert b.per_edge_upper < 1e-5 or nu > 0.0
            if nu == 0.0:
                assert b.per_edge_lower == pytest.approx(0.0, abs=1e-12)
                assert b.per_edge_upper == pytest.approx(0.0, abs=1e-8)


class TestBlockEntropyOracle:
    def test_t1_is_marginal_entropy(self, paper_params):
        res = block_entropy_oracle(SQ, paper_params, 1)
        marginal = binary_entropy_terms([
            averaged_edge_probability(SQ, paper_params),
            1.0 - averaged_edge_probability(SQ, paper_params),
        ])
        assert res.block_entropy == pytest.approx(marginal, abs=1e-8)
        assert res.conditional_increment == res.block_entropy

    def test_range_validation(self, paper_params):
        for t in (0, 13):
            with pytest.raises(ValueError):
                block_entropy_oracle(SQ, paper_params, t)

    def test_increments_non_increasing(self, paper_params):
        _, h = block_entropy_profile(SQ, paper_params, 12)
        assert np.all(np.diff(h) <= 1e-12)

    def test_frozen_chain(self):
        H, h = block_entropy_profile(SQ, FROZEN, 6)
        assert np.allclose(H, H[0], atol=1e-12)
        assert np.allclose(h[1:], 0.0, atol=1e-12)

    def test_profile_consistent_with_single_call(self, paper_params):
        H, h = block_entropy_profile(SQ, paper_params, 5)
        res = block_entropy_oracle(SQ, paper_params, 5)
        assert res.block_entropy == H[-1] and res.conditional_increment == h[-1]
        assert h[1] == pytest.approx(GOLDEN_H2, abs=1e-9)

    def test_sandwich_at_paper_point(self, paper_params):
        b = entropy_rate_bounds(2, SQ, paper_params)
        h8 = block_entropy_oracle(SQ, paper_params, 8).conditional_increment
        assert b.per_edge_lower - 1e-9 <= h8 <= b.per_edge_upper + 1e-9


class TestQuadratureBehavior:
    def test_failure_propagates(self, paper_params):
        hopeless = QuadratureSpec(nodes_per_panel=8, rel_tolerance=1e-15, max_depth=1)
        with pytest.raises(QuadratureError):
            averaged_edge_probability(SQ, paper_params, hopeless)

    def test_node_doubling_stability(self, paper_params):
        base = entropy_rate_bounds(2, SQ, paper_params, QuadratureSpec(nodes_per_panel=16))
        dbl = entropy_rate_bounds(2, SQ, paper_params, QuadratureSpec(nodes_per_panel=32))
        assert abs(base.per_edge_lower - dbl.per_edge_lower) < 1e-6
        assert abs(base.per_edge_upper - dbl.per_edge_upper) < 1e-6

    def test_oracle_node_doubling_stability(self, paper_params):
        h16 = block_entropy_profile(SQ, paper_params, 8, QuadratureSpec(nodes_per_panel=16))[1]
        h32 = block_entropy_profile(SQ, paper_params, 8, QuadratureSpec(nodes_per_panel=32))[1]
        assert np.max(np.abs(h16 - h32)) < 1e-6
