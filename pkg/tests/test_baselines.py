"""Tests for the comparison schemes and the end-to-end hybrid pipeline."""

import math

import numpy as np
import numpy.testing as npt
import pytest

from cogbeam.baselines import (blind_transmission, full_digital_bd,
                               right_singular_precoding)
from cogbeam.channel import (draw_geometric, generate_mmwave_channel,
                             generate_rayleigh_channel, trial_rng)
from cogbeam.config import HybridConfig
from cogbeam.digital import bd_design
from cogbeam.pipeline import design_adpc, run_adpc
from cogbeam.power import StreamGains, optimal_power_allocation


def rayleigh_set(seed, users, n_rx, n_tx, n_rx_primary=None):
    rng = np.random.default_rng(seed)
    channels = [generate_rayleigh_channel(n_rx, n_tx, rng)
                for _ in range(users)]
    pu = generate_rayleigh_channel(n_rx_primary or n_rx, n_tx, rng)
    return channels, pu


def mmwave_set(config: HybridConfig, seed, users=None):
    rng = np.random.default_rng(seed)
    users = users or config.users
    channels = [generate_mmwave_channel(
        draw_geometric(rng, config.paths, config.path_gain_var),
        config.n_tx, config.n_rx, config.spacing_ratio)
        for _ in range(users)]
    pu = generate_mmwave_channel(
        draw_geometric(rng, config.paths, config.path_gain_var),
        config.n_tx, config.n_rx_primary, config.spacing_ratio)
    return channels, pu


DESK = HybridConfig(n_tx=32, n_rx=4, users=8, streams=2, rf_tx=16, rf_rx=2,
                    n_rx_primary=4)


class TestFullDigitalBd:
    def test_single_user_is_waterfilled_svd(self):
        channels, pu = rayleigh_set(0, users=1, n_rx=4, n_tx=6)
        result = full_digital_bd(channels, pu, streams=2, i_th=4.0)
        _, s, vh = np.linalg.svd(channels[0])
        precoder = vh.conj().T[:, :2]
        leak = np.sum(np.abs(pu @ precoder) ** 2, axis=0).reshape(1, 2)
        alloc = optimal_power_allocation(
            StreamGains((s[:2] ** 2).reshape(1, 2), leak), 4.0)
        assert result.feasible
        assert math.isclose(result.sum_rate, alloc.sum_rate, rel_tol=1e-9)
        assert math.isclose(result.total_interference,
                            alloc.total_interference, rel_tol=1e-9)

    def test_budget_compliance(self):
        for seed in range(5):
            channels, pu = rayleigh_set(seed, users=3, n_rx=2, n_tx=8)
            result = full_digital_bd(channels, pu, streams=2, i_th=2.5)
            assert result.feasible
            assert result.total_interference <= 2.5 * (1 + 1e-6)
            assert abs(result.total_interference - 2.5) <= 1e-6 * 2.5

    def test_zero_primary_channel_hits_cap(self):
        channels, _ = rayleigh_set(1, users=2, n_rx=2, n_tx=6)
        pu = np.zeros((2, 6), dtype=complex)
        result = full_digital_bd(channels, pu, streams=2, i_th=1.0,
                                 p_max=500.0)
        design = bd_design([np.asarray(h) for h in channels], 2)
        expected = float(np.sum(np.log2(
            1.0 + 500.0 * design.singular_values ** 2)))
        assert result.total_interference == 0.0
        assert result.cap_active
        assert math.isclose(result.sum_rate, expected, rel_tol=1e-12)

    def test_rank_deficient_trial_discarded(self):
        rng = np.random.default_rng(2)
        rank_one = (generate_rayleigh_channel(2, 1, rng)
                    @ generate_rayleigh_channel(1, 8, rng))
        channels = [rank_one] + [generate_rayleigh_channel(2, 8, rng)
                                 for _ in range(2)]
        pu = generate_rayleigh_channel(2, 8, rng)
        result = full_digital_bd(channels, pu, streams=2, i_th=1.0)
        assert not result.feasible
        assert math.isnan(result.sum_rate)
        assert math.isnan(result.total_interference)
        assert "rank" in result.discard_reason

    def test_too_many_streams_rejected(self):
        channels, pu = rayleigh_set(3, users=4, n_rx=2, n_tx=6)
        with pytest.raises(ValueError):
            full_digital_bd(channels, pu, streams=2, i_th=1.0)


class TestRightSingularPrecoding:
    def test_single_user_matches_full_digital(self):
        channels, pu = rayleigh_set(4, users=1, n_rx=4, n_tx=6)
        alone = right_singular_precoding(channels, pu, streams=2, i_th=3.0)
        reference = full_digital_bd(channels, pu, streams=2, i_th=3.0)
        assert math.isclose(alone.sum_rate, reference.sum_rate, rel_tol=1e-9)
        assert math.isclose(alone.total_interference,
                            reference.total_interference, rel_tol=1e-9)

    def test_orthogonal_channels_have_no_cross_interference(self):
        # Users confined to disjoint transmit-antenna blocks cannot hear each
        # other, so the SINR rate must equal the interference-free rate.
        rng = np.random.default_rng(5)
        h1 = np.zeros((2, 8), dtype=complex)
        h2 = np.zeros((2, 8), dtype=complex)
        h1[:, :4] = generate_rayleigh_channel(2, 4, rng)
        h2[:, 4:] = generate_rayleigh_channel(2, 4, rng)
        pu = generate_rayleigh_channel(2, 8, rng)
        result = right_singular_precoding([h1, h2], pu, streams=2, i_th=2.0)

        svals = np.zeros((2, 2))
        precoders = []
        for k, h in enumerate((h1, h2)):
            _, s, vh = np.linalg.svd(h)
            precoders.append(vh.conj().T[:, :2])
            svals[k] = s[:2]
        leak = np.array([np.sum(np.abs(pu @ b) ** 2, axis=0)
                         for b in precoders])
        alloc = optimal_power_allocation(StreamGains(svals ** 2, leak), 2.0)
        assert math.isclose(result.sum_rate, alloc.sum_rate, rel_tol=1e-9)

    def test_zero_budget_zero_rate(self):
        channels, pu = rayleigh_set(6, users=3, n_rx=2, n_tx=8)
        result = right_singular_precoding(channels, pu, streams=2, i_th=0.0)
        assert result.sum_rate == 0.0
        assert result.total_interference == 0.0

    def test_budget_compliance_despite_coupling(self):
        channels, pu = rayleigh_set(7, users=3, n_rx=3, n_tx=9)
        coupled = right_singular_precoding(channels, pu, streams=2, i_th=4.0)
        assert coupled.feasible
        assert coupled.total_interference <= 4.0 * (1 + 1e-6)
        assert abs(coupled.total_interference - 4.0) <= 1e-6 * 4.0

    def test_stream_bounds_rejected(self):
        channels, pu = rayleigh_set(8, users=2, n_rx=2, n_tx=6)
        with pytest.raises(ValueError):
            right_singular_precoding(channels, pu, streams=3, i_th=1.0)


class TestBlindTransmission:
    def test_interference_exactly_at_budget(self):
        for seed in range(5):
            channels, pu = rayleigh_set(seed, users=2, n_rx=2, n_tx=8)
            rng = np.random.default_rng(100 + seed)
            result = blind_transmission(channels, pu, streams=2, i_th=3.0,
                                        rng=rng)
            assert result.feasible
            assert abs(result.total_interference - 3.0) <= 1e-9 * 3.0

    def test_same_seed_same_result(self):
        channels, pu = rayleigh_set(9, users=2, n_rx=2, n_tx=8)
        first = blind_transmission(channels, pu, 2, 3.0,
                                   np.random.default_rng(7))
        second = blind_transmission(channels, pu, 2, 3.0,
                                    np.random.default_rng(7))
        assert first.sum_rate == second.sum_rate
        assert first.total_interference == second.total_interference

    def test_scalar_closed_form(self):
        # One user, one stream, one transmit antenna: the random phase
        # cancels in every magnitude, so rate = log2(1 + i_th |h|^2 / |g|^2).
        rng = np.random.default_rng(10)
        h = generate_rayleigh_channel(1, 1, rng)
        g = generate_rayleigh_channel(1, 1, rng)
        result = blind_transmission([h], g, streams=1, i_th=2.0,
                                    rng=np.random.default_rng(11))
        expected = math.log2(1.0 + 2.0 * abs(h[0, 0]) ** 2 / abs(g[0, 0]) ** 2)
        assert math.isclose(result.sum_rate, expected, rel_tol=1e-12)
        assert math.isclose(result.total_interference, 2.0, rel_tol=1e-12)

    def test_zero_budget_zero_rate(self):
        channels, pu = rayleigh_set(11, users=2, n_rx=2, n_tx=8)
        result = blind_transmission(channels, pu, 2, 0.0,
                                    np.random.default_rng(0))
        assert result.sum_rate == 0.0
        assert result.total_interference == 0.0

    def test_negative_budget_rejected(self):
        channels, pu = rayleigh_set(12, users=2, n_rx=2, n_tx=8)
        with pytest.raises(ValueError):
            blind_transmission(channels, pu, 2, -1.0,
                               np.random.default_rng(0))


class TestHybridPipeline:
    def test_design_invariants(self):
        channels, pu = mmwave_set(DESK, seed=13)
        sol = design_adpc(channels, pu, DESK)
        n_tx = DESK.n_tx
        assert sol.rf_precoder.shape == (n_tx, DESK.users * DESK.rf_rx)
        assert np.max(np.abs(np.abs(sol.rf_precoder) - 1 / np.sqrt(n_tx))) \
            <= 1e-14
        for w in sol.rf_combiners:
            npt.assert_allclose(w.conj().T @ w, np.eye(DESK.rf_rx),
                                atol=1e-12)
        for t in sol.bb_combiners:
            npt.assert_allclose(t.conj().T @ t, np.eye(DESK.streams),
                                atol=1e-12)
        assert np.all(sol.singular_values > 0)
        assert np.all(sol.leak_gains >= 0)

    def test_design_nulls_interference(self):
        channels, pu = mmwave_set(DESK, seed=14)
        sol = design_adpc(channels, pu, DESK)
        reduced = [w.conj().T @ h @ sol.rf_precoder
                   for w, h in zip(sol.rf_combiners, channels)]
        for k, b in enumerate(sol.bb_precoders):
            for j, (t, r) in enumerate(zip(sol.bb_combiners, reduced)):
                if j == k:
                    continue
                leak = np.linalg.norm(t.conj().T @ r @ b)
                assert leak <= 1e-9 * np.linalg.norm(r) * np.linalg.norm(b)

    def test_run_meets_budget(self):
        channels, pu = mmwave_set(DESK, seed=15)
        for i_th in (0.5, 2.0, 8.0):
            result = run_adpc(channels, pu, DESK, i_th)
            assert result.feasible
            assert result.scheme_id == "adpc"
            assert abs(result.total_interference - i_th) <= 1e-6 * i_th

    def test_rate_monotone_in_budget(self):
        channels, pu = mmwave_set(DESK, seed=16)
        rates = [run_adpc(channels, pu, DESK, i).sum_rate
                 for i in (0.25, 1.0, 4.0, 16.0)]
        assert all(b >= a - 1e-12 for a, b in zip(rates, rates[1:]))

    def test_wrong_channel_count_rejected(self):
        channels, pu = mmwave_set(DESK, seed=17)
        with pytest.raises(ValueError):
            design_adpc(channels[:-1], pu, DESK)

    def test_wrong_primary_shape_rejected(self):
        channels, pu = mmwave_set(DESK, seed=18)
        with pytest.raises(ValueError):
            design_adpc(channels, pu[:, :-1], DESK)

    def test_ordering_against_baselines(self):
        # Large-array configuration, all schemes on shared channels: the
        # hybrid design should clearly beat both non-nulling baselines in
        # mean sum rate.
        config = HybridConfig(n_tx=128, n_rx=16, users=8, streams=2,
                              rf_tx=16, rf_rx=2, n_rx_primary=16)
        trials = 40
        i_th = 10.0 ** (6.0 / 10.0)
        totals = {"adpc": 0.0, "right_singular": 0.0, "blind": 0.0}
        used = 0
        for trial in range(trials):
            channels, pu = mmwave_set(config, seed=1000 + trial)
            adpc = run_adpc(channels, pu, config, i_th)
            if not adpc.feasible:
                continue
            rs = right_singular_precoding(channels, pu, config.streams, i_th)
            blind = blind_transmission(
                channels, pu, config.streams, i_th,
                trial_rng(555, trial, 0))
            totals["adpc"] += adpc.sum_rate
            totals["right_singular"] += rs.sum_rate
            totals["blind"] += blind.sum_rate
            used += 1
        assert used >= trials // 2
        assert totals["adpc"] > totals["right_singular"] > totals["blind"]
