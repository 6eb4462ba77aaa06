"""End-to-end hybrid design: codebook combiners, phase-aligned RF precoder,
baseband nulling, then interference-priced power loading."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analog import build_analog_precoder, build_codebook, select_analog_combiner
from .baselines import SchemeResult, _discarded
from .config import HybridConfig
from .digital import RankDeficiencyError, bd_design, effective_channels
from .power import (DEFAULT_POWER_CAP, StreamGains, interference_gains,
                    optimal_power_allocation)


@dataclass(frozen=True)
class PrecodingSolution:
    """Complete two-stage design for one channel realization.

    rf_precoder: (N_t, K*M_r) constant-modulus transmit stage.
    rf_combiners: K matrices (N_r, M_r) of selected codebook columns.
    bb_precoders: K matrices (M_t, D) with orthonormal columns.
    bb_combiners: K matrices (M_r, D) with orthonormal columns.
    singular_values: (K, D) effective per-stream amplitudes.
    leak_gains: (K, D) per-stream power gains toward the primary receiver.
    """

    rf_precoder: np.ndarray
    rf_combiners: list[np.ndarray]
    bb_precoders: list[np.ndarray]
    bb_combiners: list[np.ndarray]
    singular_values: np.ndarray
    leak_gains: np.ndarray


def design_adpc(channels: list[np.ndarray], pu_channel: np.ndarray,
                config: HybridConfig) -> PrecodingSolution:
    """Run the full analog+digital design on one set of channels.

    Raises RankDeficiencyError when the baseband nulling stage cannot
    support the configured stream count on this realization.
    """
    config.validate(hybrid=True)
    if len(channels) != config.users:
        raise ValueError(
            f"got {len(channels)} channels for {config.users} users")
    expected = (config.n_rx, config.n_tx)
    for k, channel in enumerate(channels):
        if np.asarray(channel).shape != expected:
            raise ValueError(
                f"channel {k} has shape {np.asarray(channel).shape}, "
                f"expected {expected}")
    pu_channel = np.asarray(pu_channel)
    if pu_channel.shape != (config.n_rx_primary, config.n_tx):
        raise ValueError(
            f"primary channel has shape {pu_channel.shape}, expected "
            f"{(config.n_rx_primary, config.n_tx)}")
    codebook = build_codebook(config.n_rx, config.spacing_ratio)
    rf_combiners = [select_analog_combiner(h, config.rf_rx, codebook).combiner
                    for h in channels]
    rf_precoder = build_analog_precoder(rf_combiners, channels)
    reduced = effective_channels(channels, rf_precoder, rf_combiners)
    design = bd_design(reduced, config.streams)
    leak = interference_gains(design.precoders, rf_precoder, pu_channel)
    return PrecodingSolution(
        rf_precoder=rf_precoder,
        rf_combiners=rf_combiners,
        bb_precoders=design.precoders,
        bb_combiners=design.combiners,
        singular_values=design.singular_values,
        leak_gains=leak,
    )


def run_adpc(channels: list[np.ndarray], pu_channel: np.ndarray,
             config: HybridConfig, i_th: float,
             p_max: float = DEFAULT_POWER_CAP) -> SchemeResult:
    """Design, load power against the linear budget i_th, and score."""
    try:
        solution = design_adpc(channels, pu_channel, config)
    except RankDeficiencyError as err:
        return _discarded("adpc", str(err))
    gains = StreamGains(solution.singular_values ** 2 / config.noise_var,
                        solution.leak_gains)
    alloc = optimal_power_allocation(gains, i_th, p_max)
    return SchemeResult("adpc", alloc.sum_rate, alloc.total_interference,
                        True, cap_active=alloc.cap_active)
