"""Simulation library for an underlay mmWave MIMO downlink where a base
station serves several secondary users with hybrid analog/digital precoding
while keeping its interference at a primary receiver under a threshold."""

from .analog import (Codebook, CombinerSelection, build_analog_precoder,
                     build_codebook, select_analog_combiner)
from .baselines import (SchemeResult, blind_transmission, full_digital_bd,
                        right_singular_precoding)
from .channel import (GeometricChannelDraw, draw_geometric,
                      generate_mmwave_channel, generate_rayleigh_channel,
                      steering_vector, trial_rng)
from .config import HybridConfig, db_to_linear
from .digital import (BdSolution, RankDeficiencyError, bd_design,
                      effective_channels, stack_interference)
from .harness import (AggregateRow, ConfigError, SweepPoint, SweepRow,
                      SweepSpec, aggregate, build_figure, draw_trial_channels,
                      emit_plot, load_config, read_rows_csv, run_sweep,
                      run_trial, write_csv)
from .pipeline import PrecodingSolution, design_adpc, run_adpc
from .power import (PowerAllocation, StreamGains, interference_gains,
                    optimal_power_allocation, sum_rate, total_interference)

__all__ = [
    "AggregateRow", "BdSolution", "Codebook", "CombinerSelection",
    "ConfigError", "GeometricChannelDraw", "HybridConfig",
    "PowerAllocation", "PrecodingSolution", "RankDeficiencyError",
    "SchemeResult", "StreamGains", "SweepPoint", "SweepRow", "SweepSpec",
    "aggregate", "bd_design", "blind_transmission", "build_analog_precoder",
    "build_codebook", "build_figure", "db_to_linear", "design_adpc",
    "draw_geometric", "draw_trial_channels", "effective_channels",
    "emit_plot", "full_digital_bd", "generate_mmwave_channel",
    "generate_rayleigh_channel", "interference_gains", "load_config",
    "optimal_power_allocation", "read_rows_csv", "right_singular_precoding",
    "run_adpc", "run_sweep", "run_trial", "select_analog_combiner",
    "stack_interference", "steering_vector", "sum_rate",
    "total_interference", "trial_rng", "write_csv",
]
