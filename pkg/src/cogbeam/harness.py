"""Monte-Carlo sweep harness: config parsing, trial execution, CSV output
and a summary plot of mean sum rate with standard-error bars."""

from __future__ import annotations

import concurrent.futures
import csv
import math
import os
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .baselines import (SchemeResult, blind_transmission, full_digital_bd,
                        right_singular_precoding)
from .channel import (draw_geometric, generate_mmwave_channel,
                      generate_rayleigh_channel, trial_rng)
from .config import HybridConfig, db_to_linear
from .pipeline import run_adpc

SCHEME_IDS = ("adpc", "fd_bd", "right_singular", "blind")
CHANNEL_MODELS = ("geometric", "rayleigh")

# reserved per-trial stream indices that never collide with user indices
_PRIMARY_STREAM = 0x7FFFFFFF
_BLIND_STREAM = 0x7FFFFFFE

ROW_HEADER = ("scheme", "i_th_db", "k", "trial", "sum_rate_bps_hz",
              "total_interference", "feasible", "discard_reason")
AGGREGATE_HEADER = ("scheme", "i_th_db", "k", "trials_used",
                    "trials_discarded", "mean_sum_rate", "stderr_sum_rate")


class ConfigError(ValueError):
    """A sweep configuration could not be parsed or validated."""


class SweepPoint(NamedTuple):
    i_th_db: float
    k: int


@dataclass(frozen=True)
class SweepSpec:
    """Everything needed to reproduce one Monte-Carlo sweep."""

    config: HybridConfig
    channel_model: str = "geometric"
    schemes: tuple[str, ...] = SCHEME_IDS
    i_th_db: tuple[float, ...] = (0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0)
    k_values: tuple[int, ...] | None = None
    trials: int = 200
    master_seed: int = 12345
    p_max: float = 1e6

    def validate(self) -> None:
        if self.channel_model not in CHANNEL_MODELS:
            raise ConfigError(
                f"channel_model must be one of {CHANNEL_MODELS}, "
                f"got {self.channel_model!r}")
        if not self.schemes:
            raise ConfigError("at least one scheme must be requested")
        for scheme in self.schemes:
            if scheme not in SCHEME_IDS:
                raise ConfigError(
                    f"unknown scheme {scheme!r}, valid: {SCHEME_IDS}")
        if not self.i_th_db:
            raise ConfigError("i_th_db must list at least one value")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if self.master_seed < 0:
            raise ConfigError(
                f"master_seed must be >= 0, got {self.master_seed}")
        if not self.p_max > 0:
            raise ConfigError(f"p_max must be > 0, got {self.p_max}")
        if self.k_values is not None and not self.k_values:
            raise ConfigError("k_values, when given, must be non-empty")
        hybrid = "adpc" in self.schemes
        try:
            for k in (self.k_values or (self.config.users,)):
                self.config_for(k).validate(hybrid=hybrid)
        except ValueError as err:
            raise ConfigError(str(err)) from err

    def config_for(self, k: int) -> HybridConfig:
        """Per-point dimensions: sweeping K rescales the RF transmit stage."""
        if self.k_values is None or k == self.config.users:
            return self.config
        return self.config.with_users(k)

    def points(self) -> list[SweepPoint]:
        ks = self.k_values or (self.config.users,)
        return [SweepPoint(i_th_db=i, k=k) for k in ks for i in self.i_th_db]


@dataclass(frozen=True)
class SweepRow:
    """One (scheme, sweep point, trial) outcome."""

    scheme: str
    i_th_db: float
    k: int
    trial: int
    sum_rate: float
    total_interference: float
    feasible: bool
    discard_reason: str | None = None


@dataclass(frozen=True)
class AggregateRow:
    """Per (scheme, sweep point) summary over the feasible trials."""

    scheme: str
    i_th_db: float
    k: int
    trials_used: int
    trials_discarded: int
    mean_sum_rate: float
    stderr_sum_rate: float


# ===== configuration file parsing =====

_INT_KEYS = ("n_tx", "n_rx", "n_rx_primary", "rf_tx", "rf_rx", "users",
             "streams", "paths", "trials", "master_seed")
_FLOAT_KEYS = ("path_gain_var", "spacing_ratio", "noise_var", "p_max")
_HYBRID_KEYS = ("n_tx", "n_rx", "n_rx_primary", "rf_tx", "rf_rx", "users",
                "streams", "paths", "path_gain_var", "spacing_ratio",
                "noise_var")
_LIST_KEYS = ("schemes", "i_th_db", "k_values")
_STR_KEYS = ("channel_model",)
_KNOWN_KEYS = _INT_KEYS + _FLOAT_KEYS + _LIST_KEYS + _STR_KEYS

# desk-scale defaults: 8 users, 4x32 antennas, 2 streams over 2 RF chains
_CONFIG_DEFAULTS = {
    "n_tx": 32, "n_rx": 4, "users": 8, "streams": 2, "rf_tx": 16, "rf_rx": 2,
    "paths": 3, "path_gain_var": 1.0, "spacing_ratio": 0.5, "noise_var": 1.0,
}


def _parse_scalar(key: str, text: str, line_no: int):
    try:
        if key in _INT_KEYS:
            return int(text)
        if key in _FLOAT_KEYS:
            return float(text)
    except ValueError:
        kind = "an integer" if key in _INT_KEYS else "a number"
        raise ConfigError(
            f"line {line_no}: {key} must be {kind}, got {text!r}") from None
    return text


def load_config(text: str) -> SweepSpec:
    """Parse `key = value` lines (with # comments and comma-separated lists)
    into a validated SweepSpec.  Raises ConfigError with the offending line."""
    values: dict[str, object] = {}
    seen_lines: dict[str, int] = {}
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        body = raw_line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(
                f"line {line_no}: expected 'key = value', got {body!r}")
        key, _, value = body.partition("=")
        key = key.strip().lower()
        value = value.strip()
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"line {line_no}: unknown key {key!r}")
        if key in seen_lines:
            raise ConfigError(
                f"line {line_no}: duplicate key {key!r} "
                f"(first set on line {seen_lines[key]})")
        seen_lines[key] = line_no
        if not value:
            raise ConfigError(f"line {line_no}: empty value for {key!r}")
        if key in _LIST_KEYS:
            items = [item.strip() for item in value.split(",") if item.strip()]
            if not items:
                raise ConfigError(
                    f"line {line_no}: empty list for {key!r}")
            if key == "schemes":
                values[key] = tuple(items)
            elif key == "k_values":
                values[key] = tuple(_parse_scalar("users", item, line_no)
                                    for item in items)
            else:
                try:
                    values[key] = tuple(float(item) for item in items)
                except ValueError:
                    raise ConfigError(
                        f"line {line_no}: {key} must be a comma-separated "
                        f"list of numbers, got {value!r}") from None
        else:
            values[key] = _parse_scalar(key, value, line_no)

    fields = dict(_CONFIG_DEFAULTS)
    for key in _HYBRID_KEYS:
        if key in values:
            fields[key] = values[key]
    fields.setdefault("n_rx_primary", fields["n_rx"])
    try:
        config = HybridConfig(**fields)
    except TypeError as err:
        raise ConfigError(str(err)) from err

    spec_kwargs = {"config": config}
    for key in ("channel_model", "schemes", "i_th_db", "k_values", "trials",
                "master_seed", "p_max"):
        if key in values:
            spec_kwargs[key] = values[key]
    spec = SweepSpec(**spec_kwargs)
    spec.validate()
    return spec


# ===== trial execution =====

def draw_trial_channels(spec: SweepSpec, k: int, trial: int):
    """All channels of one trial: K user matrices plus the primary link.

    Each matrix comes from its own (master_seed, trial, index) generator, so
    the draw is independent of scheme order, sweep point and worker count.
    """
    cfg = spec.config_for(k)
    channels = []
    for user in range(k):
        rng = trial_rng(spec.master_seed, trial, user)
        channels.append(_draw_one(spec.channel_model, cfg, cfg.n_rx, rng))
    pu_rng = trial_rng(spec.master_seed, trial, _PRIMARY_STREAM)
    pu_channel = _draw_one(spec.channel_model, cfg, cfg.n_rx_primary, pu_rng)
    return channels, pu_channel


def _draw_one(model: str, cfg: HybridConfig, n_rx: int,
              rng: np.random.Generator) -> np.ndarray:
    if model == "rayleigh":
        return generate_rayleigh_channel(n_rx, cfg.n_tx, rng)
    draw = draw_geometric(rng, cfg.paths, cfg.path_gain_var)
    return generate_mmwave_channel(draw, cfg.n_tx, n_rx, cfg.spacing_ratio)


def run_trial(spec: SweepSpec, point: SweepPoint, trial: int) -> list[SweepRow]:
    """Run every requested scheme on one shared channel realization.

    Scheme failures never escape; they become discarded rows.
    """
    cfg = spec.config_for(point.k)
    channels, pu_channel = draw_trial_channels(spec, point.k, trial)
    i_lin = db_to_linear(point.i_th_db)
    rows = []
    for scheme in spec.schemes:
        try:
            result = _run_scheme(scheme, spec, cfg, channels, pu_channel,
                                 i_lin, trial)
        except Exception as err:  # failures become discarded rows
            result = SchemeResult(scheme, math.nan, math.nan, False,
                                  f"{type(err).__name__}: {err}")
        rows.append(SweepRow(
            scheme=scheme, i_th_db=point.i_th_db, k=point.k, trial=trial,
            sum_rate=result.sum_rate,
            total_interference=result.total_interference,
            feasible=result.feasible, discard_reason=result.discard_reason))
    return rows


def _run_scheme(scheme: str, spec: SweepSpec, cfg: HybridConfig,
                channels, pu_channel, i_lin: float, trial: int) -> SchemeResult:
    if scheme == "adpc":
        return run_adpc(channels, pu_channel, cfg, i_lin, p_max=spec.p_max)
    if scheme == "fd_bd":
        return full_digital_bd(channels, pu_channel, cfg.streams, i_lin,
                               noise_var=cfg.noise_var, p_max=spec.p_max)
    if scheme == "right_singular":
        return right_singular_precoding(channels, pu_channel, cfg.streams,
                                        i_lin, noise_var=cfg.noise_var,
                                        p_max=spec.p_max)
    if scheme == "blind":
        rng = trial_rng(spec.master_seed, trial, _BLIND_STREAM)
        return blind_transmission(channels, pu_channel, cfg.streams, i_lin,
                                  rng, noise_var=cfg.noise_var,
                                  p_max=spec.p_max)
    raise ValueError(f"unknown scheme {scheme!r}")


def run_sweep(spec: SweepSpec, threads: int = 1):
    """Execute trials x points x schemes; returns (rows, aggregates).

    Worker count only affects wall time: rows are keyed by (point, trial)
    and merged in a fixed order, and all randomness is derived per trial.
    """
    spec.validate()
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    points = spec.points()
    tasks = [(index, trial)
             for index in range(len(points))
             for trial in range(spec.trials)]
    if threads == 1:
        outcomes = {task: run_trial(spec, points[task[0]], task[1])
                    for task in tasks}
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
            futures = {task: pool.submit(run_trial, spec, points[task[0]],
                                         task[1])
                       for task in tasks}
            outcomes = {task: future.result()
                        for task, future in futures.items()}
    rows = [row for task in tasks for row in outcomes[task]]
    return rows, aggregate(rows, spec)


def aggregate(rows: list[SweepRow], spec: SweepSpec) -> list[AggregateRow]:
    """Mean and standard error of sum rate per (scheme, point), feasible
    trials only; discarded trials are counted, never averaged."""
    aggregates = []
    for point in spec.points():
        for scheme in spec.schemes:
            cell = [row for row in rows
                    if row.scheme == scheme and row.k == point.k
                    and row.i_th_db == point.i_th_db]
            used = [row.sum_rate for row in cell if row.feasible]
            discarded = len(cell) - len(used)
            if used:
                mean = float(np.mean(used))
                stderr = (float(np.std(used, ddof=1) / math.sqrt(len(used)))
                          if len(used) > 1 else 0.0)
            else:
                mean, stderr = math.nan, 0.0
            aggregates.append(AggregateRow(
                scheme=scheme, i_th_db=point.i_th_db, k=point.k,
                trials_used=len(used), trials_discarded=discarded,
                mean_sum_rate=mean, stderr_sum_rate=stderr))
    return aggregates


# ===== CSV output =====

def _fmt(value: float) -> str:
    """Full round-trip float text; empty for NaN (discarded rows)."""
    if isinstance(value, float) and math.isnan(value):
        return ""
    return repr(float(value))


def write_csv(rows: list[SweepRow], aggregates: list[AggregateRow],
              out_dir: str):
    """Write rows.csv and aggregates.csv under out_dir; returns their paths."""
    os.makedirs(out_dir, exist_ok=True)
    rows_path = os.path.join(out_dir, "rows.csv")
    agg_path = os.path.join(out_dir, "aggregates.csv")
    with open(rows_path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(ROW_HEADER)
        for row in rows:
            writer.writerow([
                row.scheme, _fmt(row.i_th_db), row.k, row.trial,
                _fmt(row.sum_rate), _fmt(row.total_interference),
                "true" if row.feasible else "false",
                row.discard_reason or ""])
    with open(agg_path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(AGGREGATE_HEADER)
        for agg in aggregates:
            writer.writerow([
                agg.scheme, _fmt(agg.i_th_db), agg.k, agg.trials_used,
                agg.trials_discarded, _fmt(agg.mean_sum_rate),
                _fmt(agg.stderr_sum_rate)])
    return rows_path, agg_path


def read_rows_csv(path: str) -> list[SweepRow]:
    """Parse rows.csv back into SweepRow records (floats round-trip)."""
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        if tuple(header) != ROW_HEADER:
            raise ValueError(f"unexpected header in {path}: {header}")
        rows = []
        for record in reader:
            scheme, i_th_db, k, trial, rate, interference, feasible, why = record
            rows.append(SweepRow(
                scheme=scheme, i_th_db=float(i_th_db), k=int(k),
                trial=int(trial),
                sum_rate=float(rate) if rate else math.nan,
                total_interference=(float(interference) if interference
                                    else math.nan),
                feasible=feasible == "true",
                discard_reason=why or None))
    return rows


# ===== plotting =====

def build_figure(aggregates: list[AggregateRow]):
    """Mean sum rate with standard-error bars, one line per scheme.

    The x axis is the user count when it varies, otherwise the interference
    threshold in dB.  Lines appear in first-seen scheme order.
    """
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    if not aggregates:
        raise ValueError("no aggregate data to plot")
    k_values = sorted({agg.k for agg in aggregates})
    sweep_k = len(k_values) > 1
    i_values = sorted({agg.i_th_db for agg in aggregates})

    def group_key(agg):
        if sweep_k and len(i_values) > 1:
            return (agg.scheme, agg.i_th_db)
        return agg.scheme

    groups: dict[object, list[AggregateRow]] = {}
    for agg in aggregates:
        groups.setdefault(group_key(agg), []).append(agg)

    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    for key, cell in groups.items():
        label = key if isinstance(key, str) else f"{key[0]} @ {key[1]:g} dB"
        cell = sorted(cell, key=lambda a: a.k if sweep_k else a.i_th_db)
        xs = [agg.k if sweep_k else agg.i_th_db for agg in cell]
        means = [agg.mean_sum_rate for agg in cell]
        errs = [agg.stderr_sum_rate for agg in cell]
        ax.errorbar(xs, means, yerr=errs, marker="o", capsize=3, label=label)
    ax.set_xlabel("number of users K" if sweep_k
                  else "interference threshold (dB)")
    ax.set_ylabel("mean sum rate (bps/Hz)")
    ax.margins(0.05)
    ax.grid(True, alpha=0.4)
    ax.legend()
    fig.tight_layout()
    return fig


def emit_plot(aggregates: list[AggregateRow], path: str) -> str:
    """Render the sweep summary to a standalone SVG file at `path`."""
    fig = build_figure(aggregates)
    import matplotlib.pyplot as plt

    fig.savefig(path, format="svg")
    plt.close(fig)
    return path
