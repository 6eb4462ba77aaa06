"""Comparison schemes: full-digital block diagonalization, per-user singular
precoding, and blind constant-modulus transmission.

All three spend the same interference budget toward the primary receiver as
the hybrid design, so their sum rates are directly comparable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .digital import RankDeficiencyError, _svd_phase_fixed, bd_design
from .power import (DEFAULT_POWER_CAP, StreamGains, interference_gains,
                    optimal_power_allocation)


@dataclass(frozen=True)
class SchemeResult:
    """Outcome of one scheme on one channel realization.

    sum_rate is in bps/Hz; feasible=False marks a discarded trial, in which
    case the numeric fields are NaN and discard_reason says why.  cap_active
    flags trials where some stream hit the power cap (its interference then
    under-spends the budget instead of meeting it exactly).
    """

    scheme_id: str
    sum_rate: float
    total_interference: float
    feasible: bool
    discard_reason: str | None = None
    cap_active: bool = False


def _discarded(scheme_id: str, reason: str) -> SchemeResult:
    return SchemeResult(scheme_id=scheme_id, sum_rate=math.nan,
                        total_interference=math.nan, feasible=False,
                        discard_reason=reason)


def _check_channel_set(channels: list[np.ndarray], pu_channel: np.ndarray):
    if not channels:
        raise ValueError("need at least one user channel")
    shapes = {np.asarray(h).shape for h in channels}
    if len(shapes) != 1:
        raise ValueError(f"user channels disagree in shape: {sorted(shapes)}")
    n_rx, n_tx = shapes.pop()
    pu_channel = np.asarray(pu_channel)
    if pu_channel.ndim != 2 or pu_channel.shape[1] != n_tx:
        raise ValueError(
            f"primary channel must have {n_tx} columns, got shape "
            f"{pu_channel.shape}")
    return n_rx, n_tx


def full_digital_bd(channels: list[np.ndarray], pu_channel: np.ndarray,
                    streams: int, i_th: float, noise_var: float = 1.0,
                    p_max: float = DEFAULT_POWER_CAP) -> SchemeResult:
    """Block diagonalization on the raw channels with every antenna driven
    digitally; interference-constrained loading on the resulting streams."""
    n_rx, n_tx = _check_channel_set(channels, pu_channel)
    if len(channels) * streams > n_tx:
        raise ValueError(
            f"cannot carry {len(channels)}*{streams} streams over {n_tx} "
            f"transmit antennas")
    try:
        design = bd_design([np.asarray(h) for h in channels], streams)
    except RankDeficiencyError as err:
        return _discarded("fd_bd", str(err))
    leak = interference_gains(design.precoders, np.eye(n_tx), pu_channel)
    gains = StreamGains(design.singular_values ** 2 / noise_var, leak)
    alloc = optimal_power_allocation(gains, i_th, p_max)
    return SchemeResult("fd_bd", alloc.sum_rate, alloc.total_interference,
                        True, cap_active=alloc.cap_active)


def right_singular_precoding(channels: list[np.ndarray],
                             pu_channel: np.ndarray, streams: int,
                             i_th: float, noise_var: float = 1.0,
                             p_max: float = DEFAULT_POWER_CAP) -> SchemeResult:
    """Each user gets its own top-`streams` singular directions, ignoring the
    other users; the loading is interference-aware but the rate pays for the
    uncancelled inter-user interference through the SINR."""
    n_rx, n_tx = _check_channel_set(channels, pu_channel)
    if not 1 <= streams <= min(n_rx, n_tx):
        raise ValueError(
            f"streams must satisfy 1 <= streams <= {min(n_rx, n_tx)}, "
            f"got {streams}")
    users = len(channels)
    precoders, combiners = [], []
    svals = np.zeros((users, streams))
    for k, channel in enumerate(channels):
        u, s, vh = _svd_phase_fixed(np.asarray(channel, dtype=np.complex128))
        precoders.append(vh.conj().T[:, :streams])
        combiners.append(u[:, :streams])
        svals[k] = s[:streams]
    leak = interference_gains(precoders, np.eye(n_tx), pu_channel)
    alloc = optimal_power_allocation(
        StreamGains(svals ** 2 / noise_var, leak), i_th, p_max)

    rate = 0.0
    for k in range(users):
        received = [combiners[k].conj().T @ np.asarray(channels[k]) @ precoders[j]
                    for j in range(users)]
        for d in range(streams):
            signal = alloc.powers[k, d] * svals[k, d] ** 2
            clutter = sum(float(np.abs(received[j][d]) ** 2 @ alloc.powers[j])
                          for j in range(users) if j != k)
            rate += math.log2(1.0 + signal / (noise_var + clutter))
    return SchemeResult("right_singular", rate, alloc.total_interference,
                        True, cap_active=alloc.cap_active)


def blind_transmission(channels: list[np.ndarray], pu_channel: np.ndarray,
                       streams: int, i_th: float, rng: np.random.Generator,
                       noise_var: float = 1.0,
                       p_max: float = DEFAULT_POWER_CAP) -> SchemeResult:
    """Random constant-modulus phase precoding with equal per-stream power,
    scaled so the primary receiver sees exactly the interference budget;
    matched-filter combining at each user."""
    n_rx, n_tx = _check_channel_set(channels, pu_channel)
    if not np.isfinite(i_th) or i_th < 0:
        raise ValueError(f"i_th must be finite and >= 0, got {i_th}")
    users = len(channels)
    total = users * streams
    phases = rng.uniform(0.0, 2.0 * np.pi, (n_tx, total))
    precoder = np.exp(1j * phases) / np.sqrt(n_tx)   # column (k*streams + d)
    leak_total = float(np.sum(np.abs(np.asarray(pu_channel) @ precoder) ** 2))
    capped = leak_total == 0.0
    power = p_max if capped else i_th / leak_total

    rate = 0.0
    for k in range(users):
        received = np.asarray(channels[k]) @ precoder   # (n_rx, total)
        own = slice(k * streams, (k + 1) * streams)
        norms = np.linalg.norm(received[:, own], axis=0)
        for d in range(streams):
            col = k * streams + d
            if norms[d] == 0:
                continue
            filt = received[:, col] / norms[d]
            cross = np.abs(filt.conj() @ received) ** 2
            clutter = power * (float(np.sum(cross)) - float(cross[col]))
            rate += math.log2(1.0 + power * norms[d] ** 2
                              / (noise_var + clutter))
    return SchemeResult("blind", rate, power * leak_total, True,
                        cap_active=capped)
