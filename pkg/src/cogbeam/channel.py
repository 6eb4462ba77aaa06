"""Seeded generation of geometric mmWave and Rayleigh MIMO channels."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def steering_vector(angle: float, n: int, spacing_ratio: float = 0.5) -> np.ndarray:
    """Uniform-linear-array response for a plane wave arriving at `angle`.

    Entry m is exp(1j * 2*pi * spacing_ratio * m * sin(angle)) / sqrt(n),
    so the vector has unit norm.  Returns an (n, 1) complex column.
    """
    if n < 1:
        raise ValueError(f"array size must be >= 1, got {n}")
    if not spacing_ratio > 0:
        raise ValueError(f"spacing_ratio must be > 0, got {spacing_ratio}")
    phase = 2.0 * np.pi * spacing_ratio * np.sin(angle)
    vec = np.exp(1j * phase * np.arange(n)) / np.sqrt(n)
    return vec.reshape(n, 1)


@dataclass(frozen=True)
class GeometricChannelDraw:
    """One realization of the multipath parameters of a geometric channel.

    gains: complex path gains, shape (L,).
    aoa: angles of arrival in radians, shape (L,).
    aod: angles of departure in radians, shape (L,).
    """

    gains: np.ndarray
    aoa: np.ndarray
    aod: np.ndarray

    def __post_init__(self):
        gains = np.asarray(self.gains, dtype=np.complex128)
        aoa = np.asarray(self.aoa, dtype=np.float64)
        aod = np.asarray(self.aod, dtype=np.float64)
        if not (gains.ndim == aoa.ndim == aod.ndim == 1):
            raise ValueError("gains, aoa and aod must be 1-D arrays")
        if not (len(gains) == len(aoa) == len(aod)):
            raise ValueError(
                f"path counts disagree: {len(gains)} gains, "
                f"{len(aoa)} AoAs, {len(aod)} AoDs")
        if len(gains) and not (np.all(np.isfinite(gains))
                               and np.all(np.isfinite(aoa))
                               and np.all(np.isfinite(aod))):
            raise ValueError("path parameters must be finite")
        object.__setattr__(self, "gains", gains)
        object.__setattr__(self, "aoa", aoa)
        object.__setattr__(self, "aod", aod)

    @property
    def n_paths(self) -> int:
        return len(self.gains)


def draw_geometric(rng: np.random.Generator, n_paths: int,
                   path_gain_var: float = 1.0) -> GeometricChannelDraw:
    """Sample path gains CN(0, path_gain_var) and angles uniform on [0, 2*pi)."""
    if n_paths < 1:
        raise ValueError(f"need at least one path, got {n_paths}")
    if not path_gain_var > 0:
        raise ValueError(f"path_gain_var must be > 0, got {path_gain_var}")
    scale = np.sqrt(path_gain_var / 2.0)
    gains = scale * (rng.standard_normal(n_paths)
                     + 1j * rng.standard_normal(n_paths))
    aoa = rng.uniform(0.0, 2.0 * np.pi, n_paths)
    aod = rng.uniform(0.0, 2.0 * np.pi, n_paths)
    return GeometricChannelDraw(gains=gains, aoa=aoa, aod=aod)


def generate_mmwave_channel(draw: GeometricChannelDraw, n_tx: int, n_rx: int,
                            spacing_ratio: float = 0.5) -> np.ndarray:
    """Assemble the (n_rx, n_tx) geometric channel from one multipath draw.

    H = sqrt(n_tx * n_rx / L) * sum_l gains[l] * a_rx(aoa[l]) a_tx(aod[l])^H,
    a rank <= L matrix.
    """
    if draw.n_paths < 1:
        raise ValueError("channel draw has no paths")
    if n_tx < 1 or n_rx < 1:
        raise ValueError(f"antenna counts must be >= 1, got ({n_rx}, {n_tx})")
    if not spacing_ratio > 0:
        raise ValueError(f"spacing_ratio must be > 0, got {spacing_ratio}")
    # array responses for all paths at once: (n, L)
    rx_phase = 2.0 * np.pi * spacing_ratio * np.sin(draw.aoa)
    tx_phase = 2.0 * np.pi * spacing_ratio * np.sin(draw.aod)
    a_rx = np.exp(1j * np.outer(np.arange(n_rx), rx_phase)) / np.sqrt(n_rx)
    a_tx = np.exp(1j * np.outer(np.arange(n_tx), tx_phase)) / np.sqrt(n_tx)
    scale = np.sqrt(n_tx * n_rx / draw.n_paths)
    channel = scale * (a_rx * draw.gains) @ a_tx.conj().T
    if not np.all(np.isfinite(channel)):
        raise ValueError("generated channel contains non-finite entries")
    return channel


def generate_rayleigh_channel(n_rx: int, n_tx: int,
                              rng: np.random.Generator) -> np.ndarray:
    """Draw an (n_rx, n_tx) matrix of i.i.d. CN(0, 1) entries."""
    if n_tx < 1 or n_rx < 1:
        raise ValueError(f"antenna counts must be >= 1, got ({n_rx}, {n_tx})")
    channel = (rng.standard_normal((n_rx, n_tx))
               + 1j * rng.standard_normal((n_rx, n_tx))) / np.sqrt(2.0)
    return channel


def trial_rng(master_seed: int, trial: int, stream: int) -> np.random.Generator:
    """Independent generator for one (trial, stream) cell of a sweep.

    Seeding goes through SeedSequence spawn keys, so the draws depend only on
    the three integers and never on execution order or worker count.
    """
    seq = np.random.SeedSequence(master_seed, spawn_key=(trial, stream))
    return np.random.default_rng(seq)
