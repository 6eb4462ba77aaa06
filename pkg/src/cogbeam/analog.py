"""RF-domain design: DFT receive codebooks, per-user combiner selection and
the constant-modulus phase-aligned transmit precoder."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Codebook:
    """Receive beamforming codebook of n_rx orthonormal DFT columns.

    vectors: (n_rx, n_rx) complex, column i is the response at grid_angles[i].
    grid_angles: (n_rx,) phase increments 2*pi*i / n_rx, i = 0..n_rx-1.
    spacing_ratio: element spacing ratio; the grid lives in the phase domain,
        so this is only needed to map grid phases back to physical angles.
    """

    vectors: np.ndarray
    grid_angles: np.ndarray
    spacing_ratio: float = 0.5


@dataclass(frozen=True)
class CombinerSelection:
    """Result of picking m_rx codebook columns for one user.

    combiner: (n_rx, m_rx) selected columns, orthonormal.
    chosen_indices: codebook indices in descending-score order.
    scores: objective value of every codebook index, shape (n_rx,).
    """

    combiner: np.ndarray
    chosen_indices: np.ndarray
    scores: np.ndarray


def build_codebook(n_rx: int, spacing_ratio: float = 0.5) -> Codebook:
    """DFT codebook: column i has entries exp(1j*m*zeta_i)/sqrt(n_rx) with
    zeta_i = 2*pi*i/n_rx, so the columns are orthonormal."""
    if n_rx < 1:
        raise ValueError(f"codebook size must be >= 1, got {n_rx}")
    if not spacing_ratio > 0:
        raise ValueError(f"spacing_ratio must be > 0, got {spacing_ratio}")
    grid = 2.0 * np.pi * np.arange(n_rx) / n_rx
    vectors = np.exp(1j * np.outer(np.arange(n_rx), grid)) / np.sqrt(n_rx)
    return Codebook(vectors=vectors, grid_angles=grid,
                    spacing_ratio=spacing_ratio)


def select_analog_combiner(channel: np.ndarray, m_rx: int,
                           codebook: Codebook) -> CombinerSelection:
    """Pick the m_rx codebook columns with the largest received power.

    The score of codebook column a_i is sum_j |a_i^H h_j|^2 over the channel
    columns h_j.  The objective is separable across selected columns, so the
    greedy top-m_rx choice is the exact maximizer; ties break toward the
    lower index.
    """
    channel = np.asarray(channel)
    n_rx = codebook.vectors.shape[0]
    if channel.ndim != 2 or channel.shape[0] != n_rx:
        raise ValueError(
            f"channel must have {n_rx} rows to match the codebook, "
            f"got shape {channel.shape}")
    if not 1 <= m_rx <= n_rx:
        raise ValueError(f"m_rx must satisfy 1 <= m_rx <= {n_rx}, got {m_rx}")
    projections = codebook.vectors.conj().T @ channel
    scores = np.sum(np.abs(projections) ** 2, axis=1)
    # stable sort on the negated scores keeps equal scores in index order
    order = np.argsort(-scores, kind="stable")
    chosen = order[:m_rx]
    return CombinerSelection(combiner=codebook.vectors[:, chosen],
                             chosen_indices=chosen, scores=scores)


def build_analog_precoder(combiners: list[np.ndarray],
                          channels: list[np.ndarray]) -> np.ndarray:
    """Constant-modulus transmit precoder aligned to the combined channels.

    Stacks the per-user combined channels into rows of a (K*m_rx, n_tx)
    matrix C, then sets F[i, j] = exp(-1j * angle(C[j, i])) / sqrt(n_tx).
    Right-multiplying C by this F makes every diagonal entry of C @ F the
    real, nonnegative value sum_i |C[j, i]| / sqrt(n_tx).
    """
    if len(combiners) != len(channels) or not channels:
        raise ValueError(
            f"need equally many combiners and channels, got "
            f"{len(combiners)} and {len(channels)}")
    rows = []
    n_rx, n_tx = np.asarray(channels[0]).shape
    for k, (combiner, channel) in enumerate(zip(combiners, channels)):
        combiner = np.asarray(combiner)
        channel = np.asarray(channel)
        if channel.shape != (n_rx, n_tx):
            raise ValueError(
                f"channel {k} has shape {channel.shape}, expected {(n_rx, n_tx)}")
        if combiner.ndim != 2 or combiner.shape[0] != n_rx:
            raise ValueError(
                f"combiner {k} has shape {combiner.shape}, expected "
                f"({n_rx}, m_rx)")
        rows.append(combiner.conj().T @ channel)
    combined = np.vstack(rows)
    # angle(0) = 0, so zero entries still get a unit-modulus phase term
    precoder = np.exp(-1j * np.angle(combined.T)) / np.sqrt(n_tx)
    return precoder
