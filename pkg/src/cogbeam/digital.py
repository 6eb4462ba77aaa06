"""Baseband stage: block-diagonalization precoders and combiners that null
inter-user interference inside the RF-reduced channel."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# relative singular-value cutoff used for every numerical rank decision
RANK_TOL = 1e-8


class RankDeficiencyError(Exception):
    """A user's channel cannot support the requested nulling/stream count."""

    def __init__(self, user: int, observed_rank: int, message: str):
        super().__init__(message)
        self.user = user
        self.observed_rank = observed_rank


@dataclass(frozen=True)
class BdSolution:
    """Per-user baseband design.

    precoders: K matrices (m_t, streams) with orthonormal columns.
    combiners: K matrices (m_r, streams) with orthonormal columns.
    singular_values: (K, streams) effective per-stream amplitudes, descending.
    null_bases: K matrices (m_t, m_r) spanning each user's interference-free
        transmit subspace.
    """

    precoders: list[np.ndarray]
    combiners: list[np.ndarray]
    singular_values: np.ndarray
    null_bases: list[np.ndarray]


def effective_channels(channels: list[np.ndarray], rf_precoder: np.ndarray,
                       combiners: list[np.ndarray]) -> list[np.ndarray]:
    """Per-user reduced channels combiner^H @ channel @ rf_precoder."""
    if len(channels) != len(combiners) or not channels:
        raise ValueError(
            f"need equally many channels and combiners, got "
            f"{len(channels)} and {len(combiners)}")
    rf_precoder = np.asarray(rf_precoder)
    reduced = []
    for k, (channel, combiner) in enumerate(zip(channels, combiners)):
        channel = np.asarray(channel)
        combiner = np.asarray(combiner)
        if channel.shape[1] != rf_precoder.shape[0]:
            raise ValueError(
                f"channel {k} has {channel.shape[1]} columns but the RF "
                f"precoder has {rf_precoder.shape[0]} rows")
        if combiner.shape[0] != channel.shape[0]:
            raise ValueError(
                f"combiner {k} has {combiner.shape[0]} rows but channel {k} "
                f"has {channel.shape[0]}")
        reduced.append(combiner.conj().T @ channel @ rf_precoder)
    return reduced


def stack_interference(k: int, reduced: list[np.ndarray]) -> np.ndarray:
    """Row-stack every user's reduced channel except user k (0-based)."""
    if not 0 <= k < len(reduced):
        raise ValueError(f"user index {k} out of range for {len(reduced)} users")
    m_t = np.asarray(reduced[k]).shape[1]
    others = [np.asarray(reduced[j]) for j in range(len(reduced)) if j != k]
    if not others:
        return np.zeros((0, m_t), dtype=np.complex128)
    return np.vstack(others)


def _fix_column_phases(matrix: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude entry is real positive."""
    fixed = matrix.copy()
    for col in range(fixed.shape[1]):
        idx = int(np.argmax(np.abs(fixed[:, col])))
        pivot = fixed[idx, col]
        if np.abs(pivot) > 0:
            fixed[:, col] *= np.conj(pivot) / np.abs(pivot)
    return fixed


def _svd_phase_fixed(matrix: np.ndarray):
    """Thin SVD with each left singular vector's dominant entry made real
    positive (the matching right vector is rotated to keep the product)."""
    u, s, vh = np.linalg.svd(matrix, full_matrices=False)
    for col in range(u.shape[1]):
        idx = int(np.argmax(np.abs(u[:, col])))
        pivot = u[idx, col]
        if np.abs(pivot) > 0:
            rot = np.conj(pivot) / np.abs(pivot)
            u[:, col] *= rot
            vh[col, :] *= np.conj(rot)
    return u, s, vh


def _null_space_basis(stacked: np.ndarray, reduced_k: np.ndarray,
                      user: int) -> np.ndarray:
    """Orthonormal (m_t, m_r) basis of the transmit directions unseen by the
    stacked interference matrix.

    With no interferers the stack is empty and the basis is taken as the
    leading m_r right singular vectors of the user's own reduced channel, so
    the downstream design collapses to plain SVD precoding.
    """
    m_r, m_t = reduced_k.shape
    if stacked.shape[0] == 0:
        _, _, vh = np.linalg.svd(reduced_k, full_matrices=True)
        return _fix_column_phases(vh.conj().T[:, :m_r])
    _, s, vh = np.linalg.svd(stacked, full_matrices=True)
    padded = np.zeros(m_t)
    padded[: len(s)] = s
    # the m_r trailing right singular vectors must carry (numerically) zero
    # singular values, otherwise the interference-free subspace is too small
    if padded[0] > 0 and padded[m_t - m_r] > RANK_TOL * padded[0]:
        observed = int(np.sum(s > RANK_TOL * padded[0]))
        raise RankDeficiencyError(
            user, observed,
            f"user {user}: stacked interference matrix has rank {observed} "
            f"> {m_t - m_r}, leaving fewer than {m_r} interference-free "
            f"transmit directions")
    return _fix_column_phases(vh.conj().T[:, m_t - m_r:])


def bd_design(reduced: list[np.ndarray], streams: int) -> BdSolution:
    """Design per-user precoders/combiners that null inter-user interference.

    For each user k an orthonormal basis of the subspace invisible to all
    other users is computed, the user's reduced channel restricted to that
    basis is diagonalized by SVD, and the strongest `streams` directions are
    kept.  Raises RankDeficiencyError when a user's interference-free
    subspace is too small or its restricted channel has rank below `streams`.
    """
    if not reduced:
        raise ValueError("need at least one user")
    shapes = {np.asarray(r).shape for r in reduced}
    if len(shapes) != 1:
        raise ValueError(f"reduced channels disagree in shape: {sorted(shapes)}")
    m_r, m_t = shapes.pop()
    if not 1 <= streams <= m_r:
        raise ValueError(
            f"streams must satisfy 1 <= streams <= {m_r}, got {streams}")
    precoders, combiners, bases = [], [], []
    singular_values = np.zeros((len(reduced), streams))
    for k, reduced_k in enumerate(reduced):
        reduced_k = np.asarray(reduced_k, dtype=np.complex128)
        basis = _null_space_basis(stack_interference(k, reduced), reduced_k, k)
        restricted = reduced_k @ basis
        u, s, vh = _svd_phase_fixed(restricted)
        rank = int(np.sum(s > RANK_TOL * s[0])) if s[0] > 0 else 0
        if rank < streams:
            raise RankDeficiencyError(
                k, rank,
                f"user {k}: restricted channel has rank {rank} < "
                f"{streams} requested streams")
        precoders.append(basis @ vh.conj().T[:, :streams])
        combiners.append(u[:, :streams])
        singular_values[k] = s[:streams]
        bases.append(basis)
    return BdSolution(precoders=precoders, combiners=combiners,
                      singular_values=singular_values, null_bases=bases)
