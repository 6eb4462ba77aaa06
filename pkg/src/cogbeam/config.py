"""System dimensions and physical parameters shared by every design stage."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass


def db_to_linear(value_db: float) -> float:
    """Convert a dB quantity to linear scale."""
    return 10.0 ** (value_db / 10.0)


@dataclass(frozen=True)
class HybridConfig:
    """Antenna counts, RF-chain counts and channel parameters for one downlink.

    Attributes:
        n_tx: transmit antennas at the base station (N_t).
        n_rx: receive antennas per secondary user (N_r).
        users: number of secondary users served simultaneously (K).
        streams: data streams per user (D).
        rf_tx: transmit RF chains (M_t).
        rf_rx: receive RF chains per user (M_r).
        n_rx_primary: receive antennas at the protected primary receiver.
        paths: propagation paths per geometric channel (L).
        path_gain_var: variance of the complex path gains.
        spacing_ratio: antenna spacing over carrier wavelength (d / lambda).
        noise_var: receiver noise variance per antenna.
    """

    n_tx: int
    n_rx: int
    users: int
    streams: int
    rf_tx: int
    rf_rx: int
    n_rx_primary: int
    paths: int = 3
    path_gain_var: float = 1.0
    spacing_ratio: float = 0.5
    noise_var: float = 1.0

    def validate(self, hybrid: bool = True) -> None:
        """Raise ValueError naming the violated constraint.

        With hybrid=True the RF-chain split of the phase-aligned transmit
        stage is also enforced (M_t = K*M_r).
        """
        for name in ("n_tx", "n_rx", "users", "streams", "rf_tx", "rf_rx",
                     "n_rx_primary", "paths"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        for name in ("path_gain_var", "spacing_ratio", "noise_var"):
            value = getattr(self, name)
            if not value > 0:
                raise ValueError(f"{name} must be > 0, got {value!r}")
        k, d, m_t, m_r = self.users, self.streams, self.rf_tx, self.rf_rx
        if not (k * d <= m_t <= self.n_tx):
            raise ValueError(
                "stream/RF-chain budget must satisfy KD <= M_t <= N_t "
                f"(got K={k}, D={d}, M_t={m_t}, N_t={self.n_tx})")
        if not (d <= m_r <= self.n_rx):
            raise ValueError(
                "per-user dimensions must satisfy D <= M_r <= N_r "
                f"(got D={d}, M_r={m_r}, N_r={self.n_rx})")
        if self.paths > self.n_rx:
            raise ValueError(
                "path count must satisfy L_k <= N_r "
                f"(got L={self.paths}, N_r={self.n_rx})")
        if hybrid and m_t != k * m_r:
            raise ValueError(
                "phase-aligned transmit stage needs M_t = K*M_r "
                f"(got M_t={m_t}, K={k}, M_r={m_r})")

    def with_users(self, users: int) -> "HybridConfig":
        """Resize to a different user count, keeping M_t = K*M_r."""
        return dataclasses.replace(self, users=users, rf_tx=users * self.rf_rx)
