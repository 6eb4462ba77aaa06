"""Interference-constrained power loading and rate/interference evaluation.

The allocation maximizes sum_{k,d} log2(1 + P * g_sig) subject to
sum_{k,d} P * g_leak <= i_th and P >= 0, whose KKT solution is the
water-filling-like form P = max(0, 1/(lam * g_leak) - 1/g_sig) with a single
multiplier lam chosen to spend the whole interference budget.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# streams with signal gain at or below this are never allocated power
ADMISSION_FLOOR = 1e-12
# default per-stream power cap, only reached when a stream leaks nothing
DEFAULT_POWER_CAP = 1e6

_BISECTION_REL_WIDTH = 1e-10


@dataclass(frozen=True)
class StreamGains:
    """Per-stream scalars the allocation works on.

    signal_gains: (K, D) effective channel power gains (noise-normalized).
    interference_gains: (K, D) power gains toward the protected receiver.
    """

    signal_gains: np.ndarray
    interference_gains: np.ndarray

    def __post_init__(self):
        sig = np.asarray(self.signal_gains, dtype=np.float64)
        leak = np.asarray(self.interference_gains, dtype=np.float64)
        if sig.shape != leak.shape:
            raise ValueError(
                f"gain arrays disagree in shape: {sig.shape} vs {leak.shape}")
        if not (np.all(np.isfinite(sig)) and np.all(np.isfinite(leak))):
            raise ValueError("gains must be finite")
        if np.any(sig < 0) or np.any(leak < 0):
            raise ValueError("gains must be nonnegative")
        object.__setattr__(self, "signal_gains", sig)
        object.__setattr__(self, "interference_gains", leak)


@dataclass(frozen=True)
class PowerAllocation:
    """Solution of one interference-constrained loading problem.

    powers: same shape as the input gains, all entries >= 0.
    multiplier: Lagrange multiplier of the interference constraint (0 when
        the constraint cannot bind, i.e. nothing leaks).
    total_interference: sum of powers * interference_gains.
    sum_rate: sum of log2(1 + powers * signal_gains).
    cap_active: True when any stream was clipped at the power cap.
    """

    powers: np.ndarray
    multiplier: float
    total_interference: float
    sum_rate: float
    cap_active: bool = False


def interference_gains(precoders: list[np.ndarray], rf_precoder: np.ndarray,
                       pu_channel: np.ndarray) -> np.ndarray:
    """Per-stream power gain toward the primary receiver.

    Entry (k, d) is || pu_channel @ rf_precoder @ precoders[k][:, d] ||^2,
    i.e. the diagonal of the stream Gram matrix at the primary receiver, so
    the result is real and nonnegative by construction.
    """
    if not precoders:
        raise ValueError("need at least one precoder")
    rf_precoder = np.asarray(rf_precoder)
    pu_channel = np.asarray(pu_channel)
    if pu_channel.shape[1] != rf_precoder.shape[0]:
        raise ValueError(
            f"primary channel has {pu_channel.shape[1]} columns but the RF "
            f"precoder has {rf_precoder.shape[0]} rows")
    front = pu_channel @ rf_precoder
    shapes = {np.asarray(b).shape for b in precoders}
    if len(shapes) != 1:
        raise ValueError(f"precoders disagree in shape: {sorted(shapes)}")
    rows, _ = shapes.pop()
    if rows != front.shape[1]:
        raise ValueError(
            f"precoders have {rows} rows but the RF precoder has "
            f"{front.shape[1]} columns")
    gains = [np.sum(np.abs(front @ np.asarray(b)) ** 2, axis=0)
             for b in precoders]
    return np.array(gains)


def total_interference(powers: np.ndarray, leak_gains: np.ndarray) -> float:
    """Aggregate interference sum(powers * leak_gains) at the primary receiver."""
    powers = np.asarray(powers, dtype=np.float64)
    leak_gains = np.asarray(leak_gains, dtype=np.float64)
    if powers.shape != leak_gains.shape:
        raise ValueError(
            f"shapes disagree: {powers.shape} vs {leak_gains.shape}")
    return float(np.sum(powers * leak_gains))


def sum_rate(powers: np.ndarray, signal_gains: np.ndarray) -> float:
    """Spectral efficiency sum(log2(1 + powers * signal_gains)) in bps/Hz."""
    powers = np.asarray(powers, dtype=np.float64)
    signal_gains = np.asarray(signal_gains, dtype=np.float64)
    if powers.shape != signal_gains.shape:
        raise ValueError(
            f"shapes disagree: {powers.shape} vs {signal_gains.shape}")
    if np.any(powers < 0):
        raise ValueError("powers must be nonnegative")
    return float(np.sum(np.log2(1.0 + powers * signal_gains)))


def _budget_spent(lam: float, sig: np.ndarray, leak: np.ndarray) -> float:
    powers = np.maximum(0.0, 1.0 / (lam * leak) - 1.0 / sig)
    return float(np.sum(powers * leak))


def optimal_power_allocation(gains: StreamGains, i_th: float,
                             p_max: float = DEFAULT_POWER_CAP) -> PowerAllocation:
    """Spend the interference budget i_th (linear) optimally across streams.

    The multiplier is bracketed by bisection (the spent budget is strictly
    decreasing in it) and then resolved in closed form on the final active
    set, so the budget is met to float precision.  Streams that leak nothing
    take the cap p_max; streams with signal gain <= 1e-12 stay off.
    """
    if not np.isfinite(i_th) or i_th < 0:
        raise ValueError(f"i_th must be finite and >= 0, got {i_th}")
    if not p_max > 0:
        raise ValueError(f"p_max must be > 0, got {p_max}")
    sig = gains.signal_gains
    leak = gains.interference_gains
    powers = np.zeros_like(sig)
    admitted = sig > ADMISSION_FLOOR

    if i_th == 0 or not np.any(admitted):
        deact = sig[admitted & (leak > 0)] / leak[admitted & (leak > 0)]
        lam = float(np.max(deact)) if deact.size else 0.0
        return PowerAllocation(powers=powers, multiplier=lam,
                               total_interference=0.0, sum_rate=0.0)

    free = admitted & (leak == 0)       # leak nothing: budget cannot bind them
    priced = admitted & (leak > 0)
    cap_active = bool(np.any(free))
    powers[free] = p_max

    lam = 0.0
    if np.any(priced):
        sig_p = sig[priced]
        leak_p = leak[priced]
        thresholds = sig_p / leak_p     # stream (k,d) is on iff lam < sig/leak
        lam_hi = float(np.max(thresholds))
        lam_lo = lam_hi / 2.0
        while _budget_spent(lam_lo, sig_p, leak_p) < i_th:
            lam_lo /= 2.0
            if lam_lo < 1e-300:
                break
        while lam_hi - lam_lo > _BISECTION_REL_WIDTH * lam_hi:
            mid = 0.5 * (lam_lo + lam_hi)
            if _budget_spent(mid, sig_p, leak_p) >= i_th:
                lam_lo = mid
            else:
                lam_hi = mid
        # closed form on the bracketed active set: for members,
        # P*leak = 1/lam - leak/sig, so lam = n_on / (i_th + sum(leak/sig))
        lam = 0.5 * (lam_lo + lam_hi)
        for _ in range(8):
            on = thresholds > lam
            if not np.any(on):
                break
            refined = float(np.sum(on)) / (
                i_th + float(np.sum(leak_p[on] / sig_p[on])))
            if refined == lam:
                break
            lam = refined
        powers[priced] = np.maximum(0.0, 1.0 / (lam * leak_p) - 1.0 / sig_p)

    clipped = powers > p_max
    if np.any(clipped):
        powers[clipped] = p_max
        cap_active = True
    return PowerAllocation(
        powers=powers,
        multiplier=lam,
        total_interference=total_interference(powers, leak),
        sum_rate=sum_rate(powers, sig),
        cap_active=cap_active,
    )
