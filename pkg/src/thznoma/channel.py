"""THz line-of-sight channel, SINR, and spectral-efficiency models.

The deterministic channel gain is Beer-Lambert over free space,
zeta * d^-2 * exp(-k d) with zeta = (c / (4 pi f))^2, and molecular
re-radiation contributes a distance-dependent absorption noise term
G_t G_r zeta P d^-2 (1 - exp(-k d)) chi on top of thermal noise. Two
users share a carrier in the NOMA mode (power fractions a1 + a2 = 1,
a1 < 0.5), with the near user decoding after perfect interference
cancellation; the OMA baseline gives each user the full power in half
the time slot.

All formula functions broadcast over numpy arrays so the Monte Carlo
engine can evaluate whole batches at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SPEED_OF_LIGHT",
    "LinkBudget",
    "PowerSplit",
    "FadingModel",
    "SubcarrierPlan",
    "path_gain",
    "sinr_noma_near",
    "sinr_noma_far",
    "sinr_oma",
    "spectral_efficiency",
    "multicarrier_spectral_efficiency",
]

# kept equal to the absorption-catalog constant; a unit test pins this
SPEED_OF_LIGHT = 2.9979e8


@dataclass(frozen=True)
class LinkBudget:
    """Transmit power, antenna gains (linear), noise floor, and carrier.

    ``absorption_per_m`` is the molecular absorption coefficient k at the
    carrier; downstream math depends on the channel only through the pair
    (frequency, k).
    """

    power_w: float
    gain_tx: float
    gain_rx: float
    noise_w: float
    frequency_hz: float
    absorption_per_m: float

    def __post_init__(self):
        if self.power_w <= 0:
            raise ValueError("transmit power must be positive")
        if self.gain_tx <= 0 or self.gain_rx <= 0:
            raise ValueError("antenna gains must be positive")
        if self.noise_w < 0:
            raise ValueError("noise power must be nonnegative")
        if self.frequency_hz <= 0:
            raise ValueError("carrier frequency must be positive")
        if self.absorption_per_m < 0:
            raise ValueError("absorption coefficient must be nonnegative")

    @classmethod
    def from_db_gains(cls, power_w: float, gain_tx_db: float, gain_rx_db: float,
                      noise_w: float, frequency_hz: float,
                      absorption_per_m: float) -> "LinkBudget":
        """Construct with antenna gains given in dB (converted once, here)."""
        return cls(power_w=power_w,
                   gain_tx=10.0 ** (gain_tx_db / 10.0),
                   gain_rx=10.0 ** (gain_rx_db / 10.0),
                   noise_w=noise_w,
                   frequency_hz=frequency_hz,
                   absorption_per_m=absorption_per_m)

    def free_space_factor(self, frequency_hz: float | None = None) -> float:
        """(c / (4 pi f))^2 for this carrier, or for an explicit frequency."""
        f = self.frequency_hz if frequency_hz is None else frequency_hz
        return (SPEED_OF_LIGHT / (4.0 * math.pi * f)) ** 2


@dataclass(frozen=True)
class PowerSplit:
    """NOMA power fractions: ``near`` + ``far`` = 1 with 0 < near < 0.5."""

    near: float
    far: float

    def __post_init__(self):
        if not 0.0 < self.near < 0.5:
            raise ValueError(f"near-user power fraction must lie in (0, 0.5), got {self.near}")
        if abs(self.near + self.far - 1.0) > 1e-12:
            raise ValueError("power fractions must sum to 1")

    @classmethod
    def from_near(cls, near: float) -> "PowerSplit":
        return cls(near=near, far=1.0 - near)


@dataclass(frozen=True)
class FadingModel:
    """Gamma-distributed channel power.

    With ``parameterization="scale"`` the fading power is Gamma with shape
    ``m`` and scale ``power`` (mean m * power); the analytic outage
    expressions are written against this convention and the Monte Carlo
    pin test confirms it. ``"mean"`` instead treats ``power`` as the mean
    (scale power / m), kept selectable for comparison.
    """

    m: float
    power: float = 1.0
    parameterization: str = "scale"

    def __post_init__(self):
        if self.m < 0.5:
            raise ValueError(f"shape parameter must be >= 0.5, got {self.m}")
        if self.power <= 0:
            raise ValueError("fading power must be positive")
        if self.parameterization not in ("scale", "mean"):
            raise ValueError(f"unknown parameterization {self.parameterization!r}")

    @property
    def gamma_shape(self) -> float:
        return self.m

    @property
    def gamma_scale(self) -> float:
        if self.parameterization == "scale":
            return self.power
        return self.power / self.m


@dataclass(frozen=True)
class SubcarrierPlan:
    """Frequencies and per-subcarrier absorption coefficients."""

    frequencies_hz: tuple
    absorption_per_m: tuple

    def __post_init__(self):
        freqs = tuple(float(f) for f in self.frequencies_hz)
        ks = tuple(float(k) for k in self.absorption_per_m)
        object.__setattr__(self, "frequencies_hz", freqs)
        object.__setattr__(self, "absorption_per_m", ks)
        if len(freqs) != len(ks):
            raise ValueError("frequency and absorption lists must have equal length")
        if not freqs:
            raise ValueError("plan must contain at least one subcarrier")
        if any(f <= 0 for f in freqs):
            raise ValueError("frequencies must be positive")
        if any(k <= 0 for k in ks):
            raise ValueError("absorption coefficients must be positive")
        if any(b <= a for a, b in zip(freqs, freqs[1:])):
            raise ValueError("frequencies must be strictly increasing")

    @property
    def count(self) -> int:
        return len(self.frequencies_hz)

    def subset(self, n: int) -> "SubcarrierPlan":
        """Plan restricted to the first ``n`` subcarriers."""
        if not 1 <= n <= self.count:
            raise ValueError(f"subset size must lie in [1, {self.count}], got {n}")
        return SubcarrierPlan(self.frequencies_hz[:n], self.absorption_per_m[:n])


def path_gain(budget: LinkBudget, distance_m):
    """Deterministic LoS gain zeta * d^-2 * exp(-k d)."""
    d = np.asarray(distance_m, dtype=float)
    if np.any(d <= 0):
        raise ValueError("distance must be positive")
    g = budget.free_space_factor() * np.exp(-budget.absorption_per_m * d) / d ** 2
    return g if g.ndim else float(g)


def _safe_ratio(num, den):
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(den > 0.0, num / den,
                       np.where(num > 0.0, np.inf, 0.0))
    return out if out.ndim else float(out)


def sinr_noma_near(budget: LinkBudget, split: PowerSplit, chi, distance_m):
    """Near-user NOMA SINR after perfect cancellation of the far signal.

    The molecular absorption noise seen by this user is scaled by the
    near-user power fraction, matching the signal model it came from; at
    zero thermal noise the fraction cancels and the SINR collapses to
    exp(-k d) / (1 - exp(-k d)) independent of the fading draw.
    """
    d = np.asarray(distance_m, dtype=float)
    if np.any(d <= 0):
        raise ValueError("distance must be positive")
    amp = budget.gain_tx * budget.gain_rx * budget.free_space_factor() * budget.power_w
    attn = np.exp(-budget.absorption_per_m * d)
    signal = split.near * amp * attn * chi / d ** 2
    noise = budget.noise_w + split.near * amp * (1.0 - attn) * np.asarray(chi) / d ** 2
    return _safe_ratio(signal, noise)


def sinr_noma_far(budget: LinkBudget, split: PowerSplit, chi, distance_m):
    """Far-user NOMA SINR with the near-user signal as interference."""
    d = np.asarray(distance_m, dtype=float)
    if np.any(d <= 0):
        raise ValueError("distance must be positive")
    amp = budget.gain_tx * budget.gain_rx * budget.free_space_factor() * budget.power_w
    attn = np.exp(-budget.absorption_per_m * d)
    chi = np.asarray(chi)
    signal = split.far * amp * attn * chi / d ** 2
    noise = (split.near * amp * attn * chi / d ** 2
             + budget.noise_w
             + amp * (1.0 - attn) * chi / d ** 2)
    return _safe_ratio(signal, noise)


def sinr_oma(budget: LinkBudget, chi, distance_m):
    """Single-user SINR with the full power budget (OMA baseline)."""
    d = np.asarray(distance_m, dtype=float)
    if np.any(d <= 0):
        raise ValueError("distance must be positive")
    amp = budget.gain_tx * budget.gain_rx * budget.free_space_factor() * budget.power_w
    attn = np.exp(-budget.absorption_per_m * d)
    chi = np.asarray(chi)
    signal = amp * attn * chi / d ** 2
    noise = budget.noise_w + amp * (1.0 - attn) * chi / d ** 2
    return _safe_ratio(signal, noise)


def spectral_efficiency(sinr, mode: str):
    """bps/Hz from an SINR: log2(1 + s), halved in the OMA mode.

    The OMA factor 1/2 reflects each user holding the channel for half
    the unit time slot.
    """
    if mode not in ("noma", "oma"):
        raise ValueError(f"mode must be 'noma' or 'oma', got {mode!r}")
    se = np.log2(1.0 + np.asarray(sinr, dtype=float))
    if mode == "oma":
        se = 0.5 * se
    return se if se.ndim else float(se)


def multicarrier_spectral_efficiency(plan: SubcarrierPlan, user: str, distance_m,
                                     fadings, budget: LinkBudget, split: PowerSplit,
                                     mode: str = "noma"):
    """Summed per-subcarrier spectral efficiency for one user.

    ``fadings`` carries one Gamma power draw per subcarrier in its last
    axis and broadcasts against ``distance_m`` in the leading axes. Each
    subcarrier reuses the budget with its own (frequency, absorption)
    pair.
    """
    if user not in ("near", "far"):
        raise ValueError(f"user must be 'near' or 'far', got {user!r}")
    if mode not in ("noma", "oma"):
        raise ValueError(f"mode must be 'noma' or 'oma', got {mode!r}")
    chi = np.asarray(fadings, dtype=float)
    if chi.shape[-1] != plan.count:
        raise ValueError(
            f"fadings last axis ({chi.shape[-1]}) must match the plan size ({plan.count})")
    d = np.asarray(distance_m, dtype=float)[..., None]
    if np.any(d <= 0):
        raise ValueError("distance must be positive")
    freqs = np.array(plan.frequencies_hz)
    ks = np.array(plan.absorption_per_m)
    zeta = (SPEED_OF_LIGHT / (4.0 * math.pi * freqs)) ** 2
    amp = budget.gain_tx * budget.gain_rx * budget.power_w * zeta
    attn = np.exp(-ks * d)
    absorb = amp * (1.0 - attn) * chi / d ** 2
    if mode == "oma":
        signal = amp * attn * chi / d ** 2
        noise = budget.noise_w + absorb
    elif user == "near":
        signal = split.near * amp * attn * chi / d ** 2
        noise = budget.noise_w + split.near * amp * (1.0 - attn) * chi / d ** 2
    else:
        signal = split.far * amp * attn * chi / d ** 2
        noise = split.near * amp * attn * chi / d ** 2 + budget.noise_w + absorb
    sinr = _safe_ratio(signal, noise)
    se = np.log2(1.0 + np.asarray(sinr)).sum(axis=-1)
    if mode == "oma":
        se = 0.5 * se
    return se if np.ndim(se) else float(se)
