"""Seeded Monte Carlo estimators for outage and pairing benefit.

Independent oracle for the analytic evaluators: positions come from the
operational pairing samplers, fading from per-user Gamma draws, spectral
efficiencies from the channel formulas with every noise term included.

Randomness is organized in fixed-size batches whose generators derive
from (master seed, batch index); each trial's draws are a pure function
of the seed and its batch slot, so estimates are bit-identical for a
given configuration no matter how batches are scheduled or distributed.
Within a batch the draw order is fixed: pair distances, then near-user
fading, then far-user fading.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import (
    FadingModel,
    LinkBudget,
    PowerSplit,
    SubcarrierPlan,
    multicarrier_spectral_efficiency,
    sinr_noma_far,
    sinr_noma_near,
    sinr_oma,
    spectral_efficiency,
)
from .pairing import PairingScheme, Thresholds, sample_pairs

__all__ = [
    "BATCH_SIZE",
    "TrialConfig",
    "McEstimate",
    "PairingBenefit",
    "estimate_outage_mc",
    "outage_cells_mc",
    "estimate_pairing_benefit",
    "empirical_distance_cdf",
    "collect_distances",
]

BATCH_SIZE = 8192

# two-sided 99% normal quantile
_Z99 = 2.5758293035489004

_CELLS = (("near", "noma"), ("near", "oma"), ("far", "noma"), ("far", "oma"))


@dataclass(frozen=True)
class TrialConfig:
    """Everything one simulation run needs, plus the master seed."""

    trials: int
    seed: int
    scheme: PairingScheme
    budget: LinkBudget
    split: PowerSplit
    fading: FadingModel
    thresholds: Thresholds | None = None
    plan: SubcarrierPlan | None = None
    target_near_bps_hz: float = 1.0
    target_far_bps_hz: float = 0.5

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError(f"trial count must be >= 1, got {self.trials}")
        if self.target_near_bps_hz <= 0 or self.target_far_bps_hz <= 0:
            raise ValueError("rate targets must be positive")


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    trials: int

    @classmethod
    def from_successes(cls, successes: int, trials: int) -> "McEstimate":
        p = successes / trials
        return cls(mean=p, stderr=math.sqrt(p * (1.0 - p) / trials), trials=trials)

    @property
    def ci99(self) -> tuple:
        return (self.mean - _Z99 * self.stderr, self.mean + _Z99 * self.stderr)


@dataclass(frozen=True)
class PairingBenefit:
    """Per-user rates of NOMA beating OMA, with the mean efficiency gaps."""

    near_rate: float
    far_rate: float
    near_gap_mean: float
    far_gap_mean: float
    trials: int


def _batch_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence((seed, index)))


def derive_seed(master: int, *indices: int) -> int:
    """Stable per-cell seed for grid sweeps.

    Mixing the cell indices through a SeedSequence keeps every cell's
    stream independent of evaluation order, so concurrent sweeps
    reproduce sequential results bit for bit.
    """
    ss = np.random.SeedSequence((master,) + tuple(indices))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _iter_batches(trials: int):
    for index, start in enumerate(range(0, trials, BATCH_SIZE)):
        yield index, min(BATCH_SIZE, trials - start)


def _draw_batch(config: TrialConfig, index: int, size: int):
    rng = _batch_rng(config.seed, index)
    d_near, d_far = sample_pairs(config.scheme, config.thresholds, rng, size)
    shape, scale = config.fading.gamma_shape, config.fading.gamma_scale
    if config.plan is None:
        chi_near = rng.gamma(shape, scale, size)
        chi_far = rng.gamma(shape, scale, size)
    else:
        chi_near = rng.gamma(shape, scale, (size, config.plan.count))
        chi_far = rng.gamma(shape, scale, (size, config.plan.count))
    return d_near, d_far, chi_near, chi_far


def _efficiency_cells(config: TrialConfig, d_near, d_far, chi_near, chi_far):
    """Spectral efficiency arrays for all (user, mode) cells of one batch."""
    out = {}
    if config.plan is None:
        out[("near", "noma")] = spectral_efficiency(
            sinr_noma_near(config.budget, config.split, chi_near, d_near), "noma")
        out[("near", "oma")] = spectral_efficiency(
            sinr_oma(config.budget, chi_near, d_near), "oma")
        out[("far", "noma")] = spectral_efficiency(
            sinr_noma_far(config.budget, config.split, chi_far, d_far), "noma")
        out[("far", "oma")] = spectral_efficiency(
            sinr_oma(config.budget, chi_far, d_far), "oma")
        return out
    for user, d, chi in (("near", d_near, chi_near), ("far", d_far, chi_far)):
        for mode in ("noma", "oma"):
            out[(user, mode)] = multicarrier_spectral_efficiency(
                config.plan, user, d, chi, config.budget, config.split, mode)
    return out


def outage_cells_mc(config: TrialConfig) -> dict:
    """Outage estimates for all four (user, mode) cells in one pass.

    All cells share the same draws, so a single simulation covers the
    whole comparison grid and stays consistent across cells.
    """
    targets = {"near": config.target_near_bps_hz, "far": config.target_far_bps_hz}
    counts = {cell: 0 for cell in _CELLS}
    for index, size in _iter_batches(config.trials):
        d_near, d_far, chi_near, chi_far = _draw_batch(config, index, size)
        cells = _efficiency_cells(config, d_near, d_far, chi_near, chi_far)
        for (user, mode), se in cells.items():
            counts[(user, mode)] += int(np.count_nonzero(se < targets[user]))
    return {cell: McEstimate.from_successes(n, config.trials)
            for cell, n in counts.items()}


def estimate_outage_mc(config: TrialConfig, user: str, mode: str) -> McEstimate:
    """Bernoulli outage estimate for one (user, mode) cell."""
    if user not in ("near", "far"):
        raise ValueError(f"user must be 'near' or 'far', got {user!r}")
    if mode not in ("noma", "oma"):
        raise ValueError(f"mode must be 'noma' or 'oma', got {mode!r}")
    return outage_cells_mc(config)[(user, mode)]


def estimate_pairing_benefit(config: TrialConfig) -> PairingBenefit:
    """Fractions of trials where NOMA beats OMA, per user, plus mean gaps."""
    wins = {"near": 0, "far": 0}
    gap_sums = {"near": 0.0, "far": 0.0}
    for index, size in _iter_batches(config.trials):
        d_near, d_far, chi_near, chi_far = _draw_batch(config, index, size)
        cells = _efficiency_cells(config, d_near, d_far, chi_near, chi_far)
        for user in ("near", "far"):
            gap = cells[(user, "noma")] - cells[(user, "oma")]
            wins[user] += int(np.count_nonzero(gap > 0.0))
            gap_sums[user] += float(gap.sum())
    n = config.trials
    return PairingBenefit(
        near_rate=wins["near"] / n,
        far_rate=wins["far"] / n,
        near_gap_mean=gap_sums["near"] / n,
        far_gap_mean=gap_sums["far"] / n,
        trials=n,
    )


def collect_distances(config: TrialConfig, user: str) -> np.ndarray:
    """All sampled distances for one user, in trial order."""
    if user not in ("near", "far"):
        raise ValueError(f"user must be 'near' or 'far', got {user!r}")
    chunks = []
    for index, size in _iter_batches(config.trials):
        rng = _batch_rng(config.seed, index)
        d_near, d_far = sample_pairs(config.scheme, config.thresholds, rng, size)
        chunks.append(d_near if user == "near" else d_far)
    return np.concatenate(chunks)


def empirical_distance_cdf(config: TrialConfig, user: str, grid) -> np.ndarray:
    """Empirical CDF of one user's sampled distance on the given grid."""
    grid = np.asarray(grid, dtype=float)
    samples = np.sort(collect_distances(config, user))
    hits = np.searchsorted(samples, grid.ravel(), side="right")
    return (hits / config.trials).reshape(grid.shape)
