"""User-pairing schemes and their near/far distance distributions.

Users are dropped uniformly on a disc of radius R around the transmitter.
A pairing scheme picks two of them for NOMA service; the schemes differ
only in how the near and far distances are distributed:

* ``random``: two uniform drops, ordered (min, max).
* ``nearest-farthest``: nearest and farthest of an N-user population.
* ``proposed``: near user inside the guarantee radius ``near_max``, far
  user beyond ``far_min``, both otherwise uniform. The two radii are the
  power-split dependent thresholds below, chosen so NOMA beats the OMA
  baseline for both users at zero thermal noise.
* ``enhanced``: nearest of the population as the near user, far user as
  in ``proposed``.

Samplers are deliberately operational (uniform-disc draws, min/max,
rejection) rather than inverse-CDF transforms of the analytic laws, so
Monte Carlo stays an independent check on the closed-form distributions.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "RANDOM",
    "NEAREST_FARTHEST",
    "PROPOSED",
    "ENHANCED",
    "SCHEME_KINDS",
    "PairingScheme",
    "Thresholds",
    "SamplingExhausted",
    "threshold_near",
    "threshold_far",
    "thresholds_for",
    "multicarrier_thresholds",
    "DistanceLaw",
    "distance_laws",
    "sample_pairs",
    "sample_pair",
]

RANDOM = "random"
NEAREST_FARTHEST = "nearest-farthest"
PROPOSED = "proposed"
ENHANCED = "enhanced"
SCHEME_KINDS = (RANDOM, NEAREST_FARTHEST, PROPOSED, ENHANCED)

# rejection sampling gives up after this many full redraw rounds
_MAX_REJECTION_ROUNDS = 4096
# internal cap on elements drawn at once when a population is involved
_CHUNK_ELEMENTS = 1 << 25


class SamplingExhausted(RuntimeError):
    """Rejection sampling failed to fill a region within the redraw budget."""


@dataclass(frozen=True)
class PairingScheme:
    """Scheme tag plus the disc radius and, where needed, population size."""

    kind: str
    radius: float
    population: int | None = None

    def __post_init__(self):
        if self.kind not in SCHEME_KINDS:
            raise ValueError(f"unknown scheme kind {self.kind!r}")
        if self.radius <= 0:
            raise ValueError("disc radius must be positive")
        if self.kind in (NEAREST_FARTHEST, ENHANCED):
            if self.population is None or self.population < 2:
                raise ValueError(f"{self.kind} needs a population of at least 2")


@dataclass(frozen=True)
class Thresholds:
    """Guarantee radii of the proposed scheme.

    ``near_max``: the near user must sit inside this radius for its NOMA
    rate to beat OMA. ``far_min``: the far user must sit beyond this
    radius. ``near_max > far_min > 0`` holds for every valid power split.
    """

    near_max: float
    far_min: float

    def __post_init__(self):
        if not self.far_min > 0:
            raise ValueError("far_min must be positive")
        if not self.near_max > self.far_min:
            raise ValueError(
                f"near_max ({self.near_max}) must exceed far_min ({self.far_min})")


def _check_split_coefficient(near_fraction: float):
    if not 0.0 < near_fraction < 0.5:
        raise ValueError(
            f"near-user power fraction must lie in (0, 0.5), got {near_fraction}")


def threshold_near(near_fraction: float, absorption_per_m: float) -> float:
    """Radius bound for the near user: ln((1-a)/(1-2a)) / k."""
    _check_split_coefficient(near_fraction)
    if absorption_per_m <= 0:
        raise ValueError("absorption coefficient must be positive")
    return math.log((1.0 - near_fraction) / (1.0 - 2.0 * near_fraction)) / absorption_per_m


def threshold_far(near_fraction: float, absorption_per_m: float) -> float:
    """Radius bound for the far user: ln(a^2/(1-2a) + 1) / k."""
    _check_split_coefficient(near_fraction)
    if absorption_per_m <= 0:
        raise ValueError("absorption coefficient must be positive")
    return math.log(near_fraction ** 2 / (1.0 - 2.0 * near_fraction) + 1.0) / absorption_per_m


def thresholds_for(near_fraction: float, absorption_per_m: float) -> Thresholds:
    return Thresholds(near_max=threshold_near(near_fraction, absorption_per_m),
                      far_min=threshold_far(near_fraction, absorption_per_m))


def multicarrier_thresholds(near_fraction: float, absorption_list) -> Thresholds:
    """Guarantee radii that hold on every subcarrier simultaneously.

    The near bound tightens with k, so the binding value is the minimum
    over subcarriers (largest k); the far bound loosens with k, so the
    binding value is the maximum (smallest k).
    """
    ks = [float(k) for k in absorption_list]
    if not ks:
        raise ValueError("absorption list must be nonempty")
    near = min(threshold_near(near_fraction, k) for k in ks)
    far = max(threshold_far(near_fraction, k) for k in ks)
    return Thresholds(near_max=near, far_min=far)


# ---------------------------------------------------------------------------
# analytic distance laws
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DistanceLaw:
    """Density, distribution function, and support of one user distance.

    ``cdf`` clamps outside the support (0 below, 1 above); ``pdf`` is 0
    there. Both are vectorised.
    """

    pdf: Callable
    cdf: Callable
    lo: float
    hi: float


def _uniform_disc_cdf(radius: float):
    def cdf(d):
        u = np.clip(np.asarray(d, dtype=float) / radius, 0.0, 1.0) ** 2
        return u
    return cdf


def _law_from_cdf(cdf_core, pdf_core, lo: float, hi: float) -> DistanceLaw:
    def cdf(d):
        d = np.asarray(d, dtype=float)
        out = np.where(d <= lo, 0.0, np.where(d >= hi, 1.0, cdf_core(np.clip(d, lo, hi))))
        return out if out.ndim else float(out)

    def pdf(d):
        d = np.asarray(d, dtype=float)
        inside = (d >= lo) & (d <= hi)
        out = np.where(inside, pdf_core(np.clip(d, lo, hi)), 0.0)
        return out if out.ndim else float(out)

    return DistanceLaw(pdf=pdf, cdf=cdf, lo=lo, hi=hi)


def _min_of_n_law(radius: float, n: int) -> DistanceLaw:
    def cdf_core(d):
        u = (d / radius) ** 2
        return 1.0 - (1.0 - u) ** n

    def pdf_core(d):
        u = (d / radius) ** 2
        return n * (1.0 - u) ** (n - 1) * 2.0 * d / radius ** 2

    return _law_from_cdf(cdf_core, pdf_core, 0.0, radius)


def _max_of_n_law(radius: float, n: int) -> DistanceLaw:
    def cdf_core(d):
        return ((d / radius) ** 2) ** n

    def pdf_core(d):
        u = (d / radius) ** 2
        return n * u ** (n - 1) * 2.0 * d / radius ** 2

    return _law_from_cdf(cdf_core, pdf_core, 0.0, radius)


def _truncated_near_law(limit: float) -> DistanceLaw:
    def cdf_core(d):
        return (d / limit) ** 2

    def pdf_core(d):
        return 2.0 * d / limit ** 2

    return _law_from_cdf(cdf_core, pdf_core, 0.0, limit)


def _truncated_far_law(inner: float, radius: float) -> DistanceLaw:
    norm = radius ** 2 - inner ** 2

    def cdf_core(d):
        return (d ** 2 - inner ** 2) / norm

    def pdf_core(d):
        return 2.0 * d / norm

    return _law_from_cdf(cdf_core, pdf_core, inner, radius)


def _conditioned_min_law(radius: float, n: int, limit: float) -> DistanceLaw:
    base = _min_of_n_law(radius, n)
    norm = float(base.cdf(limit))

    def cdf_core(d):
        return base.cdf(d) / norm

    def pdf_core(d):
        return base.pdf(d) / norm

    return _law_from_cdf(cdf_core, pdf_core, 0.0, limit)


def _effective_near_limit(scheme: PairingScheme, thresholds: Thresholds) -> float:
    if thresholds.near_max > scheme.radius:
        warnings.warn(
            "near-user guarantee radius exceeds the disc radius; "
            "clipping the near region to the disc")
        return scheme.radius
    return thresholds.near_max


def distance_laws(scheme: PairingScheme, thresholds: Thresholds | None = None,
                  *, truncate_enhanced_near: bool = False):
    """Analytic (near, far) distance laws of a pairing scheme.

    ``thresholds`` is required by the proposed and enhanced schemes. The
    enhanced near user keeps the plain nearest-of-N law by default; pass
    ``truncate_enhanced_near=True`` for the variant conditioned inside the
    near guarantee radius.
    """
    if scheme.kind == RANDOM:
        return _min_of_n_law(scheme.radius, 2), _max_of_n_law(scheme.radius, 2)
    if scheme.kind == NEAREST_FARTHEST:
        n = scheme.population
        return _min_of_n_law(scheme.radius, n), _max_of_n_law(scheme.radius, n)
    if thresholds is None:
        raise ValueError(f"{scheme.kind} scheme needs thresholds")
    if thresholds.far_min >= scheme.radius:
        raise ValueError(
            f"far guarantee radius ({thresholds.far_min:.3f}) leaves no far region "
            f"inside the disc (R={scheme.radius})")
    near_limit = _effective_near_limit(scheme, thresholds)
    far = _truncated_far_law(thresholds.far_min, scheme.radius)
    if scheme.kind == PROPOSED:
        return _truncated_near_law(near_limit), far
    # enhanced
    if truncate_enhanced_near:
        return _conditioned_min_law(scheme.radius, scheme.population, near_limit), far
    return _min_of_n_law(scheme.radius, scheme.population), far


# ---------------------------------------------------------------------------
# operational samplers
# ---------------------------------------------------------------------------

def _disc_radii(rng: np.random.Generator, radius: float, shape):
    return radius * np.sqrt(rng.random(shape))


def _population_min_max(rng, radius: float, size: int, n: int, want_max: bool):
    """Min (and optionally max) distance of an n-user drop, chunked.

    Chunking keeps peak memory bounded for large populations; the chunk
    policy is fixed so the draw layout is reproducible for a given size.
    """
    rows = max(1, _CHUNK_ELEMENTS // n)
    mins = np.empty(size)
    maxs = np.empty(size) if want_max else None
    for start in range(0, size, rows):
        stop = min(start + rows, size)
        block = _disc_radii(rng, radius, (stop - start, n))
        mins[start:stop] = block.min(axis=1)
        if want_max:
            maxs[start:stop] = block.max(axis=1)
    return mins, maxs


def _reject_into(rng, radius: float, size: int, accept):
    """Uniform-disc radii conditioned on ``accept`` by rejection.

    Candidates are drawn in blocks and the accepted ones fill the output
    in order; accepted candidates are independent draws from the
    conditioned law, so first-fit assignment preserves it. Block sizes
    adapt to the observed acceptance rate so thin target regions cost
    O(size / acceptance) draws instead of a round per pending slot. The
    layout is a pure function of the generator stream, keeping results
    reproducible for a given seed.
    """
    out = np.empty(size)
    filled = 0
    drawn = 0
    kept = 0
    rounds = 0
    while filled < size:
        rounds += 1
        if rounds > _MAX_REJECTION_ROUNDS:
            raise SamplingExhausted(
                f"{size - filled} of {size} draws still unfilled after "
                f"{_MAX_REJECTION_ROUNDS} candidate blocks")
        if kept == 0 and drawn >= max(4 * size, 1 << 20):
            raise SamplingExhausted(
                f"no candidate of {drawn} landed in the target region")
        if drawn == 0:
            n_draw = size
        else:
            rate = max(kept / drawn, 1.0 / drawn)
            n_draw = int((size - filled) / rate * 1.5) + 1
            n_draw = min(_CHUNK_ELEMENTS, max(n_draw, size - filled))
        cand = _disc_radii(rng, radius, n_draw)
        good = cand[accept(cand)]
        drawn += n_draw
        kept += len(good)
        take = min(len(good), size - filled)
        out[filled:filled + take] = good[:take]
        filled += take
    return out


def sample_pairs(scheme: PairingScheme, thresholds: Thresholds | None,
                 rng: np.random.Generator, size: int,
                 *, strict_order: bool = False):
    """Draw ``size`` (near, far) distance pairs under a pairing scheme.

    Implements the selection procedures, not the derived laws: uniform
    drops with min/max ordering for ``random`` and ``nearest-farthest``,
    rejection into the guarantee regions for ``proposed``, nearest-of-N
    plus far-region rejection for ``enhanced``.

    For the region-based schemes the two users are drawn independently,
    exactly as the analytic marginal laws assume, so in the sliver where
    the guarantee regions overlap a far draw can land closer than the
    near draw. The per-user rate guarantees only need region membership,
    not ordering; ``strict_order=True`` redraws such pairs, which
    perturbs the marginals slightly.
    """
    if size < 1:
        raise ValueError("size must be at least 1")
    if scheme.kind == RANDOM:
        r = _disc_radii(rng, scheme.radius, (size, 2))
        return r.min(axis=1), r.max(axis=1)
    if scheme.kind == NEAREST_FARTHEST:
        mins, maxs = _population_min_max(rng, scheme.radius, size,
                                         scheme.population, want_max=True)
        return mins, maxs
    if thresholds is None:
        raise ValueError(f"{scheme.kind} scheme needs thresholds")
    if thresholds.far_min >= scheme.radius:
        raise ValueError("far guarantee radius leaves no far region inside the disc")
    near_limit = _effective_near_limit(scheme, thresholds)
    far_min = thresholds.far_min

    def draw_near(n_draw):
        if scheme.kind == PROPOSED:
            return _reject_into(rng, scheme.radius, n_draw,
                                lambda r: r <= near_limit)
        mins, _ = _population_min_max(rng, scheme.radius, n_draw,
                                      scheme.population, want_max=False)
        return mins

    def draw_far(n_draw):
        return _reject_into(rng, scheme.radius, n_draw, lambda r: r > far_min)

    d_near = draw_near(size)
    d_far = draw_far(size)
    if strict_order:
        bad = d_near >= d_far
        rounds = 0
        while bad.any():
            rounds += 1
            if rounds > _MAX_REJECTION_ROUNDS:
                raise SamplingExhausted("could not order pairs within the redraw budget")
            n_bad = int(bad.sum())
            d_near[bad] = draw_near(n_bad)
            d_far[bad] = draw_far(n_bad)
            bad = d_near >= d_far
    return d_near, d_far


def sample_pair(scheme: PairingScheme, thresholds: Thresholds | None,
                rng: np.random.Generator, *, strict_order: bool = False):
    """Single (near, far) distance pair; see :func:`sample_pairs`."""
    d1, d2 = sample_pairs(scheme, thresholds, rng, 1, strict_order=strict_order)
    return float(d1[0]), float(d2[0])
