"""Guarantee radii, distance laws, and the pairing samplers."""

import math

import numpy as np
import pytest

from thznoma.numerics import integrate_finite
from thznoma.pairing import (
    ENHANCED,
    NEAREST_FARTHEST,
    PROPOSED,
    RANDOM,
    PairingScheme,
    SamplingExhausted,
    Thresholds,
    _reject_into,
    distance_laws,
    multicarrier_thresholds,
    sample_pair,
    sample_pairs,
    threshold_far,
    threshold_near,
    thresholds_for,
)

REFERENCE_KS = (0.0357, 0.0400, 0.0446, 0.0494, 0.0545, 0.0598)
RADIUS = 60.0


def ks_distance(samples, cdf):
    """Two-sided Kolmogorov-Smirnov statistic of samples against a CDF."""
    x = np.sort(samples)
    n = len(x)
    f = cdf(x)
    upper = np.max(np.arange(1, n + 1) / n - f)
    lower = np.max(f - np.arange(0, n) / n)
    return max(upper, lower)


# ---------------------------------------------------------------------------
# guarantee radii
# ---------------------------------------------------------------------------

def test_threshold_anchor_values():
    thr = thresholds_for(0.33, 0.05)
    assert thr.near_max == pytest.approx(13.566641895496092, rel=1e-12)
    assert thr.far_min == pytest.approx(5.5570905635535865, rel=1e-12)


def test_threshold_closed_forms():
    a, k = 0.2, 0.07
    assert threshold_near(a, k) == pytest.approx(math.log(0.8 / 0.6) / k, rel=1e-12)
    assert threshold_far(a, k) == pytest.approx(math.log(0.04 / 0.6 + 1.0) / k,
                                                rel=1e-12)


def test_thresholds_vanish_with_power_split():
    # both radii collapse to zero as the near user's share goes to zero
    for k in (0.01, 0.05, 0.1):
        thr = thresholds_for(1e-6, k)
        assert thr.near_max < 2e-4
        assert 0.0 < thr.far_min < thr.near_max


def test_thresholds_scale_inversely_with_absorption():
    thr1 = thresholds_for(0.33, 0.05)
    thr2 = thresholds_for(0.33, 0.025)
    assert thr2.near_max == pytest.approx(2.0 * thr1.near_max, rel=1e-12)
    assert thr2.far_min == pytest.approx(2.0 * thr1.far_min, rel=1e-12)


def test_threshold_ordering_over_split_range():
    for a in np.arange(0.01, 0.50, 0.01):
        thr = thresholds_for(float(a), 0.05)
        assert thr.near_max > thr.far_min > 0.0


def test_threshold_argument_validation():
    with pytest.raises(ValueError):
        threshold_near(0.5, 0.05)
    with pytest.raises(ValueError):
        threshold_near(0.33, 0.0)
    with pytest.raises(ValueError):
        Thresholds(near_max=1.0, far_min=2.0)


def test_multicarrier_threshold_anchors():
    thr = multicarrier_thresholds(0.33, REFERENCE_KS)
    assert thr.near_max == pytest.approx(11.343346066468305, rel=1e-12)
    assert thr.far_min == pytest.approx(7.783040004977012, rel=1e-12)
    # binding subcarriers: largest k for the near bound, smallest for far
    assert thr.near_max == pytest.approx(threshold_near(0.33, max(REFERENCE_KS)))
    assert thr.far_min == pytest.approx(threshold_far(0.33, min(REFERENCE_KS)))


def test_multicarrier_threshold_single_entry():
    thr = multicarrier_thresholds(0.33, [0.05])
    single = thresholds_for(0.33, 0.05)
    assert thr.near_max == single.near_max
    assert thr.far_min == single.far_min


# ---------------------------------------------------------------------------
# analytic distance laws
# ---------------------------------------------------------------------------

def law_pairs():
    thr = thresholds_for(0.33, 0.05)
    yield distance_laws(PairingScheme(RANDOM, RADIUS))
    yield distance_laws(PairingScheme(NEAREST_FARTHEST, RADIUS, population=300))
    yield distance_laws(PairingScheme(PROPOSED, RADIUS), thr)
    yield distance_laws(PairingScheme(ENHANCED, RADIUS, population=300), thr)


def test_laws_are_proper_distributions():
    for near, far in law_pairs():
        for law in (near, far):
            assert law.cdf(law.lo) == 0.0
            assert law.cdf(law.hi) == pytest.approx(1.0, abs=1e-12)
            grid = np.linspace(law.lo, law.hi, 300)
            vals = law.cdf(grid)
            assert np.all(np.diff(vals) >= -1e-12)
            mass = integrate_finite(law.pdf, law.lo, law.hi)
            assert mass == pytest.approx(1.0, abs=1e-7)


def test_random_law_order_statistics():
    near, far = distance_laws(PairingScheme(RANDOM, RADIUS))
    # min and max of two uniform-disc drops: 1-(1-u)^2 and u^2 with u=(d/R)^2
    d = 30.0
    u = (d / RADIUS) ** 2
    assert near.cdf(d) == pytest.approx(1.0 - (1.0 - u) ** 2, rel=1e-12)
    assert far.cdf(d) == pytest.approx(u ** 2, rel=1e-12)
    assert (near.lo, near.hi) == (0.0, RADIUS)


def test_nearest_farthest_two_users_matches_random():
    rand = distance_laws(PairingScheme(RANDOM, RADIUS))
    nf = distance_laws(PairingScheme(NEAREST_FARTHEST, RADIUS, population=2))
    grid = np.linspace(0.0, RADIUS, 50)
    for a, b in zip(rand, nf):
        np.testing.assert_allclose(a.cdf(grid), b.cdf(grid), atol=1e-14)


def test_proposed_law_supports():
    thr = thresholds_for(0.33, 0.05)
    near, far = distance_laws(PairingScheme(PROPOSED, RADIUS), thr)
    assert (near.lo, near.hi) == (0.0, thr.near_max)
    assert (far.lo, far.hi) == (thr.far_min, RADIUS)
    assert near.cdf(thr.near_max) == pytest.approx(1.0)
    assert far.cdf(thr.far_min) == 0.0
    # truncated uniform-disc shape inside the support
    d = 0.5 * thr.near_max
    assert near.cdf(d) == pytest.approx((d / thr.near_max) ** 2, rel=1e-12)
    d2 = 30.0
    expected = (d2 ** 2 - thr.far_min ** 2) / (RADIUS ** 2 - thr.far_min ** 2)
    assert far.cdf(d2) == pytest.approx(expected, rel=1e-12)


def test_enhanced_near_law_defaults_to_plain_minimum():
    thr = thresholds_for(0.33, 0.05)
    scheme = PairingScheme(ENHANCED, RADIUS, population=300)
    near, _ = distance_laws(scheme, thr)
    nf_near, _ = distance_laws(PairingScheme(NEAREST_FARTHEST, RADIUS, population=300))
    grid = np.linspace(0.0, RADIUS, 50)
    np.testing.assert_allclose(near.cdf(grid), nf_near.cdf(grid), atol=1e-14)


def test_enhanced_near_law_truncated_variant():
    thr = thresholds_for(0.33, 0.05)
    scheme = PairingScheme(ENHANCED, RADIUS, population=300)
    near, _ = distance_laws(scheme, thr, truncate_enhanced_near=True)
    assert near.hi == thr.near_max
    assert near.cdf(thr.near_max) == pytest.approx(1.0)


def test_near_limit_clipped_to_disc():
    # small k pushes the near guarantee radius beyond the disc
    thr = thresholds_for(0.33, 0.01)
    assert thr.near_max > RADIUS
    scheme = PairingScheme(PROPOSED, RADIUS)
    with pytest.warns(UserWarning, match="clipping"):
        near, _ = distance_laws(scheme, thr)
    assert near.hi == RADIUS


def test_empty_far_region_rejected():
    # far guarantee radius beyond the disc leaves nothing to sample
    thr = thresholds_for(0.45, 0.001)
    assert thr.far_min > RADIUS
    scheme = PairingScheme(PROPOSED, RADIUS)
    with pytest.raises(ValueError, match="far"):
        distance_laws(scheme, thr)
    with pytest.raises(ValueError):
        sample_pairs(scheme, thr, np.random.default_rng(0), 10)


def test_laws_require_thresholds():
    with pytest.raises(ValueError):
        distance_laws(PairingScheme(PROPOSED, RADIUS))


def test_scheme_validation():
    with pytest.raises(ValueError):
        PairingScheme("closest", RADIUS)
    with pytest.raises(ValueError):
        PairingScheme(NEAREST_FARTHEST, RADIUS)
    with pytest.raises(ValueError):
        PairingScheme(ENHANCED, RADIUS, population=1)
    with pytest.raises(ValueError):
        PairingScheme(RANDOM, 0.0)


# ---------------------------------------------------------------------------
# samplers
# ---------------------------------------------------------------------------

def test_sampler_reproducible():
    thr = thresholds_for(0.33, 0.05)
    scheme = PairingScheme(PROPOSED, RADIUS)
    a = sample_pairs(scheme, thr, np.random.default_rng(42), 5000)
    b = sample_pairs(scheme, thr, np.random.default_rng(42), 5000)
    np.testing.assert_array_equal(a[0], b[0])
    np.testing.assert_array_equal(a[1], b[1])
    c = sample_pairs(scheme, thr, np.random.default_rng(43), 5000)
    assert not np.array_equal(a[0], c[0])


def test_proposed_samples_respect_regions():
    thr = thresholds_for(0.33, 0.05)
    scheme = PairingScheme(PROPOSED, RADIUS)
    d1, d2 = sample_pairs(scheme, thr, np.random.default_rng(7), 20000)
    assert np.all(d1 <= thr.near_max)
    assert np.all((d2 > thr.far_min) & (d2 <= RADIUS))


def test_random_sampler_ordered():
    d1, d2 = sample_pairs(PairingScheme(RANDOM, RADIUS), None,
                          np.random.default_rng(3), 10000)
    assert np.all(d1 <= d2)


def test_nearest_farthest_sampler_brackets_population():
    scheme = PairingScheme(NEAREST_FARTHEST, RADIUS, population=10)
    d1, d2 = sample_pairs(scheme, None, np.random.default_rng(11), 5000)
    assert np.all(d1 <= d2)
    assert np.all((d1 >= 0) & (d2 <= RADIUS))


def test_strict_order_enforced():
    thr = thresholds_for(0.33, 0.05)
    scheme = PairingScheme(PROPOSED, RADIUS)
    d1, d2 = sample_pairs(scheme, thr, np.random.default_rng(5), 20000,
                          strict_order=True)
    assert np.all(d1 < d2)


def test_sample_pair_scalar():
    thr = thresholds_for(0.33, 0.05)
    d1, d2 = sample_pair(PairingScheme(PROPOSED, RADIUS), thr,
                         np.random.default_rng(9))
    assert isinstance(d1, float) and isinstance(d2, float)
    assert 0.0 < d1 <= thr.near_max
    assert thr.far_min < d2 <= RADIUS


@pytest.mark.parametrize("kind,population", [(RANDOM, None),
                                             (NEAREST_FARTHEST, 300),
                                             (PROPOSED, None),
                                             (ENHANCED, 300)])
def test_sampler_matches_law(kind, population):
    # moderate-size KS check per scheme; the acceptance battery repeats
    # this at a million samples with a tighter bound
    thr = thresholds_for(0.33, 0.05)
    scheme = PairingScheme(kind, RADIUS, population=population)
    near_law, far_law = distance_laws(scheme, thr)
    d1, d2 = sample_pairs(scheme, thr, np.random.default_rng(101), 100_000)
    assert ks_distance(d1, near_law.cdf) < 0.01
    assert ks_distance(d2, far_law.cdf) < 0.01


def test_sampler_thin_near_region():
    # small power split shrinks the near region to ~2% of the disc area;
    # the block-adaptive rejection must still fill it quickly and with the
    # right distribution
    thr = thresholds_for(0.10, 0.05)
    scheme = PairingScheme(PROPOSED, RADIUS)
    near_law, _ = distance_laws(scheme, thr)
    d1, _ = sample_pairs(scheme, thr, np.random.default_rng(17), 100_000)
    assert np.all(d1 <= thr.near_max)
    assert ks_distance(d1, near_law.cdf) < 0.01


def test_rejection_gives_up_on_impossible_region():
    rng = np.random.default_rng(0)
    with pytest.raises(SamplingExhausted):
        _reject_into(rng, RADIUS, 100, lambda r: r < 0.0)


def test_sampler_size_validation():
    with pytest.raises(ValueError):
        sample_pairs(PairingScheme(RANDOM, RADIUS), None,
                     np.random.default_rng(0), 0)
