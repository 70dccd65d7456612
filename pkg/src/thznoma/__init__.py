"""Terahertz NOMA downlink toolkit.

Analytic outage evaluation, guarantee-region user pairing, molecular
absorption, and a seeded Monte Carlo oracle for a two-user terahertz
downlink, single- and multi-carrier, under Nakagami-m (Gamma power)
fading. The ``thznoma`` console script drives sweeps, validation
reports, and CSV emission on top of this API.
"""

from .absorption import MediumConditions, SpectralLine, absorption_coefficient, \
    default_catalog, load_catalog
from .channel import FadingModel, LinkBudget, PowerSplit, SubcarrierPlan, \
    path_gain, sinr_noma_far, sinr_noma_near, sinr_oma, spectral_efficiency, \
    multicarrier_spectral_efficiency
from .montecarlo import McEstimate, PairingBenefit, TrialConfig, derive_seed, \
    empirical_distance_cdf, estimate_outage_mc, estimate_pairing_benefit, \
    outage_cells_mc
from .numerics import NonConvergence, QuadratureSpec, gil_pelaez_cdf, \
    reg_lower_inc_gamma
from .outage import OutageEstimate, OutageQuery, conditional_mgf, \
    multicarrier_outage_mgf, multicarrier_outage_threshold, outage_exact_single, \
    outage_simplified_single
from .pairing import ENHANCED, NEAREST_FARTHEST, PROPOSED, RANDOM, SCHEME_KINDS, \
    DistanceLaw, PairingScheme, SamplingExhausted, Thresholds, distance_laws, \
    multicarrier_thresholds, sample_pair, sample_pairs, threshold_far, \
    threshold_near, thresholds_for
from .validation import ALL_CHECKS, CheckResult, run_all_checks

__version__ = "0.1.0"

__all__ = [
    "MediumConditions", "SpectralLine", "absorption_coefficient",
    "default_catalog", "load_catalog",
    "FadingModel", "LinkBudget", "PowerSplit", "SubcarrierPlan", "path_gain",
    "sinr_noma_far", "sinr_noma_near", "sinr_oma", "spectral_efficiency",
    "multicarrier_spectral_efficiency",
    "McEstimate", "PairingBenefit", "TrialConfig", "derive_seed",
    "empirical_distance_cdf", "estimate_outage_mc", "estimate_pairing_benefit",
    "outage_cells_mc",
    "NonConvergence", "QuadratureSpec", "gil_pelaez_cdf", "reg_lower_inc_gamma",
    "OutageEstimate", "OutageQuery", "conditional_mgf", "multicarrier_outage_mgf",
    "multicarrier_outage_threshold", "outage_exact_single",
    "outage_simplified_single",
    "ENHANCED", "NEAREST_FARTHEST", "PROPOSED", "RANDOM", "SCHEME_KINDS",
    "DistanceLaw", "PairingScheme", "SamplingExhausted", "Thresholds",
    "distance_laws", "multicarrier_thresholds", "sample_pair", "sample_pairs",
    "threshold_far", "threshold_near", "thresholds_for",
    "ALL_CHECKS", "CheckResult", "run_all_checks",
    "__version__",
]
