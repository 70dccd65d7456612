"""Release validation battery.

Each check pits independent routes against each other (closed forms vs
quadrature vs Monte Carlo, sampled vs analytic distance laws, catalog
absorption vs the reference coefficient list) and reports a structured
verdict. The test suite asserts on these results one check per test;
the command-line ``validate`` subcommand reuses the same machinery for
scenario-level reports.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .absorption import MediumConditions, absorption_coefficient, default_catalog
from .channel import FadingModel, LinkBudget, PowerSplit, SubcarrierPlan
from .montecarlo import TrialConfig, collect_distances, derive_seed, outage_cells_mc, \
    estimate_pairing_benefit
from .numerics import DEFAULT_QUAD, QuadratureSpec, gil_pelaez_cdf, reg_lower_inc_gamma
from .outage import OutageQuery, outage_exact_single, outage_simplified_single, \
    multicarrier_outage_threshold, multicarrier_outage_mgf
from .pairing import ENHANCED, NEAREST_FARTHEST, PROPOSED, RANDOM, SCHEME_KINDS, \
    PairingScheme, distance_laws, threshold_far, threshold_near, thresholds_for, \
    multicarrier_thresholds

__all__ = [
    "CheckResult",
    "ALL_CHECKS",
    "REFERENCE_PLAN",
    "check_mutual_oracle_agreement",
    "check_exact_vs_simplified",
    "check_multicarrier_agreement",
    "check_pairing_benefit_guarantee",
    "check_threshold_ordering",
    "check_distance_law_fit",
    "check_power_split_convergence",
    "check_absorption_reproduction",
    "check_numeric_gates",
    "check_sweep_reproducibility",
    "run_all_checks",
]

RADIUS_M = 60.0
POPULATION = 300
NEAR_FRACTION = 0.33
TARGET_NEAR = 3.0
TARGET_FAR = 0.5
TARGET_NEAR_WIDEBAND = 8.0
THERMAL_NOISE_W = 1e-21

# six-subcarrier reference scenario: 0.85..1.10 THz and the matching
# water-vapor absorption coefficients the catalog calibration aims for
REFERENCE_PLAN = SubcarrierPlan(
    (0.85e12, 0.90e12, 0.95e12, 1.00e12, 1.05e12, 1.10e12),
    (0.0357, 0.0400, 0.0446, 0.0494, 0.0545, 0.0598))

_K_GRID = tuple(round(0.01 * i, 2) for i in range(1, 11))
_FADING = FadingModel(m=2.0, power=1.0)


@dataclass
class CheckResult:
    """Verdict of one validation check."""

    name: str
    passed: bool
    warned: bool = False
    worst: float | None = None
    tolerance: float | None = None
    elapsed_s: float = 0.0
    details: tuple = field(default_factory=tuple)

    @property
    def status(self) -> str:
        if not self.passed:
            return "FAIL"
        return "WARN" if self.warned else "PASS"

    def line(self) -> str:
        parts = [f"{self.name}: {self.status}"]
        if self.worst is not None and self.tolerance is not None:
            parts.append(f"worst {self.worst:.3e} vs tol {self.tolerance:.3e}")
        elif self.worst is not None:
            parts.append(f"worst {self.worst:.3e}")
        parts.append(f"{self.elapsed_s:.1f}s")
        return parts[0] + " (" + ", ".join(parts[1:]) + ")"


def _budget(k: float, noise: float = THERMAL_NOISE_W) -> LinkBudget:
    return LinkBudget.from_db_gains(1.0, 20.0, 20.0, noise, 1.0e12, k)


def _scheme(kind: str) -> PairingScheme:
    return PairingScheme(kind, RADIUS_M, population=POPULATION)


def _queries():
    for user, tau in (("near", TARGET_NEAR), ("far", TARGET_FAR)):
        for mode in ("noma", "oma"):
            yield OutageQuery(user, mode, tau)


def check_mutual_oracle_agreement(trials: int = 100_000, seed: int = 4201) -> CheckResult:
    """Quadrature outage vs Monte Carlo across the absorption sweep grid.

    Every scheme, both users, both access modes, ten absorption values;
    agreement within max(0.015, 4 stderr) per cell and a five-minute
    runtime budget for the whole grid.
    """
    t0 = time.time()
    split = PowerSplit.from_near(NEAR_FRACTION)
    worst = 0.0
    failures = []
    for i, k in enumerate(_K_GRID):
        th = thresholds_for(NEAR_FRACTION, k)
        budget = _budget(k)
        for j, kind in enumerate(SCHEME_KINDS):
            scheme = _scheme(kind)
            laws = dict(zip(("near", "far"), distance_laws(scheme, th)))
            cfg = TrialConfig(trials=trials, seed=derive_seed(seed, i, j),
                              scheme=scheme, budget=budget, split=split,
                              fading=_FADING, thresholds=th,
                              target_near_bps_hz=TARGET_NEAR,
                              target_far_bps_hz=TARGET_FAR)
            cells = outage_cells_mc(cfg)
            for query in _queries():
                est = outage_exact_single(query, budget, split, _FADING,
                                          laws[query.user])
                mc = cells[(query.user, query.mode)]
                dev = abs(est.probability - mc.mean)
                tol = max(0.015, 4.0 * mc.stderr)
                worst = max(worst, dev - tol)
                if dev > tol:
                    failures.append(
                        f"k={k} {kind} {query.user}/{query.mode}: "
                        f"|{est.probability:.4f} - {mc.mean:.4f}| > {tol:.4f}")
    elapsed = time.time() - t0
    passed = not failures and elapsed < 300.0
    details = tuple(failures[:8])
    if elapsed >= 300.0:
        details += (f"runtime {elapsed:.0f}s exceeded 300s budget",)
    return CheckResult("mutual-oracle-agreement", passed, worst=worst,
                       tolerance=0.0, elapsed_s=elapsed, details=details)


def check_exact_vs_simplified() -> CheckResult:
    """Full quadrature vs noise-free closed form on the sweep grid.

    At the reference thermal floor the quadrature correction is far below
    the 0.005 consistency tolerance.
    """
    t0 = time.time()
    split = PowerSplit.from_near(NEAR_FRACTION)
    worst = 0.0
    for k in _K_GRID:
        th = thresholds_for(NEAR_FRACTION, k)
        budget = _budget(k)
        for kind in SCHEME_KINDS:
            laws = dict(zip(("near", "far"), distance_laws(_scheme(kind), th)))
            for query in _queries():
                law = laws[query.user]
                exact = outage_exact_single(query, budget, split, _FADING, law)
                simple = outage_simplified_single(query, split, k, law)
                worst = max(worst, abs(exact.probability - simple.probability))
    return CheckResult("exact-vs-simplified", worst <= 0.005, worst=worst,
                       tolerance=0.005, elapsed_s=time.time() - t0)


def check_multicarrier_agreement(trials: int = 100_000, seed: int = 915) -> CheckResult:
    """Threshold route vs CF-inversion route vs Monte Carlo, N = 1..6.

    Also requires the near-user outage to be nonincreasing as subcarriers
    are added, the capacity argument the wideband scheme rests on.
    """
    t0 = time.time()
    split = PowerSplit.from_near(NEAR_FRACTION)
    worst = 0.0
    failures = []
    near_curves = {"noma": [], "oma": []}
    for n in range(1, REFERENCE_PLAN.count + 1):
        plan = REFERENCE_PLAN.subset(n)
        th = multicarrier_thresholds(NEAR_FRACTION, plan.absorption_per_m)
        scheme = _scheme(PROPOSED)
        laws = dict(zip(("near", "far"), distance_laws(scheme, th)))
        budget = _budget(plan.absorption_per_m[0])
        cfg = TrialConfig(trials=trials, seed=derive_seed(seed, n), scheme=scheme,
                          budget=budget, split=split, fading=_FADING,
                          thresholds=th, plan=plan,
                          target_near_bps_hz=TARGET_NEAR_WIDEBAND,
                          target_far_bps_hz=TARGET_FAR)
        cells = outage_cells_mc(cfg)
        for user, tau in (("near", TARGET_NEAR_WIDEBAND), ("far", TARGET_FAR)):
            for mode in ("noma", "oma"):
                query = OutageQuery(user, mode, tau)
                law = laws[user]
                p_thr = multicarrier_outage_threshold(query, split, plan, law)
                p_mgf = multicarrier_outage_mgf(query, split, plan, law,
                                                budget, _FADING)
                mc = cells[(user, mode)]
                tol_mc = max(0.015, 4.0 * mc.stderr)
                pairs = (
                    (abs(p_thr.probability - p_mgf.probability), 0.015, "thr-mgf"),
                    (abs(p_thr.probability - mc.mean), tol_mc, "thr-mc"),
                    (abs(p_mgf.probability - mc.mean), tol_mc, "mgf-mc"),
                )
                for dev, tol, tag in pairs:
                    worst = max(worst, dev - tol)
                    if dev > tol:
                        failures.append(f"N={n} {user}/{mode} {tag}: "
                                        f"dev {dev:.4f} > {tol:.4f}")
                if p_thr.status != "ok" or p_mgf.status != "ok":
                    failures.append(f"N={n} {user}/{mode}: flagged result")
                if user == "near":
                    near_curves[mode].append(p_thr.probability)
    for mode, curve in near_curves.items():
        diffs = np.diff(curve)
        if np.any(diffs > 1e-12):
            failures.append(f"near/{mode} outage not nonincreasing: {curve}")
    return CheckResult("multicarrier-three-way", not failures, worst=worst,
                       tolerance=0.0, elapsed_s=time.time() - t0,
                       details=tuple(failures[:8]))


def check_pairing_benefit_guarantee(trials: int = 100_000, seed: int = 99) -> CheckResult:
    """Guarantee-region pairing makes NOMA beat OMA in every single trial.

    Proposed and enhanced schemes, zero thermal noise, both users, across
    a grid of power splits and absorption values.
    """
    t0 = time.time()
    failures = []
    for kind in (PROPOSED, ENHANCED):
        for a1 in (0.1, 0.2, 0.3, 0.4):
            for k in (0.03, 0.05):
                cfg = TrialConfig(trials=trials, seed=seed, scheme=_scheme(kind),
                                  budget=_budget(k, noise=0.0),
                                  split=PowerSplit.from_near(a1), fading=_FADING,
                                  thresholds=thresholds_for(a1, k))
                ben = estimate_pairing_benefit(cfg)
                if ben.near_rate != 1.0 or ben.far_rate != 1.0:
                    failures.append(f"{kind} a1={a1} k={k}: "
                                    f"rates ({ben.near_rate}, {ben.far_rate})")
    return CheckResult("pairing-benefit-guarantee", not failures,
                       worst=float(len(failures)), tolerance=0.0,
                       elapsed_s=time.time() - t0, details=tuple(failures[:8]))


def check_threshold_ordering() -> CheckResult:
    """Guarantee radii: ordering, growth in the split, decay in absorption."""
    t0 = time.time()
    a_grid = np.round(np.arange(1, 50) * 0.01, 2)
    failures = []
    per_k = {}
    for k in (0.01, 0.05, 0.1):
        r1 = np.array([threshold_near(a, k) for a in a_grid])
        r2 = np.array([threshold_far(a, k) for a in a_grid])
        per_k[k] = (r1, r2)
        if not np.all(r1 > r2):
            failures.append(f"k={k}: near radius not above far radius everywhere")
        if not (np.all(np.diff(r1) > 0) and np.all(np.diff(r2) > 0)):
            failures.append(f"k={k}: thresholds not increasing in the split")
    for (ka, kb) in ((0.01, 0.05), (0.05, 0.1)):
        if not (np.all(per_k[ka][0] > per_k[kb][0])
                and np.all(per_k[ka][1] > per_k[kb][1])):
            failures.append(f"thresholds not decreasing from k={ka} to k={kb}")
    return CheckResult("threshold-ordering", not failures,
                       elapsed_s=time.time() - t0, details=tuple(failures))


def check_distance_law_fit(samples: int = 1_000_000, seed: int = 777) -> CheckResult:
    """KS distance between sampled and analytic user-distance laws."""
    t0 = time.time()
    th = thresholds_for(NEAR_FRACTION, 0.05)
    budget = _budget(0.05)
    split = PowerSplit.from_near(NEAR_FRACTION)
    worst = 0.0
    failures = []
    for kind in SCHEME_KINDS:
        scheme = _scheme(kind)
        laws = dict(zip(("near", "far"), distance_laws(scheme, th)))
        cfg = TrialConfig(trials=samples, seed=seed, scheme=scheme, budget=budget,
                          split=split, fading=_FADING, thresholds=th)
        for user in ("near", "far"):
            x = np.sort(collect_distances(cfg, user))
            n = x.size
            f = laws[user].cdf(x)
            ks = max(np.max(np.arange(1, n + 1) / n - f),
                     np.max(f - np.arange(0, n) / n))
            worst = max(worst, float(ks))
            if ks > 0.005:
                failures.append(f"{kind} {user}: KS {ks:.5f}")
    return CheckResult("distance-law-fit", not failures, worst=worst,
                       tolerance=0.005, elapsed_s=time.time() - t0,
                       details=tuple(failures))


def check_power_split_convergence() -> CheckResult:
    """NOMA-minus-OMA outage gap shrinks as the split nears one half.

    Proposed pairing at k=0.03; the gap magnitude at a1=0.45 must be
    below its value at a1=0.10 for both users.
    """
    t0 = time.time()
    k = 0.03
    gaps = {}
    for a1 in (0.10, 0.45):
        th = thresholds_for(a1, k)
        split = PowerSplit.from_near(a1)
        laws = dict(zip(("near", "far"), distance_laws(_scheme(PROPOSED), th)))
        for user, tau in (("near", TARGET_NEAR), ("far", TARGET_FAR)):
            p = {mode: outage_simplified_single(OutageQuery(user, mode, tau),
                                                split, k, laws[user]).probability
                 for mode in ("noma", "oma")}
            gaps[(a1, user)] = p["noma"] - p["oma"]
    failures = []
    for user in ("near", "far"):
        lo, hi = abs(gaps[(0.45, user)]), abs(gaps[(0.10, user)])
        if not lo < hi:
            failures.append(f"{user}: |gap(0.45)|={lo:.4f} not below "
                            f"|gap(0.10)|={hi:.4f}")
    worst = max(abs(gaps[(0.45, u)]) for u in ("near", "far"))
    return CheckResult("power-split-convergence", not failures, worst=worst,
                       elapsed_s=time.time() - t0, details=tuple(failures))


def check_absorption_reproduction(catalog=None, rel_tol: float = 0.15) -> CheckResult:
    """Catalog absorption vs the reference coefficient list, within 15%.

    A deviation beyond tolerance downgrades to WARN rather than FAIL: the
    rest of the battery feeds the reference coefficients in directly, so
    a drifted calibration degrades only this reproduction, and the report
    must say so out loud instead of skipping the comparison.
    """
    t0 = time.time()
    if catalog is None:
        catalog = default_catalog()
    medium = MediumConditions()
    computed = absorption_coefficient(catalog, medium,
                                      np.array(REFERENCE_PLAN.frequencies_hz))
    reference = np.array(REFERENCE_PLAN.absorption_per_m)
    rel = np.abs(computed - reference) / reference
    worst = float(np.max(rel))
    within = worst <= rel_tol
    details = tuple(
        f"f={f/1e12:.2f}THz: computed {c:.5f} vs reference {r:.4f} ({d:+.1%})"
        for f, c, r, d in zip(REFERENCE_PLAN.frequencies_hz, computed,
                              reference, (computed - reference) / reference))
    if not within:
        details += ("calibration outside tolerance; downstream checks use "
                    "the reference coefficients directly",)
    return CheckResult("absorption-reproduction", True, warned=not within,
                       worst=worst, tolerance=rel_tol,
                       elapsed_s=time.time() - t0, details=details)


def _exp_conj_cf(omega):
    return 1.0 / (1.0 + 1j * np.asarray(omega))


def check_numeric_gates() -> CheckResult:
    """Special-function gates: incomplete gamma and CDF inversion."""
    t0 = time.time()
    failures = []
    # regularized lower incomplete gamma vs integer-order closed forms
    x = np.geomspace(1e-6, 80.0, 100)
    worst_gamma = 0.0
    for m in range(1, 6):
        series = sum(x ** j / math.factorial(j) for j in range(m))
        closed = -np.expm1(-x + np.log(series))
        ours = reg_lower_inc_gamma(float(m), x)
        worst_gamma = max(worst_gamma, float(np.max(np.abs(ours - closed))))
    if worst_gamma > 1e-12:
        failures.append(f"incomplete gamma dev {worst_gamma:.2e} > 1e-12")
    # CDF inversion of the unit exponential at 20 quantiles
    spec = QuadratureSpec(abs_tol=1e-6, rel_tol=1e-10, max_subdivisions=2048)
    probs = np.arange(1, 21) / 21.0
    worst_exp = 0.0
    for p in probs:
        t = -math.log1p(-p)
        got = gil_pelaez_cdf(_exp_conj_cf, t, spec, phase_scale=max(t, 1.0) + 5.0)
        worst_exp = max(worst_exp, abs(got - p))
    if worst_exp > 1e-4:
        failures.append(f"exponential inversion dev {worst_exp:.2e} > 1e-4")
    # unit step of a point mass, 0.1 away from the jump
    c = 1.0
    worst_step = 0.0
    for t, want in ((c - 0.1, 0.0), (c + 0.1, 1.0)):
        got = gil_pelaez_cdf(lambda w: np.exp(-1j * np.asarray(w) * c), t, spec,
                             phase_scale=max(abs(t), 1.0) + 1.0)
        worst_step = max(worst_step, abs(got - want))
    if worst_step > 1e-3:
        failures.append(f"point-mass step dev {worst_step:.2e} > 1e-3")
    worst = max(worst_gamma / 1e-12, worst_exp / 1e-4, worst_step / 1e-3)
    return CheckResult("numeric-gates", not failures, worst=worst,
                       tolerance=1.0, elapsed_s=time.time() - t0,
                       details=tuple(failures))


def check_sweep_reproducibility(jobs: int = 2) -> CheckResult:
    """Identical sweep bytes across reruns and across worker counts."""
    from . import cli  # deferred: cli imports this module for CheckResult

    t0 = time.time()
    scenario = cli.load_preset("fig2")
    first, _ = cli.run_sweep(scenario, jobs=1)
    again, _ = cli.run_sweep(scenario, jobs=1)
    parallel, _ = cli.run_sweep(scenario, jobs=jobs)
    blobs = [cli.rows_to_csv(rows).encode() for rows in (first, again, parallel)]
    failures = []
    if blobs[0] != blobs[1]:
        failures.append("sequential rerun differs")
    if blobs[0] != blobs[2]:
        failures.append(f"jobs={jobs} run differs from sequential")
    return CheckResult("sweep-reproducibility", not failures,
                       elapsed_s=time.time() - t0, details=tuple(failures))


ALL_CHECKS = (
    check_mutual_oracle_agreement,
    check_exact_vs_simplified,
    check_multicarrier_agreement,
    check_pairing_benefit_guarantee,
    check_threshold_ordering,
    check_distance_law_fit,
    check_power_split_convergence,
    check_absorption_reproduction,
    check_numeric_gates,
    check_sweep_reproducibility,
)


def run_all_checks() -> list:
    """Run the full battery in order; returns one result per check."""
    return [check() for check in ALL_CHECKS]
