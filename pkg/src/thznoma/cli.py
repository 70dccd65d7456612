"""Command-line front end.

Subcommands:

    absorb      absorption coefficients over a frequency grid, as CSV
    thresholds  pairing guarantee radii for the configured scenario
    outage      analytic and simulated outage at a single scenario point
    sweep       outage over a configured parameter sweep, as CSV
    validate    cross-method consistency report (text, optional JSON)
    mc          Monte Carlo outage estimates with confidence intervals

Scenarios are JSON documents (see ``parse_scenario``); ``--preset`` loads
one of the packaged scenario files instead. Sweep CSV columns are fixed:
sweep_var, sweep_value, scheme, user, mode, method, estimate, stderr,
status. Exit codes: 0 success, 2 validation failure, 3 configuration
error, 4 numeric non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .absorption import MediumConditions, absorption_coefficient, default_catalog_path, \
    load_catalog
from .channel import FadingModel, LinkBudget, PowerSplit, SubcarrierPlan
from .montecarlo import TrialConfig, derive_seed, outage_cells_mc
from .outage import OutageQuery, outage_exact_single, outage_simplified_single, \
    multicarrier_outage_threshold, multicarrier_outage_mgf
from .pairing import SCHEME_KINDS, PairingScheme, distance_laws, thresholds_for, \
    multicarrier_thresholds
from .validation import CheckResult

__all__ = [
    "ScenarioConfig",
    "SweepRow",
    "ConfigError",
    "parse_scenario",
    "default_scenario",
    "load_preset",
    "run_sweep",
    "rows_to_csv",
    "validate_scenario",
    "main",
]

SINGLE_CARRIER_METHODS = ("simplified", "exact", "mc")
MULTI_CARRIER_METHODS = ("threshold", "mgf", "mc")
SWEEP_VARIABLES = ("k", "a1", "N_subcarriers", "tau1", "tau2", "R")

_CSV_HEADER = ("sweep_var", "sweep_value", "scheme", "user", "mode",
               "method", "estimate", "stderr", "status")


class ConfigError(ValueError):
    """A scenario document or command line failed validation."""


@dataclass(frozen=True)
class ScenarioConfig:
    """One fully resolved experiment scenario."""

    radius_m: float
    population: int
    near_fraction: float
    budget: LinkBudget
    fading: FadingModel
    schemes: tuple
    target_near: float
    target_far: float
    methods: tuple
    trials: int
    seed: int
    plan: SubcarrierPlan | None = None
    sweep_var: str | None = None
    sweep_grid: tuple = ()
    output: str | None = None
    analytic_mc_tol: float | None = None
    cross_tol: float | None = None


@dataclass(frozen=True)
class SweepRow:
    """One CSV row: a single (point, scheme, user, mode, method) estimate."""

    sweep_var: str
    sweep_value: object
    scheme: str
    user: str
    mode: str
    method: str
    estimate: float
    stderr: float | None
    status: str


# ---------------------------------------------------------------------------
# scenario parsing
# ---------------------------------------------------------------------------

_TOP_KEYS = {"description", "radius_m", "population", "power_split", "budget",
             "fading", "schemes", "targets", "subcarriers", "methods",
             "trials", "seed", "sweep", "output", "validation"}


def _require(mapping, key, kind, where):
    if key not in mapping:
        raise ConfigError(f"{where}: missing required key {key!r}")
    value = mapping[key]
    if kind is float:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ConfigError(f"{where}.{key}: expected a number")
        return float(value)
    if kind is int:
        if not isinstance(value, int) or isinstance(value, bool):
            raise ConfigError(f"{where}.{key}: expected an integer")
        return value
    return value


def _check_keys(mapping, allowed, where):
    if not isinstance(mapping, dict):
        raise ConfigError(f"{where}: expected an object")
    unknown = set(mapping) - set(allowed)
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")


def parse_scenario(doc: dict) -> ScenarioConfig:
    """Build a scenario from a parsed JSON document, validating shape."""
    _check_keys(doc, _TOP_KEYS, "scenario")

    split_doc = _require(doc, "power_split", dict, "scenario")
    _check_keys(split_doc, {"near"}, "power_split")
    near_fraction = _require(split_doc, "near", float, "power_split")

    budget_doc = _require(doc, "budget", dict, "scenario")
    _check_keys(budget_doc, {"power_w", "gain_tx_db", "gain_rx_db",
                             "thermal_noise_w", "frequency_hz",
                             "absorption_per_m"}, "budget")
    budget = LinkBudget.from_db_gains(
        power_w=_require(budget_doc, "power_w", float, "budget"),
        gain_tx_db=_require(budget_doc, "gain_tx_db", float, "budget"),
        gain_rx_db=_require(budget_doc, "gain_rx_db", float, "budget"),
        noise_w=_require(budget_doc, "thermal_noise_w", float, "budget"),
        frequency_hz=_require(budget_doc, "frequency_hz", float, "budget"),
        absorption_per_m=_require(budget_doc, "absorption_per_m", float, "budget"))

    fading_doc = doc.get("fading", {"m": 2.0})
    _check_keys(fading_doc, {"m", "power", "parameterization"}, "fading")
    fading = FadingModel(m=_require(fading_doc, "m", float, "fading"),
                         power=float(fading_doc.get("power", 1.0)),
                         parameterization=fading_doc.get("parameterization", "scale"))

    schemes = tuple(doc.get("schemes", SCHEME_KINDS))
    for kind in schemes:
        if kind not in SCHEME_KINDS:
            raise ConfigError(f"schemes: unknown scheme {kind!r}; "
                              f"valid: {', '.join(SCHEME_KINDS)}")
    if not schemes:
        raise ConfigError("schemes: must name at least one scheme")

    targets_doc = _require(doc, "targets", dict, "scenario")
    _check_keys(targets_doc, {"near_bps_hz", "far_bps_hz"}, "targets")
    target_near = _require(targets_doc, "near_bps_hz", float, "targets")
    target_far = _require(targets_doc, "far_bps_hz", float, "targets")

    plan = None
    if "subcarriers" in doc:
        sub = doc["subcarriers"]
        _check_keys(sub, {"frequencies_hz", "absorption_per_m"}, "subcarriers")
        plan = SubcarrierPlan(tuple(_require(sub, "frequencies_hz", list, "subcarriers")),
                              tuple(_require(sub, "absorption_per_m", list, "subcarriers")))

    default_methods = MULTI_CARRIER_METHODS if plan is not None else SINGLE_CARRIER_METHODS
    methods = tuple(doc.get("methods", default_methods))
    allowed = set(default_methods)
    bad = [m for m in methods if m not in allowed]
    if bad:
        kind = "multi-carrier" if plan is not None else "single-carrier"
        raise ConfigError(f"methods: {bad} not valid for a {kind} scenario; "
                          f"valid: {', '.join(sorted(allowed))}")
    if not methods:
        raise ConfigError("methods: must name at least one method")

    sweep_var = None
    sweep_grid = ()
    if "sweep" in doc:
        sweep_doc = doc["sweep"]
        _check_keys(sweep_doc, {"variable", "grid"}, "sweep")
        sweep_var = _require(sweep_doc, "variable", str, "sweep")
        if sweep_var not in SWEEP_VARIABLES:
            raise ConfigError(f"sweep.variable: unknown variable {sweep_var!r}; "
                              f"valid: {', '.join(SWEEP_VARIABLES)}")
        grid = _require(sweep_doc, "grid", list, "sweep")
        if not grid:
            raise ConfigError("sweep.grid: must be nonempty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("sweep.grid: must be strictly increasing")
        if sweep_var == "N_subcarriers":
            if plan is None:
                raise ConfigError("sweep over N_subcarriers needs a subcarriers block")
            if any(not isinstance(v, int) or not 1 <= v <= plan.count for v in grid):
                raise ConfigError(f"sweep.grid: subcarrier counts must be integers "
                                  f"in [1, {plan.count}]")
        sweep_grid = tuple(grid)
    if sweep_var == "k" and plan is not None:
        raise ConfigError("sweep over k conflicts with a subcarriers block; "
                          "per-subcarrier coefficients come from the plan")

    validation_doc = doc.get("validation", {})
    _check_keys(validation_doc, {"analytic_mc_tol", "cross_tol"}, "validation")

    trials = _require(doc, "trials", int, "scenario") if "trials" in doc else 100_000
    seed = _require(doc, "seed", int, "scenario") if "seed" in doc else 0
    if trials < 1:
        raise ConfigError("trials: must be at least 1")

    return ScenarioConfig(
        radius_m=_require(doc, "radius_m", float, "scenario"),
        population=_require(doc, "population", int, "scenario") if "population" in doc else 300,
        near_fraction=near_fraction,
        budget=budget,
        fading=fading,
        schemes=schemes,
        target_near=target_near,
        target_far=target_far,
        methods=methods,
        trials=trials,
        seed=seed,
        plan=plan,
        sweep_var=sweep_var,
        sweep_grid=sweep_grid,
        output=doc.get("output"),
        analytic_mc_tol=validation_doc.get("analytic_mc_tol"),
        cross_tol=validation_doc.get("cross_tol"),
    )


def default_scenario() -> ScenarioConfig:
    """Reference single-carrier scenario used when no config is given."""
    return ScenarioConfig(
        radius_m=60.0,
        population=300,
        near_fraction=0.33,
        budget=LinkBudget.from_db_gains(1.0, 20.0, 20.0, 1e-21, 1.0e12, 0.05),
        fading=FadingModel(m=2.0),
        schemes=SCHEME_KINDS,
        target_near=3.0,
        target_far=0.5,
        methods=SINGLE_CARRIER_METHODS,
        trials=100_000,
        seed=2718,
    )


def load_preset(name: str) -> ScenarioConfig:
    """Load one of the packaged scenario presets by name."""
    path = resources.files("thznoma").joinpath(f"presets/{name}.json")
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise ConfigError(f"unknown preset {name!r}") from None
    return parse_scenario(json.loads(text))


def _load_scenario(ns) -> ScenarioConfig:
    if getattr(ns, "config", None) and getattr(ns, "preset", None):
        raise ConfigError("--config and --preset are mutually exclusive")
    if getattr(ns, "preset", None):
        scenario = load_preset(ns.preset)
    elif getattr(ns, "config", None):
        try:
            with open(ns.config) as fh:
                doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{ns.config}: invalid JSON ({exc})") from None
        scenario = parse_scenario(doc)
    else:
        scenario = default_scenario()
    updates = {}
    if getattr(ns, "seed", None) is not None:
        updates["seed"] = ns.seed
    if getattr(ns, "trials", None) is not None:
        if ns.trials < 1:
            raise ConfigError("--trials must be at least 1")
        updates["trials"] = ns.trials
    if getattr(ns, "out", None) is not None:
        updates["output"] = ns.out
    if updates:
        from dataclasses import replace
        scenario = replace(scenario, **updates)
    return scenario


# ---------------------------------------------------------------------------
# point evaluation
# ---------------------------------------------------------------------------

def _point_pieces(scenario: ScenarioConfig, value):
    """Apply one sweep value, returning the concrete evaluation pieces."""
    radius = scenario.radius_m
    near_fraction = scenario.near_fraction
    budget = scenario.budget
    plan = scenario.plan
    target_near = scenario.target_near
    target_far = scenario.target_far
    var = scenario.sweep_var
    if var == "k":
        from dataclasses import replace
        budget = replace(budget, absorption_per_m=float(value))
    elif var == "a1":
        near_fraction = float(value)
    elif var == "N_subcarriers":
        plan = plan.subset(int(value))
    elif var == "tau1":
        target_near = float(value)
    elif var == "tau2":
        target_far = float(value)
    elif var == "R":
        radius = float(value)
    split = PowerSplit.from_near(near_fraction)
    if plan is not None:
        thresholds = multicarrier_thresholds(near_fraction, plan.absorption_per_m)
    else:
        thresholds = thresholds_for(near_fraction, budget.absorption_per_m)
    return radius, split, budget, plan, thresholds, target_near, target_far


def _evaluate_point(scenario: ScenarioConfig, point_index: int, value) -> list:
    """All rows for one sweep point, in fixed scheme/user/mode/method order."""
    radius, split, budget, plan, thresholds, target_near, target_far = \
        _point_pieces(scenario, value)
    var = scenario.sweep_var or "none"
    rows = []
    for j, kind in enumerate(scenario.schemes):
        scheme = PairingScheme(kind, radius, population=scenario.population)
        laws = dict(zip(("near", "far"), distance_laws(scheme, thresholds)))
        cells = None
        if "mc" in scenario.methods:
            cfg = TrialConfig(trials=scenario.trials,
                              seed=derive_seed(scenario.seed, point_index, j),
                              scheme=scheme, budget=budget, split=split,
                              fading=scenario.fading, thresholds=thresholds,
                              plan=plan, target_near_bps_hz=target_near,
                              target_far_bps_hz=target_far)
            cells = outage_cells_mc(cfg)
        for user, tau in (("near", target_near), ("far", target_far)):
            law = laws[user]
            for mode in ("noma", "oma"):
                query = OutageQuery(user, mode, tau)
                for method in scenario.methods:
                    stderr = None
                    if method == "mc":
                        mc = cells[(user, mode)]
                        estimate, stderr, status = mc.mean, mc.stderr, "ok"
                    elif method == "simplified":
                        est = outage_simplified_single(
                            query, split, budget.absorption_per_m, law)
                        estimate, status = est.probability, est.status
                    elif method == "exact":
                        est = outage_exact_single(query, budget, split,
                                                  scenario.fading, law)
                        estimate, status = est.probability, est.status
                    elif method == "threshold":
                        est = multicarrier_outage_threshold(query, split, plan, law)
                        estimate, status = est.probability, est.status
                    else:  # mgf
                        est = multicarrier_outage_mgf(query, split, plan, law,
                                                      budget, scenario.fading)
                        estimate, status = est.probability, est.status
                    rows.append(SweepRow(var, value, kind, user, mode, method,
                                         estimate, stderr, status))
    return rows


def _evaluate_point_star(args):
    return _evaluate_point(*args)


def run_sweep(scenario: ScenarioConfig, jobs: int = 1):
    """Evaluate the whole sweep; returns (rows, any_flagged).

    Rows come back in grid order regardless of worker count, and every
    Monte Carlo cell's seed is a pure function of (scenario seed, point
    index, scheme index), so the CSV is byte-stable across reruns and
    degrees of parallelism.
    """
    if scenario.sweep_var is None:
        points = [(scenario, 0, None)]
    else:
        points = [(scenario, i, v) for i, v in enumerate(scenario.sweep_grid)]
    if jobs > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            blocks = list(pool.map(_evaluate_point_star, points))
    else:
        blocks = [_evaluate_point(*args) for args in points]
    rows = [row for block in blocks for row in block]
    flagged = any(row.status != "ok" for row in rows)
    return rows, flagged


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def rows_to_csv(rows) -> str:
    """Render sweep rows to CSV text with a fixed header and row order."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_CSV_HEADER)
    for row in rows:
        writer.writerow((row.sweep_var, _fmt(row.sweep_value), row.scheme,
                         row.user, row.mode, row.method, _fmt(row.estimate),
                         _fmt(row.stderr), row.status))
    return buf.getvalue()


def _write_text(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)
        print(f"wrote {path}")


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------

def validate_scenario(scenario: ScenarioConfig, jobs: int = 1) -> list:
    """Cross-method consistency checks over the scenario's grid.

    Every analytic method is compared against Monte Carlo per cell with
    tolerance max(0.015, 4 stderr), and analytic methods are compared
    pairwise (0.005 for the single-carrier pair, 0.015 for the
    multi-carrier pair). Explicit tolerances in the scenario override the
    defaults. Returns one CheckResult per comparison plus a status check
    for flagged rows.
    """
    import time
    t0 = time.time()
    rows, _ = run_sweep(scenario, jobs=jobs)
    cells = {}
    for row in rows:
        key = (row.sweep_value, row.scheme, row.user, row.mode)
        cells.setdefault(key, {})[row.method] = row
    analytic = [m for m in scenario.methods if m != "mc"]
    pair_names = [(m, "mc") for m in analytic if "mc" in scenario.methods]
    pair_names += [(a, b) for i, a in enumerate(analytic) for b in analytic[i + 1:]]
    default_cross = 0.005 if scenario.plan is None else 0.015
    results = []
    for a, b in pair_names:
        worst_dev = 0.0
        worst_margin = -np.inf
        failures = []
        tol_used = None
        for key, methods in cells.items():
            ra, rb = methods[a], methods[b]
            dev = abs(ra.estimate - rb.estimate)
            if b == "mc":
                tol = scenario.analytic_mc_tol
                if tol is None:
                    tol = max(0.015, 4.0 * (rb.stderr or 0.0))
            else:
                tol = scenario.cross_tol if scenario.cross_tol is not None \
                    else default_cross
            tol_used = tol if tol_used is None else max(tol_used, tol)
            worst_dev = max(worst_dev, dev)
            worst_margin = max(worst_margin, dev - tol)
            if dev > tol:
                failures.append(f"{key}: |{ra.estimate:.4f} - {rb.estimate:.4f}|"
                                f" > {tol:.4g}")
        results.append(CheckResult(f"{a}-vs-{b}", not failures, worst=worst_dev,
                                   tolerance=tol_used, elapsed_s=0.0,
                                   details=tuple(failures[:8])))
    flagged = [f"{(r.sweep_value, r.scheme, r.user, r.mode, r.method)}"
               for r in rows if r.status != "ok"]
    results.append(CheckResult("numeric-status", not flagged,
                               worst=float(len(flagged)), tolerance=0.0,
                               details=tuple(flagged[:8])))
    elapsed = time.time() - t0
    for result in results:
        result.elapsed_s = elapsed / len(results)
    return results


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_absorb(ns) -> int:
    catalog_path = ns.catalog or default_catalog_path()
    catalog = load_catalog(catalog_path)
    if ns.freq is not None:
        tokens = [tok for tok in ns.freq.split(",") if tok.strip()]
        try:
            freqs = [float(tok) for tok in tokens]
        except ValueError as exc:
            raise ConfigError(f"--freq: {exc}") from None
    else:
        scenario = _load_scenario(ns)
        if scenario.plan is not None:
            freqs = list(scenario.plan.frequencies_hz)
        else:
            freqs = [scenario.budget.frequency_hz]
    unique = sorted(set(freqs))
    if len(unique) < len(freqs):
        warnings.warn(f"dropped {len(freqs) - len(unique)} duplicate frequencies")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("frequency_hz", "absorption_per_m"))
    if unique:
        ks = absorption_coefficient(catalog, MediumConditions(), np.array(unique))
        for f, k in zip(unique, np.atleast_1d(ks)):
            writer.writerow((_fmt(float(f)), _fmt(float(k))))
    _write_text(ns.out, buf.getvalue())
    return 0


def cmd_thresholds(ns) -> int:
    scenario = _load_scenario(ns)
    lines = []
    rows = [("scope", "absorption_per_m", "near_max_m", "far_min_m")]
    if scenario.plan is not None:
        for f, k in zip(scenario.plan.frequencies_hz, scenario.plan.absorption_per_m):
            th = thresholds_for(scenario.near_fraction, k)
            lines.append(f"subcarrier {f/1e12:.2f} THz (k={k}): "
                         f"near_max={th.near_max:.4f} m  far_min={th.far_min:.4f} m")
            rows.append((f"{f/1e12:.2f}THz", _fmt(k), _fmt(th.near_max),
                         _fmt(th.far_min)))
        combined = multicarrier_thresholds(scenario.near_fraction,
                                           scenario.plan.absorption_per_m)
        lines.append(f"combined wideband pair: near_max={combined.near_max:.4f} m "
                     f"far_min={combined.far_min:.4f} m")
        rows.append(("combined", "", _fmt(combined.near_max), _fmt(combined.far_min)))
    else:
        k = scenario.budget.absorption_per_m
        th = thresholds_for(scenario.near_fraction, k)
        lines.append(f"a1={scenario.near_fraction} k={k}: "
                     f"near_max={th.near_max:.4f} m  far_min={th.far_min:.4f} m")
        rows.append(("carrier", _fmt(k), _fmt(th.near_max), _fmt(th.far_min)))
    print("\n".join(lines))
    if ns.out:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerows(rows)
        _write_text(ns.out, buf.getvalue())
    return 0


def _print_rows(rows):
    width = max(len(r.scheme) for r in rows)
    for row in rows:
        stderr = f" +/- {row.stderr:.5f}" if row.stderr is not None else ""
        mark = "" if row.status == "ok" else f"  [{row.status}]"
        print(f"{row.scheme:{width}s} {row.user:4s} {row.mode:4s} "
              f"{row.method:10s} {row.estimate:.6f}{stderr}{mark}")


def cmd_outage(ns) -> int:
    scenario = _load_scenario(ns)
    if scenario.sweep_var is not None:
        raise ConfigError("outage evaluates a single point; "
                          "use the sweep subcommand for grids")
    rows, flagged = run_sweep(scenario, jobs=1)
    _print_rows(rows)
    if ns.out:
        _write_text(ns.out, rows_to_csv(rows))
    return 4 if flagged else 0


def cmd_sweep(ns) -> int:
    scenario = _load_scenario(ns)
    if scenario.sweep_var is None:
        raise ConfigError("sweep needs a sweep block in the scenario")
    rows, flagged = run_sweep(scenario, jobs=ns.jobs)
    _write_text(scenario.output, rows_to_csv(rows))
    if flagged:
        print("warning: some rows are flagged non-convergent", file=sys.stderr)
    return 4 if flagged else 0


def cmd_validate(ns) -> int:
    scenario = _load_scenario(ns)
    results = validate_scenario(scenario, jobs=ns.jobs)
    for result in results:
        print(result.line())
        for detail in result.details:
            print(f"    {detail}")
    failed = [r for r in results if not r.passed]
    if ns.out:
        payload = [{"name": r.name, "status": r.status, "passed": r.passed,
                    "warned": r.warned, "worst": r.worst,
                    "tolerance": r.tolerance, "elapsed_s": round(r.elapsed_s, 3),
                    "details": list(r.details)} for r in results]
        _write_text(ns.out, json.dumps(payload, indent=2) + "\n")
    if not failed:
        print("all checks passed")
        return 0
    if all(r.name == "numeric-status" for r in failed):
        return 4
    return 2


def cmd_mc(ns) -> int:
    scenario = _load_scenario(ns)
    if "mc" not in scenario.methods:
        raise ConfigError("mc subcommand needs 'mc' among the scenario methods")
    from dataclasses import replace
    rows, _ = run_sweep(replace(scenario, methods=("mc",)), jobs=ns.jobs)
    for row in rows:
        half = 2.5758293035489004 * (row.stderr or 0.0)
        lo, hi = max(0.0, row.estimate - half), min(1.0, row.estimate + half)
        prefix = "" if row.sweep_value is None else f"{row.sweep_var}={row.sweep_value} "
        print(f"{prefix}{row.scheme} {row.user}/{row.mode}: {row.estimate:.5f} "
              f"+/- {row.stderr:.5f} (99% CI [{lo:.5f}, {hi:.5f}])")
    if ns.out:
        _write_text(ns.out, rows_to_csv(rows))
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _add_scenario_flags(sub, jobs=False):
    sub.add_argument("--config", help="scenario JSON path")
    sub.add_argument("--preset", choices=("fig2", "fig3", "fig4"),
                     help="packaged scenario preset")
    sub.add_argument("--seed", type=int, help="override the scenario seed")
    sub.add_argument("--trials", type=int, help="override the trial count")
    sub.add_argument("--out", help="output path ('-' for stdout)")
    if jobs:
        sub.add_argument("--jobs", type=int, default=1,
                         help="worker processes for grid evaluation")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thznoma",
        description="Terahertz NOMA pairing and outage evaluation toolkit")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("absorb", help="absorption coefficients over a frequency grid")
    _add_scenario_flags(p)
    p.add_argument("--catalog", help="line catalog CSV (default: packaged catalog)")
    p.add_argument("--freq", help="comma-separated frequencies in Hz "
                                  "(empty string for a header-only CSV)")
    p.set_defaults(func=cmd_absorb)

    p = subs.add_parser("thresholds", help="pairing guarantee radii")
    _add_scenario_flags(p)
    p.set_defaults(func=cmd_thresholds)

    p = subs.add_parser("outage", help="outage at a single scenario point")
    _add_scenario_flags(p)
    p.set_defaults(func=cmd_outage)

    p = subs.add_parser("sweep", help="outage over a parameter sweep")
    _add_scenario_flags(p, jobs=True)
    p.set_defaults(func=cmd_sweep)

    p = subs.add_parser("validate", help="cross-method consistency report")
    _add_scenario_flags(p, jobs=True)
    p.set_defaults(func=cmd_validate)

    p = subs.add_parser("mc", help="Monte Carlo estimates with confidence intervals")
    _add_scenario_flags(p, jobs=True)
    p.set_defaults(func=cmd_mc)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        return ns.func(ns)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 3
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
