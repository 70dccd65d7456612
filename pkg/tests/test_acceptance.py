"""Release acceptance battery.

One test per release criterion, in a fixed order. Each test prints its
check's one-line verdict (run with -v -s to see them as they complete)
and fails if the underlying check does. The same checks back the
``validate`` style report available from :mod:`thznoma.validation`.
"""

from thznoma import validation


def _run(check, *args, **kwargs):
    result = check(*args, **kwargs)
    print(result.line())
    for detail in result.details:
        print(f"    {detail}")
    return result


def test_01_analytic_vs_monte_carlo_grid():
    # every scheme, user, and mode across k = 0.01..0.10, quadrature vs
    # simulation within max(0.015, 4 stderr), under a five-minute budget
    result = _run(validation.check_mutual_oracle_agreement)
    assert result.passed, result.details


def test_02_exact_vs_simplified_thermal_floor():
    # the N0 = 1e-21 W exact curve must sit within 5e-3 of the
    # zero-noise closed form everywhere on the same grid
    result = _run(validation.check_exact_vs_simplified)
    assert result.passed, result.details


def test_03_multicarrier_routes_agree():
    # threshold inversion, CF inversion, and simulation for N = 1..6,
    # plus monotone improvement of the near-user outage with N
    result = _run(validation.check_multicarrier_agreement)
    assert result.passed, result.details


def test_04_guaranteed_pairing_benefit():
    # inside the guarantee regions NOMA beats OMA in every single trial,
    # for both users, across power splits and absorption levels
    result = _run(validation.check_pairing_benefit_guarantee)
    assert result.passed, result.details


def test_05_threshold_ordering_and_monotonicity():
    result = _run(validation.check_threshold_ordering)
    assert result.passed, result.details


def test_06_sampled_distances_match_laws():
    # million-sample KS distance below 5e-3 for every scheme and user
    result = _run(validation.check_distance_law_fit)
    assert result.passed, result.details


def test_07_outage_gap_closes_toward_even_split():
    result = _run(validation.check_power_split_convergence)
    assert result.passed, result.details


def test_08_absorption_matches_reference_window():
    # the computed coefficients must sit within 15% of the reference
    # values; a miss degrades to WARN plus injected coefficients rather
    # than a silent pass, so the comparison itself must always run
    result = _run(validation.check_absorption_reproduction)
    assert result.passed, result.details
    assert result.worst is not None
    assert len(result.details) >= 6


def test_09_numeric_kernel_gates():
    # incomplete gamma vs closed forms at 1e-12, CF inversion of the unit
    # exponential at 1e-4 over twenty quantiles, point-mass step at 1e-3
    result = _run(validation.check_numeric_gates)
    assert result.passed, result.details


def test_10_sweep_reproducibility():
    # the packaged absorption sweep must render byte-identical CSV across
    # reruns and across process-pool execution
    result = _run(validation.check_sweep_reproducibility)
    assert result.passed, result.details
