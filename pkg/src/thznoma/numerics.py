"""Shared numerical machinery for the analytic outage evaluators.

Four primitives live here: the regularized lower incomplete gamma
function, adaptive Gauss-Kronrod quadrature over finite intervals,
panel-wise integration of semi-infinite oscillatory (Gil-Pelaez style)
integrals, and bisection root finding for monotone functions.

Integrands are expected to be vectorised: they receive a 1-D numpy array
of abscissae and return an array of the same shape. Nothing in this
module holds state, so everything is safe to call from worker processes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "QuadratureSpec",
    "DEFAULT_QUAD",
    "NumericsError",
    "DomainError",
    "BracketError",
    "NonConvergence",
    "reg_lower_inc_gamma",
    "integrate_finite",
    "integrate_gil_pelaez",
    "gil_pelaez_cdf",
    "find_root_monotone",
]


class NumericsError(Exception):
    """Base class for failures raised by this module."""


class DomainError(NumericsError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class BracketError(NumericsError):
    """A root finder was handed an interval that does not bracket a sign change."""


class NonConvergence(NumericsError):
    """An iterative scheme ran out of budget.

    The best available estimate is attached so callers can degrade to a
    flagged result instead of losing the value entirely.
    """

    def __init__(self, message: str, estimate: float, error: float | None = None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerance and effort budget for the integrators."""

    abs_tol: float = 1e-6
    rel_tol: float = 1e-6
    max_subdivisions: int = 4096

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol >= 0):
            raise DomainError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1")


DEFAULT_QUAD = QuadratureSpec()

_MAX_SPECIAL_ITER = 600


# ---------------------------------------------------------------------------
# regularized lower incomplete gamma
# ---------------------------------------------------------------------------

def _inc_gamma_series(m: float, x: float) -> float:
    # power series, reliable for x < m + 1
    ap = m
    total = 1.0 / m
    term = total
    for _ in range(_MAX_SPECIAL_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * 1e-17:
            return total * math.exp(-x + m * math.log(x) - math.lgamma(m))
    raise NonConvergence(
        "incomplete gamma series did not converge",
        total * math.exp(-x + m * math.log(x) - math.lgamma(m)),
    )


def _inc_gamma_cf(m: float, x: float) -> float:
    # modified Lentz continued fraction for the upper tail, x >= m + 1
    tiny = 1e-300
    b = x + 1.0 - m
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_SPECIAL_ITER):
        an = -i * (i - m)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            q = math.exp(-x + m * math.log(x) - math.lgamma(m)) * h
            return 1.0 - q
    raise NonConvergence(
        "incomplete gamma continued fraction did not converge",
        1.0 - math.exp(-x + m * math.log(x) - math.lgamma(m)) * h,
    )


def _reg_lower_inc_gamma_scalar(m: float, x: float) -> float:
    if not (m > 0) or math.isnan(m) or math.isinf(m):
        raise DomainError(f"shape parameter must be positive and finite, got {m}")
    if math.isnan(x) or x < 0:
        raise DomainError(f"argument must be nonnegative, got {x}")
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return 1.0
    if x < m + 1.0:
        return min(1.0, max(0.0, _inc_gamma_series(m, x)))
    return min(1.0, max(0.0, _inc_gamma_cf(m, x)))


def reg_lower_inc_gamma(m: float, x):
    """Regularized lower incomplete gamma P(m, x) = gamma(m, x) / Gamma(m).

    Series expansion below x = m + 1 and a Lentz continued fraction above,
    both iterated to machine precision. Nondecreasing in x with range
    [0, 1]; accepts a scalar or an array for ``x``.
    """
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        return _reg_lower_inc_gamma_scalar(float(m), float(arr))
    flat = [_reg_lower_inc_gamma_scalar(float(m), float(xi)) for xi in arr.ravel()]
    return np.array(flat).reshape(arr.shape)


# ---------------------------------------------------------------------------
# adaptive Gauss-Kronrod quadrature
# ---------------------------------------------------------------------------

_GK_POS = np.array([
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
])
_GK_X = np.concatenate([-_GK_POS, [0.0], _GK_POS[::-1]])
_WK_POS = np.array([
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
])
_GK_WK = np.concatenate([_WK_POS, [0.209482141084728], _WK_POS[::-1]])
_GK_WG = np.zeros(15)
_GK_WG[[1, 3, 5]] = [0.129484966168870, 0.279705391489277, 0.381830050505119]
_GK_WG[7] = 0.417959183673469
_GK_WG[[9, 11, 13]] = [0.381830050505119, 0.279705391489277, 0.129484966168870]


def _gk15_batch(f, lo: np.ndarray, hi: np.ndarray):
    """Evaluate the 15-point Gauss-Kronrod rule on a batch of intervals."""
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    nodes = mid[:, None] + half[:, None] * _GK_X[None, :]
    vals = np.asarray(f(nodes.ravel()), dtype=float).reshape(nodes.shape)
    i_kron = half * (vals @ _GK_WK)
    i_gauss = half * (vals @ _GK_WG)
    err = np.abs(i_kron - i_gauss)
    err = np.where(np.isfinite(i_kron), err, np.inf)
    return i_kron, err


def _integrate_finite_impl(f, a: float, b: float, spec: QuadratureSpec):
    lo = np.array([a], dtype=float)
    hi = np.array([b], dtype=float)
    vals, errs = _gk15_batch(f, lo, hi)
    while True:
        total = float(vals.sum())
        tot_err = float(errs.sum())
        target = max(spec.abs_tol, spec.rel_tol * abs(total))
        if tot_err <= target:
            return total, tot_err, True
        if len(lo) >= spec.max_subdivisions:
            return total, tot_err, False
        # split every interval holding more than its share of the error,
        # always including the single worst interval
        share = target / len(lo)
        split = errs > share
        split[np.argmax(errs)] = True
        keep = ~split
        mids = 0.5 * (lo[split] + hi[split])
        new_lo = np.concatenate([lo[keep], lo[split], mids])
        new_hi = np.concatenate([hi[keep], mids, hi[split]])
        new_vals, new_errs = _gk15_batch(f, np.concatenate([lo[split], mids]),
                                         np.concatenate([mids, hi[split]]))
        vals = np.concatenate([vals[keep], new_vals])
        errs = np.concatenate([errs[keep], new_errs])
        lo, hi = new_lo, new_hi


def integrate_finite(f: Callable, a: float, b: float,
                     spec: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Adaptive estimate of the integral of ``f`` over [a, b].

    ``f`` must accept an array of abscissae and return an array of values.
    Raises :class:`NonConvergence` (carrying the best estimate) if the
    subdivision budget is exhausted before the tolerance is met.
    """
    if not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError("integration endpoints must be finite")
    if a > b:
        raise DomainError("lower endpoint exceeds upper endpoint")
    if a == b:
        return 0.0
    total, err, ok = _integrate_finite_impl(f, a, b, spec)
    if not ok:
        raise NonConvergence(
            f"quadrature did not reach tolerance after {spec.max_subdivisions} "
            f"subdivisions (error estimate {err:.3e})", total, err)
    return total


# ---------------------------------------------------------------------------
# semi-infinite oscillatory integrals
# ---------------------------------------------------------------------------

def integrate_gil_pelaez(integrand: Callable, spec: QuadratureSpec = DEFAULT_QUAD,
                         *, omega_min: float = 1e-8, phase_scale: float = 1.0,
                         growth: float = 1.25, max_panels: int = 400) -> float:
    """Integrate an oscillatory integrand over [omega_min, infinity).

    The axis is covered by geometrically growing panels, each integrated
    adaptively. Truncation rule: for tails decaying at least like 1/omega^2
    the remaining mass is about contribution * omega / width, which the
    geometric growth fixes at 1 / (growth - 1); we stop once that bound,
    applied to the largest of the last three panels, drops below the
    absolute tolerance. A panel whose inner quadrature cannot resolve the
    oscillation is halved and retried, so the panel width adapts itself to
    the (unknown) oscillation frequency.
    """
    if omega_min <= 0:
        raise DomainError("omega_min must be positive")
    if phase_scale <= 0:
        raise DomainError("phase_scale must be positive")
    inner = QuadratureSpec(abs_tol=spec.abs_tol / 8.0, rel_tol=spec.rel_tol,
                           max_subdivisions=min(spec.max_subdivisions, 1024))
    tail_factor = 1.0 / (growth - 1.0)
    width = math.pi / phase_scale
    lo = omega_min
    total = 0.0
    recent: list[float] = []
    for _ in range(max_panels):
        attempts = 0
        while True:
            contrib, _err, ok = _integrate_finite_impl(integrand, lo, lo + width, inner)
            if ok:
                break
            width *= 0.5
            attempts += 1
            if attempts > 60:
                raise NonConvergence(
                    "oscillatory panel could not be resolved", total + contrib)
        total += contrib
        lo += width
        width *= growth
        recent.append(abs(contrib))
        if len(recent) > 3:
            recent.pop(0)
        if len(recent) == 3 and tail_factor * max(recent) < spec.abs_tol:
            return total
    raise NonConvergence(
        f"oscillatory tail had not decayed after {max_panels} panels", total)


def gil_pelaez_cdf(conj_cf: Callable, t: float, spec: QuadratureSpec = DEFAULT_QUAD,
                   *, phase_scale: float | None = None) -> float:
    """Distribution function at ``t`` recovered from a characteristic function.

    ``conj_cf`` maps an array of frequencies omega to E[exp(-i omega X)]
    (the conjugate characteristic function, i.e. the MGF evaluated on the
    imaginary axis). Returns

        1/2 + (1/pi) * int_0^inf Im[conj_cf(w) exp(i w t)] / w dw,

    which equals P(X < t) at continuity points. The result is not clamped;
    truncation noise can leave it slightly outside [0, 1].
    """

    def integrand(omega):
        w = np.asarray(omega, dtype=float)
        return np.imag(np.asarray(conj_cf(w)) * np.exp(1j * w * t)) / w

    scale = phase_scale if phase_scale is not None else max(abs(t), 1.0)
    val = integrate_gil_pelaez(integrand, spec, phase_scale=scale)
    return 0.5 + val / math.pi


# ---------------------------------------------------------------------------
# root finding
# ---------------------------------------------------------------------------

def find_root_monotone(f: Callable[[float], float], lo: float, hi: float,
                       tol: float = 1e-10) -> float:
    """Bisection root of a monotone scalar function on [lo, hi].

    The endpoints must bracket a sign change (infinite endpoint values are
    fine, NaN is not). Stops when the bracket width drops below ``tol``.
    """
    if not (hi > lo):
        raise DomainError("need hi > lo")
    if tol <= 0:
        raise DomainError("tol must be positive")
    f_lo = f(lo)
    f_hi = f(hi)
    if math.isnan(f_lo) or math.isnan(f_hi):
        raise BracketError("endpoint evaluated to NaN")
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if (f_lo > 0) == (f_hi > 0):
        raise BracketError(
            f"no sign change on [{lo}, {hi}]: f(lo)={f_lo}, f(hi)={f_hi}")
    for _ in range(200):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if math.isnan(f_mid):
            raise BracketError(f"f({mid}) evaluated to NaN during bisection")
        if f_mid == 0.0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
