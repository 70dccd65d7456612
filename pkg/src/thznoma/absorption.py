"""Line-by-line molecular absorption for the lower THz window.

The absorption coefficient is assembled per spectral line from a
pressure/temperature scaled line strength and a Van Vleck-Weisskopf
resonance profile. Catalogs of line parameters in this area circulate
with mixed unit conventions, so a catalog file may carry per-field
calibration factors in ``# cal.<field>=<value>`` comment lines; they are
applied once at load time and the in-memory line is treated as coherent
SI afterwards. The shipped water-vapour catalog is calibrated so the
computed coefficients over 0.85-1.1 THz land on the reference values
used by the rest of the package (see ``data/water_lines.csv``).

Downstream code depends only on the pair (frequency, coefficient), so an
externally supplied coefficient can always be injected in place of this
model.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

__all__ = [
    "PhysicalConstants",
    "CONSTANTS",
    "MediumConditions",
    "SpectralLine",
    "CatalogError",
    "lorentz_half_width",
    "shifted_resonance",
    "vvw_line_shape",
    "absorption_coefficient",
    "load_catalog",
    "default_catalog_path",
    "default_catalog",
]


@dataclass(frozen=True)
class PhysicalConstants:
    """Fundamental constants, rounded to the precision used throughout."""

    speed_of_light: float = 2.9979e8      # m/s
    planck: float = 6.6262e-34            # J s
    boltzmann: float = 1.3806e-23         # J/K
    avogadro: float = 6.0221e23           # 1/mol
    molar_gas_volume: float = 8.2051e-5   # m^3 atm / K / mol


CONSTANTS = PhysicalConstants()


@dataclass(frozen=True)
class MediumConditions:
    """Ambient medium state for the absorption model.

    Pressures in atm, temperatures in kelvin. ``temperature_std_pressure``
    is the reference temperature tied to standard pressure that enters the
    line-strength scaling.
    """

    pressure: float = 1.0
    pressure_ref: float = 1.0
    temperature: float = 396.0
    temperature_ref: float = 296.0
    temperature_std_pressure: float = 273.15

    def __post_init__(self):
        if self.pressure <= 0 or self.pressure_ref <= 0:
            raise ValueError("pressures must be positive")
        if self.temperature <= 0 or self.temperature_ref <= 0 \
                or self.temperature_std_pressure <= 0:
            raise ValueError("temperatures must be positive")


@dataclass(frozen=True)
class SpectralLine:
    """One absorption line in calibrated working units.

    mixing_ratio        molecular mixing ratio of the absorbing species
    strength            line strength
    resonance_hz        zero-pressure resonance frequency
    shift_hz            linear pressure shift of the resonance
    broadening_air_hz   air half-width at reference conditions
    broadening_self_hz  self half-width at reference conditions
    broadening_exp      temperature exponent of the half-width
    """

    mixing_ratio: float
    strength: float
    resonance_hz: float
    shift_hz: float
    broadening_air_hz: float
    broadening_self_hz: float
    broadening_exp: float

    def __post_init__(self):
        if not 0.0 <= self.mixing_ratio <= 1.0:
            raise ValueError(f"mixing ratio must lie in [0, 1], got {self.mixing_ratio}")
        if self.strength < 0:
            raise ValueError(f"line strength must be nonnegative, got {self.strength}")
        if self.resonance_hz <= 0:
            raise ValueError(f"resonance frequency must be positive, got {self.resonance_hz}")
        if self.broadening_air_hz <= 0 or self.broadening_self_hz <= 0:
            raise ValueError("half-widths must be positive")


class CatalogError(ValueError):
    """A line catalog file could not be parsed or failed validation."""


def lorentz_half_width(line: SpectralLine, medium: MediumConditions) -> float:
    """Pressure/temperature scaled Lorentz half-width of one line."""
    mix = (1.0 - line.mixing_ratio) * line.broadening_air_hz \
        + line.mixing_ratio * line.broadening_self_hz
    scale = (medium.pressure / medium.pressure_ref) \
        * (medium.temperature_ref / medium.temperature) ** line.broadening_exp
    return mix * scale


def shifted_resonance(line: SpectralLine, medium: MediumConditions) -> float:
    """Resonance frequency after the linear pressure shift."""
    return line.resonance_hz + line.shift_hz * (medium.pressure / medium.pressure_ref)


def vvw_line_shape(line: SpectralLine, medium: MediumConditions, frequency_hz,
                   constants: PhysicalConstants = CONSTANTS):
    """Van Vleck-Weisskopf profile of one line, vectorised over frequency.

    Asymmetric resonance shape: with alpha the scaled half-width and f_c
    the shifted resonance,

        F(f) = 100 c alpha f / (pi f_c) * (1/((f+f_c)^2 + alpha^2)
                                           + 1/((f-f_c)^2 + alpha^2)).
    """
    f = np.asarray(frequency_hz, dtype=float)
    if np.any(f <= 0):
        raise ValueError("frequency must be positive")
    alpha = lorentz_half_width(line, medium)
    f_c = shifted_resonance(line, medium)
    plus = f + f_c
    minus = f - f_c
    shape = (100.0 * constants.speed_of_light * alpha * f) / (np.pi * f_c) \
        * (1.0 / (plus ** 2 + alpha ** 2) + 1.0 / (minus ** 2 + alpha ** 2))
    return shape if shape.ndim else float(shape)


def absorption_coefficient(catalog, medium: MediumConditions, frequency_hz,
                           constants: PhysicalConstants = CONSTANTS):
    """Molecular absorption coefficient (1/m) summed over a line catalog.

    Per line the contribution is the scaled strength times the line shape:

        p^2 T_sp q N_A S f tanh(h c f / (2 k_B T))
        ------------------------------------------- * F(f)
        p0 V T^2 f_c tanh(h c f_c / (2 k_B T))

    Vectorised over frequency. An empty catalog yields 0 with a warning,
    since downstream consumers accept an injected coefficient anyway.
    """
    f = np.asarray(frequency_hz, dtype=float)
    if np.any(f <= 0):
        raise ValueError("frequency must be positive")
    lines = list(catalog)
    if not lines:
        warnings.warn("empty line catalog: absorption coefficient is identically 0")
        zero = np.zeros_like(f)
        return zero if zero.ndim else 0.0
    c = constants.speed_of_light
    h = constants.planck
    k_b = constants.boltzmann
    tanh_scale = h * c / (2.0 * k_b * medium.temperature)
    total = np.zeros_like(f)
    for line in lines:
        f_c = shifted_resonance(line, medium)
        numer = (medium.pressure ** 2 * medium.temperature_std_pressure
                 * line.mixing_ratio * constants.avogadro * line.strength
                 * f * np.tanh(tanh_scale * f))
        denom = (medium.pressure_ref * constants.molar_gas_volume
                 * medium.temperature ** 2 * f_c * np.tanh(tanh_scale * f_c))
        total = total + numer / denom * vvw_line_shape(line, medium, f, constants)
    return total if total.ndim else float(total)


# ---------------------------------------------------------------------------
# catalog files
# ---------------------------------------------------------------------------

_COLUMNS = ("q", "S", "f_c0", "delta", "alpha_air", "alpha_0", "gamma")


def load_catalog(path) -> list[SpectralLine]:
    """Read spectral lines from a CSV catalog.

    Expected layout: a mandatory header row naming the columns
    ``q,S,f_c0,delta,alpha_air,alpha_0,gamma``, optionally followed by
    ``# cal.<field>=<float>`` comment lines holding per-field calibration
    factors, then one data row per line. Calibration factors multiply the
    raw column values at load time.
    """
    text = Path(path).read_text(encoding="utf-8")
    cal = {name: 1.0 for name in _COLUMNS}
    header_seen = False
    lines: list[SpectralLine] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            body = stripped.lstrip("#").strip()
            if body.startswith("cal."):
                try:
                    key, value = body[4:].split("=", 1)
                except ValueError:
                    raise CatalogError(f"line {lineno}: malformed calibration comment")
                key = key.strip()
                if key not in _COLUMNS:
                    raise CatalogError(f"line {lineno}: unknown calibration field {key!r}")
                try:
                    cal[key] = float(value)
                except ValueError:
                    raise CatalogError(f"line {lineno}: calibration for {key!r} is not a number")
            continue
        fields = [part.strip() for part in stripped.split(",")]
        if not header_seen:
            if tuple(fields) != _COLUMNS:
                raise CatalogError(
                    f"line {lineno}: header must be {','.join(_COLUMNS)!r}, got {stripped!r}")
            header_seen = True
            continue
        if len(fields) != len(_COLUMNS):
            raise CatalogError(
                f"line {lineno}: expected {len(_COLUMNS)} columns, got {len(fields)}")
        values = {}
        for name, field in zip(_COLUMNS, fields):
            try:
                values[name] = float(field) * cal[name]
            except ValueError:
                raise CatalogError(f"line {lineno}: column {name!r} is not a number: {field!r}")
        try:
            lines.append(SpectralLine(
                mixing_ratio=values["q"],
                strength=values["S"],
                resonance_hz=values["f_c0"],
                shift_hz=values["delta"],
                broadening_air_hz=values["alpha_air"],
                broadening_self_hz=values["alpha_0"],
                broadening_exp=values["gamma"],
            ))
        except ValueError as exc:
            raise CatalogError(f"line {lineno}: {exc}")
    if not header_seen:
        raise CatalogError("catalog has no header row")
    return lines


def default_catalog_path() -> Path:
    """Path of the water-vapour catalog shipped with the package."""
    return Path(resources.files("thznoma").joinpath("data/water_lines.csv"))


def default_catalog() -> list[SpectralLine]:
    """The shipped, calibrated water-vapour catalog."""
    return load_catalog(default_catalog_path())
