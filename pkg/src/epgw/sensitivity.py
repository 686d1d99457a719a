"""Thermomechanical noise floor and minimum detectable strain.

The only noise source modeled is thermal frequency fluctuation of a
driven resonator,

    delta_omega = sqrt(k_B T / (2 pi tau m omega_m <x_c^2> Q)),

and the strain floor follows by equating it to the splitting response
4 sqrt(2) J sqrt(h). Shot noise, backaction and seismic contributions are
out of scope.
"""

from __future__ import annotations

import csv
import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .core import (
    ConfigParseError,
    InvalidRangeError,
    K_BOLTZMANN,
    MechanicalResonator,
    SensitivityContext,
    require_positive,
)


@dataclass(frozen=True)
class SensitivityPoint:
    """One point of the sensitivity curve.

    Attributes:
        gw_frequency: Signal frequency (Hz).
        observation_time: Integration time tau used at this frequency (s).
        h_min: Minimum detectable strain (dimensionless).
    """

    gw_frequency: float
    observation_time: float
    h_min: float


def _validate_context(ctx: SensitivityContext) -> None:
    require_positive("temperature", ctx.temperature)
    require_positive("sample_time", ctx.sample_time)
    require_positive("drive_amplitude", ctx.drive_amplitude)
    require_positive("quality_factor", ctx.quality_factor)


def thermal_frequency_noise(ctx: SensitivityContext, resonator: MechanicalResonator) -> float:
    """Thermal frequency fluctuation delta_omega (rad/s) after time tau."""
    _validate_context(ctx)
    require_positive("mass", resonator.mass)
    require_positive("omega_m", resonator.omega_m)
    mean_square_drive = ctx.drive_amplitude * ctx.drive_amplitude
    return math.sqrt(
        K_BOLTZMANN
        * ctx.temperature
        / (
            2.0
            * math.pi
            * ctx.sample_time
            * resonator.mass
            * resonator.omega_m
            * mean_square_drive
            * ctx.quality_factor
        )
    )


def min_detectable_strain(
    ctx: SensitivityContext, resonator: MechanicalResonator, coupling_j: float
) -> float:
    """Strain at which the splitting equals the thermal noise floor.

    h_min = k_B T / (64 pi tau m omega_m <x_c^2> Q J^2); equivalently the
    h solving 4 sqrt(2) J sqrt(h) = delta_omega, so the consistency
    contract thermal_frequency_noise(ctx) == 4 sqrt(2) J sqrt(h_min)
    holds to rounding.
    """
    _validate_context(ctx)
    require_positive("mass", resonator.mass)
    require_positive("omega_m", resonator.omega_m)
    require_positive("coupling_j", coupling_j)
    mean_square_drive = ctx.drive_amplitude * ctx.drive_amplitude
    return (
        K_BOLTZMANN
        * ctx.temperature
        / (
            64.0
            * math.pi
            * ctx.sample_time
            * resonator.mass
            * resonator.omega_m
            * mean_square_drive
            * ctx.quality_factor
            * coupling_j
            * coupling_j
        )
    )


def sensitivity_curve(
    ctx: SensitivityContext,
    resonator: MechanicalResonator,
    coupling_j: float,
    f_min: float,
    f_max: float,
    points: int,
    t_max: float,
    half_period_cap: bool = True,
) -> list[SensitivityPoint]:
    """Strain floor over a log-spaced signal-frequency grid.

    At each frequency f the integration time is capped by the signal
    itself: tau(f) = min(t_max, 1/(2f)), a half period, since a strain
    signal averages itself out beyond that. Pass half_period_cap=False
    for the full-period convention tau(f) = min(t_max, 1/f). The curve is
    flat at h_min(t_max) below the knee f = 1/(2 t_max) and rises
    linearly in f above it.

    Raises:
        InvalidRangeError: unusable frequency range, points < 2, or
            non-positive t_max.
    """
    if not 0.0 < f_min < f_max:
        raise InvalidRangeError(f"need 0 < f_min < f_max, got [{f_min!r}, {f_max!r}]")
    if points < 2:
        raise InvalidRangeError(f"points = {points}; need at least 2")
    if t_max <= 0.0:
        raise InvalidRangeError(f"t_max = {t_max!r}; need t_max > 0")
    period_fraction = 0.5 if half_period_cap else 1.0
    curve: list[SensitivityPoint] = []
    for f in np.geomspace(f_min, f_max, points):
        tau = min(t_max, period_fraction / float(f))
        h = min_detectable_strain(
            dataclasses.replace(ctx, sample_time=tau), resonator, coupling_j
        )
        curve.append(SensitivityPoint(gw_frequency=float(f), observation_time=tau, h_min=h))
    return curve


def read_overlay_csv(path: str) -> list[tuple[float, float]]:
    """Read a comparison curve: CSV with header ``frequency_hz, strain``.

    Rows may come in any order and are returned as parsed, one
    (frequency_hz, strain) pair per row.

    Raises:
        ConfigParseError: missing/wrong header or a non-numeric cell.
        OSError: unreadable file.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        rows = [(line_no, row) for line_no, row in enumerate(reader, start=1) if row]
    if not rows:
        raise ConfigParseError(1, "empty overlay file; expected header 'frequency_hz, strain'")
    header_no, header = rows[0]
    if [cell.strip().lower() for cell in header] != ["frequency_hz", "strain"]:
        raise ConfigParseError(
            header_no, f"expected header 'frequency_hz, strain', got {','.join(header)!r}"
        )
    table: list[tuple[float, float]] = []
    for line_no, row in rows[1:]:
        if len(row) != 2:
            raise ConfigParseError(line_no, f"expected 2 columns, got {len(row)}")
        try:
            table.append((float(row[0]), float(row[1])))
        except ValueError as exc:
            raise ConfigParseError(line_no, f"non-numeric cell: {exc}") from None
    return table
