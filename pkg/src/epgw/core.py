"""Domain types and validation for the coupled-resonator sensor model.

All quantities are SI. Frequencies, damping rates and cavity decay rates
are angular (rad/s) everywhere inside the library; the Hz values used in
config files are converted at the interface layer only.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from enum import Enum

# CODATA 2018. Fixed by definition of the SI; not user-configurable.
HBAR = 1.054571817e-34  # J s
C_LIGHT = 299792458.0  # m / s
K_BOLTZMANN = 1.380649e-23  # J / K

# rms displacement of a driven doubly-clamped beam at the critical
# (onset-of-nonlinearity) amplitude, as a fraction of beam thickness.
CRITICAL_AMPLITUDE_FACTOR = 0.53


@dataclass(frozen=True)
class PhysicalConstants:
    """Bundle of the physical constants the model depends on."""

    hbar: float = HBAR
    c: float = C_LIGHT
    k_B: float = K_BOLTZMANN


CONSTANTS = PhysicalConstants()


# ---------------------------------------------------------------------------
# errors
# ---------------------------------------------------------------------------


class EpgwError(Exception):
    """Base class for all errors raised by this package."""


class NonPositiveParameterError(EpgwError):
    """A physical parameter violates its positivity constraint.

    Attributes:
        name: Field name, e.g. ``"mass"``.
        value: The offending value.
        where: Optional location qualifier, e.g. ``"resonator_1"``.
    """

    def __init__(self, name: str, value: float, where: str | None = None):
        self.name = name
        self.value = value
        self.where = where
        prefix = f"{where}." if where else ""
        super().__init__(f"{prefix}{name} = {value!r} violates its positivity constraint")


class ValidationError(EpgwError):
    """One or more parameters of a system are invalid.

    Carries the full list of violations, not just the first one found.
    """

    def __init__(self, violations: list[NonPositiveParameterError]):
        self.violations = violations
        lines = "; ".join(str(v) for v in violations)
        super().__init__(f"{len(violations)} invalid parameter(s): {lines}")


class NoEPError(EpgwError):
    """No photon number brings the system to an exceptional point."""


class ZeroCouplingError(EpgwError):
    """The optomechanical tuning knob is absent (J = 0 or g0**2 * phi = 0)."""


class NotAtEPError(EpgwError):
    """An operation that assumes exceptional-point bias was called away from one."""


class InvalidRangeError(EpgwError):
    """A sweep or integration range is empty, reversed, or otherwise unusable."""


class SamplingTooCoarseError(EpgwError):
    """The requested time step undersamples the fastest eigenfrequency."""


class TooFewSamplesError(EpgwError):
    """The trajectory is too short for a meaningful spectral estimate."""


class ConfigParseError(EpgwError):
    """A line of structured text input (config file, override, overlay CSV)
    could not be parsed."""

    def __init__(self, line: int, message: str):
        self.line = line
        self.message = message
        super().__init__(f"line {line}: {message}")


class UnknownKeyError(EpgwError):
    """A config key is not one of the recognized settings."""

    def __init__(self, key: str):
        self.key = key
        super().__init__(f"unknown config key: {key!r}")


# ---------------------------------------------------------------------------
# types
# ---------------------------------------------------------------------------


class Phase(Enum):
    """Spectral phase of a supermode pair.

    PT_SYMMETRIC: eigenvalues split in real frequency (below threshold).
    BROKEN: eigenvalues split in linewidth instead (above threshold).
    EXCEPTIONAL_POINT: both splittings vanish to within tolerance.
    """

    PT_SYMMETRIC = "pt_symmetric"
    BROKEN = "broken"
    EXCEPTIONAL_POINT = "exceptional_point"


@dataclass(frozen=True)
class MechanicalResonator:
    """A single mechanical mode.

    Attributes:
        omega_m: Angular resonance frequency (rad/s).
        mass: Effective mass (kg).
        quality_factor: Mechanical quality factor (dimensionless).
        thickness: Beam thickness (m); sets the critical drive amplitude.
        gamma_m: Intrinsic mechanical damping rate (rad/s). Zero means the
            mode is treated as lossless apart from optical damping.
    """

    omega_m: float
    mass: float
    quality_factor: float
    thickness: float
    gamma_m: float = 0.0


@dataclass(frozen=True)
class OpticalCavity:
    """A driven optical cavity coupled to one mechanical mode.

    Attributes:
        length: Cavity length (m).
        kappa: Optical decay rate (rad/s).
        detuning: Drive detuning from cavity resonance (rad/s), signed.
            Positive (blue) detuning anti-damps the mechanics, negative
            (red) detuning damps it.
        n_cav: Mean intracavity photon number (dimensionless, >= 0).
    """

    length: float
    kappa: float
    detuning: float
    n_cav: float

    @property
    def omega_cav(self) -> float:
        """Resonance frequency of the fundamental mode, pi*c/L (rad/s)."""
        return math.pi * C_LIGHT / self.length


@dataclass(frozen=True)
class CoupledSystem:
    """Two mechanical modes, each with its own cavity, coupled at rate J.

    Attributes:
        resonator_1: First mechanical mode (by convention the blue side).
        resonator_2: Second mechanical mode (by convention the red side).
        cavity_1: Cavity driving resonator_1.
        cavity_2: Cavity driving resonator_2.
        coupling_j: Intermode coupling rate J (rad/s, > 0).
    """

    resonator_1: MechanicalResonator
    resonator_2: MechanicalResonator
    cavity_1: OpticalCavity
    cavity_2: OpticalCavity
    coupling_j: float

    @property
    def is_balanced(self) -> bool:
        """True when the two arms differ only by the sign of the detuning.

        Both resonators must be identical field by field, both cavities
        must agree on length, decay rate and photon number, and the
        detunings must be +omega_m and -omega_m exactly. This is the
        gain/loss-balanced configuration for which the threshold photon
        number has a closed form.
        """
        r1, r2 = self.resonator_1, self.resonator_2
        c1, c2 = self.cavity_1, self.cavity_2
        return (
            r1 == r2
            and c1.length == c2.length
            and c1.kappa == c2.kappa
            and c1.n_cav == c2.n_cav
            and c1.detuning == r1.omega_m
            and c2.detuning == -r1.omega_m
        )

    def with_photon_number(self, n_cav: float) -> "CoupledSystem":
        """Copy of the system with both cavities driven at ``n_cav`` photons."""
        return dataclasses.replace(
            self,
            cavity_1=dataclasses.replace(self.cavity_1, n_cav=n_cav),
            cavity_2=dataclasses.replace(self.cavity_2, n_cav=n_cav),
        )


def balanced_system(
    resonator: MechanicalResonator,
    length: float,
    kappa: float,
    coupling_j: float,
    n_cav: float = 0.0,
) -> CoupledSystem:
    """Build the symmetric blue/red configuration from a single resonator.

    Cavity 1 is blue-detuned by +omega_m (mechanical gain), cavity 2
    red-detuned by -omega_m (matched loss), both with the same photon
    number, so the effective dampings are equal and opposite whenever the
    intrinsic ``gamma_m`` vanishes.
    """
    blue = OpticalCavity(length=length, kappa=kappa, detuning=resonator.omega_m, n_cav=n_cav)
    red = OpticalCavity(length=length, kappa=kappa, detuning=-resonator.omega_m, n_cav=n_cav)
    return CoupledSystem(
        resonator_1=resonator,
        resonator_2=resonator,
        cavity_1=blue,
        cavity_2=red,
        coupling_j=coupling_j,
    )


@dataclass(frozen=True)
class SupermodePair:
    """Eigenvalue pair of the coupled-mode matrix.

    ``lambda_plus`` is the branch with the larger real part (larger
    imaginary part on ties), except inside sweeps where branches are
    relabeled for continuity. Eigenvalues satisfy the trace identity
    lambda_plus + lambda_minus = (omega_1 + omega_2) - i(Gamma_1 + Gamma_2)/2.

    Attributes:
        lambda_plus: Complex eigenvalue (rad/s).
        lambda_minus: Complex eigenvalue (rad/s).
        discriminant: Complex quantity whose square root is half the
            eigenvalue separation; its sign structure determines ``phase``.
        phase: Phase classification of the pair.
    """

    lambda_plus: complex
    lambda_minus: complex
    discriminant: complex
    phase: Phase


@dataclass(frozen=True)
class SensitivityContext:
    """Thermal-noise environment for sensitivity estimates.

    Attributes:
        temperature: Bath temperature (K).
        sample_time: Frequency-counting integration time tau (s).
        drive_amplitude: rms coherent drive amplitude of the readout mode (m).
        quality_factor: Mechanical quality factor used in the noise model.
    """

    temperature: float
    sample_time: float
    drive_amplitude: float
    quality_factor: float


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


def _check_positive(name: str, value: float, where: str | None = None):
    if not value > 0:
        return NonPositiveParameterError(name, value, where)
    return None


def _check_nonnegative(name: str, value: float, where: str | None = None):
    if value < 0:
        return NonPositiveParameterError(name, value, where)
    return None


def require_positive(name: str, value: float, where: str | None = None) -> None:
    """Raise NonPositiveParameterError unless ``value > 0``."""
    err = _check_positive(name, value, where)
    if err is not None:
        raise err


def require_nonnegative(name: str, value: float, where: str | None = None) -> None:
    """Raise NonPositiveParameterError unless ``value >= 0``."""
    err = _check_nonnegative(name, value, where)
    if err is not None:
        raise err


def validate_resonator(resonator: MechanicalResonator, where: str | None = None) -> list[NonPositiveParameterError]:
    """Return every constraint violation of a resonator (empty list if valid)."""
    checks = [
        _check_positive("omega_m", resonator.omega_m, where),
        _check_positive("mass", resonator.mass, where),
        _check_positive("quality_factor", resonator.quality_factor, where),
        _check_positive("thickness", resonator.thickness, where),
        _check_nonnegative("gamma_m", resonator.gamma_m, where),
    ]
    return [c for c in checks if c is not None]


def validate_cavity(cavity: OpticalCavity, where: str | None = None) -> list[NonPositiveParameterError]:
    """Return every constraint violation of a cavity (empty list if valid)."""
    checks = [
        _check_positive("length", cavity.length, where),
        _check_positive("kappa", cavity.kappa, where),
        _check_nonnegative("n_cav", cavity.n_cav, where),
    ]
    return [c for c in checks if c is not None]


def system_violations(system: CoupledSystem) -> list[NonPositiveParameterError]:
    """Collect every parameter violation of a coupled system.

    Dataclass construction never validates, so invalid systems can be
    built and inspected freely; this reports the complete list of
    violations rather than stopping at the first.
    """
    violations: list[NonPositiveParameterError] = []
    violations += validate_resonator(system.resonator_1, "resonator_1")
    violations += validate_resonator(system.resonator_2, "resonator_2")
    violations += validate_cavity(system.cavity_1, "cavity_1")
    violations += validate_cavity(system.cavity_2, "cavity_2")
    err = _check_positive("coupling_j", system.coupling_j)
    if err is not None:
        violations.append(err)
    return violations


def validate_system(system: CoupledSystem) -> CoupledSystem:
    """Return the system unchanged if every invariant holds.

    Args:
        system: The system to check.

    Returns:
        The same system, untouched, when all constraints pass.

    Raises:
        ValidationError: carrying the full violation list otherwise.
    """
    violations = system_violations(system)
    if violations:
        raise ValidationError(violations)
    return system


def drive_amplitude_from_thickness(thickness: float) -> float:
    """Critical rms drive amplitude of a doubly-clamped beam, 0.53 * thickness."""
    require_positive("thickness", thickness)
    return CRITICAL_AMPLITUDE_FACTOR * thickness
