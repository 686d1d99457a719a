import dataclasses
import math

import pytest

from epgw import (
    C_LIGHT,
    CONSTANTS,
    ConfigParseError,
    CoupledSystem,
    EpgwError,
    HBAR,
    InvalidRangeError,
    K_BOLTZMANN,
    MechanicalResonator,
    NoEPError,
    NonPositiveParameterError,
    NotAtEPError,
    OpticalCavity,
    Phase,
    SamplingTooCoarseError,
    TooFewSamplesError,
    UnknownKeyError,
    ValidationError,
    ZeroCouplingError,
    balanced_system,
    drive_amplitude_from_thickness,
    system_violations,
    validate_system,
)
from epgw.core import (
    CRITICAL_AMPLITUDE_FACTOR,
    require_nonnegative,
    require_positive,
    validate_cavity,
    validate_resonator,
)

TWO_PI = 2.0 * math.pi


def test_constants_are_codata_values():
    assert HBAR == 1.054571817e-34
    assert C_LIGHT == 299792458.0
    assert K_BOLTZMANN == 1.380649e-23
    assert CONSTANTS.hbar == HBAR
    assert CONSTANTS.c == C_LIGHT
    assert CONSTANTS.k_B == K_BOLTZMANN
    assert CRITICAL_AMPLITUDE_FACTOR == 0.53


def test_constants_bundle_is_immutable():
    with pytest.raises(dataclasses.FrozenInstanceError):
        CONSTANTS.hbar = 1.0


def test_error_taxonomy_shares_base_class():
    for exc in (
        NonPositiveParameterError("x", -1.0),
        ValidationError([NonPositiveParameterError("x", -1.0)]),
        NoEPError(),
        ZeroCouplingError(),
        NotAtEPError(),
        InvalidRangeError(),
        SamplingTooCoarseError(),
        TooFewSamplesError(),
        ConfigParseError(3, "bad"),
        UnknownKeyError("nope"),
    ):
        assert isinstance(exc, EpgwError)


def test_nonpositive_error_carries_context():
    err = NonPositiveParameterError("mass", -2.0, where="resonator_1")
    assert err.name == "mass"
    assert err.value == -2.0
    assert err.where == "resonator_1"
    assert "resonator_1.mass" in str(err)


def test_config_parse_error_carries_line_number():
    err = ConfigParseError(7, "missing value")
    assert err.line == 7
    assert "line 7" in str(err)


def test_phase_enum_values():
    assert Phase.PT_SYMMETRIC.value == "pt_symmetric"
    assert Phase.BROKEN.value == "broken"
    assert Phase.EXCEPTIONAL_POINT.value == "exceptional_point"


def test_resonator_is_frozen(device_resonator):
    with pytest.raises(dataclasses.FrozenInstanceError):
        device_resonator.mass = 1.0


def test_cavity_resonance_frequency():
    cav = OpticalCavity(length=1e-4, kappa=1.0, detuning=0.0, n_cav=0.0)
    assert cav.omega_cav == pytest.approx(math.pi * C_LIGHT / 1e-4, rel=1e-15)
    # omega_cav is derived, not stored
    assert "omega_cav" not in {f.name for f in dataclasses.fields(OpticalCavity)}


def test_balanced_system_detunings(device, device_resonator):
    assert device.cavity_1.detuning == device_resonator.omega_m
    assert device.cavity_2.detuning == -device_resonator.omega_m
    assert device.is_balanced


def test_balanced_predicate_rejects_mismatched_arms(device, device_resonator):
    other = dataclasses.replace(device_resonator, mass=device_resonator.mass * 2)
    assert not dataclasses.replace(device, resonator_2=other).is_balanced
    lop = dataclasses.replace(device.cavity_2, kappa=device.cavity_2.kappa * 2)
    assert not dataclasses.replace(device, cavity_2=lop).is_balanced
    # both detunings blue is not balanced either
    blue2 = dataclasses.replace(device.cavity_2, detuning=device_resonator.omega_m)
    assert not dataclasses.replace(device, cavity_2=blue2).is_balanced


def test_with_photon_number_updates_both_cavities(device):
    driven = device.with_photon_number(1e12)
    assert driven.cavity_1.n_cav == 1e12
    assert driven.cavity_2.n_cav == 1e12
    assert driven.resonator_1 is device.resonator_1
    assert driven.coupling_j == device.coupling_j
    # original untouched
    assert device.cavity_1.n_cav == 0.0


def test_validate_system_accepts_reference_device(device):
    assert validate_system(device) is device
    # idempotent
    assert validate_system(validate_system(device)) is device


def test_validate_system_collects_all_violations(device, device_resonator):
    bad_res = dataclasses.replace(device_resonator, mass=0.0, thickness=-1.0)
    bad = dataclasses.replace(device, resonator_1=bad_res, coupling_j=-5.0)
    with pytest.raises(ValidationError) as exc_info:
        validate_system(bad)
    names = {(v.where, v.name) for v in exc_info.value.violations}
    assert ("resonator_1", "mass") in names
    assert ("resonator_1", "thickness") in names
    assert (None, "coupling_j") in names
    assert len(exc_info.value.violations) == 3


def test_system_violations_returns_empty_for_valid(device):
    assert system_violations(device) == []


def test_validate_resonator_flags_each_field():
    res = MechanicalResonator(omega_m=0.0, mass=-1.0, quality_factor=0.0, thickness=0.0, gamma_m=-1.0)
    assert {v.name for v in validate_resonator(res)} == {
        "omega_m",
        "mass",
        "quality_factor",
        "thickness",
        "gamma_m",
    }


def test_validate_cavity_allows_zero_detuning_and_photons():
    cav = OpticalCavity(length=1e-4, kappa=1.0, detuning=0.0, n_cav=0.0)
    assert validate_cavity(cav) == []
    assert {v.name for v in validate_cavity(OpticalCavity(length=0.0, kappa=0.0, detuning=0.0, n_cav=-1.0))} == {
        "length",
        "kappa",
        "n_cav",
    }


def test_require_helpers():
    require_positive("x", 1.0)
    require_nonnegative("x", 0.0)
    with pytest.raises(NonPositiveParameterError):
        require_positive("x", 0.0)
    with pytest.raises(NonPositiveParameterError):
        require_nonnegative("x", -1e-300)


def test_drive_amplitude_from_thickness():
    assert drive_amplitude_from_thickness(8e-8) == pytest.approx(4.24e-8, rel=1e-12)
    assert drive_amplitude_from_thickness(1.0) == 0.53
    assert drive_amplitude_from_thickness(1.6e-7) == pytest.approx(2 * drive_amplitude_from_thickness(8e-8), rel=1e-15)
    with pytest.raises(NonPositiveParameterError):
        drive_amplitude_from_thickness(0.0)


def test_invalid_systems_can_be_built_and_inspected():
    # construction never validates; only validate_system does
    res = MechanicalResonator(omega_m=-1.0, mass=1.0, quality_factor=1.0, thickness=1.0)
    cav = OpticalCavity(length=1.0, kappa=1.0, detuning=0.0, n_cav=0.0)
    system = CoupledSystem(resonator_1=res, resonator_2=res, cavity_1=cav, cavity_2=cav, coupling_j=1.0)
    assert len(system_violations(system)) == 2


def test_balanced_system_factory_shares_resonator(device):
    assert device.resonator_1 is device.resonator_2
    assert device.cavity_1.length == device.cavity_2.length
    assert device.cavity_1.n_cav == 0.0
