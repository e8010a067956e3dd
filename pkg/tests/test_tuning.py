# tests/test_tuning.py
import numpy as np
import pytest

from cavitybias.domain.errors import InvalidInputError
from cavitybias.domain.models import TE301, RodInsertion
from cavitybias.services.tuning import perturbation_shift, tuning_curve

SAPPHIRE = RodInsertion("dielectric", 1.9e-3, 4.2e-3, permittivity=9.0)
NIOBIUM = RodInsertion("conductor", 1.9e-3, 1.55e-3)


def test_sapphire_rod_lowers_the_frequency(geometry):
    shift = perturbation_shift(geometry, TE301, SAPPHIRE)
    assert shift.shift == pytest.approx(-153e6, rel=0.03)
    assert not shift.non_perturbative


def test_niobium_rod_raises_the_frequency(geometry):
    shift = perturbation_shift(geometry, TE301, NIOBIUM)
    assert shift.shift == pytest.approx(39.8e6, rel=0.03)


def test_zero_depth_gives_zero_shift(geometry):
    assert perturbation_shift(geometry, TE301, SAPPHIRE.at_depth(0.0)).shift == 0.0


def test_dielectric_tuning_curve_is_monotonic(geometry):
    curve = tuning_curve(geometry, TE301, SAPPHIRE, np.linspace(0.0, 4.2e-3, 8))
    shifts = [p.shift for p in curve]
    assert shifts[0] == 0.0
    assert all(b < a for a, b in zip(shifts, shifts[1:]))


def test_depolarization_reduces_the_shift(geometry):
    full = RodInsertion("dielectric", 1.9e-3, 4.2e-3, permittivity=9.0, depolarize=False)
    reduced = perturbation_shift(geometry, TE301, SAPPHIRE).shift
    assert perturbation_shift(geometry, TE301, full).shift == pytest.approx(5.0 * reduced, rel=1e-9)


def test_deep_insertion_is_flagged_non_perturbative(geometry):
    rod = RodInsertion("dielectric", 1.9e-3, geometry.lx, permittivity=9.0, depolarize=False)
    assert perturbation_shift(geometry, TE301, rod).non_perturbative


def test_rod_validation(geometry):
    with pytest.raises(InvalidInputError):
        perturbation_shift(geometry, TE301, SAPPHIRE.at_depth(2 * geometry.lx))
    with pytest.raises(InvalidInputError):
        perturbation_shift(geometry, TE301, RodInsertion("dielectric", 2.5e-3, 1e-3, permittivity=9.0))
    with pytest.raises(InvalidInputError):
        RodInsertion("dielectric", 1.9e-3, 1e-3, permittivity=0.5)
