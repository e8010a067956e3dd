# tests/test_lossmodel.py
import pytest

from cavitybias.domain.errors import InvalidInputError, UnsupportedModeError
from cavitybias.domain.models import TE101, TE301, MaterialSpec
from cavitybias.services.lossmodel import (
    conductivity_from_linewidth,
    conductivity_from_rrr,
    electrode_linewidth,
    loss_budget,
    q_from_surface_resistance,
    quality_factors,
    surface_resistivity,
    trapped_flux_q_limit,
    trapped_flux_resistance,
)


def test_copper_surface_resistivity():
    assert surface_resistivity(5.8e7, 20.59e9) == pytest.approx(52.94e-3, rel=1e-3)


def test_trapped_flux_resistance_at_20_mT():
    assert trapped_flux_resistance(20e-3, 20.59e9) == pytest.approx(1.997e-4, rel=1e-3)
    assert trapped_flux_resistance(0.0, 20.59e9) == 0.0


def test_trapped_flux_q_limits(geometry):
    assert trapped_flux_q_limit(geometry, TE301, 20e-3).q == pytest.approx(1.705e6, rel=3e-3)
    assert trapped_flux_q_limit(geometry, TE301, 1e-3).q == pytest.approx(3.41e7, rel=3e-3)
    no_field = trapped_flux_q_limit(geometry, TE301, 0.0)
    assert not no_field.limited
    assert no_field.to_dict()["q"] == "no-limit"


def test_negative_surface_resistance_rejected(geometry):
    with pytest.raises(InvalidInputError):
        q_from_surface_resistance(geometry, TE301, -1e-3)


def test_electrode_linewidth_and_inversion():
    assert electrode_linewidth(5.8e7) == pytest.approx(121e3)
    assert electrode_linewidth(2.1e6) == pytest.approx(635.9e3, rel=1e-3)
    assert conductivity_from_linewidth(637e3) == pytest.approx(2.093e6, rel=1e-3)
    assert conductivity_from_linewidth(46.3e3) == pytest.approx(3.961e8, rel=1e-3)
    assert electrode_linewidth(conductivity_from_linewidth(250e3)) == pytest.approx(250e3, rel=1e-12)
    assert electrode_linewidth(float("inf")) == 0.0


def test_electrode_scaling_is_calibrated_for_te301_only():
    with pytest.raises(UnsupportedModeError):
        electrode_linewidth(5.8e7, TE101)
    with pytest.raises(InvalidInputError):
        conductivity_from_linewidth(0.0)


def test_rrr_conductivity():
    assert conductivity_from_rrr(7) == pytest.approx(4.06e8)


def test_quality_factors():
    factors = quality_factors(20.59e9, 11.9e3, 0.105)
    assert factors.loaded_q == pytest.approx(1.7303e6, rel=1e-4)
    assert factors.internal_q == pytest.approx(1.933e6, rel=1e-3)
    with pytest.raises(InvalidInputError):
        quality_factors(20.59e9, 11.9e3, 1.2)


def test_loss_budget_components_sum_to_total(geometry):
    material = MaterialSpec("copper", conductivity=2.1e6, trapped_field=1e-3)
    budget = loss_budget(geometry, TE301, 11.9e3, material, 0.105, 20.59e9)
    assert budget.electrode_linewidth == pytest.approx(635.9e3, rel=1e-3)
    assert budget.trapped_flux_linewidth > 0
    parts = sum(getattr(budget, name) for name in budget.COMPONENTS)
    assert parts == pytest.approx(budget.total_linewidth, rel=1e-12)
    assert budget.internal_q == pytest.approx(20.59e9 / budget.internal_linewidth, rel=1e-12)


def test_superconducting_electrodes_add_no_linewidth(geometry):
    budget = loss_budget(geometry, TE301, 11.9e3, MaterialSpec(superconductor=True), 0.105, 20.59e9)
    assert budget.electrode_linewidth == 0.0
    assert budget.trapped_flux_linewidth == 0.0
    assert budget.loaded_q == pytest.approx(20.59e9 * (1 - 0.105) / 11.9e3, rel=1e-12)


def test_loss_budget_without_dissipation_rejected(geometry):
    with pytest.raises(InvalidInputError):
        loss_budget(geometry, TE301, 0.0, MaterialSpec(superconductor=True), 0.1)


def test_normal_material_needs_conductivity():
    with pytest.raises(InvalidInputError):
        MaterialSpec("copper")
