# tests/test_geometry.py
import numpy as np
import pytest

from cavitybias.domain.errors import InvalidInputError, UnsupportedModeError
from cavitybias.domain.models import (
    TE101, TE201, TE301, AccessHole, CavityGeometry, Electrode, GridSpec, ModeField, ModeIndex,
)
from cavitybias.services.geometry import (
    geometry_factor, geometry_factor_closed_form, mode_field, mode_table, node_planes, resonance_frequency,
)


@pytest.mark.parametrize("mode, expected", [(TE101, 12.203e9), (TE201, 15.868e9), (TE301, 20.572e9)])
def test_resonance_frequencies_of_reference_box(geometry, mode, expected):
    assert resonance_frequency(geometry, mode) == pytest.approx(expected, rel=2e-4)


def test_frequency_scales_inversely_with_size(geometry):
    assert resonance_frequency(geometry.scaled(2.0), TE301) == pytest.approx(
        resonance_frequency(geometry, TE301) / 2.0, rel=1e-12)


def test_modes_outside_te_m0l_family_are_rejected(geometry):
    with pytest.raises(UnsupportedModeError):
        resonance_frequency(geometry, ModeIndex(1, 1, 1))
    with pytest.raises(InvalidInputError):
        resonance_frequency(geometry, ModeIndex(0, 0, 0))
    with pytest.raises(InvalidInputError):
        resonance_frequency(geometry, ModeIndex(1, 0, 0))


def test_mode_label_parsing():
    assert ModeIndex.parse("te301") == TE301
    assert TE201.label == "TE201"
    with pytest.raises(InvalidInputError):
        ModeIndex.parse("TM3")


def test_te301_node_planes_hold_the_electrodes(geometry):
    planes = node_planes(TE301, geometry)
    assert planes == pytest.approx([geometry.lx / 3, 2 * geometry.lx / 3])
    assert [e.position[0] for e in geometry.electrodes] == pytest.approx(planes)


def test_mode_field_is_peak_normalized_and_vanishes_on_nodes(geometry):
    field = ModeField(TE301, geometry)
    peak = mode_field(field, [geometry.lx / 6, geometry.ly / 2, geometry.lz / 2])
    assert np.linalg.norm(peak["E"]) == pytest.approx(1.0)
    for x in node_planes(TE301, geometry):
        on_node = mode_field(field, [x, 1e-3, 3e-3])
        assert np.linalg.norm(on_node["E"]) == pytest.approx(0.0, abs=1e-12)
    wall = mode_field(field, [5e-3, 2e-3, 0.0])
    assert np.linalg.norm(wall["E"]) == pytest.approx(0.0, abs=1e-12)


def test_mode_field_rejects_points_outside(geometry):
    with pytest.raises(InvalidInputError):
        mode_field(ModeField(TE301, geometry), [geometry.lx * 1.1, 0.0, 0.0])


def test_geometry_factor_matches_closed_form(geometry):
    for mode in (TE101, TE201, TE301):
        assert geometry_factor(geometry, mode) == pytest.approx(geometry_factor_closed_form(geometry, mode),
                                                                rel=1e-8)
    assert geometry_factor(geometry, TE301) == pytest.approx(340.5, rel=2e-3)


def test_mode_table_rows(geometry):
    rows = mode_table(geometry, [TE101, TE301])
    assert [r["mode"] for r in rows] == ["TE101", "TE301"]
    assert rows[1]["node_planes_m"] == pytest.approx(node_planes(TE301, geometry))


def test_geometry_validation():
    with pytest.raises(InvalidInputError):
        CavityGeometry(0.0, 7e-3, 14e-3)
    with pytest.raises(InvalidInputError):
        CavityGeometry(25.6e-3, 7e-3, 14e-3, electrodes=[Electrode((30e-3, 3.5e-3), 0.25e-3, axis="z")])
    with pytest.raises(InvalidInputError):
        CavityGeometry(25.6e-3, 7e-3, 14e-3, electrodes=[Electrode((10e-3, 3.5e-3), 1e-3, axis="z")])
    with pytest.raises(InvalidInputError):
        CavityGeometry(25.6e-3, 7e-3, 14e-3,
                       electrodes=[Electrode((10e-3, 3.5e-3), 0.25e-3, axis="z")],
                       access_holes=[AccessHole((10e-3, 3.5e-3), 1.5e-3)])


def test_grid_resolution_floor():
    with pytest.raises(InvalidInputError):
        GridSpec(8, 16, 16)
    assert GridSpec(24, 16, 16).refined().shape == (49, 33, 33)
