"""Tests for materials, device stacks, presets and device files."""

from __future__ import annotations

import json
import textwrap
from pathlib import Path

import pytest

from sunstack import ConfigError, DeviceError, build_stack, load_device, preset, save_device
from sunstack.device import PRESET_NAMES, default_materials, make_layer
from sunstack.device.io import dump_device, loads_device, stack_to_document


def _write(path: Path, content: str) -> Path:
    path.write_text(textwrap.dedent(content))
    return path


def test_material_labels_drop_conductivity_prefix():
    materials = default_materials()

    assert sorted(m.label for m in materials.values()) == ["CIGS", "CdS", "GaAs", "ZnO"]
    assert materials["p-CIGS"].bandgap == 1.1
    assert materials["n-ZnO"].electron_affinity == 4.6


@pytest.mark.parametrize(
    ("name", "row"),
    [
        ("p-GaAs", (1.42, 4.07, 12.9, 2e18, 1e19, 1e7, 1e7, 1e3, 1e2)),
        ("p-CIGS", (1.1, 4.5, 13.6, 2.2e18, 1.8e19, 1e7, 1e7, 1e2, 1e1)),
        ("n-CdS", (2.45, 4.4, 10.0, 2.2e18, 1.8e19, 1e7, 1e7, 1e2, 1e1)),
        ("n-ZnO", (3.3, 4.6, 9.0, 2.2e18, 1.8e19, 1e7, 1e7, 1e2, 2.5e1)),
    ],
)
def test_material_library_matches_reference_table(name, row):
    m = default_materials()[name]

    assert (
        m.bandgap,
        m.electron_affinity,
        m.rel_permittivity,
        m.Nc,
        m.Nv,
        m.vth_e,
        m.vth_h,
        m.mu_e,
        m.mu_h,
    ) == row
    assert m.trap is not None
    assert (m.trap.density, m.trap.sigma_e, m.trap.sigma_p) == (1e14, 1e-15, 1e-15)


def test_default_trap_gives_microsecond_lifetimes():
    cigs = default_materials()["p-CIGS"]

    tau_n, tau_p = cigs.trap.lifetimes(cigs.vth_e, cigs.vth_h)

    assert tau_n == pytest.approx(1e-6)
    assert tau_p == pytest.approx(1e-6)


def test_presets_are_ordered_back_to_front():
    assert preset("pn-baseline").labels == ["CIGS", "CdS", "ZnO"]
    assert preset("ppn-optimized").labels == ["GaAs", "CIGS", "CdS", "ZnO"]

    ppn = preset("ppn-optimized")
    assert ppn.layers[0].thickness_um == 5.0
    assert ppn.layers[0].doping_type == "acceptor"
    assert ppn.layers[0].doping_cm3 == 1e20
    assert ppn.layers[1].doping_cm3 == 1e20
    assert ppn.total_thickness_um == pytest.approx(11.0)


def test_every_preset_builds():
    for name in PRESET_NAMES:
        stack = preset(name)
        assert len(stack.layers) in (3, 4)
        assert stack.temperature == 300.0
        assert stack.front_contact.majority_barrier_ev == 0.0
        assert stack.back_contact.majority_barrier_ev is None


def test_unknown_preset_lists_choices():
    with pytest.raises(DeviceError) as exc:
        preset("tandem")

    assert "pn-baseline" in str(exc.value)


def test_with_parameter_returns_modified_copy():
    base = preset("pn-baseline")

    thicker = base.with_parameter("CIGS", "thickness_um", 2.5)

    assert thicker.layers[0].thickness_um == 2.5
    assert base.layers[0].thickness_um == 0.5
    assert thicker.with_parameter("cds", "doping_cm3", 1e18).layers[1].doping_cm3 == 1e18


def test_with_parameter_rejects_bad_targets():
    base = preset("pn-baseline")

    with pytest.raises(DeviceError, match="Unknown layer 'Foo'"):
        base.with_parameter("Foo", "thickness_um", 1.0)
    with pytest.raises(DeviceError, match="Unknown layer parameter"):
        base.with_parameter("CIGS", "bandgap", 1.2)
    with pytest.raises(DeviceError) as exc:
        base.with_parameter("CdS", "thickness_um", 0.0)
    assert exc.value.layer_index == 1


def test_ambiguous_labels_need_names():
    stack = build_stack(
        [
            ("p-CIGS", 1.0, "acceptor", 1e16),
            ("p-CIGS", 1.0, "donor", 1e16),
        ]
    )

    with pytest.raises(DeviceError, match="ambiguous"):
        stack.layer_index("CIGS")

    named = build_stack(
        [
            ("p-CIGS", 1.0, "acceptor", 1e16, "p-side"),
            ("p-CIGS", 1.0, "donor", 1e16, "n-side"),
        ]
    )
    assert named.layer_index("n-side") == 1


def test_make_layer_reports_layer_index():
    with pytest.raises(DeviceError) as exc:
        make_layer(2, "n-CdS", -1.0, "donor", 1e16)

    assert exc.value.layer_index == 2
    assert exc.value.field == "thickness_um"
    assert "Layer 2 (layers.2.thickness_um)" in str(exc.value)

    with pytest.raises(DeviceError, match="unknown material 'Si'"):
        make_layer(0, "Si", 1.0, "donor", 1e16)
    with pytest.raises(DeviceError, match="doping_type"):
        make_layer(1, "n-CdS", 1.0, "n", 1e16)


def test_with_layer_inserts_at_back_or_front():
    base = preset("pn-optimized")
    gaas = make_layer(0, "p-GaAs", 0.5, "acceptor", 1e10)

    assert base.with_layer(gaas, "back").labels == ["GaAs", "CIGS", "CdS", "ZnO"]
    assert base.with_layer(gaas, "front").labels == ["CIGS", "CdS", "ZnO", "GaAs"]


def test_with_temperature_validates():
    assert preset("pn-baseline").with_temperature(320).temperature == 320.0
    with pytest.raises(DeviceError):
        preset("pn-baseline").with_temperature(0)


def test_device_file_round_trip_json(tmp_path):
    stack = preset("ppn-optimized")

    path = save_device(stack, tmp_path / "ppn.json")
    loaded = load_device(path)

    assert loaded == stack
    assert "materials" not in json.loads(path.read_text())
    assert json.loads(path.read_text())["contacts"]["front"]["majority_barrier_ev"] == 0.0


def test_device_file_yaml_with_env_and_inline_material(monkeypatch, tmp_path):
    monkeypatch.setenv("ABSORBER_UM", "2.5")
    path = _write(
        tmp_path / "device.yaml",
        """
        temperature_K: 310
        materials:
          wide-absorber:
            bandgap: 1.3
            electron_affinity: 4.4
            rel_permittivity: 13.0
            Nc: 2.2e18
            Nv: 1.8e19
            vth_e: 1.0e7
            vth_h: 1.0e7
            mu_e: 100
            mu_h: 25
        layers:
          - material: wide-absorber
            thickness_um: ${env:ABSORBER_UM}
            doping_type: acceptor
            doping_cm3: 1.0e16
          - material: n-CdS
            thickness_um: ${env:BUFFER_UM:0.05}
            doping_type: donor
            doping_cm3: 1.0e17
        """,
    )

    stack = load_device(path)

    assert stack.temperature == 310.0
    assert stack.layers[0].material.bandgap == 1.3
    assert stack.layers[0].thickness_um == 2.5
    assert stack.layers[1].thickness_um == 0.05
    assert stack_to_document(stack)["materials"]["wide-absorber"]["bandgap"] == 1.3
    assert loads_device(dump_device(stack, ".yaml"), ".yaml") == stack


def test_malformed_json_reports_line(tmp_path):
    path = _write(tmp_path / "bad.json", '{\n  "layers": [\n    {"material": "p-CIGS",,}\n  ]\n}\n')

    with pytest.raises(ConfigError, match="line 3"):
        load_device(path)


def test_invalid_layer_names_field_and_index(tmp_path):
    path = tmp_path / "device.json"
    path.write_text(
        json.dumps(
            {
                "layers": [
                    {"material": "p-CIGS", "thickness_um": 1, "doping_type": "acceptor", "doping_cm3": 1e16},
                    {"material": "n-CdS", "thickness_um": 0, "doping_type": "donor", "doping_cm3": 1e17},
                ]
            }
        )
    )

    with pytest.raises(DeviceError) as exc:
        load_device(path)

    assert exc.value.layer_index == 1
    assert exc.value.field == "layers.1.thickness_um"
    assert "layers.1.thickness_um" in str(exc.value)


def test_structural_errors_name_the_field(tmp_path):
    path = tmp_path / "device.json"
    path.write_text(json.dumps({"layers": [{"material": "p-CIGS"}], "colour": "blue"}))

    with pytest.raises(ConfigError) as exc:
        load_device(path)

    message = str(exc.value)
    assert "colour" in message
    assert "layers" in message


def test_single_layer_stack_rejected():
    with pytest.raises(DeviceError, match="at least 2 layers"):
        build_stack([("p-CIGS", 1.0, "acceptor", 1e16)])
