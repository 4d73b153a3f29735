from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from sw_lift.field_io import MAGIC, read_field, write_field
from sw_lift.kaluza_klein import SectorSpinor, lift, unlift
from sw_lift.torus_fields import (
    Charge,
    GaugeField,
    Grid4,
    SpinorField,
    TwoFormField,
    random_gauge,
    random_spinor,
    random_two_form,
)


def test_spinor_dump_preserves_samples(tmp_path: Path) -> None:
    phi = random_spinor(Grid4(4), 1, 1, "plus")
    path = write_field(tmp_path / "phi.field", phi)
    loaded = read_field(path)
    assert isinstance(loaded, SpinorField)
    assert loaded.chirality == "plus"
    np.testing.assert_array_equal(loaded.values, phi.values)


def test_gauge_dump_keeps_holonomy(tmp_path: Path) -> None:
    A = random_gauge(Grid4(4), 2, 1)
    loaded = read_field(write_field(tmp_path / "gauge.field", A))
    assert isinstance(loaded, GaugeField)
    np.testing.assert_array_equal(loaded.components, A.components)
    np.testing.assert_array_equal(loaded.holonomy, A.holonomy)


def test_two_form_dump_keeps_value_class(tmp_path: Path) -> None:
    mu = random_two_form(Grid4(4), 3, 1, selfdual=True)
    loaded = read_field(write_field(tmp_path / "mu.field", mu))
    assert isinstance(loaded, TwoFormField)
    assert loaded.value_class == "imaginary"
    np.testing.assert_array_equal(loaded.values, mu.values)


def test_sector_dump_keeps_charge(tmp_path: Path) -> None:
    psi = lift(random_spinor(Grid4(4), 4, 1, "plus"), Charge(-3))
    loaded = read_field(write_field(tmp_path / "nested" / "psi.field", psi))
    assert isinstance(loaded, SectorSpinor)
    assert loaded.charge == Charge(-3)
    np.testing.assert_array_equal(loaded.values, psi.values)


@pytest.mark.parametrize("chirality", ["plus", "minus", "full"])
def test_sector_dump_keeps_origin_so_unlift_recovers_the_base_spinor(
    tmp_path: Path, chirality: str
) -> None:
    phi = random_spinor(Grid4(4), 6, 1, chirality)  # type: ignore[arg-type]
    loaded = read_field(write_field(tmp_path / "psi.field", lift(phi, Charge(2))))
    assert isinstance(loaded, SectorSpinor)
    assert loaded.origin == chirality
    restored = unlift(loaded)
    assert restored.chirality == chirality
    np.testing.assert_array_equal(restored.values, phi.values)


def test_sector_dump_header_carries_origin_byte(tmp_path: Path) -> None:
    psi = lift(random_spinor(Grid4(4), 7, 1, "minus"), Charge(1))
    payload = write_field(tmp_path / "psi.field", psi).read_bytes()
    # header, dims, kind byte, int32 charge, origin byte, then four components per site
    assert len(payload) == 16 + 16 + 1 + 4 + 1 + 4**4 * 4 * 16
    assert payload[33:37] == (1).to_bytes(4, "little", signed=True)
    assert payload[37] == 2


def test_dump_header(tmp_path: Path) -> None:
    path = write_field(tmp_path / "phi.field", random_spinor(Grid4(4), 5, 1, "minus"))
    payload = path.read_bytes()
    assert payload.startswith(MAGIC)
    # header, dims, kind byte, then N^4 sites of two complex samples
    assert len(payload) == 16 + 16 + 1 + 4**4 * 2 * 16


def test_read_rejects_foreign_files(tmp_path: Path) -> None:
    path = tmp_path / "bogus.field"
    path.write_bytes(b"NOT-A-FIELD!" + bytes(40))
    with pytest.raises(ValueError):
        read_field(path)


def test_write_rejects_unknown_objects(tmp_path: Path) -> None:
    with pytest.raises(TypeError):
        write_field(tmp_path / "x.field", np.zeros(3))  # type: ignore[arg-type]
