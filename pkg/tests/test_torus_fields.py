from __future__ import annotations

import numpy as np
import pytest

from sw_lift.torus_fields import (
    Charge,
    GaugeField,
    Grid4,
    GridMismatchError,
    SpinorField,
    curvature,
    dirac_X,
    exterior_derivative,
    l2_inner,
    l2_inner_fourier,
    l2_norm,
    max_wavenumber,
    partial_values,
    random_band_limited,
    random_gauge,
    random_spinor,
    random_two_form,
    selfdual_split_field,
    spectral_partial,
)


@pytest.mark.parametrize("n", [2, 3, 5, 7])
def test_grid_rejects_small_or_odd_sizes(n: int) -> None:
    with pytest.raises(ValueError):
        Grid4(n)


def test_grid_geometry() -> None:
    grid = Grid4(8)
    assert grid.shape == (8, 8, 8, 8)
    assert grid.site_count == 4096
    assert grid.spacing == pytest.approx(np.pi / 4)
    x = grid.coordinate(2)
    assert x[0, 3, 0, 0] == pytest.approx(3 * np.pi / 4)
    assert x[5, 3, 1, 7] == pytest.approx(3 * np.pi / 4)


def test_charge_stores_twice_the_value() -> None:
    assert Charge.of(0.5) == Charge(1)
    assert Charge.of(-2) == Charge(-4)
    assert Charge(3).value == 1.5
    assert str(Charge(-1)) == "-1/2"
    assert -Charge(2) == Charge(-2)
    assert Charge(0).is_zero
    with pytest.raises(ValueError):
        Charge.of(0.3)


def test_spectral_derivative_of_single_mode() -> None:
    grid = Grid4(8)
    x = grid.coordinate(1)
    np.testing.assert_allclose(partial_values(np.sin(3 * x), 1), 3 * np.cos(3 * x), atol=1e-12)
    np.testing.assert_allclose(partial_values(np.sin(3 * x), 2), 0.0, atol=1e-12)
    derivative = partial_values(np.exp(2j * x), 1)
    np.testing.assert_allclose(derivative, 2j * np.exp(2j * x), atol=1e-12)


def test_real_field_derivative_stays_real() -> None:
    grid = Grid4(8)
    x = grid.coordinate(3)
    derivative = partial_values(np.cos(4 * x), 3)
    assert not np.iscomplexobj(derivative)


def test_spectral_partial_dispatches_on_field_type() -> None:
    grid = Grid4(8)
    phi = random_spinor(grid, 1, 2, "plus")
    assert spectral_partial(phi, 1).chirality == "plus"
    gauge = spectral_partial(random_gauge(grid, 2, 2), 4)
    assert isinstance(gauge, GaugeField)
    np.testing.assert_allclose(gauge.holonomy, 0.0)
    with pytest.raises(TypeError):
        spectral_partial("not a field", 1)  # type: ignore[arg-type]
    with pytest.raises(ValueError):
        partial_values(np.zeros(grid.shape), 5)


def test_curvature_of_simple_connection() -> None:
    grid = Grid4(8)
    components = np.zeros((4,) + grid.shape)
    components[1] = np.sin(grid.coordinate(1))
    F = curvature(GaugeField(grid, components, np.zeros(4)))
    assert F.value_class == "imaginary"
    np.testing.assert_allclose(F.values[..., 0], 1j * np.cos(grid.coordinate(1)), atol=1e-12)
    np.testing.assert_allclose(F.values[..., 1:], 0.0, atol=1e-12)


def test_holonomy_does_not_contribute_to_curvature() -> None:
    grid = Grid4(4)
    F = curvature(GaugeField.flat(grid, [0.3, -1.0, 2.0, 0.5]))
    np.testing.assert_allclose(F.values, 0.0)


def test_bianchi_identity() -> None:
    grid = Grid4(8)
    F = curvature(random_gauge(grid, 4, 2))
    assert np.max(np.abs(exterior_derivative(F))) < 1e-11 * max(1.0, l2_norm(F))


def test_selfdual_split_is_orthogonal() -> None:
    grid = Grid4(8)
    F = random_two_form(grid, 5, 2)
    plus, minus = selfdual_split_field(F)
    np.testing.assert_allclose((plus + minus).values, F.values, atol=1e-14)
    assert abs(l2_inner(plus, minus)) < 1e-10 * l2_norm(F) ** 2


def test_random_selfdual_two_form_has_no_anti_selfdual_part() -> None:
    grid = Grid4(4)
    _, minus = selfdual_split_field(random_two_form(grid, 6, 1, selfdual=True))
    np.testing.assert_allclose(minus.values, 0.0, atol=1e-14)


def test_parseval() -> None:
    grid = Grid4(8)
    phi = random_spinor(grid, [1, 2], 2, "full")
    chi = random_spinor(grid, [1, 3], 2, "full")
    direct = l2_inner(phi, chi)
    assert l2_inner_fourier(phi, chi) == pytest.approx(direct, rel=1e-12)
    assert l2_norm(np.ones(grid.shape)) == pytest.approx((2 * np.pi) ** 2)


def test_inner_product_rejects_grid_mismatch() -> None:
    phi = random_spinor(Grid4(4), 0, 1, "plus")
    chi = random_spinor(Grid4(8), 0, 1, "plus")
    with pytest.raises(GridMismatchError):
        l2_inner(phi, chi)
    with pytest.raises(GridMismatchError):
        phi + chi


def test_spinor_arithmetic_checks_chirality() -> None:
    grid = Grid4(4)
    with pytest.raises(ValueError):
        random_spinor(grid, 0, 1, "plus") + random_spinor(grid, 0, 1, "minus")


def test_field_samples_are_read_only() -> None:
    phi = random_spinor(Grid4(4), 0, 1, "plus")
    assert not phi.values.flags.writeable
    with pytest.raises(ValueError):
        SpinorField(Grid4(4), "plus", np.zeros((4, 4, 4, 4, 4)))


def test_weyl_parts_round_trip_through_full() -> None:
    phi = random_spinor(Grid4(4), 9, 1, "minus")
    full = phi.to_full()
    np.testing.assert_allclose(full.values[..., :2], 0.0)
    np.testing.assert_allclose(full.minus_part().values, phi.values)


def test_random_fields_are_band_limited_and_deterministic() -> None:
    grid = Grid4(8)
    phi = random_band_limited(grid, [3, 1], 2, "spinor+")
    assert max_wavenumber(phi.values) <= 2
    np.testing.assert_array_equal(phi.values, random_spinor(grid, [3, 1], 2, "plus").values)
    assert max_wavenumber(random_band_limited(grid, 11, 1, "scalar")) <= 1
    with pytest.raises(ValueError):
        random_spinor(grid, 0, 4, "plus")
    with pytest.raises(ValueError):
        random_band_limited(grid, 0, 1, "vector")  # type: ignore[arg-type]


def test_twisted_dirac_flips_chirality() -> None:
    grid = Grid4(4)
    A = random_gauge(grid, 1, 1)
    q = Charge(1)
    assert dirac_X(A, q, random_spinor(grid, 2, 1, "plus")).chirality == "minus"
    assert dirac_X(A, q, random_spinor(grid, 3, 1, "minus")).chirality == "plus"
    assert dirac_X(A, q, random_spinor(grid, 4, 1, "full")).chirality == "full"


def test_twisted_dirac_is_self_adjoint() -> None:
    grid = Grid4(8)
    A = random_gauge(grid, 10, 2)
    q = Charge(-2)
    phi = random_spinor(grid, 11, 2, "full")
    chi = random_spinor(grid, 12, 2, "full")
    left = l2_inner(dirac_X(A, q, phi), chi)
    right = l2_inner(phi, dirac_X(A, q, chi))
    assert abs(left - right) < 1e-10 * max(1.0, abs(left))


def test_twisted_dirac_kills_covariantly_constant_spinor() -> None:
    grid = Grid4(8)
    winding = np.array([1, 0, -1, 0])
    phase = np.exp(-1j * (winding[0] * grid.coordinate(1) + winding[2] * grid.coordinate(3)))
    phi = SpinorField(grid, "plus", phase[..., None] * np.array([1.0, 2.0j]))
    A = GaugeField.flat(grid, 2.0 * winding)
    assert l2_norm(dirac_X(A, Charge(1), phi)) < 1e-11
