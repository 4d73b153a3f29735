from __future__ import annotations

import logging

import numpy as np
import pytest

from sw_lift.seiberg_witten import (
    GaugeTransform,
    SWConfiguration,
    charge_conjugate_config,
    conjugate_plus_values,
    gauge_transform,
    manufactured_mu,
    manufactured_solution,
    random_configuration,
    residual_norms,
    sigma_field,
    sw_residual,
    winding_fits_grid,
    winding_grid_size,
)
from sw_lift.torus_fields import (
    Charge,
    GaugeField,
    Grid4,
    TwoFormField,
    random_spinor,
    selfdual_split_field,
)


def _relative(a: float, b: float) -> float:
    return abs(a - b) / max(1.0, abs(a))


def test_configuration_validates_its_fields() -> None:
    grid = Grid4(4)
    cfg = random_configuration(grid, 0, 1, Charge(1))
    with pytest.raises(ValueError):
        cfg.with_fields(phi=random_spinor(grid, 1, 1, "minus"))
    with pytest.raises(ValueError):
        SWConfiguration(cfg.A, cfg.phi, Charge(0), cfg.mu)
    with pytest.raises(ValueError):
        cfg.with_fields(mu=TwoFormField(grid, np.ones(grid.shape + (6,)), "real"))
    anti_selfdual = np.zeros(grid.shape + (6,), dtype=complex)
    anti_selfdual[..., 0] = 1j
    anti_selfdual[..., 5] = -1j
    with pytest.raises(ValueError):
        cfg.with_fields(mu=TwoFormField(grid, anti_selfdual, "imaginary"))
    with pytest.raises(ValueError):
        cfg.with_fields(A=GaugeField.zero(Grid4(8)))


def test_sigma_field_is_imaginary_selfdual() -> None:
    grid = Grid4(4)
    field = sigma_field(random_spinor(grid, 2, 1, "plus"))
    assert field.value_class == "imaginary"
    _, minus = selfdual_split_field(field)
    np.testing.assert_allclose(minus.values, 0.0, atol=1e-14)
    np.testing.assert_allclose(field.values.real, 0.0, atol=1e-14)


@pytest.mark.parametrize("doubled", [1, 2, -2])
def test_manufactured_solution_is_exact(doubled: int) -> None:
    cfg = manufactured_solution(Grid4(8), Charge(doubled), [1.0, 0.5j], (1, 0, 0, -1))
    assert sw_residual(cfg).objective() < 1e-20


def test_manufactured_mu_zeroes_the_curvature_equation() -> None:
    cfg = random_configuration(Grid4(8), [4, 1], 2, Charge(1))
    solved = cfg.with_fields(mu=manufactured_mu(cfg.A, cfg.phi, cfg.q))
    assert residual_norms(solved)["curvature"] < 1e-12
    assert residual_norms(solved)["dirac"] == pytest.approx(residual_norms(cfg)["dirac"])


def test_random_configuration_is_deterministic() -> None:
    first = random_configuration(Grid4(4), [9, 2], 1, Charge(2))
    second = random_configuration(Grid4(4), [9, 2], 1, Charge(2))
    np.testing.assert_array_equal(first.phi.values, second.phi.values)
    np.testing.assert_array_equal(first.mu.values, second.mu.values)
    without = random_configuration(Grid4(4), 9, 1, Charge(2), with_mu=False)
    np.testing.assert_array_equal(without.mu.values, 0.0)


def test_winding_fits_grid() -> None:
    grid = Grid4(8)
    phi = random_spinor(grid, 0, 2, "plus")
    assert winding_fits_grid(phi, Charge(1), (1, 0, 0, 0))
    assert winding_fits_grid(phi, Charge(2), (0, 1, 0, 0))
    assert not winding_fits_grid(phi, Charge(4), (1, 0, 0, 0))


@pytest.mark.parametrize("doubled", [1, 2, -1, -2])
def test_gauge_winding_preserves_residual_norms(doubled: int) -> None:
    cfg = random_configuration(Grid4(8), [1, doubled + 10], 2, Charge(doubled))
    winding = (1 if doubled > 0 else -1, 0, 0, 0)
    moved = gauge_transform(cfg, GaugeTransform(winding))
    before, after = residual_norms(cfg), residual_norms(moved)
    for key in ("dirac", "curvature"):
        assert _relative(before[key], after[key]) < 1e-11
    np.testing.assert_allclose(moved.A.holonomy, cfg.A.holonomy + 2.0 * np.array(winding))


def test_smooth_gauge_phase_on_fine_grid() -> None:
    grid = Grid4(32)
    cfg = random_configuration(grid, [2, 0], 2, Charge(1))
    moved = gauge_transform(cfg, GaugeTransform(chi=np.sin(grid.coordinate(1))))
    before, after = residual_norms(cfg), residual_norms(moved)
    for key in ("dirac", "curvature"):
        assert _relative(before[key], after[key]) < 1e-11


def test_gauge_transform_warns_when_winding_wraps_spectrum(caplog) -> None:
    cfg = random_configuration(Grid4(8), 3, 2, Charge(4))
    with caplog.at_level(logging.WARNING, logger="sw_lift.seiberg_witten"):
        gauge_transform(cfg, GaugeTransform((1, 0, 0, 0)))
    assert "aliased" in caplog.text


def test_gauge_transforms_compose() -> None:
    grid = Grid4(4)
    chi = np.cos(grid.coordinate(2))
    first = GaugeTransform((1, 0, 0, 0), chi)
    second = GaugeTransform((0, -1, 0, 2), 2.0 * chi)
    combined = first.compose(second)
    assert combined.winding == (1, -1, 0, 2)
    np.testing.assert_allclose(
        combined.phase(grid), first.phase(grid) + second.phase(grid), rtol=1e-13, atol=1e-12
    )
    with pytest.raises(ValueError):
        GaugeTransform((1, 0, 0))  # type: ignore[arg-type]


def test_gauge_action_composes_on_configurations() -> None:
    grid = Grid4(8)
    cfg = random_configuration(grid, [13, 1], 1, Charge(1))
    chi = 0.3 * np.sin(grid.coordinate(3))
    first = GaugeTransform((1, 0, 0, 0), chi)
    second = GaugeTransform((0, -1, 0, 1), -0.5 * np.cos(grid.coordinate(1)))

    stepwise = gauge_transform(gauge_transform(cfg, first), second)
    combined = gauge_transform(cfg, first.compose(second))
    np.testing.assert_allclose(stepwise.A.components, combined.A.components, atol=1e-12)
    np.testing.assert_allclose(stepwise.A.holonomy, combined.A.holonomy)
    np.testing.assert_allclose(stepwise.phi.values, combined.phi.values, atol=1e-12)
    np.testing.assert_array_equal(stepwise.mu.values, cfg.mu.values)


def test_composed_windings_preserve_residual_norms() -> None:
    grid = Grid4(8)
    cfg = random_configuration(grid, [13, 2], 1, Charge(1))
    first = GaugeTransform((1, 0, 0, 0))
    second = GaugeTransform((0, -1, 0, 1))
    assert winding_fits_grid(cfg.phi, cfg.q, first.compose(second).winding)
    before = residual_norms(cfg)
    for moved in (
        gauge_transform(gauge_transform(cfg, first), second),
        gauge_transform(cfg, first.compose(second)),
    ):
        after = residual_norms(moved)
        for key in ("dirac", "curvature"):
            assert _relative(before[key], after[key]) < 1e-11


@pytest.mark.parametrize("t", [0.0, 0.5, -2.0, 3.0])
def test_curvature_part_under_spinor_scaling(t: float) -> None:
    cfg = random_configuration(Grid4(4), [14, 1], 1, Charge(2))
    scaled = cfg.with_fields(phi=cfg.phi.scaled(t))
    expected = sw_residual(cfg).curvature_part - sigma_field(cfg.phi).scaled(t**2 - 1.0)
    np.testing.assert_allclose(
        sw_residual(scaled).curvature_part.values, expected.values, atol=1e-12
    )


def test_residual_is_real_linear_in_mu() -> None:
    grid = Grid4(4)
    cfg = random_configuration(grid, [15, 1], 1, Charge(1), with_mu=False)
    first = random_configuration(grid, [15, 2], 1, Charge(1)).mu
    second = random_configuration(grid, [15, 3], 1, Charge(1)).mu
    base = sw_residual(cfg).curvature_part
    combined = first.scaled(2.0) + second.scaled(-0.5)
    residual = sw_residual(cfg.with_fields(mu=combined))
    np.testing.assert_allclose(
        residual.curvature_part.values, (base - combined).values, atol=1e-12
    )
    np.testing.assert_array_equal(residual.dirac_part.values, sw_residual(cfg).dirac_part.values)


def test_charge_conjugation_preserves_norms_and_inverts() -> None:
    cfg = random_configuration(Grid4(8), [5, 5], 2, Charge(1))
    conjugate = charge_conjugate_config(cfg)
    assert conjugate.q == Charge(-1)
    np.testing.assert_allclose(conjugate.mu.values, -cfg.mu.values)
    before, after = residual_norms(cfg), residual_norms(conjugate)
    for key in ("dirac", "curvature"):
        assert _relative(before[key], after[key]) < 1e-11
    restored = charge_conjugate_config(conjugate, inverse=True)
    np.testing.assert_allclose(restored.phi.values, cfg.phi.values, atol=1e-14)
    assert restored.q == cfg.q


def test_plus_conjugation_squares_to_minus_identity() -> None:
    values = np.array([[1.0 + 2.0j, -0.5j]])
    twice = conjugate_plus_values(conjugate_plus_values(values))
    np.testing.assert_allclose(twice, -values, atol=1e-14)


@pytest.mark.parametrize(
    ("n", "kmax", "doubled", "expected"),
    [(8, 2, 1, 8), (8, 2, 4, 14), (4, 1, 2, 8), (16, 1, 4, 16), (4, 1, -4, 12)],
)
def test_winding_grid_size(n: int, kmax: int, doubled: int, expected: int) -> None:
    winding = (1 if doubled > 0 else -1, 0, 0, 0)
    size = winding_grid_size(n, kmax, Charge(doubled), winding)
    assert size == expected
    cfg = random_configuration(Grid4(size), [16, doubled], kmax, Charge(doubled))
    assert winding_fits_grid(cfg.phi, cfg.q, winding)
    with pytest.raises(ValueError):
        winding_grid_size(n, -1, Charge(doubled), winding)
