from __future__ import annotations

import numpy as np
import pytest

from sw_lift.kaluza_klein import (
    KKGeometry,
    SectorSpinor,
    action_gradient,
    charge_conjugate_sector,
    chirality_split,
    constant_length_eigenvalue,
    cubic_residual,
    dirac_Y,
    dirac_Y_frame,
    dirac_Y_reduced,
    frame_connection,
    gross_neveu_action,
    lift,
    nabla_Y,
    nabla_Y_lemma,
    residual_decomposition_check,
    sector_inner,
    unlift,
)
from sw_lift.seiberg_witten import (
    charge_conjugate_config,
    manufactured_solution,
    random_configuration,
)
from sw_lift.torus_fields import (
    Charge,
    GaugeField,
    Grid4,
    SpinorField,
    dirac_X,
    l2_norm,
    random_gauge,
    random_spinor,
)

# Charge stores 2q: q in {1/2, 1, -1, 2}.
CHARGES = [Charge(1), Charge(2), Charge(-2), Charge(4)]


def _relative(difference: float, *scales: float) -> float:
    return difference / max(1.0, *scales)


def test_geometry_validates_radius() -> None:
    grid = Grid4(4)
    gauge = GaugeField.zero(grid)
    with pytest.raises(ValueError):
        KKGeometry(gauge, Charge(1), 0.0)
    with pytest.raises(ValueError):
        KKGeometry(gauge, Charge(1), np.ones((4, 4)))
    varying = KKGeometry(gauge, Charge(2), np.full(grid.shape, 2.0))
    assert not varying.is_constant_radius
    np.testing.assert_allclose(varying.mass, -0.5)
    with pytest.raises(ValueError):
        varying.require_constant_radius("frame connection")
    with pytest.raises(ValueError):
        KKGeometry(gauge, Charge(0)).mass


@pytest.mark.parametrize("q", CHARGES, ids=str)
def test_mass_term(q: Charge) -> None:
    geometry = KKGeometry(GaugeField.zero(Grid4(4)), q, 1.5)
    assert geometry.mass == pytest.approx(-q.value / 1.5)


def test_lift_is_an_isometry_and_unlift_inverts_it() -> None:
    phi = random_spinor(Grid4(4), 1, 1, "plus")
    psi = lift(phi, Charge(1))
    assert psi.origin == "plus"
    np.testing.assert_allclose(psi.values[..., 2:], 0.0)
    np.testing.assert_array_equal(unlift(psi).values, phi.values)
    assert sector_inner(psi, psi).real == pytest.approx(l2_norm(phi) ** 2)
    with pytest.raises(ValueError):
        SectorSpinor(phi, Charge(1))


def test_sector_arithmetic_rejects_mixed_charges() -> None:
    phi = random_spinor(Grid4(4), 2, 1, "plus")
    with pytest.raises(ValueError):
        lift(phi, Charge(1)) + lift(phi, Charge(-1))


def test_chirality_split_adds_back() -> None:
    psi = SectorSpinor(random_spinor(Grid4(4), 3, 1, "full"), Charge(1))
    plus, minus = chirality_split(psi)
    np.testing.assert_allclose((plus + minus).values, psi.values, atol=1e-14)
    np.testing.assert_allclose(plus.values[..., 2:], 0.0, atol=1e-14)
    np.testing.assert_allclose(minus.values[..., :2], 0.0, atol=1e-14)


def test_frame_connection_is_antisymmetric() -> None:
    geometry = KKGeometry(random_gauge(Grid4(4), 4, 1), Charge(1), 1.0)
    assert frame_connection(geometry).antisymmetry_defect() < 1e-14


@pytest.mark.parametrize("q", CHARGES, ids=str)
@pytest.mark.parametrize("sample", range(5))
def test_frame_and_reduced_dirac_agree(q: Charge, sample: int) -> None:
    cfg = random_configuration(Grid4(8), [5, q.doubled + 10, sample], 2, q)
    geometry = KKGeometry(cfg.A, q, 1.0)
    psi = lift(cfg.phi, q)
    frame = dirac_Y_frame(psi, geometry)
    reduced = dirac_Y(psi, geometry)
    assert _relative(l2_norm((frame - reduced).base), l2_norm(frame.base)) < 1e-10

    _, minus = chirality_split(frame)
    torus = lift(dirac_X(cfg.A, q, cfg.phi), q)
    assert _relative(l2_norm((minus - torus).base), l2_norm(torus.base)) < 1e-10


@pytest.mark.parametrize("q", CHARGES, ids=str)
def test_frame_and_reduced_dirac_agree_on_a_small_fibre(q: Charge) -> None:
    cfg = random_configuration(Grid4(8), [6, q.doubled + 10], 2, q)
    geometry = KKGeometry(cfg.A, q, 0.5)
    psi = lift(cfg.phi, q)
    frame = dirac_Y_frame(psi, geometry)
    reduced = dirac_Y_reduced(psi, geometry)
    assert _relative(l2_norm((frame - reduced).base), l2_norm(frame.base)) < 1e-10


@pytest.mark.parametrize("q", CHARGES, ids=str)
@pytest.mark.parametrize("radius", [1.0, 0.5])
def test_frame_dirac_of_a_flat_constant_spinor_is_the_mass_term(q: Charge, radius: float) -> None:
    grid = Grid4(4)
    geometry = KKGeometry(GaugeField.zero(grid), q, radius)
    psi = lift(SpinorField.constant(grid, "plus", (0.6, -0.8j)), q)
    frame = dirac_Y_frame(psi, geometry)
    expected = psi.scaled(-q.value / radius)
    np.testing.assert_allclose(frame.values, expected.values, atol=1e-12)


def test_reduced_dirac_rejects_negative_components() -> None:
    geometry = KKGeometry(GaugeField.zero(Grid4(4)), Charge(1))
    psi = SectorSpinor(random_spinor(Grid4(4), 6, 1, "full"), Charge(1))
    with pytest.raises(ValueError):
        dirac_Y_reduced(psi, geometry)
    with pytest.raises(ValueError):
        dirac_Y(psi, geometry, "spectral")  # type: ignore[arg-type]


def test_geometry_charge_must_match_sector() -> None:
    geometry = KKGeometry(GaugeField.zero(Grid4(4)), Charge(1))
    psi = lift(random_spinor(Grid4(4), 7, 1, "plus"), Charge(2))
    with pytest.raises(ValueError):
        dirac_Y_frame(psi, geometry)
    with pytest.raises(ValueError):
        nabla_Y(psi, geometry, 1)


@pytest.mark.parametrize("direction", [1, 2, 3, 4, 5])
def test_connection_lemma(direction: int) -> None:
    cfg = random_configuration(Grid4(8), 8, 2, Charge(1))
    geometry = KKGeometry(cfg.A, cfg.q, 0.8)
    psi = lift(cfg.phi, cfg.q)
    direct = nabla_Y(psi, geometry, direction)
    lemma = nabla_Y_lemma(psi, geometry, direction)
    assert _relative(l2_norm((direct - lemma).base), l2_norm(direct.base)) < 1e-10
    with pytest.raises(ValueError):
        nabla_Y(psi, geometry, 6)


@pytest.mark.parametrize("q", CHARGES, ids=str)
def test_residual_decomposition(q: Charge) -> None:
    cfg = random_configuration(Grid4(8), [9, q.doubled + 10], 2, q)
    report = residual_decomposition_check(cfg, KKGeometry(cfg.A, q, 1.0))
    assert report.passed
    assert report.forward_deviation <= 1e-11
    assert report.sites_checked > 0
    assert report.to_dict()["passed"] is True


def test_decomposition_needs_matching_geometry() -> None:
    cfg = random_configuration(Grid4(4), 10, 1, Charge(1))
    with pytest.raises(ValueError):
        residual_decomposition_check(cfg, KKGeometry(GaugeField.zero(Grid4(4)), Charge(1)))


@pytest.mark.parametrize("q", [Charge(1), Charge(-2)], ids=str)
def test_manufactured_solution_solves_cubic_equation(q: Charge) -> None:
    cfg = manufactured_solution(Grid4(8), q, [1.0, 0.5j], (1, 0, 0, -1))
    psi = lift(cfg.phi, q)
    residual = cubic_residual(psi, KKGeometry(cfg.A, q, 1.0), cfg.mu)
    assert l2_norm(residual.base) < 1e-11 * l2_norm(psi.base)


def test_varying_radius_keeps_the_correspondence() -> None:
    grid = Grid4(8)
    radius = 2.0 + 0.5 * np.sin(grid.coordinate(1))
    q = Charge(1)
    solution = manufactured_solution(grid, q, [1.0, 0.5j])
    psi = lift(solution.phi, q)
    residual = cubic_residual(psi, KKGeometry(solution.A, q, radius), solution.mu)
    assert l2_norm(residual.base) < 1e-10 * l2_norm(psi.base)

    cfg = random_configuration(grid, 11, 2, q)
    report = residual_decomposition_check(cfg, KKGeometry(cfg.A, q, radius))
    assert report.forward_deviation <= 1e-11


def test_charge_conjugation_maps_cubic_residuals() -> None:
    cfg = random_configuration(Grid4(8), 12, 2, Charge(1))
    conjugate = charge_conjugate_config(cfg)
    cubic = cubic_residual(lift(cfg.phi, cfg.q), KKGeometry(cfg.A, cfg.q), cfg.mu)
    cubic_conjugate = cubic_residual(
        lift(conjugate.phi, conjugate.q), KKGeometry(conjugate.A, conjugate.q), conjugate.mu
    )
    mapped = charge_conjugate_sector(cubic).scaled(-1.0)
    assert mapped.charge == Charge(-1)
    assert _relative(l2_norm((cubic_conjugate - mapped).base), l2_norm(cubic.base)) < 1e-11


def test_sector_conjugation_squares_to_minus_identity() -> None:
    psi = SectorSpinor(random_spinor(Grid4(4), 13, 1, "full"), Charge(3))
    twice = charge_conjugate_sector(charge_conjugate_sector(psi))
    np.testing.assert_allclose(twice.values, -psi.values, atol=1e-14)
    restored = charge_conjugate_sector(charge_conjugate_sector(psi), inverse=True)
    np.testing.assert_allclose(restored.values, psi.values, atol=1e-14)
    assert restored.charge == psi.charge


def test_five_dimensional_dirac_is_self_adjoint() -> None:
    grid = Grid4(8)
    q = Charge(-1)
    geometry = KKGeometry(random_gauge(grid, 14, 2), q, 1.3)
    psi = SectorSpinor(random_spinor(grid, 15, 2, "full"), q)
    chi = SectorSpinor(random_spinor(grid, 16, 2, "full"), q)
    left = sector_inner(dirac_Y_frame(psi, geometry), chi)
    right = sector_inner(psi, dirac_Y_frame(chi, geometry))
    assert abs(left - right) < 1e-10 * max(1.0, abs(left))


def test_action_gradient_matches_finite_differences() -> None:
    grid = Grid4(4)
    q = Charge(1)
    geometry = KKGeometry(random_gauge(grid, 17, 1), q, 1.0)
    psi = SectorSpinor(random_spinor(grid, 18, 1, "full"), q)
    gradient = action_gradient(psi, geometry)
    h = 1e-5
    for index in range(3):
        direction = SectorSpinor(random_spinor(grid, [19, index], 1, "full"), q)
        forward = gross_neveu_action(psi + direction.scaled(h), geometry)
        backward = gross_neveu_action(psi - direction.scaled(h), geometry)
        difference = (forward - backward) / (2 * h)
        analytic = sector_inner(direction, gradient).real
        assert abs(difference - analytic) < 1e-6 * max(1.0, abs(analytic))


def test_action_needs_constant_radius() -> None:
    grid = Grid4(4)
    geometry = KKGeometry(GaugeField.zero(grid), Charge(1), np.full(grid.shape, 1.0))
    psi = SectorSpinor(random_spinor(grid, 20, 1, "full"), Charge(1))
    with pytest.raises(ValueError):
        gross_neveu_action(psi, geometry)


def test_constant_length_critical_points() -> None:
    mass = -0.5
    norm = 4.0 * abs(mass)
    assert constant_length_eigenvalue(norm**2, mass) == pytest.approx(0.0)
    assert constant_length_eigenvalue(0.0, mass) == pytest.approx(mass)
    with pytest.raises(ValueError):
        constant_length_eigenvalue(1.0, 0.0)

    grid = Grid4(4)
    q = Charge(1)
    geometry = KKGeometry(GaugeField.zero(grid), q, 1.0)
    psi = lift(SpinorField.constant(grid, "plus", (0.6 * norm, 0.8j * norm)), q)
    potential = cubic_residual(psi, geometry) - dirac_Y_reduced(psi, geometry)
    np.testing.assert_allclose(potential.values, 0.0, atol=1e-13)
