"""Dirac operator on the circle bundle and the cubic Dirac residual."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Literal

import numpy as np
from numpy.typing import NDArray

from ..clifford import PLUS, build_clifford_model, gamma_two_form_matrices, selfdual_split_values
from ..seiberg_witten import SWConfiguration, sw_residual
from ..torus_fields import (
    SpinorField,
    TwoFormField,
    apply_matrix_field,
    curvature,
    dirac_X,
    l2_norm,
    pointwise_norm_sq,
)
from .connection import FRAME_DIRECTIONS, frame_connection, frame_derivative
from .sector import KKGeometry, SectorSpinor, lift

LOGGER = logging.getLogger(__name__)

DiracPath = Literal["reduced", "frame"]

POSITIVE_TOLERANCE = 1e-12


def dirac_Y_frame(psi: SectorSpinor, geometry: KKGeometry) -> SectorSpinor:
    """``D^Y ψ = Σ_c γ_c ∇_{E_c} ψ`` with the frame connection; constant radius only."""
    connection = frame_connection(geometry)
    if psi.charge != geometry.charge:
        raise ValueError(
            f"spinor sector q={psi.charge} does not match geometry q={geometry.charge}"
        )
    model = build_clifford_model()
    result = np.zeros_like(psi.values)
    for direction in FRAME_DIRECTIONS:
        covariant = frame_derivative(psi, geometry, direction) + apply_matrix_field(
            connection.spinor_matrices[..., direction - 1, :, :], psi.values
        )
        result += apply_matrix_field(model.gamma[direction - 1], covariant)
    return psi.with_values(result, "full")


def _require_positive(psi: SectorSpinor) -> NDArray[np.complex128]:
    scale = max(1.0, float(np.max(np.abs(psi.values), initial=0.0)))
    if float(np.max(np.abs(psi.values[..., 2:]), initial=0.0)) > POSITIVE_TOLERANCE * scale:
        raise ValueError("reduced Dirac operator expects the lift of a positive spinor")
    return np.asarray(psi.values[..., :2])


def dirac_Y_reduced(psi: SectorSpinor, geometry: KKGeometry) -> SectorSpinor:
    """``D^Y ψ = D_{A,q} φ + (m - (1/8m) γ(F_{A_n}^+)) φ`` for lifts of positive spinors.

    The radius may vary over the base, in which case ``m = -q/r`` is a field.
    """
    if psi.charge != geometry.charge:
        raise ValueError(
            f"spinor sector q={psi.charge} does not match geometry q={geometry.charge}"
        )
    phi_values = _require_positive(psi)
    q = psi.charge
    phi = SpinorField(psi.grid, "plus", phi_values)
    minus = dirac_X(geometry.gauge, q, phi).values

    mass = geometry.mass_factor()
    plus_curvature, _ = selfdual_split_values(curvature(geometry.gauge).values)
    action = gamma_two_form_matrices(q.doubled * plus_curvature)[..., PLUS, PLUS]
    plus = mass * phi_values - apply_matrix_field(action, phi_values) / (8.0 * mass)

    values = np.concatenate([plus, minus], axis=-1)
    return psi.with_values(values, "full")


def dirac_Y(psi: SectorSpinor, geometry: KKGeometry, path: DiracPath = "reduced") -> SectorSpinor:
    if path == "reduced":
        return dirac_Y_reduced(psi, geometry)
    if path == "frame":
        return dirac_Y_frame(psi, geometry)
    raise ValueError(f"Unsupported Dirac path: {path}")


def cubic_residual(
    psi: SectorSpinor,
    geometry: KKGeometry,
    mu: TwoFormField | None = None,
    path: DiracPath = "reduced",
) -> SectorSpinor:
    """``D^Y ψ + (1/16m)|ψ|²ψ - mψ + (1/8m) γ(μ)ψ``."""
    mass = geometry.mass_factor()
    dirac = dirac_Y(psi, geometry, path).values
    norm_sq = pointwise_norm_sq(psi.values)[..., None]
    values = dirac + norm_sq * psi.values / (16.0 * mass) - mass * psi.values
    if mu is not None:
        values = values + apply_matrix_field(gamma_two_form_matrices(mu.values), psi.values) / (
            8.0 * mass
        )
    return psi.with_values(values, "full")


@dataclass(slots=True)
class DecompositionReport:
    """Agreement of the cubic residual with the Seiberg-Witten residual."""

    forward_deviation: float
    converse_deviation: float
    sites_checked: int
    dirac_norm: float
    curvature_norm: float
    cubic_norm: float
    tolerance: float
    converse_tolerance: float

    @property
    def passed(self) -> bool:
        return bool(
            np.isfinite(self.forward_deviation)
            and self.forward_deviation <= self.tolerance
            and np.isfinite(self.converse_deviation)
            and self.converse_deviation <= self.converse_tolerance
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "forward_deviation": self.forward_deviation,
            "converse_deviation": self.converse_deviation,
            "sites_checked": self.sites_checked,
            "dirac_norm": self.dirac_norm,
            "curvature_norm": self.curvature_norm,
            "cubic_norm": self.cubic_norm,
            "passed": self.passed,
        }


def expected_cubic_residual(cfg: SWConfiguration, geometry: KKGeometry) -> SectorSpinor:
    """``lift(R_D) - (1/8m) γ(R_C) ψ`` assembled from the torus residual."""
    residual = sw_residual(cfg)
    mass = geometry.mass_factor()
    plus = -apply_matrix_field(
        gamma_two_form_matrices(residual.curvature_part.values)[..., PLUS, PLUS], cfg.phi.values
    ) / (8.0 * mass)
    values = np.concatenate([plus, residual.dirac_part.values], axis=-1)
    return lift(cfg.phi, cfg.q).with_values(values, "full")


def _require_consistent(cfg: SWConfiguration, geometry: KKGeometry) -> None:
    same_gauge = np.array_equal(cfg.A.components, geometry.gauge.components) and np.array_equal(
        cfg.A.holonomy, geometry.gauge.holonomy
    )
    if not same_gauge or cfg.q != geometry.charge:
        raise ValueError("geometry does not carry the configuration's gauge field and charge")


def residual_decomposition_check(
    cfg: SWConfiguration,
    geometry: KKGeometry,
    tolerance: float = 1e-11,
    converse_tolerance: float = 1e-8,
    phi_threshold: float = 1e-6,
) -> DecompositionReport:
    """Compare the cubic residual of the lift with the torus residual, both ways.

    Forward: the cubic residual equals ``lift(R_D) - (1/8m)γ(R_C)ψ`` up to
    ``tolerance`` relative to the largest norm involved. Converse: on sites with
    ``|φ| > phi_threshold·max|φ|`` both torus residual parts are recovered
    pointwise from the cubic residual.
    """
    _require_consistent(cfg, geometry)
    psi = lift(cfg.phi, cfg.q)
    cubic = cubic_residual(psi, geometry, cfg.mu)
    expected = expected_cubic_residual(cfg, geometry)
    residual = sw_residual(cfg)

    cubic_norm = l2_norm(cubic.base)
    scale = max(1.0, cubic_norm, l2_norm(expected.base), l2_norm(psi.base))
    forward = l2_norm((cubic - expected).base) / scale

    phi_norm = np.sqrt(pointwise_norm_sq(cfg.phi.values))
    mask = phi_norm > phi_threshold * float(np.max(phi_norm, initial=0.0))
    mass = np.broadcast_to(np.abs(np.asarray(geometry.mass, dtype=np.float64)), cfg.grid.shape)
    dirac_site = np.sqrt(pointwise_norm_sq(residual.dirac_part.values))
    curvature_site = np.sqrt(pointwise_norm_sq(residual.curvature_part.values))
    cubic_minus = np.sqrt(pointwise_norm_sq(cubic.values[..., 2:]))
    cubic_plus = np.sqrt(pointwise_norm_sq(cubic.values[..., :2]))
    sites = int(np.count_nonzero(mask))
    if sites:
        recovered = 8.0 * mass[mask] * cubic_plus[mask] / (np.sqrt(2.0) * phi_norm[mask])
        site_scale = 1.0 + max(
            float(np.max(curvature_site, initial=0.0)), float(np.max(dirac_site, initial=0.0))
        )
        converse = float(
            np.max(
                np.abs(curvature_site[mask] - recovered)
                + np.abs(dirac_site[mask] - cubic_minus[mask])
            )
            / site_scale
        )
    else:
        converse = 0.0

    dirac_norm, curvature_norm = residual.norms()
    report = DecompositionReport(
        forward_deviation=float(forward),
        converse_deviation=converse,
        sites_checked=sites,
        dirac_norm=dirac_norm,
        curvature_norm=curvature_norm,
        cubic_norm=cubic_norm,
        tolerance=tolerance,
        converse_tolerance=converse_tolerance,
    )
    LOGGER.info(
        "Residual decomposition: forward %.3e, converse %.3e over %d sites",
        report.forward_deviation,
        report.converse_deviation,
        sites,
    )
    return report


__all__ = [
    "DecompositionReport",
    "DiracPath",
    "cubic_residual",
    "dirac_Y",
    "dirac_Y_frame",
    "dirac_Y_reduced",
    "expected_cubic_residual",
    "residual_decomposition_check",
]
