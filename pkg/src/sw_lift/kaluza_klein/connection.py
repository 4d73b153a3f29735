"""Levi-Civita spin connection of the Kaluza-Klein metric in the frame ``(E_μ, E_5)``.

``E_μ`` is the horizontal lift of ``∂_μ`` and ``E_5 = K/r``. Connection
one-forms are stored as ``ω_ab(E_c)`` and the spinor connection as
``Ω_c = -¼ Σ_ab ω_ab(E_c) γ_a γ_b``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from ..clifford import antisymmetric_matrix, build_clifford_model, gamma_two_form_matrices
from ..torus_fields import apply_matrix_field, curvature, partial_values
from .sector import KKGeometry, SectorSpinor

LOGGER = logging.getLogger(__name__)

VERTICAL = 5
FRAME_DIRECTIONS = (1, 2, 3, 4, 5)


@dataclass(frozen=True, slots=True)
class FrameConnection:
    """Per-site ``ω_ab(E_c)`` with shape ``(N, N, N, N, 5, 5, 5)`` indexed ``[..., c, a, b]``."""

    geometry: KKGeometry
    coefficients: NDArray[np.float64]
    spinor_matrices: NDArray[np.complex128]

    def antisymmetry_defect(self) -> float:
        swapped = np.swapaxes(self.coefficients, -1, -2)
        return float(np.max(np.abs(self.coefficients + swapped), initial=0.0))


def curvature_matrix(geometry: KKGeometry) -> NDArray[np.float64]:
    """Real antisymmetric ``f_μν`` with ``F_A = i f``."""
    return antisymmetric_matrix(curvature(geometry.gauge).values.imag)


def frame_connection(geometry: KKGeometry) -> FrameConnection:
    radius = geometry.require_constant_radius("frame connection")
    f = curvature_matrix(geometry)
    coefficients = np.zeros(geometry.grid.shape + (5, 5, 5))
    half_r = 0.5 * radius
    for lam in range(4):
        coefficients[..., lam, 4, :4] = half_r * f[..., :, lam]
        coefficients[..., lam, :4, 4] = -half_r * f[..., :, lam]
    coefficients[..., 4, :4, :4] = -half_r * f

    model = build_clifford_model()
    products = np.einsum("axy,byz->abxz", model.gamma, model.gamma)
    spinor = -0.25 * np.einsum("...cab,abxz->...cxz", coefficients, products)
    LOGGER.debug("Built frame connection on N=%d with r=%.6g", geometry.grid.n, radius)
    return FrameConnection(geometry, coefficients, spinor)


def _check_direction(direction: int) -> None:
    if direction not in FRAME_DIRECTIONS:
        raise ValueError(f"frame direction must be in 1..5, got {direction}")


def frame_derivative(psi: SectorSpinor, geometry: KKGeometry, direction: int) -> NDArray[np.complex128]:
    """``E_c ψ`` expressed on the base values."""
    _check_direction(direction)
    q = psi.charge
    if direction == VERTICAL:
        radius = np.asarray(geometry.radius)
        factor = radius if geometry.is_constant_radius else radius[..., None]
        return -1j * q.value / factor * psi.values
    totals = geometry.gauge.totals()
    covariant = partial_values(psi.values, direction)
    return covariant + 1j * q.value * totals[direction - 1][..., None] * psi.values


def _require_matching_charge(psi: SectorSpinor, geometry: KKGeometry) -> None:
    if psi.charge != geometry.charge:
        raise ValueError(
            f"spinor sector q={psi.charge} does not match geometry q={geometry.charge}"
        )
    if psi.grid != geometry.grid:
        raise ValueError("spinor and geometry live on different grids")


def nabla_Y(
    psi: SectorSpinor,
    geometry: KKGeometry,
    direction: int,
    connection: FrameConnection | None = None,
) -> SectorSpinor:
    """``∇_{E_c} ψ`` through the frame connection."""
    _require_matching_charge(psi, geometry)
    connection = connection or frame_connection(geometry)
    derivative = frame_derivative(psi, geometry, direction)
    rotation = apply_matrix_field(connection.spinor_matrices[..., direction - 1, :, :], psi.values)
    return psi.with_values(derivative + rotation, "full")


def nabla_Y_lemma(psi: SectorSpinor, geometry: KKGeometry, direction: int) -> SectorSpinor:
    """``∇^Y`` written through the base connection and ``F_A``.

    Horizontal: ``∇_{E_λ}ψ = ∇_λφ - ¼ i r γ(K) γ(ι_{e_λ}F_A) ψ``.
    Vertical: ``∇_{K/r}ψ = -(iq/r) ψ - ¼ i r γ(F_A) ψ``.
    """
    _require_matching_charge(psi, geometry)
    radius = geometry.require_constant_radius("nabla_Y_lemma")
    _check_direction(direction)
    model = build_clifford_model()
    F = curvature(geometry.gauge).values
    derivative = frame_derivative(psi, geometry, direction)
    if direction == VERTICAL:
        correction = -0.25j * radius * apply_matrix_field(gamma_two_form_matrices(F), psi.values)
    else:
        interior = antisymmetric_matrix(F)[..., direction - 1, :]
        gamma_interior = np.einsum("...n,nab->...ab", interior, model.gamma4)
        correction = -0.25j * radius * apply_matrix_field(
            model.gammaK, apply_matrix_field(gamma_interior, psi.values)
        )
    return psi.with_values(derivative + correction, "full")


__all__ = [
    "FRAME_DIRECTIONS",
    "FrameConnection",
    "VERTICAL",
    "curvature_matrix",
    "frame_connection",
    "frame_derivative",
    "nabla_Y",
    "nabla_Y_lemma",
]
