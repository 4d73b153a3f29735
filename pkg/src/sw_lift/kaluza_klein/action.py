"""Gross-Neveu type action whose critical points solve the cubic Dirac equation."""

from __future__ import annotations

import logging

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..torus_fields import pointwise_norm_sq
from .dirac import dirac_Y_frame
from .sector import KKGeometry, SectorSpinor

LOGGER = logging.getLogger(__name__)


def gross_neveu_action(psi: SectorSpinor, geometry: KKGeometry) -> float:
    """``Re ∫ ⟨ψ, D^Y ψ⟩ - m|ψ|² + (1/32m)|ψ|⁴``; constant radius only."""
    geometry.require_constant_radius("gross_neveu_action")
    mass = float(geometry.mass)  # type: ignore[arg-type]
    dirac = dirac_Y_frame(psi, geometry).values
    norm_sq = pointwise_norm_sq(psi.values)
    density = np.real(np.sum(psi.values.conj() * dirac, axis=-1))
    density = density - mass * norm_sq + norm_sq**2 / (32.0 * mass)
    value = float(np.sum(density) * psi.grid.volume_weight)
    LOGGER.debug("Gross-Neveu action %.12g at m=%.6g", value, mass)
    return value


def action_gradient(psi: SectorSpinor, geometry: KKGeometry) -> SectorSpinor:
    """``L²`` gradient ``2(D^Y ψ - mψ + (1/16m)|ψ|²ψ)`` of :func:`gross_neveu_action`."""
    geometry.require_constant_radius("action_gradient")
    mass = float(geometry.mass)  # type: ignore[arg-type]
    dirac = dirac_Y_frame(psi, geometry).values
    norm_sq = pointwise_norm_sq(psi.values)[..., None]
    values = 2.0 * (dirac - mass * psi.values + norm_sq * psi.values / (16.0 * mass))
    return psi.with_values(values, "full")


def constant_length_eigenvalue(norm_sq: ArrayLike, mass: ArrayLike) -> NDArray[np.float64]:
    """Eigenvalue ``-|ψ|²/(16m) + m`` of ``D^Y`` on a critical point of constant length."""
    m = np.asarray(mass, dtype=np.float64)
    if np.any(m == 0.0):
        raise ValueError("mass must be non-zero")
    return np.asarray(-np.asarray(norm_sq, dtype=np.float64) / (16.0 * m) + m)


__all__ = ["action_gradient", "constant_length_eigenvalue", "gross_neveu_action"]
