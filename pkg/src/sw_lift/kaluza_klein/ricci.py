"""Ricci curvature of the Kaluza-Klein metric: closed formulas and a finite-difference oracle.

The oracle differentiates an explicit coordinate metric twice with nested
central differences and converts the result to the frame ``(E_μ, K/r)``.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..clifford import TwoFormFibre, antisymmetric_matrix

LOGGER = logging.getLogger(__name__)

MetricFunction = Callable[[NDArray[np.float64]], NDArray[np.float64]]

DEFAULT_STEP = 1e-4
DEFAULT_POINT = (0.25, 0.0, 0.0, 0.0, 0.0)


def _real_curvature(F: TwoFormFibre) -> NDArray[np.float64]:
    return np.asarray(antisymmetric_matrix((-1j * F.coeffs).real), dtype=np.float64)


def ricci_kk_matrix(
    F: TwoFormFibre, radius: float, ric_x: ArrayLike | None = None
) -> NDArray[np.float64]:
    """Ricci tensor on ``Y`` in the frame ``(E_1..E_4, K/r)`` for a flat-coefficient ``F_A``.

    ``Ric(K/r, K/r) = ½ r² |F_A|²``, ``Ric(V*, W*) = Ric_X(V, W) - ½ r² g(ι_V F_A, ι_W F_A)``
    and mixed terms vanish.
    """
    if radius <= 0.0:
        raise ValueError(f"fibre radius must be positive, got {radius}")
    f = _real_curvature(F)
    base = np.zeros((4, 4)) if ric_x is None else np.asarray(ric_x, dtype=np.float64)
    result = np.zeros((5, 5))
    result[:4, :4] = base - 0.5 * radius**2 * (f @ f.T)
    result[4, 4] = 0.5 * radius**2 * F.norm_sq()
    return result


def ricci_kk(
    F: TwoFormFibre,
    radius: float,
    V: ArrayLike,
    W: ArrayLike,
    ric_x: ArrayLike | None = None,
) -> float:
    """``Ric^Y(V, W)`` for frame vectors given by five components each."""
    matrix = ricci_kk_matrix(F, radius, ric_x)
    return float(np.asarray(V, dtype=np.float64) @ matrix @ np.asarray(W, dtype=np.float64))


def _check_step(point: NDArray[np.float64], step: float) -> None:
    if not step > 0.0 or np.any(point + step == point) or np.any(point - step == point):
        raise ValueError(f"finite-difference step {step!r} underflows at the evaluation point")


def _metric_derivatives(metric: MetricFunction, point: NDArray[np.float64], step: float) -> NDArray[np.float64]:
    """``∂_k g_ij`` stacked as ``[k, i, j]``."""
    dim = point.shape[0]
    shifts = np.eye(dim) * step
    return np.stack(
        [(metric(point + shifts[k]) - metric(point - shifts[k])) / (2.0 * step) for k in range(dim)]
    )


def christoffel_symbols(
    metric: MetricFunction, point: ArrayLike, step: float = DEFAULT_STEP
) -> NDArray[np.float64]:
    """``Γ^l_ij`` stacked as ``[l, i, j]``."""
    x = np.asarray(point, dtype=np.float64)
    _check_step(x, step)
    inverse = np.linalg.inv(metric(x))
    dg = _metric_derivatives(metric, x, step)
    lowered = dg.transpose(1, 0, 2) + dg.transpose(1, 2, 0) - dg
    return 0.5 * np.einsum("lm,mij->lij", inverse, lowered)


def riemann_tensor(
    metric: MetricFunction, point: ArrayLike, step: float = DEFAULT_STEP
) -> NDArray[np.float64]:
    """``R^ρ_{σμν}`` stacked as ``[ρ, σ, μ, ν]``."""
    x = np.asarray(point, dtype=np.float64)
    _check_step(x, step)
    dim = x.shape[0]
    shifts = np.eye(dim) * step
    gamma = christoffel_symbols(metric, x, step)
    d_gamma = np.stack(
        [
            (christoffel_symbols(metric, x + shifts[k], step) - christoffel_symbols(metric, x - shifts[k], step))
            / (2.0 * step)
            for k in range(dim)
        ]
    )
    return (
        np.einsum("mrns->rsmn", d_gamma)
        - np.einsum("nrms->rsmn", d_gamma)
        + np.einsum("rml,lns->rsmn", gamma, gamma)
        - np.einsum("rnl,lms->rsmn", gamma, gamma)
    )


def ricci_tensor(
    metric: MetricFunction, point: ArrayLike, step: float = DEFAULT_STEP
) -> NDArray[np.float64]:
    """``R_{σν} = R^ρ_{σρν}`` in coordinates."""
    return np.einsum("rsrn->sn", riemann_tensor(metric, point, step))


def kk_coordinate_metric(curvature: float, radius: float) -> MetricFunction:
    """``Σ dx_i² + r²(dθ - c x¹ dx²)²`` in coordinates ``(x¹, x², x³, x⁴, θ)``."""

    def metric(x: NDArray[np.float64]) -> NDArray[np.float64]:
        form = np.array([0.0, -curvature * x[0], 0.0, 0.0, 1.0])
        g = np.zeros((5, 5))
        g[:4, :4] = np.eye(4)
        return g + radius**2 * np.outer(form, form)

    return metric


def _frame_matrix(curvature: float, radius: float, point: NDArray[np.float64]) -> NDArray[np.float64]:
    """Rows are ``E_μ = ∂_μ - a_μ ∂_θ`` and ``E_5 = ∂_θ / r`` in coordinate components."""
    connection = np.array([0.0, -curvature * point[0], 0.0, 0.0])
    frame = np.zeros((5, 5))
    frame[:4, :4] = np.eye(4)
    frame[:4, 4] = -connection
    frame[4, 4] = 1.0 / radius
    return frame


@dataclass(slots=True)
class RicciOracleReport:
    curvature: float
    radius: float
    step: float
    oracle: NDArray[np.float64]
    formula: NDArray[np.float64]

    @property
    def max_deviation(self) -> float:
        return float(np.max(np.abs(self.oracle - self.formula)))

    def to_dict(self) -> dict[str, Any]:
        return {
            "curvature": self.curvature,
            "radius": self.radius,
            "step": self.step,
            "oracle": self.oracle.tolist(),
            "formula": self.formula.tolist(),
            "max_deviation": self.max_deviation,
        }


def ricci_oracle(
    curvature: float,
    radius: float,
    step: float = DEFAULT_STEP,
    point: ArrayLike = DEFAULT_POINT,
) -> RicciOracleReport:
    """Compare the closed Ricci formulas with finite differences of an explicit metric."""
    if radius <= 0.0:
        raise ValueError(f"fibre radius must be positive, got {radius}")
    x = np.asarray(point, dtype=np.float64)
    if x.shape != (5,):
        raise ValueError(f"evaluation point needs five coordinates, got shape {x.shape}")
    metric = kk_coordinate_metric(curvature, radius)
    coordinate_ricci = ricci_tensor(metric, x, step)
    frame = _frame_matrix(curvature, radius, x)
    oracle = frame @ coordinate_ricci @ frame.T
    F = TwoFormFibre.imaginary([-curvature, 0.0, 0.0, 0.0, 0.0, 0.0])
    formula = ricci_kk_matrix(F, radius)
    report = RicciOracleReport(curvature, radius, step, oracle, formula)
    LOGGER.info(
        "Ricci oracle c=%.6g r=%.6g: max deviation %.3e", curvature, radius, report.max_deviation
    )
    return report


__all__ = [
    "DEFAULT_STEP",
    "MetricFunction",
    "RicciOracleReport",
    "christoffel_symbols",
    "kk_coordinate_metric",
    "ricci_kk",
    "ricci_kk_matrix",
    "ricci_oracle",
    "ricci_tensor",
    "riemann_tensor",
]
