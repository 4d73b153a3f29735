"""Levenberg-Marquardt solver for the perturbed Seiberg-Witten equations on the torus.

The unknowns are the real connection samples ``a_μ`` (oscillatory part and
holonomy together) and the positive spinor ``φ``; the perturbation ``μ`` and
the charge stay fixed. The objective is ``‖R_D‖² + ‖R_C‖²``. Damped
Gauss-Newton steps are solved matrix-free with LSQR on the analytic Jacobian.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Literal

import numpy as np
from numpy.typing import NDArray
from scipy.sparse.linalg import LinearOperator, lsqr

from .clifford import PAIRS, SELFDUAL_BASIS, build_clifford_model, selfdual_coefficients
from .seiberg_witten import SWConfiguration, sw_residual
from .torus_fields import (
    SITE_AXES,
    GaugeField,
    Grid4,
    SpinorField,
    apply_matrix_field,
    dirac_X,
    partial_values,
)

LOGGER = logging.getLogger(__name__)

StopReason = Literal["tolerance", "max-iterations", "stagnation", "diverged"]

ARMIJO_CONSTANT = 1e-4
ARMIJO_HALVINGS = 30
CSV_FIELDS = ("iteration", "objective", "step_norm", "damping")


@dataclass(slots=True)
class SolverOptions:
    max_iterations: int = 50
    tolerance: float = 1e-10
    damping: float = 1e-3
    max_damping: float = 1e12
    stagnation_window: int = 5
    stagnation_ratio: float = 1e-14
    lsqr_iterations: int = 200
    precondition: bool = True
    fallback_after: int = 3

    def __post_init__(self) -> None:
        if self.max_iterations < 0:
            raise ValueError(f"max_iterations must be >= 0, got {self.max_iterations}")
        if self.tolerance <= 0.0:
            raise ValueError(f"tolerance must be positive, got {self.tolerance}")
        if self.damping <= 0.0 or self.max_damping < self.damping:
            raise ValueError(
                f"damping must satisfy 0 < damping <= max_damping, got {self.damping}, {self.max_damping}"
            )
        if self.stagnation_window < 1 or self.lsqr_iterations < 1 or self.fallback_after < 1:
            raise ValueError("stagnation_window, lsqr_iterations and fallback_after must be >= 1")


@dataclass(slots=True)
class ConvergenceRow:
    iteration: int
    objective: float
    step_norm: float
    damping: float


@dataclass(slots=True)
class ConvergenceLog:
    rows: list[ConvergenceRow] = field(default_factory=list)
    reason: StopReason = "max-iterations"
    accepted_steps: int = 0

    @property
    def final_objective(self) -> float:
        return self.rows[-1].objective if self.rows else float("nan")

    def record(self, iteration: int, objective: float, step_norm: float, damping: float) -> None:
        self.rows.append(ConvergenceRow(iteration, objective, step_norm, damping))
        LOGGER.debug(
            "iteration %d: objective %.6e, step %.3e, damping %.3e",
            iteration,
            objective,
            step_norm,
            damping,
        )

    def write_csv(self, path: Path) -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.DictWriter(handle, fieldnames=CSV_FIELDS)
            writer.writeheader()
            for row in self.rows:
                writer.writerow(
                    {
                        "iteration": row.iteration,
                        "objective": repr(row.objective),
                        "step_norm": repr(row.step_norm),
                        "damping": repr(row.damping),
                    }
                )
        return path

    def to_dict(self) -> dict[str, Any]:
        return {
            "reason": self.reason,
            "accepted_steps": self.accepted_steps,
            "iterations": len(self.rows) - 1,
            "final_objective": self.final_objective,
        }


class ResidualModel:
    """Stacked real residual of a configuration and its analytic linearisation.

    Unknown vector: ``a`` samples in site-major order ``(N, N, N, N, 4)``, then
    the real and imaginary parts of ``φ``. Residual vector:
    ``√w·(Re R_D, Im R_D)`` followed by ``√(2w)·t`` where ``R_C = i Σ t_k s_k``.
    """

    def __init__(self, template: SWConfiguration) -> None:
        self.template = template
        self.grid: Grid4 = template.grid
        self.q = template.q
        self.model = build_clifford_model()
        self.sites = self.grid.site_count
        self.size_a = 4 * self.sites
        self.size_phi = 4 * self.sites
        self.size = self.size_a + self.size_phi
        self.residual_size = 4 * self.sites + 3 * self.sites
        self.sqrt_weight = float(np.sqrt(self.grid.volume_weight))
        self.blocks = [self.model.to_minus_block(mu) for mu in range(4)]

    def pack(self, cfg: SWConfiguration) -> NDArray[np.float64]:
        a = np.moveaxis(cfg.A.totals(), 0, -1)
        phi = cfg.phi.values
        return np.concatenate([a.ravel(), phi.real.ravel(), phi.imag.ravel()])

    def split(self, x: NDArray[np.float64]) -> tuple[NDArray[np.float64], NDArray[np.complex128]]:
        shape = self.grid.shape
        a = x[: self.size_a].reshape(shape + (4,))
        re = x[self.size_a : self.size_a + 2 * self.sites].reshape(shape + (2,))
        im = x[self.size_a + 2 * self.sites :].reshape(shape + (2,))
        return a, re + 1j * im

    def join(self, a: NDArray[np.float64], phi: NDArray[np.complex128]) -> NDArray[np.float64]:
        return np.concatenate([a.ravel(), phi.real.ravel(), phi.imag.ravel()])

    def unpack(self, x: NDArray[np.float64]) -> SWConfiguration:
        a, phi = self.split(x)
        mean = a.mean(axis=SITE_AXES)
        gauge = GaugeField(self.grid, np.moveaxis(a - mean, -1, 0), mean)
        return self.template.with_fields(A=gauge, phi=SpinorField(self.grid, "plus", phi))

    def residual(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        result = sw_residual(self.unpack(x))
        dirac = result.dirac_part.values
        t = selfdual_coefficients(result.curvature_part.values)
        return self._stack(dirac, t)

    def _stack(self, dirac: NDArray[np.complex128], t: NDArray[np.float64]) -> NDArray[np.float64]:
        return np.concatenate(
            [
                self.sqrt_weight * dirac.real.ravel(),
                self.sqrt_weight * dirac.imag.ravel(),
                np.sqrt(2.0) * self.sqrt_weight * t.ravel(),
            ]
        )

    def _unstack(self, y: NDArray[np.float64]) -> tuple[NDArray[np.complex128], NDArray[np.float64]]:
        shape = self.grid.shape
        n2 = 2 * self.sites
        dirac = y[:n2].reshape(shape + (2,)) + 1j * y[n2 : 2 * n2].reshape(shape + (2,))
        t = y[2 * n2 :].reshape(shape + (3,))
        return self.sqrt_weight * dirac, np.sqrt(2.0) * self.sqrt_weight * t

    def objective(self, x: NDArray[np.float64]) -> float:
        r = self.residual(x)
        return float(r @ r)

    def jvp(self, x: NDArray[np.float64], dx: NDArray[np.float64]) -> NDArray[np.float64]:
        cfg = self.unpack(x)
        da, dphi = self.split(dx)
        phi = cfg.phi.values
        q = self.q.value

        dirac = dirac_X(cfg.A, self.q, SpinorField(self.grid, "plus", dphi)).values
        for mu, block in enumerate(self.blocks):
            dirac = dirac + 1j * q * da[..., mu, None] * apply_matrix_field(block, phi)

        df = np.stack(
            [
                partial_values(da[..., j], i + 1) - partial_values(da[..., i], j + 1)
                for i, j in PAIRS
            ],
            axis=-1,
        )
        dt = q * np.einsum("...p,kp->...k", df, SELFDUAL_BASIS)
        dt = dt - 2.0 * np.real(
            np.einsum("...a,kab,...b->...k", phi.conj(), self.model.selfdual_dual, dphi)
        )
        return self._stack(dirac, dt)

    def vjp(self, x: NDArray[np.float64], y: NDArray[np.float64]) -> NDArray[np.float64]:
        cfg = self.unpack(x)
        u, v = self._unstack(y)
        phi = cfg.phi.values
        q = self.q.value
        totals = np.moveaxis(cfg.A.totals(), 0, -1)

        grad_phi = np.zeros_like(phi)
        grad_a = np.zeros(self.grid.shape + (4,))
        for mu, block in enumerate(self.blocks):
            pulled = apply_matrix_field(block.conj().T, u)
            grad_phi -= partial_values(pulled, mu + 1) + 1j * q * totals[..., mu, None] * pulled
            coupling = 1j * q * apply_matrix_field(block, phi)
            grad_a[..., mu] += np.real(np.sum(u.conj() * coupling, axis=-1))

        weights = q * np.einsum("...k,kp->...p", v, SELFDUAL_BASIS)
        for p, (i, j) in enumerate(PAIRS):
            grad_a[..., j] -= partial_values(weights[..., p], i + 1)
            grad_a[..., i] += partial_values(weights[..., p], j + 1)
        grad_phi -= 2.0 * np.einsum("...k,kab,...b->...a", v, self.model.selfdual_dual, phi)
        return self.join(grad_a, grad_phi)

    def gradient(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        """Gradient ``2 Jᵀ r`` of :meth:`objective`."""
        return 2.0 * self.vjp(x, self.residual(x))


class Preconditioner:
    """Fourier-diagonal column scaling ``(1 + |k|²)^{-1/2}`` of every field block."""

    def __init__(self, model: ResidualModel, enabled: bool = True) -> None:
        self.model = model
        self.enabled = enabled
        k = model.grid.wavenumbers()
        k_sq = (
            k[:, None, None, None] ** 2
            + k[None, :, None, None] ** 2
            + k[None, None, :, None] ** 2
            + k[None, None, None, :] ** 2
        )
        self.multiplier = (1.0 / np.sqrt(1.0 + k_sq))[..., None]

    def _smooth(self, values: NDArray[Any]) -> NDArray[Any]:
        spectrum = np.fft.fftn(values, axes=SITE_AXES) * self.multiplier
        return np.fft.ifftn(spectrum, axes=SITE_AXES)

    def apply(self, z: NDArray[np.float64]) -> NDArray[np.float64]:
        if not self.enabled:
            return z
        a, phi = self.model.split(z)
        return self.model.join(self._smooth(a).real, self._smooth(phi))


def objective_gradient(cfg: SWConfiguration) -> tuple[NDArray[np.float64], NDArray[np.complex128]]:
    """Analytic gradient of ``‖R_D‖² + ‖R_C‖²`` with respect to ``(a_μ, φ)``.

    Returns the ``a`` block with shape ``(4, N, N, N, N)`` and the ``φ`` block as
    a complex field whose real/imaginary parts pair with those of ``δφ``.
    """
    model = ResidualModel(cfg)
    grad_a, grad_phi = model.split(model.gradient(model.pack(cfg)))
    return np.moveaxis(grad_a, -1, 0), grad_phi


def objective(cfg: SWConfiguration) -> float:
    return sw_residual(cfg).objective()


def _damped_step(
    model: ResidualModel,
    preconditioner: Preconditioner,
    x: NDArray[np.float64],
    r: NDArray[np.float64],
    damping: float,
    iterations: int,
) -> tuple[NDArray[np.float64], float]:
    """LSQR solve of ``min ‖J P z + r‖² + μ‖z‖²``; returns ``P z`` and the model objective."""
    operator = LinearOperator(
        (model.residual_size, model.size),
        matvec=lambda z: model.jvp(x, preconditioner.apply(np.asarray(z).ravel())),
        rmatvec=lambda y: preconditioner.apply(model.vjp(x, np.asarray(y).ravel())),
        dtype=np.float64,
    )
    z = lsqr(operator, -r, damp=float(np.sqrt(damping)), atol=1e-14, btol=1e-14, iter_lim=iterations)[0]
    dx = preconditioner.apply(z)
    predicted = r + model.jvp(x, dx)
    return dx, float(predicted @ predicted)


def _armijo_step(
    model: ResidualModel,
    preconditioner: Preconditioner,
    x: NDArray[np.float64],
    current: float,
) -> tuple[NDArray[np.float64], float] | None:
    gradient = preconditioner.apply(model.gradient(x))
    direction = -preconditioner.apply(gradient)
    slope = float(gradient @ -gradient)
    if slope >= 0.0:
        return None
    scale = 1.0
    for _ in range(ARMIJO_HALVINGS):
        trial = x + scale * direction
        value = model.objective(trial)
        if np.isfinite(value) and value <= current + ARMIJO_CONSTANT * scale * slope:
            return scale * direction, value
        scale *= 0.5
    return None


def solve_least_squares(
    cfg0: SWConfiguration, opts: SolverOptions | None = None
) -> tuple[SWConfiguration, ConvergenceLog]:
    """Minimise the Seiberg-Witten objective from ``cfg0``; the objective never increases."""
    opts = opts or SolverOptions()
    model = ResidualModel(cfg0)
    preconditioner = Preconditioner(model, opts.precondition)
    log = ConvergenceLog()

    x = model.pack(cfg0)
    r = model.residual(x)
    current = float(r @ r)
    damping = opts.damping
    growth = 2.0
    log.record(0, current, 0.0, damping)
    LOGGER.info("Solver start: objective %.6e on N=%d, q=%s", current, model.grid.n, model.q)

    if not np.isfinite(current):
        log.reason = "diverged"
        LOGGER.warning("Solver start has a non-finite objective")
        return cfg0, log
    if current <= opts.tolerance:
        log.reason = "tolerance"
        return cfg0, log
    if opts.max_iterations == 0:
        log.reason = "stagnation"
        return cfg0, log

    history = [current]
    rejections = 0
    non_finite = 0
    log.reason = "max-iterations"
    for iteration in range(1, opts.max_iterations + 1):
        dx, predicted = _damped_step(model, preconditioner, x, r, damping, opts.lsqr_iterations)
        trial = x + dx
        value = model.objective(trial)
        gain = (current - value) / max(current - predicted, np.finfo(float).tiny)
        step: tuple[NDArray[np.float64], float] | None = None

        if np.isfinite(value) and value < current and gain > 0.0:
            step = (dx, value)
            damping *= max(1.0 / 3.0, 1.0 - (2.0 * gain - 1.0) ** 3)
            growth = 2.0
            rejections = 0
            non_finite = 0
        else:
            if not np.isfinite(value):
                non_finite += 1
                LOGGER.warning("Rejected step with non-finite objective at iteration %d", iteration)
            rejections += 1
            damping *= growth
            growth *= 2.0
            if rejections >= opts.fallback_after:
                step = _armijo_step(model, preconditioner, x, current)
                if step is not None:
                    LOGGER.info("Gradient fallback accepted at iteration %d", iteration)
                    rejections = 0
                    non_finite = 0

        if step is None:
            log.record(iteration, current, 0.0, damping)
            if non_finite >= opts.fallback_after:
                log.reason = "diverged"
                break
            if damping > opts.max_damping:
                log.reason = "stagnation"
                break
            continue

        dx, value = step
        x = x + dx
        r = model.residual(x)
        current = float(r @ r)
        log.accepted_steps += 1
        log.record(iteration, current, float(np.linalg.norm(dx)), damping)
        history.append(current)

        if current <= opts.tolerance:
            log.reason = "tolerance"
            break
        window = opts.stagnation_window
        if len(history) > window:
            previous = history[-window - 1]
            if (previous - current) <= opts.stagnation_ratio * previous:
                log.reason = "stagnation"
                break

    LOGGER.info(
        "Solver stop (%s) after %d accepted steps: objective %.6e",
        log.reason,
        log.accepted_steps,
        current,
    )
    return model.unpack(x), log


__all__ = [
    "ConvergenceLog",
    "ConvergenceRow",
    "Preconditioner",
    "ResidualModel",
    "SolverOptions",
    "StopReason",
    "objective",
    "objective_gradient",
    "solve_least_squares",
]
