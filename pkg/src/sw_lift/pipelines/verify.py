"""``verify``: fibrewise Clifford identities and torus field-calculus invariants."""

from __future__ import annotations

import numpy as np

from ..clifford import charge_conjugate_fibre, identity_suite
from ..torus_fields import (
    Charge,
    Grid4,
    SpinorField,
    curvature,
    dirac_X,
    exterior_derivative,
    l2_inner,
    l2_inner_fourier,
    l2_norm,
    partial_values,
    random_gauge,
    random_scalar,
    random_spinor,
    selfdual_split_field,
)
from .base import PipelineContext, PipelineStep
from .report import CommandPipeline, relative_deviation


class VerifyPipeline(CommandPipeline):
    command = "verify"

    def __init__(self, *args, **kwargs) -> None:  # type: ignore[no-untyped-def]
        super().__init__(*args, **kwargs)
        self.add_step(PipelineStep("clifford-identities", self._clifford_step))
        self.add_step(PipelineStep("spectral-calculus", self._spectral_step))
        self.add_step(PipelineStep("curvature-invariants", self._curvature_step))
        self.add_step(PipelineStep("twisted-dirac", self._dirac_step))

    def _clifford_step(self, context: PipelineContext) -> PipelineContext:
        config = self.config
        suite = identity_suite(config.seed, config.trials, config.tolerances.identity)
        for check in suite.checks:
            self.check(context, f"clifford/{check.name}", check.max_deviation, check.threshold)
        return context

    def _spectral_step(self, context: PipelineContext) -> PipelineContext:
        config = self.config
        tol = config.tolerances
        grid = Grid4(config.n)
        k = max(config.kmax, 1)
        x = grid.coordinate(1)
        derivative = partial_values(np.sin(k * x), 1)
        self.check(
            context,
            "torus/single-mode-derivative",
            float(np.max(np.abs(derivative - k * np.cos(k * x)))) / k,
            tol.dirac,
        )

        phi = random_spinor(grid, [config.seed, 10], config.kmax, "full")
        chi = random_spinor(grid, [config.seed, 11], config.kmax, "full")
        direct = l2_inner(phi, chi)
        spectral = l2_inner_fourier(phi, chi)
        self.check(
            context,
            "torus/parseval",
            relative_deviation(abs(direct - spectral), l2_norm(phi) * l2_norm(chi)),
            tol.dirac,
        )

        # the product of two kmax fields needs a grid with 2·kmax below Nyquist
        fine = Grid4(2 * config.n)
        f = random_scalar(fine, [config.seed, 12], config.kmax)
        g = random_scalar(fine, [config.seed, 13], config.kmax)
        leibniz = 0.0
        for axis in range(1, 5):
            left = partial_values(f * g, axis)
            right = partial_values(f, axis) * g + f * partial_values(g, axis)
            leibniz = max(
                leibniz,
                relative_deviation(float(np.max(np.abs(left - right))), float(np.max(np.abs(left)))),
            )
        self.check(context, "torus/leibniz", leibniz, tol.decomposition)
        return context

    def _curvature_step(self, context: PipelineContext) -> PipelineContext:
        config = self.config
        tol = config.tolerances
        grid = Grid4(config.n)
        A = random_gauge(grid, [config.seed, 20], config.kmax)
        F = curvature(A)
        plus, minus = selfdual_split_field(F)
        scale = l2_norm(F)
        self.check(
            context,
            "torus/selfdual-split-sum",
            relative_deviation(l2_norm((plus + minus) - F), scale),
            tol.identity,
        )
        self.check(
            context,
            "torus/selfdual-orthogonal",
            relative_deviation(abs(l2_inner(plus, minus)), scale**2),
            tol.identity,
        )
        bianchi = float(np.max(np.abs(exterior_derivative(F)), initial=0.0))
        self.check(context, "torus/bianchi", relative_deviation(bianchi, scale), tol.decomposition)
        return context

    def _dirac_step(self, context: PipelineContext) -> PipelineContext:
        config = self.config
        tol = config.tolerances
        grid = Grid4(config.n)
        q = config.charge
        A = random_gauge(grid, [config.seed, 30], config.kmax)
        phi = random_spinor(grid, [config.seed, 31], config.kmax, "full")
        chi = random_spinor(grid, [config.seed, 32], config.kmax, "full")

        left = l2_inner(dirac_X(A, q, phi), chi)
        right = l2_inner(phi, dirac_X(A, q, chi))
        self.check(
            context,
            "torus/dirac-self-adjoint",
            relative_deviation(abs(left - right), abs(left)),
            tol.dirac,
        )

        conjugated = SpinorField(grid, "full", charge_conjugate_fibre(phi.values))
        lhs = charge_conjugate_fibre(dirac_X(A, q, phi).values)
        rhs = dirac_X(-A, q, conjugated).values
        self.check(
            context,
            "torus/dirac-conjugation",
            relative_deviation(float(np.max(np.abs(lhs - rhs))), float(np.max(np.abs(lhs)))),
            tol.dirac,
        )

        plus = random_spinor(grid, [config.seed, 33], config.kmax, "plus")
        mapped = dirac_X(A, q, plus)
        chirality_ok = mapped.chirality == "minus" and dirac_X(A, Charge(0), mapped).chirality == "plus"
        self.check(context, "torus/dirac-chirality", 0.0 if chirality_ok else 1.0, 0.5)
        return context


__all__ = ["VerifyPipeline"]
