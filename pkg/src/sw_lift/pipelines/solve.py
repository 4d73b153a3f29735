"""``solve``: Levenberg-Marquardt on the torus equations, cross-checked on the circle bundle."""

from __future__ import annotations

import numpy as np

from ..field_io import write_field
from ..kaluza_klein import KKGeometry, cubic_residual, lift
from ..seiberg_witten import SWConfiguration, manufactured_solution, sw_residual
from ..solver import ConvergenceLog, solve_least_squares
from ..torus_fields import Grid4, l2_norm, random_gauge, random_spinor
from .base import PipelineContext, PipelineStep
from .report import CommandPipeline

START_PHI = (1.0, 0.5j)


def cubic_bound_constant(cfg: SWConfiguration, radius: float) -> float:
    """``C`` with ``‖cubic‖ <= C (‖R_D‖ + ‖R_C‖)`` for the lift of ``cfg``."""
    mass = abs(cfg.q.value) / radius
    peak = float(np.sqrt(np.max(cfg.phi.pointwise_norm_sq(), initial=0.0)))
    return max(1.0, float(np.sqrt(2.0) * peak / (8.0 * mass)))


class SolvePipeline(CommandPipeline):
    command = "solve"

    def __init__(self, *args, **kwargs) -> None:  # type: ignore[no-untyped-def]
        super().__init__(*args, **kwargs)
        self.add_step(PipelineStep("perturbed-start", self._start_step))
        self.add_step(PipelineStep("least-squares", self._solve_step))
        self.add_step(PipelineStep("lift-cross-check", self._cross_check_step))
        self.add_step(PipelineStep("write-artifacts", self._artifacts_step))

    def _start_step(self, context: PipelineContext) -> PipelineContext:
        config = self.config
        grid = Grid4(config.n)
        exact = manufactured_solution(grid, config.charge, START_PHI, config.solve.winding)
        scale = config.solve.perturbation
        noise_a = random_gauge(grid, [config.seed, 40], config.kmax).scaled(scale)
        noise_phi = random_spinor(grid, [config.seed, 41], config.kmax, "plus").scaled(scale)
        start = exact.with_fields(A=exact.A + noise_a, phi=exact.phi + noise_phi)
        self.logger.info(
            "[%s] Perturbed start with scale %.1e on N=%d, q=%s",
            self.name,
            scale,
            config.n,
            config.charge,
        )
        context["start"] = start
        return context

    def _solve_step(self, context: PipelineContext) -> PipelineContext:
        solution, log = solve_least_squares(context["start"], self.config.solver)
        context["solution"] = solution
        context["convergence"] = log
        context["solver"] = log.to_dict()
        if log.reason == "diverged":
            context["report"].diverged = True
            self.logger.warning("[%s] Solver diverged", self.name)
        self.check(context, "solve/objective", log.final_objective, self.config.solver.tolerance)
        return context

    def _cross_check_step(self, context: PipelineContext) -> PipelineContext:
        solution: SWConfiguration = context["solution"]
        radius = self.config.radius
        dirac_norm, curvature_norm = sw_residual(solution).norms()
        geometry = KKGeometry(solution.A, solution.q, radius)
        psi = lift(solution.phi, solution.q)
        cubic = cubic_residual(psi, geometry, solution.mu)
        cubic_norm = l2_norm(cubic.base)
        constant = cubic_bound_constant(solution, radius)
        bound = constant * (dirac_norm + curvature_norm)
        ratio = cubic_norm / bound if bound > 0.0 else (0.0 if cubic_norm == 0.0 else np.inf)
        self.logger.info(
            "[%s] Cubic residual %.3e against SW residual %.3e + %.3e with C=%.4g",
            self.name,
            cubic_norm,
            dirac_norm,
            curvature_norm,
            constant,
        )
        context["cubic_bound_constant"] = constant
        context["cubic"] = cubic
        # slack for rounding
        self.check(context, "solve/cubic-residual-bound", ratio, 1.0 + 1e-9)
        return context

    def _artifacts_step(self, context: PipelineContext) -> PipelineContext:
        directory = self.config.output_dir
        solution: SWConfiguration = context["solution"]
        log: ConvergenceLog = context["convergence"]
        self.artifact(context, log.write_csv(directory / "convergence.csv"))
        self.artifact(context, write_field(directory / "phi.field", solution.phi))
        self.artifact(context, write_field(directory / "gauge.field", solution.A))
        self.artifact(context, write_field(directory / "mu.field", solution.mu))
        self.artifact(
            context, write_field(directory / "psi.field", lift(solution.phi, solution.q))
        )
        return context


__all__ = ["SolvePipeline", "cubic_bound_constant"]
