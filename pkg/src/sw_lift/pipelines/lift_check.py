"""``lift-check``: the five-dimensional Dirac operator against the torus equations.

Every charge in ``[lift-check] charges`` is tested on ``samples`` random
configurations; each check reports the worst deviation over all of them.
"""

from __future__ import annotations

from collections import defaultdict

import numpy as np

from ..kaluza_klein import (
    KKGeometry,
    action_gradient,
    charge_conjugate_sector,
    chirality_split,
    constant_length_eigenvalue,
    cubic_residual,
    dirac_Y_frame,
    dirac_Y_reduced,
    frame_connection,
    gross_neveu_action,
    lift,
    nabla_Y,
    nabla_Y_lemma,
    residual_decomposition_check,
    sector_inner,
)
from ..kaluza_klein.connection import FRAME_DIRECTIONS
from ..kaluza_klein.sector import SectorSpinor
from ..seiberg_witten import (
    GaugeTransform,
    SWConfiguration,
    charge_conjugate_config,
    gauge_transform,
    manufactured_solution,
    random_configuration,
    residual_norms,
    winding_fits_grid,
    winding_grid_size,
)
from ..torus_fields import (
    GaugeField,
    Grid4,
    SpinorField,
    dirac_X,
    l2_norm,
    random_gauge,
    random_spinor,
)
from .base import PipelineContext, PipelineStep
from .report import CommandPipeline, relative_deviation

HARMONIC_TOLERANCE = 1e-13
GRADIENT_GRID = 4
GRADIENT_DIRECTIONS = 10
GRADIENT_STEP = 1e-5
MANUFACTURED_PHI = (1.0, 0.5j)


def _max_abs(values: np.ndarray) -> float:
    return float(np.max(np.abs(values), initial=0.0))


def _cubic_norm(cfg: SWConfiguration, radius: float) -> float:
    geometry = KKGeometry(cfg.A, cfg.q, radius)
    return l2_norm(cubic_residual(lift(cfg.phi, cfg.q), geometry, cfg.mu).base)


class LiftCheckPipeline(CommandPipeline):
    command = "lift-check"

    def __init__(self, *args, **kwargs) -> None:  # type: ignore[no-untyped-def]
        super().__init__(*args, **kwargs)
        self.add_step(PipelineStep("random-configurations", self._sample_step))
        self.add_step(PipelineStep("varying-radius", self._varying_radius_step))
        self.add_step(PipelineStep("action-gradient", self._gradient_step))
        self.add_step(PipelineStep("harmonic-branch", self._harmonic_step))

    def _configurations(self) -> list[tuple[int, list[int], SWConfiguration]]:
        config = self.config
        grid = Grid4(config.n)
        configurations = []
        for charge_index, q in enumerate(config.lift_check.charges):
            for sample in range(config.lift_check.samples):
                seed = [config.seed, charge_index, sample]
                cfg = random_configuration(grid, seed, config.kmax, q)
                configurations.append((charge_index, seed, cfg))
        return configurations

    def _sample_step(self, context: PipelineContext) -> PipelineContext:
        config = self.config
        tol = config.tolerances
        radius = config.radius
        worst: dict[str, float] = defaultdict(float)

        configurations = self._configurations()
        context["configurations_checked"] = len(configurations)
        for charge_index, seed, cfg in configurations:
            q = cfg.q
            geometry = KKGeometry(cfg.A, q, radius)
            psi = lift(cfg.phi, q)

            frame = dirac_Y_frame(psi, geometry)
            reduced = dirac_Y_reduced(psi, geometry)
            worst["two-path"] = max(
                worst["two-path"],
                relative_deviation(l2_norm((frame - reduced).base), l2_norm(frame.base)),
            )

            _, minus = chirality_split(frame)
            torus = lift(dirac_X(cfg.A, q, cfg.phi), q)
            worst["chirality-split"] = max(
                worst["chirality-split"],
                relative_deviation(l2_norm((minus - torus).base), l2_norm(torus.base)),
            )

            connection = frame_connection(geometry)
            for direction in FRAME_DIRECTIONS:
                direct = nabla_Y(psi, geometry, direction, connection)
                lemma = nabla_Y_lemma(psi, geometry, direction)
                worst["connection-lemma"] = max(
                    worst["connection-lemma"],
                    relative_deviation(l2_norm((direct - lemma).base), l2_norm(direct.base)),
                )

            decomposition = residual_decomposition_check(
                cfg, geometry, tol.decomposition, tol.converse, tol.phi_ratio
            )
            worst["decomposition"] = max(worst["decomposition"], decomposition.forward_deviation)
            worst["converse"] = max(worst["converse"], decomposition.converse_deviation)

            worst["gauge"] = max(worst["gauge"], self._gauge_deviation(cfg, seed, radius))
            conjugation, cubic_conjugation = self._conjugation_deviation(cfg, radius)
            worst["conjugation"] = max(worst["conjugation"], conjugation)
            worst["conjugation-cubic"] = max(worst["conjugation-cubic"], cubic_conjugation)

            full = SectorSpinor(
                random_spinor(cfg.grid, [config.seed, charge_index, 90], config.kmax, "full"), q
            )
            other = SectorSpinor(
                random_spinor(cfg.grid, [config.seed, charge_index, 91], config.kmax, "full"), q
            )
            left = sector_inner(dirac_Y_frame(full, geometry), other)
            right = sector_inner(full, dirac_Y_frame(other, geometry))
            worst["self-adjoint"] = max(
                worst["self-adjoint"], relative_deviation(abs(left - right), abs(left))
            )

        self.check(context, "lift/two-path-dirac", worst["two-path"], tol.dirac)
        self.check(context, "lift/chirality-split", worst["chirality-split"], tol.dirac)
        self.check(context, "lift/connection-lemma", worst["connection-lemma"], tol.dirac)
        self.check(context, "lift/residual-decomposition", worst["decomposition"], tol.decomposition)
        self.check(context, "lift/converse-recovery", worst["converse"], tol.converse)
        self.check(context, "lift/gauge-equivariance", worst["gauge"], tol.symmetry)
        self.check(context, "lift/charge-conjugation", worst["conjugation"], tol.symmetry)
        self.check(context, "lift/charge-conjugation-cubic", worst["conjugation-cubic"], tol.symmetry)
        self.check(context, "lift/dirac-self-adjoint", worst["self-adjoint"], tol.dirac)
        return context

    def _gauge_deviation(self, cfg: SWConfiguration, seed: list[int], radius: float) -> float:
        sign = 1 if cfg.q.doubled > 0 else -1
        winding = (sign, 0, 0, 0)
        if not winding_fits_grid(cfg.phi, cfg.q, winding):
            n = winding_grid_size(cfg.grid.n, self.config.kmax, cfg.q, winding)
            self.logger.info(
                "[%s] Winding %s does not fit N=%d for q=%s; redrawing on N=%d",
                self.name,
                winding,
                cfg.grid.n,
                cfg.q,
                n,
            )
            cfg = random_configuration(Grid4(n), seed, self.config.kmax, cfg.q)
        moved = gauge_transform(cfg, GaugeTransform(winding))
        before, after = residual_norms(cfg), residual_norms(moved)
        deviation = max(
            relative_deviation(abs(before[key] - after[key]), before[key])
            for key in ("dirac", "curvature")
        )
        cubic_before = _cubic_norm(cfg, radius)
        cubic_after = _cubic_norm(moved, radius)
        return max(deviation, relative_deviation(abs(cubic_before - cubic_after), cubic_before))

    def _conjugation_deviation(self, cfg: SWConfiguration, radius: float) -> tuple[float, float]:
        conjugate = charge_conjugate_config(cfg)
        before, after = residual_norms(cfg), residual_norms(conjugate)
        norms = max(
            relative_deviation(abs(before[key] - after[key]), before[key])
            for key in ("dirac", "curvature")
        )
        restored = charge_conjugate_config(conjugate, inverse=True)
        norms = max(
            norms, relative_deviation(_max_abs(restored.phi.values - cfg.phi.values), 1.0)
        )

        cubic = cubic_residual(lift(cfg.phi, cfg.q), KKGeometry(cfg.A, cfg.q, radius), cfg.mu)
        cubic_conjugate = cubic_residual(
            lift(conjugate.phi, conjugate.q),
            KKGeometry(conjugate.A, conjugate.q, radius),
            conjugate.mu,
        )
        mapped = charge_conjugate_sector(cubic).scaled(-1.0)
        cubic_deviation = relative_deviation(
            l2_norm((cubic_conjugate - mapped).base), l2_norm(cubic.base)
        )
        return norms, cubic_deviation

    def _varying_radius_step(self, context: PipelineContext) -> PipelineContext:
        config = self.config
        tol = config.tolerances
        grid = Grid4(config.n)
        radius = 2.0 + 0.5 * np.sin(grid.coordinate(1))
        worst_solution = 0.0
        worst_decomposition = 0.0
        for charge_index, q in enumerate(config.lift_check.charges):
            solution = manufactured_solution(grid, q, MANUFACTURED_PHI, config.solve.winding)
            geometry = KKGeometry(solution.A, q, radius)
            psi = lift(solution.phi, q)
            residual = cubic_residual(psi, geometry, solution.mu)
            worst_solution = max(
                worst_solution, relative_deviation(l2_norm(residual.base), l2_norm(psi.base))
            )

            cfg = random_configuration(grid, [config.seed, charge_index, 99], config.kmax, q)
            report = residual_decomposition_check(
                cfg, KKGeometry(cfg.A, q, radius), tol.decomposition, tol.converse, tol.phi_ratio
            )
            worst_decomposition = max(worst_decomposition, report.forward_deviation)

        self.check(context, "lift/varying-radius-solution", worst_solution, tol.varying_radius)
        self.check(
            context, "lift/varying-radius-decomposition", worst_decomposition, tol.decomposition
        )
        return context

    def _gradient_step(self, context: PipelineContext) -> PipelineContext:
        config = self.config
        grid = Grid4(GRADIENT_GRID)
        q = config.lift_check.charges[0]
        geometry = KKGeometry(random_gauge(grid, [config.seed, 70], 1), q, config.radius)
        psi = SectorSpinor(random_spinor(grid, [config.seed, 71], 1, "full"), q)
        gradient = action_gradient(psi, geometry)
        worst = 0.0
        for index in range(GRADIENT_DIRECTIONS):
            direction = SectorSpinor(random_spinor(grid, [config.seed, 72, index], 1, "full"), q)
            forward = gross_neveu_action(psi + direction.scaled(GRADIENT_STEP), geometry)
            backward = gross_neveu_action(psi - direction.scaled(GRADIENT_STEP), geometry)
            difference = (forward - backward) / (2.0 * GRADIENT_STEP)
            analytic = sector_inner(direction, gradient).real
            worst = max(worst, relative_deviation(abs(difference - analytic), abs(analytic)))
        self.check(context, "lift/action-gradient", worst, config.tolerances.gradient)
        return context

    def _harmonic_step(self, context: PipelineContext) -> PipelineContext:
        """A spinor of length ``4|m|`` makes the potential part of the cubic equation vanish."""
        config = self.config
        grid = Grid4(config.n)
        worst_eigen = 0.0
        worst_potential = 0.0
        worst_mass = 0.0
        for q in config.lift_check.charges:
            mass = -q.value / config.radius
            norm = 4.0 * abs(mass)
            worst_eigen = max(worst_eigen, abs(float(constant_length_eigenvalue(norm**2, mass))))
            geometry = KKGeometry(GaugeField.zero(grid), q, config.radius)
            psi = lift(SpinorField.constant(grid, "plus", (0.6 * norm, 0.8j * norm)), q)
            potential = cubic_residual(psi, geometry) - dirac_Y_reduced(psi, geometry)
            worst_potential = max(
                worst_potential, relative_deviation(_max_abs(potential.values), norm)
            )
            # flat bundle, constant spinor: D^Y reduces to the fibre mass term
            frame = dirac_Y_frame(psi, geometry)
            worst_mass = max(
                worst_mass,
                relative_deviation(
                    _max_abs((frame - psi.scaled(mass)).values), abs(mass) * norm
                ),
            )
        self.check(context, "lift/harmonic-eigenvalue", worst_eigen, HARMONIC_TOLERANCE)
        self.check(context, "lift/harmonic-potential", worst_potential, HARMONIC_TOLERANCE)
        self.check(context, "lift/mass-term", worst_mass, config.tolerances.dirac)
        return context


__all__ = ["LiftCheckPipeline"]
