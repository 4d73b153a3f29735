"""``ke-report``: Sasaki circle bundles over Kähler-Einstein surfaces, swept over ``λ``."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Any

import numpy as np

from ..sasaki_model import (
    KEParameters,
    default_perturbation,
    friedrich_gap,
    friedrich_gap_closed,
    ke_solution,
    lifted_eigenvalue,
    sasaki_curvature_report,
    sasaki_ricci,
)
from .base import PipelineContext, PipelineStep
from .report import CommandPipeline

CSV_FIELDS = (
    "lambda",
    "radius",
    "mass",
    "norm_sq",
    "nu_plus",
    "nu_minus",
    "alpha_g",
    "alpha_eta",
    "scal",
    "gap",
)

EINSTEIN_LAMBDA = 6.0
HARMONIC_LAMBDA = -4.0


def ke_table_row(lam: float, spin: bool = False) -> dict[str, float]:
    """One table row; ``mass`` and ``norm_sq`` belong to the canonical structure."""
    canonical = sasaki_curvature_report(lam, spin, "canonical")
    conjugate = sasaki_curvature_report(lam, spin, "conjugate")
    return {
        "lambda": lam,
        "radius": canonical.radius,
        "mass": canonical.mass,
        "norm_sq": canonical.norm_sq,
        "nu_plus": conjugate.nu,
        "nu_minus": canonical.nu,
        "alpha_g": canonical.alpha_g,
        "alpha_eta": canonical.alpha_eta,
        "scal": canonical.scal,
        "gap": canonical.gap,
    }


def write_ke_csv(path: Path, rows: list[dict[str, float]]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=CSV_FIELDS)
        writer.writeheader()
        for row in rows:
            writer.writerow({key: repr(float(row[key])) for key in CSV_FIELDS})
    return path


class KEReportPipeline(CommandPipeline):
    command = "ke-report"

    def __init__(self, *args, **kwargs) -> None:  # type: ignore[no-untyped-def]
        super().__init__(*args, **kwargs)
        self.add_step(PipelineStep("sweep", self._sweep_step))
        self.add_step(PipelineStep("closed-forms", self._closed_form_step))
        self.add_step(PipelineStep("special-values", self._special_values_step))
        self.add_step(PipelineStep("write-table", self._write_step))

    def _sweep_step(self, context: PipelineContext) -> PipelineContext:
        settings = self.config.ke_report
        rows = [ke_table_row(lam, settings.spin) for lam in settings.lambdas]
        for row in rows:
            self.logger.debug("[%s] λ=%g: %s", self.name, row["lambda"], row)
        context["rows"] = rows
        return context

    def _closed_form_step(self, context: PipelineContext) -> PipelineContext:
        settings = self.config.ke_report
        tol = self.config.tolerances.sasaki
        worst: dict[str, float] = {
            "closed-form": 0.0,
            "eigenvalue": 0.0,
            "mass-sign": 0.0,
            "curvature": 0.0,
            "gap": 0.0,
            "spin-row": 0.0,
        }
        for lam in settings.lambdas:
            for structure in ("canonical", "conjugate"):
                report = sasaki_curvature_report(lam, settings.spin, structure)
                worst["closed-form"] = max(worst["closed-form"], report.closed_form_deviation)
                params = KEParameters(
                    lam, default_perturbation(lam, structure), structure, settings.spin
                )
                eigen = lifted_eigenvalue(params)
                worst["eigenvalue"] = max(worst["eigenvalue"], eigen.max_disagreement)
                worst["mass-sign"] = max(
                    worst["mass-sign"], abs(eigen.mass - eigen.mass_from_radius)
                )
                worst["curvature"] = max(
                    worst["curvature"], ke_solution(params).curvature_defect()
                )
            worst["gap"] = max(worst["gap"], abs(friedrich_gap(lam) - friedrich_gap_closed(lam)))
            spin_rows = np.abs(sasaki_ricci(lam, spin=False) - sasaki_ricci(lam, spin=True))
            worst["spin-row"] = max(worst["spin-row"], float(np.max(spin_rows)))

        for name, value in worst.items():
            self.check(context, f"ke/{name}", value, tol)
        return context

    def _special_values_step(self, context: PipelineContext) -> PipelineContext:
        tol = self.config.tolerances.sasaki
        rows: list[dict[str, Any]] = context["rows"]
        for row in rows:
            if row["lambda"] == EINSTEIN_LAMBDA:
                deviation = max(
                    abs(row["nu_plus"] - 2.5),
                    abs(row["nu_minus"] + 2.5),
                    abs(row["alpha_g"] - 4.0),
                    abs(row["alpha_eta"]),
                    abs(row["gap"]),
                )
                self.check(context, "ke/einstein-lambda-6", deviation, tol)
            if row["lambda"] == HARMONIC_LAMBDA:
                params = KEParameters(HARMONIC_LAMBDA, 0.0, "canonical", self.config.ke_report.spin)
                phi0 = ke_solution(params).phi0
                deviation = max(
                    float(np.max(np.abs(phi0 - np.array([4.0, 0.0])))),
                    abs(row["nu_minus"]),
                )
                self.check(context, "ke/harmonic-lambda-minus-4", deviation, tol)
        return context

    def _write_step(self, context: PipelineContext) -> PipelineContext:
        path = write_ke_csv(self.config.output_dir / "ke-report.csv", context["rows"])
        self.artifact(context, path)
        return context


__all__ = ["CSV_FIELDS", "KEReportPipeline", "ke_table_row", "write_ke_csv"]
