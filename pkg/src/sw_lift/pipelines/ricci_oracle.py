"""``ricci-oracle``: closed Ricci formulas against finite differences of an explicit metric."""

from __future__ import annotations

import numpy as np

from ..kaluza_klein import ricci_oracle
from ..kaluza_klein.ricci import RicciOracleReport
from .base import PipelineContext, pipeline_step
from .report import CommandPipeline, Report


@pipeline_step("finite-difference-ricci")
def _oracle_step(context: PipelineContext) -> PipelineContext:
    settings = context["config"].ricci_oracle
    result = ricci_oracle(settings.curvature, settings.radius, settings.step)
    context["oracle"] = result
    context["ricci"] = result.to_dict()
    return context


@pipeline_step("compare-formulas")
def _compare_step(context: PipelineContext) -> PipelineContext:
    result: RicciOracleReport = context["oracle"]
    report: Report = context["report"]
    tol = context["config"].tolerances.ricci
    report.add_check("ricci/max-deviation", result.max_deviation, tol)
    vertical = abs(result.oracle[4, 4] - 0.5 * result.radius**2 * result.curvature**2)
    report.add_check("ricci/vertical-entry", vertical, tol)
    mixed = float(np.max(np.abs(result.oracle[:4, 4])))
    report.add_check("ricci/mixed-entries", mixed, tol)
    context["checks"] = [check.to_dict() for check in report.checks]
    return context


class RicciOraclePipeline(CommandPipeline):
    command = "ricci-oracle"

    def __init__(self, *args, **kwargs) -> None:  # type: ignore[no-untyped-def]
        super().__init__(*args, **kwargs)
        self.add_step(_oracle_step)
        self.add_step(_compare_step)


__all__ = ["RicciOraclePipeline"]
