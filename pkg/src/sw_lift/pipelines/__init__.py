"""One pipeline per command, all reporting through :class:`Report`."""

from .base import Pipeline, PipelineContext, PipelineStep, pipeline_step
from .ke_report import KEReportPipeline
from .lift_check import LiftCheckPipeline
from .report import CheckResult, CommandPipeline, Report
from .ricci_oracle import RicciOraclePipeline
from .solve import SolvePipeline
from .verify import VerifyPipeline

COMMANDS: dict[str, type[CommandPipeline]] = {
    pipeline.command: pipeline
    for pipeline in (
        VerifyPipeline,
        LiftCheckPipeline,
        SolvePipeline,
        KEReportPipeline,
        RicciOraclePipeline,
    )
}

__all__ = [
    "COMMANDS",
    "CheckResult",
    "CommandPipeline",
    "KEReportPipeline",
    "LiftCheckPipeline",
    "Pipeline",
    "PipelineContext",
    "PipelineStep",
    "Report",
    "RicciOraclePipeline",
    "SolvePipeline",
    "VerifyPipeline",
    "pipeline_step",
]
