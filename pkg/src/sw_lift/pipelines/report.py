"""Check reports shared by every command and the pipeline base that fills them."""

from __future__ import annotations

import json
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .. import __version__
from ..config import RunConfig, ensure_directory
from .base import Pipeline, PipelineContext

LOGGER = logging.getLogger(__name__)

SCHEMA_VERSION = 1

EXIT_PASS = 0
EXIT_CHECK_FAILURE = 1
EXIT_USAGE = 2
EXIT_DIVERGED = 3


@dataclass(slots=True)
class CheckResult:
    name: str
    measured: float
    threshold: float
    passed: bool

    def to_dict(self) -> dict[str, Any]:
        measured = self.measured if math.isfinite(self.measured) else None
        return {
            "name": self.name,
            "measured": measured,
            "threshold": self.threshold,
            "passed": self.passed,
        }


@dataclass(slots=True)
class Report:
    command: str
    config: dict[str, Any]
    checks: list[CheckResult] = field(default_factory=list)
    artifacts: list[str] = field(default_factory=list)
    wall_time_seconds: float = 0.0
    diverged: bool = False
    version: str = __version__

    @property
    def passed(self) -> bool:
        return not self.diverged and all(check.passed for check in self.checks)

    def add_check(
        self, name: str, measured: float, threshold: float, passed: bool | None = None
    ) -> CheckResult:
        """Record a check; by default it passes when ``measured <= threshold``."""
        value = float(measured)
        if passed is None:
            passed = math.isfinite(value) and value <= threshold
        check = CheckResult(name, value, float(threshold), bool(passed))
        self.checks.append(check)
        LOGGER.info(
            "%s %s: %.3e (threshold %.1e)",
            "PASS" if check.passed else "FAIL",
            name,
            value,
            threshold,
        )
        return check

    def exit_code(self) -> int:
        if self.diverged:
            return EXIT_DIVERGED
        return EXIT_PASS if self.passed else EXIT_CHECK_FAILURE

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "version": self.version,
            "config": self.config,
            "checks": [check.to_dict() for check in self.checks],
            "passed": self.passed,
            "wall_time_seconds": self.wall_time_seconds,
            "artifacts": list(self.artifacts),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def write_json(self, directory: Path) -> Path:
        ensure_directory(directory)
        path = directory / f"{self.command}-report.json"
        path.write_text(self.to_json() + "\n", encoding="utf-8")
        LOGGER.debug("Wrote report %s", path)
        return path

    def summary_lines(self) -> list[str]:
        lines = [
            f"{'PASS' if check.passed else 'FAIL'} {check.name}: "
            f"{check.measured:.3e} (threshold {check.threshold:.1e})"
            for check in self.checks
        ]
        verdict = "DIVERGED" if self.diverged else ("PASSED" if self.passed else "FAILED")
        lines.append(f"{self.command}: {verdict} in {self.wall_time_seconds:.2f}s")
        return lines


def relative_deviation(difference: float, *scales: float) -> float:
    """``difference`` relative to the largest scale, never dividing by less than one."""
    return float(difference) / max(1.0, *(float(scale) for scale in scales))


class CommandPipeline(Pipeline):
    """Pipeline for one CLI command; steps record checks on ``context["report"]``."""

    command = "command"

    def __init__(
        self,
        config: RunConfig,
        *,
        debug_dir: Path | None = None,
        logger: logging.Logger | None = None,
    ) -> None:
        super().__init__(name=self.command, debug_dir=debug_dir, logger=logger)
        self.config = config

    def execute(self) -> Report:
        report = Report(command=self.command, config=self.config.as_dict())
        start = time.perf_counter()
        self.run(report=report, config=self.config)
        report.wall_time_seconds = time.perf_counter() - start
        path = report.write_json(self.config.output_dir)
        self.logger.info("[%s] Report written to %s", self.name, path)
        return report

    def check(
        self,
        context: PipelineContext,
        name: str,
        measured: float,
        threshold: float,
        passed: bool | None = None,
    ) -> CheckResult:
        report: Report = context["report"]
        result = report.add_check(name, measured, threshold, passed)
        context["checks"] = [check.to_dict() for check in report.checks]
        return result

    def artifact(self, context: PipelineContext, path: Path) -> Path:
        report: Report = context["report"]
        report.artifacts.append(str(path))
        context["artifacts"] = list(report.artifacts)
        return path


__all__ = [
    "CheckResult",
    "CommandPipeline",
    "EXIT_CHECK_FAILURE",
    "EXIT_DIVERGED",
    "EXIT_PASS",
    "EXIT_USAGE",
    "Report",
    "SCHEMA_VERSION",
    "relative_deviation",
]
