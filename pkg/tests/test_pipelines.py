from __future__ import annotations

import csv
import json
import logging
from pathlib import Path
from typing import Any

import pytest

from sw_lift.config import load_config
from sw_lift.field_io import read_field
from sw_lift.pipelines import (
    COMMANDS,
    KEReportPipeline,
    LiftCheckPipeline,
    Pipeline,
    PipelineStep,
    RicciOraclePipeline,
    SolvePipeline,
    VerifyPipeline,
    pipeline_step,
)
from sw_lift.pipelines.ke_report import CSV_FIELDS
from sw_lift.pipelines.report import EXIT_CHECK_FAILURE, EXIT_DIVERGED, EXIT_PASS, Report
from sw_lift.pipelines.solve import cubic_bound_constant
from sw_lift.seiberg_witten import manufactured_solution
from sw_lift.torus_fields import Charge, Grid4


def _config(tmp_path: Path, **overrides: Any):  # type: ignore[no-untyped-def]
    values = {"output.directory": tmp_path, "run.n": 4, "run.kmax": 1, "run.trials": 50}
    values.update(overrides)
    return load_config(overrides=values)


def _names(report: Report) -> set[str]:
    return {check.name for check in report.checks}


def test_pipeline_runs_steps_in_order_and_dumps_context(tmp_path: Path) -> None:
    calls: list[str] = []

    @pipeline_step("first")
    def first(context):  # type: ignore[no-untyped-def]
        calls.append("first")
        context["value"] = 1
        return context

    def second(context):  # type: ignore[no-untyped-def]
        calls.append("second")
        context["value"] += 1
        context["opaque"] = object()
        return context

    pipeline = Pipeline(name="demo", debug_dir=tmp_path)
    pipeline.add_step(first)
    pipeline.add_step(PipelineStep("second", second))
    context = pipeline.run(seed=3)

    assert calls == ["first", "second"]
    assert context["value"] == 2
    dump = json.loads((tmp_path / "02_second.json").read_text())
    assert "opaque" not in dump
    assert dump["seed"] == 3
    assert dump["value"] == 2
    assert set(dump["step_seconds"]) == {"first", "second"}
    first_dump = json.loads((tmp_path / "01_first.json").read_text())
    assert set(first_dump["step_seconds"]) == {"first"}


def test_report_exit_codes_and_json() -> None:
    report = Report(command="demo", config={})
    report.add_check("ok", 1e-12, 1e-10)
    assert report.exit_code() == EXIT_PASS
    report.add_check("nan", float("nan"), 1.0)
    assert report.exit_code() == EXIT_CHECK_FAILURE
    payload = json.loads(report.to_json())
    assert payload["checks"][1]["measured"] is None
    assert payload["passed"] is False
    report.diverged = True
    assert report.exit_code() == EXIT_DIVERGED
    assert report.summary_lines()[-1].startswith("demo: DIVERGED")


def test_commands_are_registered() -> None:
    assert set(COMMANDS) == {"verify", "lift-check", "solve", "ke-report", "ricci-oracle"}


def test_verify_pipeline(tmp_path: Path) -> None:
    report = VerifyPipeline(_config(tmp_path)).execute()
    assert report.passed, report.summary_lines()
    assert {
        "torus/parseval",
        "torus/leibniz",
        "torus/bianchi",
        "torus/dirac-self-adjoint",
        "torus/dirac-chirality",
    } <= _names(report)
    assert any(name.startswith("clifford/") for name in _names(report))
    payload = json.loads((tmp_path / "verify-report.json").read_text())
    assert payload["command"] == "verify"
    assert payload["config"]["run"]["n"] == 4


def test_lift_check_pipeline(tmp_path: Path) -> None:
    config = _config(tmp_path, **{"lift-check.charges": "1/2, -1", "lift-check.samples": 1})
    report = LiftCheckPipeline(config).execute()
    assert report.passed, report.summary_lines()
    assert {
        "lift/two-path-dirac",
        "lift/residual-decomposition",
        "lift/converse-recovery",
        "lift/gauge-equivariance",
        "lift/charge-conjugation-cubic",
        "lift/varying-radius-solution",
        "lift/action-gradient",
        "lift/harmonic-potential",
    } <= _names(report)


def test_lift_check_redraws_on_a_grid_that_fits_the_winding(tmp_path: Path, caplog) -> None:
    config = _config(tmp_path, **{"lift-check.charges": "2", "lift-check.samples": 1})
    with caplog.at_level(logging.INFO):
        report = LiftCheckPipeline(config, logger=logging.getLogger("sw_lift.test")).execute()
    # q = 2 with kmax = 1 needs N = 12 for the unit winding
    assert "redrawing on N=12" in caplog.text
    assert "aliased" not in caplog.text
    assert report.passed, report.summary_lines()


def test_lift_check_default_covers_twenty_configurations(tmp_path: Path) -> None:
    debug_dir = tmp_path / "debug"
    config = _config(tmp_path)
    assert [str(q) for q in config.lift_check.charges] == ["1/2", "1", "-1", "2"]
    report = LiftCheckPipeline(config, debug_dir=debug_dir).execute()
    assert report.passed, report.summary_lines()
    dump = json.loads((debug_dir / "01_random-configurations.json").read_text())
    assert dump["configurations_checked"] == 20
    assert "lift/mass-term" in _names(report)


def test_solve_pipeline_writes_artifacts(tmp_path: Path) -> None:
    debug_dir = tmp_path / "debug"
    report = SolvePipeline(_config(tmp_path), debug_dir=debug_dir).execute()
    assert report.passed, report.summary_lines()
    assert report.exit_code() == EXIT_PASS
    assert {"solve/objective", "solve/cubic-residual-bound"} == _names(report)
    for name in ("convergence.csv", "phi.field", "gauge.field", "mu.field", "psi.field"):
        assert str(tmp_path / name) in report.artifacts
    assert read_field(tmp_path / "phi.field").chirality == "plus"
    with (tmp_path / "convergence.csv").open(newline="", encoding="utf-8") as handle:
        rows = list(csv.DictReader(handle))
    assert float(rows[-1]["objective"]) <= 1e-10
    dump = json.loads((debug_dir / "02_least-squares.json").read_text())
    assert dump["solver"]["reason"] == "tolerance"
    assert (debug_dir / "03_lift-cross-check.json").exists()


def test_solve_pipeline_reports_divergence(tmp_path: Path) -> None:
    config = _config(tmp_path, **{"solve.perturbation": float("nan")})
    report = SolvePipeline(config).execute()
    assert report.diverged
    assert report.exit_code() == EXIT_DIVERGED


def test_cubic_bound_constant() -> None:
    solution = manufactured_solution(Grid4(4), Charge(1), [8.0, 0.0])
    # |φ| = 8 and |m| = 1/2
    assert cubic_bound_constant(solution, 1.0) == pytest.approx(2.0 * 2**0.5)
    small = manufactured_solution(Grid4(4), Charge(1), [0.1, 0.0])
    assert cubic_bound_constant(small, 1.0) == 1.0


def test_ke_report_pipeline(tmp_path: Path) -> None:
    report = KEReportPipeline(_config(tmp_path)).execute()
    assert report.passed, report.summary_lines()
    assert {"ke/einstein-lambda-6", "ke/harmonic-lambda-minus-4", "ke/gap"} <= _names(report)
    with (tmp_path / "ke-report.csv").open(newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        rows = list(reader)
    assert tuple(reader.fieldnames or ()) == CSV_FIELDS
    assert [float(row["lambda"]) for row in rows] == [-4.0, 2.0, 6.0]
    assert float(rows[2]["nu_plus"]) == pytest.approx(2.5)
    assert float(rows[2]["gap"]) == pytest.approx(0.0, abs=1e-12)


def test_ke_report_skips_special_values_outside_the_sweep(tmp_path: Path) -> None:
    report = KEReportPipeline(_config(tmp_path, **{"ke-report.lambdas": "1, 3"})).execute()
    assert report.passed
    assert "ke/einstein-lambda-6" not in _names(report)


@pytest.mark.parametrize(("curvature", "radius"), [(1.0, 1.0), (2.0, 0.5)])
def test_ricci_oracle_pipeline(tmp_path: Path, curvature: float, radius: float) -> None:
    config = _config(
        tmp_path, **{"ricci-oracle.curvature": curvature, "ricci-oracle.radius": radius}
    )
    report = RicciOraclePipeline(config).execute()
    assert report.passed, report.summary_lines()
    assert _names(report) == {"ricci/max-deviation", "ricci/vertical-entry", "ricci/mixed-entries"}
