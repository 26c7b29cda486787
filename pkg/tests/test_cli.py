from __future__ import annotations

import csv
import io
import json
import math
from typing import TYPE_CHECKING

import pytest
from flatsect import ResourceInjector
from flatsect.cli import Command, ReportWriter, RunConfig, main, parse_grid
from flatsect.exceptions import DegeneracyBudgetError, HarnessError
from flatsect.testing import MemoryReportWriter, SerialChunkExecutor
from flatsect.validation import Check, CheckRecord, ChunkExecutor
from pydantic import ValidationError

if TYPE_CHECKING:
    from pathlib import Path

LINE_CASE = ["--n", "3", "--q", "1", "--gamma", "0"]
PLANE_CASE = ["--n", "2", "--q", "1", "--gamma", "0"]
VALIDATE_ARGS = ["--samples", "2000", "--chunks", "2", "--threads", "1", "--grid", "1"]


def run_in_memory(argv: list[str]) -> tuple[int, MemoryReportWriter]:
    injector = ResourceInjector()
    with injector.override({ChunkExecutor: SerialChunkExecutor, ReportWriter: MemoryReportWriter}):
        code = main(argv, injector)
        writer = injector.resolve(ReportWriter)

    assert isinstance(writer, MemoryReportWriter)
    return code, writer


def test_constants() -> None:
    code, writer = run_in_memory(["constants", "--n", "2", "--q", "1", "--gamma", "0"])

    assert code == 0
    (row,) = writer.rows
    assert row["p"] == pytest.approx(2 / math.pi, abs=1e-6)
    assert row["D"] == pytest.approx(2 / math.pi**2)
    assert row["kappa_n"] == pytest.approx(math.pi)
    assert row["tangent_moment_low"] == "-inf"
    assert row["ball_moment_high"] == 1.0


def test_constants_to_stdout(capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["constants", "--n", "9", "--q", "6", "--gamma", "1"]) == 0

    row = json.loads(capsys.readouterr().out)
    assert row["p"] == pytest.approx(15 * math.pi / 256, abs=1e-6)
    assert row["p"] == pytest.approx(0.184077, abs=1e-6)


def test_invalid_triple_is_a_usage_error() -> None:
    assert main(["constants", "--n", "1", "--q", "1", "--gamma", "0"]) == 2
    assert main(["constants", "--n", "3", "--q", "2", "--gamma", "2"]) == 2


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["bogus"],
        ["constants", "--n", "x"],
        ["constants", "--n", "3"],
        ["sample", "--samples", "10"],
        ["density", *LINE_CASE],
        ["density", *LINE_CASE, "--grid", "a,b"],
        ["density", *LINE_CASE, "--grid", "-1"],
        ["sample", *LINE_CASE, "--h", "inf"],
        ["sample", *LINE_CASE, "--samples", "0"],
        ["validate", "--seed", "-1"],
        ["validate", "--alpha", "1"],
    ],
)
def test_usage_errors(argv: list[str]) -> None:
    assert main(argv) == 2


def test_parse_grid() -> None:
    assert parse_grid("0.5,1,2") == (0.5, 1.0, 2.0)
    assert parse_grid("0.5, 1,") == (0.5, 1.0)


def test_config_needs_the_whole_triple() -> None:
    with pytest.raises(ValidationError, match="together"):
        RunConfig(command=Command.SAMPLE, n=3, q=1)

    config = RunConfig(command=Command.VALIDATE, threads=1)
    assert config.case is None
    assert config.harness_settings().seed == 42


def test_density() -> None:
    code, writer = run_in_memory(
        ["density", *LINE_CASE, "--grid", "0.5,2"],
    )

    assert code == 0
    first, second = writer.rows
    assert first["x"] == 0.5
    assert first["density"] == pytest.approx(0.5)
    assert second["density"] == pytest.approx(0.125)
    assert 0 < first["cdf"] < second["cdf"] <= 1


def test_tangent_density_vanishes_inside_the_unit_ball() -> None:
    code, writer = run_in_memory(
        ["density", *LINE_CASE, "--family", "tangent", "--grid", "0.5,2"],
    )

    assert code == 0
    assert writer.rows[0]["density"] == 0
    assert writer.rows[0]["cdf"] == 0
    assert writer.rows[1]["density"] > 0


def test_density_csv(tmp_path: Path) -> None:
    out = tmp_path / "density.csv"

    code = main(
        ["density", *LINE_CASE, "--grid", "0.5,2", "--format", "csv", "--out", str(out)],
    )

    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out.read_text(encoding="utf-8"))))
    assert [row["x"] for row in rows] == ["0.5", "2"]
    assert float(rows[1]["density"]) == pytest.approx(0.125)


def test_sample() -> None:
    argv = ["sample", "--n", "3", "--q", "2", "--gamma", "1", "--samples", "50", "--chunks", "2"]

    code, writer = run_in_memory(argv)
    _, again = run_in_memory(argv)

    assert code == 0
    assert [row["index"] for row in writer.rows] == list(range(50))
    assert all(row["distance"] >= 0 for row in writer.rows)
    assert writer.text == again.text


def test_tangent_samples_lie_outside_the_unit_ball() -> None:
    argv = ["sample", "--n", "4", "--q", "2", "--gamma", "1", "--family", "tangent"]
    code, writer = run_in_memory([*argv, "--samples", "99"])

    assert code == 0
    assert min(row["distance"] for row in writer.rows) >= 1 - 1e-8


def test_validate_is_reproducible(tmp_path: Path) -> None:
    first, second = tmp_path / "first.jsonl", tmp_path / "second.jsonl"
    argv = ["validate", *PLANE_CASE, *VALIDATE_ARGS]

    main([*argv, "--out", str(first)])
    main([*argv, "--out", str(second), "--threads", "2"])

    assert first.read_bytes() == second.read_bytes()
    records = [json.loads(line) for line in first.read_text(encoding="utf-8").splitlines()]
    assert records
    assert all(record["schema_version"] == 1 and record["seed"] == 42 for record in records)


def test_tampered_validate_fails() -> None:
    code, writer = run_in_memory(
        ["validate", *PLANE_CASE, *VALIDATE_ARGS, "--debug-tamper-targets"],
    )

    assert code == 1
    assert writer.rows
    assert not any(row["pass"] for row in writer.rows)


@pytest.mark.parametrize(
    "argv",
    [
        ["constants", *PLANE_CASE],
        ["density", *LINE_CASE, "--grid", "0.5,2"],
        ["sample", *LINE_CASE, "--samples", "5", "--chunks", "1"],
        ["validate", *PLANE_CASE, *VALIDATE_ARGS],
    ],
    ids=lambda argv: argv[0],
)
def test_json_rows_carry_the_schema_version(argv: list[str]) -> None:
    code, writer = run_in_memory(argv)

    assert code in (0, 1)
    assert writer.rows
    assert all(row["schema_version"] == 1 for row in writer.rows)
    assert all(list(row)[0] == "schema_version" for row in writer.rows)


def passing_check(rng: object, settings: object, executor: object) -> list[CheckRecord]:
    record = CheckRecord(
        check_id="stub/passing", statement="stub", estimate=1.0, target=1.0, passed=True, seed=42
    )
    return [record]


@pytest.mark.parametrize(
    "error",
    [HarnessError("intersection left the fixed subspace"), DegeneracyBudgetError(9, 10, 1e-4)],
    ids=lambda error: type(error).__name__,
)
def test_aborted_validate_keeps_earlier_records(
    error: Exception,
    monkeypatch: pytest.MonkeyPatch,
    caplog: pytest.LogCaptureFixture,
) -> None:
    def aborting_check(rng: object, settings: object, executor: object) -> list[CheckRecord]:
        raise error

    checks = [
        Check("stub/passing", "stub", passing_check),
        Check("stub/aborting", "stub", aborting_check),
    ]
    monkeypatch.setattr("flatsect.cli._commands.case_checks", lambda *args, **kwargs: checks)

    code, writer = run_in_memory(["validate", *PLANE_CASE, *VALIDATE_ARGS])

    assert code == 2
    assert [row["check_id"] for row in writer.rows] == ["stub/passing"]
    assert "Run aborted" in caplog.text


def test_aborted_validate_keeps_earlier_csv_rows(
    tmp_path: Path,
    monkeypatch: pytest.MonkeyPatch,
) -> None:
    def aborting_check(rng: object, settings: object, executor: object) -> list[CheckRecord]:
        error_msg = "stub failure"
        raise HarnessError(error_msg)

    checks = [
        Check("stub/passing", "stub", passing_check),
        Check("stub/again", "stub", passing_check),
        Check("stub/aborting", "stub", aborting_check),
    ]
    monkeypatch.setattr("flatsect.cli._commands.case_checks", lambda *args, **kwargs: checks)
    out = tmp_path / "report.csv"

    code = main(["validate", *PLANE_CASE, *VALIDATE_ARGS, "--format", "csv", "--out", str(out)])

    assert code == 2
    rows = list(csv.DictReader(io.StringIO(out.read_text(encoding="utf-8"))))
    assert [row["check_id"] for row in rows] == ["stub/passing", "stub/passing"]
    assert out.read_text(encoding="utf-8").count("check_id") == 1


def test_sample_sizes_follow_samples_flag() -> None:
    defaults = RunConfig(command=Command.VALIDATE, threads=1).harness_settings()
    assert defaults.n_samples == 100_000
    assert defaults.hit_samples == defaults.theorem_samples == 1_000_000

    small = RunConfig(command=Command.VALIDATE, threads=1, n_samples=500).harness_settings()
    assert small.hit_samples == small.theorem_samples == 500

    mixed = RunConfig(
        command=Command.VALIDATE, threads=1, n_samples=500, hit_samples=7
    ).harness_settings()
    assert (mixed.n_samples, mixed.hit_samples, mixed.theorem_samples) == (500, 7, 500)
