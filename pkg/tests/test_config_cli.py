"""Config file parsing, env overrides, and the command line."""

from __future__ import annotations

import json

import pytest
from click.testing import CliRunner

from tabchat.cli import main
from tabchat.config import BadConfig, load_config


def test_defaults_without_file():
    config = load_config(env={})
    assert config.memory_turns == 10
    assert config.caps.sample_rows == 5
    assert config.caps.exemplars_per_column == 10
    assert config.policy.timeout == 15.0
    assert config.policy.network_allowed is False
    assert config.gateway_mode == "mock"


def test_file_values_and_types(tmp_path):
    path = tmp_path / "engine.conf"
    path.write_text(
        "# engine settings\n"
        "gateway.mode = http\n"
        "gateway.endpoint = http://localhost:9000/v1/chat/completions\n"
        "sandbox.timeout = 20.5\n"
        "sandbox.whitelist = pandas, numpy\n"
        "caps.sample_rows = 3\n"
        "memory.turns = 4\n"
    )
    config = load_config(path, env={})
    assert config.gateway_mode == "http"
    assert config.gateway_endpoint.endswith("/chat/completions")
    assert config.policy.timeout == 20.5
    assert config.policy.whitelist == ("pandas", "numpy")
    assert config.caps.sample_rows == 3
    assert config.memory_turns == 4


def test_env_overrides_file(tmp_path):
    path = tmp_path / "engine.conf"
    path.write_text("memory.turns = 4\n")
    config = load_config(path, env={"TABCHAT_MEMORY_TURNS": "7"})
    assert config.memory_turns == 7


def test_unknown_key_rejected(tmp_path):
    path = tmp_path / "engine.conf"
    path.write_text("no.such.key = 1\n")
    with pytest.raises(BadConfig):
        load_config(path, env={})


def test_bad_value_rejected(tmp_path):
    path = tmp_path / "engine.conf"
    path.write_text("memory.turns = banana\n")
    with pytest.raises(BadConfig):
        load_config(path, env={})


def test_missing_equals_rejected(tmp_path):
    path = tmp_path / "engine.conf"
    path.write_text("just a line\n")
    with pytest.raises(BadConfig):
        load_config(path, env={})


# -- CLI ----------------------------------------------------------------------


@pytest.fixture
def runner():
    return CliRunner()


def test_ask_one_shot(tmp_path, runner, students_csv, monkeypatch):
    monkeypatch.setenv("TABCHAT_DATA_DIR", str(tmp_path / "data"))
    monkeypatch.setenv("TABCHAT_SANDBOX_WHITELIST", "pandas,numpy,matplotlib")
    script = {
        "default": {"chat": "hello"},
        "rules": [
            {
                "tag": "decision",
                "match": "Request: show the first rows",
                "response": '{"action": "code_generation"}',
            },
            {"tag": "code", "match": "Request: show the first rows", "response": "df.head()"},
        ],
    }
    script_path = tmp_path / "script.json"
    script_path.write_text(json.dumps(script))
    result = runner.invoke(
        main,
        [
            "ask",
            "--dataset",
            str(students_csv),
            "--query",
            "show the first rows",
            "--gateway",
            f"mock:{script_path}",
        ],
    )
    assert result.exit_code == 0, result.output
    assert "route: code_generation" in result.output
    assert "df.head()" in result.output
    assert "kind=table" in result.output


def test_bench_subset_with_report(tmp_path, runner, monkeypatch):
    monkeypatch.setenv("TABCHAT_DATA_DIR", str(tmp_path / "data"))
    monkeypatch.setenv("TABCHAT_SANDBOX_WHITELIST", "pandas,numpy,matplotlib")
    from tabchat.bench.datasets import write_pack
    from tabchat.bench.suites import build_default_suite, save_suite

    pack = write_pack(tmp_path / "bench-data")
    tasks = [t for t in build_default_suite(pack) if t.id in ("students-10", "students-14")]
    suite_path = save_suite(tasks, tmp_path / "subset.jsonl")
    report_path = tmp_path / "report.json"

    result = runner.invoke(
        main,
        [
            "bench",
            "--suite",
            str(suite_path),
            "--gateway",
            "fixture:7b",
            "--datasets",
            str(tmp_path / "bench-data"),
            "--report",
            str(report_path),
            "--floor",
            "0.9",
        ],
    )
    assert result.exit_code == 0, result.output
    assert "overall: 2/2" in result.output
    doc = json.loads(report_path.read_text())
    assert doc["summary"]["overall_correct"] == 2
    assert "latency" in doc


def test_bench_floor_failure_exit_code(tmp_path, runner, monkeypatch):
    monkeypatch.setenv("TABCHAT_DATA_DIR", str(tmp_path / "data"))
    from tabchat.bench.datasets import write_pack
    from tabchat.bench.suites import build_default_suite, save_suite

    pack = write_pack(tmp_path / "bench-data")
    tasks = [t for t in build_default_suite(pack) if t.id == "students-14"]
    suite_path = save_suite(tasks, tmp_path / "one.jsonl")
    # empty mock: decision falls back to chat; narrative task still passes,
    # so force failure with an inverted decision default
    script_path = tmp_path / "inverted.json"
    script_path.write_text(
        json.dumps({"default": {"decision": '{"action": "code_generation"}', "code": "1"}})
    )
    result = runner.invoke(
        main,
        [
            "bench",
            "--suite",
            str(suite_path),
            "--gateway",
            f"mock:{script_path}",
            "--datasets",
            str(tmp_path / "bench-data"),
            "--floor",
            "0.5",
        ],
    )
    assert result.exit_code == 1
    assert "below floor" in result.output
