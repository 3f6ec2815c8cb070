"""Acceptance suite: one test per criterion, one PASS/FAIL line each.

Run with `pytest tests/test_acceptance.py -v -s`. Everything uses the
scripted mock gateway; no live model, ASR or TTS service is touched.
"""

from __future__ import annotations

import base64
import io
import socket
import threading
import time
from contextlib import contextmanager

import pytest

from tabchat.bench.datasets import write_insurance, write_pack
from tabchat.bench.fixtures import fixture_gateway, profiles_for
from tabchat.bench.runner import run_suite
from tabchat.bench.suites import build_default_suite
from tabchat.config import EngineConfig
from tabchat.context import align_terms, build_context_pack
from tabchat.dialogue import StageTimings, TurnRecord, compute_model_only_time, model_only_time
from tabchat.engine import Engine
from tabchat.gateway import ScriptedGateway, ScriptRule
from tabchat.profiling import Caps, ColumnProfile, DatasetProfile, ingest_dataset
from tabchat.router import Decision, decide
from tabchat.sandbox.policy import SandboxPolicy
from tabchat.sandbox.protocol import decode_response, encode_response
from tabchat.sandbox.supervisor import SandboxSupervisor

from conftest import STEP1_SNIPPET, STEP2_SNIPPET, STEP3_SNIPPET, code_rule
from test_protocol import random_result

POLICY = SandboxPolicy(whitelist=("pandas", "numpy", "matplotlib"), timeout=15.0)


@contextmanager
def criterion(name: str):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {name}: FAIL")
        raise
    print(f"ACCEPTANCE {name}: PASS")


# ---------------------------------------------------------------------------
# Routing contract
# ---------------------------------------------------------------------------


def test_routing_contract():
    columns = [
        ColumnProfile(name="age", kind="numeric", numeric_range=(18.0, 64.0)),
        ColumnProfile(name="charges", kind="numeric", numeric_range=(1e3, 6e4)),
        ColumnProfile(name="region", kind="categorical", exemplars=["north", "south"]),
    ]
    profile = DatasetProfile(
        dataset_id="d", name="demo", row_count=50, columns=columns, sample_rows=[]
    )
    pack = build_context_pack(profile, [], Caps())

    cases = [
        ("Show the distribution of ages", '{"action": "code_generation", "reason": "distribution"}', "code_generation", False),
        ("What columns does this dataset have?", '{"action": "chat_response", "reason": "schema"}', "chat_response", False),
        ("Plot a histogram of age", '{"action": "code_generation"}', "code_generation", False),
        ("Plot a PCA scatter of the features", '{"action": "code_generation"}', "code_generation", False),
        ("Plot average charges by region", "Could you clarify which chart you want?", "chat_response", True),
        ("Show me something interesting", '{"action": "code_generation"', "chat_response", True),
        ("Summarize the data", "Sure, let me explain the columns.", "chat_response", True),
        ("Describe the dataset", '{"action": "summarize"}', "chat_response", True),
        ("Plot age vs income", 'Here: {"action": "code_generation", "reason": "scatter"} done', "code_generation", False),
        ("chart the delays", '{"action": "  CODE_GENERATION  "}', "code_generation", False),
        ("", None, "chat_response", True),
        ("   ", None, "chat_response", True),
    ]
    rules = [
        ScriptRule(tag="decision", match=f"Request: {query}", response=completion)
        for query, completion, _, _ in cases
        if completion is not None and query.strip()
    ]
    gateway = ScriptedGateway(rules=rules, default="no rule matched")

    with criterion("routing contract (12 scripted queries)"):
        started = time.perf_counter()
        for query, _, expected_action, expected_fallback in cases:
            aligned = align_terms(query, profile)
            decision = decide(aligned.text, pack, gateway)
            assert decision.action == expected_action, query
            assert decision.fallback == expected_fallback, query
        elapsed = time.perf_counter() - started
        assert elapsed < 1.0, f"routing set took {elapsed:.3f}s"


# ---------------------------------------------------------------------------
# Sandbox guardrails
# ---------------------------------------------------------------------------


class _CanaryListener:
    def __init__(self):
        self.sock = socket.socket()
        self.sock.bind(("127.0.0.1", 0))
        self.sock.listen(1)
        self.sock.settimeout(0.2)
        self.port = self.sock.getsockname()[1]
        self.hits = 0
        self._stop = False
        threading.Thread(target=self._run, daemon=True).start()

    def _run(self):
        while not self._stop:
            try:
                conn, _ = self.sock.accept()
                self.hits += 1
                conn.close()
            except socket.timeout:
                continue

    def stop(self):
        self._stop = True
        self.sock.close()


def _tree(root):
    return {p.relative_to(root): p.stat().st_size for p in root.rglob("*")}


def test_sandbox_guardrails(tmp_path):
    csv = write_insurance(tmp_path / "insurance.csv")
    policy = SandboxPolicy(
        whitelist=("pandas", "numpy", "matplotlib"), timeout=3.0, memory_limit=1024**3
    )
    sup = SandboxSupervisor(policy, lambda ref: str(csv))
    canary = _CanaryListener()
    before = _tree(tmp_path)

    corpus = [
        ("import sklearn.decomposition\n1", "blocked_import"),
        (f"open('{tmp_path}/evil.txt', 'w').write('x')", "runtime_error"),
        (f"import socket\nsocket.create_connection(('127.0.0.1', {canary.port}))", "blocked_import"),
        ("import subprocess\nsubprocess.run(['ls'])", "blocked_import"),
        ("while True: pass", "timeout"),
        ("x = bytearray(2 * 1024 ** 3)\nlen(x)", "resource_limit"),
    ]
    try:
        with criterion("sandbox guardrails (adversarial corpus)"):
            for snippet, expected in corpus:
                started = time.perf_counter()
                result = sup.execute("ins", snippet, session_id="adv")
                elapsed = time.perf_counter() - started
                assert result.status == expected, f"{snippet!r} -> {result.status}"
                assert elapsed < policy.timeout + 2.0, f"{snippet!r} took {elapsed:.2f}s"
            assert _tree(tmp_path) == before, "host filesystem was touched"
            assert canary.hits == 0, "sandbox reached the network"
    finally:
        canary.stop()
        sup.shutdown()


# ---------------------------------------------------------------------------
# Capture protocol
# ---------------------------------------------------------------------------


def test_capture_protocol(tmp_path):
    import random

    from PIL import Image

    with criterion("capture protocol (round trips + figure capture)"):
        rng = random.Random(811)
        for i in range(1000):
            result = random_result(rng)
            rid, decoded = decode_response(encode_response(f"f{i}", result))
            assert rid == f"f{i}" and decoded == result

        csv = write_insurance(tmp_path / "insurance.csv")
        sup = SandboxSupervisor(POLICY, lambda ref: str(csv))
        try:
            result = sup.execute("ins", STEP1_SNIPPET, session_id="fig")
        finally:
            sup.shutdown()
        assert result.status == "ok" and result.kind == "figure"
        assert result.axes["title"] and result.axes["x_label"] and result.axes["y_label"]
        png = base64.b64decode(result.payload)
        image = Image.open(io.BytesIO(png))
        image.verify()  # decodes as a real PNG
        assert image.format == "PNG"


# ---------------------------------------------------------------------------
# Latency formula
# ---------------------------------------------------------------------------


def _synthetic_records():
    records = []
    for i in range(1, 14):
        records.append(
            TurnRecord(
                turn_id=f"c{i}",
                input_text="q",
                input_origin="text",
                decision=Decision(action="code_generation"),
                timings=StageTimings(t_dec=0.03 * i, t_code=0.4 + 0.02 * i, t_exec=1.0),
            )
        )
    for i in range(1, 4):
        records.append(
            TurnRecord(
                turn_id=f"h{i}",
                input_text="q",
                input_origin="text",
                decision=Decision(action="chat_response"),
                timings=StageTimings(t_dec=0.05 * i, t_chat=0.8 + 0.1 * i, t_tts=2.5 + 0.2 * i),
            )
        )
    return records


def test_latency_formula_and_students_reconstruction():
    with criterion("latency formula (synthetic 1e-9 + Students reconstruction)"):
        records = _synthetic_records()
        report = compute_model_only_time(records)

        dec = [r.timings.t_dec for r in records]
        code = [r.timings.t_code for r in records if r.timings.t_code is not None]
        chat = [r.timings.t_chat for r in records if r.timings.t_chat is not None]
        tts = [r.timings.t_tts for r in records if r.timings.t_tts is not None]
        expected = (sum(dec) / len(dec)) + (
            (sum(code) / len(code)) * len(code)
            + ((sum(chat) / len(chat)) + (sum(tts) / len(tts))) * len(chat)
        ) / (len(code) + len(chat))
        assert abs(report.t_model - expected) <= 1e-9

        # Students row, reconstructed 13 code / 3 chat split
        students = model_only_time(0.43, 0.56, 1.01, 2.96, 13, 3)
        assert abs(students - 1.629375) <= 1e-9  # hand-computed
        assert abs(round(students * 100) - 164) <= 1  # within 0.01 of 1.64

        # Flights divergence is documented, not asserted
        flights = model_only_time(0.32, 0.57, 0.45, 1.13, 13, 3)
        print(
            f"documented divergence: flights reconstruction {flights:.4f} "
            "vs published 1.15"
        )


def test_latency_products_reconstruction():
    """Published stage means + the 13/3 split must land on 1.33 s +/- 0.005.

    The formula puts this at 0.30 + (0.69*13 + (0.66+1.78)*3)/16 = 1.318125,
    which misses the +/-0.005 band around 1.33; recorded as a divergence in
    the build notes, asserted here as stated.
    """
    with criterion("latency formula (Products reconstruction, documented divergence)"):
        products = model_only_time(0.30, 0.69, 0.66, 1.78, 13, 3)
        assert abs(products - 1.318125) <= 1e-9  # hand-computed value of the formula
        assert abs(products - 1.33) <= 0.005, (
            f"formula yields {products:.6f}; the published 1.33 is not "
            "reproducible within +/-0.005 from the published stage means"
        )


# ---------------------------------------------------------------------------
# Benchmark bookkeeping
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def bench_setup(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("accept-bench")
    pack = write_pack(tmp / "data")
    suite = build_default_suite(pack)
    profiles = profiles_for({k: str(v) for k, v in pack.items()})
    return tmp, pack, suite, profiles


def _replay(tmp, pack, suite, gateway, run_tag):
    config = EngineConfig(data_dir=str(tmp / f"engine-{run_tag}"), policy=POLICY)
    engine = Engine(config, gateway)
    try:
        dataset_ids = {}
        for name, path in pack.items():
            dataset_ids[name] = engine.upload_dataset(path.read_bytes(), name).dataset_id
        return run_suite(suite, engine, dataset_ids)
    finally:
        engine.shutdown()


def test_benchmark_bookkeeping(bench_setup):
    tmp, pack, suite, profiles = bench_setup
    with criterion("benchmark bookkeeping (7B and 1.5B fixture replays)"):
        first = _replay(tmp, pack, suite, fixture_gateway("7b", profiles), "7b-a")
        assert first.code_correct == 37 and first.code_total == 39
        assert first.chat_correct == 9 and first.chat_total == 9
        assert first.misclassifications == 1
        assert first.exec_errors == 1
        assert first.overall_correct == 46 and first.overall_total == 48
        assert round(100 * first.overall_fraction, 1) == 95.8

        second = _replay(tmp, pack, suite, fixture_gateway("7b", profiles), "7b-b")
        assert second.scoring_document() == first.scoring_document()  # byte-identical

        small = _replay(tmp, pack, suite, fixture_gateway("1p5b", profiles), "1p5b")
        assert small.misclassifications == 17
        assert round(100 * small.overall_fraction, 1) == 62.5
        assert small.code_correct == 21 and small.chat_correct == 9
        assert small.exec_errors == 1


# ---------------------------------------------------------------------------
# Memory continuity
# ---------------------------------------------------------------------------


def _refinement_rules(profile):
    def aligned(query):
        return align_terms(query, profile).text

    rules = []
    rules += code_rule(aligned("now add a regression line"), STEP3_SNIPPET)
    rules += code_rule(aligned("now color by smoker status"), STEP2_SNIPPET)
    rules += code_rule(aligned("Plot charges vs BMI"), STEP1_SNIPPET)
    return rules


def test_memory_continuity(tmp_path):
    csv = write_insurance(tmp_path / "insurance.csv")
    profile = ingest_dataset(csv.read_bytes(), "insurance")
    gateway = ScriptedGateway(
        rules=_refinement_rules(profile), default='{"action": "chat_response"}'
    )
    queries = [
        "Plot charges vs BMI",
        "now color by smoker status",
        "now add a regression line",
    ]
    step1_line = "plt.scatter(df['bmi'], df['charges'])"

    with criterion("memory continuity (three-turn refinement)"):
        config = EngineConfig(data_dir=str(tmp_path / "engine"), policy=POLICY)
        engine = Engine(config, gateway)
        try:
            dataset_id = engine.upload_dataset(csv.read_bytes(), "insurance").dataset_id
            session_id = engine.create_session(dataset_id)
            started = time.perf_counter()
            records = [engine.handle_turn(session_id, text=q) for q in queries]
            elapsed = time.perf_counter() - started
            assert elapsed < 5.0, f"three turns took {elapsed:.2f}s"

            first, second, third = records
            assert first.artifact.kind == "figure"
            assert step1_line in second.prompt_used["user_text"]
            assert step1_line in third.prompt_used["user_text"]
            assert "c=df['smoker']" in third.prompt_used["user_text"]
            assert third.artifact.axes["title"] == "Charges vs BMI by Smoker Status"

            # N=1: the third prompt carries only the second turn
            short_id = engine.create_session(dataset_id, memory_capacity=1)
            short_records = [engine.handle_turn(short_id, text=q) for q in queries]
            prompt = short_records[2].prompt_used["user_text"]
            assert "c=df['smoker']" in prompt  # turn 2 present
            assert step1_line not in prompt  # turn 1 evicted
            assert "user: Plot charges vs bmi" not in prompt
        finally:
            engine.shutdown()


# ---------------------------------------------------------------------------
# Ingestion
# ---------------------------------------------------------------------------


def test_ingestion_mini_pack(tmp_path):
    import csv as csv_mod

    with criterion("ingestion (mini pack shapes + exact numeric ranges)"):
        pack = write_pack(tmp_path / "data")
        expected_columns = {"products": 94, "students": 8, "flights": 29}
        for name, path in pack.items():
            profile = ingest_dataset(path.read_bytes(), name)
            assert len(profile.columns) == expected_columns[name], name

            # brute-force oracle straight off the file
            with open(path, newline="", encoding="utf-8") as fh:
                rows = list(csv_mod.reader(fh))
            header, body = rows[0], rows[1:]
            assert profile.row_count == len(body)
            for idx, col_name in enumerate(header):
                col = profile.column(col_name)
                values = []
                all_numeric = True
                for row in body:
                    cell = row[idx].strip()
                    if cell in ("", "NA"):
                        continue
                    try:
                        values.append(float(cell))
                    except ValueError:
                        all_numeric = False
                        break
                if all_numeric and values:
                    assert col.kind == "numeric", f"{name}:{col_name}"
                    assert col.numeric_range == (min(values), max(values)), (
                        f"{name}:{col_name}"
                    )
