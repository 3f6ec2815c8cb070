"""Shared fixtures: miniature datasets, scripted gateways, engine factory."""

from __future__ import annotations

import dataclasses

import pytest

from tabchat.bench.datasets import write_insurance, write_students
from tabchat.config import EngineConfig
from tabchat.engine import Engine
from tabchat.gateway import ScriptedGateway, ScriptRule
from tabchat.profiling import Caps
from tabchat.sandbox.policy import SandboxPolicy

FAST_POLICY = SandboxPolicy(whitelist=("pandas", "numpy", "matplotlib"), timeout=10.0)

STEP1_SNIPPET = (
    "plt.scatter(df['bmi'], df['charges'])\n"
    "plt.xlabel('BMI')\n"
    "plt.ylabel('Charges')\n"
    "plt.title('Charges vs BMI')\n"
    "plt.show()"
)

STEP2_SNIPPET = (
    "plt.scatter(df['bmi'], df['charges'], "
    "c=df['smoker'].map({'yes': 'red', 'no': 'blue'}))\n"
    "plt.xlabel('BMI')\n"
    "plt.ylabel('Charges')\n"
    "plt.title('Charges vs BMI by Smoker Status')\n"
    "plt.legend(['Smoker', 'Non-Smoker'])\n"
    "plt.show()"
)

STEP3_SNIPPET = (
    "plt.scatter(df['bmi'], df['charges'], "
    "c=df['smoker'].map({'yes': 'red', 'no': 'blue'}))\n"
    "plt.xlabel('BMI')\n"
    "plt.ylabel('Charges')\n"
    "plt.title('Charges vs BMI by Smoker Status')\n"
    "x = df['bmi']\n"
    "y = df['charges']\n"
    "slope, intercept = np.polyfit(x, y, 1)\n"
    "plt.plot(x, slope * x + intercept, color='green')\n"
    "plt.legend(['Smoker', 'Non-Smoker', 'Regression Line'])\n"
    "plt.show()"
)


@pytest.fixture(scope="session")
def insurance_csv(tmp_path_factory):
    return write_insurance(tmp_path_factory.mktemp("data") / "insurance.csv")


@pytest.fixture(scope="session")
def students_csv(tmp_path_factory):
    return write_students(tmp_path_factory.mktemp("data") / "students.csv")


@pytest.fixture
def engine_factory(tmp_path):
    engines = []

    def make(
        gateway,
        policy: SandboxPolicy = FAST_POLICY,
        caps: Caps | None = None,
        memory_turns: int = 10,
    ) -> Engine:
        config = EngineConfig(
            data_dir=str(tmp_path / f"engine-{len(engines)}"),
            memory_turns=memory_turns,
            caps=caps or Caps(),
            policy=policy,
        )
        engine = Engine(config, gateway)
        engines.append(engine)
        return engine

    yield make
    for engine in engines:
        engine.shutdown()


def code_rule(query: str, snippet: str) -> list[ScriptRule]:
    anchor = f"Request: {query}"
    return [
        ScriptRule(
            tag="decision",
            match=anchor,
            response='{"action": "code_generation", "reason": "plot request"}',
        ),
        ScriptRule(tag="code", match=anchor, response=snippet),
    ]


def chat_rule(query: str, narration: str) -> list[ScriptRule]:
    anchor = f"Request: {query}"
    return [
        ScriptRule(
            tag="decision",
            match=anchor,
            response='{"action": "chat_response", "reason": "metadata question"}',
        ),
        ScriptRule(tag="chat", match=anchor, response=narration),
    ]


@pytest.fixture
def refinement_gateway(insurance_csv):
    """Scripted three-turn refinement: scatter, color by smoker, regression line.

    Anchors use the term-aligned query text (what the engine renders);
    later-turn rules come first so history echoes of earlier queries can
    never shadow them.
    """
    from tabchat.context import align_terms
    from tabchat.profiling import ingest_dataset

    profile = ingest_dataset(insurance_csv.read_bytes(), "insurance")

    def aligned(query: str) -> str:
        return align_terms(query, profile).text

    rules = []
    rules += code_rule(aligned("now add a regression line"), STEP3_SNIPPET)
    rules += code_rule(aligned("now color by smoker status"), STEP2_SNIPPET)
    rules += code_rule(aligned("Plot charges vs BMI"), STEP1_SNIPPET)
    return ScriptedGateway(rules=rules, default='{"action": "chat_response"}')


def fast_policy(**overrides) -> SandboxPolicy:
    return dataclasses.replace(FAST_POLICY, **overrides)
