"""Command line: serve the HTTP API, ask one-shot questions, run the bench."""

from __future__ import annotations

import base64
import json
import sys
import tempfile
from pathlib import Path

import click

from .config import EngineConfig, load_config
from .engine import Engine
from .gateway import HttpGateway, ScriptedGateway, load_script


def _build_gateway(spec: str | None, config: EngineConfig):
    """Gateway from a CLI spec: mock:<script.json> | http:<url> | fixture:<7b|1p5b>."""
    if spec:
        kind, _, rest = spec.partition(":")
        if kind == "mock":
            if not rest:
                return ScriptedGateway()
            return load_script(rest)
        if kind == "http":
            return HttpGateway(
                endpoint=rest,
                model=config.gateway_model or "default",
                api_key=config.gateway_api_key or None,
                timeout=config.gateway_timeout,
            )
        if kind == "fixture":
            from .bench.fixtures import fixture_gateway

            return fixture_gateway(rest or "7b")
        raise click.BadParameter(f"unknown gateway spec {spec!r}")
    if config.gateway_mode == "http":
        return HttpGateway(
            endpoint=config.gateway_endpoint,
            model=config.gateway_model or "default",
            api_key=config.gateway_api_key or None,
            timeout=config.gateway_timeout,
        )
    if config.gateway_script:
        return load_script(config.gateway_script)
    return ScriptedGateway()


def _load_config(path: str | None) -> EngineConfig:
    return load_config(path)


@click.group()
def main():
    """Conversational analytics over tabular files."""


@main.command()
@click.option("--port", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--gateway", "gateway_spec", default=None, help="mock:FILE | http:URL | fixture:STYLE")
@click.option("--ui", "ui_dir", type=click.Path(exists=True), default=None, help="serve this directory at /ui")
def serve(port: int, host: str, config_path: str | None, gateway_spec: str | None, ui_dir: str | None):
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    config = _load_config(config_path)
    engine = Engine(config, _build_gateway(gateway_spec, config))
    uvicorn.run(create_app(engine, ui_dir=ui_dir), host=host, port=port)


@main.command()
@click.option("--dataset", "dataset_path", type=click.Path(exists=True), required=True)
@click.option("--query", required=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--gateway", "gateway_spec", default=None)
@click.option("--save-figure", "figure_path", type=click.Path(), default=None)
@click.option("--audio-out", "audio_path", type=click.Path(), default=None)
def ask(dataset_path, query, config_path, gateway_spec, figure_path, audio_path):
    """One-shot: ingest a file, ask one question, print the outcome."""
    config = _load_config(config_path)
    engine = Engine(config, _build_gateway(gateway_spec, config))
    try:
        profile = engine.upload_dataset(
            Path(dataset_path).read_bytes(), Path(dataset_path).name
        )
        session_id = engine.create_session(profile.dataset_id)
        record = engine.handle_turn(
            session_id, text=query, want_audio=audio_path is not None
        )
        click.echo(f"route: {record.decision.action} (fallback={record.decision.fallback})")
        if record.code:
            click.echo("code:")
            click.echo(record.code)
        artifact = record.artifact
        if artifact is not None:
            click.echo(f"artifact: status={artifact.status} kind={artifact.kind}")
            if artifact.kind == "figure" and figure_path:
                Path(figure_path).write_bytes(base64.b64decode(artifact.payload))
                click.echo(f"figure written to {figure_path}")
            elif artifact.kind in ("table", "scalar", "text"):
                click.echo(json.dumps(artifact.payload, indent=2, default=str))
        if record.narration:
            click.echo(f"narration: {record.narration}")
        if record.audio_ref and audio_path:
            data, _ = engine.store.load_artifact(record.audio_ref)
            Path(audio_path).write_bytes(data)
            click.echo(f"audio written to {audio_path}")
        click.echo(f"timings: {record.timings.to_dict()}")
    finally:
        engine.shutdown()


@main.command()
@click.option("--suite", "suite_path", type=click.Path(exists=True), default=None)
@click.option("--gateway", "gateway_spec", default="fixture:7b", show_default=True)
@click.option("--datasets", "datasets_dir", type=click.Path(), default=None)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--report", "report_path", type=click.Path(), default=None)
@click.option("--floor", type=float, default=0.0, help="fail when overall accuracy is below this fraction")
def bench(suite_path, gateway_spec, datasets_dir, config_path, report_path, floor):
    """Run a task suite end-to-end and print the score table."""
    from .bench.datasets import write_pack
    from .bench.fixtures import fixture_gateway, profiles_for
    from .bench.runner import run_suite
    from .bench.suites import build_default_suite, load_suite

    config = _load_config(config_path)

    if datasets_dir is None:
        datasets_dir = tempfile.mkdtemp(prefix="tabchat-bench-")
    paths = write_pack(datasets_dir)
    tasks = load_suite(suite_path) if suite_path else build_default_suite(paths)

    if gateway_spec and gateway_spec.startswith("fixture:"):
        style = gateway_spec.partition(":")[2] or "7b"
        gateway = fixture_gateway(style, profiles_for(paths))
    else:
        gateway = _build_gateway(gateway_spec, config)

    engine = Engine(config, gateway)
    try:
        dataset_ids = {}
        for name, path in paths.items():
            profile = engine.upload_dataset(path.read_bytes(), name)
            dataset_ids[name] = profile.dataset_id
        report = run_suite(tasks, engine, dataset_ids)
    finally:
        engine.shutdown()

    click.echo(report.render_table())
    if report_path:
        Path(report_path).write_text(
            json.dumps(report.to_document(), indent=2), encoding="utf-8"
        )
        click.echo(f"report written to {report_path}")
    if report.overall_fraction < floor:
        click.echo(f"accuracy {report.overall_fraction:.3f} below floor {floor:.3f}")
        sys.exit(1)


if __name__ == "__main__":
    main()
