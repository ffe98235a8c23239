"""Command-line entry points: simulate, compare, serve, export, gen-corpus.

Exit codes: 0 success, 2 configuration error, 3 provider failure.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from .domain import Provider, ProviderKind, Segment
from .errors import (
    BudgetZero,
    CorpusParseError,
    ProviderError,
    ProviderTimeout,
    ValidationFailure,
)
from .learner import Hyperparams
from .providers import MockLlmJudge
from .service import AnnotationService, ServiceConfig
from .simulate import SimulationConfig, compare_strategies, generate_corpus, run_simulation
from .store import EventLog, export_corpus, read_log, replay

EXIT_CONFIG_ERROR = 2
EXIT_PROVIDER_FAILURE = 3


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    p = Path(path)
    try:
        if p.suffix == ".json":
            return json.loads(p.read_text(encoding="utf-8"))
        with open(p, "rb") as fh:
            return tomllib.load(fh)
    except Exception as exc:
        raise ValueError(f"cannot parse config {path}: {exc}") from exc


def _sim_config(raw: dict, **overrides) -> SimulationConfig:
    known = {f for f in SimulationConfig.__dataclass_fields__}
    merged = {k: v for k, v in raw.items() if k in known}
    merged.update({k: v for k, v in overrides.items() if v is not None})
    if "weights" in merged:
        merged["weights"] = tuple(merged["weights"])
    cfg = SimulationConfig(**merged)
    problems = cfg.validate()
    if problems:
        raise ValueError("; ".join(problems))
    return cfg


@click.group()
def main() -> None:
    """Human-in-the-loop MT post-editing loop."""


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@click.option("--strategy", type=str, default=None)
@click.option("--budget", type=int, default=None)
def simulate(config_path, out_dir, seed, strategy, budget):
    """Replay a corpus through the loop with a synthetic annotator."""
    try:
        cfg = _sim_config(
            _load_config(config_path), seed=seed, strategy=strategy, budget=budget
        )
        report = run_simulation(cfg, out_dir)
    except (CorpusParseError, BudgetZero, ValueError) as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG_ERROR)
    except (ProviderError, ProviderTimeout) as exc:
        click.echo(f"provider failure: {exc}", err=True)
        sys.exit(EXIT_PROVIDER_FAILURE)
    click.echo(
        f"simulated {report['human_annotations']} human annotations, "
        f"{report['pseudo']['labeled_count']} pseudo labels -> {out_dir}"
    )


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option(
    "--strategies",
    type=str,
    default="tripartite,random",
    help="Comma-separated strategy names.",
)
@click.option(
    "--seeds",
    type=str,
    default="5",
    help="Seed count (e.g. 5 -> seeds 0..4) or a comma-separated list.",
)
@click.option("--target", type=float, default=0.8)
@click.option("--out", "out_path", type=click.Path(), default=None)
def compare(config_path, strategies, seeds, target, out_path):
    """Annotations-to-target-accuracy comparison across strategies."""
    strategy_list = [s.strip() for s in strategies.split(",") if s.strip()]
    seed_list = (
        [int(s) for s in seeds.split(",")]
        if "," in seeds
        else list(range(int(seeds)))
    )
    try:
        cfg = _sim_config(_load_config(config_path))
        table = compare_strategies(cfg, strategy_list, seed_list, target)
    except (CorpusParseError, BudgetZero, ValueError) as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG_ERROR)
    except (ProviderError, ProviderTimeout) as exc:
        click.echo(f"provider failure: {exc}", err=True)
        sys.exit(EXIT_PROVIDER_FAILURE)
    rendered = json.dumps(table, sort_keys=True, indent=2)
    if out_path:
        Path(out_path).write_text(rendered + "\n", encoding="utf-8")
    click.echo(rendered)


@main.command()
@click.option("--n", "n_segments", type=int, default=500)
@click.option("--seed", type=int, default=0)
@click.option("--out", "out_path", type=click.Path(), required=True)
def gen_corpus(n_segments, seed, out_path):
    """Write a synthetic corpus with hidden references."""
    rows = generate_corpus(n_segments, seed, out_path)
    click.echo(f"wrote {len(rows)} segments to {out_path}")


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), required=True)
@click.option("--port", type=int, default=None)
def serve(config_path, port):
    """Run the HTTP service."""
    try:
        raw = _load_config(config_path)
        service, static_dir = build_service(raw)
    except (ValidationFailure, CorpusParseError, ValueError, KeyError) as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG_ERROR)

    from .api import create_app

    app = create_app(service, static_dir=static_dir)
    import uvicorn

    uvicorn.run(
        app, host=raw.get("host", "127.0.0.1"), port=port or int(raw.get("port", 8080))
    )


def build_service(raw: dict) -> tuple[AnnotationService, str | None]:
    """Wire a service from a config mapping (documented in the README)."""
    hp = raw.get("hyperparams", {})
    config = ServiceConfig(
        lease_ttl_seconds=float(raw.get("lease_ttl_seconds", 900.0)),
        batch_size=int(raw.get("batch_size", 1)),
        hyperparams=Hyperparams(
            float(hp.get("learning_rate", 0.05)), float(hp.get("l2", 1e-4))
        ),
        annotators=tuple(raw.get("annotators", ())),
        auth_token=raw.get("auth_token"),
    )
    providers = [
        Provider(
            id=p["id"],
            kind=ProviderKind(p.get("kind", "MT")),
            endpoint=p.get("endpoint", "mock:table"),
            display_name=p.get("display_name", p["id"]),
        )
        for p in raw.get("providers", [])
    ]
    hidden_refs = {}
    refs_path = raw.get("hidden_references_path")
    if refs_path:
        with open(refs_path, encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    row = json.loads(line)
                    hidden_refs[row["source"]] = row["reference"]
    judge = MockLlmJudge(hidden_refs)

    log = EventLog(raw.get("log_path", "events.ndjson.log"))
    service = AnnotationService(log, judge, config, providers=providers)

    ingest_path = raw.get("ingest_path")
    if ingest_path:
        known = {seg_id for seg_id in service.state.segments}
        with open(ingest_path, encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                seg = Segment.from_dict(json.loads(line))
                if seg.id not in known:
                    service.ingest_segment(seg)
    return service, raw.get("static_dir")


@main.command()
@click.option("--log", "log_path", type=click.Path(exists=True), required=True)
@click.option("--out", "out_path", type=click.Path(), required=True)
def export(log_path, out_path):
    """Replay an event log and export the labeled corpus as JSONL."""
    try:
        state = replay(read_log(log_path))
    except Exception as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG_ERROR)
    count = export_corpus(state, out_path)
    click.echo(f"exported {count} rows to {out_path}")


if __name__ == "__main__":
    main()
