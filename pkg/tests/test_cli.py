"""CLI commands, config parsing, and exit codes."""

import json

import pytest
from click.testing import CliRunner

from mtloop.cli import main
from mtloop.store import read_log, replay


@pytest.fixture
def runner():
    return CliRunner()


def write_sim_config(path, **overrides):
    cfg = {
        "n_segments": 50,
        "n_providers": 4,
        "seed": 3,
        "budget": 10,
        "tau": 0.8,
        "strategy": "tripartite",
        "eval_every": 5,
    }
    cfg.update(overrides)
    path.write_text(json.dumps(cfg))
    return path


class TestSimulate:
    def test_runs_and_writes_report(self, runner, tmp_path):
        config = write_sim_config(tmp_path / "sim.json")
        out = tmp_path / "out"
        result = runner.invoke(
            main, ["simulate", "--config", str(config), "--out", str(out)]
        )
        assert result.exit_code == 0, result.output
        assert (out / "report.json").exists()
        report = json.loads((out / "report.json").read_text())
        assert report["human_annotations"] == 10

    def test_toml_config(self, runner, tmp_path):
        config = tmp_path / "sim.toml"
        config.write_text(
            'n_segments = 40\nn_providers = 4\nseed = 1\nbudget = 5\ntau = 0.9\n'
        )
        result = runner.invoke(
            main, ["simulate", "--config", str(config), "--out", str(tmp_path / "out")]
        )
        assert result.exit_code == 0, result.output

    def test_config_error_exit_code_2(self, runner, tmp_path):
        config = write_sim_config(tmp_path / "sim.json", n_providers=1)
        result = runner.invoke(
            main, ["simulate", "--config", str(config), "--out", str(tmp_path / "out")]
        )
        assert result.exit_code == 2
        assert not (tmp_path / "out" / "report.json").exists()

    def test_bad_corpus_exit_code_2(self, runner, tmp_path):
        corpus = tmp_path / "corpus.jsonl"
        corpus.write_text("garbage\n")
        config = write_sim_config(tmp_path / "sim.json", corpus_path=str(corpus))
        result = runner.invoke(
            main, ["simulate", "--config", str(config), "--out", str(tmp_path / "out")]
        )
        assert result.exit_code == 2

    def test_seed_override(self, runner, tmp_path):
        config = write_sim_config(tmp_path / "sim.json")
        out_a = tmp_path / "a"
        out_b = tmp_path / "b"
        runner.invoke(main, ["simulate", "--config", str(config), "--out", str(out_a)])
        runner.invoke(
            main,
            ["simulate", "--config", str(config), "--out", str(out_b), "--seed", "99"],
        )
        assert (out_a / "report.json").read_text() != (out_b / "report.json").read_text()


class TestGenCorpus:
    def test_writes_jsonl(self, runner, tmp_path):
        out = tmp_path / "corpus.jsonl"
        result = runner.invoke(
            main, ["gen-corpus", "--n", "25", "--seed", "7", "--out", str(out)]
        )
        assert result.exit_code == 0
        assert len(out.read_text().splitlines()) == 25


class TestCompare:
    def test_compare_outputs_table(self, runner, tmp_path):
        config = write_sim_config(tmp_path / "sim.json", budget=15)
        result = runner.invoke(
            main,
            [
                "compare",
                "--config",
                str(config),
                "--strategies",
                "tripartite,random",
                "--seeds",
                "3",
                "--target",
                "0.5",
                "--out",
                str(tmp_path / "table.json"),
            ],
        )
        assert result.exit_code == 0, result.output
        table = json.loads((tmp_path / "table.json").read_text())
        assert [row["strategy"] for row in table["rows"]] == ["tripartite", "random"]
        assert table["seeds"] == [0, 1, 2]

    def test_seed_list_form(self, runner, tmp_path):
        config = write_sim_config(tmp_path / "sim.json", budget=5)
        result = runner.invoke(
            main,
            [
                "compare",
                "--config",
                str(config),
                "--strategies",
                "tripartite,random",
                "--seeds",
                "2,4,6",
                "--target",
                "1.01",
            ],
        )
        assert result.exit_code == 0, result.output
        assert json.loads(result.output)["seeds"] == [2, 4, 6]


class TestExport:
    def test_export_from_simulation_log(self, runner, tmp_path):
        config = write_sim_config(tmp_path / "sim.json", tau=0.0)
        out = tmp_path / "out"
        runner.invoke(main, ["simulate", "--config", str(config), "--out", str(out)])
        corpus = tmp_path / "corpus.jsonl"
        result = runner.invoke(
            main,
            ["export", "--log", str(out / "events.ndjson.log"), "--out", str(corpus)],
        )
        assert result.exit_code == 0, result.output
        rows = [json.loads(line) for line in corpus.read_text().splitlines()]
        state = replay(read_log(out / "events.ndjson.log"))
        labeled = [
            s
            for s in state.segments.values()
            if s.status.value in ("AutoLabeled", "HumanLabeled")
        ]
        assert len(rows) == len(labeled)
        assert {r["provenance"] for r in rows} <= {"human", "pseudo"}


class TestServeConfig:
    def test_build_service_from_config(self, tmp_path):
        from mtloop.cli import build_service

        ingest = tmp_path / "segments.jsonl"
        ingest.write_text(
            json.dumps(
                {
                    "id": "s1",
                    "source_text": "hello",
                    "source_lang": "en",
                    "target_lang": "de",
                    "hypotheses": [{"provider_id": "mt-0", "text": "hallo"}],
                    "status": "Pending",
                    "topic": None,
                }
            )
            + "\n"
        )
        refs = tmp_path / "refs.jsonl"
        refs.write_text(json.dumps({"source": "hello", "reference": "hallo"}) + "\n")
        service, static_dir = build_service(
            {
                "log_path": str(tmp_path / "events.ndjson.log"),
                "ingest_path": str(ingest),
                "hidden_references_path": str(refs),
                "annotators": ["alice"],
                "lease_ttl_seconds": 60,
                "providers": [{"id": "mt-0", "kind": "MT", "display_name": "Mock"}],
            }
        )
        assert static_dir is None
        assert set(service.state.segments) == {"s1"}
        assert service.providers["mt-0"].display_name == "Mock"
        # ingest is idempotent across restarts: rebuilding skips known ids
        service2, _ = build_service(
            {
                "log_path": str(tmp_path / "events.ndjson.log"),
                "ingest_path": str(ingest),
                "annotators": ["alice"],
            }
        )
        assert len(service2.state.segments) == 1
