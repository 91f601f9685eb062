"""End-to-end tests for the command-line interface and its exit codes."""

from __future__ import annotations

import json

import pytest

from logquery.cli import EXIT_CODES, main
from logquery.templates import TemplateSet

from helpers import wrap_json

GOOD_CODE = (
    "import sys\n"
    "from collections import Counter\n"
    "hits = Counter(line.split()[0] for line in open(sys.argv[1]) if line.strip())\n"
    "for name in sorted(hits):\n"
    "    print(f'{name}\\t{hits[name]}')\n"
)


@pytest.fixture
def log_file(tmp_path):
    path = tmp_path / "app.log"
    path.write_text("web01 opened\nweb01 closed\ndb02 opened\n")
    return path


def _cassette(tmp_path, responses, name="cassette.jsonl"):
    path = tmp_path / name
    with open(path, "w") as out:
        for text in responses:
            out.write(json.dumps({"request_digest": "", "response_text": text}) + "\n")
    return path


def _query_args(log_file, cassette, *extra):
    return [
        "query",
        str(log_file),
        "--query",
        "How many lines per host?",
        "--columns",
        "host:string,count:integer",
        "--strategy",
        "none",
        "--transport",
        "stub",
        "--cassette",
        str(cassette),
        *extra,
    ]


class TestExitCodeTable:
    def test_documented_codes(self):
        assert EXIT_CODES == {
            "ok": 0,
            "unexpected": 1,
            "input": 2,
            "safety_rejected": 3,
            "exec_error": 4,
            "timeout": 5,
            "format_error": 6,
            "transport": 7,
        }

    def test_usage_errors_exit_two(self):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2
        with pytest.raises(SystemExit) as exc:
            main(["query", "somelog"])  # --query/--columns missing
        assert exc.value.code == 2


class TestTemplateCommand:
    def test_frequency_miner(self, log_file, tmp_path, capsys):
        out = tmp_path / "templates.jsonl"
        assert main(["template", str(log_file), "--out", str(out)]) == 0
        stderr = capsys.readouterr().err
        assert "templates in" in stderr
        loaded = TemplateSet.load(out)
        assert len(loaded) >= 1

    def test_drain_miner(self, log_file, tmp_path):
        out = tmp_path / "templates.jsonl"
        assert main(["template", str(log_file), "--miner", "drain3", "--out", str(out)]) == 0
        assert out.exists()

    def test_missing_log_is_input_error(self, tmp_path, capsys):
        rc = main(["template", str(tmp_path / "gone.log"), "--out", str(tmp_path / "t.jsonl")])
        assert rc == 2
        assert "error" in capsys.readouterr().err


class TestQueryCommand:
    def test_happy_path_prints_rows(self, log_file, tmp_path, capsys):
        cassette = _cassette(tmp_path, [wrap_json("python", GOOD_CODE)])
        rc = main(_query_args(log_file, cassette))
        captured = capsys.readouterr()
        assert rc == 0
        assert captured.out == "db02\t1\nweb01\t2\n"
        assert "2 rows in 1 attempt(s)" in captured.err

    def test_trace_out_writes_attempts(self, log_file, tmp_path):
        cassette = _cassette(tmp_path, [wrap_json("python", GOOD_CODE)])
        trace = tmp_path / "trace.jsonl"
        rc = main(_query_args(log_file, cassette, "--trace-out", str(trace)))
        assert rc == 0
        records = [json.loads(line) for line in trace.read_text().splitlines()]
        assert len(records) == 1
        assert records[0]["status"] == "ok"
        assert records[0]["code"] == GOOD_CODE

    def test_safety_rejection_exit_code(self, log_file, tmp_path, capsys):
        unsafe = "import subprocess, sys\n_ = sys.argv[1]\n"
        cassette = _cassette(tmp_path, [wrap_json("python", unsafe)])
        rc = main(_query_args(log_file, cassette, "--max-retries", "0"))
        assert rc == 3
        assert "safety_rejected" in capsys.readouterr().err

    def test_timeout_exit_code(self, log_file, tmp_path):
        slow = "import sys, time\n_ = sys.argv[1]\ntime.sleep(30)\n"
        cassette = _cassette(tmp_path, [wrap_json("python", slow)])
        rc = main(_query_args(log_file, cassette, "--max-retries", "0", "--timeout", "1.0"))
        assert rc == 5

    def test_format_violation_exit_code(self, log_file, tmp_path):
        bad = "import sys\n_ = sys.argv[1]\nprint('one-column-only')\n"
        cassette = _cassette(tmp_path, [wrap_json("python", bad)])
        rc = main(_query_args(log_file, cassette, "--max-retries", "0"))
        assert rc == 6

    def test_unparseable_response_exit_code(self, log_file, tmp_path):
        cassette = _cassette(tmp_path, ["Sorry, I have no idea."])
        rc = main(_query_args(log_file, cassette, "--max-retries", "0"))
        assert rc == 4

    def test_crashing_script_exit_code(self, log_file, tmp_path):
        crash = "import sys\n_ = sys.argv[1]\nraise ValueError('nope')\n"
        cassette = _cassette(tmp_path, [wrap_json("python", crash)])
        rc = main(_query_args(log_file, cassette, "--max-retries", "0"))
        assert rc == 4

    def test_replay_miss_exit_code(self, log_file, tmp_path, capsys):
        cassette = _cassette(tmp_path, [wrap_json("python", GOOD_CODE)])
        args = _query_args(log_file, cassette)
        args[args.index("stub")] = "replay"  # digests will not match
        rc = main(args)
        assert rc == 7
        assert "transport error" in capsys.readouterr().err

    def test_stub_without_cassette_is_input_error(self, log_file):
        args = _query_args(log_file, "unused.jsonl")
        idx = args.index("--cassette")
        del args[idx : idx + 2]
        assert main(args) == 2

    def test_missing_log_is_input_error(self, tmp_path):
        cassette = _cassette(tmp_path, [wrap_json("python", GOOD_CODE)])
        assert main(_query_args(tmp_path / "gone.log", cassette)) == 2

    def test_bad_columns_spec_is_input_error(self, log_file, tmp_path, capsys):
        cassette = _cassette(tmp_path, [wrap_json("python", GOOD_CODE)])
        args = _query_args(log_file, cassette)
        args[args.index("host:string,count:integer")] = "host string"
        assert main(args) == 2
        assert "name:dtype" in capsys.readouterr().err

    def test_retry_loop_reaches_success_through_cli(self, log_file, tmp_path, capsys):
        crash = "import sys\n_ = sys.argv[1]\nraise ValueError('first try')\n"
        cassette = _cassette(tmp_path, [wrap_json("python", crash), wrap_json("python", GOOD_CODE)])
        rc = main(_query_args(log_file, cassette, "--max-retries", "1"))
        captured = capsys.readouterr()
        assert rc == 0
        assert "2 attempt(s)" in captured.err

    def test_config_file_layer(self, log_file, tmp_path, capsys):
        conf = tmp_path / "logquery.conf"
        conf.write_text("max_retries=0\nstrategy=none\n")
        cassette = _cassette(tmp_path, [wrap_json("python", GOOD_CODE)])
        args = [
            "query",
            str(log_file),
            "--query",
            "How many lines per host?",
            "--columns",
            "host:string,count:integer",
            "--config",
            str(conf),
            "--transport",
            "stub",
            "--cassette",
            str(cassette),
        ]
        assert main(args) == 0
        assert capsys.readouterr().out == "db02\t1\nweb01\t2\n"

    def test_unknown_config_key_is_input_error(self, log_file, tmp_path):
        conf = tmp_path / "logquery.conf"
        conf.write_text("retries=0\n")
        cassette = _cassette(tmp_path, [wrap_json("python", GOOD_CODE)])
        assert main(_query_args(log_file, cassette, "--config", str(conf))) == 2


class TestEvalCommand:
    @pytest.fixture
    def corpus(self, tmp_path):
        logs = tmp_path / "logs"
        logs.mkdir()
        (logs / "a.log").write_text("web01 opened\nweb01 closed\ndb02 opened\n")
        (logs / "b.log").write_text("app03 start\napp03 stop\napp03 crash\n")
        bench = tmp_path / "bench.jsonl"
        columns = [{"name": "host", "dtype": "string"}, {"name": "count", "dtype": "integer"}]
        records = [
            {"id": "q-a", "tier": "simple", "kind": "select", "text": "Count per host.",
             "columns": columns, "log": "logs/a.log"},
            {"id": "q-b", "tier": "simple", "kind": "select", "text": "Count per host.",
             "columns": columns, "log": "logs/b.log"},
        ]
        bench.write_text("".join(json.dumps(r) + "\n" for r in records))
        truth = tmp_path / "truth.jsonl"
        truth.write_text(
            json.dumps({"query_id": "q-a", "must_contain": ["web01 2", "db02 1"]}) + "\n"
            + json.dumps({"query_id": "q-b", "must_contain": ["app03 3"]}) + "\n"
        )
        return bench, truth

    def _eval_args(self, bench, truth, out, cassette, *extra):
        return [
            "eval", str(bench), str(truth),
            "--out", str(out),
            "--strategy", "none",
            "--transport", "stub",
            "--cassette", str(cassette),
            "--max-retries", "0",
            *extra,
        ]

    def test_batch_with_stats(self, corpus, tmp_path, capsys):
        bench, truth = corpus
        cassette = _cassette(tmp_path, [wrap_json("python", GOOD_CODE)] * 4)
        out = tmp_path / "results.jsonl"
        rc = main(self._eval_args(bench, truth, out, cassette, "--runs", "2"))
        stderr = capsys.readouterr().err
        assert rc == 0
        assert "strict: macro_f1=1.000 median_sigma=0.000" in stderr
        assert "lenient: macro_f1=1.000" in stderr
        records = [json.loads(line) for line in out.read_text().splitlines()]
        assert [r["record"] for r in records] == ["run"] * 4 + ["query"] * 4 + ["summary"] * 2

    def test_single_run_skips_stats(self, corpus, tmp_path, capsys):
        bench, truth = corpus
        cassette = _cassette(tmp_path, [wrap_json("python", GOOD_CODE)] * 2)
        out = tmp_path / "results.jsonl"
        rc = main(self._eval_args(bench, truth, out, cassette, "--runs", "1"))
        stderr = capsys.readouterr().err
        assert rc == 0
        assert "macro_f1" not in stderr
        assert "results ->" in stderr

    def test_parallel_jobs(self, corpus, tmp_path):
        bench, truth = corpus
        cassette = _cassette(tmp_path, [wrap_json("python", GOOD_CODE)] * 4)
        out = tmp_path / "results.jsonl"
        assert main(self._eval_args(bench, truth, out, cassette, "--runs", "2", "--jobs", "4")) == 0

    def test_missing_truth_is_input_error(self, corpus, tmp_path):
        bench, truth = corpus
        truth.write_text(json.dumps({"query_id": "q-a", "must_contain": ["web01 2"]}) + "\n")
        cassette = _cassette(tmp_path, [wrap_json("python", GOOD_CODE)] * 2)
        rc = main(self._eval_args(bench, truth, tmp_path / "r.jsonl", cassette))
        assert rc == 2


class TestScoreCommand:
    @pytest.fixture
    def truth_file(self, tmp_path):
        path = tmp_path / "truth.jsonl"
        path.write_text(
            json.dumps({"query_id": "q", "must_contain": ["a", "b", "c"], "may_contain": ["m"]}) + "\n"
        )
        return path

    def test_strict_report(self, truth_file, tmp_path, capsys):
        returned = tmp_path / "rows.txt"
        returned.write_text("a\nb\nx\n")
        rc = main(["score", str(returned), str(truth_file), "--query-id", "q"])
        assert rc == 0
        out = capsys.readouterr().out
        assert out == "tp=2 fp=1 fn=1 precision=0.667 recall=0.667 f1=0.667\n"

    def test_lenient_mode(self, truth_file, tmp_path, capsys):
        returned = tmp_path / "rows.txt"
        returned.write_text("a\nb\nc\nm\n")
        rc = main(["score", str(returned), str(truth_file), "--query-id", "q", "--mode", "lenient"])
        assert rc == 0
        assert "f1=1.000" in capsys.readouterr().out

    def test_neutral_may_flag(self, truth_file, tmp_path, capsys):
        returned = tmp_path / "rows.txt"
        returned.write_text("a\nb\nc\nm\n")
        rc = main(["score", str(returned), str(truth_file), "--query-id", "q", "--neutral-may"])
        assert rc == 0
        assert "f1=1.000" in capsys.readouterr().out

    def test_unknown_query_id(self, truth_file, tmp_path, capsys):
        returned = tmp_path / "rows.txt"
        returned.write_text("a\n")
        rc = main(["score", str(returned), str(truth_file), "--query-id", "mystery"])
        assert rc == 2
        assert "unknown query id" in capsys.readouterr().err

    def test_missing_rows_file(self, truth_file, tmp_path):
        rc = main(["score", str(tmp_path / "gone.txt"), str(truth_file), "--query-id", "q"])
        assert rc == 2
