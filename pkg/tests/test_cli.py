"""End-to-end command line tests driving ``main`` in process."""

from __future__ import annotations

import json
import re
import socket

import pytest

from ocrpc import ngram, providers
from ocrpc.cli import main

TOY_CORPUS = "the boy is driving his car\n\n" * 10


@pytest.fixture(scope="module")
def corpus_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "corpus.txt"
    path.write_text(TOY_CORPUS, encoding="utf-8")
    return path


@pytest.fixture(scope="module")
def model_file(tmp_path_factory, corpus_file):
    path = tmp_path_factory.mktemp("cli") / "toy.model"
    assert main(["train", str(corpus_file), "-o", str(path)]) == 0
    return path


def _fixture_file(tmp_path, mapping):
    path = tmp_path / "fixture.json"
    path.write_text(json.dumps(mapping), encoding="utf-8")
    return path


class TestTrain:
    def test_writes_model_and_summary(self, tmp_path, corpus_file, capsys):
        out = tmp_path / "m.model"
        assert main(["train", str(corpus_file), "-o", str(out)]) == 0
        err = capsys.readouterr().err
        assert "trained order-5 model" in err
        assert ngram.load(str(out)).order == 5

    def test_order_flag(self, tmp_path, corpus_file):
        out = tmp_path / "m.model"
        assert main(["train", str(corpus_file), "-o", str(out), "--order", "2"]) == 0
        assert ngram.load(str(out)).order == 2

    def test_rejects_bad_order(self, tmp_path, corpus_file, capsys):
        rc = main(["train", str(corpus_file), "-o", str(tmp_path / "m"), "--order", "0"])
        assert rc == 2
        assert "error:" in capsys.readouterr().err

    def test_empty_corpus_is_runtime_failure(self, tmp_path, capsys):
        corpus = tmp_path / "empty.txt"
        corpus.write_text("... --- ...\n", encoding="utf-8")
        assert main(["train", str(corpus), "-o", str(tmp_path / "m")]) == 1
        assert "error:" in capsys.readouterr().err

    def test_missing_corpus_is_runtime_failure(self, tmp_path):
        assert main(["train", str(tmp_path / "nope.txt"), "-o", str(tmp_path / "m")]) == 1

    def test_env_supplies_order(self, tmp_path, corpus_file, monkeypatch):
        monkeypatch.setenv("OCRPC_ORDER", "2")
        out = tmp_path / "m.model"
        assert main(["train", str(corpus_file), "-o", str(out)]) == 0
        assert ngram.load(str(out)).order == 2

    def test_flag_wins_over_env(self, tmp_path, corpus_file, monkeypatch):
        monkeypatch.setenv("OCRPC_ORDER", "2")
        out = tmp_path / "m.model"
        assert main(["train", str(corpus_file), "-o", str(out), "--order", "3"]) == 0
        assert ngram.load(str(out)).order == 3

    def test_bad_env_value_is_usage_error(self, tmp_path, corpus_file, monkeypatch):
        monkeypatch.setenv("OCRPC_ORDER", "five")
        assert main(["train", str(corpus_file), "-o", str(tmp_path / "m")]) == 2

    def test_bom_is_stripped(self, tmp_path):
        plain = tmp_path / "plain.txt"
        bom = tmp_path / "bom.txt"
        plain.write_text(TOY_CORPUS, encoding="utf-8")
        bom.write_text(TOY_CORPUS, encoding="utf-8-sig")
        out_a, out_b = tmp_path / "a.model", tmp_path / "b.model"
        assert main(["train", str(plain), "-o", str(out_a)]) == 0
        assert main(["train", str(bom), "-o", str(out_b)]) == 0
        assert out_a.read_bytes() == out_b.read_bytes()


class TestCorrect:
    def test_fixture_rewrite_preserves_casing(self, tmp_path, capsys):
        doc = tmp_path / "doc.txt"
        doc.write_text("Huw is your day", encoding="utf-8")
        fixture = _fixture_file(tmp_path, {"huw is your day": "how is your day"})
        out = tmp_path / "out.txt"
        rc = main(["correct", str(doc), "--provider", f"fixture:{fixture}", "-o", str(out)])
        assert rc == 0
        assert out.read_text(encoding="utf-8") == "How is your day"
        err = capsys.readouterr().err
        assert "blocks: 1" in err and "replaced: 1" in err

    def test_empty_fixture_is_identity(self, tmp_path):
        doc = tmp_path / "doc.txt"
        text = 'Some "original" TEXT,\n  spaced oddly -- kept.\n'
        doc.write_text(text, encoding="utf-8")
        fixture = _fixture_file(tmp_path, {})
        out = tmp_path / "out.txt"
        assert main(["correct", str(doc), "--provider", f"fixture:{fixture}", "-o", str(out)]) == 0
        assert out.read_text(encoding="utf-8") == text

    def test_stdout_is_default_output(self, tmp_path, capsys):
        doc = tmp_path / "doc.txt"
        doc.write_text("plain words here", encoding="utf-8")
        fixture = _fixture_file(tmp_path, {})
        assert main(["correct", str(doc), "--provider", f"fixture:{fixture}"]) == 0
        assert capsys.readouterr().out == "plain words here"

    def test_local_provider_end_to_end(self, tmp_path, model_file):
        doc = tmp_path / "doc.txt"
        doc.write_text("the boy is driving hus car", encoding="utf-8")
        out = tmp_path / "out.txt"
        rc = main(["correct", str(doc), "--provider", f"local:{model_file}", "-o", str(out)])
        assert rc == 0
        assert out.read_text(encoding="utf-8") == "the boy is driving his car"

    def test_parallel_output_matches_serial(self, tmp_path, model_file):
        doc = tmp_path / "doc.txt"
        doc.write_text("the boy is driving hus car\nthe hoy is driving his car\n" * 4, encoding="utf-8")
        serial, parallel = tmp_path / "serial.txt", tmp_path / "parallel.txt"
        base = ["correct", str(doc), "--provider", f"local:{model_file}"]
        assert main(base + ["-o", str(serial)]) == 0
        assert main(base + ["-o", str(parallel), "--parallelism", "8"]) == 0
        assert serial.read_bytes() == parallel.read_bytes()

    def test_block_size_flag(self, tmp_path):
        doc = tmp_path / "doc.txt"
        doc.write_text("aa bb cc dd", encoding="utf-8")
        fixture = _fixture_file(tmp_path, {"aa bb": "ax bx"})
        out = tmp_path / "out.txt"
        rc = main(["correct", str(doc), "--provider", f"fixture:{fixture}",
                   "-o", str(out), "--block-size", "2"])
        assert rc == 0
        assert out.read_text(encoding="utf-8") == "ax bx cc dd"

    def test_env_block_size(self, tmp_path, monkeypatch):
        monkeypatch.setenv("OCRPC_BLOCK_SIZE", "2")
        doc = tmp_path / "doc.txt"
        doc.write_text("aa bb cc dd", encoding="utf-8")
        fixture = _fixture_file(tmp_path, {"cc dd": "cx dx"})
        out = tmp_path / "out.txt"
        assert main(["correct", str(doc), "--provider", f"fixture:{fixture}", "-o", str(out)]) == 0
        assert out.read_text(encoding="utf-8") == "aa bb cx dx"

    def test_bad_block_size_is_usage_error(self, tmp_path):
        doc = tmp_path / "doc.txt"
        doc.write_text("words", encoding="utf-8")
        fixture = _fixture_file(tmp_path, {})
        rc = main(["correct", str(doc), "--provider", f"fixture:{fixture}", "--block-size", "0"])
        assert rc == 2

    @pytest.mark.parametrize("locator", ["bogus", "teleport:somewhere", "local:"])
    def test_bad_provider_locator_is_usage_error(self, tmp_path, locator):
        doc = tmp_path / "doc.txt"
        doc.write_text("words", encoding="utf-8")
        assert main(["correct", str(doc), "--provider", locator]) == 2

    def test_fixture_must_be_json_object(self, tmp_path):
        doc = tmp_path / "doc.txt"
        doc.write_text("words", encoding="utf-8")
        fixture = tmp_path / "fixture.json"
        fixture.write_text("[1, 2]", encoding="utf-8")
        assert main(["correct", str(doc), "--provider", f"fixture:{fixture}"]) == 2

    def test_fail_open_survives_dead_remote(self, tmp_path, capsys):
        with socket.socket() as probe:
            probe.bind(("127.0.0.1", 0))
            dead_port = probe.getsockname()[1]
        doc = tmp_path / "doc.txt"
        doc.write_text("five words in one block", encoding="utf-8")
        out = tmp_path / "out.txt"
        rc = main(["correct", str(doc), "--provider", f"remote:http://127.0.0.1:{dead_port}",
                   "-o", str(out)])
        assert rc == 0
        assert out.read_text(encoding="utf-8") == "five words in one block"
        assert "provider errors: 1" in capsys.readouterr().err

    def test_fail_closed_aborts_on_dead_remote(self, tmp_path, capsys):
        with socket.socket() as probe:
            probe.bind(("127.0.0.1", 0))
            dead_port = probe.getsockname()[1]
        doc = tmp_path / "doc.txt"
        doc.write_text("five words in one block", encoding="utf-8")
        rc = main(["correct", str(doc), "--provider", f"remote:http://127.0.0.1:{dead_port}",
                   "--fail-closed"])
        assert rc == 1
        assert "error:" in capsys.readouterr().err


class TestServe:
    def test_occupied_port_fails_cleanly(self, model_file, capsys):
        with socket.socket() as holder:
            holder.bind(("127.0.0.1", 0))
            holder.listen(1)
            port = holder.getsockname()[1]
            rc = main(["serve", str(model_file), "--bind", f"127.0.0.1:{port}"])
        assert rc == 1
        assert "error:" in capsys.readouterr().err

    def test_bad_bind_spec_is_usage_error(self, model_file):
        assert main(["serve", str(model_file), "--bind", "nonsense"]) == 2

    def test_cli_against_live_service_matches_local(self, tmp_path, model_file):
        doc = tmp_path / "doc.txt"
        doc.write_text("the boy is driving hus car\nthe hoy is driving his car\n", encoding="utf-8")
        local_out, remote_out = tmp_path / "local.txt", tmp_path / "remote.txt"
        assert main(["correct", str(doc), "--provider", f"local:{model_file}",
                     "-o", str(local_out)]) == 0
        with providers.serve(ngram.load(str(model_file))) as service:
            rc = main(["correct", str(doc), "--provider", f"remote:{service.url}",
                       "-o", str(remote_out)])
        assert rc == 0
        assert remote_out.read_bytes() == local_out.read_bytes()
        assert local_out.read_text(encoding="utf-8") == (
            "the boy is driving his car\nthe boy is driving his car\n"
        )


class TestNoise:
    def test_rate_zero_is_identity(self, tmp_path, capsys):
        doc = tmp_path / "doc.txt"
        doc.write_text("nothing should change here\n", encoding="utf-8")
        out = tmp_path / "out.txt"
        assert main(["noise", str(doc), "-o", str(out), "--rate", "0"]) == 0
        assert out.read_text(encoding="utf-8") == "nothing should change here\n"
        assert "corrupted 0 of 4 words" in capsys.readouterr().err

    def test_seed_determinism(self, tmp_path):
        doc = tmp_path / "doc.txt"
        doc.write_text(" ".join(f"word{i:02d}" for i in range(40)), encoding="utf-8")
        outs = [tmp_path / f"out{i}.txt" for i in range(3)]
        assert main(["noise", str(doc), "-o", str(outs[0]), "--rate", "0.3", "--seed", "9"]) == 0
        assert main(["noise", str(doc), "-o", str(outs[1]), "--rate", "0.3", "--seed", "9"]) == 0
        assert main(["noise", str(doc), "-o", str(outs[2]), "--rate", "0.3", "--seed", "10"]) == 0
        assert outs[0].read_bytes() == outs[1].read_bytes()
        assert outs[0].read_bytes() != outs[2].read_bytes()

    def test_edit_log_rows_match_reported_count(self, tmp_path, capsys):
        doc = tmp_path / "doc.txt"
        doc.write_text(" ".join(f"word{i:02d}" for i in range(40)), encoding="utf-8")
        log = tmp_path / "edits.tsv"
        assert main(["noise", str(doc), "-o", str(tmp_path / "out.txt"),
                     "--rate", "0.25", "--log", str(log)]) == 0
        match = re.search(r"corrupted (\d+) of 40 words", capsys.readouterr().err)
        assert match is not None
        rows = log.read_text(encoding="utf-8").splitlines()
        assert len(rows) == int(match.group(1)) == 10
        assert all(len(row.split("\t")) == 4 for row in rows)

    def test_bad_mix_is_usage_error(self, tmp_path):
        doc = tmp_path / "doc.txt"
        doc.write_text("some words here", encoding="utf-8")
        assert main(["noise", str(doc), "--mix", "1,2"]) == 2

    def test_bad_rate_is_usage_error(self, tmp_path):
        doc = tmp_path / "doc.txt"
        doc.write_text("some words here", encoding="utf-8")
        assert main(["noise", str(doc), "--rate", "-0.5"]) == 2


class TestEvaluate:
    @staticmethod
    def _triple(tmp_path, reference, ocr, corrected):
        paths = []
        for name, text in [("ref", reference), ("ocr", ocr), ("fixed", corrected)]:
            path = tmp_path / f"{name}.txt"
            path.write_text(text, encoding="utf-8")
            paths.append(str(path))
        return paths

    def test_identical_triple(self, tmp_path, capsys):
        paths = self._triple(tmp_path, "a b c", "a b c", "a b c")
        assert main(["evaluate", *paths]) == 0
        out = capsys.readouterr().out
        assert "errors: 0 -> 0" in out
        assert "error rate: 0.0% -> 0.0%" in out

    def test_documented_rates_and_improvement(self, tmp_path, capsys):
        reference = [f"w{i}" for i in range(126)]
        ocr = [f"x{i}" if i < 27 else w for i, w in enumerate(reference)]
        fixed = [f"y{i}" if i < 4 else w for i, w in enumerate(reference)]
        paths = self._triple(tmp_path, " ".join(reference), " ".join(ocr), " ".join(fixed))
        assert main(["evaluate", *paths]) == 0
        out = capsys.readouterr().out
        assert "words: 126" in out
        assert "errors: 27 -> 4" in out
        assert "error rate: 21.4% -> 3.1%" in out
        assert "6.9x from displayed rates" in out
        assert "corrected: 23, falsely corrected: 4, uncorrected: 0, newly introduced: 0" in out

    def test_json_report(self, tmp_path):
        reference = [f"w{i}" for i in range(64)]
        ocr = [f"x{i}" if i < 8 else w for i, w in enumerate(reference)]
        fixed = [f"y{i}" if i < 2 else w for i, w in enumerate(reference)]
        paths = self._triple(tmp_path, " ".join(reference), " ".join(ocr), " ".join(fixed))
        report_path = tmp_path / "report.json"
        assert main(["evaluate", *paths, "--json", str(report_path)]) == 0
        payload = json.loads(report_path.read_text(encoding="utf-8"))
        assert payload["total_words"] == 64
        assert payload["errors_before"] == 8
        assert payload["errors_after"] == 2
        assert payload["error_rate_before_display"] == "12.5%"
        assert payload["error_rate_after_display"] == "3.1%"
        assert payload["improvement_display"] == pytest.approx(4.03)
        assert payload["corrected"] == 6
        assert payload["falsely_corrected"] == 2
        assert len(payload["details"]) == 8

    def test_simulated_noise_round_trip(self, tmp_path, capsys):
        text = " ".join(f"word{i:02d}" for i in range(60))
        doc = tmp_path / "clean.txt"
        doc.write_text(text, encoding="utf-8")
        noisy = tmp_path / "noisy.txt"
        assert main(["noise", str(doc), "-o", str(noisy), "--rate", "0.2", "--seed", "3"]) == 0
        capsys.readouterr()
        assert main(["evaluate", str(doc), str(noisy), str(noisy)]) == 0
        out = capsys.readouterr().out
        assert "errors: 12 -> 12" in out
        assert "uncorrected: 12" in out

    def test_missing_file_is_runtime_failure(self, tmp_path):
        doc = tmp_path / "doc.txt"
        doc.write_text("a b c", encoding="utf-8")
        assert main(["evaluate", str(doc), str(doc), str(tmp_path / "gone.txt")]) == 1


class TestParser:
    def test_version_flag_exits_zero(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            main(["--version"])
        assert excinfo.value.code == 0
        assert "ocrpc" in capsys.readouterr().out

    def test_missing_command_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            main([])
        assert excinfo.value.code == 2
