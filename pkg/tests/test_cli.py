from __future__ import annotations

import json

import pytest

import support
from swing.cli import main
from swing.nli import save_matrix_cache
from swing.corpus_io import read_corpus

from swing.nli import EntailmentProbabilities


def _write_corpus(path, records):
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            obj = {
                "id": record.id,
                "dialogue": record.dialogue,
                "summary": record.reference_summary,
            }
            if record.generated_summary is not None:
                obj["generated_summary"] = record.generated_summary
            handle.write(json.dumps(obj, ensure_ascii=False) + "\n")


def _fixture_cache_file(tmp_path):
    cache_path = tmp_path / "cache.jsonl"
    table = {
        pair: EntailmentProbabilities(value, 1.0 - value, 0.0)
        for pair, value in support.fixture_table().items()
    }
    save_matrix_cache(table, cache_path)
    return cache_path


def _lines(path):
    return path.read_text(encoding="utf-8").splitlines()


def test_empty_input_exits_zero(tmp_path, capsys):
    corpus = tmp_path / "corpus.jsonl"
    corpus.write_text("", encoding="utf-8")
    out = tmp_path / "out.jsonl"
    code = main(["align", "--input", str(corpus), "--output", str(out)])
    assert code == 0
    assert out.read_text(encoding="utf-8") == ""
    assert "processed 0 skipped 0 failed 0" in capsys.readouterr().err


def test_align_fixture_record_with_cache_backend(tmp_path, capsys):
    corpus = tmp_path / "corpus.jsonl"
    _write_corpus(corpus, [support.fixture_record()])
    out = tmp_path / "out.jsonl"
    code = main(
        [
            "align",
            "--input", str(corpus),
            "--output", str(out),
            "--backend", f"cache:{_fixture_cache_file(tmp_path)}",
        ]
    )
    assert code == 0
    (line,) = _lines(out)
    obj = json.loads(line)
    assert obj["id"] == "fixture-2x3"
    assert obj["phi"] == support.FIXTURE_PHI
    assert obj["uncovered_refs"] == [0]
    assert obj["faithful_gens"] == [1, 2]
    assert obj["tau"] == 0.5
    assert obj["format_version"] == "1"
    assert "processed 1 skipped 0 failed 0" in capsys.readouterr().err


def test_augment_fixture_record_mix_order(tmp_path):
    corpus = tmp_path / "corpus.jsonl"
    _write_corpus(corpus, [support.fixture_record()])
    out = tmp_path / "out.jsonl"
    code = main(
        [
            "augment",
            "--input", str(corpus),
            "--output", str(out),
            "--backend", f"cache:{_fixture_cache_file(tmp_path)}",
        ]
    )
    assert code == 0
    obj = json.loads(_lines(out)[0])
    assert [s["origin"] for s in obj["mix_and_match"]["sentences"]] == [
        "reference",
        "generated",
        "generated",
    ]
    assert obj["mix_and_match"]["rendered"] == " ".join(
        [support.FIXTURE_REFS[0], support.FIXTURE_GENS[1], support.FIXTURE_GENS[2]]
    )
    assert obj["positives"] == [1, 2]
    assert obj["negatives"] == [0]


def test_augment_tau_one_returns_reference(fixture_corpus_path, tmp_path):
    out = tmp_path / "out.jsonl"
    code = main(
        [
            "augment",
            "--input", str(fixture_corpus_path),
            "--output", str(out),
            "--backend", "mock",
            "--tau", "1.0",
        ]
    )
    assert code == 0
    originals = {r.id: r for r in read_corpus(fixture_corpus_path)}
    lines = _lines(out)
    assert len(lines) == 10
    for line in lines:
        obj = json.loads(line)
        assert all(all(v == 0 for v in row) for row in obj["phi"])
        assert obj["mix_and_match"]["rendered"] == originals[obj["id"]].reference_summary
        assert obj["tau"] == 1.0


def test_lenient_skips_and_exit_two(tmp_path, capsys):
    corpus = tmp_path / "corpus.jsonl"
    rows = [
        json.dumps(
            {"id": "ok", "dialogue": "a: hi", "summary": "Fine.", "generated_summary": "Fine."}
        ),
        "{broken json",
        json.dumps({"id": "nogen", "dialogue": "a: hi", "summary": "Fine."}),
    ]
    corpus.write_text("".join(r + "\n" for r in rows), encoding="utf-8")
    out = tmp_path / "out.jsonl"
    code = main(["augment", "--input", str(corpus), "--output", str(out)])
    assert code == 2
    assert len(_lines(out)) == 1
    err = capsys.readouterr().err
    assert "processed 1 skipped 2 failed 0" in err
    assert "empty generated summary" in err


def test_strict_aborts_on_bad_line(tmp_path, capsys):
    corpus = tmp_path / "corpus.jsonl"
    corpus.write_text("{broken json\n", encoding="utf-8")
    out = tmp_path / "out.jsonl"
    code = main(
        ["augment", "--input", str(corpus), "--output", str(out), "--strict"]
    )
    assert code == 1
    assert "fatal" in capsys.readouterr().err


def test_cache_miss_counts_as_failure(tmp_path, capsys):
    corpus = tmp_path / "corpus.jsonl"
    _write_corpus(corpus, [support.fixture_record()])
    extra = {
        "id": "uncovered-pair",
        "dialogue": "a: hi",
        "summary": "Totally new words.",
        "generated_summary": "Different words entirely.",
    }
    with open(corpus, "a", encoding="utf-8") as handle:
        handle.write(json.dumps(extra) + "\n")
    out = tmp_path / "out.jsonl"
    code = main(
        [
            "augment",
            "--input", str(corpus),
            "--output", str(out),
            "--backend", f"cache:{_fixture_cache_file(tmp_path)}",
        ]
    )
    assert code == 2
    assert len(_lines(out)) == 1
    assert "processed 1 skipped 0 failed 1" in capsys.readouterr().err


def test_score_identical_record_via_mock(tmp_path):
    corpus = tmp_path / "corpus.jsonl"
    records = support.identical_records()[:1]
    _write_corpus(corpus, records)
    out = tmp_path / "out.jsonl"
    code = main(["score", "--input", str(corpus), "--output", str(out)])
    assert code == 0
    record_line, aggregate_line = (json.loads(l) for l in _lines(out))
    assert record_line["coverage_ratio"] == 1.0
    assert record_line["faithfulness_ratio"] == 1.0
    assert record_line["rouge_l"]["f1"] == 1.0
    assert aggregate_line["aggregate"] is True
    assert aggregate_line["records"] == 1
    assert aggregate_line["mean_coverage_ratio"] == 1.0
    assert aggregate_line["mean_rouge_l_f1"] == 1.0


def test_score_fixture_record_and_aggregate_average(tmp_path, fixture_corpus_path):
    out = tmp_path / "out.jsonl"
    code = main(
        ["score", "--input", str(fixture_corpus_path), "--output", str(out)]
    )
    assert code == 0
    lines = [json.loads(l) for l in _lines(out)]
    records, aggregate = lines[:-1], lines[-1]
    assert len(records) == 10
    # The aggregate is the plain mean of the per-record lines.
    for key, position in (
        ("mean_coverage_ratio", "coverage_ratio"),
        ("mean_faithfulness_ratio", "faithfulness_ratio"),
        ("mean_nli_recall", "nli_recall_mean"),
    ):
        assert aggregate[key] == sum(r[position] for r in records) / len(records)
    assert aggregate["mean_rouge_l_recall"] == sum(
        r["rouge_l"]["recall"] for r in records
    ) / len(records)
    assert aggregate["mean_rouge_l_f1"] == sum(
        r["rouge_l"]["f1"] for r in records
    ) / len(records)


def test_score_fixture_instance_values(tmp_path):
    corpus = tmp_path / "corpus.jsonl"
    _write_corpus(corpus, [support.fixture_record()])
    out = tmp_path / "out.jsonl"
    code = main(
        [
            "score",
            "--input", str(corpus),
            "--output", str(out),
            "--backend", f"cache:{_fixture_cache_file(tmp_path)}",
        ]
    )
    assert code == 0
    record = json.loads(_lines(out)[0])
    assert record["coverage_ratio"] == 0.5
    assert record["faithfulness_ratio"] == 2 / 3
    assert record["nli_recall_per_ref"] == [0.1, 0.8]
    assert record["uncovered_ref_indices"] == [0]
    assert record["unfaithful_gen_indices"] == [0]


def test_generated_parallel_file(tmp_path):
    corpus = tmp_path / "corpus.jsonl"
    record = support.fixture_record()
    _write_corpus(corpus, [record.with_generated(None)])
    generated = tmp_path / "generated.jsonl"
    generated.write_text(
        json.dumps({"id": record.id, "generated_summary": record.generated_summary})
        + "\n",
        encoding="utf-8",
    )
    out = tmp_path / "out.jsonl"
    code = main(
        [
            "align",
            "--input", str(corpus),
            "--generated", str(generated),
            "--output", str(out),
            "--backend", f"cache:{_fixture_cache_file(tmp_path)}",
        ]
    )
    assert code == 0
    assert json.loads(_lines(out)[0])["phi"] == support.FIXTURE_PHI


def test_tau_precedence_flag_env_default(tmp_path, monkeypatch, fixture_corpus_path):
    out = tmp_path / "out.jsonl"

    def run_tau(extra_args):
        code = main(
            ["augment", "--input", str(fixture_corpus_path), "--output", str(out)]
            + extra_args
        )
        assert code == 0
        return {json.loads(l)["tau"] for l in _lines(out)}

    monkeypatch.delenv("SWING_TAU", raising=False)
    assert run_tau([]) == {0.5}

    monkeypatch.setenv("SWING_TAU", "0.9")
    assert run_tau([]) == {0.9}

    assert run_tau(["--tau", "0.25"]) == {0.25}


def test_workers_give_identical_output(tmp_path, fixture_corpus_path):
    single = tmp_path / "single.jsonl"
    multi = tmp_path / "multi.jsonl"
    assert main(["augment", "--input", str(fixture_corpus_path), "--output", str(single)]) == 0
    assert (
        main(
            [
                "augment",
                "--input", str(fixture_corpus_path),
                "--output", str(multi),
                "--workers", "4",
            ]
        )
        == 0
    )
    assert single.read_bytes() == multi.read_bytes()


def test_bad_configuration_is_fatal(tmp_path, capsys):
    corpus = tmp_path / "corpus.jsonl"
    corpus.write_text("", encoding="utf-8")
    assert main(["align", "--input", str(corpus), "--tau", "1.5"]) == 1
    assert main(["align", "--input", str(corpus), "--workers", "0"]) == 1
    assert main(["align", "--input", str(corpus), "--backend", "smoke-signals"]) == 1
    assert main(["align", "--input", str(tmp_path / "missing.jsonl")]) == 1
    capsys.readouterr()


def test_usage_errors_exit_one():
    with pytest.raises(SystemExit) as excinfo:
        main([])
    assert excinfo.value.code == 1
    with pytest.raises(SystemExit) as excinfo:
        main(["align"])  # --input is required
    assert excinfo.value.code == 1
