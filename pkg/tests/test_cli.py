import json

import pytest

from conftest import make_segment_record
from lqm_eval.cli import main
from lqm_eval.server import ProjectStore


def write_fixture(tmp_path, n=6):
    segments = tmp_path / "segments.jsonl"
    records = []
    for i in range(n):
        records.append(make_segment_record(
            f"s{i}", n_tokens=8 + i, model_id=f"m{i % 2}",
            reference_text=" ".join(f"w{j}" for j in range(8 + i))))
    segments.write_text("".join(json.dumps(r) + "\n" for r in records))

    annotations = tmp_path / "annotations.jsonl"
    spans = [
        {"span_id": "a1", "segment_id": "s0", "annotator_id": "A",
         "start": 0, "end": 4, "category": "semantics",
         "error_type": "lexical-semantics", "subcategory": "named-entity",
         "severity": "major"},
        {"span_id": "a2", "segment_id": "s1", "annotator_id": "A",
         "start": 2, "end": 6, "category": "sociolinguistics",
         "error_type": "code-register-selection",
         "subcategory": "standardization-interference",
         "severity": "minor"},
        {"span_id": "b1", "segment_id": "s0", "annotator_id": "B",
         "start": 1, "end": 5, "category": "semantics",
         "error_type": "lexical-semantics", "subcategory": "named-entity",
         "severity": "major"},
        {"span_id": "b2", "segment_id": "s1", "annotator_id": "B",
         "start": 2, "end": 6, "category": "sociolinguistics",
         "error_type": "code-register-selection",
         "subcategory": "wrong-dialect", "severity": "minor"},
    ]
    annotations.write_text("".join(json.dumps(s) + "\n" for s in spans))
    return segments, annotations


def test_validate_ok(tmp_path, capsys):
    segments, annotations = write_fixture(tmp_path)
    code = main(["validate", "--segments", str(segments),
                 "--annotations", str(annotations)])
    assert code == 0
    assert "ok:" in capsys.readouterr().err


def test_validate_out_of_bounds_span_exits_1(tmp_path, capsys):
    segments, annotations = write_fixture(tmp_path)
    bad = {"span_id": "broken", "segment_id": "s0", "annotator_id": "A",
           "start": 0, "end": 9999, "category": "semantics",
           "error_type": "lexical-semantics", "subcategory": "named-entity",
           "severity": "major"}
    annotations.write_text(annotations.read_text() + json.dumps(bad) + "\n")
    code = main(["validate", "--segments", str(segments),
                 "--annotations", str(annotations)])
    assert code == 1
    err = capsys.readouterr().err
    assert "broken" in err


def test_usage_error_exits_2(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["score", "--segments"])
    assert exc.value.code == 2


def test_score_and_analyze_byte_identical(tmp_path):
    segments, annotations = write_fixture(tmp_path)
    out1 = tmp_path / "r1.json"
    out2 = tmp_path / "r2.json"
    argv = ["score", "--segments", str(segments),
            "--annotations", str(annotations)]
    assert main(argv + ["--out", str(out1)]) == 0
    assert main(argv + ["--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()

    a1 = tmp_path / "d1.json"
    a2 = tmp_path / "d2.json"
    argv = ["analyze", "--segments", str(segments),
            "--annotations", str(annotations), "--report", "dist"]
    assert main(argv + ["--out", str(a1)]) == 0
    assert main(argv + ["--out", str(a2)]) == 0
    assert a1.read_bytes() == a2.read_bytes()


def test_fail_fast_no_partial_output(tmp_path):
    segments, annotations = write_fixture(tmp_path)
    annotations.write_text("{bad json\n")
    out = tmp_path / "report.json"
    code = main(["score", "--segments", str(segments),
                 "--annotations", str(annotations), "--out", str(out)])
    assert code == 1
    assert not out.exists()
    assert not list(tmp_path.glob("*.tmp"))


def test_score_report_contents(tmp_path):
    segments, annotations = write_fixture(tmp_path)
    out = tmp_path / "report.json"
    main(["score", "--segments", str(segments), "--annotations",
          str(annotations), "--out", str(out)])
    report = json.loads(out.read_text())
    assert report["scheme"]["severity_weights"]["critical"] == 25.0
    assert report["per_segment"]["s0"]["error_mass"] == 10.0  # two majors
    assert len(report["per_group"]) == 2


def test_score_table_rendering(tmp_path, capsys):
    segments, annotations = write_fixture(tmp_path)
    main(["score", "--segments", str(segments), "--annotations",
          str(annotations), "--format", "table", "--out",
          str(tmp_path / "r.json")])
    out = capsys.readouterr().out
    assert "direction" in out and "EGY->ENG" in out


def test_iaa_cli(tmp_path):
    segments, annotations = write_fixture(tmp_path)
    out = tmp_path / "iaa.json"
    code = main(["iaa", "--segments", str(segments), "--annotations",
                 str(annotations), "--annotators", "A,B",
                 "--out", str(out)])
    assert code == 0
    report = json.loads(out.read_text())
    assert report["n_items"] == 2
    assert report["overlap_span_f1"] == 1.0
    assert report["label_f1"]["category"] == 1.0
    assert report["label_f1"]["fine_type"] == 0.5

    bad = main(["iaa", "--segments", str(segments), "--annotations",
                str(annotations), "--annotators", "A,Z"])
    assert bad == 1


def test_bleu_cli_and_corr(tmp_path):
    segments, annotations = write_fixture(tmp_path)
    bleu_out = tmp_path / "bleu.json"
    assert main(["bleu", "--segments", str(segments),
                 "--out", str(bleu_out)]) == 0
    bleu = json.loads(bleu_out.read_text())
    assert all(rec["score"] == 100.0
               for rec in bleu["per_segment"].values())

    corr_out = tmp_path / "corr.json"
    code = main(["analyze", "--segments", str(segments), "--annotations",
                 str(annotations), "--report", "corr",
                 "--bleu", str(bleu_out), "--out", str(corr_out)])
    assert code == 0  # identical BLEU everywhere: zero variance
    flat = json.loads(corr_out.read_text())
    assert flat["pearson_r"] is None
    assert "pearson_r" in flat["undefined"]

    records = [make_segment_record(
        f"s{i}", n_tokens=8, model_id="m1",
        reference_text=" ".join(f"w{j}" for j in range(8)) if i % 2 == 0
        else "completely different words here now ok fine yes")
        for i in range(6)]
    segments.write_text("".join(json.dumps(r) + "\n" for r in records))
    assert main(["bleu", "--segments", str(segments),
                 "--out", str(bleu_out)]) == 0
    code = main(["analyze", "--segments", str(segments), "--annotations",
                 str(annotations), "--report", "corr",
                 "--bleu", str(bleu_out), "--out", str(corr_out)])
    assert code == 0
    corr = json.loads(corr_out.read_text())
    assert corr["n"] == 6


def test_analyze_buckets_and_attrib(tmp_path):
    segments, annotations = write_fixture(tmp_path)
    out = tmp_path / "buckets.json"
    assert main(["analyze", "--segments", str(segments), "--annotations",
                 str(annotations), "--report", "buckets",
                 "--out", str(out)]) == 0
    buckets = json.loads(out.read_text())
    assert sum(buckets["bucket_sizes"].values()) == 6

    attrib_out = tmp_path / "attrib.json"
    assert main(["analyze", "--segments", str(segments), "--annotations",
                 str(annotations), "--report", "attrib",
                 "--out", str(attrib_out)]) == 0
    attrib = json.loads(attrib_out.read_text())
    assert attrib["tables"][0]["grouping"] == "model_id"


def test_export_cli(tmp_path):
    store = ProjectStore(tmp_path / "store")
    payload = {
        "taxonomy_name": "lqm", "layer": "diagnostic",
        "overlap_fraction": 1.0,
        "segments": [make_segment_record("s0", n_tokens=6)],
        "roster": [{"annotator_id": "a", "token": "t"}],
    }
    pid, _ = store.create_project(payload)
    store.save_annotation(pid, "s0", "a", [{
        "span_id": "sp", "segment_id": "s0", "annotator_id": "a",
        "start": 0, "end": 2, "category": "semantics",
        "error_type": "lexical-semantics", "subcategory": "named-entity",
        "severity": "minor"}], None, 0)
    store.close()
    seg_out = tmp_path / "exported_segments.jsonl"
    ann_out = tmp_path / "exported_annotations.jsonl"
    assert main(["export", "--store", str(tmp_path / "store"),
                 "--project", pid, "--segments-out", str(seg_out),
                 "--annotations-out", str(ann_out)]) == 0
    assert "sp" in ann_out.read_text()
    # validate the exported pair end to end
    assert main(["validate", "--segments", str(seg_out),
                 "--annotations", str(ann_out)]) == 0


def test_mqm_taxonomy_by_name(tmp_path):
    segments, _ = write_fixture(tmp_path)
    annotations = tmp_path / "mqm.jsonl"
    annotations.write_text(json.dumps({
        "span_id": "m1", "segment_id": "s0", "annotator_id": "A",
        "start": 0, "end": 3, "category": "accuracy",
        "error_type": "mistranslation", "severity": "major"}) + "\n")
    assert main(["validate", "--segments", str(segments), "--annotations",
                 str(annotations), "--taxonomy", "mqm"]) == 0
