import json

import pytest

from symrec.cli import main

from test_pipeline import write_config, write_corpus


@pytest.fixture()
def project(tmp_path):
    write_corpus(tmp_path, per_class=8)
    config = write_config(tmp_path, epochs=15)
    return tmp_path, config


def test_train_and_classify(project, capsys):
    tmp_path, config = project
    out = tmp_path / "run"
    assert main(["train", "--config", str(config), "--out", str(out)]) == 0
    captured = capsys.readouterr().out
    assert "top1_error" in captured and "mer_error" in captured

    # classify one recording from the corpus
    first_line = (tmp_path / "raw.jsonl").read_text().splitlines()[0]
    rec_file = tmp_path / "one.json"
    rec_file.write_text(first_line)
    assert main([
        "classify", str(rec_file), "--model", str(out / "bundle.json"), "-k", "3",
    ]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 3


def test_preprocess_writes_jsonl(project, capsys):
    tmp_path, config = project
    out = tmp_path / "pre"
    assert main(["preprocess", "--config", str(config), "--out", str(out)]) == 0
    written = (out / "preprocessed.jsonl").read_text().splitlines()
    assert len(written) == 40
    stroke = json.loads(written[0])[0]
    assert len(stroke) == 20  # resampled per the queue


def test_featurize_writes_caches(project):
    tmp_path, config = project
    out = tmp_path / "feat"
    assert main(["featurize", "--config", str(config), "--out", str(out)]) == 0
    for name in ("train.npz", "validation.npz", "test.npz", "standardization.json"):
        assert (out / name).exists()


def test_evaluate_reports(project, capsys, tmp_path):
    _, config = project
    run_dir = tmp_path / "run"
    main(["train", "--config", str(config), "--out", str(run_dir)])
    capsys.readouterr()
    code = main([
        "evaluate",
        "--model", str(run_dir / "bundle.json"),
        "--data", str(tmp_path / "raw.jsonl"),
        "--labels", str(tmp_path / "raw.labels.csv"),
    ])
    assert code == 0
    out = capsys.readouterr().out
    assert out.count(",") >= 3


def test_view_text_grid(project, capsys):
    tmp_path, _ = project
    assert main(["view", "1", "--data", str(tmp_path / "raw.jsonl")]) == 0
    out = capsys.readouterr().out
    assert "strokes" in out
    assert "#" in out


def test_view_out_of_range(project, capsys):
    tmp_path, _ = project
    assert main(["view", "999", "--data", str(tmp_path / "raw.jsonl")]) == 1


def test_error_reported_cleanly(tmp_path, capsys):
    missing = tmp_path / "none.yml"
    assert main(["train", "--config", str(missing)]) == 1
    assert "error:" in capsys.readouterr().err
