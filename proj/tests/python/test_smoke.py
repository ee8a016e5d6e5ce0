import json
import os
import pathlib

import pytest

import synimp

SOURCE = pathlib.Path(os.environ.get("SYNIMP_SOURCE_DIR", pathlib.Path(__file__).resolve().parents[2]))
CORPUS = SOURCE / "data" / "nostalgia_desk.jsonl"


def test_metrics():
    assert synimp.relative_gain(0.822, 0.471) == pytest.approx(0.745, abs=1e-3)
    assert synimp.overfit_ratio(0.851, 0.822) == pytest.approx(0.035, abs=1e-3)
    assert synimp.penalized_score(1.0) == pytest.approx(0.96)
    scores = synimp.f1_scores(["a", "a", "b"], ["a", "b", "b"])
    assert scores["per_class"]["a"]["precision"] == 1.0
    assert scores["per_class"]["b"]["recall"] == 1.0


def test_planning():
    assert synimp.plan_experiment_grid(151, [50, 75, 100]) == [(50, 101), (75, 76), (100, 51)]
    assert synimp.batch_coverage(200, 2000, 16) == (125, pytest.approx(1.6))
    analysis = synimp.analyze(CORPUS)
    assert analysis["distribution"]["counts"] == {"nostalgic": 151, "not_nostalgic": 1049}
    plan = synimp.plan(CORPUS, target=200)
    assert plan["entries"]["nostalgic"]["synthetic_needed"] == 49


def test_similarity_and_masking():
    assert synimp.ngram_jaccard("a b c", "a b c") == 1.0
    assert synimp.ngram_jaccard("a b c", "d e f") == 0.0
    text, positions = synimp.mask_tokens("one two three four five", rate=0.4, seed=3)
    assert len(positions) == 2
    assert text.split().count("<mask>") == 2
    batch = synimp.augment(CORPUS, "eda", "nostalgic", 5, seed=1)
    assert len(batch) == 5 and all(b["label"] == "nostalgic" for b in batch)


def test_trainer_protocol(tmp_path):
    (tmp_path / "train.jsonl").write_text(
        '{"text":"sunny beach","label":"summer"}\n{"text":"snow cold","label":"winter"}\n')
    (tmp_path / "eval.jsonl").write_text('{"id":"1","text":"cold snow day"}\n')
    (tmp_path / "h.json").write_text(json.dumps(synimp.finetune_hyperparams()))
    synimp.train_predict(tmp_path / "train.jsonl", tmp_path / "eval.jsonl", tmp_path / "h.json",
                         tmp_path / "pred.jsonl")
    assert json.loads((tmp_path / "pred.jsonl").read_text()) == {"id": "1", "label": "winter"}
    (tmp_path / "eval.jsonl").write_text('{"id":"1"}\n')
    with pytest.raises(synimp.TrainerError):
        synimp.train_predict(tmp_path / "train.jsonl", tmp_path / "eval.jsonl", tmp_path / "h.json",
                             tmp_path / "pred.jsonl")


def test_run_lifecycle(tmp_path):
    config = {
        "run_id": "py",
        "corpus": str(CORPUS),
        "category": "nostalgic",
        "original_sizes": [100],
        "provider": {"kind": "mock", "similarity": 0.5},
        "master_seed": 1,
        "k": 5,
        "repeats": 1,
        "strategies": ["none", "imputation"],
    }
    with pytest.raises(synimp.ConfigError):
        synimp.Run.create(tmp_path / "bad", dict(config, unknown=1))
    run = synimp.Run.create(tmp_path / "run", config)
    assert run.state == "created"
    assert run.generate() == 51
    assert len(run.candidates()) == 51
    run.validate()
    first = run.candidates()[0]["candidate_id"]
    assert run.decide(first, "reject")["status"] == "rejected"
    with pytest.raises(synimp.StateError):
        run.decide(first, "accept")
    metrics = synimp.Run.open(tmp_path / "run").evaluate()
    assert {c["strategy"] for c in metrics["cells"]} == {"none", "imputation", "true"}
