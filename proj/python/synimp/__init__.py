"""Synthetic imputation toolkit: Python access to the C++ core."""

import json as _json

from . import _synimp
from ._synimp import (
    ConfigError,
    CorpusError,
    NotFoundError,
    StateError,
    TrainerError,
    batch_coverage,
    mask_tokens,
    ngram_containment,
    ngram_jaccard,
    overfit_ratio,
    overfit_reduction,
    penalized_score,
    plan_experiment_grid,
    relative_decrease,
    relative_gain,
    train_predict,
)

__version__ = _synimp.__version__

__all__ = [
    "ConfigError",
    "CorpusError",
    "NotFoundError",
    "StateError",
    "TrainerError",
    "Run",
    "analyze",
    "augment",
    "batch_coverage",
    "f1_scores",
    "finetune_hyperparams",
    "mask_tokens",
    "ngram_containment",
    "ngram_jaccard",
    "overfit_ratio",
    "overfit_reduction",
    "penalized_score",
    "plan",
    "plan_experiment_grid",
    "relative_decrease",
    "relative_gain",
    "train_predict",
]


def analyze(corpus, batch_size=16):
    return _json.loads(_synimp.analyze(str(corpus), batch_size))


def plan(corpus, target=None, min_originals=50):
    return _json.loads(_synimp.plan(str(corpus), target, min_originals))


def f1_scores(gold, predicted):
    return _json.loads(_synimp.f1_scores(list(gold), list(predicted)))


def augment(corpus, method, category, count, seed=0):
    return _json.loads(_synimp.augment(str(corpus), method, category, count, seed))


def finetune_hyperparams(cross_lingual=False):
    return _json.loads(_synimp.finetune_hyperparams(cross_lingual))


class Run:
    """A run directory: plan, candidates, decisions and reports."""

    def __init__(self, handle):
        self._run = handle

    @classmethod
    def create(cls, directory, config, base_dir=""):
        return cls(_synimp.Run.create(str(directory), _json.dumps(config), str(base_dir)))

    @classmethod
    def open(cls, directory):
        return cls(_synimp.Run.open(str(directory)))

    @property
    def record(self):
        return _json.loads(self._run.record())

    @property
    def state(self):
        return self.record["state"]

    def candidates(self, status=None):
        rows = _json.loads(self._run.candidates())
        return [r for r in rows if status is None or r["status"] == status]

    def generate(self):
        return self._run.generate()

    def validate(self):
        return _json.loads(self._run.validate())

    def evaluate(self, strategies=None):
        return _json.loads(self._run.evaluate(strategies))

    def decide(self, candidate_id, decision, note=""):
        return _json.loads(self._run.decide(candidate_id, decision, note))

    def edit_prompt(self, body):
        return self._run.edit_prompt(body)
