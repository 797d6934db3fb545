"""Morse-Smale piecewise regression."""

import json

import numpy as np

from . import _core
from ._core import DataError, algorithm_names, learner_names, sample_tweedie, simulate

__all__ = [
    "DataError",
    "PiecewiseRegressor",
    "algorithm_names",
    "learner_names",
    "partition",
    "policy",
    "run_benchmark",
    "sample_tweedie",
    "simulate",
]


def policy(kind="cv", *, partitions=None, min_size=None, max_partitions=None, seed=None):
    """Partition policy dict: kind is "cv", "crystal_count" or "min_size"."""
    p = {"kind": kind}
    if partitions is not None:
        p["kind"] = "crystal_count"
        p["target_count"] = int(partitions)
        p.setdefault("min_size", 1)
    if min_size is not None:
        p["min_size"] = int(min_size)
    if max_partitions is not None:
        p["max_partitions"] = int(max_partitions)
    if seed is not None:
        p["seed"] = int(seed)
    return p


def _as_xy(X, y):
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64).ravel()
    if X.ndim != 2:
        raise ValueError("X must be two-dimensional")
    return X, y


def partition(X, y, policy=None, k=0, jobs=1):
    """Morse-Smale partitioning of (X, y). Returns the partitioning as a dict."""
    X, y = _as_xy(X, y)
    p = policy if policy is not None else {"kind": "cv"}
    return json.loads(_core.partition(X, y, json.dumps(p), k, jobs))


class PiecewiseRegressor:
    """One learner per Morse-Smale partition, with a global fallback model."""

    def __init__(self, learner="enet", policy=None, seed=0, **learner_options):
        self.learner = learner
        self.policy = policy if policy is not None else {"kind": "cv"}
        self.seed = seed
        self.learner_options = learner_options
        self._model = None

    def fit(self, X, y, feature_names=None):
        X, y = _as_xy(X, y)
        self._model = _core.MsrModel.fit(
            X, y, self.learner, json.dumps(self.policy), json.dumps(self.learner_options),
            self.seed, list(feature_names or []),
        )
        return self

    def _fitted(self):
        if self._model is None:
            raise RuntimeError("model is not fitted")
        return self._model

    def predict(self, X):
        return np.asarray(self._fitted().predict(np.ascontiguousarray(X, dtype=np.float64)))

    def route(self, X):
        return np.asarray(self._fitted().route(np.ascontiguousarray(X, dtype=np.float64)))

    @property
    def partition_sizes(self):
        return list(self._fitted().partition_sizes)

    def to_json(self):
        return self._fitted().to_json()

    @classmethod
    def from_json(cls, text):
        model = _core.MsrModel.from_json(text)
        out = cls(learner=model.learner)
        out._model = model
        return out


def run_benchmark(n, trials=1, algorithms=None, seed=1, jobs=1, **learner_options):
    """Simulation grid benchmark; returns the report as a dict."""
    text = _core.run_benchmark(n, trials, list(algorithms or []), seed, jobs, json.dumps(learner_options))
    return json.loads(text)
