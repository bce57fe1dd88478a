"""Feature selection per fairness method, least-squares fitting and metrics."""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass

import numpy as np

from .ancestry import AncestralRelation, classify_all
from .errors import MissingGraph, RankDeficientWarning, SchemaMismatch
from .graph import directed_descendants
from .scm import CounterfactualPair, Dataset


class FairnessMethod(enum.Enum):
    FULL = "Full"
    UNAWARE = "Unaware"
    FAIR_RELAX = "FairRelax"
    ORACLE = "Oracle"
    FAIR = "Fair"

    def __str__(self):
        return self.value

    @classmethod
    def parse(cls, name: str) -> "FairnessMethod":
        for m in cls:
            if m.value.lower() == name.lower():
                return m
        raise ValueError(f"unknown method {name!r}")


METHODS = tuple(FairnessMethod)


def select_features(method, g=None, true_dag=None, *, sensitive, outcome, all_nodes,
                    relations=None) -> list:
    """Columns a predictor of ``outcome`` may use under ``method``.

    ``relations`` lets callers pass a precomputed ``classify_all`` result so
    Fair and FairRelax share one classification.
    """
    method = FairnessMethod(method) if not isinstance(method, FairnessMethod) else method
    nodes = list(all_nodes)
    for v in (sensitive, outcome):
        if v not in nodes:
            raise SchemaMismatch(f"{v!r} is not among the nodes")

    if method is FairnessMethod.FULL:
        keep = set(nodes)
    elif method is FairnessMethod.UNAWARE:
        keep = set(nodes) - {sensitive}
    elif method is FairnessMethod.ORACLE:
        if true_dag is None:
            raise MissingGraph("Oracle needs the true DAG")
        keep = set(nodes) - directed_descendants(true_dag, sensitive)
    else:
        if relations is None:
            if g is None:
                raise MissingGraph(f"{method.value} needs an MPDAG")
            relations = classify_all(g, sensitive)
        allowed = {AncestralRelation.DEFINITE_NON_DESCENDANT}
        if method is FairnessMethod.FAIR_RELAX:
            allowed.add(AncestralRelation.POSSIBLE_DESCENDANT)
        keep = {v for v, r in relations.items() if r in allowed}
    keep.discard(outcome)
    return [v for v in nodes if v in keep]


@dataclass(frozen=True)
class FitResult:
    features: tuple
    coefficients: dict
    intercept: float
    rank_deficient: bool = False

    def predict(self, data: Dataset, rows=None) -> np.ndarray:
        X = data.matrix(self.features)
        if rows is not None:
            X = X[rows]
        beta = np.array([self.coefficients[f] for f in self.features])
        return self.intercept + X @ beta


def fit_ols(data: Dataset, features, outcome: str, rows=None) -> FitResult:
    """Least squares of ``outcome`` on ``features`` plus an intercept.

    A rank-deficient design falls back to the minimum-norm solution and
    emits :class:`RankDeficientWarning`.
    """
    features = tuple(features)
    X = data.matrix(features)
    y = data.col(outcome)
    if rows is not None:
        X, y = X[rows], y[rows]
    design = np.column_stack([np.ones(len(y)), X])
    coef, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    deficient = rank < design.shape[1]
    if deficient:
        warnings.warn(
            f"design with {design.shape[1]} columns has rank {rank}", RankDeficientWarning, stacklevel=2
        )
    return FitResult(features, dict(zip(features, coef[1:].tolist())), float(coef[0]), bool(deficient))


def unfairness(model: FitResult, pair: CounterfactualPair, test_rows=None) -> float:
    """Mean absolute change of the prediction between the two worlds."""
    diff = model.predict(pair.factual, test_rows) - model.predict(pair.counterfactual, test_rows)
    return float(np.mean(np.abs(diff)))


def rmse(model: FitResult, data: Dataset, outcome: str, test_rows=None) -> float:
    y = data.col(outcome)
    if test_rows is not None:
        y = y[test_rows]
    resid = y - model.predict(data, test_rows)
    return float(np.sqrt(np.mean(resid ** 2)))


def train_test_split(n: int, rng, train_fraction: float = 0.8):
    """Index split; the first ``round(train_fraction * n)`` of a permutation train."""
    perm = rng.permutation(n)
    cut = int(round(train_fraction * n))
    return np.sort(perm[:cut]), np.sort(perm[cut:])


def pool(*datasets: Dataset, rows=None) -> Dataset:
    """Stack datasets sharing one schema, optionally restricted to ``rows``."""
    cols = datasets[0].columns
    for d in datasets[1:]:
        if d.columns != cols:
            raise SchemaMismatch("datasets have different columns")
    parts = [d.rows if rows is None else d.rows[rows] for d in datasets]
    return Dataset(cols, np.vstack(parts))


def evaluate_methods(pair: CounterfactualPair, outcome: str, feature_sets: dict, train, test) -> dict:
    """Fit every feature set on the pooled factual and counterfactual training
    rows, then score RMSE on factual test rows and unfairness on test pairs.
    """
    train_data = pool(pair.factual, pair.counterfactual, rows=train)
    out = {}
    for method, features in feature_sets.items():
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RankDeficientWarning)
            model = fit_ols(train_data, features, outcome)
        out[method] = {
            "rmse": rmse(model, pair.factual, outcome, test),
            "unfairness": unfairness(model, pair, test),
            "n_features": len(features),
        }
    return out
