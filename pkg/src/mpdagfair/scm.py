"""Random DAGs, structural equation models and counterfactual replay."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NoNoiseRetained, SchemaMismatch, TooManyEdges
from .graph import PDAG, directed_descendants, is_acyclic_extension

NOISE_VARIANCE = 1.5
WEIGHT_RANGE = (0.5, 2.0)
# keeps the reciprocal distortion finite near zero
RECIPROCAL_OFFSET = 0.1

INNER_FUNCTIONS = {
    "linear": lambda x: x,
    "sin": np.sin,
    "cos": np.cos,
    "tanh": np.tanh,
    "sigmoid": lambda x: 1.0 / (1.0 + np.exp(-x)),
}


def _reciprocal(x):
    return 1.0 / (x + np.where(x >= 0, RECIPROCAL_OFFSET, -RECIPROCAL_OFFSET))


OUTER_FUNCTIONS = {
    "linear": lambda x: x,
    "absolute": np.abs,
    "reciprocal": _reciprocal,
}

NOISE_KINDS = ("gaussian", "exponential", "gumbel")


def make_rng(seed, *stream):
    """Child generator for ``(seed, *stream)``.

    numpy's SeedSequence hashes the whole tuple, so replicate ``i`` of a run
    seeded with ``s`` always gets the same independent stream.
    """
    return np.random.default_rng([int(seed), *map(int, stream)])


def random_er_dag(d: int, m: int, seed) -> PDAG:
    """Erdős-Rényi DAG on ``X1..Xd`` with exactly ``m`` edges.

    Pairs are drawn by rejection until ``m`` distinct ones are collected and
    each is oriented along a random vertex permutation.
    """
    if m > d * (d - 1) // 2:
        raise TooManyEdges(f"{m} edges do not fit on {d} nodes")
    rng = make_rng(seed, 0)
    names = [f"X{i + 1}" for i in range(d)]
    rank = rng.permutation(d)
    chosen = {}
    while len(chosen) < m:
        i, j = rng.choice(d, size=2, replace=False)
        key = (min(i, j), max(i, j))
        if key not in chosen:
            chosen[key] = (i, j) if rank[i] < rank[j] else (j, i)
    return PDAG(names, [(names[i], names[j]) for i, j in chosen.values()])


@dataclass(frozen=True)
class SEM:
    """Structural equations over a DAG.

    Every non-sensitive node is ``outer(inner(sum(w * parent) + noise))``. The
    linear model of the synthetic experiments is the case where both maps are
    the identity and the noise is Gaussian.
    """

    dag: PDAG
    weights: dict
    noise_scale: dict
    sensitive: str
    outcome: str
    arity: int = 2
    inner: dict = field(default_factory=dict)
    outer: dict = field(default_factory=dict)
    noise_kind: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.sensitive == self.outcome:
            raise ValueError("sensitive and outcome must differ")
        if self.arity < 2:
            raise ValueError("arity must be at least 2")
        for v in (self.sensitive, self.outcome):
            if v not in self.dag:
                raise ValueError(f"{v} is not a node of the DAG")
        if set(self.weights) != set(self.dag.directed_edges):
            raise ValueError("weights must be keyed exactly by the DAG edges")

    @property
    def order(self) -> list:
        return is_acyclic_extension(self.dag)[1]

    @property
    def is_linear(self) -> bool:
        return all(f == ("linear",) for f in self.inner.values()) and all(
            g == "linear" for g in self.outer.values()
        ) and all(k == "gaussian" for k in self.noise_kind.values())

    def mechanism(self, v):
        return self.inner.get(v, ("linear",)), self.outer.get(v, "linear")


LinearSEM = SEM


@dataclass
class Dataset:
    columns: tuple
    rows: np.ndarray
    noise: np.ndarray | None = None
    seed: int | None = None

    def __post_init__(self):
        self.columns = tuple(self.columns)
        self.rows = np.asarray(self.rows, dtype=float)
        if self.rows.ndim != 2 or self.rows.shape[1] != len(self.columns):
            raise SchemaMismatch("rows do not match the column list")
        if self.noise is not None:
            self.noise = np.asarray(self.noise, dtype=float)
            if self.noise.shape != self.rows.shape:
                raise SchemaMismatch("noise and rows differ in shape")

    def __len__(self):
        return self.rows.shape[0]

    def col(self, name) -> np.ndarray:
        try:
            return self.rows[:, self.columns.index(name)]
        except ValueError:
            raise SchemaMismatch(f"missing column {name!r}") from None

    def matrix(self, names) -> np.ndarray:
        idx = []
        for name in names:
            if name not in self.columns:
                raise SchemaMismatch(f"missing column {name!r}")
            idx.append(self.columns.index(name))
        return self.rows[:, idx]


@dataclass
class CounterfactualPair:
    factual: Dataset
    counterfactual: Dataset
    intervention: np.ndarray  # one (a, a') row per sample


def _random_weight(rng):
    return rng.choice((-1.0, 1.0)) * rng.uniform(*WEIGHT_RANGE)


def choose_roles(dag: PDAG, seed) -> tuple[str, str]:
    """Pick (sensitive, outcome) uniformly among distinct node pairs."""
    rng = make_rng(seed, 1)
    i, j = rng.choice(len(dag), size=2, replace=False)
    return dag.vertices[i], dag.vertices[j]


def sample_sem(dag: PDAG, sensitive: str, outcome: str, seed, arity: int = 2) -> SEM:
    rng = make_rng(seed, 2)
    weights = {e: _random_weight(rng) for e in dag.sorted_directed()}
    scale = {v: float(np.sqrt(NOISE_VARIANCE)) for v in dag.vertices}
    return SEM(dag, weights, scale, sensitive, outcome, arity)


def sample_nonlinear_sem(dag: PDAG, sensitive: str, outcome: str, seed, arity: int = 2) -> SEM:
    """Post-nonlinear model: random inner mechanism (one function or a
    composition of two), random outer distortion and random noise family
    for every node.
    """
    base = sample_sem(dag, sensitive, outcome, seed, arity)
    rng = make_rng(seed, 3)
    names = list(INNER_FUNCTIONS)
    inner, outer, kinds = {}, {}, {}
    for v in dag.vertices:
        k = int(rng.integers(1, 3))
        inner[v] = tuple(names[i] for i in rng.integers(0, len(names), size=k))
        outer[v] = list(OUTER_FUNCTIONS)[int(rng.integers(0, len(OUTER_FUNCTIONS)))]
        kinds[v] = NOISE_KINDS[int(rng.integers(0, len(NOISE_KINDS)))]
    return SEM(dag, base.weights, base.noise_scale, sensitive, outcome, arity, inner, outer, kinds)


def _draw_noise(sem: SEM, v, n, rng):
    if v == sem.sensitive and not sem.dag.parents(v):
        return rng.integers(0, sem.arity, size=n).astype(float)
    kind = sem.noise_kind.get(v, "gaussian")
    scale = sem.noise_scale[v]
    if kind == "gaussian":
        return rng.normal(0.0, scale, size=n)
    if kind == "exponential":
        return rng.exponential(scale, size=n)
    if kind == "gumbel":
        return rng.gumbel(0.0, scale, size=n)
    raise ValueError(f"unknown noise kind {kind!r}")


def _structural_value(sem: SEM, v, values: np.ndarray, noise: np.ndarray, col: dict):
    acc = noise[:, col[v]].copy()
    for p in sem.dag.ordered(sem.dag.parents(v)):
        acc += sem.weights[p, v] * values[:, col[p]]
    inner, outer = sem.mechanism(v)
    for name in reversed(inner):
        acc = INNER_FUNCTIONS[name](acc)
    return OUTER_FUNCTIONS[outer](acc)


def _discretize(x: np.ndarray, arity: int) -> np.ndarray:
    cuts = np.quantile(x, np.arange(1, arity) / arity)
    return np.searchsorted(cuts, x, side="right").astype(float)


def _propagate(sem: SEM, values, noise, col, nodes):
    for v in nodes:
        values[:, col[v]] = _structural_value(sem, v, values, noise, col)


def generate_data(sem: SEM, n: int, seed) -> Dataset:
    """Sample ``n`` rows; columns follow a topological order of the DAG.

    A parentless sensitive node is drawn uniformly over its levels. With
    parents, its structural value is cut at sample quantiles into ``arity``
    levels so the dependence on the parents survives.
    """
    if n < 1:
        raise ValueError("n must be positive")
    rng = make_rng(seed, 4)
    order = sem.order
    col = {v: i for i, v in enumerate(order)}
    noise = np.column_stack([_draw_noise(sem, v, n, rng) for v in order])
    values = np.zeros_like(noise)
    for v in order:
        if v == sem.sensitive:
            if sem.dag.parents(v):
                values[:, col[v]] = _discretize(_structural_value(sem, v, values, noise, col), sem.arity)
            else:
                values[:, col[v]] = noise[:, col[v]]
        else:
            values[:, col[v]] = _structural_value(sem, v, values, noise, col)
    return Dataset(order, values, noise, None if seed is None else int(seed))


def generate_counterfactual(sem: SEM, data: Dataset) -> CounterfactualPair:
    """Abduction-action-prediction with the stored noise.

    Each row moves the sensitive value from ``a`` to ``(a + 1) % arity`` and
    recomputes the sensitive node's descendants; every other column is
    copied unchanged.
    """
    if data.noise is None:
        raise NoNoiseRetained("dataset carries no noise matrix")
    col = {v: i for i, v in enumerate(data.columns)}
    if set(col) != set(sem.dag.vertices):
        raise SchemaMismatch("dataset columns do not match the model")
    s = col[sem.sensitive]
    a = data.rows[:, s]
    a_new = np.mod(a + 1, sem.arity)
    values = data.rows.copy()
    values[:, s] = a_new
    desc = directed_descendants(sem.dag, sem.sensitive) - {sem.sensitive}
    _propagate(sem, values, data.noise, col, [v for v in data.columns if v in desc])
    cf = Dataset(data.columns, values, data.noise.copy(), data.seed)
    return CounterfactualPair(data, cf, np.column_stack([a, a_new]))


def generate_nonlinear(dag: PDAG, sensitive: str, outcome: str, seed, n: int, arity: int = 2):
    """Draw a post-nonlinear model and sample from it; returns ``(sem, data)``."""
    sem = sample_nonlinear_sem(dag, sensitive, outcome, seed, arity)
    return sem, generate_data(sem, n, seed)
