import numpy as np
import pytest

from mpdagfair.errors import NoNoiseRetained, SchemaMismatch, TooManyEdges
from mpdagfair.graph import PDAG, directed_descendants, is_acyclic_extension
from mpdagfair.scm import (
    NOISE_VARIANCE,
    SEM,
    Dataset,
    choose_roles,
    generate_counterfactual,
    generate_data,
    generate_nonlinear,
    random_er_dag,
    sample_nonlinear_sem,
    sample_sem,
)


def test_er_dag():
    dag = random_er_dag(10, 20, seed=1)
    assert dag.vertices == tuple(f"X{i}" for i in range(1, 11))
    assert dag.num_edges == 20
    assert not dag.undirected_edges
    assert is_acyclic_extension(dag)[0]
    assert dag == random_er_dag(10, 20, seed=1)
    assert dag != random_er_dag(10, 20, seed=2)


def test_er_edge_limits():
    assert random_er_dag(5, 0, seed=0).num_edges == 0
    assert random_er_dag(5, 10, seed=0).num_edges == 10
    with pytest.raises(TooManyEdges):
        random_er_dag(5, 11, seed=0)


def test_weights():
    dag = random_er_dag(12, 24, seed=3)
    sem = sample_sem(dag, "X1", "X2", seed=3)
    assert set(sem.weights) == set(dag.directed_edges)
    for w in sem.weights.values():
        assert 0.5 <= abs(w) <= 2.0
    assert sample_sem(PDAG(["A", "B"]), "A", "B", seed=0).weights == {}


def test_root_column_is_noise():
    dag = PDAG(directed=[("S", "Y"), ("R", "Y")])
    data = generate_data(sample_sem(dag, "S", "Y", seed=0), 200_000, seed=0)
    r = data.col("R")
    assert abs(r.mean()) < 0.02
    assert r.var() == pytest.approx(NOISE_VARIANCE, rel=0.02)


def test_linear_weight_recovered():
    dag = PDAG(["S"], [("A", "Y")])
    sem = SEM(dag, {("A", "Y"): 1.3}, {v: np.sqrt(1.5) for v in "SAY"}, "S", "Y")
    data = generate_data(sem, 1000, seed=4)
    a, y = data.col("A"), data.col("Y")
    X = np.column_stack([np.ones_like(a), a])
    beta, res, *_ = np.linalg.lstsq(X, y, rcond=None)
    se = np.sqrt(res[0] / (len(y) - 2) / np.sum((a - a.mean()) ** 2))
    assert abs(beta[1] - 1.3) < 3 * se


def test_binary_sensitive():
    dag = random_er_dag(8, 12, seed=5)
    s, y = choose_roles(dag, 5)
    assert s != y
    data = generate_data(sample_sem(dag, s, y, seed=5), 500, seed=5)
    assert set(np.unique(data.col(s))) <= {0.0, 1.0}
    assert len(np.unique(data.col(s))) == 2


def test_ternary_sensitive_with_parents():
    dag = PDAG(directed=[("P", "S"), ("S", "Y")])
    data = generate_data(sample_sem(dag, "S", "Y", seed=0, arity=3), 900, seed=0)
    levels, counts = np.unique(data.col("S"), return_counts=True)
    assert list(levels) == [0.0, 1.0, 2.0]
    assert all(abs(c - 300) <= 2 for c in counts)
    # the cut keeps the dependence on the parent
    assert np.corrcoef(data.col("P"), data.col("S"))[0, 1] ** 2 > 0.1


def test_chain_counterfactual_by_hand():
    dag = PDAG(directed=[("A", "X"), ("X", "Y")])
    sem = SEM(dag, {("A", "X"): 2.0, ("X", "Y"): -0.5}, {v: np.sqrt(1.5) for v in "AXY"}, "A", "Y")
    data = generate_data(sem, 50, seed=1)
    pair = generate_counterfactual(sem, data)
    a, x, y = (data.col(v) for v in "AXY")
    e_x, e_y = data.noise[:, 1], data.noise[:, 2]
    np.testing.assert_array_equal(x, 2.0 * a + e_x)
    a2 = 1 - a
    x2 = 2.0 * a2 + e_x
    y2 = -0.5 * x2 + e_y
    cf = pair.counterfactual
    np.testing.assert_allclose(cf.col("A"), a2)
    np.testing.assert_allclose(cf.col("X"), x2, rtol=0, atol=1e-12)
    np.testing.assert_allclose(cf.col("Y"), y2, rtol=0, atol=1e-12)
    np.testing.assert_array_equal(pair.intervention[:, 0], a)
    np.testing.assert_array_equal(pair.intervention[:, 1], a2)


def random_sems(count, nonlinear=False):
    out = []
    for i in range(count):
        dag = random_er_dag(8, 14, seed=100 + i)
        s, y = choose_roles(dag, 100 + i)
        sampler = sample_nonlinear_sem if nonlinear else sample_sem
        out.append(sampler(dag, s, y, seed=100 + i))
    return out


@pytest.mark.parametrize("nonlinear", [False, True])
def test_involution_and_immutability(nonlinear):
    for k, sem in enumerate(random_sems(20, nonlinear)):
        data = generate_data(sem, 200, seed=k)
        cf = generate_counterfactual(sem, data).counterfactual
        back = generate_counterfactual(sem, cf).counterfactual
        assert np.array_equal(back.rows, data.rows)
        desc = directed_descendants(sem.dag, sem.sensitive)
        for v in data.columns:
            if v not in desc:
                assert np.array_equal(cf.col(v), data.col(v))


def test_counterfactual_requires_noise():
    sem = random_sems(1)[0]
    data = generate_data(sem, 10, seed=0)
    with pytest.raises(NoNoiseRetained):
        generate_counterfactual(sem, Dataset(data.columns, data.rows))
    with pytest.raises(SchemaMismatch):
        generate_counterfactual(sem, Dataset(data.columns[:-1], data.rows[:, :-1], data.noise[:, :-1]))


def test_columns_follow_topological_order():
    sem = random_sems(1)[0]
    data = generate_data(sem, 5, seed=0)
    pos = {v: i for i, v in enumerate(data.columns)}
    for u, v in sem.dag.directed_edges:
        assert pos[u] < pos[v]


def test_generation_is_deterministic():
    sem = random_sems(1)[0]
    a, b = generate_data(sem, 100, seed=7), generate_data(sem, 100, seed=7)
    assert np.array_equal(a.rows, b.rows) and np.array_equal(a.noise, b.noise)
    assert not np.array_equal(a.rows, generate_data(sem, 100, seed=8).rows)


def test_all_linear_nonlinear_equals_linear():
    dag = random_er_dag(6, 8, seed=2)
    s, y = choose_roles(dag, 2)
    lin = sample_sem(dag, s, y, seed=2)
    plain = SEM(dag, lin.weights, lin.noise_scale, s, y,
                inner={v: ("linear",) for v in dag.vertices},
                outer={v: "linear" for v in dag.vertices},
                noise_kind={v: "gaussian" for v in dag.vertices})
    assert plain.is_linear
    assert np.array_equal(generate_data(plain, 300, 2).rows, generate_data(lin, 300, 2).rows)


def test_absolute_outer_is_non_negative():
    dag = PDAG(directed=[("S", "Y"), ("R", "Y")])
    sem = SEM(dag, {("S", "Y"): 1.0, ("R", "Y"): 1.0}, {v: 1.0 for v in "SRY"}, "S", "Y",
              outer={"R": "absolute"})
    assert (generate_data(sem, 1000, 0).col("R") >= 0).all()


def test_nonlinear_values_are_finite_and_deterministic():
    dag = random_er_dag(10, 20, seed=6)
    s, y = choose_roles(dag, 6)
    sem, data = generate_nonlinear(dag, s, y, seed=6, n=500)
    assert not sem.is_linear
    assert np.isfinite(data.rows).all()
    _, again = generate_nonlinear(dag, s, y, seed=6, n=500)
    assert np.array_equal(data.rows, again.rows)
