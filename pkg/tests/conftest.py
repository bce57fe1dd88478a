import sys
from pathlib import Path

import pytest

from mpdagfair.equivalence import MaxOrientedGraph, construct_mpdag, dag_to_cpdag
from mpdagfair.graph import PDAG

sys.path.insert(0, str(Path(__file__).parent))


def worked_graph():
    """Worked-example MPDAG with source A (critical sets {B,C} and {B,C,D})."""
    return PDAG(
        "ABCDEFH",
        directed=[("B", "F"), ("C", "F"), ("C", "H"), ("D", "F"), ("E", "F")],
        undirected=[("A", "B"), ("A", "C"), ("A", "D"), ("A", "H"),
                    ("B", "C"), ("B", "E"), ("C", "D"), ("C", "E")],
    )


def sim_dag():
    return PDAG(
        "ABCDEFHIKY",
        [("A", "C"), ("A", "E"), ("A", "H"), ("A", "K"), ("B", "D"), ("B", "F"),
         ("C", "I"), ("C", "Y"), ("D", "I"), ("H", "E"), ("E", "Y"), ("E", "K"),
         ("F", "I"), ("H", "Y"), ("I", "Y")],
    )


def sim_cpdag():
    return PDAG(
        "ABCDEFHIKY",
        directed=[("C", "I"), ("C", "Y"), ("D", "I"), ("E", "Y"), ("F", "I"), ("H", "Y"), ("I", "Y")],
        undirected=[("A", "C"), ("A", "E"), ("A", "H"), ("A", "K"), ("B", "D"), ("B", "F"),
                    ("E", "H"), ("E", "K")],
    )


def sim_mpdag():
    return PDAG(
        "ABCDEFHIKY",
        directed=[("C", "I"), ("C", "Y"), ("D", "I"), ("E", "Y"), ("E", "K"), ("F", "I"),
                  ("H", "Y"), ("I", "Y")],
        undirected=[("A", "C"), ("A", "E"), ("A", "H"), ("A", "K"), ("B", "D"), ("B", "F"), ("E", "H")],
    )


@pytest.fixture
def worked():
    return MaxOrientedGraph(worked_graph())


@pytest.fixture
def sim():
    dag = sim_dag()
    cpdag = dag_to_cpdag(dag)
    return dag, cpdag, construct_mpdag(cpdag, [("E", "K")])
