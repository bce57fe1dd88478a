"""Ancestral relations on MPDAGs and counterfactually fair feature selection."""

__version__ = "0.1.0"

from .ancestry import (
    AncestralRelation,
    classify_all,
    classify_relation,
    classify_root,
    find_critical_set,
)
from .equivalence import (
    MaxOrientedGraph,
    construct_mpdag,
    dag_to_cpdag,
    enumerate_equivalent_dags,
    meek_closure,
)
from .graph import (
    PDAG,
    directed_descendants,
    induces_complete_subgraph,
    is_acyclic_extension,
    is_b_possibly_causal,
    neighborhood,
)

__all__ = [
    "AncestralRelation",
    "MaxOrientedGraph",
    "PDAG",
    "classify_all",
    "classify_relation",
    "classify_root",
    "construct_mpdag",
    "dag_to_cpdag",
    "directed_descendants",
    "enumerate_equivalent_dags",
    "find_critical_set",
    "induces_complete_subgraph",
    "is_acyclic_extension",
    "is_b_possibly_causal",
    "meek_closure",
    "neighborhood",
]
