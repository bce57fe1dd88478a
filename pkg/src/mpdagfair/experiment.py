"""Replication harness for the synthetic fairness experiments."""

from __future__ import annotations

import csv
import hashlib
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import __version__
from .ancestry import AncestralRelation, classify_all
from .equivalence import construct_mpdag, dag_to_cpdag
from .fairness import METHODS, FairnessMethod, evaluate_methods, select_features, train_test_split
from .scm import (
    choose_roles,
    generate_counterfactual,
    generate_data,
    make_rng,
    random_er_dag,
    sample_nonlinear_sem,
    sample_sem,
)

PRECISION = 10


@dataclass
class ExperimentConfig:
    node_counts: list = field(default_factory=lambda: [10, 20, 30, 40])
    edge_factor: int = 2
    replicates: int = 20
    n: int = 1000
    split: float = 0.8
    arity: str = "random"  # "2", "3" or "random" (2 or 3 per replicate)
    seed: int = 0
    background_fractions: list = field(default_factory=lambda: [0.3])
    nonlinear: bool = False
    workers: int = 1

    def __post_init__(self):
        self.node_counts = [int(d) for d in self.node_counts]
        self.background_fractions = [float(f) for f in self.background_fractions]
        self.arity = str(self.arity)
        if not self.node_counts or min(self.node_counts) < 2:
            raise ValueError("node counts must be at least 2")
        if self.edge_factor < 0 or self.replicates < 1 or self.n < 2:
            raise ValueError("edge_factor, replicates and n must be positive")
        if not 0 < self.split < 1:
            raise ValueError("split must lie strictly between 0 and 1")
        if self.arity not in ("2", "3", "random"):
            raise ValueError("arity must be 2, 3 or random")
        if any(not 0 <= f <= 1 for f in self.background_fractions):
            raise ValueError("background fractions must lie in [0, 1]")

    @classmethod
    def from_mapping(cls, mapping: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(mapping) - known
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
        return cls(**mapping)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("workers")
        return d

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def parse_config_text(text: str) -> dict:
    """JSON object or ``key=value`` lines; list values are comma separated."""
    text = text.strip()
    if text.startswith("{"):
        return json.loads(text)
    out = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"expected key=value, got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key] = _coerce(key, value)
    return out


def _coerce(key, value):
    if key in ("node_counts", "background_fractions"):
        return [float(v) if "." in v else int(v) for v in value.split(",") if v.strip()]
    if key == "nonlinear":
        return value.lower() in ("1", "true", "yes")
    if key == "arity":
        return value
    return float(value) if "." in value else int(value)


def sample_background(dag, cpdag, fraction: float, rng) -> list:
    """True orientations of a ``fraction`` share of the CPDAG's undirected edges.

    The eligible edges are shuffled once, so for a fixed ``rng`` state the
    knowledge grows by prefixes as the fraction increases.
    """
    eligible = [e for e in dag.sorted_directed() if cpdag.graph.has_undirected(*e)]
    order = rng.permutation(len(eligible))
    k = int(np.floor(fraction * len(eligible) + 0.5))
    return [eligible[i] for i in order[:k]]


def run_replicate(config: ExperimentConfig, d: int, replicate: int) -> list[dict]:
    """One DAG and dataset, scored under every background fraction."""
    seed = int(make_rng(config.seed, d, replicate).integers(0, 2**63 - 1))
    m = min(config.edge_factor * d, d * (d - 1) // 2)
    dag = random_er_dag(d, m, seed)
    sensitive, outcome = choose_roles(dag, seed)
    rng = make_rng(seed, 10)
    arity = int(rng.choice([2, 3])) if config.arity == "random" else int(config.arity)
    sampler = sample_nonlinear_sem if config.nonlinear else sample_sem
    sem = sampler(dag, sensitive, outcome, seed, arity)
    data = generate_data(sem, config.n, seed)
    pair = generate_counterfactual(sem, data)
    train, test = train_test_split(config.n, make_rng(seed, 11), config.split)
    cpdag = dag_to_cpdag(dag)
    nodes = list(data.columns)

    rows = []
    for fraction in config.background_fractions:
        bk = sample_background(dag, cpdag, fraction, make_rng(seed, 12))
        mpdag = construct_mpdag(cpdag, bk)
        relations = classify_all(mpdag, sensitive)
        feature_sets = {
            m: select_features(m, mpdag, dag, sensitive=sensitive, outcome=outcome,
                               all_nodes=nodes, relations=relations)
            for m in METHODS
        }
        scores = evaluate_methods(pair, outcome, feature_sets, train, test)
        counts = {r.value: sum(1 for v in relations.values() if v is r) for r in AncestralRelation}
        fair = set(feature_sets[FairnessMethod.FAIR])
        relax = set(feature_sets[FairnessMethod.FAIR_RELAX])
        for method in METHODS:
            rows.append({
                "nodes": d,
                "edges": m,
                "background_fraction": fraction,
                "replicate": replicate,
                "seed": seed,
                "sensitive": sensitive,
                "outcome": outcome,
                "arity": arity,
                "background_edges": len(bk),
                "relations": counts,
                "nesting_ok": fair <= relax,
                "method": method.value,
                **scores[method],
            })
    return rows


def setting_key(d, m, fraction) -> str:
    return f"d{d}-e{m}-bk{fraction:g}"


def _round(x):
    return round(float(x), PRECISION)


def run_experiment(config: ExperimentConfig) -> dict:
    """Run every (node count, replicate) and aggregate per setting and method.

    Replicates may run in worker processes; results are reassembled in task
    order so the report does not depend on scheduling.
    """
    tasks = [(d, r) for d in config.node_counts for r in range(config.replicates)]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            futures = [pool.submit(run_replicate, config, d, r) for d, r in tasks]
            results = [f.result() for f in futures]
    else:
        results = [run_replicate(config, d, r) for d, r in tasks]
    records = [row for rows in results for row in rows]
    return {"report": aggregate(records, config), "records": records}


def aggregate(records: list, config: ExperimentConfig) -> dict:
    settings = {}
    grouped = {}
    for rec in records:
        key = setting_key(rec["nodes"], rec["edges"], rec["background_fraction"])
        grouped.setdefault(key, []).append(rec)
    for key, recs in grouped.items():
        methods = {}
        for method in METHODS:
            mine = [r for r in recs if r["method"] == method.value]
            methods[method.value] = {
                metric: {
                    "mean": _round(np.mean([r[metric] for r in mine])),
                    "std": _round(np.std([r[metric] for r in mine])),
                }
                for metric in ("rmse", "unfairness")
            }
        first = [r for r in recs if r["method"] == FairnessMethod.FULL.value]
        settings[key] = {
            "nodes": first[0]["nodes"],
            "edges": first[0]["edges"],
            "background_fraction": first[0]["background_fraction"],
            "replicates": len(first),
            "methods": methods,
            "empty_background_replicates": sorted(r["replicate"] for r in first if r["background_edges"] == 0),
            "no_possible_descendant_replicates": sorted(
                r["replicate"] for r in first
                if r["relations"][AncestralRelation.POSSIBLE_DESCENDANT.value] == 0
            ),
            "fair_subset_of_fairrelax": all(r["nesting_ok"] for r in recs),
        }
    return {
        "config": config.to_dict(),
        "provenance": {"seed": config.seed, "config_hash": config.digest(), "version": __version__},
        "seeds": sorted({r["seed"] for r in records}),
        "settings": settings,
    }


CSV_FIELDS = ("setting", "nodes", "edges", "background_fraction", "method", "replicate", "rmse", "unfairness")


def records_csv(records: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in records:
        w.writerow([
            setting_key(r["nodes"], r["edges"], r["background_fraction"]),
            r["nodes"], r["edges"], f"{r['background_fraction']:g}", r["method"], r["replicate"],
            f"{r['rmse']:.{PRECISION}f}", f"{r['unfairness']:.{PRECISION}f}",
        ])
    return buf.getvalue()


def report_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def write_outputs(result: dict, out_dir) -> tuple[Path, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rpath, cpath = out / "report.json", out / "records.csv"
    rpath.write_text(report_json(result["report"]), encoding="utf-8")
    cpath.write_text(records_csv(result["records"]), encoding="utf-8")
    return rpath, cpath
