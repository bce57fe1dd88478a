"""Command-line front end.

Exit codes: 0 success, 2 malformed input, 3 violated precondition,
4 internal guard (for example an equivalence class too large to enumerate).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import io as gio
from .ancestry import AncestralRelation, classify_all, classify_relation, classify_root, find_critical_set, group_relations
from .equivalence import MaxOrientedGraph, construct_mpdag, dag_to_cpdag, enumerate_equivalent_dags, meek_closure
from .errors import FormatError, MPDAGError
from .experiment import ExperimentConfig, parse_config_text, report_json, run_experiment, write_outputs
from .fairness import METHODS, FairnessMethod, evaluate_methods, select_features, train_test_split
from .scm import (
    choose_roles,
    generate_counterfactual,
    generate_data,
    make_rng,
    random_er_dag,
    sample_nonlinear_sem,
    sample_sem,
    CounterfactualPair,
)

RELATION_ORDER = (
    AncestralRelation.DEFINITE_DESCENDANT,
    AncestralRelation.POSSIBLE_DESCENDANT,
    AncestralRelation.DEFINITE_NON_DESCENDANT,
)


def _emit(args, payload, text):
    out = report_json(payload) if args.format == "json" else text
    if not out.endswith("\n"):
        out += "\n"
    sys.stdout.write(out)


def _load_mpdag(path):
    graph = gio.parse_graph_file(path)
    return MaxOrientedGraph(graph, role="MPDAG")


def cmd_classify(args):
    g = _load_mpdag(args.graph)
    rel = classify_relation(g, args.source, args.target)
    _emit(args, {"source": args.source, "target": args.target, "relation": rel.value}, rel.value)


def cmd_critical_set(args):
    g = _load_mpdag(args.graph)
    members = sorted(find_critical_set(g, args.source, args.target))
    _emit(args, {"source": args.source, "target": args.target, "critical_set": members}, " ".join(members))


def cmd_classify_all(args):
    g = _load_mpdag(args.graph)
    rels = classify_root(g, args.source) if args.root else classify_all(g, args.source)
    groups = group_relations(g, rels)
    payload = {r.value: groups[r] for r in RELATION_ORDER}
    text = "\n".join(f"{r.value}: {' '.join(groups[r])}".rstrip() for r in RELATION_ORDER)
    _emit(args, {"source": args.source, "relations": payload}, text)


def _graph_payload(graph):
    return {
        "vertices": list(graph.vertices),
        "directed": [list(e) for e in graph.sorted_directed()],
        "undirected": [list(e) for e in graph.undirected_edges],
    }


def cmd_cpdag(args):
    cpdag = dag_to_cpdag(gio.parse_graph_file(args.graph)).graph
    _emit(args, _graph_payload(cpdag), gio.format_graph(cpdag))


def cmd_mpdag(args):
    base = meek_closure(gio.parse_graph_file(args.graph))
    bk = gio.parse_background(args.background) if args.background else []
    mpdag = construct_mpdag(base, bk).graph
    _emit(args, _graph_payload(mpdag), gio.format_graph(mpdag))


def cmd_enumerate(args):
    dags = enumerate_equivalent_dags(_load_mpdag(args.graph))
    payload = {"count": len(dags), "dags": [[list(e) for e in d.sorted_directed()] for d in dags]}
    text = "\n".join(gio.format_graph(d) for d in dags)
    _emit(args, payload, f"# {len(dags)} DAGs\n" + text)


def cmd_simulate(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    dag = random_er_dag(args.nodes, args.edges, args.seed)
    sensitive, outcome = choose_roles(dag, args.seed)
    sensitive = args.sensitive or sensitive
    outcome = args.outcome or outcome
    sampler = sample_nonlinear_sem if args.nonlinear else sample_sem
    sem = sampler(dag, sensitive, outcome, args.seed, args.arity)
    data = generate_data(sem, args.n, args.seed)
    pair = generate_counterfactual(sem, data)
    gio.write_graph(dag, out / "dag.txt")
    gio.write_graph(dag_to_cpdag(dag).graph, out / "cpdag.txt")
    gio.write_csv(data, out / "data.csv")
    gio.write_csv(pair.counterfactual, out / "counterfactual.csv")
    meta = {
        "sensitive": sensitive,
        "outcome": outcome,
        "arity": args.arity,
        "seed": args.seed,
        "nonlinear": bool(args.nonlinear),
        "weights": {f"{u}->{v}": w for (u, v), w in sorted(sem.weights.items())},
    }
    if args.nonlinear:
        meta["mechanisms"] = {
            v: {"inner": list(sem.inner[v]), "outer": sem.outer[v], "noise": sem.noise_kind[v]}
            for v in dag.vertices
        }
    (out / "meta.json").write_text(report_json(meta), encoding="utf-8")
    _emit(args, {"out": str(out), **meta}, f"wrote {out}")


def _methods(names):
    if not names:
        return list(METHODS)
    return [FairnessMethod.parse(n) for n in names]


def cmd_select(args):
    g = _load_mpdag(args.graph) if args.graph else None
    dag = gio.parse_graph_file(args.dag) if args.dag else None
    nodes = (g.graph if g else dag).vertices
    chosen = {}
    for m in _methods(args.method):
        chosen[m.value] = select_features(m, g, dag, sensitive=args.sensitive, outcome=args.outcome, all_nodes=nodes)
    text = "\n".join(f"{m}: {' '.join(f)}".rstrip() for m, f in chosen.items())
    _emit(args, chosen, text)


def cmd_evaluate(args):
    factual = gio.read_csv(args.data, with_noise=False)
    cf = gio.read_csv(args.counterfactual, with_noise=False)
    g = _load_mpdag(args.graph) if args.graph else None
    dag = gio.parse_graph_file(args.dag) if args.dag else None
    nodes = list(factual.columns)
    methods = [m for m in _methods(args.method)
               if not (m is FairnessMethod.ORACLE and dag is None)
               and not (m in (FairnessMethod.FAIR, FairnessMethod.FAIR_RELAX) and g is None)]
    feature_sets = {
        m: select_features(m, g, dag, sensitive=args.sensitive, outcome=args.outcome, all_nodes=nodes)
        for m in methods
    }
    train, test = train_test_split(len(factual), make_rng(args.seed, 11), args.split)
    pair = CounterfactualPair(factual, cf, None)
    scores = evaluate_methods(pair, args.outcome, feature_sets, train, test)
    report = {
        "methods": {
            m.value: {
                "rmse": {"mean": round(s["rmse"], 10), "std": 0.0},
                "unfairness": {"mean": round(s["unfairness"], 10), "std": 0.0},
                "features": feature_sets[m],
            }
            for m, s in scores.items()
        },
        "seeds": [args.seed],
        "config": {"data": args.data, "counterfactual": args.counterfactual, "sensitive": args.sensitive,
                   "outcome": args.outcome, "split": args.split},
    }
    text = "\n".join(
        f"{m}: rmse={v['rmse']['mean']:.6f} unfairness={v['unfairness']['mean']:.6f}"
        for m, v in report["methods"].items()
    )
    _emit(args, report, text)


def cmd_experiment(args):
    mapping = parse_config_text(Path(args.config).read_text(encoding="utf-8")) if args.config else {}
    overrides = {
        "node_counts": args.nodes, "replicates": args.replicates, "n": args.n,
        "background_fractions": args.background, "nonlinear": args.nonlinear or None,
        "workers": args.workers, "arity": args.arity,
    }
    mapping.update({k: v for k, v in overrides.items() if v is not None})
    if args.seed is not None:
        mapping["seed"] = args.seed
    if args.full_scale:
        mapping["replicates"] = 100
    config = ExperimentConfig.from_mapping(mapping)
    result = run_experiment(config)
    if args.out:
        write_outputs(result, args.out)
    report = result["report"]
    lines = []
    for key, s in report["settings"].items():
        lines.append(key)
        for m, v in s["methods"].items():
            lines.append(f"  {m:<10} unfairness {v['unfairness']['mean']:.3f}±{v['unfairness']['std']:.3f}"
                         f"  rmse {v['rmse']['mean']:.3f}±{v['rmse']['std']:.3f}")
    _emit(args, report, "\n".join(lines))


def _csv_list(kind):
    def parse(text):
        return [kind(x) for x in text.split(",") if x.strip()]
    return parse


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--out", default=None, help="output directory")

    parser = argparse.ArgumentParser(prog="mpdagfair", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=func)
        return p

    p = add("classify", cmd_classify, "ancestral relation of a target to a source")
    p.add_argument("--graph", required=True)
    p.add_argument("--source", required=True)
    p.add_argument("--target", required=True)

    p = add("critical-set", cmd_critical_set, "critical set of a source with respect to a target")
    p.add_argument("--graph", required=True)
    p.add_argument("--source", required=True)
    p.add_argument("--target", required=True)

    p = add("classify-all", cmd_classify_all, "relations of every vertex to a source")
    p.add_argument("--graph", required=True)
    p.add_argument("--source", required=True)
    p.add_argument("--root", action="store_true", help="use the root-node fast path")

    p = add("cpdag", cmd_cpdag, "CPDAG of a DAG")
    p.add_argument("--graph", required=True)

    p = add("mpdag", cmd_mpdag, "MPDAG from a CPDAG and background knowledge")
    p.add_argument("--graph", required=True)
    p.add_argument("--background")

    p = add("enumerate", cmd_enumerate, "all DAGs represented by an MPDAG")
    p.add_argument("--graph", required=True)

    p = add("simulate", cmd_simulate, "random DAG, SEM data and counterfactuals")
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--edges", type=int, required=True)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--arity", type=int, default=2)
    p.add_argument("--nonlinear", action="store_true")
    p.add_argument("--sensitive")
    p.add_argument("--outcome")

    p = add("select", cmd_select, "features chosen by each method")
    p.add_argument("--graph", help="MPDAG file")
    p.add_argument("--dag", help="true DAG file (Oracle)")
    p.add_argument("--sensitive", required=True)
    p.add_argument("--outcome", required=True)
    p.add_argument("--method", action="append")

    p = add("evaluate", cmd_evaluate, "RMSE and unfairness on a dataset pair")
    p.add_argument("--data", required=True)
    p.add_argument("--counterfactual", required=True)
    p.add_argument("--graph", help="MPDAG file")
    p.add_argument("--dag", help="true DAG file (Oracle)")
    p.add_argument("--sensitive", required=True)
    p.add_argument("--outcome", required=True)
    p.add_argument("--split", type=float, default=0.8)
    p.add_argument("--method", action="append")

    p = add("experiment", cmd_experiment, "synthetic replication harness")
    p.add_argument("--config", help="JSON or key=value file")
    p.add_argument("--nodes", type=_csv_list(int))
    p.add_argument("--replicates", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--background", type=_csv_list(float), help="background fractions, comma separated")
    p.add_argument("--arity", choices=("2", "3", "random"))
    p.add_argument("--nonlinear", action="store_true")
    p.add_argument("--workers", type=int)
    p.add_argument("--full-scale", action="store_true", help="100 replicates per setting")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command != "experiment" and args.seed is None:
        args.seed = 0
    if args.command == "simulate" and args.out is None:
        parser.error("simulate needs --out")
    try:
        args.func(args)
    except MPDAGError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return FormatError.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
