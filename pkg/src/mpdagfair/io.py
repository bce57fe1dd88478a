"""Graph text format and dataset CSV files.

Graph files hold one statement per line::

    # comment
    node A
    A -> B
    B -- C
"""

from __future__ import annotations

import csv
import os
import re
from pathlib import Path

import numpy as np

from .errors import DuplicateAdjacency, ParseError, SchemaMismatch
from .graph import PDAG
from .scm import Dataset

_NAME = r"[A-Za-z0-9_]+"
_EDGE = re.compile(rf"^({_NAME})\s*(->|--)\s*({_NAME})$")
_NODE = re.compile(rf"^node\s+({_NAME})$")


def _statements(text: str):
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line


def parse_graph(text: str) -> PDAG:
    vertices, directed, undirected = [], [], []
    seen = {}
    for lineno, line in _statements(text):
        m = _NODE.match(line)
        if m:
            vertices.append(m.group(1))
            continue
        m = _EDGE.match(line)
        if not m:
            raise ParseError(f"cannot parse {line!r}", lineno)
        u, op, v = m.groups()
        if u == v:
            raise ParseError(f"self-loop on {u}", lineno)
        key = frozenset((u, v))
        if key in seen:
            raise DuplicateAdjacency(f"line {lineno}: {u} and {v} already joined on line {seen[key]}")
        seen[key] = lineno
        vertices.extend((u, v))
        (directed if op == "->" else undirected).append((u, v))
    return PDAG(vertices, directed, undirected)


def parse_graph_file(path) -> PDAG:
    return parse_graph(Path(path).read_text(encoding="utf-8"))


def parse_background_text(text: str) -> list:
    edges = []
    seen = set()
    for lineno, line in _statements(text):
        m = _EDGE.match(line)
        if not m or m.group(2) != "->":
            raise ParseError(f"background knowledge takes only 'A -> B' lines, got {line!r}", lineno)
        u, _, v = m.groups()
        if u == v:
            raise ParseError(f"self-loop on {u}", lineno)
        if (u, v) in seen:
            raise DuplicateAdjacency(f"line {lineno}: duplicate background edge {u} -> {v}")
        seen.add((u, v))
        edges.append((u, v))
    return edges


def parse_background(path) -> list:
    return parse_background_text(Path(path).read_text(encoding="utf-8"))


def format_graph(graph: PDAG) -> str:
    lines = [f"node {v}" for v in graph.vertices]
    lines += [f"{u} -> {v}" for u, v in graph.sorted_directed()]
    lines += [f"{u} -- {v}" for u, v in graph.undirected_edges]
    return "\n".join(lines) + "\n"


def write_graph(graph: PDAG, path) -> None:
    Path(path).write_text(format_graph(graph), encoding="utf-8")


def noise_path(path) -> Path:
    path = Path(path)
    stem = path.name[:-4] if path.name.endswith(".csv") else path.name
    return path.with_name(stem + ".noise.csv")


def _write_matrix(path, columns, matrix):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in matrix:
            w.writerow([repr(float(x)) for x in row])


def _read_matrix(path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        rows = []
        for lineno, rec in enumerate(reader, start=2):
            if not rec:
                continue
            if len(rec) != len(header):
                raise ParseError(f"{path}: expected {len(header)} fields, got {len(rec)}", lineno)
            try:
                rows.append([float(x) for x in rec])
            except ValueError as exc:
                raise ParseError(f"{path}: {exc}", lineno) from None
    matrix = np.array(rows, dtype=float).reshape(len(rows), len(header))
    return [h.strip() for h in header], matrix


def write_csv(data: Dataset, path, with_noise: bool = True) -> None:
    _write_matrix(path, data.columns, data.rows)
    if with_noise and data.noise is not None:
        _write_matrix(noise_path(path), data.columns, data.noise)


def read_csv(path, with_noise: bool = True) -> Dataset:
    """Read a dataset, picking up the ``.noise.csv`` companion if present."""
    columns, rows = _read_matrix(path)
    noise = None
    npath = noise_path(path)
    if with_noise and os.path.exists(npath):
        ncols, noise = _read_matrix(npath)
        if ncols != columns or noise.shape != rows.shape:
            raise SchemaMismatch(f"{npath} does not match {path}")
    return Dataset(columns, rows, noise)
