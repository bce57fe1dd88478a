import numpy as np
import pytest

from mpdagfair import io as gio
from mpdagfair.errors import DuplicateAdjacency, ParseError, SchemaMismatch
from mpdagfair.graph import PDAG
from mpdagfair.scm import Dataset, generate_data, random_er_dag, sample_sem

from conftest import sim_mpdag


def test_parse_basic():
    g = gio.parse_graph("# demo\nnode Z\nA -> B\n\n  B -- C  \n")
    assert g == PDAG(["Z"], [("A", "B")], [("B", "C")])
    assert g.vertices == ("Z", "A", "B", "C")


def test_self_loop_reports_line():
    with pytest.raises(ParseError) as err:
        gio.parse_graph("A -> B\nC -> C\n")
    assert err.value.line == 2
    assert "line 2" in str(err.value)


def test_malformed_and_duplicate():
    with pytest.raises(ParseError):
        gio.parse_graph("A => B\n")
    with pytest.raises(DuplicateAdjacency):
        gio.parse_graph("A -> B\nB -- A\n")
    with pytest.raises(DuplicateAdjacency):
        gio.parse_graph("A -> B\nB -> A\n")


def test_round_trip(tmp_path):
    g = sim_mpdag()
    path = tmp_path / "g.txt"
    gio.write_graph(g, path)
    assert gio.parse_graph_file(path) == g
    assert gio.format_graph(gio.parse_graph_file(path)) == gio.format_graph(g)


def test_background():
    assert gio.parse_background_text("# bk\nE -> K\nA -> C\n") == [("E", "K"), ("A", "C")]
    with pytest.raises(ParseError):
        gio.parse_background_text("E -- K\n")


def test_noise_path():
    assert gio.noise_path("out/data.csv").name == "data.noise.csv"


def test_csv_round_trip(tmp_path):
    dag = random_er_dag(6, 8, seed=1)
    data = generate_data(sample_sem(dag, "X1", "X2", seed=1), 50, seed=1)
    path = tmp_path / "data.csv"
    gio.write_csv(data, path)
    back = gio.read_csv(path)
    assert back.columns == data.columns
    assert np.array_equal(back.rows, data.rows)
    assert np.array_equal(back.noise, data.noise)
    assert gio.read_csv(path, with_noise=False).noise is None


def test_csv_errors(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n1,2\n3\n")
    with pytest.raises(ParseError) as err:
        gio.read_csv(path)
    assert err.value.line == 3
    good = tmp_path / "d.csv"
    gio.write_csv(Dataset(("a",), [[1.0]], noise=[[0.0]]), good)
    gio.noise_path(good).write_text("b\n0.0\n")
    with pytest.raises(SchemaMismatch):
        gio.read_csv(good)
