import numpy as np
import pytest

from layered_coreset import io
from layered_coreset.sampler import Coreset


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_points_with_weights(tmp_path):
    ps = io.read_points(write(tmp_path, "p.csv", "# header comment\n0,0\n3,4,weight=2.5\n\n1,1\n"))
    assert ps.n == 3
    assert ps.weights.tolist() == [1.0, 2.5, 1.0]
    assert ps.backend.dist(0, 1) == 5.0


@pytest.mark.parametrize("text,line", [("0,0\n1\n", 2), ("0,0\n1,x\n", 2), ("nan,1\n", 1),
                                       ("0,0\n1,1,weight=-1\n", 2)])
def test_points_errors_name_line(tmp_path, text, line):
    path = write(tmp_path, "bad.csv", text)
    with pytest.raises(io.InputError, match=rf"bad.csv:{line}:"):
        io.read_points(path)


def test_matrix(tmp_path):
    ps = io.read_matrix(write(tmp_path, "m.csv", "0,2\n2,0\n"))
    assert ps.backend.dist(0, 1) == 2.0
    with pytest.raises(io.InputError, match="symmetric"):
        io.read_matrix(write(tmp_path, "a.csv", "0,2\n1,0\n"))
    with pytest.raises(io.InputError, match=":2:"):
        io.read_matrix(write(tmp_path, "b.csv", "0,2\n2\n"))


def test_graph(tmp_path):
    ps = io.read_graph(write(tmp_path, "g.txt", "0 1 1.5\n1 2 2\n"))
    assert ps.backend.dist(0, 2) == 3.5
    with pytest.raises(io.InputError, match=":1:"):
        io.read_graph(write(tmp_path, "h.txt", "0 1\n"))
    with pytest.raises(io.InputError, match=":2:"):
        io.read_graph(write(tmp_path, "i.txt", "0 1 1\n1 2 -3\n"))
    with pytest.raises(io.InputError, match="disconnected"):
        io.read_graph(write(tmp_path, "j.txt", "0 1 1\n2 3 1\n"))


def test_curves_and_sets(tmp_path):
    text = "0,0;1,0\n0,1;1,1\n"
    assert io.read_curves(write(tmp_path, "c.txt", text)).backend.dist(0, 1) == 1.0
    assert io.read_sets(write(tmp_path, "s.txt", "0;10\n0\n")).backend.dist(0, 1) == 10.0
    with pytest.raises(io.InputError, match=":2:"):
        io.read_curves(write(tmp_path, "d.txt", "0,0;1,0\n0,1,2\n"))


def test_read_input_dispatch(tmp_path):
    path = write(tmp_path, "p.csv", "1\n2\n")
    assert io.read_input(path, "points").n == 2
    with pytest.raises(io.InputError):
        io.read_input(path, "xml")
    with pytest.raises(io.InputError, match="cannot read"):
        io.read_input(str(tmp_path / "missing.csv"), "points")


def test_coreset_round_trip(tmp_path):
    cs = Coreset.from_entries([(4, 1 / 3, "main:j=0:b=2:l=5"), (0, 2.0, "cheap"), (4, 0.1, "cheap")])
    path = str(tmp_path / "c.csv")
    io.write_coreset(cs, path)
    back = io.read_coreset(path)
    assert back.indices.tolist() == cs.indices.tolist()
    assert back.weights.tobytes() == cs.weights.tobytes()
    assert back.tags == cs.tags


@pytest.mark.parametrize("text", ["idx,weight,tag\n", "point_index,weight,group_tag\n0,0,cheap\n",
                                  "point_index,weight,group_tag\n0,1,a\n0,2,b\n",
                                  "point_index,weight,group_tag\nx,1,a\n"])
def test_coreset_errors(tmp_path, text):
    with pytest.raises(io.InputError):
        io.read_coreset(write(tmp_path, "c.csv", text))


def test_json(tmp_path):
    path = str(tmp_path / "x.json")
    io.write_json({"b": 1, "a": [1.5]}, path)
    assert io.read_json(path) == {"a": [1.5], "b": 1}
    assert open(path).read().index('"a"') < open(path).read().index('"b"')
    with pytest.raises(io.InputError):
        io.read_json(write(tmp_path, "y.json", "{"))


def test_read_points_large_values(tmp_path):
    ps = io.read_points(write(tmp_path, "p.csv", "1e300,0\n-1e300,0\n"))
    assert np.isfinite(ps.backend.coords).all()
