from __future__ import annotations

import itertools
import json

import numpy as np
import pytest

from ladder_persist import _clfb_table
from ladder_persist.arq import (
    DisconnectedError,
    PersistenceDiagram,
    UnsupportedShapeError,
    an_ar_quiver,
    bottleneck_distance,
    clfb_ar_quiver,
    clfb_canonical,
    extend,
    extended_quiver,
    flip_dimvec,
    get_quiver,
    graph_distance,
    interval_id,
    table_checksum,
    to_dot,
    to_json,
)
from ladder_persist.ladder import validate

# Almost-split sequences 0 -> L -> (+) M -> N -> 0 of CL(fb), transcribed
# from the text, as (L, middle terms, N).
MESHES = [
    ("000010", ["010010", "000110", "000011"], "010121"),
    ("010010", ["010121"], "000111"),
    ("000110", ["010121"], "010011"),
    ("000011", ["010121"], "010110"),
    ("010121", ["010011", "000111", "010110"], "010111"),
    ("010011", ["010111", "011011"], "011111"),
    ("000111", ["010111"], "010000"),
    ("010110", ["010111", "110110"], "110111"),
    ("010111", ["011111", "010000", "110111"], "121111"),
    ("011011", ["011111"], "000100"),
    ("110110", ["110111"], "000001"),
    ("011111", ["121111", "000100"], "110100"),
    ("010000", ["121111"], "111111"),
    ("110111", ["121111", "000001"], "011001"),
    ("121111", ["110100", "111111", "011001"], "111101"),
    ("000100", ["110100"], "110000"),
    ("000001", ["011001"], "011000"),
    ("110100", ["110000", "111101"], "111001"),
    ("011001", ["111101", "011000"], "111100"),
    ("110000", ["111001"], "001001"),
    ("111101", ["111001", "111100"], "111000"),
    ("011000", ["111100"], "100100"),
    ("111001", ["001001", "111000"], "001000"),
    ("111100", ["111000", "100100"], "100000"),
]


def dv(vid):
    return np.array([int(c) for c in vid])


def test_mesh_dimension_identity():
    for left, mid, right in MESHES:
        assert (dv(left) + dv(right) == sum(dv(m) for m in mid)).all(), (left, right)


def test_table_matches_meshes():
    derived = set()
    for left, mid, right in MESHES:
        for m in mid:
            derived.add((left, m))
            derived.add((m, right))
    assert derived == set(_clfb_table.ARROWS)
    assert len(derived) == 46
    verts = {v for a in derived for v in a}
    assert verts == set(_clfb_table.VERTICES)


def test_table_checksum():
    assert table_checksum(_clfb_table.VERTICES, _clfb_table.ARROWS) == _clfb_table.CHECKSUM


def test_clfb_quiver_basics():
    q = clfb_ar_quiver()
    assert len(q.vertices) == 30 and len(q.arrows) == 46
    assert len({v.dimvec for v in q.vertices}) == 30
    assert sorted(v.id for v in q.vertices if v.simple) == sorted(
        ["100000", "010000", "001000", "000100", "000010", "000001"]
    )


def test_up_down_symmetry():
    q = clfb_ar_quiver()
    ids = set(q.ids)

    def f(vid):
        return "".join(map(str, flip_dimvec(dv(vid))))

    assert {f(v) for v in ids} == ids
    assert {(f(s), f(t)) for s, t in q.arrows} == set(q.arrows)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_canonical_reps_validate(p):
    q = clfb_ar_quiver()
    for vid in q.ids:
        rep = clfb_canonical(vid, p)
        assert validate(rep) is None
        assert "".join(map(str, rep.dims)) == vid


def test_paper_two_dimensional_entries():
    a = clfb_canonical("121111")
    assert a.maps["f12"].tolist() == [[1], [0]]
    assert a.maps["f32"].tolist() == [[0], [1]]
    assert a.maps["f25"].tolist() == [[1, 1]]
    b = clfb_canonical("010121")
    assert b.maps["f45"].tolist() == [[1], [0]]
    assert b.maps["f65"].tolist() == [[0], [1]]
    assert b.maps["f25"].tolist() == [[1], [1]]


@pytest.mark.parametrize("n", [1, 2, 3, 4, 7])
def test_an_quiver(n):
    q = an_ar_quiver(n)
    assert len(q.vertices) == n * (n + 1) // 2
    e = extend(q)
    assert len(e.vertices) == n * (n + 1) // 2 + n
    for b, d in itertools.product(range(1, n + 1), repeat=2):
        if b <= d:
            assert e.vertex(interval_id(b, d)).dimvec == tuple(int(b <= i <= d) for i in range(1, n + 1))


def test_extended_distance_examples():
    e = extended_quiver("an:3")
    assert graph_distance(e, interval_id(1, 3), "Z(1)") == 3
    assert graph_distance(e, interval_id(2, 2), "Z(2)") == 1
    fb = extended_quiver("fb")
    assert len(fb.vertices) == 36
    assert graph_distance(fb, "000010", "Z(5)") == 1


def test_disconnected_raises():
    q = clfb_ar_quiver()
    from ladder_persist.arq import ARQuiver, VertexDescriptor

    lonely = ARQuiver("fb", q.vertices + (VertexDescriptor("999999", (9,) * 6),), q.arrows)
    with pytest.raises(DisconnectedError):
        graph_distance(lonely, "000010", "999999")


def test_bottleneck_examples():
    e = extended_quiver("an:3")
    a = PersistenceDiagram("an:3", {interval_id(1, 3): 1})
    empty = PersistenceDiagram("an:3", {})
    assert bottleneck_distance(a, empty, e) == 3
    assert bottleneck_distance(a, a, e) == 0
    assert bottleneck_distance(empty, empty, e) == 0
    b = PersistenceDiagram("an:3", {interval_id(1, 2): 1})
    assert bottleneck_distance(a, b, e) == 1
    with pytest.raises(ValueError):
        bottleneck_distance(a, PersistenceDiagram("fb", {}), e)


def test_diagram_semantics():
    d = PersistenceDiagram("fb", {"111111": 2, "010000": 0})
    assert d.as_dict() == {"111111": 2}
    assert d["121111"] == 0
    assert (d + d)["111111"] == 4
    assert d.dimension_total() == (2,) * 6
    with pytest.raises(ValueError):
        PersistenceDiagram("fb", {"111111": -1})


def test_unknown_shape():
    with pytest.raises(UnsupportedShapeError):
        get_quiver("fbf")


def test_dot_parses():
    pydot = pytest.importorskip("pydot")
    for q in (clfb_ar_quiver(), extended_quiver("fb"), an_ar_quiver(4)):
        (g,) = pydot.graph_from_dot_data(to_dot(q))
        nodes = {n.get_name().strip('"') for n in g.get_nodes()} - {"node", "graph", "edge"}
        assert nodes == set(q.ids)
        assert len(g.get_edges()) == len(q.arrows)
    assert '"0 1 0 / 1 2 1"' in to_dot(clfb_ar_quiver())


def test_json_export_roundtrips():
    q = clfb_ar_quiver()
    obj = json.loads(json.dumps(to_json(q)))
    assert [v["id"] for v in obj["vertices"]] == q.ids
    assert [tuple(a) for a in obj["arrows"]] == list(q.arrows)
