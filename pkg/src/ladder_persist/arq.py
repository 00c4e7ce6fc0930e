"""Auslander-Reiten quivers, persistence diagrams and the bottleneck distance.

Two families are supported: the linear A_n quiver (vertices are the
intervals I[b,d]) and the commutative ladder CL(fb), whose 30 vertices
come from a static table (see ``_clfb_table``).  ``extend`` adds one zero
vertex Z(i) per simple S(i), with an arrow S(i) -> Z(i); distances on the
extended quiver are path lengths in the underlying undirected graph.
"""

from __future__ import annotations

import hashlib
import json
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping

import numpy as np

from . import _clfb_table
from .exactla import Matrix, check_prime
from .ladder import LadderRep, make_rep


class UnsupportedShapeError(ValueError):
    pass


class DisconnectedError(ValueError):
    pass


def table_checksum(vertices: Iterable[str], arrows: Iterable[tuple[str, str]]) -> str:
    payload = json.dumps({"vertices": list(vertices), "arrows": [list(a) for a in arrows]})
    return hashlib.sha256(payload.encode()).hexdigest()


@dataclass(frozen=True)
class VertexDescriptor:
    id: str
    dimvec: tuple[int, ...]
    simple: bool = False
    zero_index: int | None = None  # i for the zero vertex Z(i)

    @property
    def is_zero(self) -> bool:
        return self.zero_index is not None


@dataclass(frozen=True, eq=False)
class ARQuiver:
    shape: str  # "fb" or "an:<n>"
    vertices: tuple[VertexDescriptor, ...]
    arrows: tuple[tuple[str, str], ...]
    extended: bool = False
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        ids = [v.id for v in self.vertices]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate vertex ids")
        known = set(ids)
        for s, t in self.arrows:
            if s not in known or t not in known:
                raise ValueError(f"arrow {s}->{t} references an unknown vertex")
            if s == t:
                raise ValueError(f"self-loop at {s}")

    @property
    def ids(self) -> list[str]:
        return [v.id for v in self.vertices]

    def index(self, vid: str) -> int:
        idx = self._cache.get("index")
        if idx is None:
            idx = self._cache["index"] = {v.id: i for i, v in enumerate(self.vertices)}
        if vid not in idx:
            raise KeyError(f"{vid!r} is not a vertex of {self.shape}")
        return idx[vid]

    def vertex(self, vid: str) -> VertexDescriptor:
        return self.vertices[self.index(vid)]

    def by_dimvec(self, dimvec) -> VertexDescriptor:
        dv = tuple(int(x) for x in dimvec)
        for v in self.vertices:
            if v.dimvec == dv and not v.is_zero:
                return v
        raise KeyError(f"no vertex with dimension vector {dv} in {self.shape}")

    def neighbors(self, vid: str) -> list[str]:
        adj = self._cache.get("adj")
        if adj is None:
            adj = {v.id: [] for v in self.vertices}
            for s, t in self.arrows:
                adj[s].append(t)
                adj[t].append(s)
            self._cache["adj"] = adj
        return adj[vid]

    def distances_from(self, vid: str) -> dict[str, int]:
        key = ("bfs", vid)
        if key not in self._cache:
            self.index(vid)
            dist = {vid: 0}
            queue = deque([vid])
            while queue:
                u = queue.popleft()
                for w in self.neighbors(u):
                    if w not in dist:
                        dist[w] = dist[u] + 1
                        queue.append(w)
            self._cache[key] = dist
        return self._cache[key]

    def canonical_rep(self, vid: str, p: int = 2):
        """Canonical matrices of the indecomposable at ``vid``: a LadderRep
        for CL(fb), a tuple of interval maps for A_n."""
        v = self.vertex(vid)
        if v.is_zero:
            raise ValueError("zero vertices have no representative")
        if self.shape == "fb":
            return clfb_canonical(vid, p)
        n = int(self.shape.split(":")[1])
        b, d = _interval_bounds(vid)
        return interval_maps(n, b, d, "f" * (n - 1), p)


# ---------------------------------------------------------------------------
# A_n
# ---------------------------------------------------------------------------


def interval_id(b: int, d: int) -> str:
    return f"I[{b},{d}]"


def _interval_bounds(vid: str) -> tuple[int, int]:
    b, d = vid[2:-1].split(",")
    return int(b), int(d)


def interval_maps(n: int, b: int, d: int, orientation: str, p: int = 2) -> tuple[Matrix, ...]:
    """Maps of I[b,d] on an A_n quiver; map i joins vertices i and i+1
    in the direction given by ``orientation[i-1]``."""
    out = []
    for i, o in enumerate(orientation, start=1):
        s, t = (i, i + 1) if o == "f" else (i + 1, i)
        ds, dt = int(b <= s <= d), int(b <= t <= d)
        out.append(Matrix.identity(1, p) if ds and dt else Matrix.zeros(dt, ds, p))
    return tuple(out)


def an_ar_quiver(n: int) -> ARQuiver:
    """AR quiver of the equioriented A_n quiver 1 -> 2 -> ... -> n."""
    if n < 1:
        raise ValueError("n must be at least 1")
    verts = []
    for b in range(1, n + 1):
        for d in range(b, n + 1):
            dv = tuple(int(b <= i <= d) for i in range(1, n + 1))
            verts.append(VertexDescriptor(interval_id(b, d), dv, simple=b == d))
    arrows = []
    for b in range(1, n + 1):
        for d in range(b, n + 1):
            if b > 1:
                arrows.append((interval_id(b, d), interval_id(b - 1, d)))
            if b < d:
                arrows.append((interval_id(b, d), interval_id(b, d - 1)))
    return ARQuiver(f"an:{n}", tuple(verts), tuple(arrows))


# ---------------------------------------------------------------------------
# CL(fb)
# ---------------------------------------------------------------------------

FB_ARROWS = (("f12", 1, 2), ("f32", 3, 2), ("f14", 1, 4), ("f36", 3, 6), ("f25", 2, 5), ("f45", 4, 5), ("f65", 6, 5))

# the two vertices with a 2-dimensional space, and their maps
_SPECIAL = {
    "121111": {"f12": [[1], [0]], "f32": [[0], [1]], "f25": [[1, 1]]},
    "010121": {"f45": [[1], [0]], "f65": [[0], [1]], "f25": [[1], [1]]},
}


def dimvec_from_id(vid: str) -> tuple[int, ...]:
    return tuple(int(c) for c in vid)


def id_from_dimvec(dv) -> str:
    return "".join(str(int(x)) for x in dv)


def flip_dimvec(dv) -> tuple[int, ...]:
    """The left-right symmetry of the fb ladder (1<->3, 4<->6)."""
    d1, d2, d3, d4, d5, d6 = dv
    return (d3, d2, d1, d6, d5, d4)


@lru_cache(maxsize=None)
def clfb_canonical(vid: str, p: int = 2) -> LadderRep:
    check_prime(p)
    dv = dimvec_from_id(vid)
    if vid in _SPECIAL:
        spec = _SPECIAL[vid]
        maps = {}
        for name, s, t in FB_ARROWS:
            if name in spec:
                maps[name] = spec[name]
            elif dv[s - 1] and dv[t - 1]:
                maps[name] = [[1]]
        return make_rep("fb", p, dv, maps)
    maps = {name: [[1]] for name, s, t in FB_ARROWS if dv[s - 1] and dv[t - 1]}
    return make_rep("fb", p, dv, maps)


def _verify_table(vertices, arrows, checksum):
    if table_checksum(vertices, arrows) != checksum:
        raise RuntimeError("CL(fb) quiver table checksum mismatch")


@lru_cache(maxsize=1)
def clfb_ar_quiver() -> ARQuiver:
    """The AR quiver of CL(fb): 30 vertices named by dimension vector."""
    t = _clfb_table
    _verify_table(t.VERTICES, t.ARROWS, t.CHECKSUM)
    verts = tuple(
        VertexDescriptor(vid, dimvec_from_id(vid), simple=sum(dimvec_from_id(vid)) == 1) for vid in t.VERTICES
    )
    return ARQuiver("fb", verts, tuple(tuple(a) for a in t.ARROWS))


def get_quiver(shape: str) -> ARQuiver:
    if shape == "fb":
        return clfb_ar_quiver()
    if shape.startswith("an:"):
        return an_ar_quiver(int(shape[3:]))
    raise UnsupportedShapeError(f"no AR quiver for shape {shape!r}")


def extend(q: ARQuiver) -> ARQuiver:
    """Add a zero vertex Z(i) and an arrow S(i) -> Z(i) for every simple S(i)."""
    if q.extended:
        raise ValueError("quiver is already extended")
    if q.shape != "fb" and not q.shape.startswith("an:"):
        raise UnsupportedShapeError(q.shape)
    verts = list(q.vertices)
    arrows = list(q.arrows)
    simples = sorted((v for v in q.vertices if v.simple), key=lambda v: v.dimvec.index(1))
    for v in simples:
        i = v.dimvec.index(1) + 1
        z = VertexDescriptor(f"Z({i})", (0,) * len(v.dimvec), zero_index=i)
        verts.append(z)
        arrows.append((v.id, z.id))
    return ARQuiver(q.shape, tuple(verts), tuple(arrows), extended=True)


@lru_cache(maxsize=None)
def extended_quiver(shape: str) -> ARQuiver:
    return extend(get_quiver(shape))


def graph_distance(q: ARQuiver, v: str, w: str) -> int:
    q.index(w)
    dist = q.distances_from(v)
    if w not in dist:
        raise DisconnectedError(f"{v} and {w} are not connected")
    return dist[w]


# ---------------------------------------------------------------------------
# persistence diagrams
# ---------------------------------------------------------------------------


class PersistenceDiagram:
    """Multiplicity function on the vertices of an AR quiver.

    Zero counts are dropped, so two diagrams are equal iff they agree on
    every vertex.
    """

    __slots__ = ("shape", "_counts")

    def __init__(self, shape: str, counts: Mapping[str, int] | None = None):
        self.shape = shape
        clean = {}
        for k, c in (counts or {}).items():
            c = int(c)
            if c < 0:
                raise ValueError(f"negative multiplicity {c} at {k}")
            if c:
                clean[k] = clean.get(k, 0) + c
        self._counts = dict(sorted(clean.items()))

    def check_vertices(self, q: ARQuiver | None = None) -> "PersistenceDiagram":
        q = q or get_quiver(self.shape)
        for k in self._counts:
            if q.vertex(k).is_zero:
                raise KeyError(f"zero vertex {k} cannot carry multiplicity")
        return self

    def __getitem__(self, vid: str) -> int:
        return self._counts.get(vid, 0)

    def items(self):
        return self._counts.items()

    def as_dict(self) -> dict[str, int]:
        return dict(self._counts)

    def total(self) -> int:
        return sum(self._counts.values())

    def support(self) -> set[str]:
        return set(self._counts)

    def __add__(self, other: "PersistenceDiagram") -> "PersistenceDiagram":
        if other.shape != self.shape:
            raise ValueError("shape mismatch")
        c = dict(self._counts)
        for k, v in other.items():
            c[k] = c.get(k, 0) + v
        return PersistenceDiagram(self.shape, c)

    def __eq__(self, other):
        if not isinstance(other, PersistenceDiagram):
            return NotImplemented
        return self.shape == other.shape and self._counts == other._counts

    def __hash__(self):
        return hash((self.shape, tuple(self._counts.items())))

    def __repr__(self):
        return f"PersistenceDiagram({self.shape!r}, {self._counts})"

    def dimension_total(self, q: ARQuiver | None = None) -> tuple[int, ...]:
        q = q or get_quiver(self.shape)
        out = None
        for k, c in self.items():
            dv = np.array(q.vertex(k).dimvec) * c
            out = dv if out is None else out + dv
        if out is None:
            out = np.zeros(len(q.vertices[0].dimvec), dtype=int)
        return tuple(int(x) for x in out)


def _max_matching(n: int, adj: list[list[int]]) -> int:
    """Size of a maximum matching in a bipartite graph (Kuhn's algorithm)."""
    match_r = [-1] * n

    def augment(u, seen):
        for w in adj[u]:
            if not seen[w]:
                seen[w] = True
                if match_r[w] < 0 or augment(match_r[w], seen):
                    match_r[w] = u
                    return True
        return False

    return sum(augment(u, [False] * n) for u in range(n))


def _diagonal_cost(q: ARQuiver, vid: str, zeros: list[str]) -> int:
    dist = q.distances_from(vid)
    return min(dist[z] for z in zeros if z in dist)


def bottleneck_distance(d: PersistenceDiagram, e: PersistenceDiagram, q: ARQuiver) -> int:
    """Bottleneck distance of two diagrams over the extended quiver ``q``.

    Each side is padded with diagonal slots (a point matched to the
    diagonal pays its distance to the nearest zero vertex); the answer is
    the smallest pairwise cost admitting a perfect matching, found by
    binary search over the sorted costs.
    """
    if d.shape != e.shape:
        raise ValueError(f"shape mismatch: {d.shape} vs {e.shape}")
    if not q.extended or q.shape != d.shape:
        raise ValueError("bottleneck distance needs the extended quiver of the diagrams' shape")
    left = [k for k, c in d.items() for _ in range(c)]
    right = [k for k, c in e.items() for _ in range(c)]
    n = len(left) + len(right)
    if n == 0:
        return 0
    zeros = [v.id for v in q.vertices if v.is_zero]
    cost = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            if i < len(left) and j < len(right):
                cost[i, j] = graph_distance(q, left[i], right[j])
            elif i < len(left):
                cost[i, j] = _diagonal_cost(q, left[i], zeros)
            elif j < len(right):
                cost[i, j] = _diagonal_cost(q, right[j], zeros)
            else:
                cost[i, j] = 0
    levels = np.unique(cost)
    lo, hi = 0, len(levels) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        t = levels[mid]
        adj = [list(np.flatnonzero(cost[i] <= t)) for i in range(n)]
        if _max_matching(n, adj) == n:
            hi = mid
        else:
            lo = mid + 1
    return int(levels[lo])


# ---------------------------------------------------------------------------
# export
# ---------------------------------------------------------------------------


def vertex_label(v: VertexDescriptor, shape: str) -> str:
    if v.is_zero:
        return v.id
    dv = [str(x) for x in v.dimvec]
    if shape == "fb":
        return " ".join(dv[:3]) + " / " + " ".join(dv[3:])
    return " ".join(dv)


def to_dot(q: ARQuiver) -> str:
    lines = [f'digraph "{q.shape}{"+Z" if q.extended else ""}" {{']
    for v in q.vertices:
        lines.append(f'  "{v.id}" [label="{vertex_label(v, q.shape)}"];')
    for s, t in q.arrows:
        lines.append(f'  "{s}" -> "{t}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_json(q: ARQuiver) -> dict:
    return {
        "shape": q.shape,
        "extended": q.extended,
        "vertices": [
            {"id": v.id, "dimension_vector": list(v.dimvec), "simple": v.simple, "zero": v.zero_index}
            for v in q.vertices
        ],
        "arrows": [list(a) for a in q.arrows],
    }
