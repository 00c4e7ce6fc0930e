"""Simplicial complexes, GF(2) homology and the two-space ladder module.

The front end of the pipeline: read point clouds, build Vietoris-Rips
complexes, compute homology bases with explicit cycle representatives and
the maps induced by inclusions, and assemble the CL(fb) module

    H(Xs) -> H(Xs u Ys) <- H(Ys)
      ^          ^          ^
    H(Xr) -> H(Xr u Yr) <- H(Yr)
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

import numpy as np

from .exactla import Matrix, kernel_arr, row_echelon_arr, solve_arr
from .ladder import LadderRep, check_valid

Simplex = tuple


class InclusionError(ValueError):
    """A complex that should be a subcomplex is not."""


class PointCloudError(ValueError):
    pass


@dataclass(frozen=True)
class SimplicialComplex:
    """Face-closed set of simplices; each simplex is a sorted label tuple."""

    simplices: frozenset = field(default_factory=frozenset)

    @classmethod
    def from_simplices(cls, simplices: Iterable[Sequence[Hashable]]) -> "SimplicialComplex":
        """Closure of the given simplices under taking faces."""
        out: set[tuple] = set()
        for s in simplices:
            s = tuple(sorted(set(s)))
            if not s or s in out:
                continue
            for k in range(1, len(s) + 1):
                out.update(itertools.combinations(s, k))
        return cls(frozenset(out))

    @property
    def dim(self) -> int:
        return max((len(s) - 1 for s in self.simplices), default=-1)

    def by_dim(self, k: int) -> list[tuple]:
        """The k-simplices in a fixed sorted order (this order indexes chains)."""
        return sorted((s for s in self.simplices if len(s) == k + 1), key=_sort_key)

    def vertices(self) -> list:
        return [s[0] for s in self.by_dim(0)]

    def maximal(self) -> list[tuple]:
        faces = set()
        for s in self.simplices:
            faces.update(itertools.combinations(s, len(s) - 1))
        return sorted((s for s in self.simplices if s not in faces), key=_sort_key)

    def issubset(self, other: "SimplicialComplex") -> bool:
        return self.simplices <= other.simplices

    def __len__(self):
        return len(self.simplices)


def _sort_key(s: tuple):
    return (len(s), tuple((type(x).__name__, x) for x in s))


def union_complex(x: SimplicialComplex, y: SimplicialComplex) -> SimplicialComplex:
    return SimplicialComplex(x.simplices | y.simplices)


@dataclass(frozen=True)
class PointCloud:
    """Labeled points in R^3.  ``raw`` keeps the coordinate strings as read."""

    labels: tuple[str, ...]
    coords: np.ndarray
    raw: tuple[tuple[str, str, str], ...] = ()

    def __post_init__(self):
        if len(set(self.labels)) != len(self.labels):
            raise PointCloudError("point labels must be unique")
        if self.coords.shape != (len(self.labels), 3):
            raise PointCloudError(f"expected {len(self.labels)} x 3 coordinates, got {self.coords.shape}")


def read_point_cloud(path) -> PointCloud:
    """Read ``label,x,y,z`` lines.  A header line starting with ``label`` is
    skipped, as are blank lines."""
    labels, raw = [], []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if lineno == 1 and row[0].strip().lower() == "label":
                continue
            if len(row) != 4:
                raise PointCloudError(f"{path}:{lineno}: expected label,x,y,z")
            label, *xyz = (c.strip() for c in row)
            try:
                [float(c) for c in xyz]
            except ValueError:
                raise PointCloudError(f"{path}:{lineno}: non-numeric coordinate") from None
            labels.append(label)
            raw.append(tuple(xyz))
    if not labels:
        raise PointCloudError(f"{path}: no points")
    coords = np.array([[float(c) for c in r] for r in raw], dtype=float)
    return PointCloud(tuple(labels), coords, tuple(raw))


def write_point_cloud(pc: PointCloud, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["label", "x", "y", "z"])
        for label, row in zip(pc.labels, pc.raw or [tuple(repr(float(c)) for c in r) for r in pc.coords]):
            w.writerow([label, *row])


def vietoris_rips(pc: PointCloud, alpha: float, maxdim: int = 2) -> SimplicialComplex:
    """Simplices of dimension <= maxdim whose pairwise distances are all
    <= 2 * alpha (edge length is compared with the diameter 2 alpha)."""
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    n = len(pc.labels)
    diff = pc.coords[:, None, :] - pc.coords[None, :, :]
    dist = np.sqrt((diff**2).sum(axis=-1))
    adj = dist <= 2 * alpha
    labels = pc.labels
    out: set[tuple] = {(lab,) for lab in labels}
    # grow cliques in increasing index order
    frontier = [(i,) for i in range(n)]
    for _ in range(maxdim):
        nxt = []
        for c in frontier:
            for j in range(c[-1] + 1, n):
                if all(adj[i, j] for i in c):
                    nxt.append(c + (j,))
        if not nxt:
            break
        out.update(tuple(sorted(labels[i] for i in c)) for c in nxt)
        frontier = nxt
    return SimplicialComplex(frozenset(out))


def boundary_matrix(cx: SimplicialComplex, k: int) -> np.ndarray:
    """GF(2) boundary C_k -> C_{k-1} in the ``by_dim`` orderings."""
    rows = cx.by_dim(k - 1) if k > 0 else []
    cols = cx.by_dim(k)
    index = {s: i for i, s in enumerate(rows)}
    d = np.zeros((len(rows), len(cols)), dtype=np.int64)
    if k == 0:
        return d
    for j, s in enumerate(cols):
        for face in itertools.combinations(s, k):
            d[index[face], j] = 1
    return d


@dataclass(frozen=True)
class HomologyBasis:
    """Cycle representatives (columns, over GF(2)) of a basis of H_degree."""

    complex: SimplicialComplex
    degree: int
    cycles: np.ndarray

    @property
    def rank(self) -> int:
        return self.cycles.shape[1]


def homology_basis(cx: SimplicialComplex, degree: int) -> HomologyBasis:
    """Basis of ker d_l / im d_{l+1}: cycles independent modulo boundaries."""
    n = len(cx.by_dim(degree))
    z = kernel_arr(boundary_matrix(cx, degree), 2) if degree > 0 else np.eye(n, dtype=np.int64)
    b = boundary_matrix(cx, degree + 1)
    aug = np.concatenate([b, z], axis=1)
    if aug.shape[0] == 0:
        return HomologyBasis(cx, degree, np.zeros((0, 0), dtype=np.int64))
    _, _, piv = row_echelon_arr(aug, 2)
    keep = [c - b.shape[1] for c in piv if c >= b.shape[1]]
    return HomologyBasis(cx, degree, z[:, keep].copy())


def _push_chains(chains: np.ndarray, src: list[tuple], dst: list[tuple]) -> np.ndarray:
    index = {s: i for i, s in enumerate(dst)}
    out = np.zeros((len(dst), chains.shape[1]), dtype=np.int64)
    for i, s in enumerate(src):
        if s not in index:
            raise InclusionError(f"simplex {s} is missing from the larger complex")
        out[index[s]] = chains[i]
    return out


def induced_map(bx: HomologyBasis, by: HomologyBasis) -> Matrix:
    """Matrix of H(X) -> H(Y) for X a subcomplex of Y, in the given bases."""
    if bx.degree != by.degree:
        raise ValueError("degrees differ")
    x, y = bx.complex, by.complex
    if not x.issubset(y):
        raise InclusionError("source complex is not a subcomplex of the target")
    ell = bx.degree
    z = _push_chains(bx.cycles, x.by_dim(ell), y.by_dim(ell))
    if bx.rank == 0 or by.rank == 0:
        return Matrix.zeros(by.rank, bx.rank, 2)
    a = np.concatenate([by.cycles, boundary_matrix(y, ell + 1)], axis=1)
    sol = solve_arr(a, z, 2)
    if sol is None:
        raise AssertionError("inclusion-induced map has no solution; the cycle is not a cycle in Y")
    return Matrix.wrap(sol[: by.rank].copy(), 2)


def assemble_clfb(xr: SimplicialComplex, yr: SimplicialComplex, xs: SimplicialComplex, ys: SimplicialComplex, degree: int) -> LadderRep:
    """CL(fb) module of H_degree over (Xr, Xr u Yr, Yr, Xs, Xs u Ys, Ys)."""
    if not xr.issubset(xs) or not yr.issubset(ys):
        raise InclusionError("need Xr in Xs and Yr in Ys")
    spaces = [xr, union_complex(xr, yr), yr, xs, union_complex(xs, ys), ys]
    bases = [homology_basis(c, degree) for c in spaces]
    maps = {}
    for name, s, t in (("f12", 1, 2), ("f32", 3, 2), ("f14", 1, 4), ("f36", 3, 6), ("f25", 2, 5), ("f45", 4, 5), ("f65", 6, 5)):
        maps[name] = induced_map(bases[s - 1], bases[t - 1])
    rep = LadderRep("fb", 2, tuple(b.rank for b in bases), maps)
    return check_valid(rep)


def two_space_module(px: PointCloud, py: PointCloud, r: float, s: float, degree: int = 1, maxdim: int | None = None) -> LadderRep:
    """Vietoris-Rips ladder module of two point clouds identified by label."""
    if r > s:
        raise ValueError("need r <= s")
    if set(px.labels) != set(py.labels):
        raise PointCloudError("point clouds must share the same labels")
    md = degree + 1 if maxdim is None else maxdim
    xr, xs = vietoris_rips(px, r, md), vietoris_rips(px, s, md)
    yr, ys = vietoris_rips(py, r, md), vietoris_rips(py, s, md)
    return assemble_clfb(xr, yr, xs, ys, degree)
