"""Representations of commutative ladders CL(tau).

Vertices of a ladder of length n are numbered 1..n on the bottom row and
n+1..2n on the top row; vertex i sits below vertex n+i.  Vertical arrows
point up (i -> n+i).  Horizontal arrows follow the orientation string, one
symbol per gap: ``f`` is i -> i+1 and ``b`` is i+1 -> i, on both rows.

For ``fb`` this gives the seven maps f12, f32, f14, f36, f25, f45, f65 and
the two squares f25 f12 = f45 f14 and f25 f32 = f65 f36.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping

import numpy as np

from .exactla import Matrix, check_prime, eye, inverse_arr, mul, rank_arr


class ShapeError(ValueError):
    """Map shapes disagree with the dimension vector or orientation."""


@dataclass(frozen=True)
class Arrow:
    name: str
    src: int
    tgt: int


@lru_cache(maxsize=None)
def ladder_arrows(orientation: str) -> tuple[Arrow, ...]:
    if not orientation or set(orientation) - {"f", "b"}:
        raise ShapeError(f"orientation must be a nonempty string over f/b, got {orientation!r}")
    n = len(orientation) + 1
    wide = 2 * n > 9

    def name(s, t):
        return f"f{s}_{t}" if wide else f"f{s}{t}"

    arrows = []
    for i, o in enumerate(orientation, start=1):
        s, t = (i, i + 1) if o == "f" else (i + 1, i)
        arrows.append(Arrow(name(s, t), s, t))
    for i, o in enumerate(orientation, start=1):
        s, t = (i, i + 1) if o == "f" else (i + 1, i)
        arrows.append(Arrow(name(s + n, t + n), s + n, t + n))
    for i in range(1, n + 1):
        arrows.append(Arrow(name(i, i + n), i, i + n))
    order = {"fb": ("f12", "f32", "f14", "f36", "f25", "f45", "f65")}.get(orientation)
    if order:
        arrows.sort(key=lambda a: order.index(a.name))
    return tuple(arrows)


@lru_cache(maxsize=None)
def ladder_squares(orientation: str) -> tuple[tuple[int, int, int, int], ...]:
    """Squares (s, t, n+t, n+s): the path s->t->n+t must equal s->n+s->n+t."""
    n = len(orientation) + 1
    out = []
    for i, o in enumerate(orientation, start=1):
        s, t = (i, i + 1) if o == "f" else (i + 1, i)
        out.append((s, t, t + n, s + n))
    return tuple(out)


def arrow_map_names(orientation: str) -> dict[tuple[int, int], str]:
    return {(a.src, a.tgt): a.name for a in ladder_arrows(orientation)}


@dataclass(frozen=True)
class LadderRep:
    """A representation of CL(orientation) over GF(p).

    ``dims[v - 1]`` is the dimension at vertex v; ``maps[name]`` is the
    matrix of the arrow, with shape (dim target, dim source).
    """

    orientation: str
    p: int
    dims: tuple[int, ...]
    maps: Mapping[str, Matrix]

    def __post_init__(self):
        check_prime(self.p)
        n = len(self.orientation) + 1
        dims = tuple(int(d) for d in self.dims)
        if len(dims) != 2 * n or any(d < 0 for d in dims):
            raise ShapeError(f"need {2 * n} nonnegative dimensions, got {self.dims}")
        object.__setattr__(self, "dims", dims)
        arrows = ladder_arrows(self.orientation)
        names = {a.name for a in arrows}
        if set(self.maps) != names:
            raise ShapeError(f"maps must be exactly {sorted(names)}, got {sorted(self.maps)}")
        maps = {}
        for a in arrows:
            m = self.maps[a.name]
            if not isinstance(m, Matrix):
                m = Matrix(m, self.p) if np.size(m) else Matrix.zeros(dims[a.tgt - 1], dims[a.src - 1], self.p)
            if m.p != self.p:
                raise ShapeError(f"{a.name} is over GF({m.p}), expected GF({self.p})")
            want = (dims[a.tgt - 1], dims[a.src - 1])
            if m.shape != want:
                raise ShapeError(f"{a.name} has shape {m.shape}, expected {want}")
            maps[a.name] = m
        object.__setattr__(self, "maps", maps)

    @property
    def n(self) -> int:
        return len(self.orientation) + 1

    def arr(self, name: str) -> np.ndarray:
        return self.maps[name].a

    def __eq__(self, other):
        if not isinstance(other, LadderRep):
            return NotImplemented
        return (
            self.orientation == other.orientation
            and self.p == other.p
            and self.dims == other.dims
            and all(self.maps[k] == other.maps[k] for k in self.maps)
        )

    def __hash__(self):
        return hash((self.orientation, self.p, self.dims))


def make_rep(orientation: str, p: int, dims, maps: Mapping[str, object] | None = None) -> LadderRep:
    """Build a rep; arrows missing from ``maps`` are zero."""
    maps = dict(maps or {})
    dims = tuple(int(d) for d in dims)
    n = len(orientation) + 1
    if len(dims) != 2 * n:
        raise ShapeError(f"need {2 * n} dimensions for CL({orientation}), got {len(dims)}")
    full = {}
    for a in ladder_arrows(orientation):
        shape = (dims[a.tgt - 1], dims[a.src - 1])
        m = maps.pop(a.name, None)
        if m is None:
            full[a.name] = Matrix.zeros(*shape, p=p)
        elif isinstance(m, Matrix):
            full[a.name] = m
        else:
            arr = np.array(m, dtype=np.int64)
            full[a.name] = Matrix(arr.reshape(shape) if arr.size == shape[0] * shape[1] else arr, p)
    if maps:
        raise ShapeError(f"unknown arrows {sorted(maps)} for orientation {orientation}")
    return LadderRep(orientation, p, dims, full)


def zero_rep(dims, p: int = 2, orientation: str = "fb") -> LadderRep:
    return make_rep(orientation, p, dims)


@dataclass(frozen=True)
class Violation:
    """A commutative square that fails; ``left`` is the path through the
    bottom row, ``right`` the path through the vertical arrow first."""

    square: tuple[int, int, int, int]
    left: Matrix
    right: Matrix

    def __str__(self):
        s, t, u, w = self.square
        return (
            f"square ({s},{t},{u},{w}) does not commute: "
            f"f{t}{u}·f{s}{t} = {self.left.tolist()} but f{w}{u}·f{s}{w} = {self.right.tolist()}"
        )


def validate(rep: LadderRep) -> Violation | None:
    """``None`` if every square commutes, else the first failing square."""
    names = arrow_map_names(rep.orientation)
    for s, t, u, w in ladder_squares(rep.orientation):
        left = rep.maps[names[(t, u)]] @ rep.maps[names[(s, t)]]
        right = rep.maps[names[(w, u)]] @ rep.maps[names[(s, w)]]
        if left != right:
            return Violation((s, t, u, w), left, right)
    return None


class ValidationError(ValueError):
    def __init__(self, violation: Violation):
        super().__init__(str(violation))
        self.violation = violation


def check_valid(rep: LadderRep) -> LadderRep:
    v = validate(rep)
    if v is not None:
        raise ValidationError(v)
    return rep


def dimension_vector(rep: LadderRep) -> tuple[int, ...]:
    return rep.dims


def _block_diag(blocks: list[np.ndarray]) -> np.ndarray:
    rows = sum(b.shape[0] for b in blocks)
    cols = sum(b.shape[1] for b in blocks)
    out = np.zeros((rows, cols), dtype=np.int64)
    r = c = 0
    for b in blocks:
        out[r : r + b.shape[0], c : c + b.shape[1]] = b
        r += b.shape[0]
        c += b.shape[1]
    return out


def direct_sum(*reps: LadderRep) -> LadderRep:
    """Block-diagonal direct sum, summands in the given order."""
    if not reps:
        raise ValueError("direct_sum needs at least one summand")
    o, p = reps[0].orientation, reps[0].p
    for r in reps:
        if r.orientation != o or r.p != p:
            raise ShapeError("direct sum needs equal orientation and field")
    dims = tuple(int(x) for x in np.sum([r.dims for r in reps], axis=0))
    maps = {
        a.name: Matrix.wrap(_block_diag([r.arr(a.name) for r in reps]), p) for a in ladder_arrows(o)
    }
    return LadderRep(o, p, dims, maps)


def conjugate(rep: LadderRep, bases: Mapping[int, np.ndarray | Matrix]) -> LadderRep:
    """Change of basis: the new basis at v is given by the columns of
    ``bases[v]`` (in old coordinates), so each map f: s -> t becomes
    ``B_t^{-1} f B_s``.  Vertices absent from ``bases`` keep their basis."""
    p = rep.p
    mats = {}
    invs = {}
    for v, b in bases.items():
        arr = b.a if isinstance(b, Matrix) else np.asarray(b, dtype=np.int64) % p
        mats[v] = arr
        invs[v] = inverse_arr(arr, p)
    maps = {}
    for a in ladder_arrows(rep.orientation):
        m = rep.arr(a.name)
        if a.src in mats:
            m = mul(m, mats[a.src], p)
        if a.tgt in invs:
            m = mul(invs[a.tgt], m, p)
        maps[a.name] = Matrix.wrap(m, p)
    return LadderRep(rep.orientation, p, rep.dims, maps)


def random_invertible(n: int, p: int, rng: np.random.Generator) -> np.ndarray:
    """Rejection-sample a uniformly random invertible n x n matrix."""
    while True:
        m = rng.integers(0, p, size=(n, n), dtype=np.int64)
        if rank_arr(m, p) == n:
            return m


def random_basis_change(rep: LadderRep, rng: np.random.Generator) -> LadderRep:
    bases = {v: random_invertible(d, rep.p, rng) for v, d in enumerate(rep.dims, start=1)}
    return conjugate(rep, bases)


def flip_fb(rep: LadderRep) -> LadderRep:
    """Left-right mirror of an fb module: swap vertices 1<->3 and 4<->6."""
    if rep.orientation != "fb":
        raise ShapeError("flip is defined for fb only")
    d = rep.dims
    swap = {"f12": "f32", "f32": "f12", "f14": "f36", "f36": "f14", "f25": "f25", "f45": "f65", "f65": "f45"}
    return LadderRep("fb", rep.p, (d[2], d[1], d[0], d[5], d[4], d[3]), {k: rep.maps[v] for k, v in swap.items()})


def random_cocktail(multiplicities: Mapping[str, int], p: int = 2, seed: int = 0):
    """Direct sum of CL(fb) canonical indecomposables, with a random change
    of basis at every vertex.  Returns ``(rep, planted_diagram)``."""
    from .arq import PersistenceDiagram, clfb_ar_quiver

    q = clfb_ar_quiver()
    rng = np.random.default_rng(seed)
    summands = []
    for vid, k in sorted(multiplicities.items(), key=lambda kv: q.index(kv[0])):
        if k < 0:
            raise ValueError(f"negative multiplicity for {vid}")
        summands += [q.canonical_rep(vid, p)] * int(k)
    if summands:
        rep = direct_sum(*summands)
    else:
        rep = zero_rep((0,) * 6, p)
    rep = random_basis_change(rep, rng)
    return check_valid(rep), PersistenceDiagram("fb", dict(multiplicities))


def identity_bases(rep: LadderRep) -> dict[int, np.ndarray]:
    return {v: eye(d) for v, d in enumerate(rep.dims, start=1)}
