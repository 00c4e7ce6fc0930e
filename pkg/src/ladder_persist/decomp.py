"""Decomposition of CL(fb) persistence modules into indecomposables.

``decompose_clfb`` runs the echelon-reduction pipeline
Step 1 -> 2 -> 3 -> 4.1 -> 4.2 -> 5.1 -> 5.2.  Each step tracks a
subspace through the ladder with kernel/image splits, rearranges bases so
that the tracked summands split off, verifies the split block form and
deletes those rows and columns.  Steps 1-4.1 run once for the left side
(vertices 1, 4) and once mirrored for the right side (3, 6).

``oracle_decompose`` is an independent check: it reads multiplicities off
the dimensions of Hom spaces into the 30 indecomposables.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .arq import (
    FB_ARROWS,
    PersistenceDiagram,
    UnsupportedShapeError,
    clfb_ar_quiver,
    clfb_canonical,
    id_from_dimvec,
    interval_id,
    interval_maps,
)
from .exactla import (
    Matrix,
    column_echelon_arr,
    extend_to_basis_arr,
    eye,
    inverse_arr,
    mul,
    rank_arr,
    row_echelon_arr,
)
from .ladder import LadderRep, ShapeError, check_valid, direct_sum, ladder_arrows

STEPS = ("Step 1", "Step 2", "Step 3", "Step 4.1", "Step 4.2", "Step 5.1", "Step 5.2")

LEFT = {1: 1, 2: 2, 3: 3, 4: 4, 5: 5, 6: 6}
RIGHT = {1: 3, 2: 2, 3: 1, 4: 6, 5: 5, 6: 4}


class AlgorithmInvariantError(RuntimeError):
    """An internal claim of the reduction failed; indicates a bug or bad input."""


class OracleError(RuntimeError):
    pass


@dataclass
class DecompositionResult:
    diagram: PersistenceDiagram
    witnesses: dict[int, Matrix] | None = None
    trace: list[tuple[str, dict[str, int]]] = field(default_factory=list)
    order: list[tuple[str, int]] = field(default_factory=list)  # block order of the witness form


def _side_id(m: dict[int, int], left_dims: str) -> str:
    dv = [0] * 6
    for i, c in enumerate(left_dims, start=1):
        dv[m[i] - 1] = int(c)
    return id_from_dimvec(dv)


class _Work:
    """Mutable working copy of a module: matrices keyed by (src, tgt) and,
    optionally, the current basis at each vertex in input coordinates."""

    def __init__(self, rep: LadderRep, witnesses: bool):
        self.p = rep.p
        self.F = {(s, t): rep.arr(name).copy() for name, s, t in FB_ARROWS}
        self.d = {v: rep.dims[v - 1] for v in range(1, 7)}
        self.B = {v: eye(self.d[v]) for v in range(1, 7)} if witnesses else None
        self.found: list[tuple[str, int, dict[int, np.ndarray] | None]] = []
        self.step = ""
        self.trace: list[tuple[str, dict[str, int]]] = []

    def f(self, s: int, t: int) -> np.ndarray:
        return self.F[(s, t)]

    # -- basis changes -----------------------------------------------------

    def change(self, v: int, P: np.ndarray, lo: int = 0, Pinv: np.ndarray | None = None):
        """Replace basis vectors lo..lo+k of V^v by (those vectors) @ P."""
        p = self.p
        k = P.shape[0]
        if k == 0:
            return
        hi = lo + k
        if Pinv is None:
            Pinv = inverse_arr(P, p)
        for (s, t), F in self.F.items():
            if s == v:
                F[:, lo:hi] = mul(F[:, lo:hi], P, p)
            elif t == v:
                F[lo:hi, :] = mul(Pinv, F[lo:hi, :], p)
        if self.B is not None:
            self.B[v][:, lo:hi] = mul(self.B[v][:, lo:hi], P, p)

    def add(self, v: int, dst: slice, src: slice, X: np.ndarray):
        """Basis vectors e_dst += e_src @ X (src and dst disjoint)."""
        p = self.p
        X = np.array(X, dtype=np.int64) % p
        if X.size == 0 or not X.any():
            return
        for (s, t), F in self.F.items():
            if s == v:
                F[:, dst] = (F[:, dst] + mul(F[:, src], X, p)) % p
            elif t == v:
                F[src, :] = (F[src, :] - mul(X, F[dst, :], p)) % p
        if self.B is not None:
            B = self.B[v]
            B[:, dst] = (B[:, dst] + mul(B[:, src], X, p)) % p

    def kernel_split(self, v: int, M: np.ndarray, lo: int = 0) -> int:
        """Column echelon on V^v: afterwards the first returned-many basis
        vectors from ``lo`` span the kernel of M (whose columns are V^v
        coordinates lo..)."""
        if M.shape[1] == 0:
            return 0
        _, P, r = column_echelon_arr(M, self.p)
        self.change(v, P, lo)
        return M.shape[1] - r

    def image_split(self, v: int, M: np.ndarray, lo: int = 0) -> int:
        """Row echelon on V^v: afterwards the first rank(M) basis vectors
        from ``lo`` span the image of M (whose rows are V^v coordinates lo..)."""
        if M.shape[0] == 0:
            return 0
        _, Q, piv = row_echelon_arr(M, self.p)
        self.change(v, inverse_arr(Q, self.p), lo, Pinv=Q)
        return len(piv)

    def colnorm(self, v: int, M: np.ndarray, lo: int = 0):
        """Change basis vectors lo.. of V^v so the square block M of an
        outgoing map becomes the identity."""
        M = M.copy()
        self.change(v, inverse_arr(M, self.p), lo, Pinv=M)

    def row_ops(self, v: int, Q: np.ndarray):
        """Apply row operations Q to the coordinates of V^v."""
        self.change(v, inverse_arr(Q, self.p), 0, Pinv=Q)

    # -- extraction --------------------------------------------------------

    def extract(self, parts: Sequence[tuple[str, int, dict[int, Sequence[int]]]]):
        """Check that each (vertex id, copies, indices) part is a split
        direct sum of canonical copies, then delete all of them."""
        p = self.p
        drop = {v: [] for v in range(1, 7)}
        for vid, copies, idx in parts:
            if copies == 0:
                continue
            canon = clfb_canonical(vid, p)
            index = {v: np.asarray(idx.get(v, ()), dtype=np.int64) for v in range(1, 7)}
            for v in range(1, 7):
                if len(index[v]) != copies * canon.dims[v - 1]:
                    raise AlgorithmInvariantError(f"{self.step}: wrong index count for {vid} at {v}")
            for name, s, t in FB_ARROWS:
                F = self.F[(s, t)]
                rs, cs = index[t], index[s]
                rest_t = np.setdiff1d(np.arange(self.d[t]), rs)
                rest_s = np.setdiff1d(np.arange(self.d[s]), cs)
                want = np.kron(eye(copies), canon.arr(name))
                if not np.array_equal(F[np.ix_(rs, cs)], want):
                    raise AlgorithmInvariantError(f"{self.step}: {name} is not canonical on {vid}")
                if F[np.ix_(rest_t, cs)].any() or F[np.ix_(rs, rest_s)].any():
                    raise AlgorithmInvariantError(f"{self.step}: {vid} does not split off along {name}")
            cols = {v: self.B[v][:, index[v]].copy() for v in range(1, 7)} if self.B is not None else None
            self.found.append((vid, copies, cols))
            self.trace[-1][1][vid] = self.trace[-1][1].get(vid, 0) + copies
            for v in range(1, 7):
                drop[v].extend(index[v].tolist())
        keep = {}
        for v in range(1, 7):
            if len(set(drop[v])) != len(drop[v]):
                raise AlgorithmInvariantError(f"{self.step}: overlapping summands at vertex {v}")
            keep[v] = np.setdiff1d(np.arange(self.d[v]), drop[v])
        for (s, t), F in list(self.F.items()):
            self.F[(s, t)] = F[np.ix_(keep[t], keep[s])].copy()
        for v in range(1, 7):
            self.d[v] = len(keep[v])
            if self.B is not None:
                self.B[v] = self.B[v][:, keep[v]].copy()

    def begin(self, step: str):
        self.step = step
        if not self.trace or self.trace[-1][0] != step:
            self.trace.append((step, {}))


def _rng(a: int, b: int) -> list[int]:
    return list(range(a, b))


# ---------------------------------------------------------------------------
# the steps; ``m`` maps the left-side vertex labels to actual vertices
# ---------------------------------------------------------------------------


def _step1(w: _Work, m: dict[int, int]):
    v1, v4 = m[1], m[4]
    F = lambda s, t: w.f(m[s], m[t])  # noqa: E731
    k = w.kernel_split(v1, F(1, 2))  # V1[:k] = Ker f12
    if k == 0:
        return
    r = w.image_split(v4, F(1, 4)[:, :k])  # V4[:r] = f14(Ker f12)
    z = w.kernel_split(v1, F(1, 4)[:, :k])  # Ker f12 = [Ker f14 (z) | rest (r)]
    w.image_split(v4, F(1, 4)[:r, z:k])
    w.add(v1, slice(k, w.d[v1]), slice(z, k), -F(1, 4)[:r, k:])
    w.extract(
        [
            (_side_id(m, "100000"), z, {v1: _rng(0, z)}),
            (_side_id(m, "100100"), r, {v1: _rng(z, k), v4: _rng(0, r)}),
        ]
    )


def _step2(w: _Work, m: dict[int, int]):
    v1, v2, v3, v6 = m[1], m[2], m[3], m[6]
    F = lambda s, t: w.f(m[s], m[t])  # noqa: E731
    k = w.kernel_split(v1, F(1, 4))  # U1 = Ker f14
    if k == 0:
        return
    w.image_split(v2, F(1, 2)[:, :k])  # U2 = f12(U1) = V2[:k]
    k3 = w.kernel_split(v3, F(3, 2)[k:, :])  # U3 = f32^-1(U2)
    r = w.image_split(v6, F(3, 6)[:, :k3])  # V6[:r] = f36(U3)
    z = w.kernel_split(v3, F(3, 6)[:, :k3])  # U3 = [Ker f36 (z) | rest (r)]
    w.image_split(v6, F(3, 6)[:r, z:k3])
    w.add(v3, slice(k3, w.d[v3]), slice(z, k3), -F(3, 6)[:r, k3:])
    # V2: U2 = [f32(U3) | complement], then the rest of f32(V3) outside U2
    w.image_split(v2, F(3, 2)[:k, :k3])
    a = w.image_split(v2, F(3, 2)[k:, k3:], lo=k)
    w.add(v2, slice(k, k + a), slice(0, k), F(3, 2)[:k, k3:])
    # V1: align U1 with U2 and push the complement off U2
    w.colnorm(v1, F(1, 2)[:k, :k])
    w.add(v1, slice(k, w.d[v1]), slice(0, k), -F(1, 2)[:k, k:])
    w.extract(
        [
            (_side_id(m, "111000"), z, {v1: _rng(0, z), v2: _rng(0, z), v3: _rng(0, z)}),
            (_side_id(m, "111001"), r, {v1: _rng(z, k3), v2: _rng(z, k3), v3: _rng(z, k3), v6: _rng(0, r)}),
            (_side_id(m, "110000"), k - k3, {v1: _rng(k3, k), v2: _rng(k3, k)}),
        ]
    )


def _step3(w: _Work, m: dict[int, int]):
    v1, v2, v3, v4, v6 = m[1], m[2], m[3], m[4], m[6]
    F = lambda s, t: w.f(m[s], m[t])  # noqa: E731
    k4 = w.kernel_split(v4, F(4, 5))  # U4 = Ker f45
    if k4 == 0:
        return
    k1 = w.kernel_split(v1, F(1, 4)[k4:, :])  # U1 = f14^-1(U4)
    w.image_split(v4, F(1, 4)[:k4, :k1])  # U4 = [f14(U1) | complement]
    w.image_split(v2, F(1, 2)[:, :k1])  # U2 = f12(U1)
    k3 = w.kernel_split(v3, F(3, 2)[k1:, :])  # U3 = f32^-1(U2)
    w.image_split(v2, F(3, 2)[:k1, :k3])  # U2 = [f32(U3) | complement]
    w.image_split(v6, F(3, 6)[:, :k3])  # U6 = f36(U3)
    # arrange complements, from the end of the tracking path backwards
    w.add(v3, slice(k3, w.d[v3]), slice(0, k3), -F(3, 6)[:k3, k3:])
    a = w.image_split(v2, F(3, 2)[k1:, k3:], lo=k1)
    w.add(v2, slice(k1, k1 + a), slice(0, k1), F(3, 2)[:k1, k3:])
    w.colnorm(v1, F(1, 2)[:k1, :k1])
    w.add(v1, slice(k1, w.d[v1]), slice(0, k1), -F(1, 2)[:k1, k1:])
    w.image_split(v4, F(1, 4)[:k4, :k1])
    b = w.image_split(v4, F(1, 4)[k4:, k1:], lo=k4)
    w.add(v4, slice(k4, k4 + b), slice(0, k4), F(1, 4)[:k4, k1:])
    w.extract(
        [
            (
                _side_id(m, "111101"),
                k3,
                {v1: _rng(0, k3), v2: _rng(0, k3), v3: _rng(0, k3), v4: _rng(0, k3), v6: _rng(0, k3)},
            ),
            (_side_id(m, "110100"), k1 - k3, {v1: _rng(k3, k1), v2: _rng(k3, k1), v4: _rng(k3, k1)}),
            (_side_id(m, "000100"), k4 - k1, {v4: _rng(k1, k4)}),
        ]
    )


def _step41(w: _Work, m: dict[int, int]):
    v1, v2, v3, v4, v5, v6 = (m[i] for i in range(1, 7))
    F = lambda s, t: w.f(m[s], m[t])  # noqa: E731
    n3 = w.d[v3]
    if n3 == 0:
        return
    u = w.image_split(v6, F(3, 6))  # U6 = f36(V3)
    if u != n3:
        raise AlgorithmInvariantError("Step 4.1: f36 is not injective")
    w.image_split(v5, F(6, 5)[:, :u])  # U5 = f65(U6)
    k4 = w.kernel_split(v4, F(4, 5)[u:, :])  # U4 = f45^-1(U5)
    k1 = w.kernel_split(v1, F(1, 4)[k4:, :])  # U1 = f14^-1(U4)
    w.image_split(v4, F(1, 4)[:k4, :k1])  # U4 = [f14(U1) | complement]
    b = w.image_split(v4, F(1, 4)[k4:, k1:], lo=k4)
    w.add(v4, slice(k4, k4 + b), slice(0, k4), F(1, 4)[:k4, k1:])
    w.image_split(v5, F(4, 5)[:u, :k4])  # U5 = [f45(U4) | complement]
    c = w.image_split(v5, F(4, 5)[u:, k4:], lo=u)
    w.add(v5, slice(u, u + c), slice(0, u), F(4, 5)[:u, k4:])
    w.colnorm(v6, F(6, 5)[:u, :u])
    w.add(v6, slice(u, w.d[v6]), slice(0, u), -F(6, 5)[:u, u:])
    w.colnorm(v3, F(3, 6)[:u, :])
    w.image_split(v2, F(3, 2))
    w.add(v2, slice(n3, w.d[v2]), slice(0, n3), -F(2, 5)[:u, n3:])
    w.extract(
        [
            (
                _side_id(m, "011111"),
                k4 - k1,
                {v2: _rng(k1, k4), v3: _rng(k1, k4), v4: _rng(k1, k4), v5: _rng(k1, k4), v6: _rng(k1, k4)},
            ),
            (_side_id(m, "011011"), u - k4, {v2: _rng(k4, u), v3: _rng(k4, u), v5: _rng(k4, u), v6: _rng(k4, u)}),
        ]
    )


def _unit_row_ops(vec: np.ndarray, t: int, p: int) -> np.ndarray:
    """Row operations taking ``vec`` (nonzero somewhere at index >= t) to
    e_t, touching rows < t only by adding multiples of row t."""
    n = len(vec)
    Q = eye(n)
    piv = t + int(np.flatnonzero(vec[t:])[0])
    if piv != t:
        Q[[t, piv]] = Q[[piv, t]]
    x = mul(Q, vec.reshape(-1, 1), p).ravel()
    Q[t] = Q[t] * pow(int(x[t]), -1, p) % p
    x = mul(Q, vec.reshape(-1, 1), p).ravel()
    E = eye(n)
    E[:, t] = (-x) % p
    E[t, t] = 1
    return mul(E, Q, p)


def _c_col_op(w: _Work, dst: int, src: int, coef: int):
    """Column operation on C = [a_1 b_1 ... a_s b_s]: column dst += coef *
    column src.  Even columns live in V1, odd ones in V3."""
    if dst % 2 != src % 2:
        raise AlgorithmInvariantError("Step 4.2: column operation mixes a- and b-columns")
    v = 1 if dst % 2 == 0 else 3
    i, j = dst // 2, src // 2
    w.add(v, slice(i, i + 1), slice(j, j + 1), np.array([[coef]]))


def _step42(w: _Work):
    p = w.p
    s = w.d[1]
    if w.d[3] != s:
        raise AlgorithmInvariantError("Step 4.2: dim V1 != dim V3")
    if s == 0:
        return
    w.image_split(4, w.f(1, 4))  # f14 = [I; 0]
    w.image_split(5, w.f(4, 5)[:, :s])
    w.add(4, slice(s, w.d[4]), slice(0, s), -w.f(4, 5)[:s, s:])
    if w.kernel_split(6, w.f(6, 5)[s:, :]) != s:
        raise AlgorithmInvariantError("Step 4.2: f65^-1(f45 f14 V1) has the wrong dimension")
    w.colnorm(6, w.f(6, 5)[:s, :s])
    w.add(6, slice(s, w.d[6]), slice(0, s), -w.f(6, 5)[:s, s:])
    if w.f(3, 6)[s:, :].any():
        raise AlgorithmInvariantError("Step 4.2: f36(V3) is not f65^-1(f45 f14 V1)")
    w.colnorm(3, w.f(3, 6)[:s, :])

    # column-pair induction on C; rows[j] are the rows of V2 holding pair j
    used = 0
    rows: list[tuple[int, ...]] = []
    for i in range(s):
        a = w.f(1, 2)[:, i]
        if not a[used:].any():
            raise AlgorithmInvariantError("Step 4.2: a-column lies in the span of earlier pairs")
        w.row_ops(2, _unit_row_ops(a.copy(), used, p))
        b = w.f(3, 2)[:, i].copy()
        if b[used + 1 :].any():
            # case 1: a new pair of independent columns
            w.row_ops(2, _unit_row_ops(b, used + 1, p))
            rows.append((used, used + 1))
            used += 2
            continue
        # case 2: b_i = a_i + sum_j alpha_j (a_j - b_j)
        if b[used] != 1:
            raise AlgorithmInvariantError("Step 4.2: b-column has the wrong a-coefficient")
        R = eye(s)
        for j, rj in enumerate(rows):
            if len(rj) == 1:
                if b[rj[0]]:
                    raise AlgorithmInvariantError("Step 4.2: b-column meets a (1,1) pair")
            elif (b[rj[0]] + b[rj[1]]) % p:
                raise AlgorithmInvariantError("Step 4.2: b-column is not balanced on a pair")
            else:
                R[j, i] = b[rj[0]]
        for j, rj in enumerate(rows):
            if len(rj) == 2 and R[j, i]:
                _c_col_op(w, 2 * i + 1, 2 * j + 1, int(R[j, i]))
        Q = eye(w.d[2])
        for j, rj in enumerate(rows):
            if len(rj) == 2 and R[j, i]:
                Q[rj[0], used] = (-R[j, i]) % p
        w.row_ops(2, Q)
        for j, rj in enumerate(rows):
            if len(rj) == 2 and R[j, i]:
                _c_col_op(w, 2 * i, 2 * j, int(R[j, i]))
        # restore f14 = [I;0], f36 = [I;0] and the identity blocks of f45, f65
        for v in (4, 6, 5):
            w.change(v, R, 0)
        rows.append((used,))
        used += 1

    # clear f25 on the remaining rows of V2
    src = [rj[0] for rj in rows]
    X = (-w.f(2, 5)[:s, used:]) % p
    if X.any():
        for v_dst in range(used, w.d[2]):
            w.add(2, slice(v_dst, v_dst + 1), np.array(src), X[:, v_dst - used : v_dst - used + 1])
    pairs2 = [j for j, rj in enumerate(rows) if len(rj) == 2]
    pairs1 = [j for j, rj in enumerate(rows) if len(rj) == 1]
    w.extract(
        [
            (
                "121111",
                len(pairs2),
                {1: pairs2, 3: pairs2, 4: pairs2, 5: pairs2, 6: pairs2, 2: [r for j in pairs2 for r in rows[j]]},
            ),
            ("111111", len(pairs1), {1: pairs1, 3: pairs1, 4: pairs1, 5: pairs1, 6: pairs1, 2: [rows[j][0] for j in pairs1]}),
        ]
    )


def _d4_pair(w: _Work, x: int, y: int, o: int, triple_id: str | None, pair_id: str):
    """Split off the summands whose V5 part is f_x(V^x) ∩ f_y(V^y); the
    third arm o meets that intersection only for ``triple_id``."""
    F = w.f
    ry = w.image_split(5, F(y, 5))  # V5[:ry] = im f_y
    kx = w.kernel_split(x, F(x, 5)[ry:, :])  # f_x^-1(im f_y)
    if kx == 0:
        return
    u = w.image_split(5, F(x, 5)[:ry, :kx])  # V5[:u] = U = im f_x ∩ im f_y
    ky = w.kernel_split(y, F(y, 5)[u:, :])
    ko = w.kernel_split(o, F(o, 5)[u:, :])
    if u != kx or ky != u:
        raise AlgorithmInvariantError(f"{w.step}: arm maps are not injective")
    if ko and triple_id is None:
        raise AlgorithmInvariantError(f"{w.step}: unexpected triple intersection")
    if ko:
        w.image_split(5, F(o, 5)[:u, :ko])  # U = [im f_o ∩ U | complement]
    # complement of U in V5 containing f_o of the complement of f_o^-1(U)
    a = w.image_split(5, F(o, 5)[u:, ko:], lo=u)
    w.add(5, slice(u, u + a), slice(0, u), F(o, 5)[:u, ko:])
    for v in (x, y):
        w.colnorm(v, F(v, 5)[:u, :u])
        w.add(v, slice(u, w.d[v]), slice(0, u), -F(v, 5)[:u, u:])
    parts = []
    if triple_id is not None:
        parts.append((triple_id, ko, {2: _rng(0, ko), 4: _rng(0, ko), 6: _rng(0, ko), 5: _rng(0, ko)}))
    parts.append((pair_id, u - ko, {x: _rng(ko, u), y: _rng(ko, u), 5: _rng(ko, u)}))
    w.extract(parts)


def _step51(w: _Work):
    k = w.kernel_split(2, w.f(2, 5))
    w.extract([("010000", k, {2: _rng(0, k)})])
    _d4_pair(w, 4, 6, 2, "010111", "000111")
    _d4_pair(w, 2, 6, 4, None, "010011")
    _d4_pair(w, 2, 4, 6, None, "010110")


def _step52(w: _Work):
    p = w.p
    d4, d6 = w.d[4], w.d[6]
    f45, f65 = w.f(4, 5), w.f(6, 5)
    C = np.concatenate([f45, f65], axis=1)
    if rank_arr(C, p) != rank_arr(f45, p) + rank_arr(f65, p) or rank_arr(C, p) != d4 + d6:
        raise AlgorithmInvariantError("Step 5.2: Rank C != Rank f45 + Rank f65")
    w.image_split(5, C)  # C = [[I,0],[0,I],[0,0]]
    q = d4 + d6
    kk = w.kernel_split(2, w.f(2, 5)[q:, :])  # f25^-1(im f45 + im f65)
    for v, lo, dv in ((4, 0, d4), (6, d4, d6)):
        P = w.f(2, 5)[lo : lo + dv, :kk]
        if rank_arr(P, p) != kk:
            raise AlgorithmInvariantError("Step 5.2: f25 meets im f45 or im f65")
        ext = extend_to_basis_arr(P, dv, p)
        ext_inv = inverse_arr(ext, p)
        w.change(5, ext, lo, Pinv=ext_inv)
        w.change(v, ext, 0, Pinv=ext_inv)
    a = w.image_split(5, w.f(2, 5)[q:, kk:], lo=q)
    w.add(5, slice(q, q + a), slice(0, q), w.f(2, 5)[:q, kk:])
    w.extract(
        [
            ("010121", kk, {2: _rng(0, kk), 4: _rng(0, kk), 6: _rng(0, kk), 5: [r for j in range(kk) for r in (j, d4 + j)]}),
            ("000110", d4 - kk, {4: _rng(kk, d4), 5: _rng(kk, d4)}),
            ("000011", d6 - kk, {6: _rng(kk, d6), 5: _rng(d4 + kk, q)}),
            ("010010", a, {2: _rng(kk, w.d[2]), 5: _rng(q, q + a)}),
            ("000010", w.d[5] - q - a, {5: _rng(q + a, w.d[5])}),
        ]
    )


def decompose_clfb(rep: LadderRep, emit_witnesses: bool = False) -> DecompositionResult:
    """Indecomposable decomposition of a CL(fb) module.

    With ``emit_witnesses`` the result carries, for each vertex, the
    invertible matrix whose columns are the new basis: conjugating ``rep``
    by these gives the direct sum of canonical representatives listed in
    ``result.order``.
    """
    if rep.orientation != "fb":
        raise UnsupportedShapeError(
            f"decomposition is implemented for CL(fb) only, got CL({rep.orientation}); "
            "longer ladders can be representation-infinite"
        )
    check_valid(rep)
    w = _Work(rep, emit_witnesses)
    for step, fn in (
        ("Step 1", lambda: (_step1(w, LEFT), _step1(w, RIGHT))),
        ("Step 2", lambda: (_step2(w, LEFT), _step2(w, RIGHT))),
        ("Step 3", lambda: (_step3(w, LEFT), _step3(w, RIGHT))),
        ("Step 4.1", lambda: (_step41(w, LEFT), _step41(w, RIGHT))),
        ("Step 4.2", lambda: _step42(w)),
        ("Step 5.1", lambda: _step51(w)),
        ("Step 5.2", lambda: _step52(w)),
    ):
        w.begin(step)
        fn()
    if any(w.d.values()):
        raise AlgorithmInvariantError(f"nonzero residual {w.d} after Step 5.2")
    counts: dict[str, int] = {}
    for vid, k, _ in w.found:
        counts[vid] = counts.get(vid, 0) + k
    diagram = PersistenceDiagram("fb", counts)
    if diagram.dimension_total() != rep.dims:
        raise AlgorithmInvariantError("dimension vector not conserved")
    result = DecompositionResult(diagram, trace=w.trace)
    q = clfb_ar_quiver()
    result.order = sorted(counts.items(), key=lambda kv: q.index(kv[0]))
    if emit_witnesses:
        found = sorted(enumerate(w.found), key=lambda e: (q.index(e[1][0]), e[0]))
        wit = {}
        for v in range(1, 7):
            d = rep.dims[v - 1]
            blocks = [cols[v] for _, (_, _, cols) in found]
            arr = np.concatenate(blocks, axis=1) if blocks else np.zeros((d, 0), dtype=np.int64)
            wit[v] = Matrix.wrap(arr.reshape(d, d), rep.p)
        result.witnesses = wit
    return result


def block_form(result: DecompositionResult, p: int) -> LadderRep:
    """Direct sum of canonical representatives in witness order."""
    summands = [clfb_canonical(vid, p) for vid, k in result.order for _ in range(k)]
    if not summands:
        return LadderRep("fb", p, (0,) * 6, {n: Matrix.zeros(0, 0, p) for n, _, _ in FB_ARROWS})
    return direct_sum(*summands)


# ---------------------------------------------------------------------------
# hom-count oracle
# ---------------------------------------------------------------------------


def _hom_dim(arrows, dm, maps_m, dn, maps_n, p: int) -> int:
    """dim Hom(M, N) for quiver representations given by dims and maps
    keyed by arrow (name, src, tgt)."""
    offs = {}
    total = 0
    for v in sorted(dm):
        offs[v] = total
        total += dn[v] * dm[v]
    if total == 0:
        return 0
    blocks = []
    for name, s, t in arrows:
        phi, psi = maps_m[name], maps_n[name]
        nrows = dn[t] * dm[s]
        if nrows == 0:
            continue
        blk = np.zeros((nrows, total), dtype=np.int64)
        if dn[s] * dm[s]:
            blk[:, offs[s] : offs[s] + dn[s] * dm[s]] = np.kron(eye(dm[s]), psi)
        if dn[t] * dm[t]:
            blk[:, offs[t] : offs[t] + dn[t] * dm[t]] -= np.kron(phi.T, eye(dn[t]))
        blocks.append(blk % p)
    if not blocks:
        return total
    return total - rank_arr(np.concatenate(blocks, axis=0), p)


def hom_dim(M: LadderRep, N: LadderRep) -> int:
    """Dimension of the space of morphisms M -> N."""
    if M.orientation != N.orientation or M.p != N.p:
        raise ShapeError("hom_dim needs equal orientation and field")
    arrows = [(a.name, a.src, a.tgt) for a in ladder_arrows(M.orientation)]
    dm = {v: d for v, d in enumerate(M.dims, start=1)}
    dn = {v: d for v, d in enumerate(N.dims, start=1)}
    return _hom_dim(
        arrows, dm, {k: m.a for k, m in M.maps.items()}, dn, {k: m.a for k, m in N.maps.items()}, M.p
    )


def _det(mat: list[list[int]]) -> int:
    """Exact integer determinant (Bareiss)."""
    a = [row[:] for row in mat]
    n = len(a)
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1] if n else 1


def _rational_inverse(mat: list[list[int]]) -> list[list[Fraction]]:
    n = len(mat)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(mat)]
    for c in range(n):
        piv = next(i for i in range(c, n) if a[i][c] != 0)
        a[c], a[piv] = a[piv], a[c]
        inv = 1 / a[c][c]
        a[c] = [x * inv for x in a[c]]
        for i in range(n):
            if i != c and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return [row[n:] for row in a]


@dataclass(frozen=True)
class HomMatrix:
    p: int
    ids: tuple[str, ...]
    H: tuple[tuple[int, ...], ...]  # H[j][i] = dim Hom(I_j, I_i)
    det: int
    inv_t: tuple[tuple[Fraction, ...], ...]  # inverse of H transposed
    inv_t_int: np.ndarray | None = field(default=None, compare=False, repr=False)  # set when integral

    def as_array(self) -> np.ndarray:
        return np.array(self.H, dtype=np.int64)


def _hom_matrix(ids, reps_fn, hom_fn, p) -> HomMatrix:
    reps = [reps_fn(i) for i in ids]
    H = [[hom_fn(rj, ri) for ri in reps] for rj in reps]
    det = _det(H)
    if det == 0:
        raise AssertionError("Hom matrix is singular; the indecomposable table is inconsistent")
    Ht = [list(col) for col in zip(*H)]
    inv_t = _rational_inverse(Ht)
    integral = all(x.denominator == 1 for row in inv_t for x in row)
    inv_int = np.array([[int(x) for x in row] for row in inv_t], dtype=np.int64) if integral else None
    return HomMatrix(p, tuple(ids), tuple(tuple(r) for r in H), det, tuple(tuple(r) for r in inv_t), inv_int)


@lru_cache(maxsize=None)
def build_hom_matrix(p: int = 2) -> HomMatrix:
    """Hom dimensions between the 30 canonical CL(fb) indecomposables."""
    q = clfb_ar_quiver()
    return _hom_matrix(tuple(q.ids), lambda i: clfb_canonical(i, p), hom_dim, p)


def _solve_multiplicities(hm: HomMatrix, h: Sequence[int]) -> dict[str, int]:
    if hm.inv_t_int is not None:
        k = [Fraction(int(x)) for x in hm.inv_t_int @ np.asarray(h, dtype=np.int64)]
    else:
        k = [sum(c * x for c, x in zip(row, h)) for row in hm.inv_t]
    out = {}
    for vid, x in zip(hm.ids, k):
        if x.denominator != 1 or x < 0:
            raise OracleError(f"non-integral or negative multiplicity {x} at {vid}")
        out[vid] = int(x)
    kv = np.array([out[i] for i in hm.ids], dtype=np.int64)
    if not np.array_equal(np.array(hm.H, dtype=np.int64).T @ kv, np.asarray(h, dtype=np.int64)):
        raise OracleError("multiplicities do not reproduce the Hom dimensions")
    return out


def oracle_decompose(rep: LadderRep) -> PersistenceDiagram:
    """Multiplicities from dim Hom(rep, I_i) = sum_j k_j dim Hom(I_j, I_i)."""
    if rep.orientation != "fb":
        raise UnsupportedShapeError(f"oracle is implemented for CL(fb) only, got {rep.orientation}")
    check_valid(rep)
    hm = build_hom_matrix(rep.p)
    h = [hom_dim(rep, clfb_canonical(vid, rep.p)) for vid in hm.ids]
    return PersistenceDiagram("fb", _solve_multiplicities(hm, h))


# ---------------------------------------------------------------------------
# A_n (n <= 3) and the marginal identities
# ---------------------------------------------------------------------------


def _line_arrows(orientation: str):
    out = []
    for i, o in enumerate(orientation, start=1):
        s, t = (i, i + 1) if o == "f" else (i + 1, i)
        out.append((f"a{i}", s, t))
    return out


def _line_hom(orientation, p):
    arrows = _line_arrows(orientation)

    def hom(M, N):
        (dm, mm), (dn, mn) = M, N
        return _hom_dim(arrows, dm, mm, dn, mn, p)

    return hom


def _line_rep(maps: Sequence[Matrix | np.ndarray], orientation: str, p: int):
    arrows = _line_arrows(orientation)
    n = len(orientation) + 1
    dims: dict[int, int] = {}
    arrs = {}
    for (name, s, t), m in zip(arrows, maps):
        a = m.a if isinstance(m, Matrix) else np.asarray(m, dtype=np.int64) % p
        for v, d in ((t, a.shape[0]), (s, a.shape[1])):
            if dims.setdefault(v, d) != d:
                raise ShapeError(f"inconsistent dimension at vertex {v}")
        arrs[name] = a
    for v in range(1, n + 1):
        dims.setdefault(v, 0)
    return dims, arrs


@lru_cache(maxsize=None)
def _interval_hom_matrix(orientation: str, p: int) -> HomMatrix:
    n = len(orientation) + 1
    ids = tuple(interval_id(b, d) for b in range(1, n + 1) for d in range(b, n + 1))

    def rep(vid):
        b, d = (int(x) for x in vid[2:-1].split(","))
        return _line_rep(interval_maps(n, b, d, orientation, p), orientation, p)

    return _hom_matrix(ids, rep, _line_hom(orientation, p), p)


def an_decompose(maps: Sequence[Matrix | np.ndarray], orientation: str, p: int | None = None) -> dict[str, int]:
    """Interval multiplicities {"I[b,d]": m} of an A_n module, n <= 3.

    ``maps[i]`` is the matrix of the arrow between vertices i+1 and i+2,
    pointing the way ``orientation[i]`` says ('f' forward, 'b' backward).
    """
    n = len(orientation) + 1
    if n > 3 or n < 2 or len(maps) != n - 1:
        raise UnsupportedShapeError(f"an_decompose handles 2 <= n <= 3, got n={n}")
    if p is None:
        p = maps[0].p if isinstance(maps[0], Matrix) else 2
    hm = _interval_hom_matrix(orientation, p)
    M = _line_rep(maps, orientation, p)
    hom = _line_hom(orientation, p)
    h = []
    for vid in hm.ids:
        b, d = (int(x) for x in vid[2:-1].split(","))
        h.append(hom(M, _line_rep(interval_maps(n, b, d, orientation, p), orientation, p)))
    return _solve_multiplicities(hm, h)


@dataclass
class MarginalReport:
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def __bool__(self):
        return self.ok


@lru_cache(maxsize=None)
def _top_row_intervals(p: int) -> dict[str, dict[str, int]]:
    out = {}
    for vid in clfb_ar_quiver().ids:
        c = clfb_canonical(vid, p)
        out[vid] = an_decompose([c.maps["f45"], c.maps["f65"]], "fb", p)
    return out


def marginal_check(rep: LadderRep, result: DecompositionResult | PersistenceDiagram) -> MarginalReport:
    """Compare the 2-step and zigzag marginals of ``rep`` with the region
    sums of the diagram."""
    diagram = result.diagram if isinstance(result, DecompositionResult) else result
    p = rep.p
    report = MarginalReport()
    q = clfb_ar_quiver()
    for label, fname, lo, hi in (("left column", "f14", 0, 3), ("right column", "f36", 2, 5)):
        m = an_decompose([rep.maps[fname]], "f", p)
        sums = {"I[1,1]": 0, "I[2,2]": 0, "I[1,2]": 0}
        for vid, k in diagram.items():
            dv = q.vertex(vid).dimvec
            key = {(1, 0): "I[1,1]", (0, 1): "I[2,2]", (1, 1): "I[1,2]"}.get((dv[lo], dv[hi]))
            if key:
                sums[key] += k
        for key, total in sums.items():
            if m[key] != total:
                report.failures.append(f"{label}: {key} has multiplicity {m[key]} but region sum {total}")
    top = an_decompose([rep.maps["f45"], rep.maps["f65"]], "fb", p)
    contrib = _top_row_intervals(p)
    sums = {key: 0 for key in top}
    for vid, k in diagram.items():
        for key, c in contrib[vid].items():
            sums[key] += k * c
    for key in top:
        if top[key] != sums[key]:
            report.failures.append(f"top zigzag: {key} has multiplicity {top[key]} but region sum {sums[key]}")
    return report
