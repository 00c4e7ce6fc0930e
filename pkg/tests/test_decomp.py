from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_plant
from ladder_persist.arq import PersistenceDiagram, UnsupportedShapeError, clfb_ar_quiver, clfb_canonical, flip_dimvec
from ladder_persist.decomp import (
    STEPS,
    AlgorithmInvariantError,
    _c_col_op,
    _Work,
    an_decompose,
    block_form,
    build_hom_matrix,
    decompose_clfb,
    hom_dim,
    marginal_check,
    oracle_decompose,
)
from ladder_persist.exactla import Matrix
from ladder_persist.ladder import (
    ValidationError,
    conjugate,
    direct_sum,
    flip_fb,
    make_rep,
    random_basis_change,
    random_cocktail,
    zero_rep,
)

Q = clfb_ar_quiver()

# Step of the flowchart that extracts each indecomposable (by AR region).
EXTRACTED_IN = {
    "Step 1": {"100000", "100100", "001000", "001001"},
    "Step 2": {"111000", "111001", "111100", "110000", "011000"},
    "Step 3": {"111101", "110100", "011001", "000100", "000001"},
    "Step 4.1": {"011111", "110111", "011011", "110110"},
    "Step 4.2": {"121111", "111111"},
    "Step 5.1": {"010000", "010111", "000111", "010011", "010110"},
    "Step 5.2": {"010121", "000110", "000011", "010010", "000010"},
}


def flip_id(vid):
    return "".join(map(str, flip_dimvec([int(c) for c in vid])))


@st.composite
def plants(draw, cap=4):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_plant(np.random.default_rng(seed), cap=cap, tries=12)


# -- hom dimensions ----------------------------------------------------------


def test_hom_dim_examples():
    s1, s2 = clfb_canonical("100000"), clfb_canonical("010000")
    assert hom_dim(s1, s2) == 0
    assert hom_dim(s2, s2) == 1
    eq8 = clfb_canonical("121111")
    assert hom_dim(eq8, eq8) == 1


@pytest.mark.parametrize("p", [2, 3])
def test_canonical_reps_have_trivial_endomorphisms(p):
    for vid in Q.ids:
        rep = clfb_canonical(vid, p)
        assert hom_dim(rep, rep) == 1


def test_hom_dim_is_additive():
    a, b, c = (clfb_canonical(v, 3) for v in ("121111", "111101", "010111"))
    assert hom_dim(direct_sum(a, b), c) == hom_dim(a, c) + hom_dim(b, c)
    assert hom_dim(c, direct_sum(a, b)) == hom_dim(c, a) + hom_dim(c, b)


def test_hom_matrix():
    hm = build_hom_matrix(2)
    h = hm.as_array()
    assert h.shape == (30, 30)
    assert (np.diag(h) >= 1).all()
    assert hm.det != 0
    assert hm.H == build_hom_matrix(3).H == build_hom_matrix(5).H


# -- the algorithm -----------------------------------------------------------


def test_zero_rep():
    res = decompose_clfb(zero_rep((0,) * 6, 3))
    assert res.diagram.total() == 0
    assert oracle_decompose(zero_rep((0,) * 6, 3)).total() == 0


@pytest.mark.parametrize("p", [2, 5])
def test_each_indecomposable_and_its_step(p):
    for vid in Q.ids:
        res = decompose_clfb(clfb_canonical(vid, p))
        assert res.diagram.as_dict() == {vid: 1}
        steps = [s for s, found in res.trace if found]
        assert len(steps) == 1 and vid in EXTRACTED_IN[steps[0]]
        assert oracle_decompose(clfb_canonical(vid, p)).as_dict() == {vid: 1}


def test_step_table_covers_quiver():
    assert set().union(*EXTRACTED_IN.values()) == set(Q.ids)
    assert sum(map(len, EXTRACTED_IN.values())) == 30
    assert [s for s, _ in decompose_clfb(clfb_canonical("010000")).trace] == list(STEPS)


def test_planted_example():
    rep, planted = random_cocktail({"121111": 2, "010121": 1, "111111": 3}, p=5, seed=7)
    assert decompose_clfb(rep).diagram == planted == oracle_decompose(rep)


def test_everything_at_once_large_field():
    rep, planted = random_cocktail({vid: 2 for vid in Q.ids}, p=101, seed=11)
    res = decompose_clfb(rep, emit_witnesses=True)
    assert res.diagram == planted
    assert conjugate(rep, res.witnesses) == block_form(res, 101)


@settings(max_examples=150, deadline=None)
@given(plants(), st.sampled_from([2, 3, 5, 101]), st.integers(0, 10**6))
def test_matches_plant_oracle_and_witnesses(plant, p, seed):
    rep, planted = random_cocktail(plant, p, seed)
    res = decompose_clfb(rep, emit_witnesses=True)
    assert res.diagram == planted
    assert oracle_decompose(rep) == planted
    assert res.diagram.dimension_total() == rep.dims
    blocks = block_form(res, p)
    assert conjugate(rep, res.witnesses) == blocks
    # idempotence on the block form
    assert decompose_clfb(blocks).diagram == planted


@settings(max_examples=80, deadline=None)
@given(plants(), st.integers(0, 10**6))
def test_flip_equivariance(plant, seed):
    rep, planted = random_cocktail(plant, 3, seed)
    flipped = decompose_clfb(flip_fb(rep)).diagram
    assert flipped == PersistenceDiagram("fb", {flip_id(k): c for k, c in planted.items()})


@settings(max_examples=60, deadline=None)
@given(plants(), st.integers(0, 10**6))
def test_field_stability(plant, seed):
    a, _ = random_cocktail(plant, 2, seed)
    b, _ = random_cocktail(plant, 101, seed)
    assert decompose_clfb(a).diagram == decompose_clfb(b).diagram


@settings(max_examples=80, deadline=None)
@given(plants(), plants(), st.integers(0, 10**6))
def test_oracle_additive_and_conjugation_invariant(p1, p2, seed):
    a, _ = random_cocktail(p1, 5, seed)
    b, _ = random_cocktail(p2, 5, seed + 1)
    assert oracle_decompose(direct_sum(a, b)) == oracle_decompose(a) + oracle_decompose(b)
    c = random_basis_change(a, np.random.default_rng(seed))
    assert decompose_clfb(c).diagram == decompose_clfb(a).diagram


def test_errors():
    with pytest.raises(UnsupportedShapeError, match="representation-infinite"):
        decompose_clfb(zero_rep((0,) * 10, 2, "ffff"))
    bad = make_rep("fb", 2, (1,) * 6, {"f12": [[1]], "f25": [[1]]})
    with pytest.raises(ValidationError):
        decompose_clfb(bad)
    with pytest.raises(ValidationError):
        oracle_decompose(bad)


def test_column_pair_rule_is_enforced():
    w = _Work(clfb_canonical("111111"), witnesses=False)
    with pytest.raises(AlgorithmInvariantError, match="mixes"):
        _c_col_op(w, 0, 1, 1)


def test_nonzero_residual_is_reported(monkeypatch):
    import ladder_persist.decomp as d

    monkeypatch.setattr(d, "_step52", lambda w: None)
    with pytest.raises(AlgorithmInvariantError, match="residual"):
        decompose_clfb(clfb_canonical("000010"))


# -- A_n and marginals ----------------------------------------------------------


def test_an_decompose_examples():
    assert an_decompose([Matrix([[1]], 2)], "f") == {"I[1,1]": 0, "I[1,2]": 1, "I[2,2]": 0}
    assert an_decompose([Matrix([[1, 0]], 3)], "f") == {"I[1,1]": 1, "I[1,2]": 1, "I[2,2]": 0}
    zig = an_decompose([Matrix([[1], [0]], 2), Matrix([[0], [1]], 2)], "fb")
    assert zig["I[1,2]"] == 1 and zig["I[2,3]"] == 1 and sum(zig.values()) == 2
    with pytest.raises(UnsupportedShapeError):
        an_decompose([Matrix([[1]], 2)] * 3, "fff")


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 4), st.integers(0, 4), st.sampled_from([2, 3, 5]), st.data())
def test_an_decompose_a2_rank_formula(m, n, p, data):
    entries = data.draw(st.lists(st.integers(0, p - 1), min_size=m * n, max_size=m * n))
    f = Matrix(np.array(entries, dtype=np.int64).reshape(n, m), p)
    from ladder_persist.exactla import rank

    r = rank(f)
    assert an_decompose([f], "f", p) == {"I[1,1]": m - r, "I[1,2]": r, "I[2,2]": n - r}


def test_marginal_check():
    assert marginal_check(zero_rep((0,) * 6, 2), decompose_clfb(zero_rep((0,) * 6, 2))).ok
    rep, planted = random_cocktail({"010121": 2, "111101": 1, "100100": 1}, 3, 5)
    assert marginal_check(rep, decompose_clfb(rep)).ok
    wrong = PersistenceDiagram("fb", {"010121": 1, "111101": 2, "100100": 1})
    report = marginal_check(rep, wrong)
    assert not report.ok and any("top zigzag" in f for f in report.failures)
