from __future__ import annotations

import numpy as np
import pytest

from ladder_persist.exactla import Matrix
from ladder_persist.ladder import (
    ShapeError,
    ValidationError,
    check_valid,
    conjugate,
    direct_sum,
    flip_fb,
    ladder_arrows,
    ladder_squares,
    make_rep,
    random_basis_change,
    random_cocktail,
    validate,
    zero_rep,
)


def test_fb_arrow_order_and_squares():
    assert [a.name for a in ladder_arrows("fb")] == ["f12", "f32", "f14", "f36", "f25", "f45", "f65"]
    assert ladder_squares("fb") == ((1, 2, 5, 4), (3, 2, 5, 6))


def test_longer_orientation_names():
    arrows = ladder_arrows("ffff")
    assert len(arrows) == 4 + 4 + 5
    assert any(a.name == "f5_10" for a in arrows)


def test_shape_errors():
    with pytest.raises(ShapeError):
        make_rep("fb", 2, (1, 1, 1, 1, 1))
    with pytest.raises(ShapeError):
        make_rep("fb", 2, (1, 1, 1, 1, 1, 1), {"f12": [[1, 1]]})
    with pytest.raises(ShapeError):
        make_rep("fb", 2, (1,) * 6, {"g": [[1]]})
    with pytest.raises(ShapeError):
        make_rep("fx", 2, (1,) * 4)


def test_validate_names_the_square():
    # f25 f12 = 1 but f45 f14 = 0 on the left square
    rep = make_rep("fb", 3, (1,) * 6, {"f12": [[1]], "f25": [[1]]})
    v = validate(rep)
    assert v is not None and v.square == (1, 2, 5, 4)
    assert "(1,2,5,4)" in str(v)
    with pytest.raises(ValidationError):
        check_valid(rep)


def test_zero_dims_are_legal():
    rep = zero_rep((0, 2, 0, 0, 1, 0), 5)
    assert validate(rep) is None
    assert rep.maps["f25"].shape == (1, 2)


def test_direct_sum_and_conjugate_roundtrip():
    rng = np.random.default_rng(0)
    rep, _ = random_cocktail({"121111": 1, "010121": 1, "111111": 2}, p=3, seed=1)
    assert validate(direct_sum(rep, rep)) is None
    assert direct_sum(rep, rep).dims == tuple(2 * d for d in rep.dims)
    other = random_basis_change(rep, rng)
    assert validate(other) is None
    # conjugating by B then by B^-1 returns the input
    bases = {v: np.eye(d, dtype=np.int64) for v, d in enumerate(rep.dims, start=1)}
    assert conjugate(rep, bases) == rep


def test_flip_is_an_involution():
    rep, _ = random_cocktail({"110100": 1, "011111": 1}, p=2, seed=3)
    f = flip_fb(rep)
    assert validate(f) is None
    assert f.dims == (rep.dims[2], rep.dims[1], rep.dims[0], rep.dims[5], rep.dims[4], rep.dims[3])
    assert flip_fb(f) == rep


def test_random_cocktail_is_deterministic():
    a, da = random_cocktail({"121111": 2}, p=5, seed=7)
    b, db = random_cocktail({"121111": 2}, p=5, seed=7)
    assert a == b and da == db
    empty, d0 = random_cocktail({}, p=2, seed=0)
    assert empty.dims == (0,) * 6 and d0.total() == 0


def test_matrix_maps_keep_field():
    rep = make_rep("fb", 7, (1,) * 6, {n: Matrix.identity(1, 7) for n in ["f12", "f32", "f14", "f36", "f25", "f45", "f65"]})
    assert validate(rep) is None
    with pytest.raises(ShapeError):
        make_rep("fb", 5, (1,) * 6, {"f12": Matrix.identity(1, 7)})
