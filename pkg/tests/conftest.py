from __future__ import annotations

import numpy as np
import pytest

from ladder_persist.arq import clfb_ar_quiver

# criterion number -> (ok, detail), filled by test_acceptance
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(n: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[n] = (ok, detail)
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}")


def random_plant(rng: np.random.Generator, cap: int = 8, tries: int = 40) -> dict[str, int]:
    """Random multiset of CL(fb) indecomposables with every vertex dimension <= cap."""
    q = clfb_ar_quiver()
    ids = q.ids
    total = np.zeros(6, dtype=int)
    plant: dict[str, int] = {}
    for _ in range(int(rng.integers(0, tries + 1))):
        vid = ids[int(rng.integers(len(ids)))]
        dv = np.array(q.vertex(vid).dimvec)
        if (total + dv <= cap).all():
            total += dv
            plant[vid] = plant.get(vid, 0) + 1
    return plant


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
