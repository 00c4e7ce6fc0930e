"""Generate the committed two-cubes point clouds.

X is the cube of side 4 with vertices labelled 1..8.  Y adds uniform noise
in [-0.1, 0.1] per coordinate, rounded to 4 decimals.  Seeds are tried in
increasing order; the first one is kept for which

* at r = 2.1 (diameter 4.2) every cube edge of Y is present,
* at r = 2.052 (diameter 4.104) exactly three cube edges of Y are missing
  and the remaining edge graph is connected,
* every pairwise distance is at least 1e-3 away from 4.2, 4.104 and 5.

Usage: python3 scripts/make_cube_fixture.py [OUTDIR]
"""

from __future__ import annotations

import itertools
import sys
from pathlib import Path

import numpy as np

THRESHOLDS = (4.2, 4.104, 5.0)
MARGIN = 1e-3


def cube() -> np.ndarray:
    return 4.0 * np.array(list(itertools.product((0, 1), repeat=3)), dtype=float)


def cube_edges(x: np.ndarray) -> list[tuple[int, int]]:
    return [(i, j) for i, j in itertools.combinations(range(8), 2) if np.isclose(np.linalg.norm(x[i] - x[j]), 4.0)]


def connected(n: int, edges) -> bool:
    seen, stack = {0}, [0]
    while stack:
        u = stack.pop()
        for a, b in edges:
            for s, t in ((a, b), (b, a)):
                if s == u and t not in seen:
                    seen.add(t)
                    stack.append(t)
    return len(seen) == n


def acceptable(x: np.ndarray, y: np.ndarray) -> bool:
    edges = cube_edges(x)
    dist = {e: float(np.linalg.norm(y[e[0]] - y[e[1]])) for e in edges}
    if any(d > 4.2 for d in dist.values()):
        return False
    kept = [e for e in edges if dist[e] <= 4.104]
    if len(edges) - len(kept) != 3 or not connected(8, kept):
        return False
    for i, j in itertools.combinations(range(8), 2):
        d = float(np.linalg.norm(y[i] - y[j]))
        if any(abs(d - t) < MARGIN for t in THRESHOLDS):
            return False
    return True


def find_seed(limit: int = 100_000) -> tuple[int, np.ndarray]:
    x = cube()
    for seed in range(limit):
        rng = np.random.default_rng(seed)
        y = np.round(x + rng.uniform(-0.1, 0.1, size=x.shape), 4)
        if acceptable(x, y):
            return seed, y
    raise RuntimeError("no acceptable seed found")


def write(path: Path, pts: np.ndarray) -> None:
    lines = ["label,x,y,z"]
    for i, p in enumerate(pts, start=1):
        lines.append(f"{i}," + ",".join(f"{c:.4f}" for c in p))
    path.write_text("\n".join(lines) + "\n")


def main(argv: list[str]) -> int:
    out = Path(argv[1]) if len(argv) > 1 else Path(__file__).resolve().parents[1] / "tests" / "fixtures"
    out.mkdir(parents=True, exist_ok=True)
    seed, y = find_seed()
    write(out / "cube_x.csv", cube())
    write(out / "cube_y.csv", y)
    print(f"seed {seed}")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
