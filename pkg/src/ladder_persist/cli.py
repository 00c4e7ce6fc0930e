"""Command-line interface and the JSON file formats.

Exit codes:
    0  success
    1  internal error (including algorithm-invariant violations)
    2  parse or validation error (bad file, non-commuting square, bad flag)
    3  unsupported shape
    4  oracle mismatch or oracle failure
    5  r > s in ``vr``
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any

import numpy as np

from . import decomp
from .arq import (
    PersistenceDiagram,
    UnsupportedShapeError,
    clfb_ar_quiver,
    extended_quiver,
    get_quiver,
    to_dot,
    to_json,
    bottleneck_distance,
)
from .exactla import Matrix, check_prime
from .ladder import LadderRep, ShapeError, ValidationError, ladder_arrows, random_cocktail, validate

EXIT_OK, EXIT_INTERNAL, EXIT_PARSE, EXIT_SHAPE, EXIT_ORACLE, EXIT_PARAM = 0, 1, 2, 3, 4, 5

UNSUPPORTED_MSG = (
    "only CL(fb) decomposition is implemented; commutative ladders of length >= 5 "
    "can be representation-infinite in general, so no finite table exists for them"
)


class FormatError(ValueError):
    """A module or diagram file is malformed."""


# ---------------------------------------------------------------------------
# file formats
# ---------------------------------------------------------------------------


def module_to_json(rep: LadderRep) -> dict[str, Any]:
    return {
        "shape": rep.orientation,
        "field": rep.p,
        "dims": list(rep.dims),
        "maps": {
            a.name: {"rows": rep.maps[a.name].rows, "cols": rep.maps[a.name].cols, "entries": rep.maps[a.name].entries()}
            for a in ladder_arrows(rep.orientation)
        },
    }


def module_from_json(obj: Any, field: int | None = None) -> LadderRep:
    """Parse a module object; raises FormatError or ValidationError."""
    try:
        shape = obj["shape"]
        p = check_prime(int(field if field is not None else obj["field"]))
        dims = [int(d) for d in obj["dims"]]
        raw = obj["maps"]
        if not isinstance(shape, str) or not isinstance(raw, dict):
            raise FormatError("shape must be a string and maps an object")
        maps = {}
        for name, m in raw.items():
            rows, cols = int(m["rows"]), int(m["cols"])
            entries = [int(e) for e in m["entries"]]
            if len(entries) != rows * cols:
                raise FormatError(f"{name}: {len(entries)} entries for a {rows}x{cols} matrix")
            maps[name] = Matrix.wrap(np.array(entries, dtype=np.int64).reshape(rows, cols) % p, p)
        rep = LadderRep(shape, p, tuple(dims), maps)
    except FormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed module file: {exc}") from None
    v = validate(rep)
    if v is not None:
        raise ValidationError(v)
    return rep


def diagram_to_json(d: PersistenceDiagram) -> dict[str, Any]:
    q = get_quiver(d.shape)
    entries = [
        {"dimension_vector": list(q.vertex(k).dimvec), "multiplicity": c}
        for k, c in sorted(d.items(), key=lambda kv: q.index(kv[0]))
    ]
    return {"shape": d.shape, "entries": entries}


def diagram_from_json(obj: Any) -> PersistenceDiagram:
    try:
        shape = obj["shape"]
        q = get_quiver(shape)
        counts: dict[str, int] = {}
        for e in obj["entries"]:
            m = int(e["multiplicity"])
            if m < 0:
                raise FormatError("negative multiplicity")
            vid = q.by_dimvec(tuple(int(x) for x in e["dimension_vector"])).id
            counts[vid] = counts.get(vid, 0) + m
    except (FormatError, UnsupportedShapeError):
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed diagram file: {exc}") from None
    return PersistenceDiagram(shape, counts)


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_atomic(path: str | Path, text: str) -> None:
    """Write-then-rename so readers never observe a partial file."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text: str, out: str | None) -> None:
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def _read_json(path: str) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"{path}: {exc}") from None


def read_module(path: str, field: int | None = None) -> LadderRep:
    return module_from_json(_read_json(path), field)


def read_diagram(path: str) -> PersistenceDiagram:
    return diagram_from_json(_read_json(path))


def witnesses_to_json(result: decomp.DecompositionResult, p: int) -> dict[str, Any]:
    return {
        "field": p,
        "order": [[vid, k] for vid, k in result.order],
        "bases": {
            str(v): {"rows": m.rows, "cols": m.cols, "entries": m.entries()} for v, m in sorted(result.witnesses.items())
        },
    }


def trace_to_text(result: decomp.DecompositionResult) -> str:
    """One line per step: the step name, a tab, then vertex=count pairs."""
    seen = dict(result.trace)
    lines = []
    for step in decomp.STEPS:
        found = seen.get(step, {})
        body = " ".join(f"{k}={c}" for k, c in sorted(found.items())) or "-"
        lines.append(f"{step}\t{body}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# human-readable messages
# ---------------------------------------------------------------------------


def _use_color(stream) -> bool:
    mode = os.environ.get("LADDER_PERSIST_COLOR", "auto").lower()
    if mode == "always":
        return True
    if mode == "never":
        return False
    return hasattr(stream, "isatty") and stream.isatty()


def _err(msg: str) -> None:
    if _use_color(sys.stderr):
        msg = f"\x1b[31m{msg}\x1b[0m"
    print(f"ladder-persist: {msg}", file=sys.stderr)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _decompose_one(path: str, field: int | None, witness: str | None, trace: str | None, out: str | None) -> None:
    rep = read_module(path, field)
    res = decomp.decompose_clfb(rep, emit_witnesses=witness is not None)
    if witness:
        write_atomic(witness, dumps(witnesses_to_json(res, rep.p)))
    if trace:
        write_atomic(trace, trace_to_text(res))
    _emit(dumps(diagram_to_json(res.diagram)), out)


def _decompose_job(args: tuple) -> tuple[str, int, str]:
    path = args[0]
    try:
        _decompose_one(*args)
        return path, EXIT_OK, ""
    except Exception as exc:  # reported by the parent
        return path, _code_for(exc), str(exc)


def _code_for(exc: BaseException) -> int:
    if isinstance(exc, UnsupportedShapeError):
        return EXIT_SHAPE
    if isinstance(exc, (FormatError, ValidationError, ShapeError)):
        return EXIT_PARSE
    if isinstance(exc, decomp.OracleError):
        return EXIT_ORACLE
    return EXIT_INTERNAL


def cmd_decompose(a) -> int:
    if len(a.inputs) == 1 and not a.out_dir:
        _decompose_one(a.inputs[0], a.field, a.witness, a.trace, a.output)
        return EXIT_OK
    if not a.out_dir or a.output or a.witness or a.trace:
        raise FormatError("several inputs need --out-dir and do not take -o/--witness/--trace")
    os.makedirs(a.out_dir, exist_ok=True)
    jobs = [
        (path, a.field, None, None, os.path.join(a.out_dir, Path(path).stem + ".diagram.json")) for path in a.inputs
    ]
    if a.jobs > 1:
        with ProcessPoolExecutor(max_workers=a.jobs) as ex:
            results = list(ex.map(_decompose_job, jobs))
    else:
        results = [_decompose_job(j) for j in jobs]
    worst = EXIT_OK
    for path, code, msg in results:
        if code:
            _err(f"{path}: {msg}")
            worst = max(worst, code)
    return worst


def cmd_oracle(a) -> int:
    rep = read_module(a.input, a.field)
    if rep.orientation != "fb":
        raise UnsupportedShapeError(UNSUPPORTED_MSG)
    algo = decomp.decompose_clfb(rep).diagram
    try:
        oracle = decomp.oracle_decompose(rep)
    except decomp.OracleError as exc:
        _err(f"oracle failed: {exc}")
        return EXIT_ORACLE
    if algo != oracle:
        _err("decomposition and oracle disagree")
        sys.stdout.write("decompose: " + json.dumps(algo.as_dict(), sort_keys=True) + "\n")
        sys.stdout.write("oracle:    " + json.dumps(oracle.as_dict(), sort_keys=True) + "\n")
        return EXIT_ORACLE
    sys.stdout.write("match: " + json.dumps(algo.as_dict(), sort_keys=True) + "\n")
    return EXIT_OK


def cmd_vr(a) -> int:
    from .homtda import PointCloudError, read_point_cloud, two_space_module

    if a.r > a.s:
        _err(f"need r <= s, got r={a.r} s={a.s}")
        return EXIT_PARAM
    try:
        px, py = read_point_cloud(a.x), read_point_cloud(a.y)
        if set(px.labels) != set(py.labels):
            raise PointCloudError("point clouds must carry the same labels for identification")
    except (OSError, PointCloudError) as exc:
        raise FormatError(str(exc)) from None
    rep = two_space_module(px, py, a.r, a.s, a.deg, a.maxdim)
    if a.module_out:
        write_atomic(a.module_out, dumps(module_to_json(rep)))
    res = decomp.decompose_clfb(rep)
    _emit(dumps(diagram_to_json(res.diagram)), a.output)
    return EXIT_OK


def cmd_distance(a) -> int:
    d, e = read_diagram(a.a), read_diagram(a.b)
    if d.shape != e.shape:
        raise FormatError(f"shape mismatch: {d.shape} vs {e.shape}")
    print(bottleneck_distance(d, e, extended_quiver(d.shape)))
    return EXIT_OK


def _parse_shape(shape: str):
    if shape != "fb" and not shape.startswith("an:"):
        raise UnsupportedShapeError(f"unknown shape {shape!r}; use fb or an:N")
    if shape.startswith("an:"):
        try:
            n = int(shape[3:])
        except ValueError:
            raise FormatError(f"bad shape {shape!r}") from None
        if n < 1:
            raise FormatError("an:N needs N >= 1")
    return get_quiver(shape)


def cmd_arq(a) -> int:
    q = _parse_shape(a.shape)
    if a.extended:
        q = extended_quiver(q.shape)
    text = to_dot(q) if a.format == "dot" else dumps(to_json(q))
    _emit(text, a.output)
    return EXIT_OK


def _parse_plant(spec: str) -> dict[str, int]:
    q = clfb_ar_quiver()
    out: dict[str, int] = {}
    for part in filter(None, (s.strip() for s in spec.split(","))):
        vid, _, k = part.partition(":")
        try:
            q.vertex(vid)
            mult = int(k) if k else 1
        except (KeyError, ValueError):
            raise FormatError(f"bad plant entry {part!r}: expected a CL(fb) vertex id like 121111:2") from None
        if mult < 0:
            raise FormatError(f"negative multiplicity in {part!r}")
        out[vid] = out.get(vid, 0) + mult
    return out


def _plant_for_dims(dims: list[int], rng: np.random.Generator) -> dict[str, int]:
    """Random multiset of indecomposables whose dimension vectors sum to dims."""
    q = clfb_ar_quiver()
    left = np.array(dims)
    out: dict[str, int] = {}
    vecs = [(v.id, np.array(v.dimvec)) for v in q.vertices]
    while left.sum():
        fits = [vid for vid, dv in vecs if (dv <= left).all()]
        vid = fits[int(rng.integers(len(fits)))]
        out[vid] = out.get(vid, 0) + 1
        left = left - np.array(q.vertex(vid).dimvec)
    return out


def cmd_random(a) -> int:
    try:
        p = check_prime(a.field)
    except ValueError as exc:
        raise FormatError(str(exc)) from None
    if a.plant is not None:
        plant = _parse_plant(a.plant)
    else:
        try:
            dims = [int(x) for x in a.dims.split(",")]
        except ValueError:
            raise FormatError(f"bad --dims {a.dims!r}") from None
        if len(dims) != 6 or min(dims) < 0:
            raise FormatError("--dims needs six nonnegative integers")
        plant = _plant_for_dims(dims, np.random.default_rng([a.seed, 1]))
    rep, diagram = random_cocktail(plant, p, a.seed)
    _emit(dumps(module_to_json(rep)), a.output)
    if a.diagram_out:
        write_atomic(a.diagram_out, dumps(diagram_to_json(diagram)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ladder-persist", description="Persistence diagrams on the commutative ladder CL(fb).")
    sub = ap.add_subparsers(dest="cmd", required=True)

    d = sub.add_parser("decompose", help="decompose module file(s) into indecomposables")
    d.add_argument("inputs", nargs="+")
    d.add_argument("--field", type=int, help="override the prime field of the file")
    d.add_argument("--witness", metavar="PATH", help="write per-vertex basis changes")
    d.add_argument("--trace", metavar="PATH", help="write per-step extraction counts")
    d.add_argument("-o", "--output", help="diagram output (default stdout)")
    d.add_argument("--out-dir", help="output directory for several inputs")
    d.add_argument("--jobs", type=int, default=1, help="parallel workers for several inputs")
    d.set_defaults(func=cmd_decompose)

    o = sub.add_parser("oracle", help="compare the decomposition with the hom-count oracle")
    o.add_argument("input")
    o.add_argument("--field", type=int)
    o.set_defaults(func=cmd_oracle)

    v = sub.add_parser("vr", help="two point clouds -> Vietoris-Rips ladder module -> diagram")
    v.add_argument("--x", required=True, help="CSV for P_X (label,x,y,z)")
    v.add_argument("--y", required=True, help="CSV for P_Y (label,x,y,z)")
    v.add_argument("--r", type=float, required=True)
    v.add_argument("--s", type=float, required=True)
    v.add_argument("--deg", type=int, default=1, help="homology degree")
    v.add_argument("--maxdim", type=int, help="maximal simplex dimension (default deg+1)")
    v.add_argument("--identify", choices=["label"], default="label", help="how points of X and Y are paired")
    v.add_argument("-o", "--output")
    v.add_argument("--module-out", help="also write the assembled module file")
    v.set_defaults(func=cmd_vr)

    t = sub.add_parser("distance", help="bottleneck distance of two diagram files")
    t.add_argument("a")
    t.add_argument("b")
    t.set_defaults(func=cmd_distance)

    q = sub.add_parser("arq", help="print an Auslander-Reiten quiver")
    q.add_argument("--shape", default="fb", help="fb or an:N")
    q.add_argument("--extended", action="store_true", help="add the zero vertices Z(i)")
    q.add_argument("--format", choices=["dot", "json"], default="dot")
    q.add_argument("-o", "--output")
    q.set_defaults(func=cmd_arq)

    r = sub.add_parser("random", help="random module with a planted diagram")
    g = r.add_mutually_exclusive_group(required=True)
    g.add_argument("--plant", help="e.g. 121111:2,111111:1")
    g.add_argument("--dims", help="six comma-separated dimensions")
    r.add_argument("--seed", type=int, required=True)
    r.add_argument("--field", type=int, default=2)
    r.add_argument("-o", "--output")
    r.add_argument("--diagram-out")
    r.set_defaults(func=cmd_random)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UnsupportedShapeError as exc:
        _err(f"unsupported shape: {exc}. {UNSUPPORTED_MSG}")
        return EXIT_SHAPE
    except ValidationError as exc:
        _err(f"invalid module: {exc}")
        return EXIT_PARSE
    except (FormatError, ShapeError) as exc:
        _err(str(exc))
        return EXIT_PARSE
    except decomp.OracleError as exc:
        _err(f"oracle failed: {exc}")
        return EXIT_ORACLE
    except Exception as exc:  # never exit 0 after an internal failure
        _err(f"internal error: {type(exc).__name__}: {exc}")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
