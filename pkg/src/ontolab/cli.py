"""Command line interface.

Exit codes: 0 for success (or a positive verdict), 1 for a negative verdict
(validation failure, violated bound, infeasible budget, counterexamples),
2 for input errors (missing files, malformed JSON, schema violations, bad
arguments).  Reports go to stdout as JSON unless a command is inherently
tabular (bound-sweep) or --csv/--out redirects them.  Output is
byte-identical for identical inputs and seeds.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .cloning import clone_sim
from .epistemic import compute_report
from .errors import (
    ConsistencyError,
    DimensionError,
    FormatError,
    InfeasibleError,
    OntolabError,
    OrderingError,
    OrthogonalPairError,
    TooLargeError,
    UnboundedError,
    UndecidableError,
)
from .library import data_dir
from .models import _ket_from_json, load_model, model_to_json, validate
from .quantum import ProjectiveMeasurement
from .search import max_overlap_lp
from .tables import (
    SettingGrid,
    TemporalOrder,
    classify,
    evolve_local_measurement,
    load_table,
    proposition1_check,
    table_to_json,
)

_VERDICT_NEGATIVE = 1
_INPUT_ERROR = 2


def _resolve_input(path_str: str) -> Path:
    """Existing path as given, else the packaged data directory."""
    path = Path(path_str)
    if path.exists():
        return path
    if not path.is_absolute():
        fallback = data_dir() / path_str
        if fallback.exists():
            return fallback
    raise FileNotFoundError(f"input file {path_str!r} not found (also tried {data_dir()})")


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _emit_json(obj, out: str | None) -> None:
    _emit(json.dumps(obj, indent=2) + "\n", out)


# ---------------------------------------------------------------------------
# subcommands


def _cmd_validate(args) -> int:
    model = load_model(_resolve_input(args.model))
    report = validate(model, tolerance=args.tolerance)
    _emit_json(report.to_dict(), args.out)
    return 0 if report.passed else _VERDICT_NEGATIVE


def _parse_pairs(spec: str) -> list[tuple[str, str]]:
    pairs = []
    for chunk in spec.split(","):
        parts = chunk.split(":")
        if len(parts) != 2 or not parts[0] or not parts[1]:
            raise ValueError(f"pair {chunk!r} must look like phi:psi")
        pairs.append((parts[0], parts[1]))
    return pairs


def _cmd_epistemicity(args) -> int:
    model = load_model(_resolve_input(args.model))
    pairs = _parse_pairs(args.pairs) if args.pairs else None
    report = compute_report(model, pairs=pairs)
    if args.csv:
        _emit(report.to_csv(), args.out)
    else:
        _emit_json(report.to_dict(), args.out)
    violated = any(not check.satisfied for check in report.bound_checks)
    return _VERDICT_NEGATIVE if violated else 0


def _cmd_classify(args) -> int:
    table = load_table(_resolve_input(args.table))
    typed = classify(table)
    _emit_json(
        {
            "tag": typed.tag.value,
            "witnesses": [
                {
                    "party": w.party,
                    "setting": w.setting,
                    "remote_pair": list(w.remote_pair),
                    "outcomes": list(w.outcomes),
                }
                for w in typed.witnesses
            ],
        },
        args.out,
    )
    return 0


def _cmd_evolve(args) -> int:
    table = load_table(_resolve_input(args.table))
    constraint = evolve_local_measurement(
        table, args.party, args.setting, prior_measurement=args.prior_measurement
    )
    rng = np.random.default_rng(args.seed)
    payload = constraint.to_dict()
    payload["admissible_count"] = constraint.count()
    payload["sample_table"] = json.loads(table_to_json(constraint.sample(rng)))
    _emit_json(payload, args.out)
    return 0


def _cmd_clone_sim(args) -> int:
    model = load_model(_resolve_input(args.model))
    basis = args.basis.split(",")
    if len(basis) != 2:
        raise ValueError(f"--basis needs two comma-separated preparation ids, got {args.basis!r}")
    report = clone_sim(model, (basis[0], basis[1]), args.psi, rest_cap=args.rest_cap)
    _emit_json(report.to_dict(), args.out)
    return 0 if report.feasibility.feasible else _VERDICT_NEGATIVE


def _parse_alpha_grid(spec: str) -> list[float]:
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ValueError(f"alpha range {spec!r} must look like start:stop:step")
        start, stop, step = (float(p) for p in parts)
        if step <= 0 or stop < start:
            raise ValueError(f"alpha range {spec!r} is empty")
        count = int(round((stop - start) / step)) + 1
        # round away binary accumulation noise so grid points print cleanly
        values = [round(start + k * step, 12) for k in range(count)]
        return [v for v in values if v <= stop + 1e-12]
    return [float(p) for p in spec.split(",")]


def _cmd_bound_sweep(args) -> int:
    from .cloning import bound_sweep, sweep_to_csv

    rows = bound_sweep(_parse_alpha_grid(args.alpha), jobs=args.jobs)
    _emit(sweep_to_csv(rows), args.out)
    return 0


def _load_search_instance(path: Path):
    text = path.read_text(encoding="utf-8")
    obj = json.loads(text)
    problems: list[str] = []
    if not isinstance(obj, dict):
        raise FormatError(["search instance must be a JSON object"])
    for key in obj:
        if key not in ("states", "measurements", "objective", "ontic_count"):
            problems.append(f"unknown key {key!r}")
    states_obj = obj.get("states")
    if not isinstance(states_obj, dict) or not states_obj:
        problems.append("states must be a nonempty object of id -> ket")
        raise FormatError(problems)
    dimension = None
    for sid, ket_obj in states_obj.items():
        if isinstance(ket_obj, list) and len(ket_obj) in (2, 4):
            dimension = dimension or len(ket_obj)
    if dimension is None:
        problems.append("no state has a valid dimension (2 or 4 amplitude pairs)")
        raise FormatError(problems)
    state_ids, states = [], []
    for sid, ket_obj in states_obj.items():
        ket = _ket_from_json(ket_obj, f"states[{sid}]", dimension, problems)
        if ket is not None:
            state_ids.append(sid)
            states.append(ket)
    measurements_obj = obj.get("measurements", {})
    if not isinstance(measurements_obj, dict):
        problems.append("measurements must be an object of id -> basis")
        measurements_obj = {}
    meas_ids, measurements = [], []
    for mid, basis_obj in measurements_obj.items():
        if not isinstance(basis_obj, list) or len(basis_obj) != dimension:
            problems.append(f"measurements[{mid}]: basis must list {dimension} kets")
            continue
        basis = []
        for k, vec_obj in enumerate(basis_obj):
            vec = _ket_from_json(vec_obj, f"measurements[{mid}][{k}]", dimension, problems)
            if vec is not None:
                basis.append(vec)
        if len(basis) != dimension:
            continue
        try:
            measurement = ProjectiveMeasurement(
                basis=tuple(basis), labels=tuple(str(k) for k in range(dimension))
            )
        except (ValueError, DimensionError) as exc:
            problems.append(f"measurements[{mid}]: {exc}")
            continue
        meas_ids.append(mid)
        measurements.append(measurement)
    objective = obj.get("objective")
    if (
        not isinstance(objective, list)
        or len(objective) != 2
        or any(not isinstance(x, str) for x in objective)
    ):
        problems.append("objective must be a pair of state ids")
        objective = None
    elif not problems:
        for x in objective:
            if x not in state_ids:
                problems.append(f"objective id {x!r} is not a state")
                objective = None
    ontic_count = obj.get("ontic_count")
    if ontic_count is not None and (type(ontic_count) is not int or ontic_count < 1):
        problems.append("ontic_count must be a positive integer")
    if problems:
        raise FormatError(problems)
    pair = (state_ids.index(objective[0]), state_ids.index(objective[1]))
    return states, measurements, ontic_count, pair, tuple(state_ids), tuple(meas_ids)


def _cmd_search(args) -> int:
    states, measurements, ontic_count, pair, sids, mids = _load_search_instance(
        _resolve_input(args.instance)
    )
    optimum, witness = max_overlap_lp(
        states,
        measurements,
        ontic_count=ontic_count,
        objective_pair=pair,
        state_ids=sids,
        measurement_ids=mids,
    )
    _emit_json(
        {
            "optimum": optimum,
            "objective": [sids[pair[0]], sids[pair[1]]],
            "witness": json.loads(model_to_json(witness)),
        },
        args.out,
    )
    return 0


def _cmd_prop1(args) -> int:
    grid = SettingGrid(tuple(args.alice.split(",")), tuple(args.bob.split(",")))
    anchor = None
    if args.anchor:
        parts = args.anchor.split(",")
        if len(parts) != 2:
            raise ValueError(f"--anchor needs 'x,y', got {args.anchor!r}")
        if parts[0] not in grid.alice or parts[1] not in grid.bob:
            raise ValueError(f"anchor {args.anchor!r} is not a grid cell")
        anchor = (parts[0], parts[1])
    verdict = proposition1_check(
        grid,
        order=TemporalOrder(args.order),
        anchor=anchor,
        max_tables=args.max_tables,
        jobs=args.jobs,
    )
    _emit_json(verdict.to_dict(), args.out)
    return 0 if verdict.passed else _VERDICT_NEGATIVE


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ontolab",
        description="Construct, validate and analyze discrete ontological models of qubit systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="structural and Born-rule audit of a model file")
    p.add_argument("model")
    p.add_argument("--tolerance", type=float, default=None, help="override the model's Born tolerance")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("epistemicity", help="overlap table and bound checks for a model file")
    p.add_argument("model")
    p.add_argument("--pairs", default=None, help="comma-separated phi:psi preparation pairs")
    p.add_argument("--csv", action="store_true", help="emit the pair table as CSV")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_epistemicity)

    p = sub.add_parser("classify", help="ontic type tag of an assignment table")
    p.add_argument("table")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("evolve", help="post-measurement constraint for a table")
    p.add_argument("table")
    p.add_argument("--party", required=True, choices=("A", "B"))
    p.add_argument("--setting", required=True)
    p.add_argument("--prior-measurement", default=None, choices=("A", "B"))
    p.add_argument("--seed", type=int, default=42, help="seed for the sampled admissible table")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_evolve)

    p = sub.add_parser("clone-sim", help="cloning budget and feasibility for a model file")
    p.add_argument("model")
    p.add_argument("--basis", required=True, help="two machine-basis preparation ids, comma-separated")
    p.add_argument("--psi", required=True, help="input preparation id")
    p.add_argument("--rest-cap", type=float, default=None, help="tighter CHSH cap for the rest region")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_clone_sim)

    p = sub.add_parser("bound-sweep", help="overlap budget across alpha_sq values (CSV)")
    p.add_argument("--alpha", required=True, help="start:stop:step range or comma list of alpha_sq")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_bound_sweep)

    p = sub.add_parser("search", help="maximum-overlap LP over deterministic response patterns")
    p.add_argument("instance", help="JSON with states, measurements, objective")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_search)

    p = sub.add_parser("prop1", help="exhaustive product-anchor evolution check")
    p.add_argument("--alice", default="sz,sx", help="comma-separated settings for the first party")
    p.add_argument("--bob", default="sz,sx", help="comma-separated settings for the second party")
    p.add_argument("--order", default="ALICE_FIRST", choices=[o.value for o in TemporalOrder])
    p.add_argument("--anchor", default=None, help="anchor cell 'x,y' (default: first settings)")
    p.add_argument("--max-tables", type=int, default=2**20)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_prop1)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _INPUT_ERROR
    except json.JSONDecodeError as exc:
        print(
            f"error: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}",
            file=sys.stderr,
        )
        return _INPUT_ERROR
    except FormatError as exc:
        for problem in exc.problems:
            print(f"error: {problem}", file=sys.stderr)
        return _INPUT_ERROR
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return _VERDICT_NEGATIVE
    except ConsistencyError as exc:
        print(f"consistency failure: {exc}", file=sys.stderr)
        return _VERDICT_NEGATIVE
    except (
        ValueError,
        KeyError,
        OrderingError,
        OrthogonalPairError,
        TooLargeError,
        UnboundedError,
        UndecidableError,
        DimensionError,
        OntolabError,
    ) as exc:
        message = exc.args[0] if exc.args else exc
        print(f"error: {message}", file=sys.stderr)
        return _INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
