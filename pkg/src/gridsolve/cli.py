"""Batch front end: solve, check, and export workbook files.

Exit codes for `solve`: 0 SAT, 1 UNSAT, 2 TIMEOUT, 3 input error.
`check` exits 0 when the solution satisfies every constraint, 1 when a
constraint is violated (the first one is printed), 3 on malformed input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from typing import Optional

from .compiler import (
    LoweringError,
    SolutionShapeError,
    emit_clpfd,
    lift_solution,
    lower,
    verify_display_solution,
)
from .fd import SolveConfig, solve_all
from .formula import CellRef, ParseError, format_value
from .formula.parser import parse_value_literal
from .sheet import SAMPLE_NAMES, WorkbookError, dumps, load, load_sample

OK, UNSAT, TIMED_OUT, INPUT_ERROR = 0, 1, 2, 3


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return INPUT_ERROR


def _load_workbook(path: str):
    try:
        return load(path)
    except OSError as err:
        raise SystemExit(_fail(str(err)))
    except WorkbookError as err:
        raise SystemExit(_fail(str(err)))


def _sorted_items(solution: dict[CellRef, object]) -> list[tuple[str, str]]:
    # row-major address order, stable across runs
    ordered = sorted(solution.items(), key=lambda kv: (kv[0].row, kv[0].col))
    return [(ref.text(), format_value(value)) for ref, value in ordered]


def cmd_solve(args) -> int:
    wb = _load_workbook(args.file)
    try:
        instance, vm = lower(wb)
    except LoweringError as err:
        return _fail(str(err))
    config = SolveConfig(max_solutions=args.all, timeout_ms=args.timeout)
    result = solve_all(instance, config)
    solutions = [_sorted_items(lift_solution(a, vm, wb)) for a in result.solutions]

    if args.out:
        payload = {
            "status": "timeout" if result.timed_out else ("sat" if solutions else "unsat"),
            "solutions": [dict(items) for items in solutions],
        }
        with open(args.out, "w", encoding="utf-8") as f:
            if args.format == "csv":
                f.write(_to_csv(solutions))
            else:
                json.dump(payload, f, indent=2, sort_keys=True)
                f.write("\n")

    if args.format == "csv":
        sys.stdout.write(_to_csv(solutions))
    else:
        for n, items in enumerate(solutions, 1):
            print(f"solution {n}:")
            for addr, value in items:
                print(f"  {addr} = {value}")
    if result.timed_out:
        print("TIMEOUT", file=sys.stderr)
        return TIMED_OUT
    if not solutions:
        print("UNSAT")
        return UNSAT
    return OK


def _to_csv(solutions: list[list[tuple[str, str]]]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["solution", "addr", "value"])
    for n, items in enumerate(solutions, 1):
        for addr, value in items:
            writer.writerow([n, addr, value])
    return out.getvalue()


def _parse_solution_values(doc) -> list[dict[str, object]]:
    if isinstance(doc, dict) and "solutions" in doc:
        raw_list = doc["solutions"]
    else:
        raw_list = [doc]
    out = []
    for raw in raw_list:
        if not isinstance(raw, dict):
            raise SolutionShapeError("solution entries must be objects")
        values = {}
        for key, value in raw.items():
            if isinstance(value, bool) or value is None:
                raise SolutionShapeError(f"bad value for {key}: {value!r}")
            text = value if isinstance(value, str) else repr(value)
            try:
                values[str(key)] = parse_value_literal(text)
            except ParseError as err:
                raise SolutionShapeError(f"bad value for {key}: {err}")
        out.append(values)
    return out


def cmd_check(args) -> int:
    wb = _load_workbook(args.file)
    try:
        with open(args.solution, "r", encoding="utf-8") as f:
            doc = json.load(f)
    except OSError as err:
        return _fail(str(err))
    except json.JSONDecodeError as err:
        return _fail(f"solution file is not valid JSON: {err}")
    try:
        solutions = _parse_solution_values(doc)
        for n, values in enumerate(solutions, 1):
            ok, message = verify_display_solution(wb, values)
            if not ok:
                where = f"solution {n}: " if len(solutions) > 1 else ""
                print(f"FAIL {where}{message}")
                return UNSAT
    except (SolutionShapeError, LoweringError) as err:
        return _fail(str(err))
    print("OK")
    return OK


def cmd_emit(args) -> int:
    wb = _load_workbook(args.file)
    try:
        text = emit_clpfd(wb)
    except LoweringError as err:
        return _fail(str(err))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return OK


def cmd_samples(args) -> int:
    if args.action == "list":
        for name in SAMPLE_NAMES:
            print(name)
        return OK
    try:
        wb = load_sample(args.name)
    except WorkbookError as err:
        return _fail(str(err))
    text = dumps(wb)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridsolve", description="constraint spreadsheet tools"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve a workbook file")
    p.add_argument("file")
    p.add_argument("--all", type=int, default=1, metavar="N", help="solutions to find")
    p.add_argument("--timeout", type=int, default=10000, metavar="MS")
    p.add_argument("--out", metavar="FILE", help="write machine output here")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("check", help="verify a solution file against a workbook")
    p.add_argument("file")
    p.add_argument("solution")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("emit", help="export CLP(FD) program text")
    p.add_argument("file")
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(func=cmd_emit)

    p = sub.add_parser("samples", help="list or dump sample problems")
    samples_sub = p.add_subparsers(dest="action", required=True)
    samples_sub.add_parser("list")
    dump = samples_sub.add_parser("dump")
    dump.add_argument("name", choices=SAMPLE_NAMES)
    dump.add_argument("--out", metavar="FILE")
    p.set_defaults(func=cmd_samples)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument(
        "--port", type=int, default=int(os.environ.get("GRIDSOLVE_PORT", 7717))
    )
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SystemExit as err:
        code = err.code
        return code if isinstance(code, int) else INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
