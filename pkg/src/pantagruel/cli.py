"""Command-line front end: check programs, run scripted traces, or drive
the interpreter interactively.

Exit codes: 0 success, 1 parse/static/script errors, 2 I/O errors,
3 effect conflict under strict mode.
"""

from __future__ import annotations

import argparse
import sys

from .domains import ConflictError
from .parser import ParseError, parse_program
from .rule_eval import TriggerMode
from .runtime import (
    ExternalChange,
    ExternalChangeError,
    TickRecord,
    initial_state,
    run_trace,
    step,
)
from .script import ScriptError, TickMarker, parse_line, parse_script
from .serialize import serialize_tick, store_text
from .spec_eval import CheckedProgram, check_program

EXIT_OK = 0
EXIT_ERRORS = 1
EXIT_IO = 2
EXIT_CONFLICT = 3


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pantagruel",
        description="Check, run, or interactively drive orchestration programs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("program", help="program file (.ptg)")
        p.add_argument(
            "--mode",
            choices=["edge", "level"],
            default="edge",
            help="how 'value = X' reads the dual store (default: edge)",
        )
        p.add_argument(
            "--format",
            choices=["text", "jsonl"],
            default="text",
            help="trace output format (default: text)",
        )
        p.add_argument(
            "--emit-initial",
            action="store_true",
            help="emit the initial store as a tick-0 record",
        )
        p.add_argument(
            "--max-ticks", type=int, default=None, help="stop after N ticks"
        )
        p.add_argument(
            "--no-strict-conflicts",
            action="store_true",
            help="record effect conflicts and drop the tick's effects "
            "instead of aborting",
        )

    check = sub.add_parser("check", help="parse and statically check a program")
    check.add_argument("program", help="program file (.ptg)")

    run = sub.add_parser("run", help="run a program against an event script")
    common(run)
    run.add_argument("--script", required=True, help="event script file (.evs)")

    repl = sub.add_parser("repl", help="drive a program interactively")
    common(repl)
    return parser


def _read_file(path: str) -> str | None:
    try:
        with open(path, encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        print(f"error: cannot read {path}: {exc.strerror}", file=sys.stderr)
        return None
    except UnicodeDecodeError as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        return None


def _load_checked(path: str) -> CheckedProgram | int:
    """Parse and check a program file; on failure print diagnostics and
    return the exit code instead."""
    source = _read_file(path)
    if source is None:
        return EXIT_IO
    try:
        program = parse_program(source)
    except ParseError as exc:
        for diag in exc.diagnostics:
            print(diag.render(path), file=sys.stderr)
        return EXIT_ERRORS
    checked = check_program(program)
    for diag in checked.diagnostics:
        print(diag.render(path), file=sys.stderr)
    if not checked.ok:
        return EXIT_ERRORS
    return checked


def cmd_check(args: argparse.Namespace) -> int:
    result = _load_checked(args.program)
    if isinstance(result, int):
        return result
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    checked = _load_checked(args.program)
    if isinstance(checked, int):
        return checked
    script_text = _read_file(args.script)
    if script_text is None:
        return EXIT_IO
    try:
        ticks = parse_script(script_text)
    except ScriptError as exc:
        print(f"{args.script}: {exc}", file=sys.stderr)
        return EXIT_ERRORS
    mode = TriggerMode(args.mode)
    try:
        records = run_trace(
            checked,
            ticks,
            mode=mode,
            max_ticks=args.max_ticks,
            strict_conflicts=not args.no_strict_conflicts,
        )
    except ExternalChangeError as exc:
        for diag in exc.diagnostics:
            print(f"tick {exc.tick}: {diag.message}", file=sys.stderr)
        return EXIT_ERRORS
    except ConflictError as exc:
        print(f"conflict at tick {exc.tick}: {exc}", file=sys.stderr)
        return EXIT_CONFLICT
    if args.emit_initial:
        initial = TickRecord(0, (), (), checked.initial_store)
        sys.stdout.write(serialize_tick(initial, args.format))
    for record in records:
        sys.stdout.write(serialize_tick(record, args.format))
    return EXIT_OK


def cmd_repl(args: argparse.Namespace) -> int:
    checked = _load_checked(args.program)
    if isinstance(checked, int):
        return checked
    mode = TriggerMode(args.mode)
    state = initial_state(checked.initial_store)
    pending: list[ExternalChange] = []
    interactive = sys.stdin.isatty()
    if args.emit_initial:
        sys.stdout.write(serialize_tick(TickRecord(0, (), (), state.current), args.format))
    while True:
        if interactive:
            print("> ", end="", file=sys.stderr, flush=True)
        try:
            line = sys.stdin.readline()
        except UnicodeDecodeError as exc:
            print(f"error: undecodable input: {exc}", file=sys.stderr)
            return EXIT_ERRORS
        if not line:
            return EXIT_OK
        text = line.split("#", 1)[0].strip()
        if text in ("quit", "exit"):
            return EXIT_OK
        if text == "state":
            sys.stdout.write(store_text(state.current))
            continue
        try:
            parsed = parse_line(line)
        except ScriptError as exc:
            print(f"error: {exc}", file=sys.stderr)
            continue
        if parsed is None:
            continue
        if not isinstance(parsed, TickMarker):
            pending.append(parsed)
            continue
        try:
            state, record = step(
                state,
                pending,
                checked.rules,
                checked.env,
                mode,
                strict_conflicts=not args.no_strict_conflicts,
            )
        except ExternalChangeError as exc:
            for diag in exc.diagnostics:
                print(f"tick {exc.tick}: {diag.message}", file=sys.stderr)
            pending = []
            continue
        except ConflictError as exc:
            print(f"conflict at tick {exc.tick}: {exc}", file=sys.stderr)
            return EXIT_CONFLICT
        pending = []
        sys.stdout.write(serialize_tick(record, args.format))


def main(argv: list[str] | None = None) -> int:
    args = build_arg_parser().parse_args(argv)
    if args.command == "check":
        return cmd_check(args)
    if args.command == "run":
        return cmd_run(args)
    return cmd_repl(args)


if __name__ == "__main__":
    sys.exit(main())
