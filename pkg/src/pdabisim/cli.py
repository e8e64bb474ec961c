"""Command-line front end.

Exit codes: 0 success (or Bisimilar), 1 NotBisimilar, 64 usage error,
65 malformed input, 70 budget or cap exhausted.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

from .bisim import (Bisimilar, CheckStats, NotBisimilar, Unknown, approx_distinguish,
                    check_normed, decide)
from .counters import CounterError, canonical_counter, counter_value, tow
from .lts import DEFAULT_NODE_BUDGET, BudgetExceeded, PdaFormatError, format_pda, parse_config, parse_pda
from .macros import MacroError, parse_macros
from .reduction import (DtmError, MachineError, ReductionError, build_reduction, encode_dtm,
                        format_machine, parse_dtm, parse_machine, simulate_machine, toy_machines)
from .transducer import TransducerError

EX_OK, EX_NOT, EX_USAGE, EX_DATA, EX_BUDGET = 0, 1, 64, 65, 70
MALFORMED = (PdaFormatError, MacroError, MachineError, DtmError, TransducerError,
             CounterError, ReductionError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _digest(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()[:16]


def _read(path: str) -> str:
    return Path(path).read_text()


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


class Report:
    def __init__(self, args, argv):
        self.enabled = args.report
        self.data = {"command": list(argv), "inputs": {}, "counters": {}}
        self.t0 = time.perf_counter()

    def input(self, path: str) -> None:
        self.data["inputs"][path] = _digest(path)

    def emit(self, **fields) -> None:
        if not self.enabled:
            return
        self.data.update(fields)
        self.data["seconds"] = round(time.perf_counter() - self.t0, 3)
        print(json.dumps(self.data, sort_keys=True, default=str))


def _verdict_code(v) -> int:
    if isinstance(v, Bisimilar):
        return EX_OK
    if isinstance(v, NotBisimilar):
        return EX_NOT
    return EX_BUDGET


# -- subcommands ---------------------------------------------------------------

def cmd_expand(args, rep: Report) -> int:
    rep.input(args.file)
    pda = parse_macros(_read(args.file)).to_pda()
    _write(format_pda(pda), args.output)
    rep.emit(artifact=args.output or "-", counters={"states": len(pda.states), "rules": len(pda.rules)})
    return EX_OK


def cmd_reduce(args, rep: Report) -> int:
    rep.input(args.file)
    tm = parse_machine(_read(args.file))
    red = build_reduction(tm, args.k, args.n, normed=args.normed)
    _write(format_pda(red.pda), args.output)
    print(f"# start pair: {red.left_start().state} / {red.right_start().state}", file=sys.stderr)
    rep.emit(artifact=args.output or "-",
             counters={"states": len(red.pda.states), "rules": len(red.pda.rules)})
    return EX_OK


def cmd_check(args, rep: Report) -> int:
    rep.input(args.file)
    pda = parse_pda(_read(args.file))
    c1, c2 = parse_config(args.left), parse_config(args.right)
    for c in (c1, c2):
        if c.state not in pda.states:
            raise PdaFormatError(f"unknown control state {c.state!r} in configuration")
    if args.rounds is not None:
        v = approx_distinguish(pda, c1, c2, args.rounds, args.budget)
        stats = CheckStats()
    else:
        stats = CheckStats()
        v = decide(pda, c1, c2, max_cap=args.cap, budget=args.budget, stats=stats)
    print(v)
    counters = {"final_cap": stats.cap, "explored": stats.explored, "positions": stats.positions}
    if args.normed:
        for side, c in (("left", c1), ("right", c2)):
            nv = check_normed(pda, c, budget=args.budget)
            print(f"{side}: {nv.status}")
            counters[f"normed_{side}"] = nv.status
    rep.emit(verdict=str(v), counters=counters)
    return _verdict_code(v)


def cmd_simulate(args, rep: Report) -> int:
    rep.input(args.file)
    tm = parse_machine(_read(args.file))
    run = simulate_machine(tm, max_steps=args.max_steps)
    for z in run.trace:
        print(z)
    at = f" at {run.at}" if run.at is not None else ""
    print(f"# {run.status}{at}; last = 0^l: {run.last == '0' * tm.ell}")
    rep.emit(verdict=run.status, counters={"steps": len(run.trace) - 1})
    return EX_BUDGET if run.status == "step-budget-exceeded" else EX_OK


def cmd_dtm_encode(args, rep: Report) -> int:
    rep.input(args.file)
    m = parse_dtm(_read(args.file))
    tm, enc = encode_dtm(m, args.k, args.n)
    _write(format_machine(tm), args.output)
    rep.emit(artifact=args.output or "-",
             counters={"ell": tm.ell, "block": enc.block, "delay": enc.delay,
                       "t1_states": len(tm.t1.states), "t2_states": len(tm.t2.states),
                       "upsilon": len(tm.upsilon)})
    return EX_OK


def cmd_counter(args, rep: Report) -> int:
    if args.op == "gen":
        if len(args.values) != 1:
            raise UsageError("counter gen LEVEL N VALUE")
        out = " ".join(canonical_counter(args.level, args.n, int(args.values[0])))
    else:
        out = str(counter_value(args.values, args.level, args.n))
    print(out)
    rep.emit(verdict=out)
    return EX_OK


def _demo_run(normed: bool, args):
    results = {}
    for label, key in (("bisimilar-instance", "bisimilar"), ("non-bisimilar-instance", "non-bisimilar")):
        tm = toy_machines(tow(1, 1))[key]
        red = build_reduction(tm, 1, 1, normed=normed)
        stats = CheckStats()
        v = decide(red.pda, red.left_start(), red.right_start(), max_cap=args.cap,
                   budget=args.budget, stats=stats)
        results[label] = (v, stats, red)
    return results


def cmd_demo(args, rep: Report) -> int:
    results = _demo_run(args.normed, args)
    code = EX_OK
    for label, (v, stats, _) in results.items():
        print(f"{label}: {v}")
        if isinstance(v, Unknown):
            code = EX_BUDGET
    if args.figures:
        from . import plots
        out = Path(args.figures)
        out.mkdir(parents=True, exist_ok=True)
        counts = {}
        for normed in (False, True):
            label = "normed" if normed else "plain"
            counts[label] = [(n, len(build_reduction(toy_machines(tow(1, n))["bisimilar"], 1, n,
                                                     normed=normed).pda.rules)) for n in range(1, 7)]
        plots.rule_growth(counts, out / "rule_growth.png")
        plots.cap_vs_explored({k: s.history for k, (_, s, _) in results.items()},
                              out / "cap_vs_explored.png")
        print(f"figures written to {out}")
    rep.emit(verdict={k: str(v) for k, (v, _, _) in results.items()},
             counters={k: {"caps": s.caps, "positions": s.positions} for k, (_, s, _) in results.items()})
    return code


# -- parser --------------------------------------------------------------------

def _global_flags(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--cap", type=int, default=d(128), help="largest stack cap (default 128)")
    p.add_argument("--rounds", type=int, default=d(None), help="bounded-round check instead of the cap search")
    p.add_argument("--budget", type=int, default=d(DEFAULT_NODE_BUDGET), help="node budget")
    p.add_argument("--seed", type=int, default=d(0), help="seed for randomized steps")
    p.add_argument("--report", action="store_true", default=d(False), help="print a JSON report line")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="pdabisim", description="Pushdown bisimilarity reductions and checking.")
    _global_flags(p, suppress=False)
    common = _Parser(add_help=False)
    _global_flags(common, suppress=True)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("expand", parents=[common], help="expand a macro file into plain rules")
    s.add_argument("file")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_expand)

    s = sub.add_parser("reduce", parents=[common], help="build the PDA for a transducer machine")
    s.add_argument("file")
    s.add_argument("-k", type=int, required=True)
    s.add_argument("-n", type=int, required=True)
    s.add_argument("--normed", action="store_true")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("check", parents=[common], help="decide bisimilarity of two configurations")
    s.add_argument("file")
    s.add_argument("left", help="configuration, e.g. 'p | a b'")
    s.add_argument("right")
    s.add_argument("--normed", action="store_true", help="also check normedness of both sides")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("simulate", parents=[common], help="run a transducer machine from 1^l")
    s.add_argument("file")
    s.add_argument("--max-steps", type=int, default=10_000)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("dtm-encode", parents=[common], help="encode a space-bounded DTM")
    s.add_argument("file")
    s.add_argument("-k", type=int, required=True)
    s.add_argument("-n", type=int, required=True)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_dtm_encode)

    s = sub.add_parser("counter", parents=[common], help="canonical counters")
    s.add_argument("op", choices=("gen", "value"))
    s.add_argument("level", type=int)
    s.add_argument("n", type=int)
    s.add_argument("values", nargs="+", help="VALUE for gen, counter symbols for value")
    s.set_defaults(func=cmd_counter)

    s = sub.add_parser("demo", parents=[common], help="end-to-end run on the bundled toy machines")
    s.add_argument("--normed", action="store_true")
    s.add_argument("--figures", metavar="DIR", help="write rule-growth and cap plots here")
    s.set_defaults(func=cmd_demo)
    return p


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        rep = Report(args, argv)
        return args.func(args, rep)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EX_USAGE
    except MALFORMED as e:
        print(f"malformed input: {e}", file=sys.stderr)
        return EX_DATA
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EX_DATA
    except (BudgetExceeded, OverflowError) as e:
        print(f"budget exhausted: {e}", file=sys.stderr)
        return EX_BUDGET


if __name__ == "__main__":
    sys.exit(main())
