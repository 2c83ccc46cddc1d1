"""Command-line workbench: run machines, compile, evaluate and cross-check.

Exit statuses (stable, one per error class):

  0  success (halted, agreed, evaluated)
  1  unexpected internal error
  2  usage error
  3  bound reached before halting
  4  acceleration failure (no lasso certificate)
  5  syntax error in a program, formula, ordinal or precomputation file
  6  sort error
  7  unbound variable
  8  uncertified limit evaluation under --strict
  9  IAM program not functional
 10  unsupported program (e.g. multi-tape compile)
 11  cross-check divergence
 12  malformed output or encoding, or no answer because the run did not halt
 13  file could not be read or written
"""

from __future__ import annotations

import argparse
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from . import bridge, corpus, harness, iam, lc_logic, otm, precomp
from .lasso import AccelerationFailure
from .ordinal import OMEGA, OrdinalError, format_ordinal, parse_ordinal

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2
EXIT_BOUND = 3
EXIT_ACCEL = 4
EXIT_SYNTAX = 5
EXIT_SORT = 6
EXIT_UNBOUND = 7
EXIT_UNCERTIFIED = 8
EXIT_NOT_FUNCTIONAL = 9
EXIT_UNSUPPORTED = 10
EXIT_DIVERGENCE = 11
EXIT_MALFORMED = 12
EXIT_IO = 13

# most specific first
ERROR_STATUS = [
    (lc_logic.UncertifiedLimitEvaluation, EXIT_UNCERTIFIED),
    (lc_logic.UnboundVariable, EXIT_UNBOUND),
    (lc_logic.SortError, EXIT_SORT),
    (lc_logic.LcSyntaxError, EXIT_SYNTAX),
    (otm.OtmSyntaxError, EXIT_SYNTAX),
    (OrdinalError, EXIT_SYNTAX),
    (iam.ProgramNotFunctional, EXIT_NOT_FUNCTIONAL),
    (iam.BoundReached, EXIT_BOUND),
    (iam.NotHalted, EXIT_MALFORMED),
    (iam.MalformedOutput, EXIT_MALFORMED),
    (bridge.UnsupportedProgram, EXIT_UNSUPPORTED),
    (bridge.BridgeError, EXIT_MALFORMED),
    (AccelerationFailure, EXIT_ACCEL),
    (OSError, EXIT_IO),
    (lc_logic.LcError, EXIT_SYNTAX),
    (iam.IamError, EXIT_MALFORMED),
    (otm.OtmError, EXIT_SYNTAX),
]


def status_for(exc: BaseException) -> int:
    for cls, code in ERROR_STATUS:
        if isinstance(exc, cls):
            return code
    return EXIT_INTERNAL


class _Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _Usage(f"{self.prog}: {message}")


def _ordinal_arg(text):
    try:
        return parse_ordinal(text)
    except OrdinalError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _checkpoints_arg(text):
    return tuple(_ordinal_arg(p) for p in text.split(",") if p.strip())


def _global_flags(p, top):
    d = (lambda v: v) if top else (lambda v: argparse.SUPPRESS)
    p.add_argument("--bound", type=_ordinal_arg, default=d(None),
                   help="stop the run at this ordinal time (default w*2, or w*2+50 for crosscheck)")
    p.add_argument("--strict", action="store_true", default=d(False),
                   help="fail instead of using heuristic limit evaluations")
    p.add_argument("--canonical", action="store_true", default=d(False),
                   help="byte-stable output (no timings)")
    p.add_argument("--checkpoints", type=_checkpoints_arg, default=d(None),
                   help="comma separated ordinal times to report")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="transfinite", description="IAM / OTM workbench")
    _global_flags(ap, True)
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    def command(parent, name, **kw):
        p = parent.add_parser(name, **kw)
        _global_flags(p, False)
        return p

    p_otm = sub.add_parser("otm", help="ordinal Turing machines")
    otm_sub = p_otm.add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = command(otm_sub, "run", help="run an OTM program file and print its trace")
    p.add_argument("program")
    p.add_argument("--input", type=_ordinal_arg, help="feed chi_alpha on tape 0")
    p.add_argument("-o", "--output", help="write the trace here instead of stdout")

    p_iam = sub.add_parser("iam", help="idealized agent machines")
    iam_sub = p_iam.add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = command(iam_sub, "run", help="run an IAM program file")
    p.add_argument("program")
    p.add_argument("--input", type=_ordinal_arg, help="initial state chi_alpha")
    p.add_argument("--trace", action="store_true", help="print one record per computed time")

    p = command(sub, "compile", help="compile a single-tape OTM into an IAM program")
    p.add_argument("program")
    p.add_argument("-o", "--output", help="IAM program file (default stdout)")
    p.add_argument("--sidecar", help="encoding descriptor file (default OUTPUT.enc)")

    p = command(sub, "crosscheck", help="compare an OTM with its compiled IAM")
    p.add_argument("programs", nargs="*", help="OTM program files")
    p.add_argument("--corpus", action="store_true", help="check every bundled program")
    p.add_argument("--input", type=_ordinal_arg, help="input ordinal for program files")
    p.add_argument("--tape-bound", type=_ordinal_arg, default=OMEGA.plus_finite(20),
                   help="also run the three-tape simulation up to this IAM time (0 disables)")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers")

    p = command(sub, "eval", help="evaluate a closed formula over a precomputation")
    p.add_argument("formula", help="formula file")
    p.add_argument("precomputation", help="event-list precomputation file")
    p.add_argument("--tau", type=_ordinal_arg, required=True)
    p.add_argument("--env", action="append", default=[], metavar="VAR=VALUE",
                   help="bind a free variable to an ordinal or #symbol")
    p.add_argument("--semantics", choices=["literal", "blank-default"], default="literal")

    p_corpus = sub.add_parser("corpus", help="bundled programs")
    c_sub = p_corpus.add_subparsers(dest="action", required=True, parser_class=_Parser)
    command(c_sub, "list", help="list bundled programs")
    p = command(c_sub, "show", help="print one bundled program")
    p.add_argument("name")
    return ap


def _read(path):
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(path, text, out):
    if path in (None, "-"):
        out.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _name_of(path):
    base = path.rsplit("/", 1)[-1]
    return base.rsplit(".", 1)[0] if "." in base else base


# commands --------------------------------------------------------------

def cmd_otm_run(args, out) -> int:
    prog = otm.parse_program(_read(args.program), _name_of(args.program))
    inputs = [otm.encode_input_ordinal(args.input)] if args.input is not None else None
    bound = args.bound if args.bound is not None else OMEGA * 2
    rep = otm.run(prog, inputs, bound=bound, checkpoints=args.checkpoints or ())
    lines = otm.trace_records(rep)
    for t, c in sorted(rep.checkpoints.items()):
        lines.append("checkpoint " + otm.trace_record(c, None))
    _write(args.output, "\n".join(lines) + "\n", out)
    return EXIT_OK if rep.halted else EXIT_BOUND


def cmd_iam_run(args, out) -> int:
    prog = iam.parse_program(_read(args.program), _name_of(args.program))
    opts = iam.IamRunOptions(input=args.input, strict=args.strict,
                             checkpoints=args.checkpoints or ())
    if args.bound is not None:
        opts.bound = args.bound
    rep = iam.run(prog, opts)
    if args.trace:
        out.write("\n".join(iam.trace_records(rep)) + "\n")
    lines = [f"status={rep.status} time={format_ordinal(rep.final_time, True)}"]
    if not rep.all_certified:
        lines.append("certified=no")
    for t in sorted(args.checkpoints or ()):
        if t <= rep.final_time:
            m = rep.state_at(t)
            lines.append(f"checkpoint clock={format_ordinal(t, True)} "
                         f"domain={format_ordinal(m.domain, True)} "
                         f"memory={iam._memory_changes(None, m) or '-'}")
    if rep.halted:
        lines.append(f"halt={format_ordinal(rep.halt_time, True)}")
        try:
            lines.append(f"set-answer={iam.decode_set_answer(rep)}")
        except iam.MalformedOutput:
            pass
        try:
            lines.append(f"function-answer={format_ordinal(iam.decode_function_answer(rep), True)}")
        except iam.MalformedOutput:
            pass
    out.write("\n".join(lines) + "\n")
    return EXIT_OK if rep.halted else EXIT_BOUND


def cmd_compile(args, out) -> int:
    prog = otm.parse_program(_read(args.program), _name_of(args.program))
    compiled = bridge.compile_otm(prog)
    enc = bridge.encoding_for(prog)
    _write(args.output, compiled.format(), out)
    sidecar = args.sidecar or (args.output + ".enc" if args.output not in (None, "-") else None)
    if sidecar:
        _write(sidecar, enc.sidecar(), out)
    else:
        out.write("// encoding\n" + "".join(f"// {l}\n" for l in enc.sidecar().splitlines()))
    return EXIT_OK


def _crosscheck_one(job):
    name, text, alpha, bound, checkpoints, tape_bound, canonical = job
    p = otm.parse_program(text, name)
    tapes = tape_bound is not None and tape_bound > 0
    try:
        rep = harness.crosscheck(p, alpha, bound, checkpoints, tapes=tapes, tape_bound=tape_bound)
    except Exception as e:  # reported per program; the merged status picks it up
        return name, [f"program={name} ok=no error={type(e).__name__}: {e}"], status_for(e)
    return name, rep.lines(canonical), EXIT_OK if rep.ok else EXIT_DIVERGENCE


def cmd_crosscheck(args, out) -> int:
    bound = args.bound if args.bound is not None else harness.DEFAULT_BOUND
    jobs = []
    if args.corpus:
        for e in corpus.ENTRIES:
            jobs.append((e.name, e.text, e.input_ordinal, bound, args.checkpoints,
                         args.tape_bound, args.canonical))
    for path in args.programs:
        jobs.append((_name_of(path), _read(path), args.input, bound, args.checkpoints,
                     args.tape_bound, args.canonical))
    if not jobs:
        raise _Usage("crosscheck: give program files or --corpus")
    t0 = time.perf_counter()
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            results = list(ex.map(_crosscheck_one, jobs))
    else:
        results = [_crosscheck_one(j) for j in jobs]
    status = EXIT_OK
    for _, lines, code in results:  # input order, whatever finished first
        out.write("\n".join(lines) + "\n")
        if code and not status:
            status = code
    ok = sum(1 for r in results if r[2] == EXIT_OK)
    summary = f"summary programs={len(results)} ok={ok}"
    if not args.canonical:
        summary += f" wall={time.perf_counter() - t0:.3f}s"
    out.write(summary + "\n")
    return status


def _env_value(text):
    text = text.strip()
    if text.startswith("#"):
        return text[1:]
    if text.startswith("o{") and text.endswith("}"):
        text = text[2:-1]
    return parse_ordinal(text)


def cmd_eval(args, out) -> int:
    phi = lc_logic.parse_formula(_read(args.formula))
    F = precomp.parse_precomputation(_read(args.precomputation))
    env = {}
    for item in args.env:
        k, eq, v = item.partition("=")
        if not eq:
            raise _Usage(f"--env expects VAR=VALUE, got {item!r}")
        env[k.strip()] = _env_value(v)
    res = lc_logic.eval_formula(phi, F, args.tau, env, semantics=args.semantics,
                                strict=args.strict)
    out.write(str(res) + "\n")
    return EXIT_OK


def cmd_corpus(args, out) -> int:
    if args.action == "list":
        for e in corpus.ENTRIES:
            p = e.program
            out.write(f"{e.name} states={p.state_count} input={e.input or '-'} {e.note}\n")
    else:
        if args.name not in corpus.BY_NAME:
            raise _Usage(f"corpus: no program named {args.name!r}")
        out.write(otm.format_program(corpus.get(args.name).program))
    return EXIT_OK


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if args.cmd == "otm":
            return cmd_otm_run(args, out)
        if args.cmd == "iam":
            return cmd_iam_run(args, out)
        handler = {"compile": cmd_compile, "crosscheck": cmd_crosscheck,
                   "eval": cmd_eval, "corpus": cmd_corpus}[args.cmd]
        return handler(args, out)
    except _Usage as e:
        err.write(f"{e}\n")
        return EXIT_USAGE
    except SystemExit as e:  # --help
        return int(e.code or 0)
    except Exception as e:
        code = status_for(e)
        err.write(f"error: {type(e).__name__}: {e}\n")
        return code


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
