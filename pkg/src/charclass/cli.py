"""
``charclass`` command line.

    charclass eval "c(sum(E, dual(E)))" --file decls.ccl
    charclass degeneracy --ell 3 --s 1
    charclass schubert --perm 2,1
    charclass rh-check scenarios.ccl --jobs 4
    charclass examples --run all

``--format structured`` prints ``charclass-output v1`` followed by
``key=value`` lines.  Exit status: 0 when every result holds (HOLDS, SOLVED,
PASS), 1 when some scenario or example does not, 2 on errors.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .bundles import Abstract, HalfTwist, Line, default_rank_bound, total_chern
from .catalog import EXAMPLES, example_names, run_examples
from .degeneracy import SymmetricMapSpec, degeneracy_codim, harris_tu_class
from .errors import CharclassError, ParseError, UsageError
from .graded_ring import RingSpec, format_rational
from .parser import Command, Session, eval_in_session, parse_expression, parse_program
from .rh_check import check_many
from .schubert import Permutation, schubert_poly, specialize_y_zero

__all__ = ["main", "build_parser", "run", "validate", "RunResult", "HEADER"]

HEADER = "charclass-output v1"
VERBS = ("eval", "degeneracy", "schubert", "rh-check", "examples")


@dataclass(frozen=True)
class RunResult:
    records: tuple[tuple[str, str], ...]   # (key, value) pairs, in output order
    text_lines: tuple[str, ...]
    ok: bool

    def render(self, fmt: str, verb: str) -> str:
        if fmt == "structured":
            lines = [HEADER, f"command={verb}"]
            lines += [f"{k}={v}" for k, v in self.records]
            lines.append(f"status={'ok' if self.ok else 'fail'}")
            return "\n".join(lines) + "\n"
        return "".join(line + "\n" for line in self.text_lines)


def _show(v) -> str:
    if isinstance(v, Fraction):
        return format_rational(v)
    return str(v)


# -- verbs -------------------------------------------------------------------------

def _run_eval(cmd: Command, session: Session) -> RunResult:
    jobs = []
    for text in cmd.args.get("exprs") or ():
        jobs.append((parse_expression(text), cmd.args.get("ring")))
    if not jobs:
        jobs = [(c.args["expr"], c.args["ring"]) for c in session.commands if c.verb == "eval"]
    records, lines = [], []
    for i, (node, ring) in enumerate(jobs, start=1):
        out = _show(eval_in_session(session, node, ring))
        records.append((f"result.{i}", out))
        lines.append(out)
    return RunResult(tuple(records), tuple(lines), True)


def _run_degeneracy(cmd: Command, session: Session) -> RunResult:
    ell, s, twist = cmd.args["ell"], cmd.args["s"], cmd.args.get("twist")
    codim = degeneracy_codim(ell, s)
    gens = [(f"c{i}", i) for i in range(1, ell + 1)]
    if twist:
        gens.append((twist, 1))
    ring = RingSpec.create(gens, truncation=max(codim, 1))
    if twist:
        # c_i are the Chern classes of E*; the entries come from E* ⊗ sqrt(L)
        dual_e = Abstract("Edual", ell, gens=tuple(f"c{i}" for i in range(1, ell + 1)))
        source = total_chern(HalfTwist(dual_e, Line(twist, gen=twist)), ring,
                             session.config.rank_bound)
    else:
        source = ring.one()
        for i in range(1, ell + 1):
            source = source + ring.gen(f"c{i}")
    cls = harris_tu_class(SymmetricMapSpec(ell, s, source))
    return RunResult((("class", str(cls)), ("codim", str(codim))),
                     (f"{cls} (codim {codim})",), True)


def _run_schubert(cmd: Command, session: Session) -> RunResult:
    w = Permutation.parse(cmd.args["perm"])
    poly = schubert_poly(w)
    if cmd.args.get("y_zero"):
        poly = specialize_y_zero(poly)
    deg = w.length()
    return RunResult((("polynomial", str(poly)), ("degree", str(deg))),
                     (f"{poly} (degree {deg})",), True)


def _run_rh_check(cmd: Command, session: Session) -> RunResult:
    results = check_many(list(session.scenarios.values()), jobs=cmd.args.get("jobs") or 1)
    records = tuple((f"scenario.{name}", line) for name, line, _ in results)
    lines = tuple(f"{name}: {line}" for name, line, _ in results)
    return RunResult(records, lines, all(ok for _, _, ok in results))


def _run_examples(cmd: Command, session: Session) -> RunResult:
    if cmd.args.get("list"):
        width = max(len(e.name) for e in EXAMPLES)
        lines = tuple(f"{e.name:<{width}}  {e.description}" for e in EXAMPLES)
        return RunResult(tuple((f"example.{e.name}", e.description) for e in EXAMPLES), lines, True)
    target = cmd.args.get("run") or "all"
    results = run_examples(None if target == "all" else [target])
    records, lines = [], []
    for name, ok, detail in results:
        verdict = "PASS" if ok else "FAIL"
        records += [(f"example.{name}", verdict), (f"detail.{name}", detail)]
        lines.append(f"{name}: {verdict} ({detail})")
    passed = sum(ok for _, ok, _ in results)
    lines.append(f"{passed}/{len(results)} passed")
    return RunResult(tuple(records), tuple(lines), passed == len(results))


_DISPATCH = {
    "eval": _run_eval,
    "degeneracy": _run_degeneracy,
    "schubert": _run_schubert,
    "rh-check": _run_rh_check,
    "examples": _run_examples,
}


def validate(cmd: Command) -> None:
    a = cmd.args
    if cmd.verb not in VERBS:
        raise UsageError(f"unknown command {cmd.verb!r}")
    if cmd.verb == "degeneracy":
        if a.get("ell") is None or a.get("s") is None:
            raise UsageError("degeneracy needs --ell and --s")
        if a["ell"] < 1:
            raise UsageError("--ell must be >= 1")
    elif cmd.verb == "schubert" and not a.get("perm"):
        raise UsageError("schubert needs --perm")
    elif cmd.verb == "rh-check" and (a.get("jobs") or 1) < 1:
        raise UsageError("--jobs must be >= 1")
    elif cmd.verb == "examples":
        if a.get("list") and a.get("run"):
            raise UsageError("give either --list or --run")
        run_name = a.get("run")
        if run_name and run_name != "all" and run_name not in example_names():
            raise UsageError(f"unknown example {run_name!r}; see 'examples --list'")


def run(cmd: Command, session: Session) -> RunResult:
    validate(cmd)
    return _DISPATCH[cmd.verb](cmd, session)


# -- argument handling ---------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser, top: bool) -> None:
    d = (lambda v: v) if top else (lambda v: argparse.SUPPRESS)
    p.add_argument("--file", default=d(None), metavar="PATH",
                   help="declarations (rings, bundles, spaces, scenarios) to load first")
    p.add_argument("--format", choices=("text", "structured"), default=d("text"),
                   help="plain text, or 'charclass-output v1' key=value lines")
    p.add_argument("--rank-bound", type=int, default=d(None), metavar="N",
                   help="largest rank expanded into formal Chern roots "
                        "(default: $CHARCLASS_RANK_BOUND or 6)")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="charclass",
        description="Chern-class calculus, degeneracy loci, Schubert polynomials "
                    "and Riemann-Hurwitz checks.",
        epilog="Environment: CHARCLASS_RANK_BOUND sets the default for --rank-bound.")
    _add_common(p, top=True)
    sub = p.add_subparsers(dest="verb", metavar="COMMAND", required=True)

    e = sub.add_parser("eval", help="evaluate expressions in the declaration language")
    _add_common(e, top=False)
    e.add_argument("exprs", nargs="*", metavar="EXPR",
                   help="expressions; without any, run the eval statements of --file")
    e.add_argument("--in", dest="ring", metavar="RING", help="ring to evaluate in")

    d = sub.add_parser("degeneracy", help="class of {rank <= s} for a symmetric map E -> E*")
    _add_common(d, top=False)
    d.add_argument("--ell", type=int, required=True, help="rank of E")
    d.add_argument("--s", type=int, required=True, help="rank bound of the locus")
    d.add_argument("--twist", metavar="NAME",
                   help="map into E* ⊗ L; NAME is the generator for c1(L)")

    s = sub.add_parser("schubert", help="double Schubert polynomial of a permutation")
    _add_common(s, top=False)
    s.add_argument("--perm", required=True, help='one-line notation, e.g. "2,3,1"')
    s.add_argument("--y-zero", action="store_true", help="set all y variables to 0")

    r = sub.add_parser("rh-check", help="verify or solve every scenario in a file")
    _add_common(r, top=False)
    r.add_argument("scenario_file", metavar="FILE")
    r.add_argument("--jobs", type=int, default=1, help="worker threads (output order is fixed)")

    x = sub.add_parser("examples", help="built-in worked examples")
    _add_common(x, top=False)
    g = x.add_mutually_exclusive_group()
    g.add_argument("--list", action="store_true", help="list the examples")
    g.add_argument("--run", metavar="NAME", help="run one example, or 'all' (default)")
    return p


def _load(path: str, session: Session | None) -> Session:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None
    try:
        return parse_program(text, session)
    except CharclassError as e:
        e.source = path
        raise


def _render_error(e: CharclassError) -> str:
    where = getattr(e, "source", None)
    if isinstance(e, ParseError):
        line, col, msg = e.line, e.col, e.message
    else:
        (line, col), msg = getattr(e, "pos", None) or (0, 0), str(e)
    loc = ""
    if where or line:
        loc = (where or "<input>") + (f":{line}:{col}" if line else "") + ": "
    return f"charclass: error [{e.module}] {type(e).__name__}: {loc}{msg}"


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        rank_bound = args.rank_bound if args.rank_bound is not None else default_rank_bound()
        if rank_bound < 1:
            raise UsageError("--rank-bound must be >= 1")
        session = None
        if args.file:
            session = _load(args.file, None)
        if args.verb == "rh-check":
            session = _load(args.scenario_file, session)
        if session is None:
            session = parse_program("")
        session.config.rank_bound = rank_bound
        session.config.format = args.format
        cmd_args = {k: v for k, v in vars(args).items()
                    if k not in ("verb", "file", "format", "rank_bound", "scenario_file")}
        result = run(Command(args.verb, cmd_args), session)
    except CharclassError as e:
        print(_render_error(e), file=sys.stderr)
        return 2
    sys.stdout.write(result.render(args.format, args.verb))
    sys.stdout.flush()
    return 0 if result.ok else 1


if __name__ == "__main__":
    sys.exit(main())
