"""Command line front end: batch commands, the interactive REPL, the server.

The REPL follows the lazy interpreter discipline: load definitions, pick
an algorithm and an argument, then drive the dialogue request by
request; with a manual argument the user plays the opponent and answers
each query, possibly with `err`.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .analysis import FunTable, is_monotone, is_stable, sequential_realizers
from .behaviours import member, orthogonal, subtype
from .cds import Cds, CdslabError, DefinitionError, EngineError, cds_equal, lift_err
from .interaction import AlgorithmArg, ManualOracle, Session, StaticState
from .parser import Workspace, parse_definitions, parse_state_literal, print_workspace
from .seqalg import SeqAlg, adopt_exponential_parts, enumerate_algorithms


def argument_space(m: Cds) -> Cds:
    """The space argument literals live in: the input space plus `err`."""
    try:
        lifted = lift_err(m)
    except DefinitionError:
        return m
    adopt_exponential_parts(lifted, m)
    return lifted


def load_files(paths: list[str], ws: Workspace) -> list[str]:
    problems = []
    for path in paths:
        try:
            text = Path(path).read_text()
        except OSError as e:
            problems.append(f"{path}: {e}")
            continue
        result = parse_definitions(text, ws)
        problems.extend(f"{path}:{err}" for err in result.errors)
    return problems


def build_argument(text: str, alg: SeqAlg, ws: Workspace):
    text = text.strip()
    if text == "manual":
        return ManualOracle()
    if text.startswith("alg:"):
        name = text[4:]
        other = ws.algs.get(name)
        if other is None:
            raise EngineError("unknown-name", f"no algorithm named {name!r}")
        if not cds_equal(alg.from_cds, other.state.owner):
            raise EngineError("type-mismatch", f"{name} does not inhabit {alg.from_cds.name}")
        return AlgorithmArg(other)
    state = parse_state_literal(text, argument_space(alg.from_cds))
    return StaticState(state)


def classify_text(t: FunTable) -> str:
    lines = [f"table {t.name or '(anonymous)'} : {t.from_cds.name} -> {t.to_cds.name}"]
    mono = is_monotone(t)
    if mono.ok:
        lines.append("monotone: yes")
        st = is_stable(t)
        if st.ok:
            lines.append("stable: yes")
        else:
            x, y = st.witness
            lines.append(f"stable: no (witness x={x} y={y})")
        if st.skipped_pairs:
            lines.append(f"stable: {len(st.skipped_pairs)} pairs skipped (meet not a state)")
    else:
        x, y = mono.witness
        lines.append(f"monotone: no (witness x={x} y={y})")
        lines.append("stable: no (not monotone)")
    realizers = sequential_realizers(t)
    if realizers:
        lines.append(f"sequential: yes ({len(realizers)} realizers)")
    else:
        lines.append("sequential: no (search exhausted, 0 realizers)")
    return "\n".join(lines)


def enum_text(ws: Workspace, from_name: str, to_name: str) -> str:
    m, n = ws.cds.get(from_name), ws.cds.get(to_name)
    if m is None or n is None:
        missing = from_name if m is None else to_name
        raise EngineError("unknown-name", f"no cds named {missing!r}")
    algs = enumerate_algorithms(m, n)
    lines = [f"{len(algs)} algorithms : {m.name} -> {n.name}"]
    for i, alg in enumerate(algs):
        lines.append(f"-- {i}")
        body = alg.text()
        if body:
            lines.append(body)
        else:
            lines.append("(empty)")
    return "\n".join(lines)


class Repl:
    def __init__(self, out=sys.stdout):
        self.ws = Workspace()
        self.session: Session | None = None
        self.out = out

    def emit(self, text: str) -> None:
        self.out.write(text if text.endswith("\n") else text + "\n")

    def run_line(self, line: str) -> bool:
        """Execute one command; returns False on quit."""
        line = line.strip()
        if not line or line.startswith("#"):
            return True
        verb, _, rest = line.partition(" ")
        rest = rest.strip()
        try:
            return self.dispatch(verb, rest)
        except CdslabError as e:
            self.emit(f"error: {e}")
            return True

    def dispatch(self, verb: str, rest: str) -> bool:
        if verb in ("quit", "exit"):
            return False
        if verb == "load":
            problems = load_files(rest.split(), self.ws)
            for p in problems:
                self.emit(f"error: {p}")
            if not problems:
                self.emit(f"loaded; workspace has {len(self.ws.names())} names")
            return True
        if verb == "list":
            for kind, name in self.ws.names():
                self.emit(f"{kind} {name}")
            return True
        if verb == "alg":
            name, _, argpart = rest.partition(" ")
            argpart = argpart.strip()
            alg = self.ws.algs.get(name)
            if alg is None:
                raise EngineError("unknown-name", f"no algorithm named {name!r}")
            if not argpart.startswith("arg "):
                raise EngineError("wrong-phase", "usage: alg NAME arg {c=v,...} | manual | alg:NAME")
            argument = build_argument(argpart[4:], alg, self.ws)
            self.session = Session(alg, argument)
            self.emit(f"session open: {name} : {alg.from_cds.name} -> {alg.to_cds.name}")
            return True
        if verb == "request":
            trace = self.need_session().request(rest)
            self.emit(trace.text())
            return True
        if verb == "answer":
            trace = self.need_session().answer(rest)
            self.emit(trace.text())
            return True
        if verb == "trace":
            t = self.need_session().last_trace
            self.emit(t.text() if t else "no dialogue yet")
            return True
        if verb == "reset":
            self.need_session().reset()
            self.emit("session reset")
            return True
        if verb == "classify":
            t = self.ws.tables.get(rest)
            if t is None:
                raise EngineError("unknown-name", f"no table named {rest!r}")
            self.emit(classify_text(t))
            return True
        if verb == "enum":
            parts = rest.split()
            if len(parts) != 2:
                raise EngineError("wrong-phase", "usage: enum FROM TO")
            self.emit(enum_text(self.ws, parts[0], parts[1]))
            return True
        if verb == "ortho":
            t_name, _, s_name = rest.partition(" ")
            taster = self.ws.algs.get(t_name)
            cand = self.ws.algs.get(s_name.strip())
            if taster is None or cand is None:
                raise EngineError("unknown-name", f"unknown algorithm in: ortho {rest}")
            ok, trace = orthogonal(taster, cand)
            self.emit(f"orthogonal: {'yes' if ok else 'no'}")
            self.emit(trace.text())
            return True
        if verb == "member":
            b_name, _, s_name = rest.partition(" ")
            b = self.ws.behaviours.get(b_name)
            cand = self.ws.algs.get(s_name.strip())
            if b is None:
                raise EngineError("unknown-name", f"no behaviour named {b_name!r}")
            if cand is None:
                raise EngineError("unknown-name", f"no algorithm named {s_name.strip()!r}")
            self.emit(f"member: {'yes' if member(b, cand) else 'no'}")
            return True
        if verb == "subtype":
            b1_name, _, b2_name = rest.partition(" ")
            b1 = self.ws.behaviours.get(b1_name)
            b2 = self.ws.behaviours.get(b2_name.strip())
            if b1 is None or b2 is None:
                raise EngineError("unknown-name", f"unknown behaviour in: subtype {rest}")
            verdict = subtype(b1, b2)
            self.emit(f"subtype: {'yes' if verdict.syntactic else 'no'} (syntactic)")
            return True
        if verb == "print":
            self.emit(print_workspace(self.ws))
            return True
        raise EngineError("unknown-name", f"unknown command {verb!r}")

    def need_session(self) -> Session:
        if self.session is None:
            raise EngineError("wrong-phase", "no session open; use: alg NAME arg ...")
        return self.session

    def loop(self, stdin=sys.stdin) -> None:
        interactive = stdin.isatty()
        while True:
            if interactive:
                self.out.write("cdslab> ")
                self.out.flush()
            line = stdin.readline()
            if not line:
                break
            if not self.run_line(line):
                break


def cmd_repl(args) -> int:
    repl = Repl()
    problems = load_files(args.files, repl.ws)
    for p in problems:
        print(f"error: {p}", file=sys.stderr)
    if problems:
        return 1
    repl.loop()
    return 0


def cmd_eval(args) -> int:
    ws = Workspace()
    problems = load_files(args.files, ws)
    if problems:
        for p in problems:
            print(f"error: {p}", file=sys.stderr)
        return 1
    alg = ws.algs.get(args.alg)
    if alg is None:
        print(f"error: no algorithm named {args.alg!r}", file=sys.stderr)
        return 1
    try:
        argument = build_argument(args.arg, alg, ws)
        session = Session(alg, argument)
        trace = session.request(args.request)
    except CdslabError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    if args.trace:
        sys.stdout.write(trace.text())
    else:
        sys.stdout.write(trace.lines()[-1] + "\n")
    return 0


def cmd_classify(args) -> int:
    ws = Workspace()
    problems = load_files(args.files, ws)
    if problems:
        for p in problems:
            print(f"error: {p}", file=sys.stderr)
        return 1
    t = ws.tables.get(args.table)
    if t is None:
        print(f"error: no table named {args.table!r}", file=sys.stderr)
        return 1
    print(classify_text(t))
    return 0


def cmd_enum(args) -> int:
    ws = Workspace()
    problems = load_files(args.files, ws)
    if problems:
        for p in problems:
            print(f"error: {p}", file=sys.stderr)
        return 1
    try:
        print(enum_text(ws, args.from_cds, args.to_cds))
    except CdslabError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


def cmd_serve(args) -> int:
    from .server import serve

    ws = Workspace()
    problems = load_files(args.files, ws)
    if problems:
        for p in problems:
            print(f"error: {p}", file=sys.stderr)
        return 1
    host, _, port = args.listen.rpartition(":")
    try:
        serve(host or "127.0.0.1", int(port), ws, ui_dir=args.ui)
    except KeyboardInterrupt:
        pass
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="cdslab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("repl", help="interactive dialogue loop")
    p.add_argument("files", nargs="*", help="definition files to preload")
    p.set_defaults(fn=cmd_repl)

    p = sub.add_parser("eval", help="one request against one algorithm")
    p.add_argument("files", nargs="+")
    p.add_argument("--alg", required=True)
    p.add_argument("--arg", required=True, help="{c=v,...} literal, manual, or alg:NAME")
    p.add_argument("--request", required=True)
    p.add_argument("--trace", action="store_true", help="print the full dialogue")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("classify", help="monotone/stable/sequential verdicts for a table")
    p.add_argument("files", nargs="+")
    p.add_argument("--table", required=True)
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("enum", help="enumerate every algorithm between two spaces")
    p.add_argument("files", nargs="+")
    p.add_argument("--from", dest="from_cds", required=True)
    p.add_argument("--to", dest="to_cds", required=True)
    p.set_defaults(fn=cmd_enum)

    p = sub.add_parser("serve", help="JSON session server (and optional UI files)")
    p.add_argument("files", nargs="*")
    p.add_argument("--listen", default="127.0.0.1:8765")
    p.add_argument("--ui", default=None, help="directory of static UI files to serve")
    p.set_defaults(fn=cmd_serve)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
