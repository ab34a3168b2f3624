"""The definition-file language: parser, workspace, pretty-printer.

Declarations:

    cds NAME { cells c1 c2; values v1 v2; events c:v c:v; enable c <- c2:v2; }
    prod NAME = A * B [* C ...];
    exp NAME = M -> N;
    lift NAME = M;
    alg NAME : M -> N { at {c=v,...} c2 ask c; at {...} c2 put v2; }
    table NAME : M -> N { {a=tt} => {out=tt}; default empty; }
    behaviour NAME : TYPE { tests T1 T2; }

Cells omitted from `enable` lines are initial; `init` names the initial
precondition explicitly.  `#` starts a line comment.  Cell references
may be nested function-space cells, written `<{c=v,...}|-c2>`, with
values `valof c` and `output v`.  Parsing never raises: every problem
comes back as a positioned error.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .analysis import FunTable, make_table
from .behaviours import Behaviour, make_behaviour
from .cds import (
    Cds,
    DefinitionError,
    State,
    Token,
    check_state,
    lift_err,
    make_cds,
    product,
    token_key,
)
from .seqalg import (
    FunCell,
    Output,
    SeqAlg,
    Valof,
    adopt_exponential_parts,
    exponential,
    exponential_parts,
    validate_algorithm,
)

_SYMBOLS = ("|-", "->", "=>", "<-", "{", "}", "<", ">", "=", ",", ";", ":", "*")
_KEYWORDS = {
    "cds", "alg", "table", "behaviour", "prod", "exp", "lift",
    "cells", "values", "events", "enable", "at", "ask", "put",
    "tests", "default", "empty", "init", "valof", "output",
}


@dataclass(frozen=True)
class Tok:
    kind: str  # "sym", "name", "eof"
    text: str
    line: int
    col: int


@dataclass(frozen=True)
class ParseError:
    line: int
    col: int
    message: str

    def __str__(self) -> str:
        return f"{self.line}:{self.col}: {self.message}"


class _Bail(Exception):
    def __init__(self, err: ParseError):
        self.err = err


def tokenize(text: str) -> list[Tok]:
    toks: list[Tok] = []
    line, col, i = 1, 1, 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        two = text[i : i + 2]
        if two in ("|-", "->", "=>", "<-"):
            toks.append(Tok("sym", two, line, col))
            i += 2
            col += 2
            continue
        if ch in "{}<>=,;:*":
            toks.append(Tok("sym", ch, line, col))
            i += 1
            col += 1
            continue
        j = i
        while j < n and not text[j].isspace() and text[j] not in "{}<>=,;:*#" and text[j : j + 2] not in ("|-", "->"):
            j += 1
        if j == i:
            toks.append(Tok("sym", ch, line, col))
            i += 1
            col += 1
            continue
        toks.append(Tok("name", text[i:j], line, col))
        col += j - i
        i = j
    toks.append(Tok("eof", "", line, col))
    return toks


# untyped reference trees, elaborated against a workspace -------------------

@dataclass(frozen=True)
class NameRef:
    name: str


@dataclass(frozen=True)
class FunCellRef:
    state: tuple  # of (CellRef, ValueRef)
    cell: "CellRef"


@dataclass(frozen=True)
class ValofRef:
    cell: "CellRef"


@dataclass(frozen=True)
class OutputRef:
    value: "ValueRef"


CellRef = NameRef | FunCellRef
ValueRef = NameRef | ValofRef | OutputRef


# declarations, kept for faithful pretty-printing ---------------------------

@dataclass(frozen=True)
class RawCdsDecl:
    name: str
    cells: tuple
    values: tuple
    events: tuple
    enable: tuple  # of (cell, precondition) with precondition None for init


@dataclass(frozen=True)
class ProdDecl:
    name: str
    parts: tuple


@dataclass(frozen=True)
class ExpDecl:
    name: str
    source: str
    target: str


@dataclass(frozen=True)
class LiftDecl:
    name: str
    source: str


@dataclass(frozen=True)
class AlgDecl:
    name: str
    source: str
    target: str
    lines: tuple  # of (state_tree, cellref, "ask"/"put", ref)


@dataclass(frozen=True)
class TableDecl:
    name: str
    source: str
    target: str
    rows: tuple
    default_empty: bool


@dataclass(frozen=True)
class BehaviourDecl:
    name: str
    candidate: str
    tests: tuple


Decl = RawCdsDecl | ProdDecl | ExpDecl | LiftDecl | AlgDecl | TableDecl | BehaviourDecl


@dataclass
class Workspace:
    """Everything loaded so far, by kind and name."""

    cds: dict[str, Cds] = field(default_factory=dict)
    algs: dict[str, SeqAlg] = field(default_factory=dict)
    tables: dict[str, FunTable] = field(default_factory=dict)
    behaviours: dict[str, Behaviour] = field(default_factory=dict)
    decls: list[Decl] = field(default_factory=list)

    def names(self) -> list[tuple[str, str]]:
        out = [("cds", n) for n in self.cds]
        out += [("alg", n) for n in self.algs]
        out += [("table", n) for n in self.tables]
        out += [("behaviour", n) for n in self.behaviours]
        return out


class _Parser:
    def __init__(self, toks: list[Tok]):
        self.toks = toks
        self.i = 0

    def peek(self) -> Tok:
        return self.toks[self.i]

    def next(self) -> Tok:
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def fail(self, expected: str) -> None:
        t = self.peek()
        got = t.text or "end of input"
        raise _Bail(ParseError(t.line, t.col, f"expected {expected}, got {got!r}"))

    def expect_sym(self, sym: str) -> Tok:
        t = self.peek()
        if t.kind == "sym" and t.text == sym:
            return self.next()
        self.fail(f"'{sym}'")

    def expect_name(self, what: str = "a name") -> Tok:
        t = self.peek()
        if t.kind == "name":
            return self.next()
        self.fail(what)

    def expect_keyword(self, kw: str) -> Tok:
        t = self.peek()
        if t.kind == "name" and t.text == kw:
            return self.next()
        self.fail(f"'{kw}'")

    def at_sym(self, sym: str) -> bool:
        t = self.peek()
        return t.kind == "sym" and t.text == sym

    def at_name(self, text: str | None = None) -> bool:
        t = self.peek()
        return t.kind == "name" and (text is None or t.text == text)

    # reference grammar ------------------------------------------------

    def cell_ref(self) -> CellRef:
        if self.at_sym("<"):
            self.next()
            state = self.state_tree()
            self.expect_sym("|-")
            cell = self.cell_ref()
            self.expect_sym(">")
            return FunCellRef(state, cell)
        return NameRef(self.expect_name("a cell").text)

    def value_ref(self) -> ValueRef:
        if self.at_name("valof"):
            self.next()
            return ValofRef(self.cell_ref())
        if self.at_name("output"):
            self.next()
            return OutputRef(self.value_ref())
        return NameRef(self.expect_name("a value").text)

    def state_tree(self) -> tuple:
        self.expect_sym("{")
        pairs = []
        while not self.at_sym("}"):
            cell = self.cell_ref()
            self.expect_sym("=")
            value = self.value_ref()
            pairs.append((cell, value))
            if self.at_sym(","):
                self.next()
            else:
                break
        self.expect_sym("}")
        return tuple(pairs)

    # declarations -----------------------------------------------------

    def declaration(self) -> Decl | None:
        t = self.peek()
        if t.kind == "eof":
            return None
        kw = self.expect_name("a declaration keyword").text
        if kw == "cds":
            return self.cds_decl()
        if kw == "prod":
            return self.derived_decl(kw)
        if kw == "exp":
            return self.derived_decl(kw)
        if kw == "lift":
            return self.derived_decl(kw)
        if kw == "alg":
            return self.alg_decl()
        if kw == "table":
            return self.table_decl()
        if kw == "behaviour":
            return self.behaviour_decl()
        raise _Bail(ParseError(t.line, t.col, f"expected a declaration keyword, got {kw!r}"))

    def cds_decl(self) -> RawCdsDecl:
        name = self.expect_name("a cds name").text
        self.expect_sym("{")
        self.expect_keyword("cells")
        cells = []
        while self.at_name() and not self.at_name("values"):
            cells.append(self.expect_name().text)
        self.expect_sym(";")
        self.expect_keyword("values")
        values = []
        while self.at_name() and not self.at_name("events"):
            values.append(self.expect_name().text)
        self.expect_sym(";")
        self.expect_keyword("events")
        events = []
        while self.at_name():
            c = self.expect_name().text
            self.expect_sym(":")
            v = self.expect_name().text
            events.append((c, v))
        self.expect_sym(";")
        enable = []
        while self.at_name("enable"):
            self.next()
            c = self.expect_name("a cell").text
            self.expect_sym("<-")
            if self.at_name("init"):
                self.next()
                enable.append((c, None))
            else:
                c2 = self.expect_name("a cell").text
                self.expect_sym(":")
                v2 = self.expect_name("a value").text
                enable.append((c, (c2, v2)))
            self.expect_sym(";")
        self.expect_sym("}")
        return RawCdsDecl(name, tuple(cells), tuple(values), tuple(events), tuple(enable))

    def derived_decl(self, kind: str) -> Decl:
        name = self.expect_name("a name").text
        self.expect_sym("=")
        first = self.expect_name("a cds name").text
        if kind == "prod":
            parts = [first]
            while self.at_sym("*"):
                self.next()
                parts.append(self.expect_name("a cds name").text)
            self.expect_sym(";")
            return ProdDecl(name, tuple(parts))
        if kind == "exp":
            self.expect_sym("->")
            target = self.expect_name("a cds name").text
            self.expect_sym(";")
            return ExpDecl(name, first, target)
        self.expect_sym(";")
        return LiftDecl(name, first)

    def alg_decl(self) -> AlgDecl:
        name = self.expect_name("an algorithm name").text
        self.expect_sym(":")
        source = self.expect_name("a cds name").text
        self.expect_sym("->")
        target = self.expect_name("a cds name").text
        self.expect_sym("{")
        lines = []
        while self.at_name("at"):
            self.next()
            state = self.state_tree()
            cell = self.cell_ref()
            t = self.peek()
            if self.at_name("ask"):
                self.next()
                ref: object = self.cell_ref()
                lines.append((state, cell, "ask", ref))
            elif self.at_name("put"):
                self.next()
                ref = self.value_ref()
                lines.append((state, cell, "put", ref))
            else:
                self.fail("'ask' or 'put'")
            self.expect_sym(";")
        self.expect_sym("}")
        return AlgDecl(name, source, target, tuple(lines))

    def table_decl(self) -> TableDecl:
        name = self.expect_name("a table name").text
        self.expect_sym(":")
        source = self.expect_name("a cds name").text
        self.expect_sym("->")
        target = self.expect_name("a cds name").text
        self.expect_sym("{")
        rows = []
        default_empty = False
        while True:
            if self.at_name("default"):
                self.next()
                self.expect_keyword("empty")
                self.expect_sym(";")
                default_empty = True
                continue
            if self.at_sym("{"):
                key = self.state_tree()
                self.expect_sym("=>")
                val = self.state_tree()
                self.expect_sym(";")
                rows.append((key, val))
                continue
            break
        self.expect_sym("}")
        return TableDecl(name, source, target, tuple(rows), default_empty)

    def behaviour_decl(self) -> BehaviourDecl:
        name = self.expect_name("a behaviour name").text
        self.expect_sym(":")
        candidate = self.expect_name("a cds name").text
        self.expect_sym("{")
        self.expect_keyword("tests")
        tests = []
        while self.at_name():
            tests.append(self.expect_name().text)
        self.expect_sym(";")
        self.expect_sym("}")
        return BehaviourDecl(name, candidate, tuple(tests))


# elaboration ----------------------------------------------------------------

class _Elab:
    def __init__(self, ws: Workspace):
        self.ws = ws

    def lookup_cds(self, name: str, pos: Tok | None = None) -> Cds:
        d = self.ws.cds.get(name)
        if d is None:
            raise _Bail(ParseError(0, 0, f"unknown cds {name!r}"))
        return d

    def cell(self, ref: CellRef, d: Cds) -> Token:
        if isinstance(ref, NameRef):
            if ref.name not in d.cells:
                raise _Bail(ParseError(0, 0, f"{ref.name!r} is not a cell of {d.name}"))
            return ref.name
        parts = exponential_parts(d)
        if parts is None:
            raise _Bail(ParseError(0, 0, f"{d.name} is not a function space; cannot hold {ref}"))
        m, n = parts
        state = self.state(ref.state, m)
        cell = self.cell(ref.cell, n)
        fc = FunCell(state, cell)
        if fc not in d.cells:
            raise _Bail(ParseError(0, 0, f"{fc} is not a cell of {d.name}"))
        return fc

    def value(self, ref: ValueRef, d: Cds) -> Token:
        if isinstance(ref, NameRef):
            if ref.name not in d.values:
                raise _Bail(ParseError(0, 0, f"{ref.name!r} is not a value of {d.name}"))
            return ref.name
        parts = exponential_parts(d)
        if parts is None:
            raise _Bail(ParseError(0, 0, f"{d.name} is not a function space; cannot hold {ref}"))
        m, n = parts
        if isinstance(ref, ValofRef):
            return Valof(self.cell(ref.cell, m))
        return Output(self.value(ref.value, n))

    def state(self, tree: tuple, d: Cds) -> State:
        evs = [(self.cell(c, d), self.value(v, d)) for (c, v) in tree]
        try:
            return check_state(d, evs)
        except DefinitionError as e:
            raise _Bail(ParseError(0, 0, str(e)))

    def run(self, decl: Decl) -> None:
        handler = {
            RawCdsDecl: self.raw_cds,
            ProdDecl: self.prod,
            ExpDecl: self.exp,
            LiftDecl: self.lift,
            AlgDecl: self.alg,
            TableDecl: self.table,
            BehaviourDecl: self.behaviour,
        }[type(decl)]
        handler(decl)
        self.ws.decls.append(decl)

    def fresh(self, kind: str, name: str) -> None:
        table = {"cds": self.ws.cds, "alg": self.ws.algs, "table": self.ws.tables, "behaviour": self.ws.behaviours}[kind]
        if name in table:
            raise _Bail(ParseError(0, 0, f"{kind} {name!r} is already defined"))

    def raw_cds(self, d: RawCdsDecl) -> None:
        self.fresh("cds", d.name)
        enabling: dict[str, set] = {}
        from .cds import INITIAL

        for cell, pre in d.enable:
            enabling.setdefault(cell, set()).add(INITIAL if pre is None else pre)
        try:
            self.ws.cds[d.name] = make_cds(d.name, d.cells, d.values, d.events, enabling)
        except DefinitionError as e:
            raise _Bail(ParseError(0, 0, str(e)))

    def prod(self, d: ProdDecl) -> None:
        self.fresh("cds", d.name)
        parts = [self.lookup_cds(p) for p in d.parts]
        self.ws.cds[d.name] = product(*parts, name=d.name)

    def exp(self, d: ExpDecl) -> None:
        self.fresh("cds", d.name)
        self.ws.cds[d.name] = exponential(self.lookup_cds(d.source), self.lookup_cds(d.target))

    def lift(self, d: LiftDecl) -> None:
        self.fresh("cds", d.name)
        source = self.lookup_cds(d.source)
        try:
            lifted = lift_err(source, name=d.name)
        except DefinitionError as e:
            raise _Bail(ParseError(0, 0, str(e)))
        adopt_exponential_parts(lifted, source)
        self.ws.cds[d.name] = lifted

    def alg(self, d: AlgDecl) -> None:
        self.fresh("alg", d.name)
        m = self.lookup_cds(d.source)
        n = self.lookup_cds(d.target)
        evs = []
        for state_tree, cell_ref, verb, ref in d.lines:
            state = self.state(state_tree, m)
            cell = self.cell(cell_ref, n)
            if verb == "ask":
                fv: object = Valof(self.cell(ref, m))
            else:
                fv = Output(self.value(ref, n))
            evs.append((FunCell(state, cell), fv))
        try:
            self.ws.algs[d.name] = validate_algorithm(m, n, evs, name=d.name)
        except DefinitionError as e:
            raise _Bail(ParseError(0, 0, f"algorithm {d.name}: {e}"))

    def table(self, d: TableDecl) -> None:
        self.fresh("table", d.name)
        m = self.lookup_cds(d.source)
        n = self.lookup_cds(d.target)
        rows = {}
        for key_tree, val_tree in d.rows:
            rows[self.state(key_tree, m)] = self.state(val_tree, n)
        try:
            self.ws.tables[d.name] = make_table(m, n, rows, name=d.name, default_empty=d.default_empty)
        except DefinitionError as e:
            raise _Bail(ParseError(0, 0, f"table {d.name}: {e}"))

    def behaviour(self, d: BehaviourDecl) -> None:
        self.fresh("behaviour", d.name)
        cand = self.lookup_cds(d.candidate)
        tests = []
        for t in d.tests:
            alg = self.ws.algs.get(t)
            if alg is None:
                raise _Bail(ParseError(0, 0, f"unknown algorithm {t!r} in behaviour {d.name}"))
            tests.append(alg)
        try:
            self.ws.behaviours[d.name] = make_behaviour(cand, tests, name=d.name)
        except Exception as e:
            raise _Bail(ParseError(0, 0, f"behaviour {d.name}: {e}"))


@dataclass
class ParseResult:
    workspace: Workspace
    errors: list[ParseError]

    @property
    def ok(self) -> bool:
        return not self.errors


_DECL_KEYWORDS = {"cds", "alg", "table", "behaviour", "prod", "exp", "lift"}


def parse_definitions(text: str, workspace: Workspace | None = None) -> ParseResult:
    """Parse declarations into (a delta on) a workspace.

    Total: parse or validation problems are collected with positions and
    parsing resumes at the next declaration keyword.
    """
    ws = workspace if workspace is not None else Workspace()
    errors: list[ParseError] = []
    try:
        toks = tokenize(text)
    except Exception as e:  # tokenizer is total, but stay safe
        return ParseResult(ws, [ParseError(0, 0, f"tokenizer failure: {e}")])
    p = _Parser(toks)
    elab = _Elab(ws)
    while p.peek().kind != "eof":
        start = p.peek()
        before = p.i
        try:
            decl = p.declaration()
            if decl is None:
                break
            elab.run(decl)
        except _Bail as bail:
            err = bail.err
            if err.line == 0:
                err = ParseError(start.line, start.col, err.message)
            errors.append(err)
            # resync: skip to the next declaration keyword
            while p.peek().kind != "eof" and not (p.peek().kind == "name" and p.peek().text in _DECL_KEYWORDS):
                p.next()
            if p.i == before and p.peek().kind != "eof":
                p.next()
    return ParseResult(ws, errors)


def parse_state_literal(text: str, d: Cds) -> State:
    """Parse one `{cell=value,...}` literal against a given space."""
    from .cds import Violation

    toks = tokenize(text)
    p = _Parser(toks)
    elab = _Elab(Workspace())
    try:
        tree = p.state_tree()
        if p.peek().kind != "eof":
            p.fail("end of literal")
        return elab.state(tree, d)
    except _Bail as bail:
        raise DefinitionError([Violation("bad-literal", str(bail.err))])


# pretty-printing ------------------------------------------------------------

def _fmt_state_events(evs: Iterable) -> str:
    from .cds import event_key

    return "{" + ",".join(f"{token_key(c)}={token_key(v)}" for c, v in sorted(evs, key=event_key)) + "}"


def print_decl(decl: Decl, ws: Workspace) -> str:
    if isinstance(decl, RawCdsDecl):
        d = ws.cds[decl.name]
        lines = [f"cds {decl.name} {{"]
        lines.append("  cells " + " ".join(d.sorted_cells()) + ";")
        lines.append("  values " + " ".join(sorted(d.values, key=token_key)) + ";")
        evs = sorted(d.events, key=lambda ev: (token_key(ev[0]), token_key(ev[1])))
        lines.append("  events " + " ".join(f"{c}:{v}" for c, v in evs) + ";")
        from .cds import INITIAL

        for c in d.sorted_cells():
            pres = d.preconditions(c)
            if pres == frozenset({INITIAL}):
                continue
            for p in sorted(pres, key=str):
                if p is INITIAL:
                    lines.append(f"  enable {c} <- init;")
                else:
                    lines.append(f"  enable {c} <- {p[0]}:{p[1]};")
        lines.append("}")
        return "\n".join(lines)
    if isinstance(decl, ProdDecl):
        return f"prod {decl.name} = " + " * ".join(decl.parts) + ";"
    if isinstance(decl, ExpDecl):
        return f"exp {decl.name} = {decl.source} -> {decl.target};"
    if isinstance(decl, LiftDecl):
        return f"lift {decl.name} = {decl.source};"
    if isinstance(decl, AlgDecl):
        alg = ws.algs[decl.name]
        lines = [f"alg {decl.name} : {decl.source} -> {decl.target} {{"]
        for fc, fv in alg.state.sorted_events():
            if isinstance(fv, Valof):
                lines.append(f"  at {fc.input_state} {token_key(fc.output_cell)} ask {token_key(fv.cell)};")
            else:
                lines.append(f"  at {fc.input_state} {token_key(fc.output_cell)} put {token_key(fv.value)};")
        lines.append("}")
        return "\n".join(lines)
    if isinstance(decl, TableDecl):
        t = ws.tables[decl.name]
        lines = [f"table {decl.name} : {decl.source} -> {decl.target} {{"]
        for x, y in t.rows.items():
            if not y.events:
                continue
            lines.append(f"  {x} => {y};")
        lines.append("  default empty;")
        lines.append("}")
        return "\n".join(lines)
    if isinstance(decl, BehaviourDecl):
        b = ws.behaviours[decl.name]
        names = sorted(t.name for t in b.tests)
        return f"behaviour {decl.name} : {decl.candidate} {{ tests " + " ".join(names) + "; }"
    raise TypeError(decl)


def print_workspace(ws: Workspace) -> str:
    """Canonical text for every declaration, reparseable to an equal workspace."""
    return "\n\n".join(print_decl(d, ws) for d in ws.decls) + "\n"
