"""The application dialogue engine.

Applying an algorithm to an argument is a conversation: the requested
output cell is looked up against an internal table of input events read
so far; a `valof` move passes control to the argument, whose answer
grows the table by one event; an `output` move ends the dialogue.  An
error value answered by the argument aborts the dialogue and propagates
to the caller.  Sessions keep the table across requests so evaluation is
incremental.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol

from .cds import (
    BudgetExceeded,
    ERR,
    EngineError,
    State,
    Token,
    accessible_cells,
    cds_equal,
    check_state,
    empty_state,
    enumeration_budget,
    enumerate_states,
    token_key,
)
from .seqalg import FunCell, FunValue, Output, SeqAlg, Valof, validate_algorithm


# ---------------------------------------------------------------------------
# argument processes

@dataclass(frozen=True)
class Value:
    value: Token


class _ErrAnswer:
    __slots__ = ()

    def __repr__(self) -> str:
        return "ERR_ANSWER"


class _NoAnswer:
    __slots__ = ()

    def __repr__(self) -> str:
        return "NO_ANSWER"


ERR_ANSWER = _ErrAnswer()
NO_ANSWER = _NoAnswer()

Answer = Value | _ErrAnswer | _NoAnswer


class ArgumentProcess(Protocol):
    def answer(self, cell: Token) -> Answer: ...


class StaticState:
    """Answer queries from a fixed state; an `err` entry aborts the reader."""

    def __init__(self, state: State):
        self.state = state

    def answer(self, cell: Token) -> Answer:
        v = self.state.value_of(cell)
        if v is None:
            return NO_ANSWER
        if v == ERR:
            return ERR_ANSWER
        return Value(v)


def AlgorithmArg(alg: SeqAlg) -> StaticState:
    """An algorithm used as argument: queries address its own event set."""
    return StaticState(alg.state)


class ManualOracle:
    """Answers supplied interactively; unanswered queries suspend the dialogue."""

    def __init__(self) -> None:
        self.given: dict[Token, Token] = {}

    def answer(self, cell: Token) -> Answer:
        if cell not in self.given:
            return NO_ANSWER
        v = self.given[cell]
        return ERR_ANSWER if v == ERR else Value(v)

    def provide(self, cell: Token, value: Token) -> None:
        self.given[cell] = value

    def reset(self) -> None:
        self.given.clear()


# ---------------------------------------------------------------------------
# moves, outcomes, traces

@dataclass(frozen=True)
class ValofMove:
    cell: Token


@dataclass(frozen=True)
class AnswerMove:
    value: Token


@dataclass(frozen=True)
class OutputMove:
    value: Token


Move = ValofMove | AnswerMove | OutputMove


def is_player_move(m: Move) -> bool:
    return isinstance(m, (ValofMove, OutputMove))


@dataclass(frozen=True)
class ValueOutcome:
    value: Token


@dataclass(frozen=True)
class ErrOutcome:
    pass


@dataclass(frozen=True)
class StuckOutcome:
    pass


Outcome = ValueOutcome | ErrOutcome | StuckOutcome

ERR_RESULT = ErrOutcome()
STUCK = StuckOutcome()


@dataclass(frozen=True)
class Trace:
    """One dialogue: the request, the alternating moves, and how it ended.

    `pending` names the queried cell still awaiting an answer when the
    dialogue suspended; `tables` carries per-round table snapshots in
    verbose mode.
    """

    request: Token
    moves: tuple
    outcome: Outcome
    pending: Token | None = None
    tables: tuple | None = None

    def lines(self) -> list[str]:
        out = [f"REQ {token_key(self.request)}"]
        for m in self.moves:
            if isinstance(m, ValofMove):
                out.append(f"VALOF {token_key(m.cell)}")
            elif isinstance(m, AnswerMove):
                out.append(f"ANS {token_key(m.value)}")
            else:
                out.append(f"OUT {token_key(m.value)}")
        if isinstance(self.outcome, ValueOutcome):
            out.append(f"RESULT value:{token_key(self.outcome.value)}")
        elif isinstance(self.outcome, ErrOutcome):
            out.append("RESULT err")
        else:
            out.append("RESULT stuck")
        return out

    def text(self) -> str:
        return "\n".join(self.lines()) + "\n"


# ---------------------------------------------------------------------------
# sessions

class Session:
    """A persistent application of one algorithm to one argument.

    The answer table survives across requests, so later dialogues reuse
    earlier answers without consulting the argument again.  For each
    answered output cell the table position where the answer was emitted
    is kept, letting requests for deeper output cells resume from it.
    """

    def __init__(self, alg: SeqAlg, argument: ArgumentProcess):
        self.alg = alg
        self.argument = argument
        self.cache: dict[Token, Token] = {}
        self.answered: dict[Token, tuple[Token, State]] = {}
        self.pending: tuple[Token, Token] | None = None
        self.last_trace: Trace | None = None

    def table_state(self) -> State:
        return State(self.alg.from_cds, frozenset(self.cache.items()))

    def reset(self) -> None:
        self.cache.clear()
        self.answered.clear()
        self.pending = None
        self.last_trace = None
        if hasattr(self.argument, "reset"):
            self.argument.reset()

    def _start_table(self, cell: Token) -> State | None:
        n = self.alg.to_cds
        if n.is_initial(cell):
            return empty_state(self.alg.from_cds)
        pres = [p for p in n.preconditions(cell) if isinstance(p, tuple)]
        for c2, v2 in sorted(pres, key=str):
            hit = self.answered.get(c2)
            if hit is not None and hit[0] == v2:
                return hit[1]
        return None

    def request(self, cell: Token, verbose: bool = False) -> Trace:
        alg = self.alg
        m = alg.from_cds
        if cell not in alg.to_cds.cells:
            raise EngineError("request-unknown-cell", f"{token_key(cell)} is not a cell of {alg.to_cds.name}")
        self.pending = None
        moves: list[Move] = []
        tables: list[State] = []

        t = self._start_table(cell)
        outcome: Outcome = STUCK
        pending_cell: Token | None = None
        if t is not None:
            if verbose:
                tables.append(self.table_state())
            while True:
                fv = alg.move_at(t, cell)
                if fv is None:
                    break
                if isinstance(fv, Output):
                    moves.append(OutputMove(fv.value))
                    self.answered[cell] = (fv.value, t)
                    outcome = ValueOutcome(fv.value)
                    break
                c = fv.cell
                assert t.value_of(c) is None, "algorithm queried a cell it already read"
                if c in self.cache:
                    # reuse an earlier answer; no interaction, no move recorded
                    t = t.with_event(c, self.cache[c])
                    continue
                ans = self.argument.answer(c)
                if ans is NO_ANSWER:
                    moves.append(ValofMove(c))
                    pending_cell = c
                    self.pending = (cell, c)
                    break
                if ans is ERR_ANSWER:
                    moves.append(ValofMove(c))
                    moves.append(AnswerMove(ERR))
                    outcome = ERR_RESULT
                    break
                v = ans.value
                if (c, v) not in m.events:
                    raise EngineError(
                        "argument-answer-ill-typed",
                        f"{token_key(c)}={token_key(v)} is not an event of {m.name}",
                    )
                moves.append(ValofMove(c))
                moves.append(AnswerMove(v))
                self.cache[c] = v
                t = t.with_event(c, v)
                if verbose:
                    tables.append(self.table_state())

        trace = Trace(cell, tuple(moves), outcome, pending_cell, tuple(tables) if verbose else None)
        self.last_trace = trace
        return trace

    def answer(self, value: Token) -> Trace:
        """Resume a suspended dialogue by playing the argument's answer."""
        if self.pending is None:
            raise EngineError("wrong-phase", "no query is awaiting an answer")
        if not isinstance(self.argument, ManualOracle):
            raise EngineError("wrong-phase", "the argument is not played manually")
        req_cell, valof_cell = self.pending
        if value != ERR and (valof_cell, value) not in self.alg.from_cds.events:
            raise EngineError(
                "ill-typed-answer",
                f"{token_key(valof_cell)}={token_key(value)} is not an event of {self.alg.from_cds.name}",
            )
        self.argument.provide(valof_cell, value)
        return self.request(req_cell)


def open_session(alg: SeqAlg, argument: ArgumentProcess) -> Session:
    return Session(alg, argument)


def apply(alg: SeqAlg, argument: ArgumentProcess, cell: Token, verbose: bool = False) -> tuple[Outcome, Trace]:
    """One-shot application: a fresh session, a single request."""
    trace = Session(alg, argument).request(cell, verbose=verbose)
    return trace.outcome, trace


# ---------------------------------------------------------------------------
# the function part of an algorithm

def fun_of(alg: SeqAlg, limit: int | None = None) -> dict[State, State]:
    """The input-output function: err-free input states to output states.

    Output cells are requested in enabling order within one session per
    input, so deeper output cells see their justifiers already answered.
    """
    m, n = alg.from_cds, alg.to_cds
    rows: dict[State, State] = {}
    for x in enumerate_states(m, limit):
        if any(v == ERR for (_, v) in x.events):
            continue
        session = Session(alg, StaticState(x))
        out: dict[Token, Token] = {}
        progress = True
        while progress:
            progress = False
            z = State(n, frozenset(out.items()))
            for c in sorted(accessible_cells(n, z), key=token_key):
                trace = session.request(c)
                if isinstance(trace.outcome, ValueOutcome):
                    out[c] = trace.outcome.value
                    progress = True
        rows[x] = check_state(n, out.items())
    return rows


# ---------------------------------------------------------------------------
# composition

class _VirtualArgument:
    """f applied to a fixed input, used as the argument of another dialogue.

    Records the first input cell f turned out to need but could not read
    from the input; that need becomes the composite's own query.
    """

    def __init__(self, f: SeqAlg, x: State):
        self.session = Session(f, StaticState(x))
        self.need: Token | None = None

    def answer(self, cell: Token) -> Answer:
        trace = self.session.request(cell)
        o = trace.outcome
        if isinstance(o, ValueOutcome):
            return ERR_ANSWER if o.value == ERR else Value(o.value)
        if isinstance(o, ErrOutcome):
            return ERR_ANSWER
        if trace.pending is not None and self.need is None:
            self.need = trace.pending
        return NO_ANSWER


def _composite_move(f: SeqAlg, g: SeqAlg, x: State, chain: tuple) -> FunValue | None:
    virtual = _VirtualArgument(f, x)
    gs = Session(g, virtual)
    for c in chain[:-1]:
        gs.request(c)
    trace = gs.request(chain[-1])
    o = trace.outcome
    if isinstance(o, ValueOutcome):
        return Output(o.value)
    if isinstance(o, ErrOutcome):
        return Output(ERR) if ERR in g.to_cds.values else None
    if virtual.need is not None:
        return Valof(virtual.need)
    return None


def compose(f: SeqAlg, g: SeqAlg, limit: int | None = None) -> SeqAlg:
    """The composite algorithm: run g, feeding it f's outputs on demand.

    Explores exactly the function-space cells its own moves enable, so
    the collected events validate as a state of the composite space.
    """
    if not cds_equal(f.to_cds, g.from_cds):
        raise EngineError("middle-mismatch", f"{f.to_cds.name} does not match {g.from_cds.name}")
    m, p = f.from_cds, g.to_cds
    budget = enumeration_budget(limit)

    events: dict[FunCell, FunValue] = {}
    queue: list[tuple[State, Token, tuple]] = [
        (empty_state(m), c, (c,)) for c in sorted(p.cells, key=token_key) if p.is_initial(c)
    ]
    seen: set[FunCell] = set()
    nodes = 0
    while queue:
        x, out_cell, chain = queue.pop(0)
        fc = FunCell(x, out_cell)
        if fc in seen:
            continue
        seen.add(fc)
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded(f"composition explored more than {budget} cells")
        mv = _composite_move(f, g, x, chain)
        if mv is None:
            continue
        events[fc] = mv
        if isinstance(mv, Valof):
            for v in m.values_of(mv.cell):
                queue.append((x.with_event(mv.cell, v), out_cell, chain))
        else:
            for c2 in sorted(p.cells, key=token_key):
                if (out_cell, mv.value) in p.preconditions(c2):
                    queue.append((x, c2, chain + (c2,)))
    name = f"{g.name or 'g'}.{f.name or 'f'}"
    return validate_algorithm(m, p, events.items(), name=name, limit=limit)
