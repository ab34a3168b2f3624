"""Function-space CDSs and sequential algorithms.

The exponential of two spaces M and N is itself a Cds whose cells pair a
state of M (what has been read) with an output cell of N, and whose
values are either a query on an input cell (`valof c`) or an answer on
the output side (`output v`).  A sequential algorithm is a state of the
exponential: a function tied to one interaction schedule.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

from .cds import (
    Cds,
    DefinitionError,
    INITIAL,
    State,
    Token,
    Violation,
    accessible_cells,
    empty_state,
    enumerate_states,
    event_key,
    state_violations,
    token_key,
)

# exponential cache and source registry, keyed by identity of the factors;
# entries hold strong references so ids stay valid
_EXP_CACHE: dict[tuple[int, int], tuple[Cds, Cds, Cds]] = {}
_EXP_PARTS: dict[int, tuple[Cds, Cds, Cds]] = {}


@dataclass(frozen=True)
class FunCell:
    """A function-space cell: input read so far, plus the output cell."""

    input_state: State
    output_cell: Token

    def __str__(self) -> str:
        return f"<{self.input_state}|-{token_key(self.output_cell)}>"

    def __repr__(self) -> str:
        return str(self)


@dataclass(frozen=True)
class Valof:
    """Query move: the function waits for the value of input cell `cell`."""

    cell: Token

    def __str__(self) -> str:
        return f"valof {token_key(self.cell)}"

    def __repr__(self) -> str:
        return str(self)


@dataclass(frozen=True)
class Output:
    """Answer move: the function emits `value` on the requested output cell."""

    value: Token

    def __str__(self) -> str:
        return f"output {token_key(self.value)}"

    def __repr__(self) -> str:
        return str(self)


FunValue = Valof | Output


def exponential(m: Cds, n: Cds, limit: int | None = None) -> Cds:
    """The function-space Cds from m to n.

    Cells exist for every (state of m, cell of n) pair; a query on c is
    permitted only where c is still accessible, an answer v' only where
    (c', v') is an event of n.  Enabling threads the dialogue: deeper
    input states are reached by queries, deeper output cells by answers.
    """
    key = (id(m), id(n))
    cached = _EXP_CACHE.get(key)
    if cached is not None and cached[0] is m and cached[1] is n:
        return cached[2]

    xs = enumerate_states(m, limit)
    valid = {x.events for x in xs}
    cells = set()
    values = {Valof(c) for c in m.cells} | {Output(v) for v in n.values}
    events = set()
    enabling: dict[Token, frozenset] = {}

    for x in xs:
        acc = accessible_cells(m, x)
        for c2 in n.cells:
            fc = FunCell(x, c2)
            cells.add(fc)
            for c in acc:
                events.add((fc, Valof(c)))
            for (nc, nv) in n.events:
                if nc == c2:
                    events.add((fc, Output(nv)))

            pres: set = set()
            if not x.events and n.is_initial(c2):
                pres.add(INITIAL)
            for (c, v) in x.events:
                sub = x.events - {(c, v)}
                if sub not in valid:
                    continue
                x_sub = State(m, sub)
                if c in accessible_cells(m, x_sub):
                    pres.add((FunCell(x_sub, c2), Valof(c)))
            for p in n.preconditions(c2):
                if p is not INITIAL:
                    pres.add((FunCell(x, p[0]), Output(p[1])))
            enabling[fc] = frozenset(pres)

    exp = Cds(
        f"[{m.name}->{n.name}]",
        frozenset(cells),
        frozenset(values),
        frozenset(events),
        enabling,
    )
    _EXP_CACHE[key] = (m, n, exp)
    _EXP_PARTS[id(exp)] = (exp, m, n)
    return exp


def exponential_parts(d: Cds) -> tuple[Cds, Cds] | None:
    """The (from, to) factors of a Cds built by `exponential`, if any."""
    hit = _EXP_PARTS.get(id(d))
    return None if hit is None else (hit[1], hit[2])


def adopt_exponential_parts(d: Cds, source: Cds) -> None:
    """Let a derived copy of a function space (say, err-lifted) keep its factors."""
    parts = exponential_parts(source)
    if parts is not None:
        _EXP_PARTS[id(d)] = (d, parts[0], parts[1])


@dataclass(frozen=True, eq=False)
class SeqAlg:
    """A sequential algorithm: a state of exponential(from_cds, to_cds).

    Equality and hashing are by event set, like State.
    """

    from_cds: Cds
    to_cds: Cds
    state: State
    name: str = ""

    def __eq__(self, other: object) -> bool:
        return isinstance(other, SeqAlg) and self.state.events == other.state.events

    def __hash__(self) -> int:
        return hash(self.state.events)

    def __repr__(self) -> str:
        label = self.name or f"{self.from_cds.name}->{self.to_cds.name}"
        return f"<SeqAlg {label} {len(self.state)} events>"

    @property
    def exp(self) -> Cds:
        return self.state.owner

    def events(self) -> list:
        return self.state.sorted_events()

    @cached_property
    def moves(self) -> dict[FunCell, FunValue]:
        return {fc: fv for (fc, fv) in self.state.events}

    def move_at(self, table: State, cell: Token) -> FunValue | None:
        """The algorithm's move when asked `cell` having read `table`."""
        return self.moves.get(FunCell(table, cell))

    def text(self) -> str:
        lines = []
        for fc, fv in self.state.sorted_events():
            if isinstance(fv, Valof):
                lines.append(f"at {fc.input_state} {token_key(fc.output_cell)} ask {token_key(fv.cell)};")
            else:
                lines.append(f"at {fc.input_state} {token_key(fc.output_cell)} put {token_key(fv.value)};")
        return "\n".join(lines)


def validate_algorithm(m: Cds, n: Cds, evs: Iterable[tuple], name: str = "", limit: int | None = None) -> SeqAlg:
    """Check that `evs` is a functional, safe state of the exponential."""
    evs = frozenset(evs)
    violations: list[Violation] = []
    bad: set[tuple] = set()
    for fc, fv in sorted(evs, key=event_key):
        if isinstance(fv, Valof) and isinstance(fc, FunCell):
            if fv.cell in fc.input_state.filled_cells():
                bad.add((fc, fv))
                violations.append(
                    Violation("valof-filled-cell", f"{fc} asks {token_key(fv.cell)} which it has already read")
                )
    exp = exponential(m, n, limit)
    violations.extend(state_violations(exp, evs - bad))
    if violations:
        raise DefinitionError(violations)
    return SeqAlg(m, n, State(exp, evs), name)


def enumerate_algorithms(m: Cds, n: Cds, limit: int | None = None) -> list[SeqAlg]:
    """Every sequential algorithm from m to n, in canonical order."""
    exp = exponential(m, n, limit)
    return [SeqAlg(m, n, s) for s in enumerate_states(exp, limit)]


def identity_algorithm(m: Cds, limit: int | None = None) -> SeqAlg:
    """The copycat from m to m: forward each request, echo the answer.

    Built demand-driven so that every event is justified by the dialogue
    that produces it (a blanket event set over all input states would
    not be a safe state of the exponential).
    """

    def move(x: State, c: Token) -> FunValue | None:
        v = x.value_of(c)
        if v is not None:
            return Output(v)
        if c in accessible_cells(m, x):
            return Valof(c)
        return None

    evs = demand_driven_events(m, m, move, limit)
    return validate_algorithm(m, m, evs, name=f"id_{m.name}", limit=limit)


def demand_driven_events(m: Cds, n: Cds, move, limit: int | None = None) -> set[tuple]:
    """Collect the events of an algorithm given its move function.

    Starts at the initial output requests and explores exactly the
    function-space cells its own moves enable, so the result is a safe
    state by construction.
    """
    empty = empty_state(m)
    queue: list[FunCell] = [FunCell(empty, c) for c in sorted(n.cells, key=token_key) if n.is_initial(c)]
    decided: set[FunCell] = set()
    events: set[tuple] = set()
    while queue:
        fc = queue.pop(0)
        if fc in decided:
            continue
        decided.add(fc)
        fv = move(fc.input_state, fc.output_cell)
        if fv is None:
            continue
        events.add((fc, fv))
        if isinstance(fv, Valof):
            for v in m.values_of(fv.cell):
                queue.append(FunCell(fc.input_state.with_event(fv.cell, v), fc.output_cell))
        else:
            for c2 in sorted(n.cells, key=token_key):
                if (fc.output_cell, fv.value) in n.preconditions(c2):
                    queue.append(FunCell(fc.input_state, c2))
    return events
