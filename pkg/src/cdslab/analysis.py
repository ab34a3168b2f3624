"""Classifiers for finite function tables: monotone, stable, sequential.

A function table maps every state of the input space to a state of the
output space.  Monotonicity and stability are decided by exhaustive
pairwise checks; sequential realizability is decided by a backtracking
search for algorithms whose input-output function equals the table,
where an exhausted empty search is a certificate of impossibility.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .cds import (
    BudgetExceeded,
    Cds,
    DefinitionError,
    State,
    Token,
    Violation,
    accessible_cells,
    empty_state,
    enumeration_budget,
    enumerate_states,
    state_violations,
    token_key,
)
from .interaction import fun_of
from .seqalg import FunCell, Output, SeqAlg, Valof, exponential, validate_algorithm


@dataclass(frozen=True, eq=False)
class FunTable:
    """A total map from input states to output states."""

    from_cds: Cds
    to_cds: Cds
    rows: Mapping[State, State]
    name: str = ""

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FunTable) and dict(self.rows) == dict(other.rows)

    def __call__(self, x: State) -> State:
        return self.rows[x]

    def __repr__(self) -> str:
        label = self.name or f"{self.from_cds.name}->{self.to_cds.name}"
        return f"<FunTable {label} {len(self.rows)} rows>"


def make_table(
    m: Cds,
    n: Cds,
    rows: Mapping[State, State] | Iterable[tuple[State, State]],
    name: str = "",
    default_empty: bool = False,
    limit: int | None = None,
) -> FunTable:
    """Validate totality and image validity; optionally pad missing rows with the empty state."""
    rows = dict(rows)
    violations: list[Violation] = []
    all_states = enumerate_states(m, limit)
    known = set(all_states)
    for x in rows:
        if x not in known:
            violations.append(Violation("unknown-state", f"row key {x} is not a state of {m.name}"))
    for x, y in rows.items():
        violations.extend(state_violations(n, y.events))
    for x in all_states:
        if x not in rows:
            if default_empty:
                rows[x] = empty_state(n)
            else:
                violations.append(Violation("missing-row", f"no row for state {x}"))
    if violations:
        raise DefinitionError(violations)
    ordered = {x: rows[x] for x in all_states}
    return FunTable(m, n, ordered, name)


def table_of(alg: SeqAlg, name: str = "", limit: int | None = None) -> FunTable:
    """The function part of an algorithm, packaged as a table."""
    return make_table(alg.from_cds, alg.to_cds, fun_of(alg, limit), name=name, default_empty=True, limit=limit)


@dataclass(frozen=True)
class MonotoneResult:
    ok: bool
    witness: tuple[State, State] | None = None

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class StableResult:
    ok: bool
    witness: tuple[State, State] | None = None
    skipped_pairs: tuple = ()

    def __bool__(self) -> bool:
        return self.ok


def is_monotone(t: FunTable) -> MonotoneResult:
    """Larger inputs must give larger outputs; returns a violating pair otherwise."""
    states = list(t.rows)
    for x in states:
        for y in states:
            if x <= y and not t.rows[x] <= t.rows[y]:
                return MonotoneResult(False, (x, y))
    return MonotoneResult(True)


def _bounded(m: Cds, x: State, y: State) -> State | None:
    """The join of two states when they are compatible, else None."""
    evs = x.events | y.events
    filled = [c for (c, _) in evs]
    if len(filled) != len(set(filled)):
        return None
    if state_violations(m, evs):
        return None
    return State(m, evs)


def is_stable(t: FunTable) -> StableResult:
    """Meets of compatible inputs must map to meets of the outputs.

    Meets are taken as event-set intersections; pairs whose intersection
    is not itself a state are skipped and reported, not guessed.
    """
    mono = is_monotone(t)
    if not mono.ok:
        raise DefinitionError([Violation("not-monotone", f"violating pair {mono.witness[0]}, {mono.witness[1]}")])
    m, n = t.from_cds, t.to_cds
    states = list(t.rows)
    skipped = []
    for i, x in enumerate(states):
        for y in states[i:]:
            if _bounded(m, x, y) is None:
                continue
            meet_evs = x.events & y.events
            if state_violations(m, meet_evs):
                skipped.append((x, y))
                continue
            meet = State(m, meet_evs)
            out_meet = t.rows[meet].events
            expected = t.rows[x].events & t.rows[y].events
            if out_meet != expected:
                return StableResult(False, (x, y), tuple(skipped))
    return StableResult(True, None, tuple(skipped))


def sequential_realizers(t: FunTable, limit: int | None = None) -> list[SeqAlg]:
    """All algorithms whose function part equals the table exactly.

    Backtracking over reachable function-space cells; at each cell the
    candidate move must be compatible with every input above the current
    one.  An empty result means the exhausted search proved that no
    schedule exists.
    """
    m, n = t.from_cds, t.to_cds
    exp = exponential(m, n, limit)
    budget = enumeration_budget(limit)
    states = list(t.rows)
    ups: dict[State, list[State]] = {x: [z for z in states if x <= z] for x in states}

    def output_ok(x: State, cell: Token, value: Token) -> bool:
        return all(t.rows[z].value_of(cell) == value for z in ups[x])

    def silence_ok(x: State, cell: Token, need_unfilled: Token | None = None) -> bool:
        for z in ups[x]:
            if need_unfilled is not None and z.value_of(need_unfilled) is not None:
                continue
            if t.rows[z].value_of(cell) is not None:
                return False
        return True

    nodes = 0
    found: list[SeqAlg] = []

    def cell_order(fc: FunCell) -> str:
        return str(fc)

    def search(frontier: frozenset, decided: frozenset, events: dict) -> None:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded(f"realizer search explored more than {budget} nodes")
        if not frontier:
            alg = validate_algorithm(m, n, events.items(), limit=limit)
            if fun_of(alg, limit) == dict(t.rows):
                found.append(alg)
            return
        fc = min(frontier, key=cell_order)
        rest = frontier - {fc}
        done = decided | {fc}
        x, cell = fc.input_state, fc.output_cell

        if silence_ok(x, cell):
            search(rest, done, events)
        for v in n.values_of(cell):
            if output_ok(x, cell, v):
                nxt = dict(events)
                nxt[fc] = Output(v)
                grown = set(rest)
                for c2 in n.cells:
                    fc2 = FunCell(x, c2)
                    if (cell, v) in n.preconditions(c2) and fc2 not in done:
                        grown.add(fc2)
                search(frozenset(grown), done, nxt)
        for c in sorted(accessible_cells(m, x), key=token_key):
            if silence_ok(x, cell, need_unfilled=c):
                nxt = dict(events)
                nxt[fc] = Valof(c)
                grown = set(rest)
                for v in m.values_of(c):
                    fc2 = FunCell(x.with_event(c, v), cell)
                    if fc2 not in done:
                        grown.add(fc2)
                search(frozenset(grown), done, nxt)

    roots = frozenset(FunCell(empty_state(m), c) for c in n.cells if n.is_initial(c))
    search(roots, frozenset(), {})
    found.sort(key=lambda a: str(a.state.sorted_events()))
    return found
