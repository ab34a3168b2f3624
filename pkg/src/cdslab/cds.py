"""Concrete data structures: finite cell/value spaces with enabling preconditions.

A space declares which cells exist, which values may fill them, which
(cell, value) events are permitted, and when a cell becomes fillable.
A state is a finite, functional, safely enabled set of events; states
are the partial data of the model.  Cells and values are arbitrary
hashable tokens: plain strings for base spaces, structured tokens for
function spaces (see seqalg).
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Hashable, Iterable, Iterator, Mapping, Sequence

Token = Hashable
Event = tuple  # (cell, value)

ERR = "err"

_DEFAULT_BUDGET = 100_000

# enumeration caches, keyed by object identity (Cds instances are immutable)
_STATE_CACHE: dict[int, tuple["Cds", list["State"]]] = {}


def enumeration_budget(override: int | None = None) -> int:
    """Effective enumeration guard; CDSLAB_BUDGET overrides the default."""
    if override is not None:
        return override
    return int(os.environ.get("CDSLAB_BUDGET", _DEFAULT_BUDGET))


class _Initial:
    """Precondition marker for cells fillable from the empty state."""

    __slots__ = ()

    def __repr__(self) -> str:
        return "init"


INITIAL = _Initial()


def token_key(tok: Token) -> str:
    """Canonical sort key: tokens are ordered by their printed form."""
    return tok if isinstance(tok, str) else str(tok)


def event_key(ev: Event) -> tuple[str, str]:
    c, v = ev
    return (token_key(c), token_key(v))


@dataclass(frozen=True)
class Violation:
    code: str
    detail: str

    def __str__(self) -> str:
        return f"{self.code}: {self.detail}"


class CdslabError(Exception):
    pass


class DefinitionError(CdslabError):
    """A structure failed validation; carries every violation found."""

    def __init__(self, violations: Iterable[Violation]):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))

    def codes(self) -> set[str]:
        return {v.code for v in self.violations}


class InvalidState(DefinitionError):
    pass


class BudgetExceeded(CdslabError):
    pass


class EngineError(CdslabError):
    def __init__(self, code: str, detail: str):
        self.code = code
        self.detail = detail
        super().__init__(f"{code}: {detail}")


@dataclass(frozen=True, eq=False)
class Cds:
    """A concrete data structure.

    `enabling` maps each cell to its alternative preconditions; each
    precondition is either INITIAL or a single event.  Any satisfied
    precondition makes the cell fillable.
    """

    name: str
    cells: frozenset
    values: frozenset
    events: frozenset
    enabling: Mapping[Token, frozenset]

    def __repr__(self) -> str:
        return f"<Cds {self.name}>"

    def values_of(self, cell: Token) -> list[Token]:
        return sorted((v for (c, v) in self.events if c == cell), key=token_key)

    def preconditions(self, cell: Token) -> frozenset:
        return self.enabling.get(cell, frozenset())

    def is_initial(self, cell: Token) -> bool:
        return any(p is INITIAL for p in self.preconditions(cell))

    def sorted_cells(self) -> list[Token]:
        return sorted(self.cells, key=token_key)


@dataclass(frozen=True, eq=False)
class State:
    """A functional, safely enabled event set of one Cds.

    Equality and hashing ignore the owner so that structurally equal
    states survive serialisation round-trips; the owner is kept for
    enabling lookups.
    """

    owner: Cds
    events: frozenset

    def __eq__(self, other: object) -> bool:
        return isinstance(other, State) and self.events == other.events

    def __hash__(self) -> int:
        return hash(self.events)

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self) -> Iterator[Event]:
        return iter(self.sorted_events())

    def __contains__(self, ev: Event) -> bool:
        return ev in self.events

    def __le__(self, other: "State") -> bool:
        return self.events <= other.events

    def __lt__(self, other: "State") -> bool:
        return self.events < other.events

    def sorted_events(self) -> list[Event]:
        return sorted(self.events, key=event_key)

    def filled_cells(self) -> frozenset:
        return frozenset(c for (c, _) in self.events)

    def value_of(self, cell: Token) -> Token | None:
        for c, v in self.events:
            if c == cell:
                return v
        return None

    def with_event(self, cell: Token, value: Token) -> "State":
        return State(self.owner, self.events | {(cell, value)})

    def __str__(self) -> str:
        inner = ",".join(f"{token_key(c)}={token_key(v)}" for c, v in self.sorted_events())
        return "{" + inner + "}"


def empty_state(d: Cds) -> State:
    return State(d, frozenset())


def make_cds(
    name: str,
    cells: Iterable[Token],
    values: Iterable[Token],
    events: Iterable[Event],
    enabling: Mapping[Token, Iterable] | None = None,
) -> Cds:
    """Validate and build a Cds; collects every violation before raising.

    Cells missing from `enabling` are INITIAL.  An explicitly empty
    precondition set is an error (the cell could never be filled).
    """
    violations: list[Violation] = []
    cell_list = list(cells)
    value_list = list(values)
    cell_set = frozenset(cell_list)
    value_set = frozenset(value_list)

    if len(cell_list) != len(cell_set):
        violations.append(Violation("duplicate-id", f"duplicate cell in {name}"))
    if len(value_list) != len(value_set):
        violations.append(Violation("duplicate-id", f"duplicate value in {name}"))
    for tok in cell_set | value_set:
        if isinstance(tok, str) and not tok:
            violations.append(Violation("duplicate-id", "empty name"))
    for tok in cell_set & value_set:
        violations.append(Violation("duplicate-id", f"{token_key(tok)} is both a cell and a value"))

    event_set = frozenset(events)
    for c, v in sorted(event_set, key=event_key):
        if c not in cell_set:
            violations.append(Violation("unknown-cell", f"event on undeclared cell {token_key(c)}"))
        if v not in value_set:
            violations.append(Violation("unknown-value", f"event with undeclared value {token_key(v)}"))

    enabling = dict(enabling or {})
    table: dict[Token, frozenset] = {}
    for cell, pres in enabling.items():
        if cell not in cell_set:
            violations.append(Violation("unknown-cell", f"enabling for undeclared cell {token_key(cell)}"))
            continue
        pres = frozenset(pres)
        if not pres:
            violations.append(Violation("no-precondition", f"cell {token_key(cell)} has an empty enabling"))
        for p in pres:
            if p is INITIAL:
                continue
            c, v = p
            if c not in cell_set:
                violations.append(Violation("unknown-cell", f"precondition on undeclared cell {token_key(c)}"))
            elif v not in value_set:
                violations.append(Violation("unknown-value", f"precondition with undeclared value {token_key(v)}"))
            elif (c, v) not in event_set:
                violations.append(Violation("unknown-event", f"precondition {token_key(c)}={token_key(v)} is not a declared event"))
        table[cell] = pres
    for cell in cell_set - set(table):
        table[cell] = frozenset({INITIAL})

    if violations:
        raise DefinitionError(violations)
    return Cds(name, cell_set, value_set, event_set, table)


def state_violations(d: Cds, evs: Iterable[Event]) -> list[Violation]:
    """Why `evs` is not a state of `d`; empty when it is one."""
    violations: list[Violation] = []
    evs = frozenset(evs)
    for ev in sorted(evs, key=event_key):
        if ev not in d.events:
            violations.append(Violation("unknown-event", f"{token_key(ev[0])}={token_key(ev[1])} is not an event of {d.name}"))
    if any(v.code == "unknown-event" for v in violations):
        return violations

    by_cell: dict[Token, list[Token]] = {}
    for c, v in evs:
        by_cell.setdefault(c, []).append(v)
    for c, vs in sorted(by_cell.items(), key=lambda kv: token_key(kv[0])):
        if len(vs) > 1:
            violations.append(Violation("not-functional", f"cell {token_key(c)} filled more than once"))

    justified = _justified(d, evs)
    for c, v in sorted(evs, key=event_key):
        if (c, v) not in justified:
            violations.append(Violation("not-safe", f"event {token_key(c)}={token_key(v)} has no enabling chain"))
    return violations


def _justified(d: Cds, evs: frozenset) -> set:
    """Iterative closure: events whose cell is reachable from INITIAL within evs."""
    justified: set = set()
    grown = True
    while grown:
        grown = False
        for ev in evs - justified:
            c, _ = ev
            for p in d.preconditions(c):
                if p is INITIAL or (p in evs and p in justified):
                    justified.add(ev)
                    grown = True
                    break
    return justified


def check_state(d: Cds, evs: Iterable[Event]) -> State:
    violations = state_violations(d, evs)
    if violations:
        raise InvalidState(violations)
    return State(d, frozenset(evs))


def accessible_cells(d: Cds, x: State) -> frozenset:
    """Unfilled cells with a satisfied precondition (fillable right now)."""
    filled = x.filled_cells()
    out = set()
    for c in d.cells:
        if c in filled:
            continue
        for p in d.preconditions(c):
            if p is INITIAL or p in x.events:
                out.add(c)
                break
    return frozenset(out)


def enumerate_states(d: Cds, limit: int | None = None) -> list[State]:
    """All states of `d`, breadth-first from the empty state.

    Deterministic: the frontier is expanded cell-by-cell in canonical
    order.  Raises BudgetExceeded past the enumeration guard.
    """
    cached = _STATE_CACHE.get(id(d))
    if cached is not None and cached[0] is d:
        return list(cached[1])
    budget = enumeration_budget(limit)
    empty = empty_state(d)
    seen = {empty.events}
    order = [empty]
    queue = [empty]
    while queue:
        x = queue.pop(0)
        for c in sorted(accessible_cells(d, x), key=token_key):
            for v in d.values_of(c):
                y = x.with_event(c, v)
                if y.events in seen:
                    continue
                if len(seen) >= budget:
                    raise BudgetExceeded(f"more than {budget} states in {d.name}")
                seen.add(y.events)
                order.append(y)
                queue.append(y)
    if limit is None:
        _STATE_CACHE[id(d)] = (d, order)
    return list(order)


def _tag(i: int, tok: Token) -> Token:
    return f"{i}.{tok}" if isinstance(tok, str) else (i, tok)


def _untag(i: int, tok: Token) -> Token:
    if isinstance(tok, str):
        prefix = f"{i}."
        if not tok.startswith(prefix):
            raise ValueError(f"token {tok} does not carry tag {i}")
        return tok[len(prefix):]
    tag, inner = tok
    if tag != i:
        raise ValueError(f"token {tok} does not carry tag {i}")
    return inner


def product(*parts: Cds, name: str | None = None) -> Cds:
    """Tag-disjoint union of the parts; states are tuples of part states."""
    if name is None:
        name = "(" + "*".join(p.name for p in parts) + ")"
    cells = set()
    values = set()
    events = set()
    enabling: dict[Token, frozenset] = {}
    for i, part in enumerate(parts, start=1):
        cells |= {_tag(i, c) for c in part.cells}
        values |= {_tag(i, v) for v in part.values}
        events |= {(_tag(i, c), _tag(i, v)) for (c, v) in part.events}
        for c in part.cells:
            pres = set()
            for p in part.preconditions(c):
                if p is INITIAL:
                    pres.add(INITIAL)
                else:
                    pres.add((_tag(i, p[0]), _tag(i, p[1])))
            enabling[_tag(i, c)] = frozenset(pres)
    return Cds(name, frozenset(cells), frozenset(values), frozenset(events), enabling)


def project_state(parts: Sequence[Cds], z: State, i: int) -> State:
    """The i-th component (1-based) of a product state."""
    part = parts[i - 1]
    evs = set()
    for c, v in z.events:
        try:
            evs.add((_untag(i, c), _untag(i, v)))
        except ValueError:
            continue
    return check_state(part, evs)


def lift_err(d: Cds, name: str | None = None) -> Cds:
    """Adjoin the error value: every cell may also be filled with `err`."""
    if ERR in d.values or ERR in d.cells:
        raise DefinitionError([Violation("err-already-present", f"{d.name} already declares {ERR}")])
    events = set(d.events) | {(c, ERR) for c in d.cells}
    return Cds(
        name or f"{d.name}+err",
        d.cells,
        d.values | {ERR},
        frozenset(events),
        dict(d.enabling),
    )


def cds_equal(d1: Cds, d2: Cds) -> bool:
    """Structural equality (name ignored)."""
    return (
        d1.cells == d2.cells
        and d1.values == d2.values
        and d1.events == d2.events
        and {c: frozenset(p for p in ps) for c, ps in d1.enabling.items()}
        == {c: frozenset(p for p in ps) for c, ps in d2.enabling.items()}
    )
