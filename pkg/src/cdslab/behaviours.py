"""Behaviour types defined by orthogonality against taster algorithms.

A taster is an algorithm from a candidate function space into the
observation space O (one cell `ans`, values ok/err).  A candidate passes
a taster when their interaction makes the taster emit `err`: the taster
deliberately ends the conversation once it has seen what it wanted.  A
behaviour is a finite test set; membership is passing every test.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .cds import (
    Cds,
    ERR,
    EngineError,
    State,
    Token,
    cds_equal,
    empty_state,
    make_cds,
    token_key,
)
from .interaction import AlgorithmArg, Trace, ValueOutcome, apply
from .seqalg import (
    FunCell,
    FunValue,
    Output,
    SeqAlg,
    Valof,
    enumerate_algorithms,
    exponential,
    exponential_parts,
    validate_algorithm,
)

OK = "ok"

_obs: Cds | None = None
_empty: Cds | None = None


def observation_cds() -> Cds:
    """The space a taster reports into: one cell, verdict values ok/err."""
    global _obs
    if _obs is None:
        _obs = make_cds("O", ["ans"], [OK, ERR], [("ans", OK), ("ans", ERR)])
    return _obs


def empty_cds() -> Cds:
    global _empty
    if _empty is None:
        _empty = make_cds("empty", [], [], [])
    return _empty


def constant_algorithm(x: State) -> SeqAlg:
    """Wrap a plain state as an algorithm with no inputs (so tasters can probe it)."""
    d = x.owner
    exp = exponential(empty_cds(), d)
    evs = [(FunCell(empty_state(empty_cds()), c), Output(v)) for (c, v) in x.events]
    return validate_algorithm(empty_cds(), d, evs, name=f"const{x}")


@dataclass(frozen=True, eq=False)
class Behaviour:
    """A type given by its tests: everything orthogonal to all of them."""

    candidate_type: Cds
    tests: frozenset
    name: str = ""

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Behaviour) and self.tests == other.tests

    def __repr__(self) -> str:
        return f"<Behaviour {self.name or self.candidate_type.name} {len(self.tests)} tests>"


def make_behaviour(candidate_type: Cds, tests: Iterable[SeqAlg], name: str = "") -> Behaviour:
    tests = frozenset(tests)
    for t in tests:
        if not cds_equal(t.from_cds, candidate_type):
            raise EngineError("type-mismatch", f"taster {t.name or t} is not over {candidate_type.name}")
    return Behaviour(candidate_type, tests, name)


def orthogonal(taster: SeqAlg, candidate: SeqAlg) -> tuple[bool, Trace]:
    """Run the taster on the candidate; success is the verdict value `err`."""
    if not cds_equal(taster.from_cds, candidate.state.owner):
        raise EngineError(
            "type-mismatch",
            f"candidate type {candidate.state.owner.name} does not match taster input {taster.from_cds.name}",
        )
    outcome, trace = apply(taster, AlgorithmArg(candidate), "ans")
    return isinstance(outcome, ValueOutcome) and outcome.value == ERR, trace


def member(b: Behaviour, candidate: SeqAlg) -> bool:
    return all(orthogonal(t, candidate)[0] for t in b.tests)


def candidates_of(candidate_type: Cds, limit: int | None = None) -> list[SeqAlg]:
    """Every inhabitant of a candidate function space, in canonical order."""
    parts = exponential_parts(candidate_type)
    if parts is None:
        raise EngineError("type-mismatch", f"{candidate_type.name} is not a function space")
    return enumerate_algorithms(parts[0], parts[1], limit)


def member_set(b: Behaviour, limit: int | None = None) -> list[SeqAlg]:
    return [s for s in candidates_of(b.candidate_type, limit) if member(b, s)]


def first_move_taster(m: Cds, n: Cds, probe_cell: Token, move: FunValue, name: str = "") -> SeqAlg:
    """A taster that asks one strategy question and errs exactly on `move`.

    It queries the candidate's move at the probe cell (an unfilled-input
    request) and emits the verdict only when the observed move is the
    expected one; any other answer leaves it without a move.
    """
    cand = exponential(m, n)
    fc = FunCell(empty_state(m), probe_cell)
    if fc not in cand.cells:
        raise EngineError("unknown-field", f"no initial candidate cell for {token_key(probe_cell)}")
    obs = observation_cds()
    start = FunCell(empty_state(cand), "ans")
    seen = FunCell(State(cand, frozenset({(fc, move)})), "ans")
    evs = [(start, Valof(fc)), (seen, Output(ERR))]
    return validate_algorithm(cand, obs, evs, name=name)


def presence_taster(record: Cds, field: Token, name: str = "") -> SeqAlg:
    """Err as soon as the record has the field filled, whatever the value.

    Record states are probed through their constant-algorithm wrapping;
    the taster asks the field and accepts every declared answer.
    """
    if field not in record.cells:
        raise EngineError("unknown-field", f"{token_key(field)} is not a field of {record.name}")
    cand = exponential(empty_cds(), record)
    obs = observation_cds()
    fc = FunCell(empty_state(empty_cds()), field)
    start = FunCell(empty_state(cand), "ans")
    evs: list = [(start, Valof(fc))]
    for v in record.values_of(field):
        seen = FunCell(State(cand, frozenset({(fc, Output(v))})), "ans")
        evs.append((seen, Output(ERR)))
    return validate_algorithm(cand, obs, evs, name=name or f"has_{token_key(field)}")


@dataclass(frozen=True)
class SubtypeResult:
    syntactic: bool
    semantic: bool | None = None

    def __bool__(self) -> bool:
        return self.syntactic if self.semantic is None else self.semantic


def subtype(bsub: Behaviour, bsuper: Behaviour, semantic: bool = False, limit: int | None = None) -> SubtypeResult:
    """bsub is below bsuper when bsuper's tests are among bsub's.

    More tests cut the member set down, so the test-set inclusion is the
    sufficient syntactic verdict; the semantic mode checks member-set
    inclusion by enumerating the candidate space.
    """
    if not cds_equal(bsub.candidate_type, bsuper.candidate_type):
        raise EngineError("type-mismatch", "behaviours compare only over one candidate type")
    syntactic = bsuper.tests <= bsub.tests
    if not semantic:
        return SubtypeResult(syntactic)
    sub_members = {s.state.events for s in member_set(bsub, limit)}
    super_members = {s.state.events for s in member_set(bsuper, limit)}
    return SubtypeResult(syntactic, sub_members <= super_members)
