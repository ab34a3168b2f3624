"""Named constructors for the standard desk examples.

Everything the tests, CLI and docs refer to by name is built here once:
the flat boolean spaces, the one-question game, the two and-schedules
that differ only in reading order, the parallel-or and Gustave tables,
the first-move taster, and the record spaces with presence tasters.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Mapping

from .analysis import FunTable, make_table
from .behaviours import (
    Behaviour,
    empty_cds,
    first_move_taster,
    make_behaviour,
    observation_cds,
    presence_taster,
)
from .cds import Cds, State, check_state, empty_state, make_cds, product
from .seqalg import FunCell, Output, SeqAlg, Valof, exponential, validate_algorithm


def flat_cds(name: str, cells: Iterable[str], values: Iterable[str]) -> Cds:
    """All cells initial, every cell/value combination permitted."""
    cells = list(cells)
    values = list(values)
    return make_cds(name, cells, values, [(c, v) for c in cells for v in values])


def game_o() -> Cds:
    """One question, no possible answer: the minimal interactive space."""
    return make_cds("o", ["?"], [], [])


def chain_cds() -> Cds:
    """Two cells where the second only opens after p holds tt."""
    return make_cds(
        "chain",
        ["p", "q"],
        ["tt"],
        [("p", "tt"), ("q", "tt")],
        {"q": [("p", "tt")]},
    )


def state_of(d: Cds, bindings: Mapping[str, str]) -> State:
    return check_state(d, list(bindings.items()))


def _alg(m: Cds, n: Cds, events: list, name: str) -> SeqAlg:
    return validate_algorithm(m, n, events, name=name)


def _schedule(m: Cds, n: Cds, order: list[str], out_value: str, name: str) -> SeqAlg:
    """Read the given input cells in order, insisting on tt, then answer."""
    evs = []
    read: dict[str, str] = {}
    for c in order:
        evs.append((FunCell(state_of(m, read), "out"), Valof(c)))
        read[c] = "tt"
    evs.append((FunCell(state_of(m, read), "out"), Output(out_value)))
    return _alg(m, n, evs, name)


@dataclass(frozen=True, eq=False)
class Fixtures:
    B: Cds
    B2: Cds
    B3: Cds
    o: Cds
    oo: Cds
    O: Cds
    chain: Cds
    record: Cds
    sigma: Cds
    sigma3: Cds
    sigma_out: Cds
    cand: Cds
    rec_exp: Cds
    A: SeqAlg
    A_prime: SeqAlg
    A3: SeqAlg
    A3_prime: SeqAlg
    not_alg: SeqAlg
    and_table: FunTable
    por_table: FunTable
    por_bottom_table: FunTable
    bk_table: FunTable
    T2: SeqAlg
    has_year: SeqAlg
    has_price: SeqAlg
    has_colour: SeqAlg
    needs_second: Behaviour
    rec_yp: Behaviour
    rec_ypc: Behaviour


@lru_cache(maxsize=1)
def fixtures() -> Fixtures:
    B = flat_cds("B", ["out"], ["tt", "ff"])
    B2 = flat_cds("B2", ["a", "b"], ["tt", "ff"])
    B3 = flat_cds("B3", ["a", "b", "c"], ["tt", "ff"])
    o = game_o()
    oo = product(o, o, name="oo")
    O = observation_cds()
    chain = chain_cds()
    record = flat_cds("record", ["year", "price", "colour"], ["v"])
    sigma = flat_cds("sigma", ["in"], ["u"])
    sigma3 = product(sigma, sigma, sigma, name="sigma3")
    sigma_out = flat_cds("sigmaout", ["out"], ["u"])
    cand = exponential(sigma3, sigma_out)
    rec_exp = exponential(empty_cds(), record)

    A = _schedule(B2, B, ["b", "a"], "tt", "A")
    A_prime = _schedule(B2, B, ["a", "b"], "tt", "A'")
    A3 = _schedule(B3, B, ["b", "a"], "tt", "A3")
    A3_prime = _schedule(B3, B, ["a", "b"], "tt", "A3'")
    not_alg = _alg(
        B,
        B,
        [
            (FunCell(empty_state(B), "out"), Valof("out")),
            (FunCell(state_of(B, {"out": "tt"}), "out"), Output("ff")),
            (FunCell(state_of(B, {"out": "ff"}), "out"), Output("tt")),
        ],
        "not",
    )

    tt = state_of(B, {"out": "tt"})
    ff = state_of(B, {"out": "ff"})

    and_table = make_table(
        B2, B, {state_of(B2, {"a": "tt", "b": "tt"}): tt}, name="and", default_empty=True
    )

    por_rows = {
        state_of(B2, {"a": "tt"}): tt,
        state_of(B2, {"b": "tt"}): tt,
        state_of(B2, {"a": "tt", "b": "tt"}): tt,
        state_of(B2, {"a": "tt", "b": "ff"}): tt,
        state_of(B2, {"a": "ff", "b": "tt"}): tt,
        state_of(B2, {"a": "ff", "b": "ff"}): ff,
    }
    por_table = make_table(B2, B, por_rows, name="por", default_empty=True)
    por_bottom_table = make_table(
        B2,
        B,
        {state_of(B2, {"a": "tt"}): tt, state_of(B2, {"b": "tt"}): tt},
        name="por_bottom",
        default_empty=True,
    )

    # Gustave patterns, pairwise incompatible, closed upward to keep the table monotone
    patterns = [{"a": "tt", "b": "ff"}, {"a": "ff", "c": "tt"}, {"b": "tt", "c": "ff"}]
    bk_rows: dict[State, State] = {}
    for pat in patterns:
        bk_rows[state_of(B3, pat)] = tt
        missing = next(c for c in ("a", "b", "c") if c not in pat)
        for v in ("tt", "ff"):
            bk_rows[state_of(B3, {**pat, missing: v})] = tt
    bk_table = make_table(B3, B, bk_rows, name="bk", default_empty=True)

    T2 = first_move_taster(sigma3, sigma_out, "out", Valof("2.in"), name="T2")
    has_year = presence_taster(record, "year")
    has_price = presence_taster(record, "price")
    has_colour = presence_taster(record, "colour")

    needs_second = make_behaviour(cand, [T2], name="needs_second")
    rec_yp = make_behaviour(rec_exp, [has_year, has_price], name="rec_yp")
    rec_ypc = make_behaviour(rec_exp, [has_year, has_price, has_colour], name="rec_ypc")

    return Fixtures(
        B=B, B2=B2, B3=B3, o=o, oo=oo, O=O, chain=chain, record=record,
        sigma=sigma, sigma3=sigma3, sigma_out=sigma_out, cand=cand, rec_exp=rec_exp,
        A=A, A_prime=A_prime, A3=A3, A3_prime=A3_prime, not_alg=not_alg,
        and_table=and_table, por_table=por_table, por_bottom_table=por_bottom_table,
        bk_table=bk_table, T2=T2, has_year=has_year, has_price=has_price,
        has_colour=has_colour, needs_second=needs_second, rec_yp=rec_yp, rec_ypc=rec_ypc,
    )


def boolean_iso() -> dict[State, SeqAlg]:
    """The three boolean states matched with the three one-question strategies.

    Bottom is the silent strategy; true asks the first argument, false
    the second (the selector reading of the two projections).
    """
    fx = fixtures()
    start = FunCell(empty_state(fx.oo), "?")
    bottom = validate_algorithm(fx.oo, fx.o, [], name="bot")
    true_alg = validate_algorithm(fx.oo, fx.o, [(start, Valof("1.?"))], name="true")
    false_alg = validate_algorithm(fx.oo, fx.o, [(start, Valof("2.?"))], name="false")
    return {
        empty_state(fx.B): bottom,
        state_of(fx.B, {"out": "tt"}): true_alg,
        state_of(fx.B, {"out": "ff"}): false_alg,
    }


def fixture_dir() -> Path:
    """The shipped definition files (repo checkout layout)."""
    return Path(__file__).resolve().parents[2] / "fixtures"
