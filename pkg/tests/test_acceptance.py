"""Acceptance criteria, one test per criterion, each printing a verdict line.

Run with `pytest tests/test_acceptance.py -v -s` to see the verdicts.
Every expected value here is exact; time limits are wall-clock.
"""

import time
from contextlib import contextmanager

from hypothesis import given, settings
from hypothesis import strategies as st

from cdslab import (
    AlgorithmArg,
    ErrOutcome,
    FunCell,
    Output,
    Session,
    StaticState,
    StuckOutcome,
    Valof,
    apply,
    boolean_iso,
    cds_equal,
    check_state,
    compose,
    empty_state,
    enumerate_algorithms,
    enumerate_states,
    first_move_taster,
    fun_of,
    identity_algorithm,
    is_monotone,
    is_stable,
    lift_err,
    make_behaviour,
    member,
    sequential_realizers,
    state_violations,
)
from cdslab.interaction import AnswerMove, ValofMove, is_player_move
from cdslab.cds import ERR

from conftest import GOLDEN_DIR


@contextmanager
def criterion(name: str, seconds: float):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"FAIL {name}")
        raise
    elapsed = time.perf_counter() - start
    if elapsed > seconds:
        print(f"FAIL {name} (took {elapsed:.2f}s > {seconds}s)")
        raise AssertionError(f"{name}: exceeded {seconds}s ({elapsed:.2f}s)")
    print(f"PASS {name} ({elapsed:.2f}s)")


def test_three_strategy_enumeration(fx):
    with criterion("three-strategy enumeration + boolean isomorphism", 1.0):
        algs = enumerate_algorithms(fx.oo, fx.o)
        start = FunCell(empty_state(fx.oo), "?")
        assert [a.state.events for a in algs] == [
            frozenset(),
            frozenset({(start, Valof("1.?"))}),
            frozenset({(start, Valof("2.?"))}),
        ]
        iso = boolean_iso()
        assert set(iso.keys()) == set(enumerate_states(fx.B))
        images = {alg.state.events for alg in iso.values()}
        assert len(images) == 3
        assert images == {a.state.events for a in algs}


def test_error_semantics_separation(fx):
    with criterion("error-semantics separation A vs A'", 1.0):
        probe = StaticState(check_state(lift_err(fx.B2), [("a", "err")]))
        outcome_a, _ = apply(fx.A, probe, "out")
        outcome_ap, _ = apply(fx.A_prime, probe, "out")
        assert outcome_a == StuckOutcome()
        assert outcome_ap == ErrOutcome()
        rows_a, rows_ap = fun_of(fx.A), fun_of(fx.A_prime)
        assert len(rows_a) == 9
        assert rows_a == rows_ap


def test_berry_hierarchy_reproduction(fx):
    with criterion("Berry hierarchy: por / BK / and-table", 60.0):
        assert is_monotone(fx.por_table).ok
        assert not is_stable(fx.por_table).ok
        assert sequential_realizers(fx.por_table) == []
        assert is_stable(fx.bk_table).ok
        assert sequential_realizers(fx.bk_table) == []
        realizers = sequential_realizers(fx.and_table)
        assert fx.A in realizers and fx.A_prime in realizers
        assert fx.A.state.events != fx.A_prime.state.events


def test_taster_behaviour_law(fx):
    with criterion("taster law: member({T2}) == err-probe", 5.0):
        probe = check_state(lift_err(fx.sigma3), [("2.in", "err")])
        for s in enumerate_algorithms(fx.sigma3, fx.sigma_out):
            via_taster = member(fx.needs_second, s)
            outcome, _ = apply(s, StaticState(probe), "out")
            assert via_taster == isinstance(outcome, ErrOutcome)


def _taster_pool(fx):
    pool = [
        first_move_taster(fx.sigma3, fx.sigma_out, "out", Valof(f"{i}.in"), name=f"T{i}")
        for i in (1, 2, 3)
    ]
    pool.append(first_move_taster(fx.sigma3, fx.sigma_out, "out", Output("u"), name="Tout"))
    return pool


def test_behaviour_algebra_properties(fx):
    with criterion("behaviour algebra: antitone + intersection, 1000 cases", 120.0):
        pool = _taster_pool(fx)
        candidates = enumerate_algorithms(fx.sigma3, fx.sigma_out)

        @settings(max_examples=1000, deadline=None)
        @given(st.data())
        def run(data):
            xs = data.draw(st.frozensets(st.sampled_from(pool)))
            extra = data.draw(st.frozensets(st.sampled_from(pool)))
            ys = xs | extra
            s = data.draw(st.sampled_from(candidates))
            bx, by = make_behaviour(fx.cand, xs), make_behaviour(fx.cand, ys)
            union = make_behaviour(fx.cand, xs | ys)
            in_x, in_y = member(bx, s), member(by, s)
            if in_y:
                assert in_x  # antitone: growing the test set shrinks the member set
            assert member(union, s) == (in_x and in_y)

        run()


def _alternating(trace):
    for i, m in enumerate(trace.moves):
        if is_player_move(m) != (i % 2 == 0):
            return False
        if isinstance(m, ValofMove) and i + 1 < len(trace.moves):
            if not isinstance(trace.moves[i + 1], AnswerMove):
                return False
    return True


def test_engine_invariants_suite(fx):
    with criterion("engine invariants: traces, tables, err, determinism, compose", 30.0):
        pool = []
        for alg in (fx.A, fx.A_prime, fx.not_alg, identity_algorithm(fx.B2)):
            for x in enumerate_states(lift_err(alg.from_cds)):
                for cell in alg.to_cds.sorted_cells():
                    pool.append((alg, StaticState(x), cell))
        for cand in enumerate_algorithms(fx.sigma3, fx.sigma_out):
            pool.append((fx.T2, AlgorithmArg(cand), "ans"))

        for alg, argument, cell in pool:
            session = Session(alg, argument)
            trace = session.request(cell, verbose=True)
            assert _alternating(trace)
            # one table event per answered query round
            rounds = sum(1 for m in trace.moves if isinstance(m, AnswerMove) and m.value != ERR)
            assert len(session.table_state()) == rounds
            for snap in trace.tables:
                assert not state_violations(alg.from_cds, snap.events)
            for before, after in zip(trace.tables, trace.tables[1:]):
                assert before < after and len(after) == len(before) + 1
            # err short-circuit: an err answer is final
            if any(isinstance(m, AnswerMove) and m.value == ERR for m in trace.moves):
                assert isinstance(trace.moves[-1], AnswerMove) and trace.moves[-1].value == ERR
                assert trace.outcome == ErrOutcome()
            # determinism, bit for bit
            o2, t2 = apply(alg, argument, cell)
            assert (o2, t2.text()) == (trace.outcome, trace.text())

        # monotone function parts
        for alg in (fx.A, fx.A_prime, fx.not_alg, identity_algorithm(fx.B2)):
            rows = fun_of(alg)
            for x in rows:
                for y in rows:
                    if x <= y:
                        assert rows[x] <= rows[y]

        # compose is extensionally composition, for every composable fixture pair
        algs = [fx.A, fx.A_prime, fx.not_alg, identity_algorithm(fx.B), identity_algorithm(fx.B2)]
        pairs = [(f, g) for f in algs for g in algs if cds_equal(f.to_cds, g.from_cds)]
        assert pairs
        for f, g in pairs:
            fr, gr, hr = fun_of(f), fun_of(g), fun_of(compose(f, g))
            for x in fr:
                assert hr[x] == gr[fr[x]]


def test_format_round_trips(workspace):
    with criterion("format round-trips: definitions and trace goldens", 10.0):
        from cdslab.parser import Workspace, parse_definitions, print_workspace

        text1 = print_workspace(workspace)
        ws2 = Workspace()
        assert not parse_definitions(text1, ws2).errors
        assert print_workspace(ws2) == text1

        fx_b2 = workspace.cds["B2"]
        a = workspace.algs["A"]
        golden = {
            "a_tt_tt.trace": "{a=tt,b=tt}",
            "a_err_bottom.trace": "{a=err}",
        }
        from cdslab.parser import parse_state_literal

        for fname, literal in golden.items():
            state = parse_state_literal(literal, lift_err(fx_b2))
            trace = Session(a, StaticState(state)).request("out")
            assert trace.text() == (GOLDEN_DIR / fname).read_text()
        ap = workspace.algs["A'"]
        state = parse_state_literal("{a=err}", lift_err(fx_b2))
        trace = Session(ap, StaticState(state)).request("out")
        assert trace.text() == (GOLDEN_DIR / "aprime_err_bottom.trace").read_text()
