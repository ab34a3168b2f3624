"""Monotone / stable / sequential classification."""

import pytest

from cdslab import (
    DefinitionError,
    check_state,
    empty_state,
    enumerate_algorithms,
    enumerate_states,
    fun_of,
    is_monotone,
    is_stable,
    make_table,
    sequential_realizers,
    table_of,
)


def all_tables_b_to_b(fx):
    """Every function table from flat B to flat B (27 of them)."""
    ins = enumerate_states(fx.B)
    outs = enumerate_states(fx.B)
    tables = []
    for v0 in outs:
        for v1 in outs:
            for v2 in outs:
                rows = dict(zip(ins, (v0, v1, v2)))
                tables.append(make_table(fx.B, fx.B, rows))
    return tables


def test_por_is_monotone_not_stable(fx):
    assert is_monotone(fx.por_table).ok
    verdict = is_stable(fx.por_table)
    assert not verdict.ok
    x, y = verdict.witness
    assert {x.events, y.events} == {
        frozenset({("a", "tt")}),
        frozenset({("b", "tt")}),
    }


def test_non_monotone_table_detected(fx):
    tt = check_state(fx.B, [("out", "tt")])
    rows = {empty_state(fx.B2): tt}
    t = make_table(fx.B2, fx.B, rows, default_empty=True)
    verdict = is_monotone(t)
    assert not verdict.ok
    x, y = verdict.witness
    assert x <= y


def test_is_stable_requires_monotone(fx):
    tt = check_state(fx.B, [("out", "tt")])
    t = make_table(fx.B2, fx.B, {empty_state(fx.B2): tt}, default_empty=True)
    with pytest.raises(DefinitionError) as e:
        is_stable(t)
    assert "not-monotone" in e.value.codes()


def test_bk_is_stable_not_sequential(fx):
    assert is_monotone(fx.bk_table).ok
    assert is_stable(fx.bk_table).ok
    assert sequential_realizers(fx.bk_table) == []


def test_por_has_no_realizers_either_completion(fx):
    assert sequential_realizers(fx.por_table) == []
    assert sequential_realizers(fx.por_bottom_table) == []


def test_and_table_realizers_contain_both_schedules(fx):
    realizers = sequential_realizers(fx.and_table)
    assert fx.A in realizers
    assert fx.A_prime in realizers
    assert fx.A.state.events != fx.A_prime.state.events
    assert is_stable(fx.and_table).ok


def test_and_table_realizers_complete_against_brute_force(fx):
    realizers = {r.state.events for r in sequential_realizers(fx.and_table)}
    brute = {
        alg.state.events
        for alg in enumerate_algorithms(fx.B2, fx.B)
        if fun_of(alg) == dict(fx.and_table.rows)
    }
    assert realizers == brute


def test_fun_of_fixture_algorithms_are_monotone(fx):
    for alg in (fx.A, fx.A_prime, fx.not_alg):
        assert is_monotone(table_of(alg)).ok


def test_realizer_soundness_and_hierarchy_on_all_b_to_b_tables(fx):
    """realizable => stable => monotone, and search agrees with brute force."""
    algs = enumerate_algorithms(fx.B, fx.B)
    for t in all_tables_b_to_b(fx):
        realizers = sequential_realizers(t)
        for r in realizers:
            assert fun_of(r) == dict(t.rows)
        brute = {a.state.events for a in algs if fun_of(a) == dict(t.rows)}
        assert {r.state.events for r in realizers} == brute
        mono = is_monotone(t)
        if realizers:
            assert mono.ok
            assert is_stable(t).ok
        if mono.ok and is_stable(t).ok:
            assert mono.ok  # stability was only evaluated on monotone tables


def brute_realizer_sets(t):
    return {
        alg.state.events
        for alg in enumerate_algorithms(t.from_cds, t.to_cds)
        if fun_of(alg) == dict(t.rows)
    }


def test_realizers_complete_on_multi_cell_target(fx):
    """Duplicate one boolean into both coordinates: two output cells."""
    tt = check_state(fx.B, [("out", "tt")])
    ff = check_state(fx.B, [("out", "ff")])
    rows = {
        tt: check_state(fx.B2, [("a", "tt"), ("b", "tt")]),
        ff: check_state(fx.B2, [("a", "ff"), ("b", "ff")]),
    }
    t = make_table(fx.B, fx.B2, rows, default_empty=True)
    realizers = sequential_realizers(t)
    assert realizers
    assert {r.state.events for r in realizers} == brute_realizer_sets(t)


def test_realizers_complete_on_chain_target(fx):
    """The second output cell only opens after the first is answered."""
    tt = check_state(fx.B, [("out", "tt")])
    full = check_state(fx.chain, [("p", "tt"), ("q", "tt")])
    t = make_table(fx.B, fx.chain, {tt: full}, default_empty=True)
    realizers = sequential_realizers(t)
    assert realizers
    assert {r.state.events for r in realizers} == brute_realizer_sets(t)


def test_realizers_complete_on_chain_source(fx):
    """Reading from a dependent input: q is only askable after p."""
    full_in = check_state(fx.chain, [("p", "tt"), ("q", "tt")])
    tt = check_state(fx.B, [("out", "tt")])
    t = make_table(fx.chain, fx.B, {full_in: tt}, default_empty=True)
    realizers = sequential_realizers(t)
    assert realizers
    assert {r.state.events for r in realizers} == brute_realizer_sets(t)


def test_make_table_requires_totality(fx):
    tt = check_state(fx.B, [("out", "tt")])
    with pytest.raises(DefinitionError) as e:
        make_table(fx.B2, fx.B, {empty_state(fx.B2): tt})
    assert "missing-row" in e.value.codes()


def test_table_of_matches_and_table(fx):
    assert table_of(fx.A) == fx.and_table
    assert table_of(fx.A_prime) == fx.and_table


def test_stable_skips_pairs_whose_meet_is_not_a_state(fx):
    """Two enabling routes for one cell: the intersection loses both justifiers."""
    from cdslab import make_cds

    d = make_cds(
        "fork",
        ["p", "q", "r"],
        ["tt"],
        [("p", "tt"), ("q", "tt"), ("r", "tt")],
        {"r": [("p", "tt"), ("q", "tt")]},
    )
    rows = {x: empty_state(fx.B) for x in enumerate_states(d)}
    t = make_table(d, fx.B, rows)
    verdict = is_stable(t)
    assert verdict.ok
    assert verdict.skipped_pairs
    for x, y in verdict.skipped_pairs:
        meet = x.events & y.events
        from cdslab import state_violations

        assert state_violations(d, meet)


def test_realizer_search_budget(fx):
    from cdslab import BudgetExceeded

    with pytest.raises(BudgetExceeded):
        sequential_realizers(fx.and_table, limit=3)


def test_budget_env_override(fx, monkeypatch):
    from cdslab.cds import enumeration_budget

    monkeypatch.setenv("CDSLAB_BUDGET", "17")
    assert enumeration_budget() == 17
    assert enumeration_budget(5) == 5
