"""cdslab: an interpreter and analysis workbench for concrete data structures
and sequential algorithms."""

from .cds import (
    BudgetExceeded,
    Cds,
    CdslabError,
    DefinitionError,
    ERR,
    EngineError,
    INITIAL,
    InvalidState,
    State,
    Violation,
    accessible_cells,
    cds_equal,
    check_state,
    empty_state,
    enumerate_states,
    lift_err,
    make_cds,
    product,
    project_state,
    state_violations,
)
from .seqalg import (
    FunCell,
    Output,
    SeqAlg,
    Valof,
    enumerate_algorithms,
    exponential,
    exponential_parts,
    identity_algorithm,
    validate_algorithm,
)
from .interaction import (
    AlgorithmArg,
    ManualOracle,
    ErrOutcome,
    Outcome,
    Session,
    StaticState,
    StuckOutcome,
    Trace,
    ValueOutcome,
    apply,
    compose,
    fun_of,
    open_session,
)
from .analysis import (
    FunTable,
    is_monotone,
    is_stable,
    make_table,
    sequential_realizers,
    table_of,
)
from .behaviours import (
    Behaviour,
    constant_algorithm,
    first_move_taster,
    make_behaviour,
    member,
    member_set,
    observation_cds,
    orthogonal,
    presence_taster,
    subtype,
)
from .fixtures import boolean_iso, chain_cds, fixtures, flat_cds, game_o

__all__ = [name for name in dir() if not name.startswith("_")]
