"""Window parity and parity-response games: solving, synthesis and verification."""

from .core import (
    P1,
    P2,
    Arena,
    ArenaError,
    Kind,
    Lasso,
    MooreStrategy,
    ObjectiveSpec,
    SpecError,
    StrategyError,
    ValidationReport,
    WinparError,
    outcome,
    unroll,
    validate_arena,
)
from .objectives import check_lasso, good_decomposition, min_sufficient_lambda, preceq, window_close
from .reductions import (
    SolveResult,
    bounded_threshold,
    build_fixpr_counter_product,
    build_fixpr_history_product,
    build_fixwp_product,
    build_rr_instance,
    solve,
    solve_request_response,
)
from .solvers import (
    attractor_set,
    solve_buchi,
    solve_cobuchi,
    solve_genreach,
    solve_parity,
    solve_reachability,
    solve_safety,
)
from .synthesis import extract_strategy, restrict_arena, verify_strategy

__version__ = "0.1.0"
