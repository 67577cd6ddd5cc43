"""Measurement-feedback photon-counting solver for polynomial optimization
over non-negative variables under a fixed sum constraint."""

from .polynomial import (
    Monomial,
    PolynomialProgram,
    add_slack,
    build_program,
    evaluate,
    evaluate_many,
    gradient,
    load_program,
    save_program,
    shift_variables,
)
from .dynamics import (
    FeedbackSchedule,
    SolverResult,
    SolverState,
    get_preset,
    make_schedule,
    solve,
)
from .encoders import (
    CutAssignment,
    Graph,
    PottsEncoding,
    cut_size,
    decode,
    encode_max_k_cut,
    load_graph,
    one_hot,
    random_graph,
    save_graph,
)
from .baselines import (
    GdConfig,
    brute_force_cut,
    brute_force_grid,
    local_search_cut,
    project_simplex,
    projected_gradient_descent,
)
from .imaginary_time import (
    DiscretizedEnsemble,
    enumerate_states,
    evolve,
    expected_energy,
    ground_states,
    make_ensemble,
)
from .harness import (
    BatchSummary,
    RunSpec,
    SweepResult,
    emit_summary,
    emit_sweep,
    emit_trace,
    generate_nonconvex_qp,
    parse_summary,
    run_batch,
    sweep_mu_fluctuation,
)
from .errors import DegenerateStateError, ParseError, SearchSpaceError

__version__ = "0.1.0"
