"""Approximate potentials and improvement dynamics for weighted congestion games."""

from .dynamics import (
    BEST_RESPONSE,
    MAX_GAIN,
    ROUND_ROBIN,
    Move,
    MoveTrace,
    Policy,
    Scheduler,
    converge_from_optimum,
    improving_moves,
    is_equilibrium,
    run_dynamics,
)
from .errors import (
    CapacityError,
    DomainError,
    GeneratorError,
    InfeasiblePlayerError,
    InvalidReferenceError,
    InvariantViolation,
    NumericError,
    ParseError,
    WcgError,
)
from .game import (
    GameInstance,
    LoadProfile,
    Player,
    Resource,
    State,
    latency,
    load_profile,
    player_cost,
    social_cost,
    tau_congestedness,
)
from .instances import (
    NetworkGameSpec,
    compile_network_game,
    generate_random,
    generate_tau_congested,
    parse_instance,
    serialize,
)
from .oracle import (
    OracleReport,
    enumerate_states,
    equilibrium_set,
    exact_optima,
    exact_pos,
    find_improvement_cycle,
    oracle_report,
    verify_potential_on_graph,
)
from .potential import (
    GammaProfile,
    RatioCertificate,
    certify_potential,
    guaranteed_factor,
    local_ratio,
    potential_value,
    reduced_ratio,
    resource_potential,
)
from .rho import RhoResult, rho_bound, rho_bound_tau

__version__ = "0.1.0"
