"""Social identity and action choice games on networks.

Two-stage model: individuals on a fixed network first pick an identity
(a label carrying status and a prescribed action), then choose actions
under pressure to conform to their identity's prescription and to the
average action of same-identity neighbors.  The package solves the action
stage exactly, analyzes identity equilibria, simulates threshold-driven
identity diffusion, and compares welfare across configurations.
"""

__version__ = "0.1.0"

from .actions import (
    ActionProfile,
    ConformityWeights,
    ValueTable,
    equal_ability_action,
    equal_ability_intrinsic,
    equal_ability_value,
    profile_from_actions,
    solve_actions,
    solve_actions_iterative,
    utility,
    utility_at,
    value_function,
    value_table,
)
from .errors import ConvergenceError, ValidationError
from .graph import (
    IdentityAssignment,
    IdentitySet,
    IdentitySpec,
    Network,
    Population,
    SubgroupView,
    identity_components,
    link_difference,
    same_identity_row_matrix,
    typed_degree,
    typed_degrees,
)
from .identity import (
    CascadeRound,
    CascadeTrace,
    DiffusionReport,
    RelativeCost,
    ThresholdReport,
    all_low_equilibrium_exists,
    best_response_identity,
    best_response_identity_general,
    cascade,
    enumerate_equilibria,
    find_blocking_set,
    full_diffusion_conditions,
    intrinsic_values,
    is_identity_equilibrium,
    is_identity_equilibrium_general,
    relative_cost,
    thresholds,
)
from .scenarios import (
    PolicyReport,
    ScenarioConfig,
    generate,
    policy_solution_check,
    random_regular_edges,
)
from .serialize import Instance, instance_from_dict, instance_to_dict, load_instance
from .welfare import (
    MobilityExampleReport,
    WelfareComparison,
    WelfareReport,
    compare_welfare,
    example1_check,
    example2_check,
    welfare,
)

__all__ = [
    "ActionProfile", "CascadeRound", "CascadeTrace", "ConformityWeights",
    "ConvergenceError", "DiffusionReport", "IdentityAssignment", "IdentitySet",
    "IdentitySpec", "Instance", "MobilityExampleReport", "Network",
    "PolicyReport", "Population", "RelativeCost", "ScenarioConfig",
    "SubgroupView", "ThresholdReport", "ValidationError", "ValueTable",
    "WelfareComparison", "WelfareReport", "all_low_equilibrium_exists",
    "best_response_identity", "best_response_identity_general", "cascade",
    "compare_welfare", "enumerate_equilibria", "equal_ability_action",
    "equal_ability_intrinsic", "equal_ability_value", "example1_check",
    "example2_check", "find_blocking_set", "full_diffusion_conditions",
    "generate", "identity_components", "instance_from_dict",
    "instance_to_dict", "intrinsic_values", "is_identity_equilibrium",
    "is_identity_equilibrium_general", "link_difference", "load_instance",
    "policy_solution_check", "profile_from_actions", "random_regular_edges",
    "relative_cost", "same_identity_row_matrix", "solve_actions",
    "solve_actions_iterative", "thresholds", "typed_degree", "typed_degrees",
    "utility", "utility_at", "value_function", "value_table", "welfare",
]
