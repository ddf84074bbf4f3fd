"""Post-earthquake power-network repair scheduling with rollout and exact DP."""
from .community import (
    CommunityModel,
    GravityModel,
    GridCell,
    Retailer,
    expected_assignment_matrix,
    retailer_assignment_probs,
)
from .config import ScenarioConfig, load_config, sample_damage, validate_config
from .epn import Component, PowerNetwork, component_importance, energized_load_points
from .errors import (
    CombinatorialBudgetError,
    ConfigurationError,
    ContractViolation,
    DegenerateTrajectoryError,
    ExperimentError,
    ModelConsistencyError,
    ModelDefinitionError,
    NumericRangeError,
    OracleUnavailableError,
    RecoveryError,
)
from .fragility import (
    DamageScenario,
    DamageState,
    FragilitySet,
    RestorationTable,
    prob_exceed,
    sample_damage_state,
    sample_scenario,
)
from .harness import (
    ExperimentSpec,
    cumulative_moving_average,
    emit_outputs,
    run_experiment,
)
from .hazard import AttenuationModel, EventSpec, IMField, median_pga, sample_im_field
from .policies import (
    ExactDP,
    RandomBase,
    Rollout,
    SmartBase,
    exact_dp,
    parse_policy,
    rollout_action,
)
from .recovery import (
    RecoveryProblem,
    RecoveryState,
    RepairAction,
    Trajectory,
    Unreached,
    advance,
    benefit,
    enumerate_actions,
    objective1,
    objective2,
    simulate_policy,
)

__version__ = "0.1.0"

__all__ = [
    "AttenuationModel",
    "CombinatorialBudgetError",
    "CommunityModel",
    "Component",
    "ConfigurationError",
    "ContractViolation",
    "DamageScenario",
    "DamageState",
    "DegenerateTrajectoryError",
    "EventSpec",
    "ExactDP",
    "ExperimentError",
    "ExperimentSpec",
    "FragilitySet",
    "GravityModel",
    "GridCell",
    "IMField",
    "ModelConsistencyError",
    "ModelDefinitionError",
    "NumericRangeError",
    "OracleUnavailableError",
    "PowerNetwork",
    "RandomBase",
    "RecoveryError",
    "RecoveryProblem",
    "RecoveryState",
    "RepairAction",
    "RestorationTable",
    "Retailer",
    "Rollout",
    "ScenarioConfig",
    "SmartBase",
    "Trajectory",
    "Unreached",
    "advance",
    "benefit",
    "component_importance",
    "cumulative_moving_average",
    "emit_outputs",
    "energized_load_points",
    "enumerate_actions",
    "exact_dp",
    "expected_assignment_matrix",
    "load_config",
    "median_pga",
    "objective1",
    "objective2",
    "parse_policy",
    "prob_exceed",
    "retailer_assignment_probs",
    "rollout_action",
    "run_experiment",
    "sample_damage",
    "sample_damage_state",
    "sample_im_field",
    "sample_scenario",
    "simulate_policy",
    "validate_config",
]
