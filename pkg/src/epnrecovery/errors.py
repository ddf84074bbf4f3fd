"""Exception hierarchy."""


class RecoveryError(Exception):
    """Base class for all package errors."""


class ModelDefinitionError(RecoveryError, ValueError):
    """Malformed model (empty retailer list, bad invariants, dangling ids)."""


class NumericRangeError(RecoveryError, ArithmeticError):
    """A computation left the finite floating-point range."""


class ModelConsistencyError(RecoveryError, ValueError):
    """Model data are individually valid but mutually inconsistent,
    e.g. fragility curves that cross at the evaluated intensity."""


class ConfigurationError(RecoveryError, ValueError):
    """Scenario configuration is missing entries or fails schema checks."""


class CombinatorialBudgetError(RecoveryError):
    """Action enumeration would exceed the caller's budget."""


class OracleUnavailableError(RecoveryError):
    """Exact DP state space exceeds its budget."""


class ContractViolation(RecoveryError, ValueError):
    """An action is not valid for the state it is applied to."""


class DegenerateTrajectoryError(RecoveryError, ValueError):
    """Objective undefined for a trajectory with zero makespan."""


class ExperimentError(RecoveryError):
    """A scenario inside an experiment failed; carries replay information."""

    def __init__(self, message: str, scenario_index: int, seed: int):
        super().__init__(f"{message} (scenario {scenario_index}, seed {seed})")
        self.scenario_index = scenario_index
        self.seed = seed
