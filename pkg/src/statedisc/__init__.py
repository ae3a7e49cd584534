"""Adaptive local measurement strategies for discriminating tensor-product states."""

from .bounds import (
    BoundReport,
    corollary1_bound,
    joint_helstrom_success,
    lemma1_depolarized,
    problem_joint_success,
    theorem1,
)
from .dp import (
    RiskTables,
    brute_force_risk,
    build_risk_tables,
    build_risk_tables_multi,
    evaluate,
    load_tables,
    next_action,
    save_tables,
    simulate_episode,
)
from .errors import (
    ImpossibleObservationError,
    ParameterError,
    PolicyFormatError,
    ResourceError,
    StalePolicyError,
    StateDiscError,
)
from .experiments import ExperimentConfig, FigureRecord, emit_csv, read_csv, run_experiment
from .greedy import StrategyEvaluation, plateau_bound, run_lg, run_mlg
from .measurements import (
    ActionSpace,
    ProjectiveMeasurement,
    helstrom,
    modified_helstrom,
    qubit_action_space,
    qutrit_action_spaces,
)
from .problem import DiscriminationProblem, load_problem, problem_from_dict
from .quantum import depolarize, pure_qubit, pure_qutrit, tensor

__version__ = "0.1.0"
