"""ontolab: a numerical laboratory for discrete ontological models of qubits.

Build models (epistemic states over a finite ontic space plus response
functions), audit them against the Born rule, measure their degree of
epistemicity, classify joint ontic states of two-qubit systems, and verify
that reproducing Bell-inequality violations caps the epistemic overlap.
"""

from .cloning import (
    ChshBudget,
    CloneInputRegion,
    CloneOutputRegion,
    CloneRouting,
    CloneSimReport,
    Feasibility,
    bound_sweep,
    budget_from_model,
    clone_sim,
    feasible,
    max_chsh,
    min_nonlocal_mass,
    ontic_clone_map,
    sweep_to_csv,
)
from .epistemic import (
    BoundCheck,
    EpistemicityReport,
    PairOverlap,
    check_general_bound,
    check_symmetric_bound,
    compute_report,
    general_bound_rhs,
    nonorthogonal_pairs,
    omega,
    ontic_overlap,
    quantum_overlap_of,
    symmetric_bound_value,
)
from .errors import (
    ConsistencyError,
    DimensionError,
    FormatError,
    InfeasibleError,
    OntolabError,
    OrderingError,
    OrthogonalPairError,
    TooLargeError,
    UnboundedError,
    UndecidableError,
)
from .library import (
    data_dir,
    ks_qubit_model,
    list_reference_data,
    load_reference_model,
    load_reference_table,
    psi_complete_model,
    reference_tables,
    threshold_qubit_model,
    write_reference_data,
)
from .models import (
    EpistemicState,
    ModelMeasurement,
    OnticSpace,
    OntologicalModel,
    Preparation,
    ResponseFunction,
    Sector,
    TransitionMatrix,
    ValidationRecord,
    ValidationReport,
    is_maximally_epistemic,
    is_outcome_deterministic,
    is_reciprocal,
    load_model,
    model_from_json,
    model_to_json,
    reciprocity_matches,
    save_model,
    support,
    validate,
    xi_core,
    xi_support,
)
from .quantum import (
    ALGEBRAIC_BOUND,
    CHSH_ZX_SETTING,
    KET_MINUS,
    KET_ONE,
    KET_PLUS,
    KET_ZERO,
    LOCAL_BOUND,
    PHI_PLUS,
    TSIRELSON_BOUND,
    X_MEASUREMENT,
    Z_MEASUREMENT,
    ChshSetting,
    ProjectiveMeasurement,
    QuantumState,
    bloch_observable,
    bloch_vector,
    born_distribution,
    born_probability,
    chsh_expectation,
    chsh_operator,
    chsh_optimal_value,
    clone_output,
    correlation_matrix,
    ket,
    measurement_from_bloch,
    quantum_overlap,
    schmidt_pair_state,
    state_from_bloch,
)
from .search import (
    brute_force_overlap,
    chsh_monte_carlo,
    grid_search_overlap_with_chsh,
    max_overlap_lp,
    max_overlap_with_chsh,
)
from .simplex import LpSolution, lexicographically_smallest_optimum, solve_lp
from .tables import (
    AssignmentTable,
    OnticType,
    OnticTypeTag,
    PiReport,
    PiWitness,
    PostMeasurementConstraint,
    Prop1Verdict,
    SettingGrid,
    TemporalOrder,
    check_outcome_independence,
    check_parameter_independence,
    classify,
    evolve_local_measurement,
    load_table,
    marginal_table,
    proposition1_check,
    save_table,
    table_from_json,
    table_to_json,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
