"""Linear control systems on Lie groups: algebra, dynamics and stability."""

from .algebra import (
    AlgebraError,
    LieAlgebra,
    Subspace,
    ad,
    algebra_from_json,
    bracket,
    center,
    check_jacobi,
    is_compact_type,
    is_derivation,
    killing_form,
    load_algebra,
    smallest_invariant_subalgebra,
)
from .groups import ChartError, MatrixGroup, NilpotentGroup, SemidirectGroup
from .jordan import (
    ClusteringError,
    JordanDecomposition,
    NumericalError,
    classify_operator,
    contraction_constants,
    dynamical_split,
    jordan_decompose,
    verify_grading,
)
from .kernels import BACKEND
from .model import ControlSignal, LCSSpec, SpecError, drift_flow, larc_check
from .simulator import (
    boundedness_probe,
    cocycle_check,
    estimate_control_set,
    integrate,
    reach_sample,
    stable_manifold_probe,
    theorem_main_bound,
)
from .stability import (
    HomomorphismSpec,
    StabilityReport,
    bibo_simulation_crosscheck,
    build_adapted_metric,
    check_conjugation,
    classify_bibo,
    classify_internal,
    fixed_and_recurrent_predicates,
    restricted_ellipticity,
)

__version__ = "0.1.0"
