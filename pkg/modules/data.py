"""Numerical defaults, output format and the spanning trees of small channel graphs."""

"""These constants bound the validation of operators and density matrices."""

HERMITICITY_TOLERANCE = 1e-12
"""Largest entrywise |ρ − ρ†| accepted for a density matrix."""
TRACE_TOLERANCE = 1e-10
"""Largest |Tr ρ − 1| accepted for a density matrix."""
POSITIVITY_TOLERANCE = 1e-9
"""Most negative eigenvalue accepted for a density matrix (as a magnitude)."""
EVOLVE_POSITIVITY_TOLERANCE = 1e-7
"""Eigenvalue floor (as a magnitude) accepted for integrated states."""
POPULATION_TOLERANCE = 1e-10
"""Largest |Σp − 1| accepted for a population vector or a population pair."""
MAX_DIMENSION = 1024
"""Largest composite Hilbert-space dimension handled with dense matrices."""
MAX_FULL_SUPEROPERATOR_DIMENSION = 48
"""Largest Hilbert-space dimension whose superoperator may be kept over the whole d² operator space."""
ENERGY_TOLERANCE = 1e-9
"""Two free energies closer than this are degenerate; also the gap-consistency tolerance."""

"""These constants steer the steady-state solvers."""

CONDITION_LIMIT = 1e12
"""Row-replaced effRME generators above this condition number are treated as singular."""
NULLSPACE_GAP = 1e-8
"""A second singular value below this fraction of the spectral norm signals a non-unique steady state."""
COFACTOR_MAX_LEVELS = 5
"""Largest level count solved by explicit cofactor expansion."""

"""These constants steer time integration."""

DEFAULT_RTOL = 1e-9
"""Relative tolerance of the adaptive Runge–Kutta integrator."""
DEFAULT_ATOL = 1e-12
"""Absolute tolerance of the adaptive Runge–Kutta integrator."""
TRACE_DRIFT_TOLERANCE = 1e-7
"""Trace drift beyond which an integration is reported."""

"""These constants steer the effective-rate fits."""

DEFAULT_HORIZON = 10.0
"""Evolution time used by the transient fit residual."""
MAX_EVALUATIONS = 2000
"""Residual evaluations allowed per fit (both Nelder–Mead runs together)."""
SIMPLEX_TOLERANCE = 1e-6
"""Simplex diameter (in log-rate space) at which Nelder–Mead stops."""
RESIDUAL_TOLERANCE = 1e-14
"""Residual spread across the simplex at which Nelder–Mead stops."""
SIMPLEX_SPREAD = 0.1
"""Edge length (in log-rate space) of the initial Nelder–Mead simplex."""
RESTART_SPREAD = 0.05
"""Edge length of the perturbed simplex used for the single restart."""

"""These constants fix the output format."""

CSV_FLOAT_FORMAT = "%.12g"
"""Twelve significant digits, `.` decimal separator."""
CSV_LINE_TERMINATOR = "\r\n"
"""RFC-4180 record separator."""
LOG_ENV_VAR = "VQTHERMO_LOG"
"""Environment variable naming the log level of the command-line frontend."""

# Target pairs carrying the A/B/C machines of the qutrit model.
PAIR_A = (0, 1)
PAIR_B = (0, 2)
PAIR_C = (1, 2)
FIT_PAIRS = (PAIR_A, PAIR_B, PAIR_C)

# The sixteen spanning trees of the complete graph on four levels, in the order of the closed-form
# four-level steady state. Each tree is three level pairs.
FOUR_LEVEL_TREES = (
    ((0, 3), (1, 3), (2, 3)),
    ((0, 3), (1, 3), (0, 2)),
    ((0, 3), (1, 3), (1, 2)),
    ((0, 3), (2, 3), (0, 1)),
    ((0, 3), (2, 3), (1, 2)),
    ((1, 3), (2, 3), (0, 1)),
    ((1, 3), (2, 3), (0, 2)),
    ((0, 3), (0, 1), (0, 2)),
    ((0, 3), (0, 1), (1, 2)),
    ((0, 3), (0, 2), (1, 2)),
    ((1, 3), (0, 1), (0, 2)),
    ((1, 3), (0, 1), (1, 2)),
    ((1, 3), (0, 2), (1, 2)),
    ((2, 3), (0, 1), (0, 2)),
    ((2, 3), (0, 1), (1, 2)),
    ((2, 3), (0, 2), (1, 2)),
)

# The three spanning trees of the complete graph on three levels, weighted by q_A q_B, q_B q_C, q_C q_A.
THREE_LEVEL_TREES = (
    (PAIR_A, PAIR_B),
    (PAIR_B, PAIR_C),
    (PAIR_C, PAIR_A),
)
