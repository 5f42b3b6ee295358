"""bectomo: tomographic reconstruction of two-mode condensate states
from atom-counting statistics.

Two measurement schemes are covered: full spin tomography of a fixed-N
two-mode state from beam-splitter count-difference marginals, and
reconstruction of a single-mode (open-N) state from phase-scanned
displaced-number statistics with imperfect counters.  Forward simulation,
inversion, quasiprobability rendering, persistence, and a config-driven
batch runner share one set of conventions defined in the module
docstrings.
"""

from .states import (
    DensityMatrix,
    FockVector,
    SpinVector,
    atomic_coherent_amplitudes,
    coherent_coefficients,
    density_from_vector,
    fock_state,
    mean_occupation,
    squeezed_coefficients,
    two_mode_spin_squeezed,
)
from .forward import (
    PhaseScanSet,
    RotationSetting,
    SpinMarginalSet,
    displaced_number_exact,
    efficiency_convolve,
    phase_averaged_distribution,
    sample_counts,
    scan_phase,
    scan_spin,
    spin_marginal_exact,
)
from .spin_tomo import GridTooCoarseError, QuadratureGrid, condition_report, reconstruct_spin
from .dn_tomo import (
    ConditioningError,
    DataInconsistencyError,
    DegenerateDesignError,
    DesignMatrixFamily,
    InsufficientPhasePointsError,
    beta_tradeoff_report,
    build_design,
    fourier_coefficients,
    reconstruct_fock,
    select_n1,
)
from .quasiprob import QuasiprobGrid, fidelity, q_plane, q_sphere, wigner_plane
from .runner import RunConfig, load_config, run, validate

__version__ = "0.1.0"

__all__ = [
    "DensityMatrix", "FockVector", "SpinVector",
    "atomic_coherent_amplitudes", "coherent_coefficients",
    "density_from_vector", "fock_state", "mean_occupation",
    "squeezed_coefficients", "two_mode_spin_squeezed",
    "PhaseScanSet", "RotationSetting", "SpinMarginalSet",
    "displaced_number_exact", "efficiency_convolve",
    "phase_averaged_distribution", "sample_counts", "scan_phase",
    "scan_spin", "spin_marginal_exact",
    "GridTooCoarseError", "QuadratureGrid", "condition_report",
    "reconstruct_spin",
    "ConditioningError", "DataInconsistencyError", "DegenerateDesignError",
    "DesignMatrixFamily", "InsufficientPhasePointsError",
    "beta_tradeoff_report", "build_design", "fourier_coefficients",
    "reconstruct_fock", "select_n1",
    "QuasiprobGrid", "fidelity", "q_plane", "q_sphere", "wigner_plane",
    "RunConfig", "load_config", "run", "validate",
]
