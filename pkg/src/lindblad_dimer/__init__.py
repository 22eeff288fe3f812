"""Trapping of excitations in a dephasing dimer: Lindblad dynamics,
survival probabilities, lifetimes and the optimal dephasing rate."""

__version__ = "0.1.0"

from .analytic import closed_form_context, pi_delta0, pi_lambda0, pi_weak_coupling
from .errors import (
    DegeneracyError,
    LindbladDimerError,
    NoCrossingError,
    OverdampedWarning,
    SingularSystemError,
    SpectralDecompositionError,
    StepSizeError,
)
from .lifetimes import (
    LambdaOptimum,
    LifetimeRecord,
    ScanGrid,
    crossing_time,
    golden_section,
    grid_scan,
    lifetimes,
    optimal_lambda,
    piecewise_exponential_check,
)
from .liouville import (
    Liouvillian,
    LiouvillianSpectrum,
    SurvivalCurve,
    Trajectory,
    build_liouvillian,
    evolve_ode,
    evolve_spectral,
    mean_first_passage,
    ring_with_central_trap,
    spectral_decompose,
    survival_curve,
    survival_probability,
    tau_infinity,
)
from .model import (
    DensityMatrix,
    DimerEigensystem,
    DimerParams,
    NetworkSpec,
    dimer_eigensystem,
    dimer_hamiltonian,
    make_dimer,
    verify_biorthonormality,
)
