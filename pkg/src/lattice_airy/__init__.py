"""Airy wavepackets on 1D tight-binding lattices.

Simulates the free, tilted, and periodically driven nearest-neighbour
lattice, extracts sub-lattice peak trajectories, and fits them to the
kinematics of uniform proper acceleration, where the maximum lattice group
velocity 2J plays the role of the speed of light.
"""

__version__ = "0.1.0"

from .errors import (
    AmbiguousPeakError,
    BoundaryBreachError,
    ConfigurationError,
    DivergenceError,
    DomainError,
    FitInstabilityWarning,
    LatticeAiryError,
    TrackingLostError,
)
from .special_functions import EvalRegime, airy_ai, bessel_j0
from .lattice import (
    J,
    V_MAX,
    UNITS,
    LatticeGrid,
    UnitSystem,
    WaveState,
    boundary_occupation,
    brillouin_momenta,
    dispersion,
    fidelity,
    group_velocity,
    load_state,
    momentum_density,
    save_state,
    to_physical_units,
)
from .states import (
    ApertureSpec,
    build_airy_state,
    build_airy_state_fourier,
    build_gaussian_state,
    imprint_phase,
)
from .propagators import (
    DriveSchedule,
    StepperConfig,
    TiltSpec,
    effective_tunneling,
    evolve_free_exact,
    evolve_gauged_exact,
    refractive_index,
    step_crank_nicolson,
)
from .diagnostics import (
    PeakTracker,
    PeakTrajectory,
    center_of_mass,
    differentiate,
    find_main_peak,
    load_trajectory,
    momentum_peak_drift,
    save_trajectory,
    track_peak,
)
from .fitting import (
    RelativisticFit,
    bloch_com_reference,
    fit_hyperbolic,
    fit_parabola,
    fit_scaling,
    predict_relativistic,
)
from .harness import (
    RunArtifact,
    ScenarioConfig,
    default_config,
    run_scenario,
    sweep_scaling,
)
