"""Feedback stabilization workbench for bilinear systems x' = A x + u B x."""

__version__ = "0.1.0"

from .errors import (
    BilinstabError,
    BlowUpError,
    DomainError,
    InsufficientDataError,
    NumericalError,
    StructureError,
    UnknownScenarioError,
    ValidationError,
)
from .spaces import (
    EnergyWave,
    FiniteDim,
    GridL1,
    GridL2,
    GridSup,
    SpectralL2,
    StateVector,
    duality_select,
    norm,
    pairing,
)
from .models import (
    FiniteDimCustom,
    FiniteDimR4,
    HeatDirichletSpectral,
    HeatNeumannSup,
    HeatSpectralProjection,
    TransportL1,
    TransportL2FTS,
    WaveDamped,
    WaveUndamped,
    apply_B,
    b_form,
    build_model,
    kernel_b_projection,
    semigroup_apply,
)
from .feedback import (
    DelayedSwitch,
    FiniteTime,
    FixedTime,
    HomogeneousVr,
    LinearFT,
    NonInvariantFT,
    NormalizedBanach,
    PrescribedTime,
    QuadraticV0,
    Zero,
    control_value,
)
from .integrator import SimOptions, Trajectory, simulate, step
