"""Quantum metrology of the Unruh temperature with a pair of Unruh-DeWitt detectors."""

from .entanglement import as_x_state, concurrence, state_concurrence, wootters_concurrence
from .errors import (
    CouplingOutOfRange,
    DegenerateTemperature,
    InvalidDensityMatrix,
    InvalidParameter,
    InvalidPovm,
    MetrologyError,
    NotHermitian,
    NotXState,
    StepTooLarge,
)
from .estimation import (
    CramerRaoBound,
    FisherReport,
    Povm,
    classical_fi,
    cramer_rao,
    fisher_report,
    optimal_povm,
    qfi_closed,
    qfi_fidelity_oracle,
    qfi_sld,
    random_projective_povm,
)
from .explore import AxisSpec, OptimumReport, SweepRecord, figure_data, maximize, sweep
from .model import (
    Acceleration,
    DensityMatrix4,
    DirectNu,
    ModelParams,
    Physical,
    StateCoefficients,
    Temperature,
    effective_coupling,
    evolved_state,
    probe_state,
    state_coefficients,
    to_acceleration,
    unruh_temperature,
)
from .spectral import SpectralData, model_spectrum, numeric_eigensystem, sld, state_derivative

__version__ = "0.1.0"
