"""Quantum-noise simulation and spectrum fitting for a squeezed-light
Twin-Signal-Recycling Michelson interferometer."""

from .errors import (
    DegenerateError,
    InvalidParameterError,
    IsotropicError,
    NoDoubletError,
    NonPassiveError,
    NoPeaksError,
    TsrError,
    UnidentifiableError,
)
from .fitting import DetuningSeed, FitProblem, FitResult, fit, seed_detunings_from_peaks
from .operating_point import (
    DoubletReport,
    OperatingPoint,
    antiresonance_op,
    find_doublet,
    find_optimum_op,
)
from .optics import (
    C_LIGHT,
    MirrorSpec,
    SpaceSpec,
    TsrModel,
    amplitude_coeffs,
    cavity_reflection,
    michelson_effective_mirror,
    as_built_model,
    prc_sanity,
    tsr_reflection,
)
from .quadrature import (
    SpectrumSeries,
    apply_efficiency,
    ellipse_rotation,
    homodyne_spectrum,
    noise_spectrum,
    propagate,
    quad_transfer,
    squeezed_covariance,
)

__version__ = "0.1.0"
