"""Reconstruct a compact self-adjoint Hankel operator from two interlaced spectra.

Pipeline::

    spectrum --compute_weights--> SpectralMeasure
             --assemble_pair----> OperatorTriple (W, W1, p, R, R1)
             --build_sigma_star-> ContractionData (Sigma*, q)
             --hankel_coefficients-> HankelModel (gamma_0 .. gamma_{L-1})
             --forward_spectrum/round_trip--> VerificationReport
"""

__version__ = "0.1.0"

from .errors import (
    BadDecayParameters,
    ConvergenceFailure,
    DegenerateGap,
    DivisionDegenerate,
    EigenvalueMismatch,
    HankelInverseError,
    InsufficientCoefficients,
    InterlacingViolation,
    LengthMismatch,
    NonFiniteValue,
    NotSymmetric,
    PoleEvaluation,
    SpectrumValidationError,
    TailNotCertified,
    TooSmall,
    ZeroLambda,
    ZeroMuInInfiniteMode,
)
from .spectra import (
    GeometricDescriptor,
    InterlacedSpectrum,
    KernelReport,
    generate_geometric,
    kernel_diagnostics,
    validate_interlacing,
)
from .borg import (
    HerglotzSample,
    SpectralMeasure,
    aronszajn_krein,
    cauchy_transform,
    compute_weights,
    consistency_scan,
    default_grid,
    herglotz_sample,
    phi_product,
)
from .operators import (
    ContractionData,
    OperatorTriple,
    StabilityProfile,
    assemble_pair,
    build_sigma_star,
    stability_profile,
    symmetric_eigendecomposition,
)
from .hankel import (
    HankelModel,
    IsometryTruncation,
    apply_shift,
    build_hankel_matrix,
    hankel_coefficients,
    isometry_matrix,
    shifted_block,
)
from .verify import VerificationReport, VerifyConfig, forward_spectrum, round_trip

__all__ = [name for name in dir() if not name.startswith("_")]
