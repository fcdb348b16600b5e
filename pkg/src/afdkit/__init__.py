"""Adaptive kernel decompositions on the unit disc and the 2-torus.

The package decomposes Hardy-space boundary signals into parameterized
reproducing kernels: 1-d greedy decomposition over rational orthonormal
systems, product-system and tensor-kernel decompositions on the 2-torus,
and the pre-orthogonal greedy algorithm with multiplicity escalation.
"""

from .errors import (
    ConfigError,
    DegenerateInputError,
    DimensionMismatchError,
    DomainError,
    IngestError,
    InvariantViolation,
    RecordFormatError,
    SpanDegeneracyError,
    TruncationError,
    TruncationWarning,
)
from .hardy import (
    BoundaryGrid,
    FourierCoeffs1D,
    FourierCoeffs2D,
    GridSpec,
    QuadrantParts,
    analytic_part,
    grid_argmax,
    grid_argmax_pairs,
    grid_points,
    hilbert_transform,
    inner_product_1d,
    inner_product_2d,
    next_pow2,
    quadrant_split,
    real_reconstruct_2d,
)
from .szego import (
    AtomSpec,
    TensorAtomSpec,
    higher_order_coeffs,
    normalization,
    normalized_atom_coeffs,
    szego_coeffs,
    tensor_atom_coeffs,
)
from .afd1d import (
    AFDRecord,
    AFDStep,
    afd_decompose_1d,
    backward_shift,
    blaschke_eval,
    hyperbolic_diagnostic,
    msp_1d,
    multiplicities,
    reconstruct_1d,
    tm_basis,
    tm_matrix,
)
from .afd2d import (
    Afd2dRecord,
    Afd2dStep,
    PGARecord,
    PGAStep,
    afd2d_tm_decompose,
    dn_energy,
    msp_product_tm,
    pga_decompose,
    pga_step,
    product_coeff,
    reconstruct_pga,
    reconstruct_product_tm,
)
from .poga import (
    EPS_SPAN,
    OrthoFrame,
    PogaRecord,
    PogaStep,
    ProductSzegoDictionary2D,
    RateReport,
    SelectionOutcome,
    SzegoDictionary1D,
    candidate_gain,
    oga_select,
    poga_decompose,
    poga_select,
    project_residual,
    rate_report,
    reconstruct_poga,
)
from .cli import (
    RunConfig,
    cli_main,
    load_image_2d,
    load_record,
    load_signal_1d,
    save_record,
    synth_signal_1d,
    verify_record,
)

__version__ = "0.1.0"
