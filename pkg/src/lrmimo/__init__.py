"""Lattice-reduction-aided MIMO detection with switched CLLL candidate selection."""

from .errors import (
    BudgetExceededError,
    LrMimoError,
    SingularMatrixError,
    ValidationError,
)
from .linalg import gram_det, pseudoinverse, qr_decompose, singular_values
from .reduction import (
    ReducedBasis,
    ReductionParams,
    clll_reduce,
    condition_number,
    is_clll_reduced,
    is_unimodular,
    odf,
)
from .kz import EnumerationBudget, is_kz_reduced, kz_reduce, shortest_vector
from .switched import (
    KlrResult,
    PermutationSet,
    identity_result,
    klr_select,
    klr_select_extended,
    klr_select_with,
    sample_permutations,
)
from .modem import ConstellationSpec, demodulate, modulate
from .detectors import (
    DetectionOutput,
    extend_system,
    hard_slice,
    lr_detect,
    ml_detect,
    mmse_filter_direct,
    shift_scale_quantize,
    sic_detect,
    zf_error_covariance,
    zf_filter,
)
from .sim import (
    BerRecord,
    SimConfig,
    gen_channel,
    run_sweep,
    snr_config,
    write_records,
)

__all__ = [
    "BerRecord",
    "BudgetExceededError",
    "ConstellationSpec",
    "DetectionOutput",
    "EnumerationBudget",
    "KlrResult",
    "LrMimoError",
    "PermutationSet",
    "ReducedBasis",
    "ReductionParams",
    "SimConfig",
    "SingularMatrixError",
    "ValidationError",
    "clll_reduce",
    "condition_number",
    "demodulate",
    "extend_system",
    "gen_channel",
    "gram_det",
    "hard_slice",
    "identity_result",
    "is_clll_reduced",
    "is_kz_reduced",
    "is_unimodular",
    "klr_select",
    "klr_select_extended",
    "klr_select_with",
    "kz_reduce",
    "lr_detect",
    "ml_detect",
    "mmse_filter_direct",
    "modulate",
    "odf",
    "pseudoinverse",
    "qr_decompose",
    "run_sweep",
    "sample_permutations",
    "shift_scale_quantize",
    "shortest_vector",
    "sic_detect",
    "singular_values",
    "snr_config",
    "write_records",
    "zf_error_covariance",
    "zf_filter",
]
