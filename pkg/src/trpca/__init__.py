"""Third-order tensor algebra with tubal SVD and block-wise robust PCA."""

from .block import (
    BlockGrid,
    BlockSlot,
    DecompositionResult,
    IBTSVTConfig,
    concatenate,
    ibtsvt,
    partition,
    sparse_residual,
)
from .core import (
    as_tensor3,
    conj_transpose,
    fft3,
    identity_tensor,
    ifft3,
    is_fdiagonal,
    is_orthogonal,
    norm,
    standard_basis,
    tproduct,
    tproduct_naive,
)
from .incoherence import IncoherenceReport, check_conditions, incoherence_report
from .io import (
    frames_to_tensor,
    read_frames,
    read_pgm,
    read_tensor,
    tensor_to_frames,
    write_frames,
    write_pgm,
    write_tensor,
)
from .synth import lowrank_instance, support_scores, video_instance
from .tsvd import TSVDFactors, multi_rank, svt, tnn, tsvd, tubal_rank

__version__ = "0.1.0"

__all__ = [
    "BlockGrid",
    "BlockSlot",
    "DecompositionResult",
    "IBTSVTConfig",
    "IncoherenceReport",
    "TSVDFactors",
    "as_tensor3",
    "check_conditions",
    "concatenate",
    "conj_transpose",
    "fft3",
    "frames_to_tensor",
    "ibtsvt",
    "identity_tensor",
    "ifft3",
    "incoherence_report",
    "is_fdiagonal",
    "is_orthogonal",
    "lowrank_instance",
    "multi_rank",
    "norm",
    "partition",
    "read_frames",
    "read_pgm",
    "read_tensor",
    "sparse_residual",
    "standard_basis",
    "support_scores",
    "svt",
    "tensor_to_frames",
    "tnn",
    "tproduct",
    "tproduct_naive",
    "tsvd",
    "tubal_rank",
    "video_instance",
    "write_frames",
    "write_pgm",
    "write_tensor",
]
