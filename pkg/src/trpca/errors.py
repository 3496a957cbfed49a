"""Exception types shared across the package."""


class TensorError(Exception):
    """Base class for every error raised by this package."""


class ShapeMismatch(TensorError):
    """Operand shapes are incompatible with the requested operation."""


class SymmetryViolation(TensorError):
    """A spectral tensor lost conjugate symmetry, so its inverse transform
    is not real.  Signals an upstream bug, not user error."""


class NumericalFailure(TensorError):
    """A slice-level factorization failed to converge."""


class IndexOutOfRange(TensorError):
    """A basis index falls outside the valid range."""


class ZeroTensor(TensorError):
    """The operation is undefined for an all-zero tensor."""


class NonFiniteData(TensorError):
    """External input contained NaN or Inf entries."""


class BadMagic(TensorError):
    """File does not start with the expected magic bytes."""


class BadVersion(TensorError):
    """File declares an unsupported format version."""


class TruncatedPayload(TensorError):
    """File payload does not match what its header promises."""


class InconsistentDims(TensorError):
    """Frames in a sequence disagree on size or bit depth."""


class EmptySequence(TensorError):
    """A frame sequence contained no frames."""


class DescriptorMismatch(TensorError):
    """Blocks handed back for concatenation do not line up with the grid."""
