"""Exception types raised by the toolkit."""


class HMIMOError(Exception):
    """Base class for all toolkit errors."""


class DegenerateAzimuths(HMIMOError):
    """The two in-plane directions project to parallel lines in the xy-plane."""


class OutOfElement(HMIMOError):
    """Intrinsic coordinates fall outside the element."""


class CoincidentPoints(HMIMOError):
    """Source and observation points coincide; the Green tensor is singular."""


class QuadratureDiverged(HMIMOError):
    """Doubling the quadrature order changed the result beyond tolerance."""


class DimensionMismatch(HMIMOError):
    pass


class ZeroReference(HMIMOError):
    pass


class RankZero(HMIMOError):
    """All singular values are zero."""


class ConfigError(HMIMOError):
    """Malformed or inconsistent experiment configuration."""


class BlockError(HMIMOError):
    """A per-pair computation failed while assembling a channel matrix.

    The original exception is kept as ``cause``; ``m`` and ``n`` are the
    zero-based receive and transmit element indices.
    """

    def __init__(self, m, n, cause):
        super().__init__(f"block (m={m}, n={n}): {type(cause).__name__}: {cause}")
        self.m = m
        self.n = n
        self.cause = cause
