"""Exception types shared across the package."""


class PoissonLabError(Exception):
    """Base class for all errors raised by this package."""


class CapExceeded(PoissonLabError):
    """Requested iterate is beyond the system-specific safe cap."""


class DomainEscape(PoissonLabError):
    """An orbit left the region where the map is constructed."""


class StageOverflow(PoissonLabError):
    """Tower construction would exceed the configured height bound."""


class WindowViolation(PoissonLabError):
    """A count was requested on a set not contained in the sample window."""


class InsufficientTrials(PoissonLabError):
    """Too few Monte Carlo trials for the requested statistic."""


class NotWandering(PoissonLabError):
    """A set required to be wandering has intersecting translates."""


class GridMismatch(PoissonLabError):
    """Circle measures with different grid sizes were combined."""


class TailToleranceUnreachable(PoissonLabError):
    """No truncation order up to the cap meets the tail tolerance."""


class NormExceeded(PoissonLabError):
    """Operator norm above 1; no exponential on the symmetric tower."""


class NotProjection(PoissonLabError):
    """Matrix is not an orthogonal projection within tolerance."""


class NotDecreasing(PoissonLabError):
    """Projection sequence is not nested decreasing."""


class Level1NotPreserved(PoissonLabError):
    """Operator couples the one-point level to other levels."""


class DegeneratePhases(PoissonLabError):
    """Eigenphase list contains coincident phases."""


class MassInconsistency(PoissonLabError):
    """Joining intensity scales do not add up to the base intensity."""


class BadScales(PoissonLabError):
    """Invalid scale pair for a rescaled-coupling lift."""


class AmbiguousPairing(PoissonLabError):
    """Marginal reconstruction found more than one candidate partner."""


class ReconstructionFailure(PoissonLabError):
    """Marginal reconstruction could not match the two point sets."""


class ConfigError(PoissonLabError):
    """A config file failed to parse or validate.

    Carries the line number and key so CLI diagnostics can point at the
    offending entry.
    """

    def __init__(self, message, *, key=None, line=None):
        self.key = key
        self.line = line
        prefix = ""
        if line is not None:
            prefix += f"line {line}: "
        if key is not None:
            prefix += f"key '{key}': "
        super().__init__(prefix + message)
