"""Exception types shared across the package."""


class PinnFemError(Exception):
    """Base class for all package errors."""


class InputError(PinnFemError):
    """Malformed or inconsistent caller input (shapes, ranges, domains)."""


class CapabilityError(PinnFemError):
    """A request outside the supported feature envelope."""


class MeshError(PinnFemError):
    """Degenerate or inconsistent mesh geometry."""


class FormatError(PinnFemError):
    """Malformed file content; carries a line number when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class SolverError(PinnFemError):
    """Linear solve failed; carries the residual that was achieved."""

    def __init__(self, message, residual=None):
        if residual is not None:
            message = f"{message} (achieved relative residual {residual:.3e})"
        super().__init__(message)
        self.residual = residual


class TrainingDivergence(PinnFemError):
    """Non-finite loss during training; carries the diagnostic state."""

    def __init__(self, epoch, losses):
        super().__init__(f"non-finite loss at epoch {epoch}: {losses}")
        self.epoch = epoch
        self.losses = losses


class ShiftMarginError(PinnFemError):
    """Multiplier dropped below the safety margin; recompute with larger margin."""


class ConfigError(PinnFemError):
    """Invalid run configuration file."""
