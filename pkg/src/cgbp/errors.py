"""Error types shared across the package."""


class ParameterError(ValueError):
    """An argument is outside its documented domain."""


class ParseError(ValueError):
    """A graph file violates its format; carries the offending line number."""

    def __init__(self, message, path=None, line=None):
        detail = message
        if path is not None:
            detail = f"{path}: {detail}"
        if line is not None:
            detail = f"{detail} (line {line})"
        super().__init__(detail)
        self.path = path
        self.line = line


class GenerationError(RuntimeError):
    """Random graph generation exhausted its retry budget."""


class NumericError(RuntimeError):
    """Non-finite values appeared during training; carries epoch and layer."""

    def __init__(self, message, epoch=None, layer=None):
        detail = message
        if epoch is not None:
            detail = f"{detail} (epoch {epoch})"
        if layer is not None:
            detail = f"{detail} [{layer}]"
        super().__init__(detail)
        self.epoch = epoch
        self.layer = layer


class SizeRefusalError(ValueError):
    """An exhaustive routine was asked to enumerate too large a space."""
