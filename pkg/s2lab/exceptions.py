"""Error hierarchy shared by the library, the management commands and the views."""


class S2LabError(Exception):
    """Base class for every error raised on purpose by s2lab."""

    exit_code = 1
    http_status = 500


class InputError(S2LabError, ValueError):
    """Malformed input: bad vertex ids, unknown edges, unreadable files."""

    exit_code = 2
    http_status = 400


class InfeasibleParameterError(S2LabError, ValueError):
    """A parameter lies outside the domain of the formula it feeds."""

    exit_code = 3
    http_status = 422


class InfeasibleNoiseError(InfeasibleParameterError):
    """Noise rate at or above one half; majority voting cannot recover labels."""


class UndefinedParameterError(InfeasibleParameterError):
    """The requested quantity is not defined for this instance (e.g. kappa of an empty cut)."""


class GenerationError(S2LabError):
    """A randomized generator could not produce a valid instance."""

    exit_code = 3
    http_status = 422


class EngineStateError(S2LabError):
    """Internal bookkeeping of a run became inconsistent."""
