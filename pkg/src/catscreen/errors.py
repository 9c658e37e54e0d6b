"""Exception hierarchy for catscreen.

Everything raised on purpose derives from :class:`CatscreenError` so the CLI
can map failures to exit codes (usage/parse problems exit 2, runtime
failures exit 1).
"""


class CatscreenError(Exception):
    """Base class for all catscreen errors."""


class DimensionError(CatscreenError):
    """Paired inputs whose shapes do not line up."""


class ValidationError(CatscreenError):
    """A value violates a documented invariant."""


class ConfigError(CatscreenError):
    """An invalid configuration value (bad cutoffs, empty grids, ...)."""


class DegenerateResponseError(CatscreenError):
    """The response is constant; marginal screening is meaningless."""


class NoSelectableFeaturesError(CatscreenError):
    """Every screening score fell below the selection floor."""


class DatasetError(CatscreenError):
    """A dataset file could not be parsed; message carries row/column info."""
