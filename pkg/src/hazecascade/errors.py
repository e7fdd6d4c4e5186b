"""Exception hierarchy shared by all modules."""


class HazeError(Exception):
    pass


class DomainError(HazeError, ValueError):
    """A value lies outside the mathematical domain of an operation."""


class DimensionError(HazeError, ValueError):
    """Raster shapes do not agree."""


class ConfigError(HazeError, ValueError):
    """A parameter is out of its allowed range."""


class EstimationError(HazeError):
    """Not enough usable data to fit a quantity."""


class FormatError(HazeError, ValueError):
    """A file on disk does not have the expected layout."""
