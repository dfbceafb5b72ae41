class LabError(ValueError):
    """Base class for every error raised by the laboratory."""


class ResolutionError(LabError):
    pass


class BoundaryError(LabError):
    pass


class EmptySectorError(LabError):
    pass


class LatticeError(LabError):
    pass


class OverlapError(LabError):
    pass


class GeometryError(LabError):
    pass


class ObservableError(LabError):
    pass


class HermiticityError(LabError):
    pass


class ConfigError(LabError):
    pass


class ScenarioError(LabError):
    pass
