"""Exception types shared across the simulator."""


class SimulationError(Exception):
    """Base class for all msdsim errors."""


class NonHermitianError(SimulationError, ValueError):
    """A matrix that must be Hermitian is not (diagnostic names the entry)."""


class DegenerateSpectrumError(SimulationError, ValueError):
    """The superadiabatic engine was handed a (near-)degenerate spectrum."""


class DegenerateControlError(SimulationError, ValueError):
    """Both control amplitudes vanished where a mixing angle is required."""


class StepTooLargeError(SimulationError, RuntimeError):
    """Eigenvector continuity was lost between finite-difference samples."""


class PropagationError(SimulationError, RuntimeError):
    """An integration run violated a conservation bound (step-size failure)."""


class ConfigError(SimulationError, ValueError):
    """A scenario configuration is malformed; the message names the key."""
