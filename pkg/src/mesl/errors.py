"""Exception hierarchy.

Each class carries an ``exit_code`` so the command line can map failures to
distinct process statuses.
"""


class MeslError(Exception):
    exit_code = 1


class ConfigError(MeslError):
    """Bad configuration value, unknown key, or unparseable file."""

    exit_code = 2

    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        super().__init__(message)
        self.key = key
        self.line = line


class InvalidGeometryError(MeslError, ValueError):
    exit_code = 3


class InvalidStateError(MeslError, ValueError):
    """Magnetization that is not a unit vector."""

    exit_code = 4


class ConvergenceError(MeslError, ArithmeticError):
    """Fixed-point iteration did not converge."""

    exit_code = 5

    def __init__(self, message: str, iterations: int = 0, residual: float = float("nan")):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


class ReadDisturbError(MeslError):
    """Read node voltage large enough to rewrite a free magnet."""

    exit_code = 6

    def __init__(self, message: str, v_node: float = float("nan"), v_switch_min: float = float("nan")):
        super().__init__(message)
        self.v_node = v_node
        self.v_switch_min = v_switch_min


class ScheduleError(MeslError, ValueError):
    """Reset/evaluate timeline violates ordering rules."""

    exit_code = 7
