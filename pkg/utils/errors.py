"""
Exception hierarchy shared by every package in the project.

Errors fall in three families that map onto the command-line exit codes: configuration problems (1), numerical
failures (2), and input/output failures (3). Numerical errors carry the measured quantity that triggered them so
reports can record it without parsing the message.
"""

__all__ = ['FreeSurfaceError', 'ConfigError', 'NumericalError', 'DegenerateMap', 'RankMismatch', 'FrameMismatch',
           'MissingDerivedFields', 'MissingField', 'NonpositiveKappa', 'DegenerateEos', 'UnsupportedFamily',
           'ResolutionInsufficient', 'NoConvergence', 'IncompatibleNeumann', 'BoundaryNonzero',
           'SignConditionViolation', 'NoContraction', 'CflViolation', 'InsufficientSnapshots', 'ContainerError',
           'HashMismatch', 'exit_code_for']


class FreeSurfaceError(Exception):
    """Base class for all errors raised deliberately by the project."""
    exit_code = 2


class ConfigError(FreeSurfaceError):
    """
    An invalid or unreadable experiment configuration.

    :param str msg: human-readable description
    :param str section: INI section of the offending key, if known
    :param str key: offending key, if known
    :param int line: line number in the file, if known
    """
    exit_code = 1

    def __init__(self, msg, section=None, key=None, line=None):
        location = ''.join([
            f' [{section}]' if section else '',
            f' {key}' if key else '',
            f' (line {line})' if line else ''
        ])
        super().__init__(f'{msg}{":" + location if location else ""}')
        self.section = section
        self.key = key
        self.line = line


class NumericalError(FreeSurfaceError):
    exit_code = 2


class DegenerateMap(NumericalError):
    """The Lagrangian map folded over: det(dx/dy) <= 0 at some node."""

    def __init__(self, msg, min_det=None):
        super().__init__(msg)
        self.min_det = min_det


class RankMismatch(NumericalError):
    pass


class FrameMismatch(NumericalError):
    pass


class MissingDerivedFields(NumericalError):
    pass


class MissingField(NumericalError):
    def __init__(self, msg, name=None):
        super().__init__(msg)
        self.name = name


class NonpositiveKappa(NumericalError):
    pass


class DegenerateEos(NumericalError):
    pass


class UnsupportedFamily(NumericalError):
    pass


class ResolutionInsufficient(NumericalError):
    def __init__(self, msg, tail_fraction=None):
        super().__init__(msg)
        self.tail_fraction = tail_fraction


class NoConvergence(NumericalError):
    """An iteration exhausted its budget; carries the iteration count and the last residual."""

    def __init__(self, msg, iterations=None, residual=None):
        super().__init__(msg)
        self.iterations = iterations
        self.residual = residual


class IncompatibleNeumann(NumericalError):
    def __init__(self, msg, defect=None):
        super().__init__(msg)
        self.defect = defect


class BoundaryNonzero(NumericalError):
    def __init__(self, msg, max_value=None):
        super().__init__(msg)
        self.max_value = max_value


class SignConditionViolation(NumericalError):
    """The Taylor sign quantity -N.grad h fell below the admissible minimum."""

    def __init__(self, msg, eps=None):
        super().__init__(msg)
        self.eps = eps


class NoContraction(NumericalError):
    def __init__(self, msg, ratios=None):
        super().__init__(msg)
        self.ratios = ratios


class CflViolation(NumericalError):
    def __init__(self, msg, dt=None, limit=None):
        super().__init__(msg)
        self.dt = dt
        self.limit = limit


class InsufficientSnapshots(NumericalError):
    def __init__(self, msg, count=None):
        super().__init__(msg)
        self.count = count


class ContainerError(FreeSurfaceError):
    """A field container file is malformed or truncated."""
    exit_code = 3


class HashMismatch(FreeSurfaceError):
    exit_code = 3

    def __init__(self, msg, expected=None, found=None):
        super().__init__(msg)
        self.expected = expected
        self.found = found


def exit_code_for(exc):
    """
    Map an exception to the command-line exit code.

    :param BaseException exc: any raised exception
    :return int: 1 for configuration errors, 2 for numerical errors, 3 for input/output errors
    """
    if isinstance(exc, FreeSurfaceError):
        return exc.exit_code
    if isinstance(exc, OSError):
        return 3
    return 2
