"""
Named divergence-free seed velocities u0 on the reference disk.
"""
import numpy as np

from calculus.fields import Field
from utils.errors import ConfigError

__all__ = ['PRESETS', 'seed_velocity', 'linear_seed']

PRESETS = ('irrotational-quadrupole', 'rigid-rotation', 'zero', 'linear')


def linear_seed(disk, coefficients):
    """
    u0^i = a_ij x_j for coefficients (a11, a12, a21, a22); the trace a11 + a22 must vanish.

    :param ReferenceDisk disk:
    :param Sequence[float] coefficients:
    :return Field:
    """
    if len(coefficients) != 4:
        msg = f'A linear seed needs four coefficients, got {len(coefficients)}'
        raise ConfigError(msg, section='seed', key='coefficients')
    a = np.asarray(coefficients, dtype=float).reshape(2, 2)
    if abs(np.trace(a)) > 1e-14:
        msg = f'A linear seed must be divergence free, a11 + a22 = {np.trace(a):g}'
        raise ConfigError(msg, section='seed', key='coefficients')
    return Field.from_function(disk.y, lambda x1, x2: (a[0, 0] * x1 + a[0, 1] * x2, a[1, 0] * x1 + a[1, 1] * x2),
                               rank=1)


def seed_velocity(disk, preset, omega=1.0, coefficients=()):
    """
    Seed velocity by preset name.

    :param ReferenceDisk disk:
    :param str preset: one of PRESETS
    :param float omega: angular velocity of 'rigid-rotation'
    :param coefficients: matrix entries of 'linear'
    :return Field: rank-1 field on the reference disk
    """
    if preset == 'irrotational-quadrupole':
        return linear_seed(disk, (2.0, 0.0, 0.0, -2.0))
    if preset == 'rigid-rotation':
        return linear_seed(disk, (0.0, -omega, omega, 0.0))
    if preset == 'zero':
        return Field.zeros(disk, 1)
    if preset == 'linear':
        return linear_seed(disk, coefficients)

    msg = f'Unknown seed preset {preset!r}'
    raise ConfigError(msg, section='seed', key='preset')
