import numpy as np

from utils.errors import DegenerateMap

__all__ = ['LagrangianMap']


class LagrangianMap:
    """
    The flow map x(y) from reference-disk labels to physical positions, with its Jacobian and inverse.

    jacobian[i, a] = dx^i/dy^a and inverse_jacobian[a, i] = dy^a/dx^i, both shaped (2, 2, n_r, n_theta).
    Construction refuses maps that fold over.
    """

    def __init__(self, disk, positions):
        """
        :param ReferenceDisk disk: reference grid the labels live on
        :param np.ndarray positions: physical positions x^i at every node, shaped (2, n_r, n_theta)
        """
        positions = np.asarray(positions, dtype=float)
        if positions.shape != (2,) + disk.shape:
            msg = f'Positions of shape {positions.shape} do not match {disk}'
            raise ValueError(msg)

        self.disk = disk
        self.positions = positions
        self.jacobian = np.moveaxis(disk.dy(positions), 0, 1)

        a = self.jacobian
        self.det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
        min_det = float(self.det.min())
        if not min_det > 0:
            msg = f'Lagrangian map is not orientation preserving: min det(dx/dy) = {min_det:.3e}'
            raise DegenerateMap(msg, min_det=min_det)

        self.inverse_jacobian = np.stack([
            np.stack([a[1, 1], -a[0, 1]]),
            np.stack([-a[1, 0], a[0, 0]])
        ]) / self.det

    def __repr__(self):
        return f'{self.__class__.__name__}({self.disk}, min_det={self.det.min():.6g})'

    @classmethod
    def identity(cls, disk):
        return cls(disk, disk.y.copy())

    @classmethod
    def from_function(cls, disk, func):
        """
        Build a map from a closed form x = func(y1, y2).

        :param ReferenceDisk disk:
        :param callable func: func(y1, y2) returning the pair (x1, x2)
        :return LagrangianMap:
        """
        y1, y2 = disk.y
        x1, x2 = func(y1, y2)
        return cls(disk, np.stack([np.broadcast_to(x1, y1.shape), np.broadcast_to(x2, y1.shape)]))

    @classmethod
    def dilation(cls, disk, factor):
        return cls(disk, factor * disk.y)

    @classmethod
    def rotation(cls, disk, angle):
        c, s = np.cos(angle), np.sin(angle)
        y1, y2 = disk.y
        return cls(disk, np.stack([c * y1 - s * y2, s * y1 + c * y2]))

    def compose_rotation(self, angle):
        """Rigidly rotate the physical positions by the given angle."""
        c, s = np.cos(angle), np.sin(angle)
        x1, x2 = self.positions
        return LagrangianMap(self.disk, np.stack([c * x1 - s * x2, s * x1 + c * x2]))

    def eulerian_derivative(self, f):
        """
        Eulerian partial derivatives d/dx^i of grid data, stacked on a new first axis.

        :param np.ndarray f: array with trailing axes (n_r, n_theta)
        :return np.ndarray: shape (2,) + f.shape
        """
        dyf = self.disk.dy(f)
        return np.einsum('aixy,a...xy->i...xy', self.inverse_jacobian, dyf)

    def eulerian_partial(self, f, i):
        """Single Eulerian partial derivative d/dx^i."""
        dyf = self.disk.dy(f)
        return self.inverse_jacobian[0, i] * dyf[0] + self.inverse_jacobian[1, i] * dyf[1]

    @property
    def area_weights(self):
        """Physical area weights: reference weights times the Jacobian determinant."""
        return self.disk.area_weights * self.det
