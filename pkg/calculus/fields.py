from dataclasses import dataclass

import numpy as np

from utils.errors import FrameMismatch, RankMismatch

__all__ = ['Field', 'EULERIAN', 'LAGRANGIAN', 'MAX_RANK', 'as_array']

EULERIAN = 'eulerian'
LAGRANGIAN = 'lagrangian'
MAX_RANK = 4


@dataclass(frozen=True, eq=False)
class Field:
    """
    Tensor-valued samples on the reference-disk grid.

    Data is shaped (2,) * rank + grid, where grid is (n_r, n_theta) for fields on the whole disk or (n_theta,) for
    fields restricted to the boundary. Index slots are tagged with a frame; arithmetic between fields of different
    frames or ranks is refused.
    """
    data: np.ndarray
    rank: int = 0
    frame: str = EULERIAN

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        object.__setattr__(self, 'data', data)

        if not 0 <= self.rank <= MAX_RANK:
            msg = f'Field rank must be between 0 and {MAX_RANK}, got {self.rank}'
            raise RankMismatch(msg)
        if self.frame not in (EULERIAN, LAGRANGIAN):
            msg = f'Unknown frame {self.frame!r}'
            raise FrameMismatch(msg)
        if data.shape[:self.rank] != (2,) * self.rank or data.ndim - self.rank not in (1, 2):
            msg = f'Data of shape {data.shape} cannot hold a rank-{self.rank} field'
            raise RankMismatch(msg)

    def __repr__(self):
        return f'{self.__class__.__name__}(rank={self.rank}, frame={self.frame!r}, grid={self.grid_shape})'

    @property
    def grid_shape(self):
        return self.data.shape[self.rank:]

    @property
    def on_boundary(self):
        return len(self.grid_shape) == 1

    def boundary(self):
        """Restriction to the boundary nodes r = 1."""
        if self.on_boundary:
            return self
        return Field(self.data[..., 0, :], self.rank, self.frame)

    @classmethod
    def zeros(cls, disk, rank=0, frame=EULERIAN):
        return cls(np.zeros((2,) * rank + disk.shape), rank, frame)

    @classmethod
    def from_function(cls, positions, func, rank=0):
        """
        Evaluate an Eulerian function at the physical node positions.

        :param np.ndarray positions: node positions shaped (2, n_r, n_theta)
        :param callable func: func(x1, x2) returning an array, or a sequence of arrays for vector fields
        :param int rank: 0 for scalars, 1 for vectors
        :return Field:
        """
        x1, x2 = positions
        values = func(x1, x2)
        if rank == 0:
            data = np.broadcast_to(np.asarray(values, dtype=float), x1.shape).copy()
        else:
            data = np.stack([np.broadcast_to(np.asarray(c, dtype=float), x1.shape) for c in values])
        return cls(data, rank)

    def _check_compatible(self, other, same_rank=True):
        if self.frame != other.frame:
            msg = f'Cannot combine {self.frame} and {other.frame} fields'
            raise FrameMismatch(msg)
        if same_rank and self.rank != other.rank:
            msg = f'Cannot combine rank-{self.rank} and rank-{other.rank} fields'
            raise RankMismatch(msg)

    def __add__(self, other):
        if isinstance(other, Field):
            self._check_compatible(other)
            return Field(self.data + other.data, self.rank, self.frame)
        return Field(self.data + other, self.rank, self.frame)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Field):
            self._check_compatible(other)
            return Field(self.data - other.data, self.rank, self.frame)
        return Field(self.data - other, self.rank, self.frame)

    def __neg__(self):
        return Field(-self.data, self.rank, self.frame)

    def __mul__(self, other):
        if isinstance(other, Field):
            if self.rank and other.rank:
                msg = 'Products of two tensor fields must go through an explicit contraction'
                raise RankMismatch(msg)
            self._check_compatible(other, same_rank=False)
            rank = self.rank + other.rank
            return Field(self.data * other.data, rank, self.frame)
        return Field(self.data * other, self.rank, self.frame)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Field):
            if other.rank:
                msg = 'Division is only defined by scalar fields'
                raise RankMismatch(msg)
            self._check_compatible(other, same_rank=False)
            return Field(self.data / other.data, self.rank, self.frame)
        return Field(self.data / other, self.rank, self.frame)

    def pointwise_norm_squared(self):
        """Sum of squared components at every node (Euclidean index contraction)."""
        return np.sum(self.data ** 2, axis=tuple(range(self.rank)))

    def component(self, *index):
        return self.data[index]


def as_array(f):
    """The samples of a Field, or f itself as a float array."""
    return f.data if isinstance(f, Field) else np.asarray(f, dtype=float)
