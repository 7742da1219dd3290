from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np

from calculus.fields import Field
from calculus.operators import div_curl, l2_norm
from geometry.cache import GeometryCache
from geometry.maps import LagrangianMap

__all__ = ['SimState']


@dataclass(frozen=True, eq=False)
class SimState:
    """
    One time level of the Lagrangian system: flow map, Eulerian velocity components on the reference nodes, enthalpy
    and its material derivative, together with the equation of state that closes the system.
    """
    t: float
    map: LagrangianMap
    v: Field
    h: Field
    hdot: Field
    eos: object
    eta_threshold: float = 1.0

    def __repr__(self):
        return f'{self.__class__.__name__}(t={self.t:.6g}, eos={self.eos!r}, grid={self.disk})'

    @property
    def disk(self):
        return self.map.disk

    @cached_property
    def _geometry(self):
        return GeometryCache(self.map, eta_threshold=self.eta_threshold)

    def geometry(self):
        """Geometry cache of the current configuration, built once per state."""
        return self._geometry

    @classmethod
    def at_rest(cls, disk, eos, t=0.0):
        """Reference disk, zero velocity and zero enthalpy."""
        zero = Field.zeros(disk)
        return cls(t, LagrangianMap.identity(disk), Field.zeros(disk, rank=1), zero, zero, eos)

    @classmethod
    def initial(cls, disk, eos, v, h, hdot=None, lagrangian_map=None):
        """
        State at t = 0 from velocity and enthalpy fields on the reference disk.

        :param ReferenceDisk disk:
        :param EosFamily eos:
        :param v: rank-1 Field or array (2, n_r, n_theta)
        :param h: scalar Field or array
        :param hdot: D_t h; zero when omitted
        :param LagrangianMap lagrangian_map: identity when omitted
        :return SimState:
        """
        v = v if isinstance(v, Field) else Field(v, 1)
        h = h if isinstance(h, Field) else Field(h)
        hdot = Field.zeros(disk) if hdot is None else (hdot if isinstance(hdot, Field) else Field(hdot))
        lagrangian_map = lagrangian_map if lagrangian_map is not None else LagrangianMap.identity(disk)
        return cls(0.0, lagrangian_map, v, h, hdot, eos)

    def replace(self, **changes):
        return replace(self, **changes)

    def continuity_residual(self, cache=None):
        """||div v + e'(h) D_t h|| over the physical domain."""
        cache = cache if cache is not None else self.geometry()
        div, _ = div_curl(self.v, cache)
        residual = div.data + self.eos.derivative(1, self.h.data) * self.hdot.data
        return l2_norm(Field(residual), cache)

    def curl_norm(self, cache=None):
        cache = cache if cache is not None else self.geometry()
        _, curl = div_curl(self.v, cache)
        return l2_norm(curl, cache)

    def boundary_radius_drift(self):
        """Largest deviation of the boundary node radii from one."""
        return float(np.abs(np.hypot(*self.map.positions[:, 0, :]) - 1).max())
