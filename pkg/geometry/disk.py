"""
The reference disk: a Fourier x Chebyshev collocation grid on the unit disk without a node at the origin.

Radii are the positive half of a Chebyshev-Gauss-Lobatto grid of odd degree on the full diameter [-1, 1], so every
angular mode m carries radial parity (-1)^m and the radial differentiation matrix folds the diameter onto the
half-grid. Radial index 0 is the boundary r = 1.
"""
from functools import cached_property

import numpy as np
from numpy.polynomial import chebyshev as C

__all__ = ['ReferenceDisk', 'chebyshev_differentiation', 'FILTER_STRENGTH', 'FILTER_ORDER']

FILTER_STRENGTH = 36.0
FILTER_ORDER = 16


def chebyshev_differentiation(degree):
    """
    Chebyshev-Gauss-Lobatto points and the collocation differentiation matrix of the given degree.

    :param int degree: polynomial degree N, giving N + 1 points x_j = cos(pi j / N)
    :return tuple: x, D; points in descending order and the (N+1, N+1) differentiation matrix
    """
    n = np.arange(degree + 1)
    x = np.cos(np.pi * n / degree)
    c = np.hstack((2, np.ones(degree - 1), 2)) * (-1) ** n
    dx = x[:, None] - x[None, :]
    d = np.outer(c, 1.0 / c) / (dx + np.eye(degree + 1))
    d = d - np.diag(d.sum(axis=1))  # negative-sum trick keeps rows annihilating constants
    return x, d


class ReferenceDisk:
    """
    Collocation grid and quadrature on the unit disk.

    Fields on the disk are arrays whose last two axes are (n_r, n_theta); any leading axes are tensor indices and are
    carried through every operator untouched.
    """

    def __init__(self, n_r=33, n_theta=64):
        """
        :param int n_r: radial node count, at least 9
        :param int n_theta: angular node count, even and at least 8
        """
        if n_r < 9:
            msg = f'n_r must be at least 9, got {n_r}'
            raise ValueError(msg)
        if n_theta < 8 or n_theta % 2:
            msg = f'n_theta must be even and at least 8, got {n_theta}'
            raise ValueError(msg)

        self.n_r = int(n_r)
        self.n_theta = int(n_theta)
        self.degree = 2 * self.n_r - 1

        x_full, d = chebyshev_differentiation(self.degree)
        self.x_full = x_full
        self.r = x_full[:self.n_r]
        self.theta = 2 * np.pi * np.arange(self.n_theta) / self.n_theta

        d2 = d @ d
        self._da, self._db = self._fold(d)
        self._d2a, self._d2b = self._fold(d2)

        self.modes = np.arange(self.n_theta // 2 + 1)

    def __repr__(self):
        return f'{self.__class__.__name__}(n_r={self.n_r}, n_theta={self.n_theta})'

    def __eq__(self, other):
        return isinstance(other, ReferenceDisk) and (self.n_r, self.n_theta) == (other.n_r, other.n_theta)

    def __hash__(self):
        return hash((self.n_r, self.n_theta))

    def _fold(self, matrix):
        """Split a full-diameter operator into its action on f(r, theta) and on f(r, theta + pi)."""
        same_side = matrix[:self.n_r, :self.n_r]
        opposite_side = matrix[:self.n_r, self.n_r:][:, ::-1]
        return same_side, opposite_side

    @property
    def shape(self):
        return self.n_r, self.n_theta

    @cached_property
    def mesh(self):
        """Radius and angle at every node, each shaped (n_r, n_theta)."""
        return np.meshgrid(self.r, self.theta, indexing='ij')

    @cached_property
    def y(self):
        """Cartesian reference coordinates, shaped (2, n_r, n_theta)."""
        rr, tt = self.mesh
        return np.stack([rr * np.cos(tt), rr * np.sin(tt)])

    @cached_property
    def boundary_unit_normal(self):
        return np.stack([np.cos(self.theta), np.sin(self.theta)])

    @property
    def min_spacing(self):
        """Smallest physical node spacing on the reference grid: first radial gap or innermost arc."""
        return min(1 - self.r[1], self.r[-1] * 2 * np.pi / self.n_theta)

    # ----------------- differentiation ----------------- #

    def _half_turn(self, f):
        return np.roll(f, -self.n_theta // 2, axis=-1)

    def dr(self, f):
        return (np.einsum('ik,...kl->...il', self._da, f)
                + np.einsum('ik,...kl->...il', self._db, self._half_turn(f)))

    def drr(self, f):
        return (np.einsum('ik,...kl->...il', self._d2a, f)
                + np.einsum('ik,...kl->...il', self._d2b, self._half_turn(f)))

    def dtheta(self, f, order=1):
        coeffs = np.fft.rfft(f, axis=-1)
        factor = (1j * self.modes) ** order
        if order % 2:
            factor[-1] = 0  # Nyquist mode has no odd derivative on a real grid
        return np.fft.irfft(coeffs * factor, n=self.n_theta, axis=-1)

    def dy(self, f):
        """
        Cartesian reference derivatives (d/dy1, d/dy2) of f, stacked on a new first axis.

        :param np.ndarray f: array with trailing axes (n_r, n_theta)
        :return np.ndarray: shape (2,) + f.shape
        """
        rr, tt = self.mesh
        f_r = self.dr(f)
        f_t = self.dtheta(f) / rr
        return np.stack([np.cos(tt) * f_r - np.sin(tt) * f_t,
                         np.sin(tt) * f_r + np.cos(tt) * f_t])

    def laplacian(self, f):
        rr, _ = self.mesh
        return self.drr(f) + self.dr(f) / rr + self.dtheta(f, order=2) / rr ** 2

    @cached_property
    def mode_operators(self):
        """
        Per-angular-mode radial operators (Dr_m, Drr_m) with the parity of mode m folded in.

        :return list: one (Dr_m, Drr_m) tuple per mode m = 0 .. n_theta/2
        """
        ops = []
        for m in self.modes:
            parity = (-1) ** int(m)
            ops.append((self._da + parity * self._db, self._d2a + parity * self._d2b))
        return ops

    # ----------------- quadrature ----------------- #

    @cached_property
    def radial_weights(self):
        """
        Weights w_j with sum_j w_j F(r_j) = int_0^1 F(r) r dr for even polynomials F of degree <= 2 n_r - 1.

        Built on the full diameter by matching the Chebyshev moments of x on [0, 1], then folded.
        """
        n = self.degree
        moments = np.empty(n + 1)
        for k in range(n + 1):
            unit = np.zeros(k + 1)
            unit[k] = 1
            moments[k] = C.chebval(1.0, C.chebint(C.chebmulx(unit), lbnd=0))
        vander = C.chebvander(self.x_full, n)
        full = np.linalg.solve(vander.T, moments)
        return full[:self.n_r] + full[::-1][:self.n_r]

    @cached_property
    def area_weights(self):
        """Reference area weights per node, shaped (n_r, n_theta); they sum to pi."""
        return np.outer(self.radial_weights, np.full(self.n_theta, 2 * np.pi / self.n_theta))

    @cached_property
    def arc_weights(self):
        """Reference boundary arc weights per boundary node; they sum to 2 pi."""
        return np.full(self.n_theta, 2 * np.pi / self.n_theta)

    def integrate(self, f, weights=None):
        """
        Integrate over the disk, summing over the trailing grid axes.

        :param np.ndarray f: array with trailing axes (n_r, n_theta)
        :param np.ndarray weights: node weights; reference area weights when omitted
        :return: integral, with any leading axes preserved
        """
        w = self.area_weights if weights is None else weights
        return np.sum(f * w, axis=(-2, -1))

    def integrate_boundary(self, f, weights=None):
        """Integrate boundary values shaped (..., n_theta) against arc weights."""
        w = self.arc_weights if weights is None else weights
        return np.sum(f * w, axis=-1)

    # ----------------- spectral coefficients ----------------- #

    @cached_property
    def _inverse_vander(self):
        return np.linalg.inv(C.chebvander(self.x_full, self.degree))

    def coefficients(self, f):
        """
        Chebyshev x Fourier coefficients of grid data.

        Each angular mode is extended to the full diameter with its parity before the Chebyshev transform.

        :param np.ndarray f: array with trailing axes (n_r, n_theta)
        :return np.ndarray: complex array with trailing axes (2 n_r, n_theta/2 + 1)
        """
        fourier = np.fft.rfft(f, axis=-1) / self.n_theta
        parity = (-1.0) ** self.modes
        opposite = (fourier * parity)[..., ::-1, :]
        full = np.concatenate([fourier, opposite], axis=-2)
        return np.einsum('kj,...jm->...km', self._inverse_vander, full)

    @cached_property
    def wavenumber_squared(self):
        """(Chebyshev degree)^2 + (angular mode)^2 per coefficient, shaped (2 n_r, n_theta/2 + 1)."""
        k = np.arange(self.degree + 1)
        return k[:, None] ** 2 + self.modes[None, :] ** 2

    @cached_property
    def upper_third(self):
        """Mask of coefficients in the upper third of either the Chebyshev or the Fourier spectrum."""
        k = np.arange(self.degree + 1)
        return (k[:, None] > 2 * self.degree / 3) | (self.modes[None, :] > self.n_theta / 3)

    @cached_property
    def _vander(self):
        return C.chebvander(self.x_full, self.degree)

    def synthesize(self, coeffs):
        """
        Grid values from Chebyshev x Fourier coefficients; the inverse of coefficients().

        :param np.ndarray coeffs: complex array with trailing axes (2 n_r, n_theta/2 + 1)
        :return np.ndarray: real array with trailing axes (n_r, n_theta)
        """
        full = np.einsum('jk,...km->...jm', self._vander, coeffs)
        return np.fft.irfft(full[..., :self.n_r, :] * self.n_theta, n=self.n_theta, axis=-1)

    def filter_profile(self, strength=FILTER_STRENGTH, order=FILTER_ORDER):
        """
        Exponential filter exp(-strength ((k/N)^order + (m/M)^order)) over Chebyshev degree k and angular mode m.

        The top Chebyshev degree and the Nyquist mode are damped to exp(-strength); low modes are left untouched to
        round-off.
        """
        k = np.arange(self.degree + 1) / self.degree
        m = self.modes / self.modes[-1]
        return np.exp(-strength * (k[:, None] ** order + m[None, :] ** order))

    def smooth(self, f, strength=FILTER_STRENGTH, order=FILTER_ORDER):
        """
        Apply the exponential filter to grid data.

        :param np.ndarray f: array with trailing axes (n_r, n_theta)
        :param float strength: damping exponent of the top modes; 0 returns f unchanged
        :param int order: filter order, even
        :return np.ndarray:
        """
        if strength == 0:
            return np.array(f, dtype=float)
        return self.synthesize(self.coefficients(f) * self.filter_profile(strength, order))
