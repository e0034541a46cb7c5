"""Sampled kernels and the weighted convolution algebra over a discrete space.

A :class:`Kernel` stores ``f(x_i, x_j)`` on all node pairs.  Convolution is
the weighted matrix product ``sum_k f[i, k] w_k g[k, j]`` and the involution
is the conjugate transpose, so the sampled algebra is the Nystrom image of
the continuous one.  ``f @ g`` is shorthand for :func:`convolve`.
"""
from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import SpaceMismatch, UnitNotAvailable
from .space import DiscreteSpace


class Kernel:
    """A generalized matrix sampled on the nodes of ``space``."""

    __slots__ = ("space", "values")

    def __init__(self, space: DiscreteSpace, values):
        values = np.array(values, dtype=complex)
        n = space.size
        if values.shape != (n, n):
            raise ValueError(f"kernel grid has shape {values.shape}, expected {(n, n)}")
        if not np.all(np.isfinite(values)):
            raise ValueError("kernel entries must be finite")
        values.setflags(write=False)
        self.space = space
        self.values = values

    # -- constructors --------------------------------------------------------
    @classmethod
    def zeros(cls, space):
        return cls(space, np.zeros((space.size, space.size)))

    @classmethod
    def ones(cls, space):
        return cls(space, np.ones((space.size, space.size)))

    @classmethod
    def from_function(cls, space, fn: Callable):
        """Sample ``fn(x, y)``; coordinates arrive broadcast as column/row arrays.

        For the torus, ``x`` and ``y`` have a trailing axis of length 2.
        """
        p = np.asarray(space.points, dtype=float)
        if p.ndim == 1:
            x, y = p[:, None], p[None, :]
        else:
            x, y = p[:, None, :], p[None, :, :]
        return cls(space, np.broadcast_to(fn(x, y), (space.size, space.size)))

    @classmethod
    def from_distance(cls, space, profile: Callable):
        """Kernel ``profile(d(x, y))``."""
        return cls(space, profile(space.distances))

    @classmethod
    def outer(cls, space, a, b):
        """Elementary tensor ``(x, y) -> a(x) b(y)``."""
        a = np.asarray(a, dtype=complex).ravel()
        b = np.asarray(b, dtype=complex).ravel()
        return cls(space, np.outer(a, b))

    @classmethod
    def random(cls, space, rng: np.random.Generator, complex_: bool = True, scale: float = 1.0):
        """Entries uniform in the unit disc (or ``[-1, 1]``) times ``scale``."""
        shape = (space.size, space.size)
        if complex_:
            r = np.sqrt(rng.uniform(0, 1, shape))
            vals = r * np.exp(2j * np.pi * rng.uniform(0, 1, shape))
        else:
            vals = rng.uniform(-1, 1, shape)
        return cls(space, scale * vals)

    # -- arithmetic ----------------------------------------------------------
    def _check(self, other):
        if not isinstance(other, Kernel):
            return NotImplemented
        if other.space is not self.space:
            raise SpaceMismatch("kernels live on different spaces")
        return other

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return Kernel(self.space, self.values + other.values)

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return Kernel(self.space, self.values - other.values)

    def __neg__(self):
        return Kernel(self.space, -self.values)

    def __mul__(self, c):
        if isinstance(c, Kernel):
            return NotImplemented
        return Kernel(self.space, self.values * c)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return Kernel(self.space, self.values / c)

    def __matmul__(self, other):
        return convolve(self, other)

    @property
    def star(self):
        return involve(self)

    def __repr__(self):
        return f"Kernel(n={self.space.size}, sup={sup_norm(self):.6g})"


def _same_space(f, g):
    if f.space is not g.space:
        raise SpaceMismatch("kernels live on different spaces")


def convolve(f: Kernel, g: Kernel) -> Kernel:
    """``(f * g)(x, y) = sum_z f(x, z) g(z, y) m{z}``."""
    _same_space(f, g)
    return Kernel(f.space, (f.values * f.space.weights[None, :]) @ g.values)


def involve(f: Kernel) -> Kernel:
    return Kernel(f.space, f.values.conj().T)


def commutator(f: Kernel, g: Kernel) -> Kernel:
    return convolve(f, g) - convolve(g, f)


def sup_norm(f: Kernel) -> float:
    return float(np.abs(f.values).max())


def cc_seminorm(f: Kernel, y: int) -> float:
    """Column seminorm ``max_x |f(x, y)|``."""
    return float(np.abs(f.values[:, y]).max())


def rc_seminorm(f: Kernel, x: int) -> float:
    """Row seminorm ``max_y |f(x, y)|``."""
    return float(np.abs(f.values[x, :]).max())


def pc_seminorm(f: Kernel, x: int, y: int) -> float:
    return float(abs(f.values[x, y]))


def cc_seminorms(f: Kernel) -> np.ndarray:
    return np.abs(f.values).max(axis=0)


def rc_seminorms(f: Kernel) -> np.ndarray:
    return np.abs(f.values).max(axis=1)


def has_unit(space: DiscreteSpace) -> bool:
    return space.kind == "finite" and space.full_support


def unit(space: DiscreteSpace) -> Kernel:
    """The unit ``diag(1 / w_i)``; exists only on finite spaces of full support."""
    if space.kind != "finite":
        raise UnitNotAvailable(f"{space.kind} spaces are infinite models; the algebra has no unit")
    if not space.full_support:
        raise UnitNotAvailable("a node of zero weight rules out a unit")
    return Kernel(space, np.diag(1.0 / space.weights))


def _require_finite(A, space):
    if space.kind != "finite":
        raise ValueError("the matrix isomorphism needs a finite space")
    if not space.full_support:
        raise UnitNotAvailable("the matrix isomorphism needs strictly positive weights")
    A = np.asarray(A, dtype=complex)
    if A.shape != (space.size, space.size):
        raise ValueError(f"matrix has shape {A.shape}, expected {(space.size, space.size)}")
    return A


def finite_matrix_iso(A, space: DiscreteSpace, scaling: str = "symmetric") -> Kernel:
    """Carry an ``n x n`` matrix into the kernel algebra of a finite space.

    ``scaling="symmetric"`` gives ``A[i, j] / sqrt(w_i w_j)``, a
    *-isomorphism for every weight vector.  ``scaling="row"`` gives
    ``A[i, j] / w_i``; it is multiplicative and sends the identity to the
    unit, but it intertwines the involutions only when the weights are
    uniform (both maps agree in that case).
    """
    A = _require_finite(A, space)
    w = space.weights
    if scaling == "symmetric":
        s = np.sqrt(w)
        return Kernel(space, A / s[:, None] / s[None, :])
    if scaling == "row":
        return Kernel(space, A / w[:, None])
    raise ValueError(f"unknown scaling {scaling!r}")


def finite_matrix_iso_inv(f: Kernel, scaling: str = "symmetric") -> np.ndarray:
    space = f.space
    _require_finite(f.values, space)
    w = space.weights
    if scaling == "symmetric":
        s = np.sqrt(w)
        return f.values * s[:, None] * s[None, :]
    if scaling == "row":
        return f.values * w[:, None]
    raise ValueError(f"unknown scaling {scaling!r}")
