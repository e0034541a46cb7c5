"""Derivations of the kernel algebra and their approximation by inner ones.

Finite-rank tensors ``F = sum_t a_t (x) b_t`` stand in for the injective
tensor product.  ``tensor_lambda`` multiplies the factors, ``tensor_gamma``
applies the derivation to the second factor first.  For a space where ball
masses do not depend on the center, ``gn_hat`` builds a tensor whose
product is the two-sided unit element ``G_n / alpha_n``, and
``K_n = tensor_gamma(gn_hat(n), D)`` satisfies ``h K_n - K_n h -> D(h)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import Kernel, convolve, finite_matrix_iso, sup_norm
from .errors import FactorizationOverflow, SpaceMismatch
from .report import Report
from .space import DiscreteSpace, ball_measures, check_conditions, find_delta_prime
from .units import two_variable_bump

FACTOR_TOL = 1e-12


@dataclass
class TensorKernel:
    """Finite sum of elementary tensors ``a_t (x) b_t`` of kernels on one space."""

    terms: list = field(default_factory=list)
    space: DiscreteSpace | None = None

    def __post_init__(self):
        self.terms = [(a, b) for a, b in self.terms]
        for a, b in self.terms:
            if self.space is None:
                self.space = a.space
            if a.space is not self.space or b.space is not self.space:
                raise SpaceMismatch("tensor terms live on different spaces")

    @property
    def rank(self) -> int:
        return len(self.terms)

    def left_multiply(self, h: Kernel) -> "TensorKernel":
        """``h * F``: multiply every first factor on the left."""
        return TensorKernel([(convolve(h, a), b) for a, b in self.terms], self.space)

    def right_multiply(self, h: Kernel) -> "TensorKernel":
        """``F * h``: multiply every second factor on the right."""
        return TensorKernel([(a, convolve(b, h)) for a, b in self.terms], self.space)

    def __add__(self, other):
        return TensorKernel(self.terms + other.terms, self.space or other.space)


class InnerDerivation:
    """``D(f) = f * omega - omega * f``."""

    kind = "inner"

    def __init__(self, omega: Kernel):
        self.omega = omega

    def __call__(self, f: Kernel) -> Kernel:
        return convolve(f, self.omega) - convolve(self.omega, f)

    def describe(self):
        return {"kind": self.kind, "omega_sup": sup_norm(self.omega)}


class GaugeDerivation:
    """``D(f)(x, y) = i (phi(x) - phi(y)) f(x, y)`` for a real sampled ``phi``.

    This is the generator of the gauge group ``t -> exp(i t phi)^``.
    """

    kind = "gauge_generator"

    def __init__(self, phi):
        phi = np.asarray(phi, dtype=float).ravel()
        self.phi = phi

    def __call__(self, f: Kernel) -> Kernel:
        if self.phi.shape != (f.space.size,):
            raise SpaceMismatch("phi needs one value per node")
        return Kernel(f.space, 1j * (self.phi[:, None] - self.phi[None, :]) * f.values)

    def describe(self):
        return {"kind": self.kind, "phi_sup": float(np.abs(self.phi).max())}


def tensor_lambda(F: TensorKernel) -> Kernel:
    """``sum_t a_t * b_t``."""
    if F.space is None:
        raise ValueError("an empty tensor needs an explicit space")
    out = np.zeros((F.space.size, F.space.size), dtype=complex)
    w = F.space.weights
    for a, b in F.terms:
        out += (a.values * w[None, :]) @ b.values
    return Kernel(F.space, out)


def tensor_gamma(F: TensorKernel, D) -> Kernel:
    """``sum_t a_t * D(b_t)``."""
    if F.space is None:
        raise ValueError("an empty tensor needs an explicit space")
    out = np.zeros((F.space.size, F.space.size), dtype=complex)
    w = F.space.weights
    for a, b in F.terms:
        out += (a.values * w[None, :]) @ D(b).values
    return Kernel(F.space, out)


def gn_hat(space: DiscreteSpace, n: int, deltas: Sequence[float]) -> TensorKernel:
    """Tensor with ``tensor_lambda`` equal to ``G_n / alpha_n``.

    ``G_n`` is factored as ``sum_t u_t(x) v_t(y)`` by a singular value
    decomposition (terms below ``1e-12 sigma_max`` dropped); the factors are
    ``(x, z) -> u_t(x) / alpha_n`` and ``(z', y) -> v_t(y)``.
    """
    deltas = np.asarray(deltas, dtype=float)
    check_conditions(space, deltas).require("C2")
    delta = float(deltas[n])
    dp = find_delta_prime(space, delta)
    alpha = float(ball_measures(space, delta)[0])
    G = two_variable_bump(space, delta, dp)
    u, s, vh = np.linalg.svd(G)
    rank = int(np.sum(s > FACTOR_TOL * s[0]))
    if rank > space.size:
        raise FactorizationOverflow(f"factorization needs {rank} terms on {space.size} nodes")
    one = np.ones(space.size)
    terms = [(Kernel(space, np.outer(u[:, t] * s[t] / alpha, one)), Kernel(space, np.outer(one, vh[t])))
             for t in range(rank)]
    return TensorKernel(terms, space)


def finite_diagonal(space: DiscreteSpace) -> TensorKernel:
    """``sum_i e_i0 (x) e_0i`` over the matrix units of a finite space.

    Its product is the unit and ``h F == F h`` as tensors, so
    ``tensor_gamma(F, D)`` implements ``D`` exactly.
    """
    n = space.size

    def matrix_unit(i, j):
        e = np.zeros((n, n))
        e[i, j] = 1.0
        return finite_matrix_iso(e, space)

    return TensorKernel([(matrix_unit(i, 0), matrix_unit(0, i)) for i in range(n)], space)


def gn_hat_sequence(space, deltas):
    return [gn_hat(space, n, deltas) for n in range(len(deltas))]


def k_sequence(space: DiscreteSpace, D, deltas: Sequence[float]) -> list:
    """``K_n = tensor_gamma(gn_hat(n), D)`` for every radius."""
    return [tensor_gamma(gn_hat(space, n, deltas), D) for n in range(len(deltas))]


def derivation_defect(h: Kernel, K: Kernel, D) -> float:
    """``sup |h * K - K * h - D(h)|``."""
    return sup_norm(convolve(h, K) - convolve(K, h) - D(h))


def approx_inner_run(D, battery: Sequence, deltas: Sequence[float], space: DiscreteSpace | None = None,
                     n_max: int | None = None, names: Sequence[str] | None = None) -> Report:
    """Defects ``sup |h K_n - K_n h - D(h)|`` for every battery kernel and ``n <= n_max``.

    Passes when, for every kernel, the last defect is at most a quarter of
    the first.
    """
    battery = list(battery)
    space = space or battery[0].space
    deltas = np.asarray(deltas, dtype=float)
    if n_max is not None:
        deltas = deltas[: n_max + 1]
    names = list(names) if names is not None else [f"h{i}" for i in range(len(battery))]
    Ks = k_sequence(space, D, deltas)
    matrix = np.array([[derivation_defect(h, K, D) for K in Ks] for h in battery])
    report = Report(suite="derivation", space=space.summary(),
                    meta={"derivation": D.describe(), "deltas": deltas})
    for name, row in zip(names, matrix):
        report.add(f"{name}: defect ratio last/first", row, 0.25,
                   bool(row[-1] <= row[0] / 4), defects=row)
    return report
