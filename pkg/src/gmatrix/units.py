"""Approximate units: the (S, eps) net, the norm-approximate sequences, and probes.

Three constructions live here:

* :func:`net_element` builds ``sum_{y in S} E_y (x) E_y / m(B(y, delta))``,
  which converges column-wise from the right and row-wise from the left.
* :func:`norm_unit_seq` builds the sequence ``G_n(x, y) / m(B(y, delta_n))``
  (right), ``/ m(B(x, delta_n))`` (left) or either one when ball masses do
  not depend on the center (two-sided).
* :func:`unboundedness_probe` shows the sup norms of those sequences blow up
  on infinite models while finite spaces have an honest unit.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import algebra
from .algebra import Kernel, convolve, sup_norm
from .errors import DisjointBallsImpossible, NoDeltaPrime
from .report import Report
from .space import (DiscreteSpace, ball_measure, ball_measures, bump, check_conditions,
                    find_delta_prime, ramp)

SIDES = ("right", "left", "two_sided")
TOPOLOGIES = ("norm", "cc", "rc", "pc")
SLACK_CONSTANT = 10.0
NET_RADIUS_STEPS = 24


@dataclass
class UnitNet:
    """A finite stretch of an approximate unit.

    ``params`` holds ``deltas``, ``delta_primes`` and ``alphas`` (per-node
    ball masses, one array per element) for the sequences, or ``chain``
    (a list of ``(S, eps, delta)``) for the net.
    """

    kind: str
    elements: list
    params: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, n):
        return self.elements[n]


# -- the (S, eps) net -------------------------------------------------------

def net_radius(space: DiscreteSpace, S: Sequence[int], eps: float) -> float:
    """Largest ``eps 2**-k`` (k = 1..24) whose doubled balls around ``S`` are disjoint
    and which admits an outer radius."""
    S = list(dict.fromkeys(int(s) for s in S))
    if eps <= 0:
        raise ValueError("eps must be positive")
    for k in range(1, NET_RADIUS_STEPS + 1):
        delta = eps * 2.0**-k
        near = space.distances[S] < 2 * delta
        if np.any(near.sum(axis=0) > 1):
            continue
        try:
            find_delta_prime(space, delta)
        except NoDeltaPrime:
            continue
        return delta
    raise DisjointBallsImpossible(f"no radius below eps={eps} separates the centers {S}")


def net_element(space: DiscreteSpace, S: Sequence[int], eps: float) -> Kernel:
    """``u_{S,eps} = sum_{y in S} E_y (x) E_y / m(B(y, delta))`` with ``delta`` from :func:`net_radius`."""
    delta = net_radius(space, S, eps)
    dp = find_delta_prime(space, delta)
    vals = np.zeros((space.size, space.size))
    for y in dict.fromkeys(int(s) for s in S):
        e = bump(space, y, delta, dp)
        vals += np.outer(e, e) / ball_measure(space, y, delta)
    return Kernel(space, vals)


def net_chain(space: DiscreteSpace, pairs: Sequence[tuple]) -> UnitNet:
    """Materialize the net along a finite chain of ``(S, eps)`` pairs."""
    elements, chain = [], []
    for S, eps in pairs:
        elements.append(net_element(space, S, eps))
        chain.append((list(S), float(eps), net_radius(space, S, eps)))
    return UnitNet("net_S_eps", elements, {"chain": chain})


# -- norm-approximate sequences ---------------------------------------------

def two_variable_bump(space: DiscreteSpace, delta: float, delta_prime: float) -> np.ndarray:
    """``G(x, y)``: 1 where ``d <= delta``, 0 where ``d >= delta'``, radial ramp between."""
    return ramp(space.distances, delta, delta_prime)


def norm_unit_seq(space: DiscreteSpace, deltas: Sequence[float], side: str = "right") -> UnitNet:
    """Norm-approximate unit sequence along ``deltas``.

    Raises :class:`~gmatrix.errors.ConditionFailed` when C1 (one-sided) or
    C2 (two-sided) fails for the radii.
    """
    if side not in SIDES:
        raise ValueError(f"side must be one of {SIDES}")
    deltas = np.asarray(deltas, dtype=float)
    check_conditions(space, deltas).require("C2" if side == "two_sided" else "C1")
    elements, dps, alphas = [], [], []
    for delta in deltas:
        dp = find_delta_prime(space, delta)
        G = two_variable_bump(space, delta, dp)
        alpha = ball_measures(space, delta)
        if side == "left":
            vals = G / alpha[:, None]
        else:
            # under C2 alpha is constant, so this is also the left element
            vals = G / alpha[None, :]
        elements.append(Kernel(space, vals))
        dps.append(dp)
        alphas.append(alpha)
    kind = {"right": "right_seq", "left": "left_seq", "two_sided": "two_sided_seq"}[side]
    return UnitNet(kind, elements, {"deltas": deltas, "delta_primes": np.array(dps), "alphas": alphas})


# -- test kernels -------------------------------------------------------------

def modulus_of_continuity(f: Kernel, t: float, variable: str = "second") -> float:
    """``max |f(x, z) - f(x, z')|`` over ``d(z, z') < t`` (or the same in the first slot)."""
    vals = f.values if variable == "second" else f.values.T
    zi, zj = np.nonzero(np.triu(f.space.distances < t, k=1))
    if zi.size == 0:
        return 0.0
    out = 0.0
    for start in range(0, zi.size, 4096):
        a, b = zi[start:start + 4096], zj[start:start + 4096]
        out = max(out, float(np.abs(vals[:, a] - vals[:, b]).max()))
    return out


@dataclass
class TestKernel:
    name: str
    kernel: Kernel
    # Lipschitz constant in each variable separately (None when not meaningful)
    lipschitz: float | None


def lipschitz_battery(space: DiscreteSpace, seed: int = 42, smooth_only: bool = False) -> list:
    """Fixed, seeded kernels used by the convergence checks.

    Constants, coordinate kernels, a distance-based kernel (skipped when
    ``smooth_only``) and one random smooth kernel.
    """
    rng = np.random.default_rng(seed)
    two_pi = 2 * np.pi
    out = [TestKernel("const", Kernel.ones(space), 0.0)]
    if space.kind == "finite":
        out.append(TestKernel("random", Kernel.random(space, rng), None))
        return out
    if space.kind == "interval":
        out.append(TestKernel("coord", Kernel.from_function(space, lambda x, y: (x + y) / 2), 0.5))
        if not smooth_only:
            out.append(TestKernel("dist", Kernel.from_distance(space, lambda d: d), 1.0))
        c = rng.uniform(-1, 1, (3, 3)) / 9
        smooth = Kernel.from_function(
            space, lambda x, y: sum(c[p, q] * np.cos(np.pi * p * x) * np.cos(np.pi * q * y)
                                    for p in range(3) for q in range(3)))
        lip = float(np.pi * max(np.abs(c * np.arange(3)[None, :]).sum(),
                                np.abs(c * np.arange(3)[:, None]).sum()))
        out.append(TestKernel("smooth", smooth, lip))
        return out

    if space.kind == "circle":
        first = lambda x: x
        second = lambda y: y
    else:
        first = lambda x: x[..., 0]
        second = lambda y: y[..., 1]
    out.append(TestKernel(
        "coord", Kernel.from_function(
            space, lambda x, y: (np.cos(two_pi * first(x)) + np.sin(two_pi * second(y))) / 2),
        np.pi))
    if not smooth_only:
        out.append(TestKernel("dist", Kernel.from_distance(space, lambda d: np.sin(two_pi * d)), two_pi))
    modes = np.arange(-2, 3)
    c = (rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5)))
    c /= np.abs(c).sum()
    smooth = Kernel.from_function(
        space, lambda x, y: sum(c[a, b] * np.exp(two_pi * 1j * (p * first(x) + q * second(y)))
                                for a, p in enumerate(modes) for b, q in enumerate(modes)))
    lip = float(two_pi * max((np.abs(c) * np.abs(modes)[None, :]).sum(),
                             (np.abs(c) * np.abs(modes)[:, None]).sum()))
    out.append(TestKernel("smooth", smooth, lip))
    return out


# -- convergence --------------------------------------------------------------

def _distance(diff: Kernel, topology: str, probe):
    if topology == "norm":
        return sup_norm(diff)
    if topology == "cc":
        return algebra.cc_seminorm(diff, probe) if probe is not None else float(algebra.cc_seminorms(diff).max())
    if topology == "rc":
        return algebra.rc_seminorm(diff, probe) if probe is not None else float(algebra.rc_seminorms(diff).max())
    if topology == "pc":
        if probe is None:
            return sup_norm(diff)
        return algebra.pc_seminorm(diff, *probe)
    raise ValueError(f"topology must be one of {TOPOLOGIES}")


def defects(f: Kernel, net: UnitNet, side: str = "right", topology: str = "norm", probe=None) -> np.ndarray:
    """Distance between ``f * u_n`` (right) or ``u_n * f`` (left) and ``f``, per element."""
    out = []
    for u in net:
        prod = convolve(u, f) if side == "left" else convolve(f, u)
        out.append(_distance(prod - f, topology, probe))
    return np.array(out)


def norm_bound(f: Kernel, net: UnitNet, lipschitz: float, slack_constant: float = SLACK_CONSTANT) -> np.ndarray:
    """``L * 2 delta'_n + delta_n * |f| + C / N`` for each sequence element."""
    p = net.params
    return (lipschitz * 2 * p["delta_primes"] + p["deltas"] * sup_norm(f)
            + slack_constant / f.space.resolution)


def convergence_report(f: Kernel, net: UnitNet, side: str = "right", topology: str = "norm",
                       probe=None, lipschitz: float | None = None, name: str = "f",
                       slack_constant: float = SLACK_CONSTANT) -> Report:
    """Per-element defects of ``net`` acting on ``f``, with the analytic bound when available.

    For sequences under the norm topology with a known Lipschitz constant the
    report asserts ``defect_n <= L 2 delta'_n + delta_n |f| + C/N``.
    """
    d = defects(f, net, side, topology, probe)
    report = Report(suite="units", space=f.space.summary(),
                    meta={"side": side, "topology": topology, "slack_constant": slack_constant})
    if "deltas" in net.params and topology == "norm" and lipschitz is not None:
        bound = norm_bound(f, net, lipschitz, slack_constant)
        report.add(f"{name}:{side}:{topology}:defects", d, bound, bool(np.all(d <= bound)))
    else:
        report.add(f"{name}:{side}:{topology}:defects", d, None, True, informational=True)
    report.add(f"{name}:{side}:{topology}:nonincreasing", d, None,
               bool(np.all(np.diff(d) <= 1e-14)), informational=lipschitz is None)
    return report


def net_pc_bound(f: Kernel, eps: float, delta: float) -> float:
    """``r + r |f|`` with ``r = max(omega_f(eps), eps)`` for the (S, eps) net."""
    r = max(modulus_of_continuity(f, eps), eps)
    return r + r * sup_norm(f)


# -- unboundedness ----------------------------------------------------------

def unboundedness_probe(space: DiscreteSpace, deltas: Sequence[float] | None = None) -> Report:
    """Sup norms of the right unit sequence, or the exact unit on a finite space."""
    report = Report(suite="units", space=space.summary())
    if algebra.has_unit(space):
        u = algebra.unit(space)
        expected = 1.0 / float(space.weights.min())
        report.add("unit exists", sup_norm(u), expected, abs(sup_norm(u) - expected) <= 1e-12 * expected)
        return report
    if deltas is None:
        raise ValueError("infinite kinds need a radius sequence")
    net = norm_unit_seq(space, deltas, "right")
    norms = np.array([sup_norm(e) for e in net])
    inv_alpha = np.array([1.0 / a.min() for a in net.params["alphas"]])
    report.add("sup_norm == 1/alpha", norms, inv_alpha,
               bool(np.allclose(norms, inv_alpha, rtol=1e-9, atol=0)))
    report.add("strictly increasing", norms, None, bool(np.all(np.diff(norms) > 0)))
    return report
