"""Kernels as integral operators on sampled functions.

``rep_apply(f, g)(x) = sum_y f(x, y) g(y) w_y`` is the Nystrom discretization
of the integral operator with kernel ``f``.  Vector-valued samples (shape
``(n, d)``) are acted on componentwise.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import Kernel, convolve, involve, sup_norm
from .errors import SpaceMismatch
from .report import Report

MODES = ("cx", "l1", "l2", "linf")


def _samples(f: Kernel, g) -> np.ndarray:
    g = np.asarray(g, dtype=complex)
    if g.shape[0] != f.space.size:
        raise SpaceMismatch(f"sampled function has {g.shape[0]} values, space has {f.space.size} nodes")
    return g


def _weights_like(w, g):
    return w if g.ndim == 1 else w.reshape((-1,) + (1,) * (g.ndim - 1))


def rep_matrix(f: Kernel) -> np.ndarray:
    """Matrix of the represented operator: ``f[i, j] w_j``."""
    return f.values * f.space.weights[None, :]


def rep_apply(f: Kernel, g) -> np.ndarray:
    g = _samples(f, g)
    return f.values @ (_weights_like(f.space.weights, g) * g)


def act_left(f: Kernel, g) -> np.ndarray:
    """``(f * g)(x) = sum_z f(x, z) g(z) w_z`` for scalar or vector-valued ``g``."""
    return rep_apply(f, g)


def act_right(f: Kernel, g) -> np.ndarray:
    """``(g * f)(y) = sum_z g(z) f(z, y) w_z``."""
    g = _samples(f, g)
    return f.values.T @ (_weights_like(f.space.weights, g) * g)


def inner(space, u, v) -> complex:
    """Weighted inner product ``sum_i w_i conj(u_i) v_i``."""
    return complex(np.sum(space.weights * np.conj(u) * v))


def op_norm(f: Kernel, mode: str = "cx") -> float:
    """Operator norm of the represented operator.

    ``cx``/``linf``: largest weighted row sum; ``l1``: largest weighted
    column sum; ``l2``: largest singular value of ``sqrt(w_i) f sqrt(w_j)``.
    """
    w = f.space.weights
    a = np.abs(f.values)
    if mode in ("cx", "linf"):
        return float((a @ w).max())
    if mode == "l1":
        return float((w @ a).max())
    if mode == "l2":
        s = np.sqrt(w)
        return float(np.linalg.norm(s[:, None] * f.values * s[None, :], 2))
    raise ValueError(f"mode must be one of {MODES}")


def adjoint_check(f: Kernel, trials: int = 20, seed: int = 0) -> Report:
    """``<f u, v> == <u, f* v>`` on random complex samples."""
    rng = np.random.default_rng(seed)
    fs = involve(f)
    n = f.space.size
    worst = 0.0
    for _ in range(trials):
        u = rng.normal(size=n) + 1j * rng.normal(size=n)
        v = rng.normal(size=n) + 1j * rng.normal(size=n)
        lhs = inner(f.space, rep_apply(f, u), v)
        rhs = inner(f.space, u, rep_apply(fs, v))
        worst = max(worst, abs(lhs - rhs))
    report = Report(suite="representation", space=f.space.summary())
    report.add("L2 adjoint defect", worst, 1e-12, worst <= 1e-12)
    return report


@dataclass
class SpectralDecay:
    values: np.ndarray
    # singular mass beyond the first k, relative to the total
    tail_mass: float

    def as_dict(self):
        return {"values": self.values.tolist(), "tail_mass": self.tail_mass}


def singular_values(f: Kernel) -> np.ndarray:
    s = np.sqrt(f.space.weights)
    return np.linalg.svd(s[:, None] * f.values * s[None, :], compute_uv=False)


def spectral_decay(f: Kernel, k: int) -> SpectralDecay:
    """Leading ``k`` singular values of the L2 operator and the relative tail mass."""
    if not 0 <= k <= f.space.size:
        raise ValueError("k must lie between 0 and the node count")
    sv = singular_values(f)
    total = float(sv.sum())
    tail = float(sv[k:].sum() / total) if total > 0 else 0.0
    return SpectralDecay(sv[:k], tail)


def representation_report(f: Kernel, g: Kernel) -> Report:
    """Multiplicativity, adjointness and norm comparisons for a pair of kernels."""
    report = Report(suite="representation", space=f.space.summary())
    gap = float(np.abs(rep_matrix(convolve(f, g)) - rep_matrix(f) @ rep_matrix(g)).max())
    report.add("rho(f*g) == rho(f) rho(g)", gap, 1e-12, gap <= 1e-12)
    report.extend(adjoint_check(f))
    for mode in MODES:
        value = op_norm(f, mode)
        report.add(f"op_norm[{mode}] <= sup_norm", value, sup_norm(f) + 1e-12, value <= sup_norm(f) + 1e-12)
    ratio = op_norm(f, "cx") / sup_norm(f) if sup_norm(f) else 1.0
    report.add("cx op_norm / sup_norm", ratio, 1.0, True, informational=True)
    l2_gap = abs(op_norm(involve(f), "l2") - op_norm(f, "l2"))
    report.add("l2 norm of f* == l2 norm of f", l2_gap, 1e-12, l2_gap <= 1e-12 * max(1.0, op_norm(f, "l2")))
    return report
