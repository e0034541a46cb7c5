"""Center, ideals, functorial maps, gauge automorphisms, measure recovery."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import null_space

from . import algebra
from .algebra import Kernel, commutator, convolve, involve, sup_norm
from .errors import (NotMeasurePreserving, SpaceError, SpaceMismatch, SupportViolation,
                     UnitNotAvailable)
from .report import Report
from .space import (DiscreteSpace, ball_measure, build_space, bump, find_delta_prime, jitter,
                    ramp)

RANK_TOL = 1e-10
ORTHO_TOL = 1e-10
MEASURE_TOL = 1e-10
MEMBER_TOL = 1e-10
UNIMODULAR_TOL = 1e-12


# -- subspaces of sampled C(X) ----------------------------------------------

@dataclass(eq=False)
class Subspace:
    """Finite-dimensional subspace of sampled functions, orthonormal basis rows.

    Inner product ``<u, v> = sum_i w_i conj(u_i) v_i``.
    """

    space: DiscreteSpace
    basis: np.ndarray  # (dim, n)

    def __post_init__(self):
        self.basis = np.asarray(self.basis, dtype=complex).reshape(-1, self.space.size)
        gram = (self.basis.conj() * self.space.weights) @ self.basis.T
        if not np.allclose(gram, np.eye(self.dim), atol=ORTHO_TOL, rtol=0):
            raise ValueError("basis is not orthonormal under the weighted inner product")

    @property
    def dim(self) -> int:
        return int(self.basis.shape[0])

    @classmethod
    def span(cls, space: DiscreteSpace, vectors, tol: float = RANK_TOL) -> "Subspace":
        """Span of sampled functions (rows of ``vectors``); rank cut at ``tol * sigma_max``."""
        vectors = np.asarray(vectors, dtype=complex).reshape(-1, space.size)
        if vectors.shape[0] == 0:
            return cls(space, np.zeros((0, space.size)))
        root_w = np.sqrt(space.weights)
        u, s, _ = np.linalg.svd((vectors * root_w).T, full_matrices=False)
        if s.size == 0 or s[0] == 0:
            return cls(space, np.zeros((0, space.size)))
        rank = int(np.sum(s > tol * s[0]))
        return cls(space, (u[:, :rank] / root_w[:, None]).T)

    @classmethod
    def full(cls, space):
        return cls.span(space, np.eye(space.size))

    @classmethod
    def zero(cls, space):
        return cls(space, np.zeros((0, space.size)))

    def conj(self) -> "Subspace":
        return Subspace(self.space, self.basis.conj())

    def projector(self) -> np.ndarray:
        """Matrix ``P`` with ``P v`` the weighted orthogonal projection of ``v``."""
        return self.basis.T @ (self.basis.conj() * self.space.weights)

    def contains(self, v, tol: float = MEMBER_TOL) -> bool:
        v = np.asarray(v, dtype=complex)
        return bool(np.abs(self.projector() @ v - v).max() <= tol * max(1.0, np.abs(v).max()))

    def same_as(self, other: "Subspace", tol: float = MEMBER_TOL) -> bool:
        if self.dim != other.dim:
            return False
        return bool(np.abs(self.projector() - other.projector()).max() <= tol)


class IdealProjector:
    """Projection of kernels onto ``R_V`` (columns in ``V``) or ``L_V`` (rows in ``V``)."""

    def __init__(self, V: Subspace, side: str):
        if side not in ("right", "left"):
            raise ValueError("side must be 'right' or 'left'")
        self.V = V
        self.side = side
        self._P = V.projector()

    def project(self, f: Kernel) -> Kernel:
        if f.space is not self.V.space:
            raise SpaceMismatch("kernel and subspace live on different spaces")
        if self.side == "right":
            return Kernel(f.space, self._P @ f.values)
        return Kernel(f.space, f.values @ self._P.T)

    __call__ = project

    def contains(self, f: Kernel, tol: float = MEMBER_TOL) -> bool:
        scale = max(1.0, sup_norm(f))
        return sup_norm(self.project(f) - f) <= tol * scale

    @property
    def dim(self) -> int:
        return self.V.dim * self.V.space.size


def ideal_RV(V: Subspace) -> IdealProjector:
    """Right ideal of kernels whose every column ``f(., y)`` lies in ``V``."""
    return IdealProjector(V, "right")


def ideal_LV(V: Subspace) -> IdealProjector:
    """Left ideal of kernels whose every row ``f(x, .)`` lies in ``V``."""
    return IdealProjector(V, "left")


def column_space(generators: Sequence[Kernel], tol: float = RANK_TOL) -> Subspace:
    """Span of all columns of all generators."""
    if not generators:
        raise ValueError("need at least one generator")
    space = generators[0].space
    cols = np.concatenate([g.values.T for g in generators], axis=0)
    return Subspace.span(space, cols, tol)


def row_space(generators: Sequence[Kernel], tol: float = RANK_TOL) -> Subspace:
    space = generators[0].space
    rows = np.concatenate([g.values for g in generators], axis=0)
    return Subspace.span(space, rows, tol)


# -- center -------------------------------------------------------------------

def matrix_units(space: DiscreteSpace) -> list:
    n = space.size
    out = []
    for k in range(n):
        for l in range(n):
            e = np.zeros((n, n))
            e[k, l] = 1.0
            out.append(Kernel(space, e))
    return out


def center_exact(space: DiscreteSpace) -> list:
    """Basis of the center, found as the common solution of ``f * e = e * f``."""
    if space.kind != "finite":
        raise ValueError("center_exact needs a finite space; use center_defect")
    n = space.size
    w = space.weights
    blocks = []
    # f * e_kl - e_kl * f is linear in vec(f); build its matrix column by column
    eye = np.eye(n * n)
    for e in matrix_units(space):
        rows = []
        for idx in range(n * n):
            f = eye[idx].reshape(n, n)
            rows.append(((f * w) @ e.values - (e.values * w) @ f).ravel())
        blocks.append(np.array(rows).T)
    basis = null_space(np.concatenate(blocks, axis=0), rcond=RANK_TOL)
    out = []
    for col in basis.T:
        vals = col.reshape(n, n)
        if algebra.has_unit(space):
            u = np.diag(1.0 / w)
            # fix the scale against the unit when the vector is proportional to it
            c = np.vdot(u.ravel(), vals.ravel()) / np.vdot(u.ravel(), u.ravel())
            if np.abs(vals - c * u).max() <= 1e-9 * np.abs(vals).max():
                vals = u
        out.append(Kernel(space, vals))
    return out


def _probe_pairs(space, probe_count):
    d = space.distances
    order = np.argsort(-d, axis=None, kind="stable")
    pairs = []
    for flat in order:
        x, y = divmod(int(flat), space.size)
        if x < y:
            pairs.append((x, y))
        if len(pairs) >= probe_count:
            break
    return pairs


def probe_kernels(space: DiscreteSpace, x: int, y: int, delta: float):
    """``g = E_x (x) E_x / m(B_x)`` and ``h = E_x (x) E_y / m(B_x)`` at radius ``delta``."""
    dp = find_delta_prime(space, delta)
    ex = bump(space, x, delta, dp)
    ey = bump(space, y, delta, dp)
    mass = ball_measure(space, x, delta)
    return Kernel.outer(space, ex, ex) / mass, Kernel.outer(space, ex, ey) / mass


def center_defect(f: Kernel, probe_count: int = 1, halvings: int = 4) -> float:
    """Largest commutator of ``f`` against the probe kernels ``g`` and ``h_delta``.

    Probes use the ``probe_count`` most distant node pairs and radii
    ``d(x, y) / 8 * 2**-k`` for ``k = 0..halvings`` (jittered off ties).  A central element
    gives 0; otherwise ``[g, f](x, y)`` tracks ``f(x, y)`` and
    ``[f, h](x, y)`` tracks ``f(x, x) - f(y, y)``.
    """
    space = f.space
    if space.kind == "finite":
        raise ValueError("finite spaces have a nonzero center; use center_exact")
    if probe_count < 1:
        raise ValueError("probe_count must be positive")
    best = 0.0
    for x, y in _probe_pairs(space, probe_count):
        radii = space.distances[x, y] / 8 * 2.0 ** -np.arange(halvings + 1)
        # nudge off the lattice of node distances so no sphere carries weight
        for delta in jitter(radii, space.min_spacing):
            g, h = probe_kernels(space, x, y, delta)
            best = max(best, sup_norm(commutator(f, g)), sup_norm(commutator(f, h)))
    return best


# -- functorial maps and gauges -------------------------------------------------

@dataclass(eq=False)
class SpaceMap:
    """Node map ``alpha: source -> target``; checked to push weights forward when flagged."""

    source: DiscreteSpace
    target: DiscreteSpace
    node_map: np.ndarray
    measure_preserving: bool = True

    def __post_init__(self):
        self.node_map = np.asarray(self.node_map, dtype=int).ravel()
        if self.node_map.shape != (self.source.size,):
            raise ValueError("node map needs one image per source node")
        if np.any(self.node_map < 0) or np.any(self.node_map >= self.target.size):
            raise ValueError("node map points outside the target")
        if self.measure_preserving:
            pushed = np.bincount(self.node_map, weights=self.source.weights, minlength=self.target.size)
            gap = float(np.abs(pushed - self.target.weights).max())
            if gap > MEASURE_TOL:
                raise NotMeasurePreserving(f"pushed-forward weights miss the target by {gap:.3g}")

    def pushforward_gap(self) -> float:
        pushed = np.bincount(self.node_map, weights=self.source.weights, minlength=self.target.size)
        return float(np.abs(pushed - self.target.weights).max())

    def compose(self, inner: "SpaceMap") -> "SpaceMap":
        """``self o inner``."""
        if inner.target is not self.source:
            raise SpaceMismatch("maps do not compose")
        return SpaceMap(inner.source, self.target, self.node_map[inner.node_map],
                        self.measure_preserving and inner.measure_preserving)


def pullback(alpha: SpaceMap, f: Kernel) -> Kernel:
    """``(M alpha) f (x', y') = f(alpha x', alpha y')``."""
    if not alpha.measure_preserving:
        raise NotMeasurePreserving("pullback needs a measure-preserving map")
    if f.space is not alpha.target:
        raise SpaceMismatch("kernel does not live on the target of the map")
    a = alpha.node_map
    return Kernel(alpha.source, f.values[np.ix_(a, a)])


def circle_doubling(n: int) -> SpaceMap:
    """``x -> 2x mod 1`` from the ``2n``-node circle onto the ``n``-node circle."""
    src, tgt = build_space("circle", 2 * n), build_space("circle", n)
    return SpaceMap(src, tgt, np.arange(2 * n) % n)


def circle_rotation(space: DiscreteSpace, k: int) -> SpaceMap:
    return SpaceMap(space, space, (np.arange(space.size) + k) % space.size)


def gauge(beta, f: Kernel) -> Kernel:
    """``(beta^ f)(x, y) = beta(x) f(x, y) conj(beta(y))`` for unimodular ``beta``."""
    beta = np.asarray(beta, dtype=complex).ravel()
    if beta.shape != (f.space.size,):
        raise ValueError("gauge function needs one value per node")
    if np.abs(np.abs(beta) - 1).max() > UNIMODULAR_TOL:
        raise ValueError("gauge function must be unimodular")
    return Kernel(f.space, beta[:, None] * f.values * beta.conj()[None, :])


# -- ideals generated by kernels (finite spaces) ----------------------------

def _rank(vectors: np.ndarray) -> int:
    if vectors.size == 0:
        return 0
    s = np.linalg.svd(vectors, compute_uv=False)
    return 0 if s[0] == 0 else int(np.sum(s > RANK_TOL * s[0]))


def _orth(vectors: np.ndarray) -> np.ndarray:
    """Orthonormal (plain Euclidean) basis rows of the row span."""
    if vectors.size == 0:
        return vectors.reshape(0, vectors.shape[-1])
    _, s, vh = np.linalg.svd(vectors, full_matrices=False)
    if s[0] == 0:
        return vh[:0]
    return vh[: int(np.sum(s > RANK_TOL * s[0]))]


def right_ideal_span(generators: Sequence[Kernel]) -> np.ndarray:
    """Orthonormal basis (as flattened rows) of ``span{g * b}`` over all kernels ``b``."""
    basis = matrix_units(generators[0].space)
    vecs = np.array([convolve(g, b).values.ravel() for g in generators for b in basis])
    return _orth(vecs)


def two_sided_ideal_span(generators: Sequence[Kernel]) -> np.ndarray:
    basis = matrix_units(generators[0].space)
    vecs = []
    for g in generators:
        right = [convolve(g, b) for b in basis]
        for a in basis:
            vecs.extend(convolve(a, r).values.ravel() for r in right)
    return _orth(np.array(vecs))


def _in_span(orth_rows: np.ndarray, f: Kernel, tol: float = MEMBER_TOL) -> bool:
    v = f.values.ravel()
    resid = v - orth_rows.T @ (orth_rows.conj() @ v) if orth_rows.size else v
    return bool(np.abs(resid).max() <= tol * max(1.0, np.abs(v).max()))


def ideal_closure_check(generators: Sequence[Kernel], space: DiscreteSpace | None = None,
                        probes: int = 100, seed: int = 0) -> Report:
    """Compare the ideals generated by ``generators`` with ``R_V`` and with the whole algebra."""
    space = space or generators[0].space
    if space.kind != "finite":
        raise ValueError("ideal_closure_check needs a finite space")
    n = space.size
    rng = np.random.default_rng(seed)
    report = Report(suite="ideals", space=space.summary())
    right = right_ideal_span(generators)
    two = two_sided_ideal_span(generators)
    nonzero = any(sup_norm(g) > 0 for g in generators)
    report.add("two-sided ideal dimension", two.shape[0], n * n if nonzero else 0,
               two.shape[0] == (n * n if nonzero else 0))

    V = column_space(generators)
    proj = ideal_RV(V)
    report.add("right ideal dimension == n dim V", right.shape[0], n * V.dim, right.shape[0] == n * V.dim)

    agree = 0
    for t in range(probes):
        kind = t % 3
        if kind == 0 and right.shape[0]:
            coeff = rng.normal(size=right.shape[0]) + 1j * rng.normal(size=right.shape[0])
            f = Kernel(space, (coeff @ right).reshape(n, n))
        elif kind == 1:
            f = proj(Kernel.random(space, rng))
        else:
            f = Kernel.random(space, rng)
        agree += _in_span(right, f) == proj.contains(f)
    report.add("membership agreement", agree, probes, agree == probes)
    return report


# -- restriction to a closed subset carrying all weight ----------------------

def subspace_of(space: DiscreteSpace, nodes: Sequence[int]) -> DiscreteSpace:
    """Finite space on ``nodes`` with the inherited metric and weights."""
    nodes = np.asarray(nodes, dtype=int)
    w = space.weights[nodes]
    if abs(w.sum() - 1.0) > MEASURE_TOL:
        raise SupportViolation(f"subset carries weight {w.sum():.12g}, not 1")
    return build_space("finite", params={"weights": w / w.sum(),
                                         "metric": space.distances[np.ix_(nodes, nodes)],
                                         "allow_null": True})


def restrict_and_split(space: DiscreteSpace, nodes: Sequence[int], retraction: Sequence[int],
                       seed: int = 0, trials: int = 5) -> Report:
    """Check that restriction to ``nodes`` is split by the pullback along ``retraction``.

    ``retraction[i]`` is the position (within ``nodes``) of the image of node ``i``.
    """
    nodes = np.asarray(nodes, dtype=int)
    sub = subspace_of(space, nodes)
    iota = SpaceMap(sub, space, nodes)
    rho = SpaceMap(space, sub, np.asarray(retraction, dtype=int))
    if not np.array_equal(rho.node_map[nodes], np.arange(nodes.size)):
        raise ValueError("retraction does not fix the subset")
    rng = np.random.default_rng(seed)
    report = Report(suite="structure", space=space.summary())
    split_gap, hom_gap, kernel_gap = 0.0, 0.0, 0.0
    outside = np.ones((space.size, space.size), dtype=bool)
    outside[np.ix_(nodes, nodes)] = False
    for _ in range(trials):
        f0 = Kernel.random(sub, rng)
        split_gap = max(split_gap, sup_norm(pullback(iota, pullback(rho, f0)) - f0))
        f, g = Kernel.random(space, rng), Kernel.random(space, rng)
        hom_gap = max(hom_gap, sup_norm(pullback(iota, convolve(f, g))
                                        - convolve(pullback(iota, f), pullback(iota, g))))
        null = Kernel(space, np.where(outside, Kernel.random(space, rng).values, 0))
        kernel_gap = max(kernel_gap, sup_norm(pullback(iota, null)))
    report.add("restriction o pullback(retraction) == id", split_gap, 0.0, split_gap == 0.0)
    report.add("restriction is multiplicative", hom_gap, 1e-12, hom_gap <= 1e-12)
    report.add("kernels vanishing on the subset restrict to 0", kernel_gap, 0.0, kernel_gap == 0.0)
    return report


# -- measure recovery ---------------------------------------------------------

def measure_trials(space: DiscreteSpace, C: Sequence[int], trial_count: int = 8):
    """Margins ``diam/4 * 2**-k`` and the value ``[(1 (x) f) * 1](x, y)`` for each trial ``f``.

    ``f(z) = max(0, 1 - d(z, C)/margin)`` equals 1 on ``C`` and lies in [0, 1].
    """
    C = np.asarray(C, dtype=int)
    if C.size == 0:
        raise ValueError("C must be nonempty")
    dist_to_c = space.distances[C].min(axis=0)
    margins = space.diameter / 4 * 2.0 ** -np.arange(trial_count)
    ones = Kernel.ones(space)
    values = []
    for margin in margins:
        f = ramp(dist_to_c, 0.0, margin)
        lifted = Kernel.outer(space, np.ones(space.size), f)
        values.append(float(convolve(lifted, ones).values[0, 0].real))
    return margins, np.array(values)


def recover_measure(space: DiscreteSpace, C: Sequence[int], trial_count: int = 8) -> float:
    """Upper estimate of ``m(C)`` from the algebra: the best trial value."""
    _, values = measure_trials(space, C, trial_count)
    return float(values.min())
