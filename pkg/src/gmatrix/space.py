"""Discrete metric measure spaces and the ball/bump machinery built on them.

A :class:`DiscreteSpace` is a quadrature model of a compact metric space with
a Borel probability measure: finitely many nodes, a full distance table and
strictly positive weights summing to one.  Four kinds are supported:

``finite``
    explicit weights and metric table; the algebra is then a matrix algebra.
``interval``
    ``[0, 1]`` with midpoint nodes ``(i + 1/2)/N`` and weights ``1/N``.
``circle``
    circumference 1, nodes ``i/N``, arc-length metric.
``torus2``
    product of two circles with the flat (Euclidean) geodesic metric.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConditionFailed, NoDeltaPrime, SpaceError

KINDS = ("finite", "interval", "circle", "torus2")

WEIGHT_SUM_TOL = 1e-12
METRIC_TOL = 1e-12
# two distances closer than this count as a tie (a sphere carrying weight)
TIE_TOL = 1e-12
BALL_EQUAL_TOL = 1e-12

DELTA_PRIME_CANDIDATES = 32
# first candidate is delta + (1 - 2**-10) * delta, strictly below 2 * delta
_FIRST_OFFSET = 1.0 - 2.0**-10

GOLDEN = (1.0 + 5.0**0.5) / 2.0


@dataclass(frozen=True, eq=False)
class DiscreteSpace:
    """Nodes, weights and distance table of a sampled metric measure space.

    Instances are immutable; the arrays are flagged read-only.  ``points``
    holds coordinates (shape ``(n,)`` for one-dimensional kinds, ``(n, 2)``
    for the torus, node labels ``0..n-1`` for finite spaces).
    """

    kind: str
    resolution: int
    points: np.ndarray
    weights: np.ndarray
    distances: np.ndarray
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("points", "weights", "distances"):
            getattr(self, name).setflags(write=False)

    @property
    def size(self) -> int:
        return int(self.weights.shape[0])

    @property
    def full_support(self) -> bool:
        return bool(np.all(self.weights > 0))

    @property
    def diameter(self) -> float:
        return float(self.distances.max())

    @property
    def min_spacing(self) -> float:
        if self.size == 1:
            return 0.0
        off = self.distances[~np.eye(self.size, dtype=bool)]
        return float(off.min())

    def metric(self, i: int, j: int) -> float:
        return float(self.distances[i, j])

    def digest(self) -> str:
        """Short content hash used in serialized headers."""
        h = hashlib.sha256()
        h.update(self.kind.encode())
        h.update(str(self.resolution).encode())
        h.update(np.ascontiguousarray(self.weights).tobytes())
        h.update(np.ascontiguousarray(self.distances).tobytes())
        return h.hexdigest()[:16]

    def summary(self) -> dict:
        return {
            "kind": self.kind,
            "resolution": self.resolution,
            "nodes": self.size,
            "weight_min": float(self.weights.min()),
            "weight_max": float(self.weights.max()),
            "diameter": self.diameter,
            "digest": self.digest(),
        }

    def __repr__(self):
        return f"DiscreteSpace(kind={self.kind!r}, resolution={self.resolution}, nodes={self.size})"


def _validate(weights, distances, allow_null, check_triangle=True):
    n = weights.shape[0]
    if distances.shape != (n, n):
        raise SpaceError(f"metric table has shape {distances.shape}, expected {(n, n)}")
    if not np.all(np.isfinite(weights)):
        raise SpaceError("weights must be finite")
    if allow_null:
        if np.any(weights < 0):
            raise SpaceError("weights must be nonnegative")
    elif np.any(weights <= 0):
        raise SpaceError("weights must be strictly positive (the measure must have full support)")
    if abs(weights.sum() - 1.0) > WEIGHT_SUM_TOL:
        raise SpaceError(f"weights sum to {weights.sum()!r}, not 1")
    if not np.all(np.isfinite(distances)):
        raise SpaceError("metric entries must be finite")
    if not np.array_equal(distances, distances.T):
        raise SpaceError("metric is not symmetric")
    if np.any(np.diag(distances) != 0):
        raise SpaceError("metric must vanish on the diagonal")
    off = ~np.eye(n, dtype=bool)
    if np.any(distances[off] <= 0):
        raise SpaceError("metric must be positive off the diagonal")
    if check_triangle:
        for k in range(n):
            through_k = distances[:, k, None] + distances[None, k, :]
            if np.any(distances > through_k + METRIC_TOL):
                raise SpaceError(f"triangle inequality fails through node {k}")


def _circle_offsets(n):
    idx = np.arange(n)
    k = np.abs(idx[:, None] - idx[None, :])
    return np.minimum(k, n - k)


def build_space(kind: str, resolution: int | None = None, params: dict | None = None,
                *, check_triangle: bool = True) -> DiscreteSpace:
    """Build a :class:`DiscreteSpace`.

    Parameters
    ----------
    kind : {"finite", "interval", "circle", "torus2"}
    resolution : int
        Nodes per axis ``N``.  Ignored for finite spaces (the weight count
        decides).
    params : dict, optional
        For ``finite``: ``weights`` (required), ``metric`` (an ``n x n``
        table; default is the discrete metric), ``allow_null`` (permit zero
        weights, for spaces whose measure does not have full support) and
        ``normalize`` (rescale weights to sum to one).

    Raises
    ------
    SpaceError
        Bad kind, ``N < 1``, non-positive or non-normalizable weights, or a
        metric table that is not a metric.
    """
    params = dict(params or {})
    if kind not in KINDS:
        raise SpaceError(f"unknown space kind {kind!r}; expected one of {KINDS}")

    if kind == "finite":
        if "weights" not in params:
            raise SpaceError("finite spaces need explicit weights")
        weights = np.asarray(params["weights"], dtype=float).ravel()
        n = weights.shape[0]
        if n < 1:
            raise SpaceError("a finite space needs at least one node")
        if params.get("normalize", False):
            total = weights.sum()
            if not np.isfinite(total) or total <= 0:
                raise SpaceError("weights cannot be normalized")
            weights = weights / total
        if "metric" in params and params["metric"] is not None:
            distances = np.asarray(params["metric"], dtype=float)
        else:
            distances = 1.0 - np.eye(n)
        allow_null = bool(params.get("allow_null", False))
        _validate(weights, distances, allow_null, check_triangle)
        return DiscreteSpace("finite", n, np.arange(n), weights, distances,
                             {"allow_null": allow_null})

    if resolution is None or int(resolution) < 1:
        raise SpaceError(f"resolution must be a positive integer, got {resolution!r}")
    n = int(resolution)

    if kind == "interval":
        idx = np.arange(n)
        points = (idx + 0.5) / n
        distances = np.abs(idx[:, None] - idx[None, :]) / n
        weights = np.full(n, 1.0 / n)
    elif kind == "circle":
        points = np.arange(n) / n
        distances = _circle_offsets(n) / n
        weights = np.full(n, 1.0 / n)
    else:
        one = _circle_offsets(n) / n
        gi, gj = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
        gi, gj = gi.ravel(), gj.ravel()
        points = np.stack([gi / n, gj / n], axis=1)
        dx = one[gi[:, None], gi[None, :]]
        dy = one[gj[:, None], gj[None, :]]
        distances = np.sqrt(dx * dx + dy * dy)
        weights = np.full(n * n, 1.0 / (n * n))
    # grid kinds are metric by construction; the cubic check is kept for small grids
    _validate(weights, distances, False, check_triangle and weights.size <= 512)
    return DiscreteSpace(kind, n, points, weights, distances, {})


def default_deltas(count: int = 6, start: float = 0.3) -> np.ndarray:
    """Radii ``start * phi**-n`` for ``n = 0..count-1`` (golden-ratio steps)."""
    return start * GOLDEN ** -np.arange(count, dtype=float)


def jitter(deltas: Sequence[float], spacing: float) -> np.ndarray:
    """Shift radii by an irrational fraction of the node spacing to avoid ties."""
    return np.asarray(deltas, dtype=float) + (2.0**0.5 - 1.0) * 0.1 * spacing


# -- balls -------------------------------------------------------------------

def ball_measures(space: DiscreteSpace, r: float, open: bool = True) -> np.ndarray:
    """Ball mass around every node at once."""
    d = space.distances
    inside = d < r if open else d <= r
    return inside @ space.weights


def ball_measure(space: DiscreteSpace, x: int, r: float, open: bool = True) -> float:
    """Weight of the open (``d < r``) or closed (``d <= r``) ball around node ``x``."""
    if r < 0:
        raise ValueError("radius must be nonnegative")
    d = space.distances[x]
    inside = d < r if open else d <= r
    return float(space.weights[inside].sum())


def sphere_measure(space: DiscreteSpace, x: int, r: float, tol: float = 0.0) -> float:
    """Weight on the sampled sphere ``|d(x, .) - r| <= tol``."""
    return float(space.weights[np.abs(space.distances[x] - r) <= tol].sum())


def find_delta_prime(space: DiscreteSpace, delta: float) -> float:
    """Outer radius ``delta' in (delta, 2 delta)`` with a thin annulus at every node.

    Searches ``delta + (1 - 2**-10) delta 2**-j`` for ``j = 0..31``, from
    just below ``2 delta`` toward ``delta``, and returns the first (largest)
    candidate for which every node satisfies

        m(B(x, delta') minus B(x, delta)) < delta * m(B(x, delta))

    with both balls open.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    inner = ball_measures(space, delta)
    if np.any(inner <= 0):
        bad = int(np.argmin(inner))
        raise NoDeltaPrime(f"ball of radius {delta} around node {bad} has zero mass")
    for j in range(DELTA_PRIME_CANDIDATES):
        candidate = delta + _FIRST_OFFSET * delta * 2.0**-j
        annulus = ball_measures(space, candidate) - inner
        if np.all(annulus < delta * inner):
            return float(candidate)
    raise NoDeltaPrime(f"no outer radius in (delta, 2 delta) passed for delta={delta}")


def ramp(r, inner: float, outer: float):
    """Radial profile: 1 up to ``inner``, linear down to 0 at ``outer``."""
    r = np.asarray(r, dtype=float)
    return np.clip((outer - r) / (outer - inner), 0.0, 1.0)


def bump(space: DiscreteSpace, x: int, delta: float, delta_prime: float | None = None) -> np.ndarray:
    """Sampled bump around node ``x``: 1 on the closed delta-ball, 0 off the open delta'-ball."""
    if delta_prime is None:
        delta_prime = find_delta_prime(space, delta)
    return ramp(space.distances[x], delta, delta_prime)


# -- conditions --------------------------------------------------------------

@dataclass
class ConditionReport:
    c1: bool
    c2: bool
    # per-radius witnesses: (n, delta, node, value) where the condition broke
    c1_witnesses: list = field(default_factory=list)
    c2_witnesses: list = field(default_factory=list)

    def as_dict(self):
        return {"C1": self.c1, "C2": self.c2,
                "C1_witnesses": self.c1_witnesses, "C2_witnesses": self.c2_witnesses}

    def require(self, which: str = "C1"):
        """Raise :class:`ConditionFailed` unless condition ``which`` holds."""
        ok = self.c1 if which == "C1" else self.c1 and self.c2
        if not ok:
            witness = self.c1_witnesses if not self.c1 else self.c2_witnesses
            raise ConditionFailed(f"condition {which} fails: {witness[0] if witness else ''}", witness)


def check_conditions(space: DiscreteSpace, deltas: Sequence[float]) -> ConditionReport:
    """Test the zero-sphere (C1) and equal-ball-mass (C2) hypotheses along ``deltas``."""
    deltas = np.asarray(deltas, dtype=float)
    if deltas.ndim != 1 or deltas.size == 0:
        raise ValueError("need a nonempty sequence of radii")
    if np.any(deltas <= 0) or np.any(np.diff(deltas) >= 0):
        raise ValueError("radii must be positive and strictly decreasing")
    c1_w, c2_w = [], []
    for n, delta in enumerate(deltas):
        on_sphere = np.abs(space.distances - delta) <= TIE_TOL
        sphere = on_sphere @ space.weights
        hit = np.flatnonzero(sphere > 0)
        if hit.size:
            x = int(hit[0])
            c1_w.append({"n": n, "delta": float(delta), "node": x, "sphere_mass": float(sphere[x])})
        balls = ball_measures(space, delta)
        spread = float(balls.max() - balls.min())
        if spread > BALL_EQUAL_TOL:
            lo, hi = int(np.argmin(balls)), int(np.argmax(balls))
            c2_w.append({"n": n, "delta": float(delta), "nodes": [lo, hi],
                         "ball_masses": [float(balls[lo]), float(balls[hi])]})
    c1 = not c1_w
    return ConditionReport(c1=c1, c2=c1 and not c2_w, c1_witnesses=c1_w, c2_witnesses=c2_w)
