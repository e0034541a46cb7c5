import numpy as np
import pytest

from gmatrix.algebra import Kernel, convolve, sup_norm, unit
from gmatrix.errors import NotMeasurePreserving, SpaceMismatch, SupportViolation
from gmatrix.space import build_space
from gmatrix.structure import (SpaceMap, Subspace, center_defect, center_exact, circle_doubling,
                               circle_rotation, column_space, gauge, ideal_closure_check, ideal_LV,
                               ideal_RV, measure_trials, pullback, recover_measure, restrict_and_split,
                               right_ideal_span, row_space, subspace_of, two_sided_ideal_span)


def finite(n, seed=0):
    rng = np.random.default_rng(seed)
    w = rng.uniform(0.5, 1.5, n)
    return build_space("finite", params={"weights": (w / w.sum()).tolist()})


# -- subspaces and one-sided ideals ------------------------------------------

def test_subspace_span_and_projection():
    s = finite(4)
    V = Subspace.span(s, [[1, 1, 0, 0], [2, 2, 0, 0], [0, 0, 1, 0]])
    assert V.dim == 2
    assert V.contains([3, 3, -1, 0])
    assert not V.contains([1, 0, 0, 0])
    P = V.projector()
    np.testing.assert_allclose(P @ P, P, atol=1e-12)
    assert Subspace.full(s).dim == 4 and Subspace.zero(s).dim == 0


def test_subspace_rejects_non_orthonormal():
    s = finite(3)
    with pytest.raises(ValueError):
        Subspace(s, [[1, 0, 0]])


def test_right_ideal_projection_is_right_ideal(rng):
    s = finite(4)
    V = Subspace.span(s, [[1, 2, 0, 1j]])
    R = ideal_RV(V)
    f = R(Kernel.random(s, rng))
    assert R.contains(f)
    # right multiples stay in R_V, left multiples generally leave it
    assert R.contains(convolve(f, Kernel.random(s, rng)))
    assert not R.contains(convolve(Kernel.random(s, rng), f))
    assert R.dim == 4


def test_left_ideal(rng):
    s = finite(4)
    V = Subspace.span(s, [[1, 0, 0, 0], [0, 1, 1, 0]])
    L = ideal_LV(V)
    f = L(Kernel.random(s, rng))
    assert L.contains(f)
    assert L.contains(convolve(Kernel.random(s, rng), f))


def test_column_and_row_space():
    s = finite(3)
    g = Kernel.outer(s, [1, 0, 1], [0, 1, 2])
    assert column_space([g]).contains([1, 0, 1])
    assert row_space([g]).contains([0, 1, 2])
    assert column_space([g]).dim == 1


def test_ideal_spans_brute_force():
    s = finite(3)
    g = Kernel.outer(s, [1, 0, 0], [0, 1, 0])
    assert right_ideal_span([g]).shape[0] == 3  # column space is 1-dimensional
    assert two_sided_ideal_span([g]).shape[0] == 9


def test_ideal_closure_four_nodes():
    s = finite(4)
    rng = np.random.default_rng(7)
    gens = [Kernel.outer(s, [1, 1j, 0, 0], rng.normal(size=4)) for _ in range(20)]
    rep = ideal_closure_check(gens, probes=100)
    assert rep.passed, rep.failures()
    assert rep["two-sided ideal dimension"].value == 16
    assert rep["right ideal dimension == n dim V"].value == 4


# -- center ------------------------------------------------------------------

@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_center_is_scalar_multiples_of_unit(n):
    s = finite(n, seed=n)
    basis = center_exact(s)
    assert len(basis) == 1
    np.testing.assert_allclose(basis[0].values, unit(s).values, atol=1e-9)


def test_center_defect_on_circle(circle128):
    assert center_defect(Kernel.zeros(circle128)) == 0.0
    assert center_defect(Kernel.ones(circle128)) >= 0.9
    f = Kernel.from_function(circle128, lambda x, y: np.cos(2 * np.pi * (x - y)))
    assert center_defect(f) >= 0.9


def test_center_defect_rejects_finite(three_point):
    with pytest.raises(ValueError):
        center_defect(Kernel.ones(three_point))


# -- maps and gauges ---------------------------------------------------------

def test_circle_doubling_pullback(rng):
    a = circle_doubling(32)
    assert a.pushforward_gap() <= 1e-15
    f, g = Kernel.random(a.target, rng), Kernel.random(a.target, rng)
    pf = pullback(a, f)
    # pullback along doubling doubles every frequency; values repeat with period n
    assert pf.values[3, 40] == f.values[3, 8]
    np.testing.assert_allclose(pullback(a, f @ g).values, (pf @ pullback(a, g)).values, atol=1e-13)
    np.testing.assert_allclose(pullback(a, f.star).values, pf.star.values, atol=0)


def test_rotation_composition(rng):
    s = build_space("circle", 16)
    r3, r5 = circle_rotation(s, 3), circle_rotation(s, 5)
    both = r5.compose(r3)
    np.testing.assert_array_equal(both.node_map, circle_rotation(s, 8).node_map)
    f = Kernel.random(s, rng)
    np.testing.assert_array_equal(pullback(both, f).values, pullback(r3, pullback(r5, f)).values)


def test_non_measure_preserving_map_rejected():
    s = build_space("circle", 8)
    with pytest.raises(NotMeasurePreserving):
        SpaceMap(s, s, np.zeros(8))
    loose = SpaceMap(s, s, np.zeros(8), measure_preserving=False)
    with pytest.raises(NotMeasurePreserving):
        pullback(loose, Kernel.ones(s))


def test_pullback_space_mismatch(rng):
    a = circle_doubling(4)
    with pytest.raises(SpaceMismatch):
        pullback(a, Kernel.ones(a.source))


def test_gauge_is_star_automorphism(rng):
    s = build_space("circle", 24)
    beta = np.exp(2j * np.pi * rng.uniform(size=24))
    f, g = Kernel.random(s, rng), Kernel.random(s, rng)
    np.testing.assert_allclose(gauge(beta, f @ g).values, (gauge(beta, f) @ gauge(beta, g)).values,
                               atol=1e-13)
    np.testing.assert_allclose(gauge(beta, f.star).values, gauge(beta, f).star.values, atol=1e-15)
    assert sup_norm(gauge(beta, f)) == pytest.approx(sup_norm(f))
    with pytest.raises(ValueError):
        gauge(2 * beta, f)


# -- restriction to the support ------------------------------------------------

def test_restrict_and_split_null_nodes():
    s = build_space("finite", params={"weights": [0.5, 0.5, 0, 0], "allow_null": True})
    rep = restrict_and_split(s, [0, 1], retraction=[0, 1, 0, 1])
    assert rep.passed, rep.failures()
    sub = subspace_of(s, [0, 1])
    assert sub.size == 2 and sub.full_support


def test_restriction_must_carry_all_weight():
    s = build_space("finite", params={"weights": [0.4, 0.4, 0.2]})
    with pytest.raises(SupportViolation):
        subspace_of(s, [0, 1])


def test_retraction_must_fix_subset():
    s = build_space("finite", params={"weights": [0.5, 0.5, 0, 0], "allow_null": True})
    with pytest.raises(ValueError):
        restrict_and_split(s, [0, 1], retraction=[1, 0, 0, 1])


# -- measure recovery ---------------------------------------------------------

def ramp_oracle(n, c_len, margin):
    # C is an arc of c_len nodes on the n-circle; each side adds sum_k max(0, 1 - k/(n margin))
    k = np.arange(1, n)
    side = np.clip(1 - k / (n * margin), 0, None).sum()
    return (c_len + 2 * side) / n


def test_measure_trials_match_oracle():
    s = build_space("circle", 100)
    margins, values = measure_trials(s, list(range(10)))
    expected = [ramp_oracle(100, 10, m) for m in margins]
    np.testing.assert_allclose(values, expected, atol=1e-14)
    assert values[0] == pytest.approx(0.2152, abs=1e-14)
    assert np.all(np.diff(values) <= 0)


@pytest.mark.parametrize("C,mass", [([0], 0.01), (list(range(25)), 0.25), ([0, 50], 0.02)])
def test_recover_measure_circle(C, mass):
    s = build_space("circle", 100)
    assert recover_measure(s, C) == pytest.approx(mass, abs=1e-12)


def test_recover_measure_finite(three_point):
    assert recover_measure(three_point, [1, 2]) == pytest.approx(0.8, abs=1e-12)
