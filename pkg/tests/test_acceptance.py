"""Acceptance gate: ten end-to-end criteria, each reported as one PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (the summary lines appear at
the end of the session) or ``python tests/test_acceptance.py``.
"""
import time

import numpy as np
import pytest

from gmatrix.algebra import (Kernel, cc_seminorms, convolve, finite_matrix_iso, involve, rc_seminorms,
                             sup_norm, unit)
from gmatrix.deriv import GaugeDerivation, InnerDerivation, approx_inner_run
from gmatrix.oprep import MODES, adjoint_check, op_norm, rep_matrix, singular_values
from gmatrix.space import build_space, default_deltas
from gmatrix.structure import (Subspace, center_defect, center_exact, column_space, ideal_closure_check,
                               measure_trials, recover_measure)
from gmatrix.suites import gamma_identity_defects, gauge_phi, smooth_omega
from gmatrix.units import defects, lipschitz_battery, norm_bound, norm_unit_seq

RESULTS = {}


def record(k, ok, detail):
    line = f"CRITERION {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[k] = line
    print(line)
    assert ok, line


def finite_space(n, seed):
    w = np.random.default_rng(seed).uniform(0.2, 1.0, n)
    return build_space("finite", params={"weights": (w / w.sum()).tolist()})


# -- shared runs (criteria 3, 8 and 10 reuse them) ------------------------------

_UNIT_RUNS = {}
_DERIV_RUNS = {}


def unit_run(n):
    """Right-unit defects and bounds for the battery on the n-node circle."""
    if n not in _UNIT_RUNS:
        space = build_space("circle", n)
        net = norm_unit_seq(space, default_deltas(), "right")
        rows = {}
        for tk in lipschitz_battery(space):
            rows[tk.name] = (defects(tk.kernel, net), norm_bound(tk.kernel, net, tk.lipschitz))
        _UNIT_RUNS[n] = rows
    return _UNIT_RUNS[n]


def deriv_run(n):
    """Derivation defects for the inner and gauge derivations on the n-node circle."""
    if n not in _DERIV_RUNS:
        space = build_space("circle", n)
        battery = lipschitz_battery(space)
        kernels = [tk.kernel for tk in battery]
        names = [tk.name for tk in battery]
        omega = smooth_omega(space)
        out = {}
        for D in (InnerDerivation(omega), GaugeDerivation(gauge_phi(space))):
            rep = approx_inner_run(D, kernels, default_deltas(), space, names=names)
            out[D.kind] = {name: np.asarray(c.data["defects"]) for name, c in zip(names, rep.checks)}
        out["sup"] = {name: sup_norm(k) for name, k in zip(names, kernels)}
        out["omega_sup"] = sup_norm(omega)
        _DERIV_RUNS[n] = out
    return _DERIV_RUNS[n]


# -- criteria ---------------------------------------------------------------------

def test_criterion_01_finite_matrix_isomorphism():
    start = time.perf_counter()
    space = finite_space(5, seed=1)
    rng = np.random.default_rng(2024)
    mult = star = 0.0
    for _ in range(100):
        A = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
        B = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
        phi_a = finite_matrix_iso(A, space)
        mult = max(mult, sup_norm(finite_matrix_iso(A @ B, space) - convolve(phi_a, finite_matrix_iso(B, space))))
        star = max(star, sup_norm(finite_matrix_iso(A.conj().T, space) - involve(phi_a)))
    elapsed = time.perf_counter() - start
    ok = mult <= 1e-12 and star <= 1e-12 and elapsed < 1.0
    record(1, ok, f"mult {mult:.2e} star {star:.2e} time {elapsed:.2f}s")


def test_criterion_02_axioms_circle256():
    start = time.perf_counter()
    space = build_space("circle", 256)
    rng = np.random.default_rng(7)
    ks = [Kernel.random(space, rng) for _ in range(50)]
    worst = dict.fromkeys(["assoc", "submult", "double_star", "star_product", "star_isometry",
                           "seminorm_adjoint"], 0.0)
    for i in range(50):
        f, g, h = ks[i], ks[(i + 1) % 50], ks[(i + 2) % 50]
        fg = f @ g
        worst["assoc"] = max(worst["assoc"], sup_norm(fg @ h - f @ (g @ h)))
        worst["submult"] = max(worst["submult"], sup_norm(fg) - sup_norm(f) * sup_norm(g))
        worst["double_star"] = max(worst["double_star"], sup_norm(f.star.star - f))
        worst["star_product"] = max(worst["star_product"], sup_norm(fg.star - g.star @ f.star))
        worst["star_isometry"] = max(worst["star_isometry"], abs(sup_norm(f.star) - sup_norm(f)))
        worst["seminorm_adjoint"] = max(worst["seminorm_adjoint"],
                                        float(np.abs(rc_seminorms(f.star) - cc_seminorms(f)).max()))
    elapsed = time.perf_counter() - start
    ok = all(v <= 1e-12 for v in worst.values()) and elapsed < 30
    record(2, ok, f"worst {max(worst.values()):.2e} time {elapsed:.1f}s")


def test_criterion_03_approximate_units():
    start = time.perf_counter()
    rows = unit_run(256)
    monotone = all(np.all(np.diff(d) <= 1e-14) for d, _ in rows.values())
    bounded = all(d[-1] <= b[-1] for d, b in rows.values())
    space = build_space("circle", 256)
    left = norm_unit_seq(space, default_deltas(), "left")
    right = norm_unit_seq(space, default_deltas(), "two_sided")
    identical = all(np.array_equal(a.values, b.values) for a, b in zip(left, right))
    elapsed = time.perf_counter() - start
    finals = ", ".join(f"{k} {d[-1]:.4f}<={b[-1]:.3f}" for k, (d, b) in rows.items())
    record(3, monotone and bounded and identical and elapsed < 60,
           f"monotone {monotone} bounded {bounded} two-sided identical {identical} [{finals}] {elapsed:.1f}s")


def test_criterion_04_unboundedness():
    space = build_space("circle", 256)
    net = norm_unit_seq(space, default_deltas())
    norms = np.array([sup_norm(e) for e in net])
    inv_alpha = np.array([1 / a.min() for a in net.params["alphas"]])
    circle_ok = (np.allclose(norms, inv_alpha, rtol=1e-12, atol=0) and np.all(np.diff(norms) > 0)
                 and inv_alpha[-1] > 5)
    worst = 0.0
    rng = np.random.default_rng(4)
    for n in (1, 2, 3, 4, 5):
        s = finite_space(n, seed=n)
        u = unit(s)
        for _ in range(10):
            f = Kernel.random(s, rng)
            worst = max(worst, sup_norm(f @ u - f), sup_norm(u @ f - f))
    record(4, circle_ok and worst <= 1e-13,
           f"1/alpha {np.round(inv_alpha, 3).tolist()} finite unit defect {worst:.2e}")


def test_criterion_05_center():
    dims_ok = True
    for n in (1, 2, 3, 5):
        s = finite_space(n, seed=10 + n)
        basis = center_exact(s)
        u = unit(s).values
        if len(basis) != 1:
            dims_ok = False
            continue
        b = basis[0].values
        c = np.vdot(u, b) / np.vdot(u, u)
        dims_ok &= bool(np.abs(b - c * u).max() <= 1e-10 * np.abs(b).max())
    space = build_space("circle", 128)
    value = center_defect(Kernel.ones(space))
    record(5, dims_ok and value >= 0.9, f"finite centers scalar {dims_ok}; center_defect(1) {value:.4f}")


def test_criterion_06_ideals():
    space = finite_space(4, seed=6)
    rng = np.random.default_rng(6)
    ok = True
    dims = set()
    for g in range(20):
        # alternate low-rank and full-rank generators
        rank = 1 + g % 4
        a = rng.normal(size=(rank, 4)) + 1j * rng.normal(size=(rank, 4))
        b = rng.normal(size=(rank, 4)) + 1j * rng.normal(size=(rank, 4))
        gen = Kernel(space, a.T @ b)
        rep = ideal_closure_check([gen], space, probes=100, seed=g)
        ok &= rep.passed
        dims.add(rep["two-sided ideal dimension"].value)
        ok &= column_space([gen]).dim == rank
    record(6, ok and dims == {16}, f"all generators agree {ok}; two-sided dims {sorted(dims)}")


def test_criterion_07_representation():
    space = build_space("circle", 128)
    rng = np.random.default_rng(8)
    f, g = Kernel.random(space, rng), Kernel.random(space, rng)
    mult = float(np.abs(rep_matrix(f @ g) - rep_matrix(f) @ rep_matrix(g)).max())
    adj = adjoint_check(f)["L2 adjoint defect"].value
    norms_ok = all(op_norm(f, m) <= sup_norm(f) + 1e-12 for m in MODES)
    fourier = Kernel.from_function(space, lambda x, y: np.sin(2 * np.pi * (x - y)))
    sv = singular_values(fourier)
    ratio = sv[2] / sv[0]
    interval = build_space("interval", 200)
    k = Kernel.from_function(interval, lambda x, y: 2 * y - 1 + 0 * x)
    cx = op_norm(k, "cx")
    # sup of |2y - 1| on the midpoint grid is 0.995; the continuum value is 1
    ok = (mult <= 1e-12 and adj <= 1e-12 and norms_ok and ratio <= 1e-8 and abs(cx - 0.5) <= 0.01
          and abs(sup_norm(k) - 1) <= 0.01)
    record(7, ok, f"mult {mult:.1e} adjoint {adj:.1e} sigma3/sigma1 {ratio:.1e} "
                  f"cx(2y-1) {cx:.4f} vs sup {sup_norm(k):.3f} (logged)")


def test_criterion_08_derivations():
    start = time.perf_counter()
    space = build_space("circle", 128)
    rng = np.random.default_rng(9)
    omega = smooth_omega(space)
    gamma = 0.0
    for D in (InnerDerivation(omega), GaugeDerivation(gauge_phi(space))):
        gamma = max(gamma, *gamma_identity_defects(space, D, rng))
    run = deriv_run(128)
    inner_ok = True
    for name, d in run["inner"].items():
        bound = 0.05 * run["omega_sup"] * run["sup"][name] + 10 / 128
        inner_ok &= bool(d[-1] <= d[0] / 4 and d[-1] <= bound)
    gauge_ok = all(np.all(np.diff(d) < 0) for d in run["gauge_generator"].values())
    elapsed = time.perf_counter() - start
    record(8, gamma <= 1e-10 and inner_ok and gauge_ok and elapsed < 300,
           f"gamma {gamma:.1e} inner {inner_ok} gauge strictly decreasing {gauge_ok} {elapsed:.1f}s")


def test_criterion_09_measure_recovery():
    space = build_space("interval", 200)
    C = [i for i, x in enumerate(space.points) if 0.25 <= x <= 0.5]
    value = recover_measure(space, C)
    _, trials = measure_trials(space, C)
    monotone = bool(np.all(np.diff(trials) <= 0))
    record(9, 0.25 <= value <= 0.27 and monotone,
           f"recovered {value:.4f}; trials {np.round(trials, 4).tolist()}")


def test_criterion_10_refinement():
    sizes = (64, 128, 256)
    series = {}
    for n in sizes:
        for name, (d, _) in unit_run(n).items():
            series.setdefault(f"units/{name}", []).append(d[-1])
        run = deriv_run(n)
        for kind in ("inner", "gauge_generator"):
            for name, d in run[kind].items():
                series.setdefault(f"{kind}/{name}", []).append(d[-1])
    bad = {k: v for k, v in series.items() if np.any(np.diff(v) > 1e-14)}
    detail = "; ".join(f"{k} {np.round(v, 5).tolist()}" for k, v in bad.items())
    record(10, not bad, f"non-monotone in N: {detail}" if bad else "all final defects nonincreasing in N")


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q"]))
