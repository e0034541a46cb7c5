"""Named verification suites run by the command line."""
from __future__ import annotations

import numpy as np

from . import algebra, deriv, oprep, structure, units
from .algebra import Kernel, convolve, involve, sup_norm
from .errors import ConditionFailed, NoDeltaPrime
from .report import Report
from .space import DiscreteSpace, check_conditions, default_deltas

ALGEBRA_TOL = 1e-12
UNIT_TOL = 1e-13
GAMMA_TOL = 1e-10


def _tol(cfg, name, default):
    return cfg.tolerance(name, default) if cfg is not None else default


# -- axioms -------------------------------------------------------------------

def axiom_defects(space: DiscreteSpace, rng: np.random.Generator, samples: int) -> dict:
    """Worst defects of the Banach *-algebra laws over random kernels bounded by 1."""
    worst = dict.fromkeys(["associativity", "submultiplicativity", "double involution",
                           "involution reverses products", "involution isometric",
                           "seminorm adjointness", "separate continuity"], 0.0)
    for _ in range(samples):
        f, g, h = (Kernel.random(space, rng) for _ in range(3))
        fg = convolve(f, g)
        worst["associativity"] = max(worst["associativity"],
                                     sup_norm(convolve(fg, h) - convolve(f, convolve(g, h))))
        worst["submultiplicativity"] = max(worst["submultiplicativity"],
                                           sup_norm(fg) - sup_norm(f) * sup_norm(g))
        fs = involve(f)
        worst["double involution"] = max(worst["double involution"], sup_norm(involve(fs) - f))
        worst["involution reverses products"] = max(
            worst["involution reverses products"], sup_norm(involve(fg) - convolve(involve(g), fs)))
        worst["involution isometric"] = max(worst["involution isometric"], abs(sup_norm(fs) - sup_norm(f)))
        worst["seminorm adjointness"] = max(
            worst["seminorm adjointness"],
            float(np.abs(algebra.rc_seminorms(fs) - algebra.cc_seminorms(f)).max()))
        # c * a vs c * a' in every column seminorm
        diff = g - h
        lhs = algebra.cc_seminorms(convolve(f, diff))
        rhs = sup_norm(f) * algebra.cc_seminorms(diff)
        worst["separate continuity"] = max(worst["separate continuity"], float((lhs - rhs).max()))
    return worst


def axioms_suite(space: DiscreteSpace, cfg=None, seed: int = 42, samples: int = 10) -> Report:
    rng = np.random.default_rng(seed)
    tol = _tol(cfg, "algebra", ALGEBRA_TOL)
    report = Report(suite="axioms", space=space.summary(), meta={"samples": samples})
    for name, value in axiom_defects(space, rng, samples).items():
        bound = 0.0 if name == "seminorm adjointness" else tol
        report.add(name, value, bound, value <= bound)
    if algebra.has_unit(space):
        report.extend(finite_unit_checks(space, rng))
    return report


def finite_unit_checks(space: DiscreteSpace, rng, trials: int = 10) -> Report:
    report = Report(suite="axioms", space=space.summary())
    u = algebra.unit(space)
    unit_gap = iso_mult = iso_star = iso_round = 0.0
    for _ in range(trials):
        f = Kernel.random(space, rng)
        unit_gap = max(unit_gap, sup_norm(convolve(f, u) - f), sup_norm(convolve(u, f) - f))
        A = f.values
        B = Kernel.random(space, rng).values
        phi = algebra.finite_matrix_iso
        iso_mult = max(iso_mult, sup_norm(phi(A @ B, space) - convolve(phi(A, space), phi(B, space))))
        iso_star = max(iso_star, sup_norm(phi(A.conj().T, space) - involve(phi(A, space))))
        iso_round = max(iso_round, float(np.abs(algebra.finite_matrix_iso_inv(phi(A, space)) - A).max()))
    scale = float(1.0 / space.weights.min())
    report.add("unit: f*u == u*f == f", unit_gap, UNIT_TOL * scale, unit_gap <= UNIT_TOL * scale)
    report.add("matrix iso multiplicative", iso_mult, ALGEBRA_TOL * scale, iso_mult <= ALGEBRA_TOL * scale)
    report.add("matrix iso *-preserving", iso_star, ALGEBRA_TOL * scale, iso_star <= ALGEBRA_TOL * scale)
    report.add("matrix iso round trip", iso_round, ALGEBRA_TOL, iso_round <= ALGEBRA_TOL)
    return report


# -- units --------------------------------------------------------------------

def units_suite(space: DiscreteSpace, cfg=None, seed: int = 42) -> Report:
    side = cfg.side if cfg is not None else "right"
    deltas = np.asarray(cfg.deltas if cfg is not None else default_deltas())
    slack = _tol(cfg, "slack_constant", units.SLACK_CONSTANT)
    report = Report(suite="units", space=space.summary(), meta={"side": side, "deltas": deltas})
    if algebra.has_unit(space):
        report.extend(units.unboundedness_probe(space))
        report.extend(finite_unit_checks(space, np.random.default_rng(seed)))
        return report

    conditions = check_conditions(space, deltas)
    report.add("conditions", conditions.as_dict(), None, True, informational=True)
    try:
        net = units.norm_unit_seq(space, deltas, side)
    except (ConditionFailed, NoDeltaPrime) as exc:
        report.add(f"{side} norm-approximate unit", str(exc), None, False,
                   witness=getattr(exc, "witness", None))
        return report

    act = "left" if side == "left" else "right"
    for tk in units.lipschitz_battery(space, seed):
        sub = units.convergence_report(tk.kernel, net, act, "norm", lipschitz=tk.lipschitz,
                                       name=tk.name, slack_constant=slack)
        report.extend(sub)
        pc = units.defects(tk.kernel, net, act, "pc", probe=(0, 0))
        report.add(f"{tk.name}: pc defects <= norm defects", pc, sub.checks[0].value,
                   bool(np.all(pc <= np.asarray(sub.checks[0].value) + 1e-15)))
    if side == "two_sided":
        left = units.norm_unit_seq(space, deltas, "left")
        gap = max(float(np.abs(a.values - b.values).max()) for a, b in zip(net, left))
        report.add("two-sided: left and right elements coincide", gap, 0.0, gap == 0.0)
    report.extend(units.unboundedness_probe(space, deltas))
    report.extend(net_suite(space, seed))
    return report


def net_chain_pairs(space: DiscreteSpace):
    n = space.size
    s1 = [0]
    s2 = [0, n // 2]
    s3 = [0, n // 4, n // 2, (3 * n) // 4]
    diam = space.diameter
    return [(s1, diam / 2), (s2, diam / 4), (s3, diam / 8)]


def net_suite(space: DiscreteSpace, seed: int = 42) -> Report:
    """The (S, eps) net on a three-step chain: self-adjointness, cc/rc/pc behaviour."""
    report = Report(suite="units", space=space.summary())
    pairs = net_chain_pairs(space)
    chain = units.net_chain(space, pairs)
    sa = max(sup_norm(involve(u) - u) for u in chain)
    report.add("net elements self-adjoint", sa, 0.0, sa == 0.0)
    y = pairs[0][0][0]
    for tk in units.lipschitz_battery(space, seed):
        f = tk.kernel
        cc = units.defects(f, chain, "right", "cc", probe=y)
        rc = units.defects(f, chain, "left", "rc", probe=y)
        report.add(f"{tk.name}: net cc defects nonincreasing", cc, None, bool(np.all(np.diff(cc) <= 1e-14)))
        report.add(f"{tk.name}: net rc defects nonincreasing", rc, None, bool(np.all(np.diff(rc) <= 1e-14)))
        worst = 0.0
        ok = True
        for (S, eps, delta), u in zip(chain.params["chain"], chain):
            bound = units.net_pc_bound(f, eps, delta)
            diff = convolve(f, u) - f
            for s in S:
                value = float(np.abs(diff.values[:, s]).max())
                worst = max(worst, value)
                ok &= value <= bound
        report.add(f"{tk.name}: net pc defect <= r + r|f|", worst, None, ok)
    return report


# -- center -------------------------------------------------------------------

def center_suite(space: DiscreteSpace, cfg=None, seed: int = 42) -> Report:
    report = Report(suite="center", space=space.summary())
    if space.kind == "finite":
        basis = structure.center_exact(space)
        report.add("center dimension", len(basis), 1, len(basis) == 1)
        if algebra.has_unit(space) and basis:
            u = algebra.unit(space).values
            b = basis[0].values
            c = np.vdot(u, b) / np.vdot(u, u)
            gap = float(np.abs(b - c * u).max())
            report.add("center spanned by the unit", gap, 1e-10, gap <= 1e-10)
        return report
    zero = structure.center_defect(Kernel.zeros(space))
    report.add("center defect of 0", zero, 0.0, zero == 0.0)
    one = structure.center_defect(Kernel.ones(space))
    report.add("center defect of 1", one, 0.9, one >= 0.9)
    rng = np.random.default_rng(seed)
    f = Kernel.random(space, rng)
    report.add("center defect of a random kernel", structure.center_defect(f), None, True, informational=True)
    return report


# -- ideals -------------------------------------------------------------------

def ideals_suite(space: DiscreteSpace, cfg=None, seed: int = 42) -> Report:
    rng = np.random.default_rng(seed)
    report = Report(suite="ideals", space=space.summary())
    n = space.size
    if space.kind == "finite":
        g = Kernel.random(space, rng)
        report.extend(structure.ideal_closure_check([g], space, seed=seed), "random generator: ")
        a, b = rng.normal(size=n), rng.normal(size=n)
        report.extend(structure.ideal_closure_check([Kernel.outer(space, a, b)], space, seed=seed),
                      "rank-1 generator: ")
    # R_V is a right ideal and its adjoint is L_{conj V}, on any space
    vectors = [np.ones(n), rng.normal(size=n) + 1j * rng.normal(size=n)]
    V = structure.Subspace.span(space, vectors)
    R, L = structure.ideal_RV(V), structure.ideal_LV(V.conj())
    gap_right = gap_adj = 0.0
    for _ in range(5):
        f = R(Kernel.random(space, rng))
        h = Kernel.random(space, rng)
        member = convolve(f, h)
        gap_right = max(gap_right, sup_norm(R(member) - member))
        fs = involve(f)
        gap_adj = max(gap_adj, sup_norm(L(fs) - fs))
    report.add("R_V * M inside R_V", gap_right, 1e-10, gap_right <= 1e-10)
    report.add("(R_V)* inside L_conj(V)", gap_adj, 1e-10, gap_adj <= 1e-10)
    a, b = vectors[1], rng.normal(size=n)
    cs = structure.column_space([Kernel.outer(space, a, b)])
    report.add("column space of a (x) b is span{a}", cs.dim, 1,
               cs.dim == 1 and cs.same_as(structure.Subspace.span(space, [a])))
    return report


# -- representation -------------------------------------------------------------

def representation_suite(space: DiscreteSpace, cfg=None, seed: int = 42) -> Report:
    rng = np.random.default_rng(seed)
    f, g = Kernel.random(space, rng), Kernel.random(space, rng)
    report = oprep.representation_report(f, g)
    report.space = space.summary()
    for mode in oprep.MODES:
        v = oprep.op_norm(Kernel.ones(space), mode)
        report.add(f"op_norm[{mode}](1) == 1", v, 1.0, abs(v - 1.0) <= 1e-12)
    if space.kind == "circle":
        k = Kernel.from_function(space, lambda x, y: np.sin(2 * np.pi * (x - y)))
        sv = oprep.singular_values(k)
        ratio = float(sv[2] / sv[0])
        report.add("rank-2 Fourier kernel: sigma_3/sigma_1", ratio, 1e-8, ratio <= 1e-8)
    if space.kind == "interval":
        k = Kernel.from_function(space, lambda x, y: 2 * y - 1 + 0 * x)
        report.add("cx op_norm of 2y-1 (sup_norm 1)", oprep.op_norm(k, "cx"), 0.5, True, informational=True)
    return report


# -- derivations ---------------------------------------------------------------

def smooth_omega(space: DiscreteSpace) -> Kernel:
    """Fixed smooth kernel used as the inner-derivation witness."""
    p = np.asarray(space.points, dtype=float)
    x = p if p.ndim == 1 else p[:, 0]
    if space.kind == "interval":
        return Kernel(space, np.cos(np.pi * (x[:, None] - 2 * x[None, :])) / 2
                      + 0.5j * np.sin(np.pi * x)[:, None])
    return Kernel(space, np.cos(2 * np.pi * (x[:, None] - 2 * x[None, :])) / 2
                  + 0.5j * np.sin(2 * np.pi * x)[:, None])


def gauge_phi(space: DiscreteSpace) -> np.ndarray:
    p = np.asarray(space.points, dtype=float)
    x = p if p.ndim == 1 else p[:, 0]
    return np.cos(2 * np.pi * x)


def random_tensor(space, rng, rank=3) -> deriv.TensorKernel:
    return deriv.TensorKernel([(Kernel.random(space, rng), Kernel.random(space, rng)) for _ in range(rank)], space)


def gamma_identity_defects(space: DiscreteSpace, D, rng, trials: int = 3) -> tuple:
    """Worst defects of ``Gamma(hF) = h Gamma(F)`` and ``Gamma(Fh) = Lambda(F) D(h) + Gamma(F) h``."""
    one = two = 0.0
    for _ in range(trials):
        F = random_tensor(space, rng)
        h = Kernel.random(space, rng)
        gF = deriv.tensor_gamma(F, D)
        one = max(one, sup_norm(deriv.tensor_gamma(F.left_multiply(h), D) - convolve(h, gF)))
        rhs = convolve(deriv.tensor_lambda(F), D(h)) + convolve(gF, h)
        two = max(two, sup_norm(deriv.tensor_gamma(F.right_multiply(h), D) - rhs))
    return one, two


def derivation_suite(space: DiscreteSpace, cfg=None, seed: int = 42) -> Report:
    rng = np.random.default_rng(seed)
    deltas = np.asarray(cfg.deltas if cfg is not None else default_deltas())
    slack = _tol(cfg, "slack_constant", units.SLACK_CONSTANT)
    report = Report(suite="derivation", space=space.summary(), meta={"deltas": deltas})
    omega = smooth_omega(space)
    Ds = [deriv.InnerDerivation(omega), deriv.GaugeDerivation(gauge_phi(space))]
    for D in Ds:
        one, two = gamma_identity_defects(space, D, rng)
        report.add(f"{D.kind}: Gamma(hF) == h Gamma(F)", one, GAMMA_TOL, one <= GAMMA_TOL)
        report.add(f"{D.kind}: Gamma(Fh) == Lambda(F) D(h) + Gamma(F) h", two, GAMMA_TOL, two <= GAMMA_TOL)
        law = 0.0
        for _ in range(3):
            f, g = Kernel.random(space, rng), Kernel.random(space, rng)
            law = max(law, sup_norm(D(convolve(f, g)) - convolve(f, D(g)) - convolve(D(f), g)))
        report.add(f"{D.kind}: Leibniz rule", law, ALGEBRA_TOL, law <= ALGEBRA_TOL)

    if algebra.has_unit(space):
        # finite spaces: the diagonal tensor makes every derivation exactly inner
        F = deriv.finite_diagonal(space)
        for D in Ds:
            K = deriv.tensor_gamma(F, D)
            worst = max(deriv.derivation_defect(Kernel.random(space, rng), K, D) for _ in range(3))
            tol = GAMMA_TOL / float(space.weights.min())
            report.add(f"{D.kind}: exactly inner via the diagonal tensor", worst, tol, worst <= tol)
        return report
    conditions = check_conditions(space, deltas)
    if not conditions.c2:
        witness = conditions.c1_witnesses or conditions.c2_witnesses
        report.add("C2 for the approximate-inner run", witness, None, False)
        return report
    battery = units.lipschitz_battery(space, seed)
    kernels = [tk.kernel for tk in battery]
    names = [tk.name for tk in battery]
    for D in Ds:
        run = deriv.approx_inner_run(D, kernels, deltas, space, names=names)
        report.extend(run, f"{D.kind}: ")
        for tk, check in zip(battery, run.checks):
            d = np.asarray(check.data["defects"])
            if D.kind == "inner":
                bound = 0.05 * sup_norm(omega) * sup_norm(tk.kernel) + slack / space.resolution
                report.add(f"inner: {tk.name}: final defect bound", d[-1], bound, d[-1] <= bound)
            else:
                report.add(f"gauge_generator: {tk.name}: strictly decreasing", d, None,
                           bool(np.all(np.diff(d) < 0)))
    return report


SUITE_FUNCS = {
    "axioms": axioms_suite,
    "units": units_suite,
    "center": center_suite,
    "ideals": ideals_suite,
    "representation": representation_suite,
    "derivation": derivation_suite,
}


def run_suite(name: str, space: DiscreteSpace, cfg=None, seed: int = 42) -> Report:
    if name == "all":
        report = Report(suite="all", space=space.summary())
        for key, fn in SUITE_FUNCS.items():
            report.extend(fn(space, cfg, seed=seed), f"{key}/")
        return report
    report = SUITE_FUNCS[name](space, cfg, seed=seed)
    report.suite = name
    return report
