"""Self-check suite behind the ``verify`` CLI command.

Each check returns (name, passed, detail).  The quick level runs a reduced
sweep intended to finish in seconds; the full level runs the complete
property set.  Checks deliberately route through the public operations (for
instance the factorization identity is recomputed through
``secular.secular_factor``) so that an injected defect in any public surface
trips the corresponding named property.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import oracle, secular, spectrum, transition

__all__ = ["CheckResult", "run_checks", "QUICK", "FULL"]

QUICK = "quick"
FULL = "full"

_SEED = 20231119

# Reference checkpoints for the coupling table; printed values of
# (Z, alpha, beta, ReE).  Rows at the two breakdown points list one member of
# the still-real pair there; rows marginally above them are reproduced by the
# continued branch.  The "pinned" subset is the pass/fail golden set, the
# rest is reported only.
TABLE_ROWS: tuple[tuple[float, float, float, float, int, bool], ...] = (
    # (Z, alpha, beta, ReE, pair, pinned)
    (5.542309, 0.474944, 0.474944, 5.041586, 0, True),
    (5.542310, 0.474653, 0.474870, 5.044077, 0, False),
    (5.54232, 0.474125, 0.475399, 5.044078, 0, False),
    (5.54240, 0.472878, 0.476652, 5.044080, 0, False),
    (5.55, 0.457619, 0.492438, 5.044371, 0, True),
    (6.0, 0.358129, 0.622216, 5.062183, 0, True),
    (6.5, 0.318347, 0.693565, 5.083353, 0, True),
    (17.90123, 0.325829, 0.325829, 25.61820, 1, True),
    (17.90124, 0.325757, 0.326139, 25.60761, 1, False),
    (17.90126, 0.325540, 0.326356, 25.60762, 1, False),
    (17.90200, 0.323724, 0.328189, 25.60769, 1, False),
    (17.95, 0.308679, 0.344308, 25.61228, 1, True),
    (19.0, 0.253831, 0.422062, 25.71469, 1, True),
)

# Pinned intervals for the first five coalescence couplings.
CRITICAL_INTERVALS: tuple[tuple[float, float], ...] = (
    (5.542309, 5.542310),
    (17.90123, 17.90124),
    (33.54495 - 1e-3, 33.54495 + 1e-3),
    (51.20617 - 1e-4, 51.20618 + 1e-4),
    (70.3093, 70.3095),
)

ALPHA_TOL = 1e-5
REE_REL_TOL = 1e-4


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _identity_sweep(n_points: int) -> CheckResult:
    rng = np.random.default_rng(_SEED)
    worst = 0.0
    for _ in range(n_points):
        t = rng.uniform(1e-3, 20.0)
        Z = rng.uniform(0.0, 100.0)
        s = Z / (2.0 * t)
        lhs = secular.secular_t(t, Z)
        params = secular.ExactParams(t=t, s=s)
        fp = secular.secular_factor(params, secular.SecularBranch.FACTOR_PLUS)
        fm = secular.secular_factor(params, secular.SecularBranch.FACTOR_MINUS)
        worst = max(worst, abs(lhs - 16.0 * fp * fm) / max(1.0, abs(lhs)))
    return CheckResult(
        "factorization-identity", worst <= 1e-9, f"max relative residual {worst:.3e} over {n_points} points"
    )


def _s_identity_sweep(n_points: int) -> CheckResult:
    rng = np.random.default_rng(_SEED + 1)
    worst = 0.0
    used = 0
    for _ in range(n_points):
        t = rng.uniform(1e-3, 20.0)
        Z = rng.uniform(0.0, 100.0)
        if Z == 0.0:
            continue
        s = Z / (2.0 * t)
        lhs = secular.secular_s(s, Z)
        params = secular.ExactParams(t=t, s=s)
        fp = secular.secular_factor(params, secular.SecularBranch.FACTOR_PLUS)
        fm = secular.secular_factor(params, secular.SecularBranch.FACTOR_MINUS)
        worst = max(worst, abs(lhs - 16.0 * fp * fm) / max(1.0, abs(lhs)))
        used += 1
    return CheckResult(
        "s-representation-identity", worst <= 1e-9, f"max relative residual {worst:.3e} over {used} points"
    )


def _hermitian_limit() -> CheckResult:
    pts = spectrum.scan_roots(spectrum.SpectrumRequest(Z=1e-8, s_max=5.6 * math.pi))
    worst = 0.0
    for n in range(1, 6):
        target = (n * math.pi) ** 2
        best = min(abs(p.E - target) for p in pts)
        worst = max(worst, best)
    return CheckResult(
        "hermitian-limit", worst <= 1e-6, f"max |E - (n*pi)^2| = {worst:.3e} for n=1..5 at Z=1e-8"
    )


def _series_vs_fit(levels: tuple[int, ...]) -> CheckResult:
    ts = np.linspace(0.05, 0.2, 24)
    worst = 0.0
    for n in levels:
        for branch in (secular.SecularBranch.FACTOR_MINUS, secular.SecularBranch.FACTOR_PLUS):
            derived = spectrum.series_coefficients(n, branch, 4)
            fitted = spectrum.fit_series_numeric(n, branch, ts, 4)
            lead = branch.series_sign * (-1) ** n / (n * math.pi)
            worst = max(worst, abs(derived.coeffs[0] - lead) / abs(lead))
            for c_d, c_f in zip(derived.coeffs, fitted.coeffs):
                worst = max(worst, abs(c_d - c_f) / abs(c_d))
    return CheckResult(
        "series-vs-fit",
        worst <= 1e-6,
        f"max relative coefficient deviation {worst:.3e} through t^4, n in {levels}",
    )


def _det_roots(Z: float, s_max: float) -> list[float]:
    """Real-axis roots of the boundary determinant, by sweep and refinement."""
    s_grid = np.arange(math.pi / 128, s_max, math.pi / 128)
    if Z > 0:
        lo = 0.1 * math.sqrt(0.5 * Z)
        if lo < s_grid[0]:
            extra = []
            v = s_grid[0]
            while v > lo:
                v /= 1.25
                extra.append(v)
            s_grid = np.concatenate([np.array(extra[::-1]), s_grid])
    energies = s_grid**2 - (Z / (2.0 * s_grid)) ** 2

    def det_re(E: float) -> float:
        return oracle.boundary_determinant(E, Z).real

    vals = np.array([det_re(float(E)) for E in energies])
    roots = []
    for i in range(len(energies) - 1):
        if (vals[i] < 0.0) != (vals[i + 1] < 0.0):
            roots.append(
                brentq(det_re, float(energies[i]), float(energies[i + 1]), xtol=1e-12, rtol=1e-14)
            )
    return sorted(roots)


def _zero_set_equivalence(z_values: tuple[float, ...]) -> CheckResult:
    s_max = 4.6 * math.pi
    worst_match = 0.0
    worst_bc = 0.0
    for Z in z_values:
        pts = spectrum.scan_roots(spectrum.SpectrumRequest(Z=Z, s_max=s_max))
        det_es = _det_roots(Z, s_max)
        if len(det_es) != len(pts):
            return CheckResult(
                "zero-set-equivalence",
                False,
                f"root count mismatch at Z={Z}: {len(pts)} secular vs {len(det_es)} determinant",
            )
        for p, e_det in zip(pts, det_es):
            worst_match = max(worst_match, abs(p.E - e_det))
            sol = oracle.nullspace_solution(p.E, Z)
            report = oracle.residual_check(sol, p.E, Z)
            worst_bc = max(worst_bc, max(report.bc_residuals))
    ok = worst_match <= 1e-8 and worst_bc <= 1e-8
    return CheckResult(
        "zero-set-equivalence",
        ok,
        f"max |dE| {worst_match:.3e}, max BC residual {worst_bc:.3e} over Z in {z_values}",
    )


def _fold_certificates(folds) -> CheckResult:
    count = len(folds)
    detail = []
    ok = True
    prev = 0.0
    for fold, (lo, hi) in zip(folds, CRITICAL_INTERVALS[:count]):
        res_f = abs(transition._F(fold.s_merge, fold.Z_crit, fold.branch))
        res_fs = abs(transition._F_s(fold.s_merge, fold.Z_crit, fold.branch))
        inside = lo <= fold.Z_crit <= hi
        increasing = fold.Z_crit > prev
        prev = fold.Z_crit
        ok = ok and res_f <= 1e-10 and res_fs <= 1e-10 and inside and increasing
        detail.append(f"Z_{fold.nu}={fold.Z_crit:.7f}")
    return CheckResult("fold-certificates", ok, ", ".join(detail))


def _solve_table_row(Z, alpha_p, beta_p, pair, fold):
    if Z > fold.Z_crit:
        near = fold.Z_crit + min(1e-3, 0.5 * (Z - fold.Z_crit))
        seed = transition.fold_unfolding_seed(fold, near)
        params, energy = transition.solve_broken(near, seed)
        if Z != near:
            path = transition.continue_in_Z(near, Z, 12, params)
            _, params, energy = path[-1]
        return params, energy
    candidates = transition.real_pair_near_fold(Z, fold)
    best = min(candidates, key=lambda p: abs(p.alpha - alpha_p))
    return best, best.energy()


def _table_goldens(pinned_only: bool, folds) -> CheckResult:
    worst_ab = 0.0
    worst_ree = 0.0
    for Z, a_p, b_p, ree_p, pair, pinned in TABLE_ROWS:
        if pinned_only and not pinned:
            continue
        params, energy = _solve_table_row(Z, a_p, b_p, pair, folds[pair])
        if not pinned:
            continue
        worst_ab = max(worst_ab, abs(params.alpha - a_p), abs(params.beta - b_p))
        worst_ree = max(worst_ree, abs(energy.re_E - ree_p) / ree_p)
    ok = worst_ab <= ALPHA_TOL and worst_ree <= REE_REL_TOL
    return CheckResult(
        "table-goldens",
        ok,
        f"max |d alpha,beta| {worst_ab:.3e} (tol {ALPHA_TOL}), max rel dReE {worst_ree:.3e} (tol {REE_REL_TOL})",
    )


def _dirichlet_comparison(folds) -> CheckResult:
    z0 = folds[0].Z_crit
    ok = z0 > transition.DIRICHLET_FIRST_CRITICAL[1]
    return CheckResult(
        "periodic-vs-dirichlet",
        ok,
        f"Z_0 = {z0:.6f} exceeds the hard-wall value {transition.DIRICHLET_FIRST_CRITICAL[1]}",
    )


def _pt_symmetry() -> CheckResult:
    worst_unbroken = 0.0
    pts = spectrum.scan_roots(spectrum.SpectrumRequest(Z=2.0, s_max=3.5 * math.pi))
    for p in pts:
        sol = oracle.nullspace_solution(p.E, 2.0)
        worst_unbroken = max(worst_unbroken, oracle.pt_symmetry_check(sol, 2.0))
    params, energy = transition.solve_broken(6.0, transition.BrokenParams.bind(0.36, 0.62, 6.0))
    sol = oracle.nullspace_solution(complex(energy.re_E, -energy.eps), 6.0)
    broken_dev = oracle.pt_symmetry_check(sol, 6.0)
    ok = worst_unbroken <= 1e-8 and broken_dev >= 0.1
    return CheckResult(
        "pt-symmetry",
        ok,
        f"unbroken max {worst_unbroken:.3e} (Z=2), broken {broken_dev:.3f} (Z=6)",
    )


def _perturbative_vs_scan() -> CheckResult:
    worst = 0.0
    pts = spectrum.scan_roots(spectrum.SpectrumRequest(Z=0.2, s_max=2.6 * math.pi))
    for n in (1, 2):
        for branch in (secular.SecularBranch.FACTOR_MINUS, secular.SecularBranch.FACTOR_PLUS):
            e_series = spectrum.perturbative_energy(n, branch, 0.2, 6)
            e_scan = min(
                (p.E for p in pts if p.n == n and p.branch is branch),
                key=lambda e: abs(e - e_series),
            )
            worst = max(worst, abs(e_series - e_scan))
    return CheckResult(
        "perturbative-vs-scan", worst <= 1e-10, f"max |E_series - E_scan| = {worst:.3e} at Z=0.2"
    )


def _conjugate_pairing() -> CheckResult:
    worst = 0.0
    for alpha, beta, Z in ((0.35, 0.62, 6.0), (0.31, 0.35, 17.95), (0.2, 0.9, 8.0)):
        p = transition.BrokenParams.bind(alpha, beta, Z)
        q = p.swapped()
        if q.energy().eps != -p.energy().eps or q.energy().re_E != p.energy().re_E:
            return CheckResult("conjugate-pairing", False, "eps/ReE swap symmetry broken")
        s1 = transition.broken_secular_symmetric(p, Z)
        s2 = transition.broken_secular_symmetric(q, Z)
        worst = max(worst, abs(s1 - s2.conjugate()) / max(1.0, abs(s1)))
    return CheckResult(
        "conjugate-pairing", worst <= 1e-12,
        f"max defect of S(a,b) = conj(S(b,a)) is {worst:.3e}",
    )


def _exact_broken_consistency(folds) -> CheckResult:
    fold = folds[0]
    Z = fold.Z_crit - 1e-3
    seed = transition.BrokenParams.bind(fold_alpha(fold) * 0.999, fold_alpha(fold) * 1.001, Z)
    params, _ = transition.solve_broken(Z, seed)
    sym = abs(params.alpha - params.beta)
    pair = transition.real_pair_near_fold(Z, fold)
    energies = [p.energy().re_E for p in pair]
    k2 = params.energy().re_E
    closest = min(abs(k2 - e) / e for e in energies)
    ok = sym <= 1e-4 and closest <= 1e-5
    return CheckResult(
        "exact-broken-consistency",
        ok,
        f"|alpha-beta| = {sym:.3e}, closest pair-member energy deviation {closest:.3e}",
    )


def fold_alpha(fold) -> float:
    """Hyperbolic parameter of the merged state at a fold."""
    t = fold.Z_crit / (2.0 * fold.s_merge)
    return math.asinh(t / math.sqrt(fold.E_merge))


def run_checks(level: str) -> list[CheckResult]:
    if level not in (QUICK, FULL):
        raise ValueError(f"unknown level {level!r}")
    full = level == FULL
    results = [
        _identity_sweep(10_000 if full else 2_000),
        _s_identity_sweep(10_000 if full else 2_000),
        _hermitian_limit(),
        _series_vs_fit((1, 2, 3) if full else (1,)),
        _zero_set_equivalence((0.5, 3.0, 5.0, 10.0, 17.0) if full else (3.0,)),
    ]
    folds = transition.critical_sequence(5 if full else 2)
    results.append(_fold_certificates(folds))
    results.append(_table_goldens(pinned_only=not full, folds=folds))
    results.append(_dirichlet_comparison(folds))
    if full:
        results.append(_pt_symmetry())
        results.append(_perturbative_vs_scan())
        results.append(_conjugate_pairing())
        results.append(_exact_broken_consistency(folds))
    return results
