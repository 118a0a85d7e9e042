import math

import pytest

from ptcircle.errors import SolverError
from ptcircle.secular import SecularBranch
from ptcircle.spectrum import SpectrumRequest, scan_roots
from ptcircle.transition import (
    DIRICHLET_FIRST_CRITICAL,
    DIRICHLET_SECOND_CRITICAL,
    BrokenParams,
    broken_params_from_real_point,
    broken_secular,
    broken_secular_symmetric,
    continue_in_Z,
    critical_sequence,
    find_double_root,
    fold_unfolding_seed,
    real_pair_near_fold,
    solve_broken,
)

MINUS = SecularBranch.FACTOR_MINUS
PLUS = SecularBranch.FACTOR_PLUS

# pinned target intervals for the first five coalescence couplings
INTERVALS = [
    (5.542309, 5.542310),
    (17.90123, 17.90124),
    (33.54495 - 1e-3, 33.54495 + 1e-3),
    (51.20617 - 1e-4, 51.20618 + 1e-4),
    (70.3093, 70.3095),
]

# reference rows (Z, alpha, beta, ReE) away from the breakdowns
GOLDEN_ROWS = [
    (5.55, 0.457619, 0.492438, 5.044371),
    (6.0, 0.358129, 0.622216, 5.062183),
    (6.5, 0.318347, 0.693565, 5.083353),
    (17.95, 0.308679, 0.344308, 25.61228),
    (19.0, 0.253831, 0.422062, 25.71469),
]


class TestBrokenSecular:
    def test_residual_at_first_fold_parameters(self):
        p = BrokenParams.bind(0.474944, 0.474944, 5.542309)
        scale = max(1.0, abs(2.0 * complex(p.K * math.sinh(p.alpha), -p.K * math.cosh(p.alpha))))
        assert abs(broken_secular(p, 5.542309)) <= 1e-6 * 100.0 * scale

    def test_residual_at_tabulated_broken_row(self):
        p = BrokenParams.bind(0.358129, 0.622216, 6.0)
        assert abs(broken_secular(p, 6.0)) <= 1e-5

    def test_reduces_to_exact_regime_quantization(self):
        pts = scan_roots(SpectrumRequest(Z=3.0, s_max=2.5 * math.pi))
        for p in pts:
            if p.E <= 0.0:
                continue
            bp = broken_params_from_real_point(p.params.s, p.params.t, 3.0)
            assert abs(broken_secular(bp, 3.0)) <= 1e-8

    def test_k_formula(self):
        p = BrokenParams.bind(0.3, 0.7, 6.0)
        expect = math.sqrt(2.0 * 6.0 / (math.sinh(0.6) + math.sinh(1.4)))
        assert p.K == pytest.approx(expect, rel=1e-15)

    def test_conjugate_pairing(self):
        for alpha, beta, Z in ((0.35, 0.62, 6.0), (0.31, 0.35, 17.95), (0.2, 0.9, 8.0)):
            p = BrokenParams.bind(alpha, beta, Z)
            q = p.swapped()
            assert q.energy().eps == -p.energy().eps
            assert q.energy().re_E == p.energy().re_E
            s1 = broken_secular_symmetric(p, Z)
            s2 = broken_secular_symmetric(q, Z)
            assert abs(s1 - s2.conjugate()) <= 1e-12 * max(1.0, abs(s1))


class TestSolveBroken:
    def test_golden_rows(self):
        for Z, a_ref, b_ref, ree_ref in GOLDEN_ROWS:
            params, energy = solve_broken(Z, BrokenParams.bind(a_ref, b_ref, Z))
            assert params.alpha == pytest.approx(a_ref, abs=1e-5)
            assert params.beta == pytest.approx(b_ref, abs=1e-5)
            assert energy.re_E == pytest.approx(ree_ref, rel=1e-4)

    def test_imaginary_part_regression_z6(self):
        # eps = (K^2/2)(sinh 2b - sinh 2a) at the Z = 6 solution, frozen from
        # an extended-precision Newton run
        _, energy = solve_broken(6.0, BrokenParams.bind(0.358129, 0.622216, 6.0))
        assert energy.eps == pytest.approx(2.05610244312266, rel=1e-9)
        assert energy.re_E == pytest.approx(5.06218341032729, rel=1e-10)

    def test_validation(self):
        with pytest.raises(ValueError):
            solve_broken(0.0, BrokenParams.bind(0.3, 0.4, 1.0))
        with pytest.raises(ValueError):
            BrokenParams(alpha=-0.1, beta=0.2, K=1.0)


class TestFindDoubleRoot:
    def test_first_fold(self):
        fold = find_double_root(5.5, 2.5, MINUS)
        assert INTERVALS[0][0] < fold.Z_crit < INTERVALS[0][1]
        assert fold.E_merge == pytest.approx(5.0440768, abs=1e-6)

    def test_second_fold(self):
        fold = find_double_root(17.9, 5.1, PLUS)
        assert INTERVALS[1][0] < fold.Z_crit < INTERVALS[1][1]

    def test_fold_certificate(self):
        from ptcircle.transition import _F, _F_s

        fold = find_double_root(5.5, 2.5, MINUS)
        assert abs(_F(fold.s_merge, fold.Z_crit, fold.branch)) <= 1e-10
        assert abs(_F_s(fold.s_merge, fold.Z_crit, fold.branch)) <= 1e-10
        h = 1e-5
        curv = (
            _F(fold.s_merge + h, fold.Z_crit, fold.branch)
            - 2.0 * _F(fold.s_merge, fold.Z_crit, fold.branch)
            + _F(fold.s_merge - h, fold.Z_crit, fold.branch)
        ) / h**2
        assert abs(curv) >= 1e-4

    def test_non_convergence_error(self):
        with pytest.raises(SolverError):
            find_double_root(1e6, 2.5, MINUS)


class TestCriticalSequence:
    def test_first_five_in_pinned_intervals(self, five_folds):
        assert len(five_folds) == 5
        for fold, (lo, hi) in zip(five_folds, INTERVALS):
            assert lo <= fold.Z_crit <= hi, fold

    def test_strictly_increasing(self, five_folds):
        zs = [f.Z_crit for f in five_folds]
        assert zs == sorted(zs)
        assert all(b > a for a, b in zip(zs, zs[1:]))

    def test_first_spacing(self, five_folds):
        # difference of the two pinned interval midpoints
        assert five_folds[1].Z_crit - five_folds[0].Z_crit == pytest.approx(
            12.3589255, abs=2e-6
        )

    def test_alternating_branches(self, five_folds):
        expected = [MINUS, PLUS, MINUS, PLUS, MINUS]
        assert [f.branch for f in five_folds] == expected

    def test_count_one(self):
        folds = critical_sequence(1)
        assert len(folds) == 1
        assert folds[0].Z_crit == pytest.approx(5.5423095, abs=1e-6)

    def test_validation(self):
        with pytest.raises(ValueError):
            critical_sequence(0)
        with pytest.raises(ValueError):
            critical_sequence(17)

    def test_dirichlet_comparison_constants(self, five_folds):
        # periodic boundary conditions raise the breakdown couplings over the
        # hard-wall values; recorded constants, not recomputed
        assert five_folds[0].Z_crit > DIRICHLET_FIRST_CRITICAL[1]
        assert five_folds[1].Z_crit > DIRICHLET_SECOND_CRITICAL[1]


class TestUnfoldingAndContinuation:
    def test_seed_converges_just_above_fold(self, first_two_folds):
        fold = first_two_folds[0]
        for dz in (1e-6, 1e-4, 1e-2):
            Z = fold.Z_crit + dz
            params, energy = solve_broken(Z, fold_unfolding_seed(fold, Z))
            assert params.beta > params.alpha
            assert energy.eps > 0.0

    def test_continuation_to_z65(self, first_two_folds):
        fold = first_two_folds[0]
        Z0 = fold.Z_crit + 1e-3
        start, _ = solve_broken(Z0, fold_unfolding_seed(fold, Z0))
        path = continue_in_Z(5.55, 6.5, 20, solve_broken(5.55, start)[0])
        z_end, params, energy = path[-1]
        assert z_end == 6.5
        assert params.alpha == pytest.approx(0.318347, abs=1e-5)
        assert params.beta == pytest.approx(0.693565, abs=1e-5)
        assert energy.re_E == pytest.approx(5.083353, rel=1e-4)

    def test_continuation_pair_one(self, first_two_folds):
        fold = first_two_folds[1]
        Z0 = fold.Z_crit + 1e-3
        start, _ = solve_broken(Z0, fold_unfolding_seed(fold, Z0))
        seed = solve_broken(17.95, start)[0]
        path = continue_in_Z(17.95, 19.0, 20, seed)
        _, params, _ = path[-1]
        assert params.alpha == pytest.approx(0.253831, abs=1e-5)
        assert params.beta == pytest.approx(0.422062, abs=1e-5)

    def test_degenerate_path(self):
        params, energy = solve_broken(6.0, BrokenParams.bind(0.358129, 0.622216, 6.0))
        path = continue_in_Z(6.0, 6.0, 5, params)
        assert len(path) == 1
        assert path[0][1].alpha == pytest.approx(params.alpha, abs=1e-12)

    def test_eps_grows_away_from_fold(self, first_two_folds):
        fold = first_two_folds[0]
        Z0 = fold.Z_crit + 1e-4
        start, _ = solve_broken(Z0, fold_unfolding_seed(fold, Z0))
        path = continue_in_Z(Z0, 6.5, 20, start)
        eps = [e.eps for _, _, e in path]
        assert all(b > a for a, b in zip(eps, eps[1:]))
        assert all(e > 0.0 for e in eps)


class TestExactBrokenConsistency:
    def test_near_fold_real_pair(self, first_two_folds):
        fold = first_two_folds[0]
        Z = fold.Z_crit - 1e-3
        pair = real_pair_near_fold(Z, fold)
        assert len(pair) == 2
        # alpha = beta on both members, K^2 equals the scanned energies
        pts = scan_roots(SpectrumRequest(Z=Z, s_max=math.pi))
        scanned = sorted(p.E for p in pts)
        k2s = sorted(p.energy().re_E for p in pair)
        for k2, e in zip(k2s, scanned):
            assert k2 == pytest.approx(e, rel=1e-10)

    def test_solver_lands_on_real_solution_below_fold(self, first_two_folds):
        from ptcircle.verify import fold_alpha

        fold = first_two_folds[0]
        Z = fold.Z_crit - 1e-3
        a0 = fold_alpha(fold)
        params, energy = solve_broken(Z, BrokenParams.bind(0.999 * a0, 1.001 * a0, Z))
        assert abs(params.alpha - params.beta) <= 1e-4
        pair = real_pair_near_fold(Z, fold)
        closest = min(abs(energy.re_E - p.energy().re_E) / p.energy().re_E for p in pair)
        assert closest <= 1e-5

    def test_fold_row_members_match_reference(self, first_two_folds):
        # the reference table rows at the interval-left couplings are one
        # member of the still-real pair, alpha = beta
        pair = real_pair_near_fold(5.542309, first_two_folds[0])
        alphas = [p.alpha for p in pair]
        assert min(abs(a - 0.474944) for a in alphas) <= 1e-5
        rees = [p.energy().re_E for p in pair]
        assert min(abs(r - 5.041586) for r in rees) / 5.041586 <= 1e-4

        pair1 = real_pair_near_fold(17.90123, first_two_folds[1])
        alphas1 = [p.alpha for p in pair1]
        assert min(abs(a - 0.325829) for a in alphas1) <= 1e-5
        rees1 = [p.energy().re_E for p in pair1]
        assert min(abs(r - 25.61820) for r in rees1) / 25.61820 <= 1e-4
