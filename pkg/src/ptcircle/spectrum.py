"""Real spectrum at fixed coupling: root scanning on the constraint curve and
the small-coupling perturbation series.

Scanning works in the s variable.  Along the constraint curve t = Z/(2s) the
factors have root spacing of order pi (set by s*sin s), so a grid of step
pi/64 cannot skip a sign change below the scan ceilings used here; roots that
accumulate at small t are the same roots seen at large s.  Each level is
labelled n = round(s/pi) together with the factor that vanished.

The perturbation series writes a root near s = n*pi as s = n*pi + rho(t)
with rho even in t, and solves the branch equation

    t*sinh t = sigma*(-1)^n * (n*pi + rho) * sin(rho)

order by order (``series_coefficients``).  An independent least-squares fit
of rho(t) sampled at small t (``fit_series_numeric``) arbitrates the
coefficients.  The leading term is sigma*(-1)^n/(n*pi) * t**2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import ConvergenceError, FitConditioningError, NoSignChangeError
from .secular import (
    ExactParams,
    SecularBranch,
    SpectralPoint,
    factor_value,
    validate_coupling,
)

__all__ = [
    "ScanOptions",
    "SpectrumRequest",
    "SeriesCoefficients",
    "scan_roots",
    "refine_root",
    "series_coefficients",
    "quartic_coefficient_printed_variant",
    "fit_series_numeric",
    "perturbative_energy",
]

_GRID_STEP = math.pi / 64.0


@dataclass(frozen=True)
class ScanOptions:
    """Tolerances of the scan: factor residual at roots and grid resolution."""

    residual_tol: float = 1e-12
    grid_step: float = _GRID_STEP
    max_iter: int = 200

    def __post_init__(self) -> None:
        if not 0.0 < self.grid_step <= _GRID_STEP + 1e-15:
            raise ValueError(f"grid step must lie in (0, pi/64], got {self.grid_step}")
        if self.residual_tol <= 0.0:
            raise ValueError(f"residual tolerance must be positive, got {self.residual_tol}")


@dataclass(frozen=True)
class SpectrumRequest:
    Z: float
    s_max: float
    options: ScanOptions = field(default_factory=ScanOptions)

    def __post_init__(self) -> None:
        validate_coupling(self.Z)
        if self.s_max < math.pi:
            raise ValueError(f"s_max must be at least pi, got {self.s_max}")


def _constraint_factor(s: float, Z: float, branch: SecularBranch) -> float:
    return factor_value(Z / (2.0 * s), s, branch)


def _constraint_factor_ds(s: float, Z: float, branch: SecularBranch) -> float:
    """Analytic d/ds of the factor along t = Z/(2s)."""
    t = Z / (2.0 * s)
    hyp = -(t / s) * (math.sinh(t) + t * math.cosh(t))
    osc = branch.sin_term_sign * (math.sin(s) + s * math.cos(s))
    return hyp + osc


def _scan_grid(Z: float, s_max: float, step: float) -> np.ndarray:
    """s nodes: uniform with the given step, extended geometrically below the
    first node when the low descendant root (s near sqrt(Z/2)) could sit there."""
    base = np.arange(step, s_max + 0.5 * step, step)
    base = base[base <= s_max]
    if Z > 0.0:
        lo = 0.125 * math.sqrt(0.5 * Z)
        if lo < step:
            down = [step]
            while down[-1] > lo:
                down.append(down[-1] / 1.25)
            base = np.concatenate([np.array(down[:0:-1]), base])
    return base


def refine_root(
    bracket: tuple[float, float],
    Z: float,
    branch: SecularBranch,
    options: ScanOptions | None = None,
) -> SpectralPoint:
    """Refine a sign-change bracket in s to a SpectralPoint.

    Safeguarded bracket shrinkage (Brent) followed by a short Newton polish;
    the result carries a factor residual at or below the option tolerance.
    Raises NoSignChangeError when the bracket does not straddle a root and
    ConvergenceError if the residual target cannot be met.
    """
    opts = options or ScanOptions()
    validate_coupling(Z)
    s_lo, s_hi = bracket
    if not (0.0 < s_lo < s_hi):
        raise ValueError(f"bracket must satisfy 0 < s_lo < s_hi, got {bracket}")
    f_lo = _constraint_factor(s_lo, Z, branch)
    f_hi = _constraint_factor(s_hi, Z, branch)
    if f_lo != 0.0 and f_hi != 0.0 and math.copysign(1.0, f_lo) == math.copysign(1.0, f_hi):
        raise NoSignChangeError(
            f"no sign change on [{s_lo}, {s_hi}] for {branch.value} factor at Z={Z}"
        )
    try:
        s_hat = brentq(
            _constraint_factor,
            s_lo,
            s_hi,
            args=(Z, branch),
            xtol=1e-15,
            rtol=4.0 * np.finfo(float).eps,
            maxiter=opts.max_iter,
        )
    except RuntimeError as exc:  # scipy's iteration-limit signal
        raise ConvergenceError(f"refinement exceeded {opts.max_iter} iterations: {exc}") from exc
    best_s = s_hat
    best_f = abs(_constraint_factor(s_hat, Z, branch))
    for _ in range(3):
        if best_f <= 0.25 * opts.residual_tol:
            break
        d = _constraint_factor_ds(best_s, Z, branch)
        if d == 0.0:
            break
        trial = best_s - _constraint_factor(best_s, Z, branch) / d
        if not (s_lo <= trial <= s_hi):
            break
        f_trial = abs(_constraint_factor(trial, Z, branch))
        if f_trial >= best_f:
            break
        best_s, best_f = trial, f_trial
    if best_f > opts.residual_tol:
        raise ConvergenceError(
            f"bracket refinement stalled at residual {best_f:.3e} "
            f"(target {opts.residual_tol:.1e}) near s={best_s}"
        )
    params = ExactParams(t=Z / (2.0 * best_s), s=best_s)
    return SpectralPoint(
        Z=Z,
        branch=branch,
        n=round(best_s / math.pi),
        params=params,
        E=params.s**2 - params.t**2,
        residual=best_f,
    )


def scan_roots(req: SpectrumRequest) -> list[SpectralPoint]:
    """All real roots with s in (0, s_max], sorted by energy.

    Both factors are sign-scanned on the grid and every detected bracket is
    refined; a refinement failure on a detected bracket propagates (brackets
    are never silently dropped).  An empty result is legal.
    """
    points: list[SpectralPoint] = []
    grid = _scan_grid(req.Z, req.s_max, req.options.grid_step)
    if grid.size < 2:
        return points
    for branch in (SecularBranch.FACTOR_MINUS, SecularBranch.FACTOR_PLUS):
        vals = [_constraint_factor(float(s), req.Z, branch) for s in grid]
        for i in range(len(grid) - 1):
            a, b = vals[i], vals[i + 1]
            if a == 0.0 or (a < 0.0) != (b < 0.0):
                points.append(
                    refine_root((float(grid[i]), float(grid[i + 1])), req.Z, branch, req.options)
                )
    points.sort(key=lambda p: (p.E, p.branch.value))
    return points


# ---------------------------------------------------------------------------
# perturbation series


@dataclass(frozen=True)
class SeriesCoefficients:
    """Even-power expansion rho(t) = sum_i coeffs[i-1] * t**(2i) about s = n*pi."""

    n: int
    branch: SecularBranch
    coeffs: tuple[float, ...]
    max_order: int

    def rho(self, t: float) -> float:
        tt = t * t
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = (acc + c) * tt
        return acc


def _validate_series_args(n: int, max_order: int) -> None:
    if n < 1:
        raise ValueError("series expansion requires n >= 1 (the n = 0 branch is singular)")
    if max_order % 2 != 0 or max_order < 2:
        raise ValueError(f"max_order must be a positive even integer, got {max_order}")
    if max_order > 20:
        raise ValueError(f"max_order capped at 20, got {max_order}")


def series_coefficients(n: int, branch: SecularBranch, max_order: int) -> SeriesCoefficients:
    """Expansion coefficients by formal power-series substitution.

    Substitutes s = n*pi + rho(t) into the branch equation and matches powers
    of t.  At order 2m the unknown c_{2m} enters linearly through the n*pi*rho
    term, so each order is solved by one subtraction:

        c_{2m} = sigma * (P_{2m} - T_{2m}) / (n*pi),

    where P is the series of t*sinh t and T is the series of
    sigma*(-1)^n*(n*pi + rho)*sin(rho) with the orders below 2m already fixed.
    """
    _validate_series_args(n, max_order)
    a = n * math.pi
    sp = branch.series_sign * (-1) ** n
    M = max_order

    lhs = np.zeros(M + 1)
    for m in range(1, M // 2 + 1):
        lhs[2 * m] = 1.0 / math.factorial(2 * m - 1)

    rho = np.zeros(M + 1)

    def mul(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.convolve(x, y)[: M + 1]

    for m in range(1, M // 2 + 1):
        sin_rho = np.zeros(M + 1)
        term = rho.copy()
        sign, fact, power = 1.0, 1.0, 1
        while power <= M:
            sin_rho += (sign / fact) * term
            term = mul(mul(term, rho), rho)
            power += 2
            sign = -sign
            fact *= (power - 1) * power
        shifted = rho.copy()
        shifted[0] += a
        rhs = sp * mul(shifted, sin_rho)
        rho[2 * m] = sp * (lhs[2 * m] - rhs[2 * m]) / a

    return SeriesCoefficients(
        n=n, branch=branch, coeffs=tuple(rho[2 : M + 1 : 2]), max_order=M
    )


def quartic_coefficient_printed_variant(n: int, branch: SecularBranch) -> float:
    """Historically tabulated t**4 coefficient, sigma*(-1)^n/(n*pi) - 1/(n*pi)**3.

    Kept for comparison only: it omits the 1/6 factor on the first piece that
    the order-by-order solve produces, and the numeric fit sides with the
    solved value.  Not used anywhere in the computation.
    """
    a = n * math.pi
    return branch.series_sign * (-1) ** n / a - 1.0 / a**3


def _rho_at(n: int, branch: SecularBranch, t: float) -> float:
    """Root offset rho = s - n*pi of the branch equation at fixed small t."""
    a = n * math.pi

    def f(s: float) -> float:
        return factor_value(t, s, branch)

    return brentq(f, a - 0.4, a + 0.4, xtol=1e-16, rtol=4.0 * np.finfo(float).eps) - a


def fit_series_numeric(
    n: int,
    branch: SecularBranch,
    t_samples: list[float] | np.ndarray,
    max_order: int,
    nuisance_orders: int = 4,
) -> SeriesCoefficients:
    """Independent series oracle: solve the branch equation at each sample t
    (no coupling constraint; t is the free parameter) and least-squares fit the
    even polynomial.

    Up to ``nuisance_orders`` extra even powers are fitted beyond ``max_order``
    and discarded; they absorb the truncation tail that would otherwise bias
    the reported coefficients (fewer are used when the sample count is small).
    Column-scaled least squares keeps the Vandermonde conditioning manageable;
    a rank deficiency raises FitConditioningError.
    """
    _validate_series_args(n, max_order)
    ts = np.asarray(t_samples, dtype=float)
    n_coef = max_order // 2
    if ts.size < n_coef + 2:
        raise FitConditioningError(
            f"need at least {n_coef + 2} samples for order {max_order}, got {ts.size}"
        )
    if np.any(ts <= 0.0) or np.any(ts > 0.2):
        raise ValueError("t samples must lie in (0, 0.2]")
    if np.unique(ts).size != ts.size:
        raise FitConditioningError("t samples must be distinct")

    deg_terms = n_coef + max(0, min(nuisance_orders, ts.size - n_coef - 2))
    rhos = np.array([_rho_at(n, branch, float(t)) for t in ts])
    design = np.vander(ts**2, N=deg_terms + 1, increasing=True)[:, 1:]
    scale = np.linalg.norm(design, axis=0)
    if np.any(scale == 0.0):
        raise FitConditioningError("degenerate design matrix")
    coef, _, rank, _ = np.linalg.lstsq(design / scale, rhos, rcond=None)
    if rank < deg_terms:
        raise FitConditioningError(f"rank-deficient fit (rank {rank} of {deg_terms})")
    coef = coef / scale
    return SeriesCoefficients(
        n=n, branch=branch, coeffs=tuple(coef[:n_coef]), max_order=max_order
    )


def perturbative_energy(n: int, branch: SecularBranch, Z: float, max_order: int) -> float:
    """Perturbative eigenvalue (n*pi + rho(t))**2 - t**2 with 2*s*t = Z closed
    by fixed-point iteration t <- Z/(2*(n*pi + rho(t))) from t0 = Z/(2*n*pi).

    The map is a contraction for Z up to about n*pi/2; beyond that a
    ConvergenceError may be raised.
    """
    validate_coupling(Z)
    series = series_coefficients(n, branch, max_order)
    a = n * math.pi
    t = Z / (2.0 * a)
    for _ in range(100):
        t_next = Z / (2.0 * (a + series.rho(t)))
        if abs(t_next - t) <= 1e-14:
            t = t_next
            break
        t = t_next
    else:
        raise ConvergenceError(
            f"fixed point for 2st=Z did not converge (n={n}, Z={Z}, order={max_order})"
        )
    s = a + series.rho(t)
    return s * s - t * t
