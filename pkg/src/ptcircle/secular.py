"""Secular (quantization) functions for a particle on a circle of half-width 1
in the purely imaginary step potential i*Z*sign(x).

The eigenvalue condition is a transcendental equation in the wavenumber
k = t + i*s, where the real eigenvalue, the coupling and the split parts are
tied together by

    E = s**2 - t**2,        2*s*t = Z.

Three equivalent closed forms of the condition are provided:

* ``secular_t``      -- t-representation, with an oscillatory cos(Z/t) term;
* ``secular_s``      -- s-representation, with an exponential exp(Z/s) term;
* ``secular_factor`` -- the factored form  (t*sinh t + s*sin s)(t*sinh t - s*sin s),
  one factor per branch.

The factored form is the numerically canonical one: it is entire in both
variables, free of removable singularities, and is what all root finding in
this package uses.  The two unfactored forms are kept for cross-validation
and for figure emission; they refuse the t = 0 / s = 0 edges where their
extra terms oscillate or blow up.

All functions are pure and operate in double precision.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

__all__ = [
    "SecularBranch",
    "ExactParams",
    "SpectralPoint",
    "validate_coupling",
    "secular_t",
    "secular_s",
    "secular_factor",
    "factor_value",
    "representation_identity_residual",
    "energy_of",
    "t_sinh_t",
]

# Hyperbolics above this argument would overflow the intermediate exp(2t)
# expressions; beyond it only sign and scale matter and +inf is returned.
_SINH_CLAMP = 350.0


def validate_coupling(Z: float) -> float:
    """Check that a coupling is finite and non-negative, and return it."""
    if not math.isfinite(Z):
        raise ValueError(f"coupling must be finite, got {Z!r}")
    if Z < 0.0:
        raise ValueError(f"coupling must be non-negative, got {Z!r}")
    return float(Z)


class SecularBranch(enum.Enum):
    """Which factor of the factored secular equation a root annihilates."""

    FACTOR_PLUS = "plus"    # t*sinh t + s*sin s = 0
    FACTOR_MINUS = "minus"  # t*sinh t - s*sin s = 0

    @property
    def sin_term_sign(self) -> int:
        """Sign of the s*sin s term inside the factor."""
        return 1 if self is SecularBranch.FACTOR_PLUS else -1

    @property
    def series_sign(self) -> int:
        """Sign sigma in the branch equation t*sinh t = sigma*(-1)^n*(n*pi+rho)*sin(rho).

        +1 for FACTOR_MINUS, -1 for FACTOR_PLUS; this fixes the leading
        perturbation coefficient sigma*(-1)^n/(n*pi).
        """
        return -self.sin_term_sign


@dataclass(frozen=True)
class ExactParams:
    """Split wavenumber k = t + i*s of a real-spectrum state.

    ``t`` and ``s`` are non-negative; when the parameters are bound to a
    coupling Z they satisfy 2*s*t = Z to construction accuracy.
    """

    t: float
    s: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.t) and math.isfinite(self.s)):
            raise ValueError("parameters must be finite")
        if self.t < 0.0 or self.s < 0.0:
            raise ValueError(f"parameters must be non-negative, got t={self.t}, s={self.s}")

    @classmethod
    def on_constraint(cls, s: float, Z: float) -> "ExactParams":
        """Parameters on the constraint curve t = Z/(2s) at height s."""
        if s <= 0.0:
            raise ValueError("s must be positive to bind t = Z/(2s)")
        return cls(t=Z / (2.0 * s), s=s)

    def constraint_residual(self, Z: float) -> float:
        """|2*s*t - Z|, zero (to rounding) iff bound to the coupling Z."""
        return abs(2.0 * self.s * self.t - Z)


@dataclass(frozen=True)
class SpectralPoint:
    """One real eigenvalue: coupling, branch, level label, parameters, energy."""

    Z: float
    branch: SecularBranch
    n: int
    params: ExactParams
    E: float
    residual: float

    def __post_init__(self) -> None:
        if self.residual < 0.0 or not math.isfinite(self.residual):
            raise ValueError("residual must be finite and non-negative")
        if self.residual > 1e-10:
            raise ValueError(f"factor residual {self.residual:.3e} exceeds 1e-10")
        if self.params.constraint_residual(self.Z) > 1e-12:
            raise ValueError("parameters violate 2*s*t = Z beyond 1e-12")
        if self.E != self.params.s**2 - self.params.t**2:
            raise ValueError("energy must equal s**2 - t**2 exactly as computed")


def t_sinh_t(t: float) -> float:
    """t*sinh(t), clamped to +inf where exp would overflow.  Even in t."""
    at = abs(t)
    if at > _SINH_CLAMP:
        return math.inf
    return t * math.sinh(t)


def secular_t(t: float, Z: float) -> float:
    """t-representation of the secular determinant,

        4*exp(-2t)*(exp(2t) - 1)**2 * t**2 + (2*Z**2/t**2)*(cos(Z/t) - 1).

    Requires t > 0: at the edge the second term has an essential oscillation
    for Z > 0.  For large t the first term dominates and the value grows
    exponentially.
    """
    validate_coupling(Z)
    if t <= 0.0:
        raise ValueError(f"secular_t requires t > 0, got {t!r}")
    if t > _SINH_CLAMP:
        return math.inf
    em = math.expm1(2.0 * t)
    first = 4.0 * math.exp(-2.0 * t) * em * em * t * t
    second = (2.0 * Z * Z / (t * t)) * (math.cos(Z / t) - 1.0)
    return first + second


def secular_s(s: float, Z: float) -> float:
    """s-representation of the secular determinant,

        8*s**2*(cos(2s) - 1) + exp(-Z/s)*(exp(Z/s) - 1)**2 * Z**2/s**2.

    Requires s > 0.  At Z = 0 it reduces to 8*s**2*(cos 2s - 1), whose zeros
    are the circle spectrum s = n*pi.
    """
    validate_coupling(Z)
    if s <= 0.0:
        raise ValueError(f"secular_s requires s > 0, got {s!r}")
    u = Z / s
    if u > 2.0 * _SINH_CLAMP:
        return math.inf
    em = math.expm1(u)
    first = 8.0 * s * s * (math.cos(2.0 * s) - 1.0)
    second = math.exp(-u) * em * em * Z * Z / (s * s)
    return first + second


def factor_value(t: float, s: float, branch: SecularBranch) -> float:
    """Factor t*sinh t +/- s*sin s evaluated at raw (t, s).

    Total in both arguments (the t = 0 and s = 0 edges are the continuous
    extension, value 0 for the hyperbolic/oscillatory terms respectively).
    """
    return t_sinh_t(t) + branch.sin_term_sign * s * math.sin(s)


def secular_factor(params: ExactParams, branch: SecularBranch) -> float:
    """Factored secular form at the given parameters; the canonical root form."""
    return factor_value(params.t, params.s, branch)


def energy_of(params: ExactParams) -> float:
    """Real energy E = s**2 - t**2 induced by the split wavenumber."""
    return params.s**2 - params.t**2


def representation_identity_residual(t: float, Z: float) -> float:
    """Relative defect of the factorization identity at (t, s = Z/(2t)),

        | secular_t(t, Z) - 16*F_plus*F_minus | / max(1, |secular_t(t, Z)|).

    The algebra behind it: exp(-2t)*(exp(2t)-1)**2 = 4*sinh(t)**2 and
    Z/t = 2s turn the t-representation into 16*(t sinh t + s sin s)
    *(t sinh t - s sin s).  Stays below 1e-9 for t in [1e-3, 20],
    Z in [0, 100].
    """
    if t <= 0.0:
        raise ValueError(f"identity residual requires t > 0, got {t!r}")
    lhs = secular_t(t, Z)
    s = Z / (2.0 * t)
    fp = factor_value(t, s, SecularBranch.FACTOR_PLUS)
    fm = factor_value(t, s, SecularBranch.FACTOR_MINUS)
    rhs = 16.0 * fp * fm
    if math.isinf(lhs) and math.isinf(rhs):
        return 0.0
    return abs(lhs - rhs) / max(1.0, abs(lhs))
