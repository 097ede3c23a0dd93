"""Edge coupling weights theta(a, b) on density pairs, with derivatives.

Every rule is symmetric in its two arguments.  ``MinPower`` is the canonical
family ``theta(a, b) = min(a, b)**alpha``; it vanishes exactly when the
smaller density does, which is what drives extinction of low-mass vertices.
``ArithmeticMean`` is kept for contrast: it stays positive when one argument
is zero, so it fails the boundary-vanishing condition (``validate_rule``
reports this).  ``EntropyInduced`` wraps the closed-form two-node weight
derived from an entropy potential and is defined only on density pairs with
``a + b = 1``.

The min-based derivative is set-valued on the tie set a = b; we use the
symmetric half/half convention there, which preserves symmetry of the pair
of partials under argument swap.  For alpha < 1 the derivative diverges as
the smaller argument reaches zero; ``theta_partials`` reports that case with
an ``inf`` sentinel rather than raising, so vectorised callers can mask it.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

_PAIR_SUM_TOL = 1e-9


def _pair(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return a, b


def _maybe_scalar(x, scalar: bool):
    return float(x) if scalar else x


def _min_power_deriv(m: np.ndarray, alpha: float) -> np.ndarray:
    """d/dm of max(m, 0)**alpha with the 0**0 = 1 convention.

    Returns +inf where alpha < 1 and m == 0 (the degenerate-derivative
    sentinel); 0 where m < 0, matching the clipped extension of theta.
    """
    out = np.zeros_like(m)
    pos = m > 0.0
    with np.errstate(divide="ignore"):
        out[pos] = alpha * np.power(m[pos], alpha - 1.0)
    zero = m == 0.0
    if np.any(zero):
        if alpha == 1.0:
            out[zero] = 1.0
        elif alpha < 1.0:
            out[zero] = np.inf
    return out


@dataclass(frozen=True)
class MinPower:
    """theta(a, b) = min(a, b)**alpha, alpha > 0 (clipped to 0 off-domain)."""

    alpha: float = 1.0

    def __post_init__(self):
        if self.alpha <= 0:
            raise DomainError(f"alpha must be positive, got {self.alpha}")

    @property
    def is_lipschitz(self) -> bool:
        """False for alpha < 1, where the slope blows up at zero density."""
        return self.alpha >= 1.0

    def theta(self, a, b):
        a, b = _pair(a, b)
        m = np.minimum(a, b)
        if self.alpha == 1.0:
            out = np.maximum(m, 0.0)
        else:
            out = np.where(m > 0.0, np.power(np.maximum(m, 0.0), self.alpha), 0.0)
        return _maybe_scalar(out, out.ndim == 0)

    def partials(self, a, b):
        a, b = _pair(a, b)
        scalar = a.ndim == 0 and b.ndim == 0
        a, b = np.atleast_1d(a), np.atleast_1d(b)
        a, b = np.broadcast_arrays(a, b)
        d = _min_power_deriv(np.minimum(a, b), self.alpha)
        da = np.where(a < b, d, np.where(a > b, 0.0, 0.5 * d))
        db = np.where(b < a, d, np.where(b > a, 0.0, 0.5 * d))
        if scalar:
            return float(da[0]), float(db[0])
        return da, db

    # Two-node reduction: theta as a function of r with b = 1 - r.
    def theta_r(self, r):
        r = np.asarray(r, dtype=float)
        return self.theta(r, 1.0 - r)

    def dtheta_r(self, r):
        da, db = self.partials(r, 1.0 - np.asarray(r, dtype=float))
        out = np.asarray(da) - np.asarray(db)
        return _maybe_scalar(out, np.ndim(r) == 0)


@dataclass(frozen=True)
class ArithmeticMean:
    """theta(a, b) = (a + b) / 2; positive at the boundary, kept for contrast."""

    def theta(self, a, b):
        a, b = _pair(a, b)
        out = 0.5 * (a + b)
        return _maybe_scalar(out, out.ndim == 0)

    def partials(self, a, b):
        a, b = _pair(a, b)
        scalar = a.ndim == 0 and b.ndim == 0
        a, b = np.broadcast_arrays(np.atleast_1d(a), np.atleast_1d(b))
        half = np.full(a.shape, 0.5)
        if scalar:
            return 0.5, 0.5
        return half, half.copy()

    def theta_r(self, r):
        out = np.full_like(np.asarray(r, dtype=float), 0.5)
        return _maybe_scalar(out, np.ndim(r) == 0)

    def dtheta_r(self, r):
        out = np.zeros_like(np.asarray(r, dtype=float))
        return _maybe_scalar(out, np.ndim(r) == 0)


@dataclass(frozen=True)
class EntropyInduced:
    """Two-node weight theta(r) = 2 F(r) / F'(r)^2 induced by an entropy potential.

    Only density pairs on the two-node simplex (a + b = 1) are admissible;
    ambient partial derivatives are undefined off that line, so only the
    reduced derivative ``dtheta_r`` is provided.
    """

    potential: object

    def theta(self, a, b):
        a, b = _pair(a, b)
        if np.any(np.abs(a + b - 1.0) > _PAIR_SUM_TOL):
            raise DomainError("entropy-induced weights need a + b = 1")
        return self.theta_r(a)

    def partials(self, a, b):
        raise DomainError(
            "entropy-induced weights live on the two-node simplex; "
            "use dtheta_r for the reduced derivative"
        )

    def theta_r(self, r):
        from .two_point import entropy_induced_theta

        return entropy_induced_theta(self.potential, r)

    def dtheta_r(self, r):
        from .two_point import entropy_induced_theta_prime

        return entropy_induced_theta_prime(self.potential, r)


def theta(rule, a, b):
    """Evaluate the rule's weight at a density pair (elementwise on arrays)."""
    return rule.theta(a, b)


def theta_partials(rule, a, b):
    """Partial derivatives (d theta/da, d theta/db) at a density pair."""
    return rule.partials(a, b)


@dataclass(frozen=True)
class PropertyCheck:
    passed: bool
    worst_violation: float


@dataclass(frozen=True)
class RuleValidationReport:
    rule: str
    grid_resolution: int
    symmetry: PropertyCheck
    nonnegativity: PropertyCheck
    vanishing_only_at_boundary: PropertyCheck
    monotone_in_min: PropertyCheck

    @property
    def passed(self) -> bool:
        return (
            self.symmetry.passed
            and self.nonnegativity.passed
            and self.vanishing_only_at_boundary.passed
            and self.monotone_in_min.passed
        )


def validate_rule(rule, grid_resolution: int = 100) -> RuleValidationReport:
    """Check symmetry, nonnegativity, boundary vanishing, and min-monotonicity.

    All four properties are evaluated on a uniform grid over [0, 1]^2 and
    reported with the worst observed violation; nothing raises, the report
    is the product.
    """
    if grid_resolution < 10:
        raise DomainError(f"grid_resolution must be >= 10, got {grid_resolution}")
    pts = np.linspace(0.0, 1.0, grid_resolution + 1)
    A, B = np.meshgrid(pts, pts, indexing="ij")
    a, b = A.ravel(), B.ravel()
    t = np.asarray(rule.theta(a, b), dtype=float)
    t_swapped = np.asarray(rule.theta(b, a), dtype=float)

    sym_worst = float(np.max(np.abs(t - t_swapped)))
    neg_worst = float(max(0.0, -np.min(t)))

    m = np.minimum(a, b)
    on_boundary = m == 0.0
    boundary_worst = float(np.max(np.abs(t[on_boundary]))) if np.any(on_boundary) else 0.0
    interior_zero = (~on_boundary) & (t <= 0.0)
    interior_worst = float(np.max(m[interior_zero])) if np.any(interior_zero) else 0.0
    vanish_worst = max(boundary_worst, interior_worst)

    # theta must be a nondecreasing function of min(a, b): any pair with a
    # smaller-or-equal min and a larger theta is a violation.
    order = np.argsort(m, kind="stable")
    m_sorted, t_sorted = m[order], t[order]
    uniq, starts = np.unique(m_sorted, return_index=True)
    group_max = np.maximum.reduceat(t_sorted, starts)
    running_max = np.maximum.accumulate(group_max)
    group_of = np.searchsorted(uniq, m_sorted)
    mono_worst = float(max(0.0, np.max(running_max[group_of] - t_sorted)))

    tol = 1e-12
    return RuleValidationReport(
        rule=repr(rule),
        grid_resolution=grid_resolution,
        symmetry=PropertyCheck(sym_worst <= tol, sym_worst),
        nonnegativity=PropertyCheck(neg_worst <= tol, neg_worst),
        vanishing_only_at_boundary=PropertyCheck(vanish_worst <= tol, vanish_worst),
        monotone_in_min=PropertyCheck(mono_worst <= tol, mono_worst),
    )


def rule_from_config(doc: dict):
    """Build a weight rule from ``{"kind": ..., ...}`` configuration."""
    kind = doc.get("kind")
    if kind == "min_power":
        return MinPower(alpha=float(doc.get("alpha", 1.0)))
    if kind == "arithmetic_mean":
        return ArithmeticMean()
    if kind == "entropy_induced":
        from .potentials import potential_from_config

        return EntropyInduced(potential=potential_from_config(doc["potential"]))
    raise DomainError(f"unknown weight-rule kind {kind!r}")
