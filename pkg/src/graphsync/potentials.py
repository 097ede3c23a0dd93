"""Potential functionals on density vectors and their two-node reductions.

``KuramotoQuadratic`` is the quadratic concentration potential
``F(rho) = -(kappa/2) * sum(rho_i^2)`` defined for any vertex count; it is the
only potential with ambient gradient/Hessian and therefore the only one the
graph dynamics accept.  The entropy potentials (Shannon, Renyi, Tsallis) are
defined on two nodes only, parametrised by the mass ``r`` on node 1.  Each is
nonnegative, symmetric about ``r = 1/2`` and vanishes exactly there.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BoundarySingularityError, DimensionError, DomainError

_SIMPLEX_TOL = 1e-9


def _xlogx(x):
    x = np.asarray(x, dtype=float)
    out = np.where(x > 0.0, x * np.log(np.where(x > 0.0, x, 1.0)), 0.0)
    return out if out.ndim else float(out)


def _check_unit_interval(r) -> None:
    r = np.asarray(r, dtype=float)
    if np.any(r < -_SIMPLEX_TOL) or np.any(r > 1.0 + _SIMPLEX_TOL):
        raise DomainError(f"r must lie in [0, 1], got {r!r}")


@dataclass(frozen=True)
class KuramotoQuadratic:
    """Quadratic potential -(kappa/2) * sum(rho^2) with coupling kappa > 0."""

    kappa: float = 1.0

    def __post_init__(self):
        if self.kappa <= 0:
            raise DomainError(f"kappa must be positive, got {self.kappa}")

    def value(self, rho) -> float:
        rho = np.asarray(rho, dtype=float)
        return -0.5 * self.kappa * float(np.dot(rho, rho))

    def grad(self, rho) -> np.ndarray:
        return -self.kappa * np.asarray(rho, dtype=float)

    def hess(self, rho) -> np.ndarray:
        n = len(np.asarray(rho))
        return -self.kappa * np.eye(n)

    # Two-node reduction in r = rho_1, rho_2 = 1 - r.
    def value_r(self, r) -> float:
        r = np.asarray(r, dtype=float)
        out = -0.5 * self.kappa * (r**2 + (1.0 - r) ** 2)
        return out if out.ndim else float(out)

    def grad_r(self, r):
        r = np.asarray(r, dtype=float)
        out = -self.kappa * (2.0 * r - 1.0)
        return out if out.ndim else float(out)

    def hess_r(self, r) -> float:
        return -2.0 * self.kappa


class _TwoNodeEntropy:
    """Shared two-node machinery; subclasses provide value_r/grad_r/hess_r."""

    def value(self, rho) -> float:
        return self.value_r(_two_node_r(rho))

    def grad(self, rho):
        return self.grad_r(_two_node_r(rho))

    def hess(self, rho):
        return self.hess_r(_two_node_r(rho))


def _two_node_r(rho) -> float:
    rho = np.asarray(rho, dtype=float)
    if rho.ndim == 0:
        r = float(rho)
    else:
        if rho.shape != (2,):
            raise DimensionError(
                f"entropy potentials are two-node only, got shape {rho.shape}"
            )
        if abs(float(rho.sum()) - 1.0) > _SIMPLEX_TOL:
            raise DomainError(f"two-node density must sum to 1, got {rho!r}")
        r = float(rho[0])
    _check_unit_interval(r)
    return r


@dataclass(frozen=True)
class ShannonPotential(_TwoNodeEntropy):
    """log 2 + r log r + (1-r) log(1-r), with 0 log 0 = 0."""

    def value_r(self, r):
        _check_unit_interval(r)
        r = np.asarray(r, dtype=float)
        out = math.log(2.0) + _xlogx(r) + _xlogx(1.0 - r)
        return out if np.ndim(out) else float(out)

    def grad_r(self, r):
        _check_unit_interval(r)
        r = np.asarray(r, dtype=float)
        if np.any(r <= 0.0) or np.any(r >= 1.0):
            raise BoundarySingularityError("d/dr log-entropy diverges at r in {0, 1}")
        out = np.log(r) - np.log(1.0 - r)
        return out if out.ndim else float(out)

    def hess_r(self, r):
        _check_unit_interval(r)
        r = np.asarray(r, dtype=float)
        if np.any(r <= 0.0) or np.any(r >= 1.0):
            raise BoundarySingularityError("curvature diverges at r in {0, 1}")
        out = 1.0 / r + 1.0 / (1.0 - r)
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class RenyiPotential(_TwoNodeEntropy):
    """log 2 - log(r^alpha + (1-r)^alpha) / (1 - alpha), alpha >= 0, alpha != 1.

    Construction validates that the value is nonnegative on a grid and does
    not degenerate (it must vanish only at r = 1/2); parameters failing either
    check are rejected.
    """

    alpha: float

    def __post_init__(self):
        if self.alpha < 0 or self.alpha == 1.0:
            raise DomainError(f"alpha must be >= 0 and != 1, got {self.alpha}")
        grid = np.linspace(0.0, 1.0, 201)
        vals = self.value_r(grid)
        if np.min(vals) < -1e-12:
            raise DomainError(f"Renyi potential with alpha={self.alpha} is negative on [0, 1]")
        if self.value_r(0.25) <= 1e-8:
            raise DomainError(f"Renyi potential with alpha={self.alpha} is degenerate")

    def _g(self, r):
        return np.power(r, self.alpha) + np.power(1.0 - r, self.alpha)

    def value_r(self, r):
        _check_unit_interval(r)
        r = np.asarray(r, dtype=float)
        out = math.log(2.0) - np.log(self._g(r)) / (1.0 - self.alpha)
        return out if out.ndim else float(out)

    def grad_r(self, r):
        _check_unit_interval(r)
        r = np.asarray(r, dtype=float)
        if np.any(r <= 0.0) or np.any(r >= 1.0):
            raise BoundarySingularityError("Renyi gradient not evaluated at r in {0, 1}")
        a = self.alpha
        gp = a * (np.power(r, a - 1.0) - np.power(1.0 - r, a - 1.0))
        out = -gp / ((1.0 - a) * self._g(r))
        return out if out.ndim else float(out)

    def hess_r(self, r):
        _check_unit_interval(r)
        r = np.asarray(r, dtype=float)
        if np.any(r <= 0.0) or np.any(r >= 1.0):
            raise BoundarySingularityError("Renyi curvature not evaluated at r in {0, 1}")
        a = self.alpha
        g = self._g(r)
        gp = a * (np.power(r, a - 1.0) - np.power(1.0 - r, a - 1.0))
        gpp = a * (a - 1.0) * (np.power(r, a - 2.0) + np.power(1.0 - r, a - 2.0))
        out = -(gpp * g - gp**2) / ((1.0 - a) * g**2)
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class TsallisPotential(_TwoNodeEntropy):
    """(r^q + (1-r)^q - 2^(1-q)) / (q - 1) for q > 1."""

    q: float

    def __post_init__(self):
        if self.q <= 1.0:
            raise DomainError(f"q must exceed 1, got {self.q}")

    def value_r(self, r):
        _check_unit_interval(r)
        r = np.asarray(r, dtype=float)
        q = self.q
        out = (np.power(r, q) + np.power(1.0 - r, q) - 2.0 ** (1.0 - q)) / (q - 1.0)
        return out if out.ndim else float(out)

    def grad_r(self, r):
        _check_unit_interval(r)
        r = np.asarray(r, dtype=float)
        q = self.q
        out = q * (np.power(r, q - 1.0) - np.power(1.0 - r, q - 1.0)) / (q - 1.0)
        return out if out.ndim else float(out)

    def hess_r(self, r):
        _check_unit_interval(r)
        r = np.asarray(r, dtype=float)
        q = self.q
        with np.errstate(divide="ignore"):
            out = q * (np.power(r, q - 2.0) + np.power(1.0 - r, q - 2.0))
        if not np.all(np.isfinite(out)):
            raise BoundarySingularityError(f"Tsallis curvature diverges at the boundary for q={q}")
        return out if out.ndim else float(out)


ENTROPY_KINDS = (ShannonPotential, RenyiPotential, TsallisPotential)


def potential_value(potential, rho) -> float:
    """F evaluated at a density vector (entropy kinds also accept scalar r)."""
    return potential.value(rho)


def potential_grad(potential, rho):
    """Ambient gradient vector for the quadratic kind; dF/dr for entropy kinds."""
    return potential.grad(rho)


def potential_hess(potential, rho):
    """Ambient Hessian matrix for the quadratic kind; d2F/dr2 for entropy kinds."""
    return potential.hess(rho)


def potential_from_config(doc: dict):
    """Build a potential from ``{"kind": ..., ...}`` configuration."""
    kind = doc.get("kind")
    if kind == "kuramoto":
        return KuramotoQuadratic(kappa=float(doc.get("kappa", 1.0)))
    if kind == "shannon":
        return ShannonPotential()
    if kind == "renyi":
        return RenyiPotential(alpha=float(doc["alpha"]))
    if kind == "tsallis":
        return TsallisPotential(q=float(doc["q"]))
    raise DomainError(f"unknown potential kind {kind!r}")
