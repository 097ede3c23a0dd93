"""Discrete Hopf-Cole change of variables for the second-order flow.

The substitution splits grad F and S into the pair

    xi   = (grad F(rho) + S) / 2,      xi_star = (grad F(rho) - S) / 2,

so  xi + xi_star = grad F(rho)  and  xi - xi_star = S.  In these variables
the flow becomes

    d xi_j/dt      =  sum_{(k,l)} HessF_jk * omega_kl * theta_kl * (xi_k - xi_l)
                      + sum_{l ~ j} omega_jl * (xi*_l - xi*_j) * (xi_l - xi_j)
                                   * d theta_jl / d rho_j
    d xi*_j/dt     =  the same with xi and xi* exchanged and both signs flipped,

with (k, l) running over ordered adjacent pairs.  Every term in d xi carries
a difference of xi values, so the hyperplane xi = 0 is invariant: starting
from gradient-flow data (S = -grad F, hence xi = 0) keeps xi at exactly zero
for all time, step by step, even in floating point.  That structural zero is
the point of integrating in these variables.

rho is carried alongside (xi, xi_star) because grad F is generally not
invertible; for the quadratic potential the carried and recovered densities
are asserted to agree as a consistency diagnostic.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConsistencyError, DimensionError
from .first_order import density_state
from .graphs import Graph
from .integrate import IntegratorSpec, Trajectory, integrate
from .potentials import KuramotoQuadratic
from .second_order import PhaseState

#: Consistency tolerances: defining relation, and carried-vs-recovered rho.
RELATION_TOL = 1e-6
CARRIED_RHO_TOL = 1e-8


@dataclass(frozen=True)
class HopfColeState:
    """Carried density plus the split pair (xi, xi_star)."""

    rho: np.ndarray
    xi: np.ndarray
    xi_star: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rho", np.asarray(self.rho, dtype=float))
        object.__setattr__(self, "xi", np.asarray(self.xi, dtype=float))
        object.__setattr__(self, "xi_star", np.asarray(self.xi_star, dtype=float))
        if not (self.rho.shape == self.xi.shape == self.xi_star.shape):
            raise DimensionError("rho, xi, xi_star must share one shape")

    @property
    def n(self) -> int:
        return self.rho.size

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.rho, self.xi, self.xi_star])

    @classmethod
    def from_vector(cls, y: np.ndarray) -> "HopfColeState":
        n = y.size // 3
        return cls(rho=y[:n], xi=y[n : 2 * n], xi_star=y[2 * n :])


def to_hopf_cole(state: PhaseState, potential) -> HopfColeState:
    """Split (rho, S) into (rho, xi, xi_star)."""
    g = np.asarray(potential.grad(state.rho), dtype=float)
    return HopfColeState(
        rho=state.rho,
        xi=0.5 * (g + state.S),
        xi_star=0.5 * (g - state.S),
    )


def from_hopf_cole(hc: HopfColeState, potential, tol: float = RELATION_TOL) -> PhaseState:
    """Invert the split; raises if xi + xi_star has drifted off grad F(rho).

    For the quadratic potential the density is recovered from the variables
    themselves (rho = -(xi + xi_star)/kappa); otherwise the carried density
    is returned.
    """
    g_carried = np.asarray(potential.grad(hc.rho), dtype=float)
    defect = float(np.max(np.abs(hc.xi + hc.xi_star - g_carried)))
    if defect > tol:
        raise ConsistencyError(
            f"xi + xi_star differs from grad F(rho) by {defect:.3e} (tol {tol:g})"
        )
    if isinstance(potential, KuramotoQuadratic):
        rho = -(hc.xi + hc.xi_star) / potential.kappa
    else:
        rho = hc.rho
    return PhaseState(rho=rho, S=hc.xi - hc.xi_star)


def hopf_cole_field(graph: Graph, rule, potential) -> Callable[[np.ndarray], np.ndarray]:
    """Prebuilt packed field y = (rho, xi, xi_star) -> derivatives."""
    tail, head, w = graph.tail, graph.head, graph.pair_weight
    n = graph.n

    def field(y: np.ndarray) -> np.ndarray:
        rho, xi, xs = y[:n], y[n : 2 * n], y[2 * n :]
        rt, rh = rho[tail], rho[head]
        th = rule.theta(rt, rh)
        S = xi - xs
        drho = np.bincount(tail, weights=w * th * (S[tail] - S[head]), minlength=n)

        hess = potential.hess(rho)
        dth_tail, _ = rule.partials(rt, rh)
        linear_xi = hess @ np.bincount(tail, weights=w * th * (xi[tail] - xi[head]), minlength=n)
        linear_xs = hess @ np.bincount(tail, weights=w * th * (xs[tail] - xs[head]), minlength=n)
        cross = np.bincount(
            tail,
            weights=w * (xs[head] - xs[tail]) * (xi[head] - xi[tail]) * dth_tail,
            minlength=n,
        )
        return np.concatenate([drho, linear_xi + cross, -linear_xs - cross])

    return field


def rhs_hopf_cole(graph: Graph, rule, potential, hc: HopfColeState):
    """Time derivatives (d rho, d xi, d xi_star)."""
    if hc.n != graph.n:
        raise DimensionError(f"state size {hc.n} != vertex count {graph.n}")
    dy = hopf_cole_field(graph, rule, potential)(hc.as_vector())
    n = graph.n
    return dy[:n], dy[n : 2 * n], dy[2 * n :]


def simulate_hopf_cole(
    graph: Graph,
    rule,
    potential,
    hc0: HopfColeState,
    spec: IntegratorSpec,
) -> Trajectory:
    """Integrate in split variables, tracking max|xi| at record points.

    For the quadratic potential the carried density is checked against the
    recovered one (-(xi + xi_star)/kappa) at every record point; divergence
    beyond CARRIED_RHO_TOL raises ConsistencyError.
    """
    if hc0.n != graph.n:
        raise DimensionError(f"state size {hc0.n} != vertex count {graph.n}")
    density_state(hc0.rho)
    g0 = np.asarray(potential.grad(hc0.rho), dtype=float)
    defect0 = float(np.max(np.abs(hc0.xi + hc0.xi_star - g0)))
    if defect0 > RELATION_TOL:
        raise ConsistencyError(
            f"initial xi + xi_star differs from grad F(rho) by {defect0:.3e}"
        )
    n = graph.n
    field = hopf_cole_field(graph, rule, potential)

    recovers = isinstance(potential, KuramotoQuadratic)

    def check_consistency(y: np.ndarray) -> float:
        if not recovers:
            return 0.0
        recovered = -(y[n : 2 * n] + y[2 * n :]) / potential.kappa
        dev = float(np.max(np.abs(recovered - y[:n])))
        if dev > CARRIED_RHO_TOL:
            raise ConsistencyError(
                f"carried and recovered densities diverged by {dev:.3e}"
            )
        return dev

    observers = {
        "max_abs_xi": lambda y: float(np.max(np.abs(y[n : 2 * n]))),
        "rho_consistency": check_consistency,
    }
    return integrate(field, hc0.as_vector(), spec, observers, n_density=n)
