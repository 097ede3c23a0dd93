"""First-order concentration dynamics on graphs.

The flow on a weighted graph is

    d rho_j / dt = kappa * sum_{l ~ j} omega_jl * theta(rho_j, rho_l) * (rho_j - rho_l),

which conserves total mass and increases sum(rho^2): mass drains from
low-density vertices into high-density ones through every edge whose weight
has not yet shut off.  The limit points put mass 1/m on some m vertices
(equal maxima persist forever; a strict maximum keeps its lead), and on
non-complete graphs mutually non-adjacent vertices can share the mass.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DimensionError, SimplexViolationError
from .graphs import Graph
from .integrate import IntegratorSpec, Trajectory, integrate, project_simplex_clip

#: Sup-norm of the vector field below which a trajectory counts as converged.
#: Must sit far enough below detect_limit's stall tolerance that the state
#: cannot move appreciably over a trailing window after the stop fires; for
#: decay rates up to ~1 per time unit, 1e-13 leaves two orders of margin.
CONVERGENCE_TOL = 1e-13


def density_state(rho, tol: float = 1e-9) -> np.ndarray:
    """Validate a density vector: nonnegative entries summing to one."""
    rho = np.asarray(rho, dtype=float)
    if rho.ndim != 1 or rho.size < 2:
        raise DimensionError(f"density must be a vector of length >= 2, got shape {rho.shape}")
    if abs(float(rho.sum()) - 1.0) > tol:
        raise SimplexViolationError(f"density sums to {float(rho.sum())!r}, not 1")
    if np.any(rho < -tol):
        raise SimplexViolationError(f"negative density component {float(rho.min())!r}")
    return rho


def first_order_field(graph: Graph, rule, kappa: float) -> Callable[[np.ndarray], np.ndarray]:
    """Prebuilt vector field rho -> d rho/dt for repeated evaluation."""
    tail, head, w = graph.tail, graph.head, graph.pair_weight
    n = graph.n

    def field(rho: np.ndarray) -> np.ndarray:
        rt, rh = rho[tail], rho[head]
        flux = w * rule.theta(rt, rh) * (rt - rh)
        return kappa * np.bincount(tail, weights=flux, minlength=n)

    return field


def rhs_first_order(graph: Graph, rule, kappa: float, rho) -> np.ndarray:
    """Time derivative of the density vector; components sum to zero."""
    rho = np.asarray(rho, dtype=float)
    if rho.size != graph.n:
        raise DimensionError(f"density length {rho.size} != vertex count {graph.n}")
    return first_order_field(graph, rule, kappa)(rho)


def simulate_first_order(
    graph: Graph,
    rule,
    kappa: float,
    rho0,
    spec: IntegratorSpec,
    *,
    clip_tol: float = 1e-9,
    stop_on_convergence: bool = True,
) -> Trajectory:
    """Integrate the concentration flow with per-step simplex clipping.

    Clipping only zeroes round-off-scale negatives; real violations raise.
    The run stops early (stop_reason ``'converged'``) once the sup-norm of
    the vector field falls below CONVERGENCE_TOL at a record point, after
    which the state cannot move appreciably.
    """
    rho0 = density_state(rho0, tol=clip_tol)
    if rho0.size != graph.n:
        raise DimensionError(f"density length {rho0.size} != vertex count {graph.n}")
    field = first_order_field(graph, rule, kappa)
    observers = {
        "sum_sq": lambda y: float(np.dot(y, y)),
        "max_gap": lambda y: max_gap(y),
    }
    stop = None
    if stop_on_convergence:
        stop = lambda y: float(np.max(np.abs(field(y)))) < CONVERGENCE_TOL
    traj = integrate(
        field,
        rho0,
        spec,
        observers,
        post_step=lambda y: project_simplex_clip(y, tol=clip_tol),
        stop_when=stop,
        n_density=graph.n,
    )
    if traj.stop_reason == "stop_condition":
        traj.stop_reason = "converged"
    return traj


@dataclass(frozen=True)
class EquilibriumClass:
    """Support of a rest state: m vertices carrying mass 1/m each.

    ``support`` holds the 1-based labels of vertices above tolerance;
    ``is_member`` tells whether the vector is within tolerance (per
    component) of the flat state on that support.
    """

    m: int
    support: tuple[int, ...]
    value: float
    is_member: bool


def classify_equilibrium(rho, tol: float = 1e-6) -> EquilibriumClass:
    """Identify the support of rho and test closeness to the flat rest state."""
    rho = np.asarray(rho, dtype=float)
    support = tuple(int(j + 1) for j in np.flatnonzero(rho > tol))
    m = len(support)
    if m == 0:
        return EquilibriumClass(m=0, support=(), value=float("nan"), is_member=False)
    target = np.zeros_like(rho)
    target[[j - 1 for j in support]] = 1.0 / m
    return EquilibriumClass(
        m=m,
        support=support,
        value=1.0 / m,
        is_member=bool(np.max(np.abs(rho - target)) <= tol),
    )


def max_gap(rho) -> float:
    """Difference between the largest and second-largest components."""
    rho = np.asarray(rho, dtype=float)
    if rho.size < 2:
        raise DimensionError("max_gap needs at least two components")
    two = np.partition(rho, rho.size - 2)[-2:]
    return float(two[1] - two[0])
