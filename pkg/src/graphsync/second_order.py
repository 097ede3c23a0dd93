"""Second-order Hamiltonian dynamics (rho, S) on graphs.

With g = grad F(rho) and theta_jl = theta(rho_j, rho_l), the flow is the
canonical system of

    H(rho, S) = (1/4) * sum over ordered adjacent pairs (i, j) of
                omega_ij * theta_ij * ((S_i - S_j)^2 - (g_i - g_j)^2),

namely d rho/dt = dH/dS and dS/dt = -dH/d rho:

    d rho_j/dt = sum_{l ~ j} omega_jl * (S_j - S_l) * theta_jl
    d S_j/dt   = (1/2) sum_{l ~ j} omega_jl * ((g_j - g_l)^2 - (S_j - S_l)^2)
                                  * d theta_jl / d rho_j
                 + sum_k HessF_jk * sum_{l ~ k} omega_kl * theta_kl * (g_k - g_l).

H is a constant of motion while the state stays away from the boundary of
the simplex (where the weight derivatives degenerate).  Initialising with
S = -sign * grad F collapses the system onto the first-order flow of the
potential sign * F, and H = 0 on that branch.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import (
    DegenerateDerivativeError,
    DimensionError,
    SimplexViolationError,
)
from .first_order import density_state
from .graphs import Graph
from .integrate import IntegratorSpec, Trajectory, integrate

#: Hard simplex tolerance for second-order runs (no clipping is applied).
SIMPLEX_HARD_TOL = 1e-6


@dataclass(frozen=True)
class PhaseState:
    """Density vector paired with a per-vertex potential vector."""

    rho: np.ndarray
    S: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rho", np.asarray(self.rho, dtype=float))
        object.__setattr__(self, "S", np.asarray(self.S, dtype=float))
        if self.rho.shape != self.S.shape:
            raise DimensionError(
                f"rho and S shapes differ: {self.rho.shape} vs {self.S.shape}"
            )
        if not np.all(np.isfinite(self.S)):
            raise DimensionError("S must be finite")

    @property
    def n(self) -> int:
        return self.rho.size

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.rho, self.S])

    @classmethod
    def from_vector(cls, y: np.ndarray) -> "PhaseState":
        n = y.size // 2
        return cls(rho=y[:n], S=y[n:])


def second_order_field(graph: Graph, rule, potential) -> Callable[[np.ndarray], np.ndarray]:
    """Prebuilt packed field y = (rho, S) -> (d rho, d S)."""
    tail, head, w = graph.tail, graph.head, graph.pair_weight
    n = graph.n

    def field(y: np.ndarray) -> np.ndarray:
        rho, S = y[:n], y[n:]
        rt, rh = rho[tail], rho[head]
        th = rule.theta(rt, rh)
        dS_edge = S[tail] - S[head]
        drho = np.bincount(tail, weights=w * th * dS_edge, minlength=n)

        g = potential.grad(rho)
        hess = potential.hess(rho)
        dg_edge = g[tail] - g[head]
        dth_tail, _ = rule.partials(rt, rh)
        kinetic = 0.5 * np.bincount(
            tail, weights=w * (dg_edge**2 - dS_edge**2) * dth_tail, minlength=n
        )
        u = np.bincount(tail, weights=w * th * dg_edge, minlength=n)
        dS = kinetic + hess @ u
        return np.concatenate([drho, dS])

    return field


def rhs_second_order(graph: Graph, rule, potential, state: PhaseState):
    """Time derivatives (d rho, d S); d rho components sum to zero."""
    if state.n != graph.n:
        raise DimensionError(f"state size {state.n} != vertex count {graph.n}")
    rt, rh = state.rho[graph.tail], state.rho[graph.head]
    dth, _ = rule.partials(rt, rh)
    if not np.all(np.isfinite(dth)):
        raise DegenerateDerivativeError(
            "weight derivative is infinite at a zero-density edge"
        )
    dy = second_order_field(graph, rule, potential)(state.as_vector())
    return dy[: graph.n], dy[graph.n :]


def hamiltonian(graph: Graph, rule, potential, state: PhaseState) -> float:
    """Conserved energy of the flow (ordered-pair sum with prefactor 1/4)."""
    rho, S = state.rho, state.S
    tail, head, w = graph.tail, graph.head, graph.pair_weight
    th = rule.theta(rho[tail], rho[head])
    g = potential.grad(rho)
    dS = S[tail] - S[head]
    dg = g[tail] - g[head]
    return 0.25 * float(np.sum(w * th * (dS**2 - dg**2)))


def gradient_flow_init(rho0, potential, sign: int = +1) -> PhaseState:
    """Initial phase state S = -sign * grad F(rho0) selecting a first-order branch.

    sign=+1 reduces the flow to the concentration dynamics of F itself;
    sign=-1 to the flow of -F.
    """
    if sign not in (+1, -1):
        raise DimensionError(f"sign must be +1 or -1, got {sign}")
    rho0 = density_state(rho0)
    return PhaseState(rho=rho0, S=-sign * np.asarray(potential.grad(rho0), dtype=float))


def simulate_second_order(
    graph: Graph,
    rule,
    potential,
    state0: PhaseState,
    spec: IntegratorSpec,
    *,
    stop_when: Optional[Callable[[PhaseState], bool]] = None,
) -> Trajectory:
    """Integrate the Hamiltonian flow, recording H at each record point.

    No simplex clipping is applied: clipping would break energy
    conservation, so any density excursion beyond SIMPLEX_HARD_TOL raises
    SimplexViolationError instead.
    """
    if state0.n != graph.n:
        raise DimensionError(f"state size {state0.n} != vertex count {graph.n}")
    density_state(state0.rho)
    n = graph.n
    field = second_order_field(graph, rule, potential)

    def guard(y: np.ndarray) -> np.ndarray:
        rho = y[:n]
        if float(rho.min()) < -SIMPLEX_HARD_TOL or abs(float(rho.sum()) - 1.0) > SIMPLEX_HARD_TOL:
            raise SimplexViolationError(
                f"density left the simplex beyond {SIMPLEX_HARD_TOL} "
                f"(min={float(rho.min())!r}, mass={float(rho.sum())!r})"
            )
        return y

    observers = {
        "hamiltonian": lambda y: hamiltonian(
            graph, rule, potential, PhaseState.from_vector(y)
        ),
        "sum_sq": lambda y: float(np.dot(y[:n], y[:n])),
    }
    stop = None
    if stop_when is not None:
        stop = lambda y: bool(stop_when(PhaseState.from_vector(y)))
    return integrate(
        field,
        state0.as_vector(),
        spec,
        observers,
        post_step=guard,
        stop_when=stop,
        n_density=n,
    )
