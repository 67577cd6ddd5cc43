"""Classical comparison solvers and exact oracles for small instances."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .dynamics import SolverResult
from .encoders import CutAssignment, cut_size
from .errors import SearchSpaceError
from .imaginary_time import enumerate_states
from .polynomial import evaluate, evaluate_many, gradient

STATE_GUARD = 10**8


@dataclass(frozen=True)
class GdConfig:
    step_size: float = 0.05
    iterations: int = 10_000
    tolerance: float = 1e-9

    def __post_init__(self):
        if self.step_size <= 0:
            raise ValueError("step size must be positive")
        if self.iterations < 1:
            raise ValueError("need at least one iteration")


def project_simplex(y, R=1.0):
    """Euclidean projection onto {v >= 0, sum v = R} (sort-and-threshold)."""
    y = np.asarray(y, dtype=float)
    if not np.all(np.isfinite(y)):
        raise ValueError("cannot project a non-finite point")
    if not R > 0:
        raise ValueError("sum constraint must be positive")
    u = np.sort(y)[::-1]
    cumsum = np.cumsum(u)
    j = np.arange(1, y.size + 1)
    feasible = u - (cumsum - R) / j > 0
    rho = np.nonzero(feasible)[0][-1]
    tau = (cumsum[rho] - R) / (rho + 1)
    return np.maximum(y - tau, 0.0)


def projected_gradient_descent(program, v0, config=GdConfig()):
    """Fixed-step gradient descent with exact simplex projection.

    Deterministic; stops when the iterate moves less than the tolerance or
    the iteration cap is reached.  Reports the best iterate seen.
    """
    R = program.sum_constraint
    v = np.asarray(v0, dtype=float)
    if abs(v.sum() - R) > 1e-6 * R or np.any(v < 0):
        raise ValueError("v0 must lie on the constraint simplex")
    best_energy = evaluate(program, v)
    best_v = v
    trace = []
    for _ in range(config.iterations):
        g = gradient(program, v)
        if not np.all(np.isfinite(g)):
            raise FloatingPointError("non-finite gradient")
        v_next = project_simplex(v - config.step_size * g, R)
        energy = evaluate(program, v_next)
        trace.append(energy)
        if energy < best_energy:
            best_energy, best_v = energy, v_next
        moved = np.linalg.norm(v_next - v)
        v = v_next
        if moved < config.tolerance:
            break
    return SolverResult(
        best_energy=best_energy,
        best_v=best_v,
        energy_trace=np.array(trace),
        v_trace=None,
        iterations_run=len(trace),
        seed=0,
    )


def brute_force_grid(program, delta):
    """Exact minimum of the cost over the simplex grid of spacing delta."""
    N = program.num_vars
    M = int(round(program.sum_constraint / delta))
    num_states = comb(M + N - 1, N - 1)
    if num_states > STATE_GUARD:
        raise SearchSpaceError(f"{num_states} grid states exceed guard {STATE_GUARD}")
    states = enumerate_states(N, program.sum_constraint, delta)
    energies = evaluate_many(program, states)
    best = int(np.argmin(energies))
    return states[best], float(energies[best])


def brute_force_cut(graph, k):
    """Exact max-k-cut by exhaustion, with node 0's color fixed by symmetry."""
    n = graph.num_nodes
    if k < 2:
        raise ValueError("need at least two colors")
    if k ** max(n - 1, 0) > STATE_GUARD:
        raise SearchSpaceError(
            f"{k}^{n - 1} assignments exceed guard {STATE_GUARD}"
        )
    edges = np.array([(i, j) for i, j, _w in graph.edges], dtype=np.int64).reshape(-1, 2)
    weights = np.array([w for _i, _j, w in graph.edges])
    total = k ** (n - 1)
    best_cut = -1.0
    best_colors = None
    chunk = 1 << 18
    for start in range(0, total, chunk):
        codes = np.arange(start, min(start + chunk, total), dtype=np.int64)
        colors = np.zeros((codes.size, n), dtype=np.int64)
        rem = codes
        for node in range(1, n):
            colors[:, node] = rem % k
            rem = rem // k
        if edges.size:
            cuts = (colors[:, edges[:, 0]] != colors[:, edges[:, 1]]) @ weights
        else:
            cuts = np.zeros(codes.size)
        idx = int(np.argmax(cuts))
        if cuts[idx] > best_cut:
            best_cut = float(cuts[idx])
            best_colors = tuple(int(c) for c in colors[idx])
    return CutAssignment(colors=best_colors), best_cut


def local_search_cut(graph, k, restarts=200, seed=0):
    """Multistart single-node-move hill climbing for max-k-cut.

    Heuristic stand-in for the exact oracle when brute force is out of reach;
    on dense graphs of a few dozen nodes it reliably finds the optimum.
    """
    n = graph.num_nodes
    rng = np.random.default_rng(seed)
    adj = np.zeros((n, n))
    for i, j, w in graph.edges:
        adj[i, j] = adj[j, i] = w
    best_cut = -1.0
    best_colors = None
    for _ in range(restarts):
        colors = rng.integers(0, k, size=n)
        improved = True
        while improved:
            improved = False
            for node in rng.permutation(n):
                # weight toward each color among the node's neighbors; the
                # cheapest color minimizes uncut (agreeing) edge weight
                agree = np.zeros(k)
                for other in range(n):
                    if adj[node, other]:
                        agree[colors[other]] += adj[node, other]
                target = int(np.argmin(agree))
                if agree[target] < agree[colors[node]]:
                    colors[node] = target
                    improved = True
        assignment = CutAssignment(colors=tuple(int(c) for c in colors))
        value = cut_size(graph, assignment)
        if value > best_cut:
            best_cut = value
            best_colors = assignment
    return best_colors, best_cut
