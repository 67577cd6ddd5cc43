"""Exact relaxation oracle on a discretized simplex.

A probability mixture over simplex grid points is evolved by damping each
point's weight as exp(-2 E t) and renormalizing, the classical limit of
imaginary-time relaxation of a diagonal density matrix.  Intended for
small-instance verification of the stochastic solver: it is exact, but the
number of grid states grows combinatorially.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .polynomial import evaluate_many


@dataclass(frozen=True)
class DiscretizedEnsemble:
    states: np.ndarray  # (num_states, N) grid points, each summing to R
    probabilities: np.ndarray  # (num_states,), sums to 1
    energies: np.ndarray  # (num_states,) cached cost per state


def enumerate_states(N, R, delta):
    """All compositions of R into N parts on a grid of spacing delta.

    Lexicographic order; R/delta must be integral.
    """
    if N < 1:
        raise ValueError("need at least one variable")
    M = R / delta
    if abs(M - round(M)) > 1e-9:
        raise ValueError(f"R/delta = {M} is not integral")
    M = int(round(M))
    parts = np.array(list(_compositions(M, N)), dtype=float)
    return parts * (R / M) if M > 0 else np.zeros((1, N))


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def make_ensemble(program, delta, probabilities=None):
    """Uniform (or given) mixture over the program's simplex grid."""
    states = enumerate_states(program.num_vars, program.sum_constraint, delta)
    energies = evaluate_many(program, states)
    if probabilities is None:
        probabilities = np.full(len(states), 1.0 / len(states))
    else:
        probabilities = np.asarray(probabilities, dtype=float)
        probabilities = probabilities / probabilities.sum()
    return DiscretizedEnsemble(states=states, probabilities=probabilities, energies=energies)


def evolve(ensemble, t):
    """Damp weights by exp(-2 E t) and renormalize.

    Subtracting the minimum energy before exponentiating changes only the
    normalization factor, so the resulting distribution is identical while
    staying clear of underflow.
    """
    if t < 0:
        raise ValueError("evolution time must be non-negative")
    E = ensemble.energies
    weights = ensemble.probabilities * np.exp(-2.0 * (E - E.min()) * t)
    total = weights.sum()
    return DiscretizedEnsemble(
        states=ensemble.states,
        probabilities=weights / total,
        energies=E,
    )


def expected_energy(ensemble):
    return float(ensemble.probabilities @ ensemble.energies)


def ground_states(ensemble, tol=0.0):
    """Grid points within tol of the minimum energy."""
    if tol < 0:
        raise ValueError("tolerance must be non-negative")
    E = ensemble.energies
    return ensemble.states[E <= E.min() + tol]
