"""Sparse polynomial programs on the scaled simplex.

A program is a degree-1..5 polynomial cost over N non-negative variables
together with a fixed total-mass constraint sum(v) = R.  Terms are stored as
a flat sorted list of (index multiset, coefficient) pairs; repeated indices
encode powers, e.g. indices (0, 0, 1) means v0^2 * v1.  The sorted multiset
is the canonical form, so coefficient tensors that are symmetric under index
permutation collapse to a single entry.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import ParseError

MAX_ORDER = 5


@dataclass(frozen=True)
class Monomial:
    indices: tuple[int, ...]  # sorted ascending, length 1..5
    coefficient: float


@dataclass(frozen=True)
class PolynomialProgram:
    num_vars: int
    terms: tuple[Monomial, ...]
    sum_constraint: float
    # lazily built evaluation/gradient tables, see _compiled()
    _tables: dict = field(default=None, init=False, repr=False, compare=False)

    def _compiled(self):
        if self._tables is None:
            object.__setattr__(self, "_tables", _build_tables(self))
        return self._tables


def build_program(raw_terms, num_vars, R):
    """Canonicalize raw (indices, coefficient) pairs into a program.

    Indices are sorted, terms with identical index multisets are merged, and
    exact-zero coefficients are dropped.
    """
    if num_vars < 1:
        raise ValueError(f"num_vars must be >= 1, got {num_vars}")
    if not R > 0:
        raise ValueError(f"sum constraint must be positive, got {R}")
    merged: dict[tuple[int, ...], float] = {}
    for indices, coeff in raw_terms:
        idx = tuple(sorted(int(i) for i in indices))
        if len(idx) == 0:
            raise ValueError("empty index list (constant terms are not representable)")
        if len(idx) > MAX_ORDER:
            raise ValueError(f"term order {len(idx)} exceeds maximum {MAX_ORDER}")
        if idx[0] < 0 or idx[-1] >= num_vars:
            raise ValueError(f"variable index out of range in {idx} (num_vars={num_vars})")
        merged[idx] = merged.get(idx, 0.0) + float(coeff)
    terms = tuple(
        Monomial(idx, c) for idx, c in sorted(merged.items()) if c != 0.0
    )
    return PolynomialProgram(num_vars, terms, float(R))


def _check_point(program, v):
    v = np.asarray(v, dtype=float)
    if v.shape != (program.num_vars,):
        raise ValueError(f"expected vector of length {program.num_vars}, got shape {v.shape}")
    if np.any(v < -1e-12):
        raise ValueError("variables must be non-negative")
    return np.maximum(v, 0.0)


def _build_tables(program):
    """Pad every term's index multiset into fixed-width gather tables.

    Index num_vars is a sentinel pointing at an appended 1.0, so products can
    be taken row-wise without ragged arrays.  The gradient table holds one row
    per (term, distinct variable) pair with the power-rule multiplier folded
    into the coefficient.
    """
    N = program.num_vars
    T = len(program.terms)
    eval_idx = np.full((max(T, 1), MAX_ORDER), N, dtype=np.intp)
    eval_coeff = np.zeros(max(T, 1))
    grad_rows = []
    for t, mono in enumerate(program.terms):
        eval_idx[t, : len(mono.indices)] = mono.indices
        eval_coeff[t] = mono.coefficient
        for var, mult in Counter(mono.indices).items():
            rest = list(mono.indices)
            rest.remove(var)
            row = np.full(MAX_ORDER - 1, N, dtype=np.intp)
            row[: len(rest)] = rest
            grad_rows.append((var, mult * mono.coefficient, row))
    if grad_rows:
        grad_target = np.array([r[0] for r in grad_rows], dtype=np.intp)
        grad_coeff = np.array([r[1] for r in grad_rows])
        grad_idx = np.stack([r[2] for r in grad_rows])
    else:
        grad_target = np.zeros(0, dtype=np.intp)
        grad_coeff = np.zeros(0)
        grad_idx = np.zeros((0, MAX_ORDER - 1), dtype=np.intp)
    return {
        "eval_idx": eval_idx,
        "eval_coeff": eval_coeff,
        "grad_target": grad_target,
        "grad_coeff": grad_coeff,
        "grad_idx": grad_idx,
    }


def evaluate(program, v):
    """Energy of the program at a non-negative point v."""
    v = _check_point(program, v)
    if not program.terms:
        return 0.0
    tab = program._compiled()
    ext = np.append(v, 1.0)
    prods = np.prod(ext[tab["eval_idx"]], axis=1)
    return float(tab["eval_coeff"] @ prods)


def evaluate_many(program, points, chunk=4096):
    """Energies for a (num_points, N) batch of non-negative points."""
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != program.num_vars:
        raise ValueError(f"expected (num_points, {program.num_vars}) array")
    if not program.terms:
        return np.zeros(len(points))
    tab = program._compiled()
    out = np.empty(len(points))
    for start in range(0, len(points), chunk):
        block = points[start : start + chunk]
        ext = np.hstack([block, np.ones((len(block), 1))])
        prods = np.prod(ext[:, tab["eval_idx"]], axis=2)
        out[start : start + len(block)] = prods @ tab["eval_coeff"]
    return out


def gradient(program, v):
    """Partial derivatives dE/dv_i at v, with the power rule for repeats."""
    v = _check_point(program, v)
    tab = program._compiled()
    if tab["grad_target"].size == 0:
        return np.zeros(program.num_vars)
    ext = np.append(v, 1.0)
    prods = np.prod(ext[tab["grad_idx"]], axis=1)
    return np.bincount(
        tab["grad_target"], weights=tab["grad_coeff"] * prods, minlength=program.num_vars
    ).astype(float)


def add_slack(program):
    """Append one uncoupled variable that only absorbs constraint mass."""
    return PolynomialProgram(program.num_vars + 1, program.terms, program.sum_constraint)


def shift_variables(program, offsets):
    """Affine substitution v = u + offsets.

    Returns (shifted_program, constant) where the constant is the energy
    offset dropped from the term list (the representation has no degree-0
    term).  evaluate(shifted, u) + constant == evaluate(program, u + offsets)
    wherever both sides are defined.
    """
    offsets = np.asarray(offsets, dtype=float)
    if offsets.shape != (program.num_vars,):
        raise ValueError(f"expected {program.num_vars} offsets, got shape {offsets.shape}")
    if not np.all(np.isfinite(offsets)):
        raise ValueError("offsets must be finite")
    raw = []
    constant = 0.0
    for mono in program.terms:
        k = len(mono.indices)
        # binomial expansion: each factor (u_i + o_i) contributes either the
        # variable or its offset, over all 2^k choices
        for pick in itertools.product((0, 1), repeat=k):
            kept = tuple(i for i, p in zip(mono.indices, pick) if p == 0)
            const_factor = math.prod(
                offsets[i] for i, p in zip(mono.indices, pick) if p == 1
            )
            c = mono.coefficient * const_factor
            if kept:
                raw.append((kept, c))
            else:
                constant += c
    shifted = build_program(raw, program.num_vars, program.sum_constraint)
    return shifted, constant


def save_program(program, path):
    """Write the text problem format: `poly N R` header then one term per line."""
    with open(path, "w") as fh:
        fh.write(f"poly {program.num_vars} {program.sum_constraint:.17g}\n")
        for mono in program.terms:
            idx = " ".join(str(i) for i in mono.indices)
            fh.write(f"{mono.coefficient:.17g} {idx}\n")


def load_program(path):
    """Parse the text problem format written by save_program."""
    raw = []
    header = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if header is None:
                if parts[0] != "poly" or len(parts) != 3:
                    raise ParseError("expected header `poly N R`", line=lineno)
                try:
                    header = (int(parts[1]), float(parts[2]))
                except ValueError as exc:
                    raise ParseError(str(exc), line=lineno) from exc
                continue
            try:
                coeff = float(parts[0])
                indices = tuple(int(p) for p in parts[1:])
            except ValueError as exc:
                raise ParseError(str(exc), line=lineno) from exc
            if not indices:
                raise ParseError("term line needs at least one index", line=lineno)
            raw.append((indices, coeff))
    if header is None:
        raise ParseError("empty problem file")
    try:
        return build_program(raw, header[0], header[1])
    except ValueError as exc:
        raise ParseError(str(exc)) from exc
