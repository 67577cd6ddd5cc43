"""Combinatorial problem encoders.

Max-k-cut is embedded by giving each graph node a block of k non-negative
variables (a relaxed one-hot color indicator).  Edges penalize agreeing
blocks through their dot product, and a per-node quadratic penalty pulls
each block's mass toward 1, so minimizing the resulting quadratic program
over the simplex maximizes the cut.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParseError
from .polynomial import build_program


@dataclass(frozen=True)
class Graph:
    num_nodes: int
    edges: tuple[tuple[int, int, float], ...]  # (i, j, weight) with i < j

    def __post_init__(self):
        seen = set()
        for i, j, _w in self.edges:
            if not (0 <= i < j < self.num_nodes):
                raise ValueError(f"bad edge ({i}, {j}) for {self.num_nodes} nodes")
            if (i, j) in seen:
                raise ValueError(f"duplicate edge ({i}, {j})")
            seen.add((i, j))

    @property
    def total_weight(self):
        return sum(w for _i, _j, w in self.edges)


@dataclass(frozen=True)
class PottsEncoding:
    graph_nodes: int
    num_colors: int
    regularization: float
    # degree-0 part of the penalty (lam * n), dropped from the program's term
    # list; add it back to recover the textbook objective value
    energy_offset: float = 0.0

    def var_index(self, node, color):
        return node * self.num_colors + color

    @property
    def num_vars(self):
        return self.graph_nodes * self.num_colors


@dataclass(frozen=True)
class CutAssignment:
    colors: tuple[int, ...]


def random_graph(n, p, seed):
    """Erdos-Renyi G(n, p), unit weights, deterministic per seed."""
    if n < 1:
        raise ValueError("need at least one node")
    if not 0.0 <= p <= 1.0:
        raise ValueError("edge probability must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                edges.append((i, j, 1.0))
    return Graph(num_nodes=n, edges=tuple(edges))


def encode_max_k_cut(graph, k, lam=5.0, R=None):
    """Build the relaxed Potts program for max-k-cut.

    Energy = sum_edges w_ij * <s_i, s_j> + lam * sum_nodes (1 - sum_c s_ic)^2.
    The degree-0 part of the penalty (lam * n) cannot live in the term list;
    it is reported as encoding.energy_offset.  Default mass budget R is n,
    one unit per node.
    """
    if k < 2:
        raise ValueError("need at least two colors")
    if lam < 0:
        raise ValueError("regularization must be non-negative")
    n = graph.num_nodes
    if R is None:
        R = float(n)
    if not R > 0:
        raise ValueError("sum constraint must be positive")
    enc = PottsEncoding(
        graph_nodes=n,
        num_colors=k,
        regularization=float(lam),
        energy_offset=float(lam) * n,
    )
    raw = []
    for i, j, w in graph.edges:
        for c in range(k):
            raw.append(((enc.var_index(i, c), enc.var_index(j, c)), w))
    # (1 - sum_c s)^2 = 1 - 2 sum_c s_c + sum_c s_c^2 + 2 sum_{c<d} s_c s_d;
    # the constant lam per node is dropped (no degree-0 terms)
    for node in range(n):
        block = [enc.var_index(node, c) for c in range(k)]
        for a in block:
            raw.append(((a,), -2.0 * lam))
            raw.append(((a, a), lam))
        for ai, a in enumerate(block):
            for b in block[ai + 1 :]:
                raw.append(((a, b), 2.0 * lam))
    program = build_program(raw, n * k, R)
    return program, enc


def one_hot(assignment, encoding):
    """Variable vector with one unit of mass on each node's chosen color."""
    v = np.zeros(encoding.num_vars)
    for node, color in enumerate(assignment.colors):
        v[encoding.var_index(node, color)] = 1.0
    return v


def decode(v, encoding):
    """Assign each node its heaviest color; ties go to the lowest index."""
    v = np.asarray(v, dtype=float)
    if v.shape != (encoding.num_vars,):
        raise ValueError(
            f"expected {encoding.num_vars} variables, got shape {v.shape}"
        )
    blocks = v.reshape(encoding.graph_nodes, encoding.num_colors)
    return CutAssignment(colors=tuple(int(c) for c in blocks.argmax(axis=1)))


def cut_size(graph, assignment):
    """Total weight of edges whose endpoints get different colors."""
    colors = assignment.colors
    if len(colors) != graph.num_nodes:
        raise ValueError("assignment length does not match graph")
    return float(sum(w for i, j, w in graph.edges if colors[i] != colors[j]))


def save_graph(graph, path):
    """Write the edge-list format: `graph n m` then `i j [w]` lines."""
    with open(path, "w") as fh:
        fh.write(f"graph {graph.num_nodes} {len(graph.edges)}\n")
        for i, j, w in graph.edges:
            if w == 1.0:
                fh.write(f"{i} {j}\n")
            else:
                fh.write(f"{i} {j} {w:.17g}\n")


def load_graph(path):
    """Parse the edge-list format written by save_graph."""
    header = None
    edges = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if header is None:
                if parts[0] != "graph" or len(parts) != 3:
                    raise ParseError("expected header `graph n m`", line=lineno)
                header = (int(parts[1]), int(parts[2]))
                continue
            if len(parts) not in (2, 3):
                raise ParseError("expected `i j [w]`", line=lineno)
            try:
                i, j = int(parts[0]), int(parts[1])
                w = float(parts[2]) if len(parts) == 3 else 1.0
            except ValueError as exc:
                raise ParseError(str(exc), line=lineno) from exc
            if i > j:
                i, j = j, i
            edges.append((i, j, w))
    if header is None:
        raise ParseError("empty graph file")
    if len(edges) != header[1]:
        raise ParseError(f"header promises {header[1]} edges, found {len(edges)}")
    try:
        return Graph(num_nodes=header[0], edges=tuple(edges))
    except ValueError as exc:
        raise ParseError(str(exc)) from exc
