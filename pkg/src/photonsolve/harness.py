"""Experiment orchestration: seeded batches, sweeps, and result emission.

Runs are seeded as base_seed + run_index, so a batch is reproducible from
its spec alone and runs can execute in any order (or in parallel) without
changing the output.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import baselines, dynamics, encoders, imaginary_time, polynomial

SOLVERS = ("entropy", "gd", "brute-grid", "brute-cut", "imaginary-time")


@dataclass(frozen=True)
class RunSpec:
    solver: str
    problem_path: str | None = None
    graph_path: str | None = None
    program: polynomial.PolynomialProgram | None = None
    graph: encoders.Graph | None = None
    schedule: object = "schedule1"  # preset name, schedule file path, or FeedbackSchedule
    num_runs: int = 1
    base_seed: int = 0
    jobs: int = 1
    colors: int = 2
    regularization: float = 5.0
    sum_constraint: float | None = None
    grid_delta: float | None = None
    evolution_time: float = 10.0
    gd: baselines.GdConfig = field(default_factory=baselines.GdConfig)
    reference_energy: float | None = None
    reference_tol: float = 1e-6

    def __post_init__(self):
        if self.solver not in SOLVERS:
            raise ValueError(f"unknown solver {self.solver!r}; known: {SOLVERS}")
        if self.num_runs < 1:
            raise ValueError("need at least one run")
        sources = [self.problem_path, self.graph_path, self.program, self.graph]
        if sum(s is not None for s in sources) != 1:
            raise ValueError("exactly one problem source must be given")
        if self.solver == "brute-cut" and self.graph_path is None and self.graph is None:
            raise ValueError("brute-cut needs a graph problem")


@dataclass(frozen=True)
class BatchSummary:
    solver: str
    num_runs: int
    base_seed: int
    energies: tuple[float, ...]
    best_energy: float
    mean_energy: float
    std_energy: float
    hist_edges: tuple[float, ...]
    hist_counts: tuple[int, ...]
    success_fraction: float | None  # vs reference optimum, when provided
    wall_times: tuple[float, ...]
    cut_sizes: tuple[float, ...] | None = None  # graph problems only


def _materialize(spec):
    """Resolve the problem source into (program, encoding_or_None, graph_or_None)."""
    if spec.program is not None:
        return spec.program, None, None
    if spec.problem_path is not None:
        return polynomial.load_program(spec.problem_path), None, None
    graph = spec.graph if spec.graph is not None else encoders.load_graph(spec.graph_path)
    program, enc = encoders.encode_max_k_cut(
        graph, spec.colors, lam=spec.regularization, R=spec.sum_constraint
    )
    return program, enc, graph


def _run_one(args):
    spec, program, run_index = args
    seed = spec.base_seed + run_index
    start = time.perf_counter()
    if spec.solver == "entropy":
        result = dynamics.solve(program, spec.schedule, seed)
        energy, best_v = result.best_energy, result.best_v
    elif spec.solver == "gd":
        rng = np.random.default_rng(seed)
        schedule = dynamics.resolve_schedule(spec.schedule)
        counts = rng.poisson(schedule.detection_budget / program.num_vars, program.num_vars)
        counts = np.maximum(counts, 1)
        v0 = dynamics.normalize(counts, program.sum_constraint)
        result = baselines.projected_gradient_descent(program, v0, spec.gd)
        energy, best_v = result.best_energy, result.best_v
    elif spec.solver == "brute-grid":
        delta = spec.grid_delta
        if delta is None:
            raise ValueError("brute-grid needs grid_delta")
        best_v, energy = baselines.brute_force_grid(program, delta)
    elif spec.solver == "imaginary-time":
        delta = spec.grid_delta
        if delta is None:
            raise ValueError("imaginary-time needs grid_delta")
        ensemble = imaginary_time.make_ensemble(program, delta)
        evolved = imaginary_time.evolve(ensemble, spec.evolution_time)
        energy = imaginary_time.expected_energy(evolved)
        best_v = evolved.states[int(np.argmax(evolved.probabilities))]
    else:
        raise AssertionError(spec.solver)
    return run_index, energy, np.asarray(best_v), time.perf_counter() - start


def run_batch(spec):
    """Execute num_runs independent seeded runs and summarize them."""
    program, enc, graph = _materialize(spec)
    if spec.solver == "brute-cut":
        return _run_cut_batch(spec, graph)
    jobs = [(spec, program, i) for i in range(spec.num_runs)]
    if spec.jobs > 1:
        with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            raw = list(pool.map(_run_one, jobs))
    else:
        raw = [_run_one(j) for j in jobs]
    raw.sort(key=lambda r: r[0])
    energies = tuple(float(r[1]) for r in raw)
    walls = tuple(float(r[3]) for r in raw)
    cut_sizes = None
    if enc is not None and graph is not None:
        cut_sizes = tuple(
            encoders.cut_size(graph, encoders.decode(r[2], enc)) for r in raw
        )
    return _summarize(spec, energies, walls, cut_sizes)


def _run_cut_batch(spec, graph):
    start = time.perf_counter()
    _assignment, value = baselines.brute_force_cut(graph, spec.colors)
    wall = time.perf_counter() - start
    # exhaustive search is deterministic: one run is every run
    energies = tuple([-value] * spec.num_runs)
    walls = tuple([wall] + [0.0] * (spec.num_runs - 1))
    return _summarize(spec, energies, walls, tuple([value] * spec.num_runs))


def _summarize(spec, energies, walls, cut_sizes):
    arr = np.array(energies)
    lo, hi = float(arr.min()), float(arr.max())
    if lo == hi:
        hi = lo + 1.0
    bins = min(20, max(5, spec.num_runs // 5))
    counts, edges = np.histogram(arr, bins=bins, range=(lo, hi * (1 + 1e-12)))
    success = None
    if spec.reference_energy is not None:
        success = float(np.mean(arr <= spec.reference_energy + spec.reference_tol))
    return BatchSummary(
        solver=spec.solver,
        num_runs=spec.num_runs,
        base_seed=spec.base_seed,
        energies=energies,
        best_energy=float(arr.min()),
        mean_energy=float(arr.mean()),
        std_energy=float(arr.std()),
        hist_edges=tuple(float(e) for e in edges),
        hist_counts=tuple(int(c) for c in counts),
        success_fraction=success,
        wall_times=walls,
        cut_sizes=cut_sizes,
    )


@dataclass(frozen=True)
class SweepResult:
    mu_grid: tuple[float, ...]
    budget_grid: tuple[int, ...]
    mean_energies: np.ndarray  # (len(mu_grid), len(budget_grid))
    std_energies: np.ndarray


def sweep_mu_fluctuation(spec, mu_grid, budget_grid):
    """Mean returned energy per (mu, budget) cell of a schedule grid.

    Each cell reruns the whole batch with the base schedule's mu and budget
    replaced; cells are independent, so grid order does not matter.
    """
    if len(mu_grid) == 0 or len(budget_grid) == 0:
        raise ValueError("sweep grids must be non-empty")
    base = dynamics.resolve_schedule(spec.schedule)
    mean = np.empty((len(mu_grid), len(budget_grid)))
    std = np.empty_like(mean)
    for a, mu in enumerate(mu_grid):
        for b, budget in enumerate(budget_grid):
            schedule = replace(
                base,
                detection_budget=int(budget),
                mean_photon_number=np.full(base.iterations, float(mu)),
            )
            summary = run_batch(replace(spec, schedule=schedule))
            mean[a, b] = summary.mean_energy
            std[a, b] = summary.std_energy
    return SweepResult(
        mu_grid=tuple(float(m) for m in mu_grid),
        budget_grid=tuple(int(b) for b in budget_grid),
        mean_energies=mean,
        std_energies=std,
    )


def generate_nonconvex_qp(num_vars, seed, R=None, density=1.0):
    """Synthetic non-convex quadratic program C'x + x'Jx with indefinite J.

    The quadratic part mixes concave and convex directions, so the simplex
    landscape has multiple local minima on faces and vertices.
    """
    rng = np.random.default_rng(seed)
    if R is None:
        R = float(num_vars)
    C = rng.uniform(-1.0, 1.0, size=num_vars)
    A = rng.normal(size=(num_vars, num_vars))
    J = (A + A.T) / 2.0
    if density < 1.0:
        mask = rng.random((num_vars, num_vars)) < density
        J = np.where(mask | mask.T, J, 0.0)
    raw = [((i,), C[i]) for i in range(num_vars)]
    for i in range(num_vars):
        raw.append(((i, i), J[i, i]))
        for j in range(i + 1, num_vars):
            if J[i, j] != 0.0:
                raw.append(((i, j), 2.0 * J[i, j]))
    return polynomial.build_program(raw, num_vars, R)


def emit_trace(result, path):
    """Write `iteration,energy[,v_0..v_{N-1}]` rows, one per iteration."""
    with open(path, "w") as fh:
        if result.v_trace is None:
            fh.write("iteration,energy\n")
            for t, e in enumerate(result.energy_trace, start=1):
                fh.write(f"{t},{e:.17g}\n")
        else:
            n = result.v_trace.shape[1]
            cols = ",".join(f"v_{i}" for i in range(n))
            fh.write(f"iteration,energy,{cols}\n")
            for t, (e, v) in enumerate(zip(result.energy_trace, result.v_trace), start=1):
                vals = ",".join(f"{x:.17g}" for x in v)
                fh.write(f"{t},{e:.17g},{vals}\n")


def _fmt_seq(values):
    return ",".join(f"{v:.17g}" for v in values)


def emit_summary(summary, path):
    """Write the batch summary as a round-trippable key: value record."""
    with open(path, "w") as fh:
        fh.write(f"solver: {summary.solver}\n")
        fh.write(f"num_runs: {summary.num_runs}\n")
        fh.write(f"base_seed: {summary.base_seed}\n")
        fh.write(f"energies: {_fmt_seq(summary.energies)}\n")
        fh.write(f"best_energy: {summary.best_energy:.17g}\n")
        fh.write(f"mean_energy: {summary.mean_energy:.17g}\n")
        fh.write(f"std_energy: {summary.std_energy:.17g}\n")
        fh.write(f"hist_edges: {_fmt_seq(summary.hist_edges)}\n")
        fh.write(f"hist_counts: {','.join(str(c) for c in summary.hist_counts)}\n")
        if summary.success_fraction is None:
            fh.write("success_fraction: none\n")
        else:
            fh.write(f"success_fraction: {summary.success_fraction:.17g}\n")
        fh.write(f"wall_times: {_fmt_seq(summary.wall_times)}\n")
        if summary.cut_sizes is not None:
            fh.write(f"cut_sizes: {_fmt_seq(summary.cut_sizes)}\n")


def parse_summary(path):
    """Inverse of emit_summary."""
    fields = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            key, _, value = line.partition(":")
            fields[key.strip()] = value.strip()
    success = fields["success_fraction"]
    return BatchSummary(
        solver=fields["solver"],
        num_runs=int(fields["num_runs"]),
        base_seed=int(fields["base_seed"]),
        energies=tuple(float(x) for x in fields["energies"].split(",")),
        best_energy=float(fields["best_energy"]),
        mean_energy=float(fields["mean_energy"]),
        std_energy=float(fields["std_energy"]),
        hist_edges=tuple(float(x) for x in fields["hist_edges"].split(",")),
        hist_counts=tuple(int(x) for x in fields["hist_counts"].split(",")),
        success_fraction=None if success == "none" else float(success),
        wall_times=tuple(float(x) for x in fields["wall_times"].split(",")),
        cut_sizes=(
            tuple(float(x) for x in fields["cut_sizes"].split(","))
            if "cut_sizes" in fields
            else None
        ),
    )


def emit_sweep(sweep, path):
    """Sweep matrix as CSV with mu rows and budget columns."""
    with open(path, "w") as fh:
        fh.write("mu\\budget," + ",".join(str(b) for b in sweep.budget_grid) + "\n")
        for mu, row in zip(sweep.mu_grid, sweep.mean_energies):
            fh.write(f"{mu:.17g}," + _fmt_seq(row) + "\n")
