"""Command-line harness.

Exit codes: 0 success, 2 input/parse error, 3 solver error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import baselines, dynamics, encoders, figures, harness, imaginary_time, polynomial
from .errors import DegenerateStateError, ParseError, SearchSpaceError


def _add_common(parser):
    parser.add_argument("--seed", type=int, default=0, help="base seed (run i uses seed+i)")
    parser.add_argument("--runs", type=int, default=1, help="independent runs in the batch")
    parser.add_argument("--schedule", default="schedule1", help="preset name or schedule file")
    parser.add_argument("--out", type=Path, default=None, help="output directory")
    parser.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    parser.add_argument("--lambda", dest="lam", type=float, default=5.0, help="Potts regularization")
    parser.add_argument("--colors", type=int, default=2, help="number of cut classes k")
    parser.add_argument("--sum-constraint", type=float, default=None, help="total mass R")


def _problem_args(parser):
    parser.add_argument("problem", nargs="?", default=None, help="polynomial problem file")
    parser.add_argument("--graph", type=Path, default=None, help="graph file (encoded as max-k-cut)")


def _make_spec(args, solver, **extra):
    return harness.RunSpec(
        solver=solver,
        problem_path=args.problem,
        graph_path=str(args.graph) if args.graph else None,
        schedule=args.schedule,
        num_runs=args.runs,
        base_seed=args.seed,
        jobs=args.jobs,
        colors=args.colors,
        regularization=args.lam,
        sum_constraint=args.sum_constraint,
        **extra,
    )


def _emit_batch(args, spec, summary, trace_result=None):
    if args.out is None:
        _print_summary(summary)
        return
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    harness.emit_summary(summary, out / "summary.txt")
    with open(out / "records.csv", "w") as fh:
        cols = "run,seed,energy,wall_seconds"
        if summary.cut_sizes is not None:
            cols += ",cut_size"
        fh.write(cols + "\n")
        for i, (e, w) in enumerate(zip(summary.energies, summary.wall_times)):
            row = f"{i},{summary.base_seed + i},{e:.17g},{w:.6g}"
            if summary.cut_sizes is not None:
                row += f",{summary.cut_sizes[i]:.17g}"
            fh.write(row + "\n")
    figures.plot_energy_histogram(summary, out / "energy_hist.png")
    if summary.cut_sizes is not None:
        figures.plot_cut_histogram(summary, out / "cut_hist.png")
    if trace_result is not None:
        harness.emit_trace(trace_result, out / "trace.csv")
        figures.plot_energy_trace(trace_result, out / "trace.png")
    _print_summary(summary)


def _print_summary(summary):
    print(f"solver={summary.solver} runs={summary.num_runs}")
    print(f"best_energy={summary.best_energy:.10g}")
    print(f"mean_energy={summary.mean_energy:.10g} std={summary.std_energy:.10g}")
    if summary.cut_sizes is not None:
        print(f"best_cut={max(summary.cut_sizes):.10g}")
    if summary.success_fraction is not None:
        print(f"success_fraction={summary.success_fraction:.3f}")


def _cmd_solve(args):
    spec = _make_spec(args, "entropy")
    summary = harness.run_batch(spec)
    trace = None
    if args.out is not None:
        program, _enc, _graph = harness._materialize(spec)
        trace = dynamics.solve(program, spec.schedule, spec.base_seed, record_v=args.trace_vars)
    _emit_batch(args, spec, summary, trace_result=trace)


def _cmd_baseline_gd(args):
    gd = baselines.GdConfig(
        step_size=args.step, iterations=args.iterations, tolerance=args.tolerance
    )
    spec = _make_spec(args, "gd", gd=gd)
    _emit_batch(args, spec, harness.run_batch(spec))


def _cmd_brute(args):
    solver = "brute-cut" if args.graph is not None else "brute-grid"
    spec = _make_spec(args, solver, grid_delta=args.delta)
    _emit_batch(args, spec, harness.run_batch(spec))


def _cmd_oracle_it(args):
    if args.problem is None:
        raise ParseError("oracle-it needs a polynomial problem file")
    program = polynomial.load_program(args.problem)
    ensemble = imaginary_time.make_ensemble(program, args.delta)
    times = np.linspace(0.0, args.time, args.steps)
    energies = [imaginary_time.expected_energy(imaginary_time.evolve(ensemble, t)) for t in times]
    grounds = imaginary_time.ground_states(ensemble, tol=args.tol)
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        with open(args.out / "relaxation.csv", "w") as fh:
            fh.write("t,expected_energy\n")
            for t, e in zip(times, energies):
                fh.write(f"{t:.17g},{e:.17g}\n")
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot(times, energies)
        ax.set_xlabel("imaginary time t")
        ax.set_ylabel("expected energy")
        fig.tight_layout()
        fig.savefig(args.out / "relaxation.png", dpi=150)
        plt.close(fig)
    print(f"states={len(ensemble.states)} ground_states={len(grounds)}")
    print(f"min_energy={ensemble.energies.min():.10g}")
    print(f"expected_energy(t={args.time:g})={energies[-1]:.10g}")


def _cmd_encode(args):
    graph = encoders.load_graph(str(args.graph))
    program, enc = encoders.encode_max_k_cut(
        graph, args.colors, lam=args.lam, R=args.sum_constraint
    )
    polynomial.save_program(program, args.output)
    print(
        f"encoded {graph.num_nodes} nodes x {args.colors} colors -> "
        f"{program.num_vars} variables, {len(program.terms)} terms "
        f"(energy offset {enc.energy_offset:g})"
    )


def _cmd_gen(args):
    if args.kind == "nonconvex-qp":
        program = harness.generate_nonconvex_qp(args.vars, args.seed, R=args.sum_constraint)
        polynomial.save_program(program, args.output)
        print(f"wrote {args.vars}-variable non-convex QP to {args.output}")
    elif args.kind == "graph":
        graph = encoders.random_graph(args.nodes, args.prob, args.seed)
        encoders.save_graph(graph, args.output)
        print(f"wrote G({args.nodes}, {args.prob}) with {len(graph.edges)} edges to {args.output}")
    else:
        raise ParseError(f"unknown generator {args.kind!r}")


def _cmd_sweep(args):
    spec = _make_spec(args, "entropy")
    mu_grid = [float(x) for x in args.mu_grid.split(",")]
    budget_grid = [int(float(x)) for x in args.budget_grid.split(",")]
    sweep = harness.sweep_mu_fluctuation(spec, mu_grid, budget_grid)
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        harness.emit_sweep(sweep, args.out / "sweep.csv")
        figures.plot_sweep_heatmap(sweep, args.out / "sweep.png")
    for mu, row in zip(sweep.mu_grid, sweep.mean_energies):
        print(f"mu={mu:g}: " + " ".join(f"{e:.6g}" for e in row))


def build_parser():
    parser = argparse.ArgumentParser(prog="photonsolve")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run the measurement-feedback solver")
    _problem_args(p)
    _add_common(p)
    p.add_argument("--trace-vars", action="store_true", help="include variables in trace output")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("baseline-gd", help="projected gradient descent baseline")
    _problem_args(p)
    _add_common(p)
    p.add_argument("--step", type=float, default=0.05)
    p.add_argument("--iterations", type=int, default=10_000)
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.set_defaults(func=_cmd_baseline_gd)

    p = sub.add_parser("brute", help="exact search (grid for polynomials, exhaustion for cuts)")
    _problem_args(p)
    _add_common(p)
    p.add_argument("--delta", type=float, default=None, help="grid spacing for brute-grid")
    p.set_defaults(func=_cmd_brute)

    p = sub.add_parser("oracle-it", help="exact relaxation report on a simplex grid")
    _problem_args(p)
    _add_common(p)
    p.add_argument("--delta", type=float, required=True, help="grid spacing")
    p.add_argument("--time", type=float, default=10.0, help="total evolution time")
    p.add_argument("--steps", type=int, default=101, help="time samples")
    p.add_argument("--tol", type=float, default=0.0, help="ground-state energy tolerance")
    p.set_defaults(func=_cmd_oracle_it)

    p = sub.add_parser("encode-maxkcut", help="encode a graph as a polynomial problem file")
    p.add_argument("--graph", type=Path, required=True)
    p.add_argument("--output", type=Path, required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_encode)

    p = sub.add_parser("gen", help="generate synthetic instances")
    p.add_argument("kind", choices=["nonconvex-qp", "graph"])
    p.add_argument("--output", type=Path, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--vars", type=int, default=50)
    p.add_argument("--nodes", type=int, default=30)
    p.add_argument("--prob", type=float, default=0.5)
    p.add_argument("--sum-constraint", type=float, default=None)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("sweep", help="mean energy over a mu x budget schedule grid")
    _problem_args(p)
    _add_common(p)
    p.add_argument("--mu-grid", required=True, help="comma-separated mu values")
    p.add_argument("--budget-grid", required=True, help="comma-separated budgets")
    p.set_defaults(func=_cmd_sweep)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (ParseError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DegenerateStateError, SearchSpaceError, FloatingPointError, ValueError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
