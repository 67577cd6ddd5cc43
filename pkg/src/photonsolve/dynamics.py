"""Measurement-feedback stochastic solver.

Each iteration plays one round of the feedback loop: the current variable
vector (normalized photon histogram) determines per-bin loss rates, losses
become survival probabilities through exponential damping, surviving mass is
re-measured as Poisson photon counts plus detector dark counts, and the
counts are renormalized back onto the constraint simplex.  Shot noise of the
counting process is the solver's only source of randomness.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import DegenerateStateError, ParseError
from .polynomial import evaluate, gradient


@dataclass(frozen=True)
class FeedbackSchedule:
    iterations: int
    detection_budget: int
    mean_photon_number: np.ndarray  # per-iteration mu in (0, 1)
    loss_gain: np.ndarray  # per-iteration dimensionless damping gain
    dark_count_rate: float = 0.0
    fluctuation_target: np.ndarray | None = None  # per-iteration 1/sqrt(counts) target

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.detection_budget < 1:
            raise ValueError("detection_budget must be >= 1")
        mu = np.asarray(self.mean_photon_number, dtype=float)
        gain = np.asarray(self.loss_gain, dtype=float)
        if mu.shape != (self.iterations,) or gain.shape != (self.iterations,):
            raise ValueError("mu and loss_gain trajectories must have one entry per iteration")
        if np.any(mu <= 0.0) or np.any(mu >= 1.0):
            raise ValueError("mean photon number must lie strictly inside (0, 1)")
        if np.any(gain < 0.0):
            raise ValueError("loss gain must be non-negative")
        if self.dark_count_rate < 0.0:
            raise ValueError("dark count rate must be non-negative")
        object.__setattr__(self, "mean_photon_number", mu)
        object.__setattr__(self, "loss_gain", gain)
        if self.fluctuation_target is not None:
            tgt = np.asarray(self.fluctuation_target, dtype=float)
            if tgt.shape != (self.iterations,) or np.any(tgt <= 0.0):
                raise ValueError("fluctuation target must be positive per iteration")
            object.__setattr__(self, "fluctuation_target", tgt)


@dataclass(frozen=True)
class SolverState:
    counts: np.ndarray
    v: np.ndarray
    iteration: int
    rng_state: np.random.Generator
    best_energy: float
    best_v: np.ndarray


@dataclass(frozen=True)
class SolverResult:
    best_energy: float
    best_v: np.ndarray
    energy_trace: np.ndarray
    v_trace: np.ndarray | None
    iterations_run: int
    seed: int


def make_schedule(
    iterations,
    budget,
    eta_start=0.0,
    eta_end=1.0,
    eta_shape="linear",
    dark_rate=0.0,
    mu=0.5,
    fluctuation_target=None,
):
    """Build a schedule from scalar knobs, expanding ramps to trajectories."""
    if eta_shape == "linear":
        gain = np.linspace(eta_start, eta_end, iterations)
    elif eta_shape == "geometric":
        lo = eta_start if eta_start > 0 else max(eta_end, 1e-12) * 1e-3
        gain = np.geomspace(lo, max(eta_end, 1e-12), iterations)
    else:
        raise ValueError(f"unknown eta_shape {eta_shape!r}")
    mu_traj = np.full(iterations, float(mu))
    tgt = None
    if fluctuation_target is not None:
        tgt = np.full(iterations, float(fluctuation_target))
    return FeedbackSchedule(
        iterations=int(iterations),
        detection_budget=int(budget),
        mean_photon_number=mu_traj,
        loss_gain=gain,
        dark_count_rate=float(dark_rate),
        fluctuation_target=tgt,
    )


# Presets trade iteration count, shot-noise level (via budget), and mean
# photon number against wall-clock: schedule1 is the fastest and noisiest,
# schedule4 the slowest and most accurate.
SCHEDULE_PRESETS = {
    "schedule1": dict(iterations=100, budget=10_000, eta_start=0.0, eta_end=2.0, mu=0.8),
    "schedule2": dict(iterations=250, budget=50_000, eta_start=0.0, eta_end=4.0, mu=0.6),
    "schedule3": dict(iterations=500, budget=200_000, eta_start=0.0, eta_end=6.0, mu=0.4),
    "schedule4": dict(iterations=1000, budget=1_000_000, eta_start=0.0, eta_end=8.0, mu=0.2),
}


def get_preset(name):
    try:
        return make_schedule(**SCHEDULE_PRESETS[name])
    except KeyError:
        raise ValueError(
            f"unknown schedule preset {name!r}; known: {sorted(SCHEDULE_PRESETS)}"
        ) from None


def load_schedule(path):
    """Parse a `key = value` schedule file."""
    kwargs = {}
    keys = {
        "iterations": int,
        "budget": int,
        "eta_start": float,
        "eta_end": float,
        "eta_shape": str,
        "dark_rate": float,
        "mu": float,
    }
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParseError("expected `key = value`", line=lineno)
            key, _, value = line.partition("=")
            key = key.strip()
            if key not in keys:
                raise ParseError(f"unknown schedule key {key!r}", line=lineno)
            try:
                kwargs[key] = keys[key](value.strip())
            except ValueError as exc:
                raise ParseError(str(exc), line=lineno) from exc
    if "iterations" not in kwargs or "budget" not in kwargs:
        raise ParseError("schedule file must set at least `iterations` and `budget`")
    return make_schedule(**kwargs)


def resolve_schedule(spec):
    """Accept a preset name, a schedule file path, or a ready schedule."""
    if isinstance(spec, FeedbackSchedule):
        return spec
    if spec in SCHEDULE_PRESETS:
        return get_preset(spec)
    return load_schedule(spec)


def loss_rates(program, v):
    """Per-bin loss: the linear coefficient plus occupation-dependent
    interaction contributions, i.e. the cost gradient at v."""
    return gradient(program, v)


def survival_probabilities(losses, loss_gain):
    """Exponential damping relative to the least lossy bin.

    p_i = exp(-eta * (L_i - min L)); the best bin always survives with
    probability 1, and a common offset in the losses cancels exactly.
    """
    if loss_gain < 0:
        raise ValueError("loss gain must be non-negative")
    losses = np.asarray(losses, dtype=float)
    return np.exp(-loss_gain * (losses - losses.min()))


def _effective_gain(losses, gain):
    """Scale the dimensionless gain by the current loss spread.

    Normalizing per iteration keeps the damping exponent O(gain) whether the
    state sits on the steep outer slope of the landscape or in a shallow
    basin; with a fixed scale the late-stage dynamics would stall once the
    gradients shrink by orders of magnitude.
    """
    spread = float(np.mean(losses - losses.min()))
    if spread <= 0.0:
        return 0.0
    return gain / spread


def sample_counts(v, survival, schedule_point, rng):
    """Poisson photon counts per bin plus independent dark counts.

    schedule_point is (detection budget B, dark count rate d); the signal
    mean for bin i is B * v_i p_i / sum_j v_j p_j.
    """
    budget, dark_rate = schedule_point
    v = np.asarray(v, dtype=float)
    survival = np.asarray(survival, dtype=float)
    weighted = v * survival
    total = weighted.sum()
    if total <= 0.0:
        raise DegenerateStateError("all bins have zero surviving mass")
    counts = rng.poisson(budget * weighted / total)
    if dark_rate > 0.0:
        counts = counts + rng.poisson(dark_rate, size=v.shape)
    return counts


def normalize(counts, R):
    """Map integer counts onto the simplex sum(v) = R."""
    counts = np.asarray(counts)
    total = counts.sum()
    if total <= 0:
        raise DegenerateStateError("all-zero photon counts")
    return R * counts / float(total)


def fluctuation_coefficient(counts):
    """Relative shot-noise level 1/sqrt(n) per bin (inf where n = 0)."""
    counts = np.asarray(counts, dtype=float)
    with np.errstate(divide="ignore"):
        return np.where(counts > 0, 1.0 / np.sqrt(np.maximum(counts, 1e-300)), np.inf)


def _effective_budget(schedule, iteration, num_vars):
    if schedule.fluctuation_target is not None:
        tgt = schedule.fluctuation_target[iteration]
        return max(1.0, num_vars / tgt**2)
    return max(1.0, schedule.detection_budget * schedule.mean_photon_number[iteration])


def init_state(program, schedule, seed):
    """Noise-seeded start: Poisson counts around the uniform histogram."""
    rng = np.random.default_rng(seed)
    N = program.num_vars
    counts = rng.poisson(schedule.detection_budget / N, size=N)
    if counts.sum() == 0:
        counts = rng.poisson(max(schedule.detection_budget / N, 1.0), size=N)
        if counts.sum() == 0:
            raise DegenerateStateError("initial photon counts are all zero")
    v = normalize(counts, program.sum_constraint)
    energy = evaluate(program, v)
    return SolverState(
        counts=counts, v=v, iteration=0, rng_state=rng, best_energy=energy, best_v=v
    )


def step(program, schedule, state):
    """One measurement-feedback round; returns the successor state."""
    if state.iteration >= schedule.iterations:
        raise ValueError("schedule exhausted")
    t = state.iteration
    losses = loss_rates(program, state.v)
    if not np.all(np.isfinite(losses)):
        raise FloatingPointError("non-finite loss rates")
    eta = _effective_gain(losses, schedule.loss_gain[t])
    survival = survival_probabilities(losses, eta)
    budget = _effective_budget(schedule, t, program.num_vars)
    rng = state.rng_state
    try:
        counts = sample_counts(state.v, survival, (budget, schedule.dark_count_rate), rng)
        if counts.sum() == 0:
            raise DegenerateStateError("all-zero photon counts")
    except DegenerateStateError:
        # one automatic re-amplification from uniform noise, then give up
        counts = rng.poisson(max(budget / program.num_vars, 1.0), size=program.num_vars)
        if counts.sum() == 0:
            raise
    v = normalize(counts, program.sum_constraint)
    energy = evaluate(program, v)
    if energy < state.best_energy:
        best_energy, best_v = energy, v
    else:
        best_energy, best_v = state.best_energy, state.best_v
    return replace(
        state,
        counts=counts,
        v=v,
        iteration=t + 1,
        best_energy=best_energy,
        best_v=best_v,
    )


def solve(program, schedule, seed, v0=None, record_v=False):
    """Run the full feedback loop; returns the best state seen, not the last.

    v0 optionally pins the starting point (counts are the rounded histogram
    of v0); by default the start is sampled from shot noise around uniform.
    """
    schedule = resolve_schedule(schedule)
    if v0 is None:
        state = init_state(program, schedule, seed)
    else:
        v0 = np.asarray(v0, dtype=float)
        rng = np.random.default_rng(seed)
        counts = np.maximum(
            np.rint(schedule.detection_budget * v0 / program.sum_constraint), 0
        ).astype(np.int64)
        v = normalize(counts, program.sum_constraint)
        energy = evaluate(program, v)
        state = SolverState(
            counts=counts, v=v, iteration=0, rng_state=rng, best_energy=energy, best_v=v
        )
    energy_trace = np.empty(schedule.iterations)
    v_trace = np.empty((schedule.iterations, program.num_vars)) if record_v else None
    for t in range(schedule.iterations):
        try:
            state = step(program, schedule, state)
        except DegenerateStateError as exc:
            raise DegenerateStateError(f"iteration {t}: {exc}") from exc
        energy_trace[t] = evaluate(program, state.v)
        if record_v:
            v_trace[t] = state.v
    return SolverResult(
        best_energy=state.best_energy,
        best_v=state.best_v,
        energy_trace=energy_trace,
        v_trace=v_trace,
        iterations_run=schedule.iterations,
        seed=seed,
    )
