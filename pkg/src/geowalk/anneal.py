"""Simulated annealing by tempered geodesic walks.

The schedule cools geometrically, ``T_{i+1} = (1 - 1/sqrt(n)) T_i``, from
``T_0 = L D`` down to ``epsilon * fail_prob / (n + 1)``, which takes
``I = ceil(sqrt(n) ln(T_0 (n+1) / (epsilon fail_prob)))`` cooling rounds.
Each phase runs the Metropolis walk at its temperature, starting from the
previous phase's final point, and the reported minimizer is the best point
seen during the final (coldest) phase.

The theory's per-phase step demand, ``C D^2 n^3 (1+R) L^2 / (r^2 T^2)``
times ``ln(1/fail_prob)``, explodes at low temperature, so "auto" budgeting
waterfills a global step cap across phases: each phase takes the smaller of
its demand and an equal share of what remains, and the savings from cheap
hot phases roll over to the cold ones.  The constant ``C`` is exposed
because the theory fixes only its existence, not its value.

No minimum shift is applied to the objective: the Metropolis filter only
ever sees differences ``f(y) - f(x)``, so shifting ``f`` by any constant,
including a running minimum estimate, changes nothing.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .bodies import ConvexBody, rejection_sample_uniform
from .errors import (
    BudgetWarning,
    DegenerateSchedule,
    OracleError,
    PreconditionError,
)
from .manifolds import Manifold
from .rng import stream
from .walk import WalkParams, delta_bound, validate_delta, _start_coords

__all__ = [
    "AnnealSchedule",
    "AnnealConfig",
    "PhaseRecord",
    "AnnealResult",
    "TrialsResult",
    "make_schedule",
    "initial_temperature",
    "phase_step_budget",
    "allocate_steps",
    "anneal",
    "anneal_trials",
]


@dataclass(frozen=True)
class AnnealSchedule:
    t0: float
    n: int
    phases: int
    temps: tuple[float, ...]
    ratio: float


@dataclass
class AnnealConfig:
    """Optimization-run parameters.

    ``steps_per_phase`` is either an explicit per-phase count or "auto",
    which waterfills ``max_total_steps`` against the theoretical demand
    scaled by ``budget_constant``.  ``delta`` of ``None`` means the safe
    default step size for the body.
    """

    epsilon: float
    fail_prob: float
    lipschitz: float
    steps_per_phase: Union[int, str] = "auto"
    budget_constant: float = 1.0
    max_total_steps: int = 10**6
    delta: Optional[float] = None
    override_delta: bool = False
    delta_safety: float = 0.5

    def __post_init__(self):
        if self.epsilon <= 0.0:
            raise PreconditionError("epsilon must be positive")
        if not 0.0 < self.fail_prob < 1.0:
            raise PreconditionError("fail_prob must lie in (0, 1)")
        if self.lipschitz <= 0.0:
            raise PreconditionError("lipschitz must be positive")
        if isinstance(self.steps_per_phase, str):
            if self.steps_per_phase != "auto":
                raise PreconditionError(
                    f"steps_per_phase must be a positive integer or 'auto', "
                    f"got {self.steps_per_phase!r}"
                )
        elif self.steps_per_phase < 1:
            raise PreconditionError("steps_per_phase must be >= 1 when explicit")
        if self.budget_constant <= 0.0:
            raise PreconditionError("budget_constant must be positive")
        if self.max_total_steps < 1:
            raise PreconditionError("max_total_steps must be >= 1")


@dataclass(frozen=True)
class PhaseRecord:
    phase: int
    temperature: float
    steps: int
    rejections: int
    best_f: float
    final_f: float


@dataclass(frozen=True)
class AnnealResult:
    minimizer: np.ndarray
    value: float
    trace: tuple[PhaseRecord, ...]
    schedule: AnnealSchedule
    delta: float


@dataclass(frozen=True)
class TrialsResult:
    """Outcome of independent annealing repetitions run in lockstep."""

    values: np.ndarray
    minimizers: np.ndarray
    traces: tuple[tuple[PhaseRecord, ...], ...]
    schedule: AnnealSchedule
    allocations: tuple[int, ...]
    delta: float


def make_schedule(
    t0: float, n: int, epsilon: float, fail_prob: float
) -> AnnealSchedule:
    """Geometric cooling schedule reaching ``epsilon*fail_prob/(n+1)``.

    A start temperature already at or below the final target degenerates to
    a single phase, with a :class:`DegenerateSchedule` warning.
    """
    if n < 2:
        raise PreconditionError("schedule needs intrinsic dimension n >= 2")
    if t0 <= 0.0 or epsilon <= 0.0 or not 0.0 < fail_prob < 1.0:
        raise PreconditionError("t0, epsilon must be positive and fail_prob in (0, 1)")
    ratio = 1.0 - 1.0 / math.sqrt(n)
    target = epsilon * fail_prob / (n + 1)
    if t0 < target:
        warnings.warn(
            f"start temperature {t0:.6g} is already below the final target "
            f"{target:.6g}; returning a single-phase schedule",
            DegenerateSchedule,
            stacklevel=2,
        )
        return AnnealSchedule(t0, n, 0, (t0,), ratio)
    phases = max(0, math.ceil(math.sqrt(n) * math.log(t0 / target)))
    temps = [t0]
    for _ in range(phases):
        temps.append(temps[-1] * ratio)
    return AnnealSchedule(t0, n, phases, tuple(temps), ratio)


def initial_temperature(body: ConvexBody, lipschitz: float) -> float:
    """Hottest useful temperature, ``L * D``: at or above it the Gibbs
    weights across the whole body differ by at most a factor ``e``."""
    if lipschitz <= 0.0:
        raise PreconditionError("lipschitz must be positive")
    return lipschitz * body.diameter


def _raw_demand(
    manifold: Manifold, body: ConvexBody, temperature: float, config: AnnealConfig
) -> float:
    n = manifold.tangent_dim
    d = body.diameter
    r = body.inner_radius
    return (
        config.budget_constant
        * d
        * d
        * n**3
        * (1.0 + manifold.curvature_bound)
        * config.lipschitz**2
        / (r * r * temperature * temperature)
        * math.log(1.0 / config.fail_prob)
    )


def phase_step_budget(
    manifold: Manifold, body: ConvexBody, temperature: float, config: AnnealConfig
) -> int:
    """Step demand for one phase at the given temperature, capped at the
    configured global maximum (with a warning when the cap bites)."""
    if temperature <= 0.0:
        raise PreconditionError("temperature must be positive")
    raw = _raw_demand(manifold, body, temperature, config)
    demand = int(math.ceil(raw))
    if demand > config.max_total_steps:
        warnings.warn(
            f"phase demand {raw:.3g} steps at T={temperature:.4g} exceeds the "
            f"global cap {config.max_total_steps}; truncating",
            BudgetWarning,
            stacklevel=2,
        )
        return config.max_total_steps
    return max(1, demand)


def allocate_steps(
    schedule: AnnealSchedule,
    manifold: Manifold,
    body: ConvexBody,
    config: AnnealConfig,
) -> list[int]:
    """Per-phase step counts.

    Explicit ``steps_per_phase`` applies verbatim to every phase.  With
    "auto", each phase receives the smaller of its theoretical demand and
    an equal split of the remaining global budget, so unused demand from
    hot phases flows to the cold end where demand is astronomical.  Any
    integer-division remainder is simply left unspent.
    """
    count = len(schedule.temps)
    if not isinstance(config.steps_per_phase, str):
        return [int(config.steps_per_phase)] * count
    remaining = config.max_total_steps
    allocations = []
    for k, temperature in enumerate(schedule.temps):
        share = remaining // (count - k)
        demand = _raw_demand(manifold, body, temperature, config)
        take = int(min(demand, share)) if demand < share else int(share)
        take = max(0, take)
        allocations.append(take)
        remaining -= take
    return allocations


def _resolve_delta(body: ConvexBody, config: AnnealConfig) -> float:
    man = body.manifold
    if config.delta is None:
        return delta_bound(man, body, config.delta_safety)
    params = WalkParams(delta=config.delta, override_delta=config.override_delta)
    validate_delta(params, man, body, config.delta_safety)
    return config.delta


def anneal(
    body: ConvexBody,
    f: Callable[[np.ndarray], float],
    config: AnnealConfig,
    rng: np.random.Generator,
    start=None,
) -> AnnealResult:
    """One annealing run; see the module docstring for the procedure.

    ``start`` defaults to an exact uniform draw from the body.  The
    returned value is the raw objective at the best final-phase point.
    """
    man = body.manifold
    delta = _resolve_delta(body, config)
    t0 = initial_temperature(body, config.lipschitz)
    schedule = make_schedule(t0, man.tangent_dim, config.epsilon, config.fail_prob)
    allocations = allocate_steps(schedule, man, body, config)

    x = rejection_sample_uniform(body, rng) if start is None else _start_coords(start, body)
    fx = float(f(x))
    if not math.isfinite(fx):
        raise OracleError("objective is non-finite at the start point")

    tangent_gaussian = man.tangent_gaussian
    exp = man.exp
    inside_body = body.contains_coords
    last = len(schedule.temps) - 1
    trace: list[PhaseRecord] = []
    best_x, best_f = x.copy(), fx

    for phase, (temperature, steps) in enumerate(zip(schedule.temps, allocations)):
        rejections = 0
        phase_best = fx
        if phase == last:
            best_x, best_f = x.copy(), fx
        for _ in range(steps):
            u = tangent_gaussian(x, rng)
            w = rng.random()
            y = exp(x, delta * u)
            if inside_body(y):
                fy = float(f(y))
                if not math.isfinite(fy):
                    raise OracleError("objective returned a non-finite value")
                if fy <= fx or w < math.exp((fx - fy) / temperature):
                    x = y
                    fx = fy
                    if fx < phase_best:
                        phase_best = fx
                    if phase == last and fx < best_f:
                        best_x, best_f = y.copy(), fx
                    continue
            rejections += 1
        trace.append(
            PhaseRecord(phase, temperature, steps, rejections, phase_best, fx)
        )
    return AnnealResult(best_x, best_f, tuple(trace), schedule, delta)


def anneal_trials(
    body: ConvexBody,
    f_many: Callable[[np.ndarray], np.ndarray],
    config: AnnealConfig,
    seed: int,
    trials: int,
    chunk: int = 4096,
) -> TrialsResult:
    """``trials`` independent annealing runs advanced in lockstep.

    Each trial owns the RNG stream ``(seed, trial_index)`` and draws its
    randomness in per-phase blocks, so results are deterministic in
    ``seed`` but not trajectory-identical to sequential :func:`anneal`
    calls, which interleave draws differently.  ``f_many`` must accept any
    batch of manifold points, on or off the body.
    """
    if trials < 1:
        raise PreconditionError("trials must be >= 1")
    man = body.manifold
    n = man.tangent_dim
    delta = _resolve_delta(body, config)
    t0 = initial_temperature(body, config.lipschitz)
    schedule = make_schedule(t0, n, config.epsilon, config.fail_prob)
    allocations = allocate_steps(schedule, man, body, config)

    gens = [stream(seed, t) for t in range(trials)]
    points = np.stack([rejection_sample_uniform(body, g) for g in gens])
    values = np.asarray(f_many(points), dtype=float)
    if not np.all(np.isfinite(values)):
        raise OracleError("objective is non-finite at a start point")

    last = len(schedule.temps) - 1
    records: list[list[PhaseRecord]] = [[] for _ in range(trials)]
    best_points = points.copy()
    best_values = values.copy()

    normals = np.empty((trials, chunk, n))
    uniforms = np.empty((trials, chunk))
    for phase, (temperature, steps) in enumerate(zip(schedule.temps, allocations)):
        rejections = np.zeros(trials, dtype=np.int64)
        phase_best = values.copy()
        if phase == last:
            best_points = points.copy()
            best_values = values.copy()
        done = 0
        while done < steps:
            m = min(chunk, steps - done)
            for t, g in enumerate(gens):
                normals[t, :m] = g.standard_normal((m, n))
                uniforms[t, :m] = g.random(m)
            for j in range(m):
                u = man.tangent_from_gaussian_many(points, normals[:, j])
                proposals = man.exp_many(points, delta * u)
                inside = body.contains_many(proposals)
                trial_values = np.asarray(f_many(proposals), dtype=float)
                downhill = trial_values <= values
                log_ratio = np.minimum((values - trial_values) / temperature, 0.0)
                accept = inside & (downhill | (uniforms[:, j] < np.exp(log_ratio)))
                points = np.where(accept[:, None], proposals, points)
                values = np.where(accept, trial_values, values)
                rejections += ~accept
                np.minimum(phase_best, values, out=phase_best)
                if phase == last:
                    improved = values < best_values
                    if improved.any():
                        best_points[improved] = points[improved]
                        best_values[improved] = values[improved]
            done += m
        for t in range(trials):
            records[t].append(
                PhaseRecord(
                    phase,
                    temperature,
                    int(steps),
                    int(rejections[t]),
                    float(phase_best[t]),
                    float(values[t]),
                )
            )
    return TrialsResult(
        best_values,
        best_points,
        tuple(tuple(r) for r in records),
        schedule,
        tuple(allocations),
        delta,
    )
