"""Lazy geodesic walk and its Metropolis-filtered variant.

One step from ``x``: draw a standard Gaussian ``u`` in the tangent space,
propose ``y = exp_x(delta * u)``, and stay put if ``y`` leaves the body
(the lazy rule; rejected proposals are never redrawn).  With a Gibbs target
``(f, T)`` an accepted-in-body proposal additionally passes through the
Metropolis filter ``min(1, exp(-(f(y) - f(x)) / T))``, so the chain targets
the distribution with density proportional to ``exp(-f/T)`` on the body.

RNG discipline: every step consumes exactly ``tangent_dim`` normals plus
one uniform, in that order, whether or not the filter is active and however
the step resolves.  A uniform walk and a Metropolis walk with constant
``f`` therefore produce bit-identical trajectories from the same seed,
which the test suite relies on.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .bodies import ConvexBody, rejection_sample_uniform
from .errors import (
    CutLocusError,
    InvalidStart,
    OracleError,
    PreconditionError,
    StepSizeWarning,
)
from .manifolds import Manifold, ManifoldPoint
from .rng import stream

__all__ = [
    "WalkParams",
    "WalkState",
    "GibbsTarget",
    "RejectionStats",
    "ChainSample",
    "ChainResult",
    "delta_bound",
    "validate_delta",
    "suggested_burn_in",
    "uniform_step",
    "metropolis_step",
    "run_chain",
    "estimate_local_conductance",
    "step_ensemble",
]


@dataclass
class WalkParams:
    """Step size and chain-control knobs.

    ``delta`` above the safe bound is an error unless ``override_delta`` is
    set, in which case it only warns.  ``debug_checks`` re-validates
    membership and manifold invariants on every emitted sample.
    """

    delta: float
    max_steps: int = 0
    seed: int = 0
    record_rejections: bool = True
    override_delta: bool = False
    debug_checks: bool = False

    def __post_init__(self):
        if self.delta <= 0.0 or not math.isfinite(self.delta):
            raise PreconditionError(f"step size must be finite and > 0, got {self.delta}")
        if self.max_steps < 0:
            raise PreconditionError("max_steps must be >= 0")


@dataclass
class WalkState:
    point: np.ndarray
    step_index: int = 0
    rejected_last: bool = False
    cumulative_rejections: int = 0
    f_value: Optional[float] = None


@dataclass
class GibbsTarget:
    """Convex energy with its Lipschitz constant and a temperature.

    ``f`` maps coordinates to a finite real on the body (values off the
    body may be anything finite; the walk only compares them).  ``f_many``
    is an optional vectorised twin used by ensemble code paths.
    """

    f: Callable[[np.ndarray], float]
    lipschitz: float
    temperature: float
    f_many: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __post_init__(self):
        if self.temperature <= 0.0:
            raise PreconditionError("temperature must be positive")
        if self.lipschitz <= 0.0:
            raise PreconditionError("Lipschitz constant must be positive")


@dataclass
class RejectionStats:
    steps: int = 0
    rejections: int = 0
    boundary_rejections: int = 0
    filter_rejections: int = 0
    cut_locus_hits: int = 0

    @property
    def rejection_fraction(self) -> float:
        """Empirical stay probability, a proxy for one minus the local
        conductance averaged along the trajectory."""
        return self.rejections / self.steps if self.steps else 0.0


@dataclass
class ChainSample:
    step: int
    coords: np.ndarray
    rejected: bool
    f_value: Optional[float] = None


@dataclass
class ChainResult:
    samples: list[ChainSample]
    stats: RejectionStats
    final: np.ndarray
    best_coords: Optional[np.ndarray] = None
    best_f: Optional[float] = None


def delta_bound(manifold: Manifold, body: ConvexBody, s: float = 0.5) -> float:
    """Largest step size the mixing guarantees cover.

    The two constraints are ``delta^2 <= 1 / (100 sqrt(n) R)`` from the
    curvature bound and ``delta <= s r / (4 n sqrt(n))`` from the inner
    ball, with ``n`` the intrinsic dimension; the result is their minimum.
    ``R = 0`` (flat space) leaves only the second constraint.
    """
    if not 0.0 < s <= 0.5:
        raise PreconditionError(f"s must lie in (0, 0.5], got {s}")
    n = manifold.tangent_dim
    r = body.inner_radius
    curvature_term = math.sqrt(1.0 / (100.0 * math.sqrt(n) * max(manifold.curvature_bound, 1e-12)))
    ball_term = s * r / (4.0 * n * math.sqrt(n))
    return min(curvature_term, ball_term)


def validate_delta(
    params: WalkParams, manifold: Manifold, body: ConvexBody, s: float = 0.5
) -> float:
    """Check ``params.delta`` against ``delta_bound``; returns the bound.

    Over-bound steps raise unless ``params.override_delta`` is set, in
    which case a :class:`StepSizeWarning` is emitted instead (stationarity
    is unaffected by the step size; only the mixing guarantees are).
    """
    bound = delta_bound(manifold, body, s)
    if params.delta > bound:
        message = (
            f"step size {params.delta:.6g} exceeds the guaranteed-safe bound "
            f"{bound:.6g} for {manifold.descriptor}"
        )
        if params.override_delta:
            warnings.warn(message, StepSizeWarning, stacklevel=3)
        else:
            raise PreconditionError(message + " (set override_delta to proceed)")
    return bound


def suggested_burn_in(manifold: Manifold, delta: float) -> int:
    """Heuristic burn-in ``ceil(10 n^2 / delta^2)``, scaled like the mixing
    bound's step-size dependence.  Advisory only; nothing enforces it."""
    n = manifold.tangent_dim
    return int(math.ceil(10.0 * n * n / (delta * delta)))


def _start_coords(start, body: ConvexBody) -> np.ndarray:
    coords = start.coords if isinstance(start, ManifoldPoint) else np.asarray(start, dtype=float)
    body.manifold.validate_point(coords)
    if not body.contains_coords(coords):
        raise InvalidStart("chain start lies outside the body")
    return coords.copy()


def uniform_step(
    state: WalkState, body: ConvexBody, params: WalkParams, rng: np.random.Generator
) -> WalkState:
    """One lazy step toward the uniform distribution on the body.

    Consumes ``tangent_dim`` normals plus one (unused) uniform so that it
    stays stream-aligned with :func:`metropolis_step`.
    """
    man = body.manifold
    x = state.point
    u = man.tangent_gaussian(x, rng)
    rng.random()
    y = man.exp(x, params.delta * u)
    try:
        inside = body.contains_coords(y)
    except CutLocusError:
        inside = False
    if inside:
        return WalkState(y, state.step_index + 1, False, state.cumulative_rejections)
    return WalkState(x, state.step_index + 1, True, state.cumulative_rejections + 1)


def metropolis_step(
    state: WalkState,
    body: ConvexBody,
    target: GibbsTarget,
    params: WalkParams,
    rng: np.random.Generator,
) -> WalkState:
    """One lazy step filtered toward the Gibbs density ``exp(-f/T)``."""
    man = body.manifold
    x = state.point
    u = man.tangent_gaussian(x, rng)
    w = rng.random()
    y = man.exp(x, params.delta * u)
    try:
        inside = body.contains_coords(y)
    except CutLocusError:
        inside = False
    fx = state.f_value
    if fx is None:
        fx = float(target.f(x))
        if not math.isfinite(fx):
            raise OracleError(f"target returned non-finite value {fx} at the current point")
    if inside:
        fy = float(target.f(y))
        if not math.isfinite(fy):
            raise OracleError(f"target returned non-finite value {fy} at a proposal")
        if fy <= fx or w < math.exp((fx - fy) / target.temperature):
            return WalkState(y, state.step_index + 1, False, state.cumulative_rejections, fy)
    return WalkState(
        x, state.step_index + 1, True, state.cumulative_rejections + 1, fx
    )


def run_chain(
    start,
    body: ConvexBody,
    params: WalkParams,
    target: Optional[GibbsTarget] = None,
    thin: int = 1,
    burn_in: int = 0,
    chain_id: int = 0,
    delta_safety: float = 0.5,
) -> ChainResult:
    """Run one chain of ``params.max_steps`` steps from ``start``.

    Emits every ``thin``-th post-burn-in point.  Deterministic given
    ``(params.seed, chain_id)``: the RNG stream is derived here, not passed
    in.  ``start=None`` draws an exact uniform start from that same stream
    before stepping.  With a target, tracks the best point visited anywhere
    along the chain (start included).
    """
    if burn_in < 0:
        raise PreconditionError("burn_in must be >= 0")
    thin = max(1, int(thin))
    man = body.manifold
    validate_delta(params, man, body, delta_safety)
    rng = stream(params.seed, chain_id)
    if start is None:
        x = rejection_sample_uniform(body, rng)
    else:
        x = _start_coords(start, body)

    stats = RejectionStats()
    samples: list[ChainSample] = []
    debug = params.debug_checks

    tangent_gaussian = man.tangent_gaussian
    exp = man.exp
    inside_body = body.contains_coords
    next_uniform = rng.random
    delta = params.delta
    max_steps = params.max_steps

    best_coords: Optional[np.ndarray] = None
    best_f: Optional[float] = None

    if target is None:
        for step in range(1, max_steps + 1):
            u = tangent_gaussian(x, rng)
            next_uniform()
            y = exp(x, delta * u)
            try:
                inside = inside_body(y)
            except CutLocusError:
                inside = False
                stats.cut_locus_hits += 1
            if inside:
                x = y
                rejected = False
            else:
                rejected = True
                stats.rejections += 1
                stats.boundary_rejections += 1
            if step > burn_in and (step - burn_in) % thin == 0:
                if debug:
                    man.validate_point(x)
                    if not inside_body(x):
                        raise PreconditionError("emitted point escaped the body")
                samples.append(ChainSample(step, x.copy(), rejected))
        stats.steps = max_steps
        return ChainResult(samples, stats, x.copy())

    f = target.f
    temperature = target.temperature
    fx = float(f(x))
    if not math.isfinite(fx):
        raise OracleError("target is non-finite at the chain start")
    best_coords, best_f = x.copy(), fx
    for step in range(1, max_steps + 1):
        u = tangent_gaussian(x, rng)
        w = next_uniform()
        y = exp(x, delta * u)
        try:
            inside = inside_body(y)
        except CutLocusError:
            inside = False
            stats.cut_locus_hits += 1
        if inside:
            fy = float(f(y))
            if not math.isfinite(fy):
                raise OracleError(f"target returned non-finite value at step {step}")
            if fy <= fx or w < math.exp((fx - fy) / temperature):
                x = y
                fx = fy
                rejected = False
                if fy < best_f:
                    best_coords, best_f = y.copy(), fy
            else:
                rejected = True
                stats.rejections += 1
                stats.filter_rejections += 1
        else:
            rejected = True
            stats.rejections += 1
            stats.boundary_rejections += 1
        if step > burn_in and (step - burn_in) % thin == 0:
            if debug:
                man.validate_point(x)
                if not inside_body(x):
                    raise PreconditionError("emitted point escaped the body")
            samples.append(ChainSample(step, x.copy(), rejected, fx))
    stats.steps = max_steps
    return ChainResult(samples, stats, x.copy(), best_coords, best_f)


def estimate_local_conductance(
    x,
    body: ConvexBody,
    params: WalkParams,
    trials: int,
    rng: np.random.Generator,
    chunk: int = 1 << 14,
) -> float:
    """Monte Carlo estimate of the accept probability from ``x``.

    Proposes ``trials`` independent one-step moves and returns the fraction
    landing inside the body; an unbiased estimate of the local conductance.
    """
    if trials < 1:
        raise PreconditionError("trials must be >= 1")
    coords = _start_coords(x, body)
    man = body.manifold
    accepted = 0
    done = 0
    while done < trials:
        m = min(chunk, trials - done)
        pts = np.broadcast_to(coords, (m, man.ambient_dim))
        u = man.tangent_gaussian_many(pts, rng)
        y = man.exp_many(pts, params.delta * u)
        try:
            accepted += int(np.count_nonzero(body.contains_many(y)))
        except CutLocusError:
            for row in y:
                try:
                    accepted += bool(body.contains_coords(row))
                except CutLocusError:
                    pass
        done += m
    return accepted / trials


def step_ensemble(
    points: np.ndarray,
    body: ConvexBody,
    delta: float,
    rng: np.random.Generator,
    steps: int = 1,
) -> np.ndarray:
    """Advance a whole ensemble by ``steps`` lazy uniform-walk steps.

    All rows share one generator (a batch of normals per step), so this is
    not stream-compatible with per-chain runs; it exists for diagnostics
    that push thousands of replicas at once.  Returns a new array.
    """
    man = body.manifold
    x = np.array(points, dtype=float, copy=True)
    for _ in range(steps):
        u = man.tangent_gaussian_many(x, rng)
        y = man.exp_many(x, delta * u)
        try:
            ok = body.contains_many(y)
        except CutLocusError:
            ok = np.zeros(len(x), dtype=bool)
            for i, row in enumerate(y):
                try:
                    ok[i] = body.contains_coords(row)
                except CutLocusError:
                    ok[i] = False
        x[ok] = y[ok]
    return x
