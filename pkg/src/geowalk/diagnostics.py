"""Numerical verification of the checkable inequalities.

Two kinds of check live here.  The 1-D needle inequalities (affine decay,
the convex-weight expectation bound, partition-function log-concavity) are
evaluated by deterministic adaptive quadrature and must hold to tolerance
whenever their hypotheses hold; randomized instance batteries probe them
across parameter space.  The geometric checks (interior volume, isoperimetry,
one-step kernel overlap, adjacent-temperature warmness, low-temperature
expectation, TV decay) are Monte Carlo estimates with explicit standard
errors, and every pass/fail decision uses the same rule: an inequality
``lhs <= rhs`` passes when ``lhs <= rhs + 3 * mc_stderr + abs_tol``.

Everything is seed-deterministic: given the same generator state, every
estimator returns bit-identical numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .bodies import (
    ConvexBody,
    EuclideanBox,
    SphericalCap,
    sample_uniform_many,
)
from .errors import (
    NotConvex,
    PreconditionError,
    ScheduleTooAggressive,
    SeparationViolated,
)
from .manifolds import Euclidean, Manifold, SpecialOrthogonal, Sphere
from .quadrature import DEFAULT_SPEC, QuadratureSpec, integrate
from .rng import stream
from .walk import WalkParams, delta_bound, run_chain, step_ensemble

__all__ = [
    "InequalityReport",
    "TvEstimate",
    "WarmnessEstimate",
    "check_affine_needle_lemma",
    "check_needle_moment_lemma",
    "check_partition_function_logconcavity",
    "check_interior_volume",
    "box_shell_fraction",
    "check_isoperimetry",
    "estimate_one_step_tv",
    "estimate_l2_warmness",
    "check_low_temp_expectation",
    "tv_decay_curve",
    "ks_one_sample",
    "ks_two_sample",
    "ks_sigma",
    "run_affine_needle_battery",
    "run_needle_moment_battery",
    "run_partition_battery",
    "builtin_check_names",
    "run_builtin_check",
]


@dataclass(frozen=True)
class InequalityReport:
    """Outcome of one inequality check, ``lhs <= rhs`` expected."""

    name: str
    lhs: float
    rhs: float
    margin: float
    passed: bool
    mc_stderr: float = 0.0
    details: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "passed": self.passed,
            "mc_stderr": self.mc_stderr,
            "details": self.details,
        }


def _report(
    name: str,
    lhs: float,
    rhs: float,
    mc_stderr: float = 0.0,
    abs_tol: float = 1e-10,
    details: Optional[dict] = None,
) -> InequalityReport:
    lhs = float(lhs)
    rhs = float(rhs)
    return InequalityReport(
        name,
        lhs,
        rhs,
        rhs - lhs,
        lhs <= rhs + 3.0 * mc_stderr + abs_tol,
        float(mc_stderr),
        details or {},
    )


@dataclass(frozen=True)
class TvEstimate:
    """Upper-bound estimate of the one-step kernel distance, split into the
    tangent-Gaussian transport mismatch and the rejection disagreement."""

    value: float
    stderr: float
    transport_term: float
    rejection_term: float


@dataclass(frozen=True)
class WarmnessEstimate:
    value: float
    stderr: float


# ---------------------------------------------------------------------------
# Small numeric helpers.


def _normal_upper_quantile(p: float) -> float:
    """z with P(N(0,1) > z) = p, by bisection; p in (0, 0.5]."""
    if not 0.0 < p <= 0.5:
        raise PreconditionError("tail probability must lie in (0, 0.5]")
    lo, hi = 0.0, 40.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if 0.5 * math.erfc(mid / math.sqrt(2.0)) > p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _convex_min(h: Callable[[float], float], a: float, b: float) -> float:
    """Minimum of a convex function on [a, b] by golden-section search."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    lo, hi = a, b
    c = hi - inv_phi * (hi - lo)
    d = lo + inv_phi * (hi - lo)
    hc, hd = h(c), h(d)
    for _ in range(120):
        if hc <= hd:
            hi, d, hd = d, c, hc
            c = hi - inv_phi * (hi - lo)
            hc = h(c)
        else:
            lo, c, hc = c, d, hd
            d = lo + inv_phi * (hi - lo)
            hd = h(d)
    return min(h(a), h(b), hc, hd)


def _require_convex(
    h: Callable[[float], float], a: float, b: float, tol: float = 1e-9, grid: int = 33
) -> None:
    """Midpoint spot test; raises :class:`NotConvex` with a witness."""
    xs = np.linspace(a, b, grid)
    values = np.array([h(x) for x in xs])
    for i in range(grid):
        for j in range(i + 2, grid):
            mid = 0.5 * (xs[i] + xs[j])
            if h(mid) > 0.5 * (values[i] + values[j]) + tol:
                raise NotConvex(
                    f"midpoint test failed at x={xs[i]:.6g}, y={xs[j]:.6g}: "
                    f"h(mid)={h(mid):.6g} exceeds the chord"
                )


def ks_one_sample(values: np.ndarray, cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """Kolmogorov-Smirnov statistic of a sample against an exact CDF."""
    x = np.sort(np.asarray(values, dtype=float))
    n = x.size
    if n == 0:
        raise PreconditionError("empty sample")
    f = np.asarray(cdf(x), dtype=float)
    grid = np.arange(1, n + 1) / n
    return float(max(np.max(grid - f), np.max(f - (grid - 1.0 / n))))


def ks_two_sample(a: np.ndarray, b: np.ndarray) -> float:
    """Two-sample Kolmogorov-Smirnov statistic."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise PreconditionError("empty sample")
    everything = np.concatenate([a, b])
    fa = np.searchsorted(a, everything, side="right") / a.size
    fb = np.searchsorted(b, everything, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def ks_sigma(n: int, m: Optional[int] = None) -> float:
    """Approximate standard deviation of the KS statistic under the null.

    The Kolmogorov distribution has standard deviation about 0.26 after the
    sqrt(n) scaling; for two samples the effective size is ``nm/(n+m)``.
    """
    if m is None:
        return 0.26 / math.sqrt(n)
    return 0.26 * math.sqrt((n + m) / (n * m))


# ---------------------------------------------------------------------------
# Needle inequalities by quadrature.


def _quad_tol(spec: QuadratureSpec, lhs: float, rhs: float) -> float:
    """Pass tolerance matching what the integrator guarantees for both sides."""
    return spec.abs_tol + spec.rel_tol * (abs(lhs) + abs(rhs))


def check_affine_needle_lemma(
    a: float,
    b: float,
    c1: float,
    c2: float,
    n: int,
    eps: float,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> InequalityReport:
    """Decay of an affine-power needle mass past its right endpoint.

    With ``w(x) = (c1 x + c2)^(n-1)`` positive on ``[a, b+eps]`` and
    ``eps <= (b-a)/n``, the mass of ``w`` over ``[b, b+eps]`` scaled by
    ``(b-a)/(eps n e)`` cannot exceed the mass over ``[a, b]``.
    """
    if n < 1 or int(n) != n:
        raise PreconditionError("n must be a positive integer")
    if not (math.isfinite(a) and math.isfinite(b)) or a >= b:
        raise PreconditionError("need a < b, finite")
    if eps <= 0.0 or eps > (b - a) / n * (1.0 + 1e-12):
        raise PreconditionError(f"eps must lie in (0, (b-a)/n], got {eps}")
    if min(c1 * a + c2, c1 * (b + eps) + c2) <= 0.0:
        raise PreconditionError("affine function must be positive on [a, b+eps]")

    power = n - 1

    def w(x: float) -> float:
        return (c1 * x + c2) ** power

    rhs = integrate(w, a, b, spec)
    tail = integrate(w, b, b + eps, spec)
    lhs = (b - a) / (eps * n * math.e) * tail
    return _report(
        "affine_needle",
        lhs,
        rhs,
        abs_tol=_quad_tol(spec, lhs, rhs),
        details={"a": a, "b": b, "c1": c1, "c2": c2, "n": int(n), "eps": eps},
    )


def check_needle_moment_lemma(
    h: Callable[[float], float],
    a: float,
    b: float,
    n: int,
    spec: QuadratureSpec = DEFAULT_SPEC,
    breakpoints: Sequence[float] = (),
) -> InequalityReport:
    """Expectation bound for a convex energy against its Gibbs needle weight.

    After shifting ``h`` so its minimum over ``[a, b]`` is zero, checks
    ``integral(e^(-h) h z^(n-1)) <= (n+1) integral(e^(-h) z^(n-1))``.
    """
    if n < 1 or int(n) != n:
        raise PreconditionError("n must be a positive integer")
    if a < 0.0 or a >= b or not math.isfinite(b):
        raise PreconditionError("need 0 <= a < b, finite")
    _require_convex(h, a, b)
    shift = _convex_min(h, a, b)
    power = n - 1

    def weighted(z: float) -> float:
        hz = h(z) - shift
        return math.exp(-hz) * hz * z**power

    def plain(z: float) -> float:
        return math.exp(-(h(z) - shift)) * z**power

    pts = tuple(p for p in breakpoints if a < p < b)
    lhs = integrate(weighted, a, b, spec, breakpoints=pts)
    rhs = (n + 1) * integrate(plain, a, b, spec, breakpoints=pts)
    return _report(
        "needle_moment",
        lhs,
        rhs,
        abs_tol=_quad_tol(spec, lhs, rhs),
        details={"a": a, "b": b, "n": int(n), "shift": shift},
    )


def check_partition_function_logconcavity(
    h: Callable[[float], float],
    interval: tuple[float, float],
    n: int,
    alpha: float,
    beta: float,
    spec: QuadratureSpec = DEFAULT_SPEC,
    breakpoints: Sequence[float] = (),
) -> InequalityReport:
    """Log-concavity of the power-weighted needle partition function.

    With ``Z(s) = integral(e^(-s h(x)) x^(n-1) dx)`` over the interval,
    checks ``Z(alpha) Z(beta) <= ((alpha+beta)^2 / (4 alpha beta))^n *
    Z((alpha+beta)/2)^2``.  The equal-parameter case is an identity and
    comes out with margin exactly zero.
    """
    lo, hi = float(interval[0]), float(interval[1])
    if not 0.0 < lo < hi or not math.isfinite(hi):
        raise PreconditionError("interval must satisfy 0 < lo < hi, finite")
    if alpha <= 0.0 or beta <= 0.0:
        raise PreconditionError("alpha and beta must be positive")
    if n < 1 or int(n) != n:
        raise PreconditionError("n must be a positive integer")
    _require_convex(h, lo, hi)
    shift = _convex_min(h, lo, hi)
    power = n - 1
    pts = tuple(p for p in breakpoints if lo < p < hi)

    def z_at(s: float) -> float:
        def integrand(x: float) -> float:
            return math.exp(-s * (h(x) - shift)) * x**power

        return integrate(integrand, lo, hi, spec, breakpoints=pts)

    za = z_at(alpha)
    zb = z_at(beta)
    zm = z_at(0.5 * (alpha + beta))
    ratio = 0.25 * (alpha + beta) ** 2 / (alpha * beta)
    lhs = za * zb
    rhs = ratio**n * (zm * zm)
    return _report(
        "partition_logconcavity",
        lhs,
        rhs,
        abs_tol=_quad_tol(spec, lhs, rhs),
        details={
            "interval": [lo, hi],
            "n": int(n),
            "alpha": alpha,
            "beta": beta,
            "shift": shift,
        },
    )


# ---------------------------------------------------------------------------
# Interior volume via the local-conductance membership proxy.


def _cap_accept_counts(
    points: np.ndarray,
    body: SphericalCap,
    delta: float,
    trials: int,
    rng: np.random.Generator,
    point_block: int = 8192,
    trial_block: int = 256,
) -> np.ndarray:
    """Accepted-proposal counts per point for a spherical cap.

    Scores proposals in closed form (the inner product with the cap axis)
    instead of materializing them; this matches the walk's proposal law up
    to one rounding in the sphere re-normalization.
    """
    man: Sphere = body.manifold
    n = man.n
    axis = body.axis
    cos_angle = body.cos_angle
    counts = np.zeros(len(points), dtype=np.int64)
    for start in range(0, len(points), point_block):
        block = points[start : start + point_block]
        xa = block @ axis
        sign = np.where(block[:, -1] >= 0.0, 1.0, -1.0)
        w = block.copy()
        w[:, -1] += sign
        coeff = 2.0 * (w @ axis) / np.einsum("ij,ij->i", w, w)
        h_axis = axis - coeff[:, None] * w
        h_head = h_axis[:, :-1]
        done = 0
        while done < trials:
            m = min(trial_block, trials - done)
            g = rng.standard_normal((len(block), m, n))
            t = delta * np.sqrt(np.einsum("pmn,pmn->pm", g, g))
            ua = np.einsum("pmn,pn->pm", g, h_head)
            ya = np.cos(t) * xa[:, None] + delta * np.sinc(t / np.pi) * ua
            counts[start : start + len(block)] += np.count_nonzero(
                ya >= cos_angle, axis=1
            )
            done += m
    return counts


def _box_accept_counts(
    points: np.ndarray,
    body: EuclideanBox,
    delta: float,
    trials: int,
    rng: np.random.Generator,
    point_block: int = 8192,
    trial_block: int = 256,
) -> np.ndarray:
    counts = np.zeros(len(points), dtype=np.int64)
    lo, hi = body.lo, body.hi
    dim = lo.size
    for start in range(0, len(points), point_block):
        block = points[start : start + point_block]
        done = 0
        while done < trials:
            m = min(trial_block, trials - done)
            proposals = block[:, None, :] + delta * rng.standard_normal(
                (len(block), m, dim)
            )
            inside = np.all((proposals >= lo) & (proposals <= hi), axis=2)
            counts[start : start + len(block)] += np.count_nonzero(inside, axis=1)
            done += m
    return counts


def _generic_accept_counts(
    points: np.ndarray,
    body: ConvexBody,
    delta: float,
    trials: int,
    rng: np.random.Generator,
    trial_block: int = 4096,
) -> np.ndarray:
    man = body.manifold
    counts = np.zeros(len(points), dtype=np.int64)
    for i, x in enumerate(points):
        done = 0
        while done < trials:
            m = min(trial_block, trials - done)
            reps = np.broadcast_to(x, (m, man.ambient_dim))
            u = man.tangent_gaussian_many(reps, rng)
            proposals = man.exp_many(reps, delta * u)
            counts[i] += int(np.count_nonzero(body.contains_many(proposals)))
            done += m
    return counts


def _accept_counts(points, body, delta, trials, rng) -> np.ndarray:
    if isinstance(body, SphericalCap):
        return _cap_accept_counts(points, body, delta, trials, rng)
    if isinstance(body, EuclideanBox):
        return _box_accept_counts(points, body, delta, trials, rng)
    return _generic_accept_counts(points, body, delta, trials, rng)


def box_shell_fraction(body: EuclideanBox, eps: float) -> float:
    """Exact volume fraction of the box within depth ``eps`` of its boundary."""
    widths = body.hi - body.lo
    if eps <= 0.0 or 2.0 * eps >= float(np.min(widths)):
        raise PreconditionError("eps must satisfy 0 < 2*eps < min side length")
    return 1.0 - float(np.prod((widths - 2.0 * eps) / widths))


def check_interior_volume(
    body: ConvexBody,
    eps: float,
    mc_samples: int,
    rng: np.random.Generator,
    trials: int = 10**4,
    conductance_tol: float = 1e-3,
) -> InequalityReport:
    """Volume of the low-conductance shell against ``e n eps / r``.

    Membership in the eroded body is decided by the Monte Carlo local
    conductance: a point belongs when at least ``1 - conductance_tol`` of
    ``trials`` one-step proposals stay inside.  The proposal step size is
    ``eps`` divided by the normal upper quantile of ``conductance_tol``, so
    that a point at depth ``eps`` sits exactly at the decision threshold.
    """
    n = body.manifold.tangent_dim
    r = body.inner_radius
    if eps <= 0.0 or eps > r / n * (1.0 + 1e-12):
        raise PreconditionError(f"eps must lie in (0, r/n], got {eps}")
    delta = eps / _normal_upper_quantile(conductance_tol)
    samples = sample_uniform_many(body, rng, mc_samples)
    counts = _accept_counts(samples, body, delta, trials, rng)
    outside = counts < (1.0 - conductance_tol) * trials
    fraction = float(np.mean(outside))
    stderr = math.sqrt(max(fraction * (1.0 - fraction), 1e-300) / mc_samples)
    bound = math.e * n * eps / r
    return _report(
        "interior_volume",
        fraction,
        bound,
        mc_stderr=stderr,
        abs_tol=1e-12,
        details={
            "eps": eps,
            "walk_delta": delta,
            "trials": trials,
            "mc_samples": mc_samples,
            "conductance_tol": conductance_tol,
        },
    )


# ---------------------------------------------------------------------------
# Isoperimetry.


def check_isoperimetry(
    body: ConvexBody,
    classifier: Callable[[np.ndarray], np.ndarray],
    eps: float,
    mc_samples: int,
    rng: np.random.Generator,
    base_point: Optional[np.ndarray] = None,
    pair_checks: int = 1000,
    abs_tol: float = 1e-12,
) -> InequalityReport:
    """Monte Carlo form of the three-set isoperimetric inequality.

    ``classifier`` labels each sample 1, 2, or 3; pieces 1 and 3 must be at
    geodesic distance at least ``eps`` (spot-checked on sampled cross
    pairs).  The check compares ``p1 * p3`` against
    ``(mean_distance / (eps ln 2)) * p2``, with the mean distance taken to
    ``base_point`` (default: the body's declared center), and propagates
    sampling error through both sides by the delta method.
    """
    if eps <= 0.0:
        raise PreconditionError("eps must be positive")
    man = body.manifold
    base = body.inner_center if base_point is None else np.asarray(base_point, float)
    samples = sample_uniform_many(body, rng, mc_samples)
    labels = np.asarray(classifier(samples))
    if not np.all(np.isin(labels, (1, 2, 3))):
        raise PreconditionError("classifier must label every sample 1, 2, or 3")
    distances = man.dist_many(samples, base)

    first = samples[labels == 1]
    third = samples[labels == 3]
    if len(first) and len(third):
        k = min(pair_checks, len(first) * len(third))
        ii = rng.integers(0, len(first), size=k)
        jj = rng.integers(0, len(third), size=k)
        for i, j in zip(ii, jj):
            d = man.dist(first[i], third[j])
            if d < eps * (1.0 - 1e-9):
                raise SeparationViolated(
                    f"sampled points of pieces 1 and 3 at distance {d:.6g} < {eps:.6g}"
                )

    i1 = (labels == 1).astype(float)
    i2 = (labels == 2).astype(float)
    i3 = (labels == 3).astype(float)
    p1, p2, p3 = i1.mean(), i2.mean(), i3.mean()
    mean_dist = distances.mean()
    scale = 1.0 / (eps * math.log(2.0))

    lhs = p1 * p3
    rhs = mean_dist * scale * p2
    # Delta method on the margin g = rhs - lhs over the mean vector
    # (d, i2, i1, i3); gradient evaluated at the sample means.
    stacked = np.stack([distances, i2, i1, i3])
    cov = np.cov(stacked)
    grad = np.array([scale * p2, scale * mean_dist, -p3, -p1])
    var = float(grad @ cov @ grad) / mc_samples
    stderr = math.sqrt(max(var, 0.0))
    return _report(
        "isoperimetry",
        lhs,
        rhs,
        mc_stderr=stderr,
        abs_tol=abs_tol,
        details={
            "p1": p1,
            "p2": p2,
            "p3": p3,
            "mean_distance": float(mean_dist),
            "eps": eps,
        },
    )


# ---------------------------------------------------------------------------
# One-step kernel overlap.


def _transport(man: Manifold, x: np.ndarray, y: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Isometric identification of tangent vectors at ``x`` with tangent
    vectors at ``y``, vectorized over rows of ``v``."""
    if isinstance(man, Euclidean):
        return v
    if isinstance(man, Sphere):
        c = x @ y
        if c <= -1.0 + 1e-12:
            raise PreconditionError("cannot transport between antipodal points")
        along = (v @ y) / (1.0 + c)
        return v - along[:, None] * (x + y)[None, :]
    if isinstance(man, SpecialOrthogonal):
        nn = man.n
        rel = y.reshape(nn, nn) @ x.reshape(nn, nn).T
        return np.einsum("ij,kjl->kil", rel, v.reshape(-1, nn, nn)).reshape(v.shape)
    raise PreconditionError(f"no transport rule for {man.descriptor}")


def estimate_one_step_tv(
    x,
    y,
    body: ConvexBody,
    params: WalkParams,
    mc_proposals: int,
    rng: np.random.Generator,
) -> TvEstimate:
    """Coupled upper bound on the one-step kernel distance between starts.

    The tangent Gaussians at ``x`` and ``y`` are coupled through an
    isometric transport, so the continuous parts differ at most by the
    total variation between two unit Gaussians whose means are ``d(x,y) /
    delta`` apart, ``erf(d / (2 sqrt(2) delta))``.  The lazy-step atoms are
    coupled by the same shared draws, and their mismatch is estimated as
    the Monte Carlo rate at which exactly one of the two proposals leaves
    the body.  The sum (capped at one) upper-bounds the true kernel
    distance and vanishes as the starts merge.
    """
    man = body.manifold
    xc = np.asarray(x, dtype=float)
    yc = np.asarray(y, dtype=float)
    if not (body.contains_coords(xc) and body.contains_coords(yc)):
        raise PreconditionError("both starts must lie inside the body")
    d = man.dist(xc, yc)
    transport_term = min(1.0, math.erf(d / (2.0 * math.sqrt(2.0) * params.delta)))

    reps_x = np.broadcast_to(xc, (mc_proposals, man.ambient_dim))
    u = man.tangent_gaussian_many(reps_x, rng)
    v = _transport(man, xc, yc, u)
    prop_x = man.exp_many(reps_x, params.delta * u)
    prop_y = man.exp_many(
        np.broadcast_to(yc, (mc_proposals, man.ambient_dim)), params.delta * v
    )
    in_x = body.contains_many(prop_x)
    in_y = body.contains_many(prop_y)
    disagreement = float(np.mean(in_x != in_y))
    stderr = math.sqrt(max(disagreement * (1.0 - disagreement), 1e-300) / mc_proposals)
    return TvEstimate(
        min(1.0, transport_term + disagreement), stderr, transport_term, disagreement
    )


# ---------------------------------------------------------------------------
# Warmness of adjacent Gibbs distributions.


def estimate_l2_warmness(
    f_many: Callable[[np.ndarray], np.ndarray],
    body: ConvexBody,
    t_hot: float,
    t_cold: float,
    mc_samples: int,
    rng: np.random.Generator,
) -> WarmnessEstimate:
    """L2 density-ratio norm between Gibbs distributions at two temperatures.

    Writing ``beta = 1/T``, the squared norm equals ``Z(beta_cold) *
    Z(2 beta_hot - beta_cold) / Z(beta_hot)^2``; all three partition
    functions are estimated from one shared set of exact uniform samples,
    which makes the equal-temperature case return exactly one.  Requires
    ``2 beta_hot - beta_cold > 0``, else the tilted integral diverges.
    """
    if t_cold <= 0.0 or t_hot < t_cold:
        raise PreconditionError("need t_hot >= t_cold > 0")
    beta_hot = 1.0 / t_hot
    beta_cold = 1.0 / t_cold
    tilted = 2.0 * beta_hot - beta_cold
    if tilted <= 0.0:
        raise ScheduleTooAggressive(
            f"temperature pair ({t_hot:.6g}, {t_cold:.6g}) leaves the tilted "
            f"exponent {tilted:.6g} non-positive; the warmness integral diverges"
        )
    samples = sample_uniform_many(body, rng, mc_samples)
    values = np.asarray(f_many(samples), dtype=float)
    values = values - values.min()
    w_cold = np.exp(-beta_cold * values)
    w_tilt = np.exp(-tilted * values)
    w_hot = np.exp(-beta_hot * values)
    m_cold = w_cold.mean()
    m_tilt = w_tilt.mean()
    m_hot = w_hot.mean()
    value = m_cold * m_tilt / (m_hot * m_hot)
    grad = np.array([value / m_cold, value / m_tilt, -2.0 * value / m_hot])
    cov = np.cov(np.stack([w_cold, w_tilt, w_hot]))
    var = float(grad @ cov @ grad) / mc_samples
    return WarmnessEstimate(float(value), math.sqrt(max(var, 0.0)))


# ---------------------------------------------------------------------------
# Low-temperature expectation.


def check_low_temp_expectation(
    f_values: np.ndarray,
    n: int,
    temperature: float,
    min_f: float = 0.0,
    abs_tol: float = 1e-12,
) -> InequalityReport:
    """Chain mean of the energy against ``T (n+1) + min f``.

    ``f_values`` is the energy along a converged Metropolis chain; the
    standard error uses batch means with ``floor(sqrt(N))`` batches to
    absorb autocorrelation.
    """
    values = np.asarray(f_values, dtype=float)
    if values.ndim != 1 or values.size < 4:
        raise PreconditionError("need a 1-D array of at least 4 chain values")
    batches = int(math.sqrt(values.size))
    width = values.size // batches
    trimmed = values[: batches * width].reshape(batches, width)
    batch_means = trimmed.mean(axis=1)
    stderr = float(batch_means.std(ddof=1) / math.sqrt(batches))
    return _report(
        "low_temp_expectation",
        float(values.mean()),
        temperature * (n + 1) + min_f,
        mc_stderr=stderr,
        abs_tol=abs_tol,
        details={"n": int(n), "temperature": temperature, "chain_length": values.size},
    )


# ---------------------------------------------------------------------------
# TV decay along the walk.


def tv_decay_curve(
    body: ConvexBody,
    delta: float,
    checkpoints: Sequence[int],
    replicas: int,
    rng: np.random.Generator,
    start: Optional[np.ndarray] = None,
    reference_multiple: int = 2,
) -> list[tuple[int, float]]:
    """KS distance to uniformity along an ensemble of walks.

    Evolves ``replicas`` chains from a common start (default: the body's
    center) and, at each checkpoint, compares the distance-to-center
    marginal against fresh exact uniform draws by the two-sample KS
    statistic.  Checkpoints must be non-decreasing step counts.
    """
    cps = [int(c) for c in checkpoints]
    if any(c < 0 for c in cps) or any(b < a for a, b in zip(cps, cps[1:])):
        raise PreconditionError("checkpoints must be non-decreasing and >= 0")
    man = body.manifold
    center = body.inner_center
    begin = center if start is None else np.asarray(start, dtype=float)
    if not body.contains_coords(begin):
        raise PreconditionError("start must lie inside the body")
    reference = sample_uniform_many(body, rng, reference_multiple * replicas)
    ref_summary = man.dist_many(reference, center)
    ensemble = np.tile(begin, (replicas, 1))
    curve = []
    position = 0
    for cp in cps:
        ensemble = step_ensemble(ensemble, body, delta, rng, steps=cp - position)
        position = cp
        summary = man.dist_many(ensemble, center)
        curve.append((cp, ks_two_sample(summary, ref_summary)))
    return curve


# ---------------------------------------------------------------------------
# Randomized instance batteries for the quadrature checks.


def _random_piecewise_linear_convex(rng: np.random.Generator, pieces: int = 4):
    """A convex function ``max_j (m_j z + q_j)`` and its kink locations."""
    count = int(rng.integers(2, pieces + 1))
    slopes = np.sort(rng.uniform(-3.0, 3.0, size=count))
    offsets = rng.uniform(-2.0, 2.0, size=count)

    def h(z: float) -> float:
        return float(np.max(slopes * z + offsets))

    kinks = []
    for i in range(count):
        for j in range(i + 1, count):
            if slopes[i] != slopes[j]:
                kinks.append((offsets[j] - offsets[i]) / (slopes[i] - slopes[j]))
    return h, kinks


def run_affine_needle_battery(
    seed: int, instances: int = 100, spec: QuadratureSpec = DEFAULT_SPEC
) -> list[InequalityReport]:
    """Randomized hypothesis-satisfying instances of the affine needle check.

    Every tenth instance pins ``eps`` at its largest admissible value,
    which is the boundary case of the hypothesis.
    """
    rng = stream(seed)
    reports = []
    for k in range(instances):
        n = int(rng.integers(1, 21))
        a = float(rng.uniform(-3.0, 3.0))
        b = a + float(rng.uniform(0.1, 4.0))
        eps = (b - a) / n if k % 10 == 0 else (b - a) / n * float(rng.uniform(0.1, 1.0))
        c1 = float(rng.uniform(-2.0, 2.0))
        lowest = min(c1 * a, c1 * (b + eps))
        c2 = -lowest + float(rng.uniform(0.05, 3.0))
        reports.append(check_affine_needle_lemma(a, b, c1, c2, n, eps, spec))
    return reports


def run_needle_moment_battery(
    seed: int, instances: int = 100, spec: QuadratureSpec = DEFAULT_SPEC
) -> list[InequalityReport]:
    rng = stream(seed)
    reports = []
    for _ in range(instances):
        h, kinks = _random_piecewise_linear_convex(rng)
        a = float(rng.uniform(0.0, 2.0))
        b = a + float(rng.uniform(0.5, 5.0))
        n = int(rng.integers(1, 11))
        reports.append(check_needle_moment_lemma(h, a, b, n, spec, breakpoints=kinks))
    return reports


def run_partition_battery(
    seed: int, instances: int = 100, spec: QuadratureSpec = DEFAULT_SPEC
) -> list[InequalityReport]:
    rng = stream(seed)
    reports = []
    for _ in range(instances):
        h, kinks = _random_piecewise_linear_convex(rng)
        lo = float(rng.uniform(0.05, 1.0))
        hi = lo + float(rng.uniform(0.5, 4.0))
        n = int(rng.integers(1, 11))
        alpha = float(10.0 ** rng.uniform(-1.0, 1.0))
        beta = float(10.0 ** rng.uniform(-1.0, 1.0))
        reports.append(
            check_partition_function_logconcavity(
                h, (lo, hi), n, alpha, beta, spec, breakpoints=kinks
            )
        )
    return reports


# ---------------------------------------------------------------------------
# Built-in check registry used by the diagnose mode.


def _worst(reports: list[InequalityReport], name: str) -> InequalityReport:
    """Collapse an instance battery to its worst-margin report."""
    worst = min(reports, key=lambda r: r.margin)
    details = dict(worst.details)
    details["instances"] = len(reports)
    details["all_passed"] = all(r.passed for r in reports)
    return InequalityReport(
        name,
        worst.lhs,
        worst.rhs,
        worst.margin,
        all(r.passed for r in reports),
        worst.mc_stderr,
        details,
    )


def _default_cap(n: int = 2, angle: float = math.pi / 3.0) -> SphericalCap:
    man = Sphere(n)
    axis = np.zeros(man.ambient_dim)
    axis[-1] = 1.0
    return SphericalCap(man, axis, angle)


def _check_affine_battery(seed: int) -> list[InequalityReport]:
    return [_worst(run_affine_needle_battery(seed, 100), "affine_needle")]


def _check_needle_moment_battery(seed: int) -> list[InequalityReport]:
    return [_worst(run_needle_moment_battery(seed, 100), "needle_moment")]


def _check_partition_battery(seed: int) -> list[InequalityReport]:
    return [_worst(run_partition_battery(seed, 100), "partition_logconcavity")]


def _check_interior_volume(seed: int) -> list[InequalityReport]:
    rng = stream(seed)
    cap = _default_cap()
    eps = cap.inner_radius / 4.0
    sphere_report = check_interior_volume(cap, eps, 2000, rng, trials=4000)

    box = EuclideanBox(np.zeros(3), np.ones(3))
    box_eps = 0.05
    box_report = check_interior_volume(box, box_eps, 2000, rng, trials=4000)
    exact = box_shell_fraction(box, box_eps)
    mismatch = abs(box_report.lhs - exact)
    control = _report(
        "interior_volume_box_control",
        mismatch,
        0.0,
        mc_stderr=box_report.mc_stderr,
        abs_tol=1e-12,
        details={"empirical": box_report.lhs, "exact": exact, "eps": box_eps},
    )
    return [sphere_report, control]


def _check_isoperimetry(seed: int) -> list[InequalityReport]:
    rng = stream(seed)
    cap = _default_cap()
    gap = 0.1

    def classifier(points: np.ndarray) -> np.ndarray:
        t = points[:, 0]
        return np.where(t <= -gap, 1, np.where(t >= gap, 3, 2))

    report = check_isoperimetry(cap, classifier, 2.0 * gap, 20000, rng)
    return [report]


def _check_one_step_tv(seed: int) -> list[InequalityReport]:
    rng = stream(seed)
    cap = _default_cap()
    man = cap.manifold
    delta = delta_bound(man, cap)
    params = WalkParams(delta=delta)
    x = cap.axis
    direction = man.tangent_from_gaussian(x, np.array([1.0, 0.0]))
    direction /= math.sqrt(direction @ direction)
    distances = np.linspace(0.0, 0.8 * cap.inner_radius, 9)
    estimates = [
        estimate_one_step_tv(x, man.exp(x, d * direction), cap, params, 20000, rng)
        for d in distances
    ]
    worst_drop = -math.inf
    worst_sigma = 0.0
    for a, b in zip(estimates, estimates[1:]):
        drop = a.value - b.value
        if drop > worst_drop:
            worst_drop = drop
            worst_sigma = math.hypot(a.stderr, b.stderr)
    report = _report(
        "one_step_tv",
        worst_drop,
        0.0,
        mc_stderr=worst_sigma,
        abs_tol=1e-12,
        details={
            "sweep": [e.value for e in estimates],
            "at_zero": estimates[0].value,
        },
    )
    return [report]


def _check_warmness(seed: int) -> list[InequalityReport]:
    from .anneal import make_schedule
    from .targets import distance_to

    rng = stream(seed)
    man = Sphere(5)
    axis = np.zeros(man.ambient_dim)
    axis[-1] = 1.0
    cap = SphericalCap(man, axis, math.pi / 3.0)
    target = distance_to(man, axis)
    schedule = make_schedule(cap.diameter * target.lipschitz, 5, 0.1, 0.1)
    t_hot, t_cold = schedule.temps[0], schedule.temps[1]
    estimate = estimate_l2_warmness(target.f_many, cap, t_hot, t_cold, 20000, rng)
    main = _report(
        "warmness",
        estimate.value,
        5.0,
        mc_stderr=estimate.stderr,
        abs_tol=1e-12,
        details={"t_hot": t_hot, "t_cold": t_cold},
    )
    control_value = estimate_l2_warmness(
        target.f_many, cap, t_hot, t_hot, 2000, rng
    ).value
    control = _report(
        "warmness_control",
        abs(control_value - 1.0),
        0.0,
        mc_stderr=0.0,
        abs_tol=0.0,
        details={"value": control_value},
    )
    return [main, control]


def _check_low_temp(seed: int) -> list[InequalityReport]:
    from .targets import as_gibbs, distance_to

    cap = _default_cap()
    man = cap.manifold
    target = distance_to(man, cap.axis)
    temperature = 0.05
    params = WalkParams(delta=delta_bound(man, cap), max_steps=150_000, seed=seed)
    result = run_chain(
        cap.axis, cap, params, target=as_gibbs(target, temperature), burn_in=20_000
    )
    values = np.array([s.f_value for s in result.samples])
    return [check_low_temp_expectation(values, man.tangent_dim, temperature)]


def _check_tv_decay(seed: int) -> list[InequalityReport]:
    rng = stream(seed)
    cap = _default_cap()
    curve = tv_decay_curve(cap, 0.35, (1, 4, 16, 64, 256), 6000, rng)
    final = curve[-1][1]
    sigma = ks_sigma(6000, 12000)
    main = _report(
        "tv_decay",
        final,
        0.03,
        mc_stderr=0.0,
        abs_tol=0.0,
        details={"curve": [[int(s), k] for s, k in curve]},
    )
    worst_rise = max(b - a for (_, a), (_, b) in zip(curve, curve[1:]))
    monotone = _report(
        "tv_decay_monotone",
        worst_rise,
        0.0,
        mc_stderr=math.sqrt(2.0) * sigma,
        abs_tol=0.0,
        details={"curve": [[int(s), k] for s, k in curve]},
    )
    return [main, monotone]


_BUILTIN_CHECKS: dict[str, Callable[[int], list[InequalityReport]]] = {
    "affine_needle": _check_affine_battery,
    "needle_moment": _check_needle_moment_battery,
    "partition_logconcavity": _check_partition_battery,
    "interior_volume": _check_interior_volume,
    "isoperimetry": _check_isoperimetry,
    "one_step_tv": _check_one_step_tv,
    "warmness": _check_warmness,
    "low_temp_expectation": _check_low_temp,
    "tv_decay": _check_tv_decay,
}


def builtin_check_names() -> list[str]:
    return list(_BUILTIN_CHECKS)


def run_builtin_check(name: str, seed: int) -> list[InequalityReport]:
    """Run one named built-in check battery with its default geometry."""
    if name not in _BUILTIN_CHECKS:
        raise PreconditionError(
            f"unknown check {name!r}; known: {', '.join(_BUILTIN_CHECKS)}"
        )
    return _BUILTIN_CHECKS[name](seed)
