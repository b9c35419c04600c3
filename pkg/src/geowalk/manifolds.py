"""Constant-curvature manifolds with exponential-map and distance oracles.

Three geometries are provided: Euclidean space ``R^n``, the unit sphere
``S^n`` embedded in ``R^{n+1}``, and the rotation group ``SO(n)`` with the
bi-invariant metric ``<A, B> = tr(A^T B)``.  Points and tangent vectors are
plain float arrays in ambient coordinates; ``SO(n)`` elements are stored as
row-major flattened ``n x n`` matrices so that every manifold exposes the
same 1-D coordinate layout to the walk, the CLI, and the output files.

Every ``exp`` re-projects its result (sphere: renormalisation, SO(n): polar
factor), so long chains of composed steps do not drift off the manifold.

The intrinsic dimension is ``tangent_dim``; curvature enters the walk only
through ``curvature_bound``, an upper bound on the Frobenius norm of the
curvature operator.  For ``S^n`` and ``SO(n)`` it defaults to ``n`` and can
be overridden when sharper information is available.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CutLocusError, DimensionMismatch, PreconditionError

__all__ = [
    "Manifold",
    "Euclidean",
    "Sphere",
    "SpecialOrthogonal",
    "ManifoldPoint",
    "TangentVector",
    "exp_map",
    "distance",
    "geodesic_point",
    "sample_tangent_gaussian",
    "matexp",
    "from_descriptor",
]

_INV_SQRT2 = 1.0 / math.sqrt(2.0)

# Order-13 Pade coefficients for the matrix exponential (scaling and
# squaring).  The squaring threshold is the standard one for this order.
_PADE13 = (
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
)
_PADE13_THETA = 5.371920351148152


def matexp(a: np.ndarray) -> np.ndarray:
    """Matrix exponential by order-13 Pade approximation with scaling.

    Deterministic and accurate to well below 1e-12 for the small skew
    matrices this package feeds it.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"matexp needs a square matrix, got {a.shape}")
    norm = np.linalg.norm(a, 1)
    squarings = 0
    if norm > _PADE13_THETA:
        squarings = int(math.ceil(math.log2(norm / _PADE13_THETA)))
        a = a / (2.0**squarings)
    b = _PADE13
    ident = np.eye(a.shape[0])
    a2 = a @ a
    a4 = a2 @ a2
    a6 = a2 @ a4
    u = a @ (
        a6 @ (b[13] * a6 + b[11] * a4 + b[9] * a2)
        + b[7] * a6
        + b[5] * a4
        + b[3] * a2
        + b[1] * ident
    )
    v = (
        a6 @ (b[12] * a6 + b[10] * a4 + b[8] * a2)
        + b[6] * a6
        + b[4] * a4
        + b[2] * a2
        + b[0] * ident
    )
    r = np.linalg.solve(v - u, v + u)
    for _ in range(squarings):
        r = r @ r
    return r


class Manifold:
    """Shared interface; see the concrete classes for the actual maps."""

    # set by subclasses
    ambient_dim: int
    tangent_dim: int
    curvature_bound: float
    injectivity_radius: float

    @property
    def descriptor(self) -> str:
        raise NotImplementedError

    def exp(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def dist(self, x: np.ndarray, y: np.ndarray) -> float:
        raise NotImplementedError

    def tangent_from_gaussian(self, x: np.ndarray, g: np.ndarray) -> np.ndarray:
        """Embed a vector of ``tangent_dim`` raw normals as a tangent vector
        at ``x``, isometrically, so standard normals map to the standard
        tangent Gaussian.  Separated from the draw itself so callers may
        pre-draw randomness in bulk."""
        raise NotImplementedError

    def tangent_gaussian(self, x: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        return self.tangent_from_gaussian(x, rng.standard_normal(self.tangent_dim))

    def project(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def validate_point(self, x: np.ndarray, atol: float = 1e-8) -> None:
        raise NotImplementedError

    def validate_tangent(self, x: np.ndarray, v: np.ndarray, atol: float = 1e-8) -> None:
        raise NotImplementedError

    # Vectorised fallbacks; Sphere and Euclidean override with array code.

    def exp_many(self, points: np.ndarray, tangents: np.ndarray) -> np.ndarray:
        return np.stack([self.exp(x, v) for x, v in zip(points, tangents)])

    def tangent_from_gaussian_many(self, points: np.ndarray, g: np.ndarray) -> np.ndarray:
        return np.stack(
            [self.tangent_from_gaussian(x, gi) for x, gi in zip(points, g)]
        )

    def tangent_gaussian_many(self, points: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        return self.tangent_from_gaussian_many(
            points, rng.standard_normal((len(points), self.tangent_dim))
        )

    def dist_many(self, points: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.array([self.dist(x, y) for x in points])

    def _check_shape(self, x: np.ndarray, what: str = "point") -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.ambient_dim,):
            raise DimensionMismatch(
                f"{what} for {self.descriptor} must have shape ({self.ambient_dim},), "
                f"got {x.shape}"
            )
        if not np.all(np.isfinite(x)):
            raise PreconditionError(f"non-finite {what} for {self.descriptor}")
        return x


class Euclidean(Manifold):
    """Flat ``R^n``: exp is addition, distance is the Euclidean norm."""

    def __init__(self, n: int):
        if n < 1:
            raise PreconditionError("Euclidean dimension must be >= 1")
        self.n = int(n)
        self.ambient_dim = self.n
        self.tangent_dim = self.n
        self.curvature_bound = 0.0
        self.injectivity_radius = math.inf

    @property
    def descriptor(self) -> str:
        return f"euclidean:{self.n}"

    def exp(self, x, v):
        return x + v

    def dist(self, x, y):
        d = x - y
        return math.sqrt(d @ d)

    def tangent_from_gaussian(self, x, g):
        return g

    def project(self, x):
        return np.asarray(x, dtype=float)

    def validate_point(self, x, atol=1e-8):
        self._check_shape(x)

    def validate_tangent(self, x, v, atol=1e-8):
        self._check_shape(v, "tangent")

    def exp_many(self, points, tangents):
        return points + tangents

    def tangent_from_gaussian_many(self, points, g):
        return g

    def dist_many(self, points, y):
        d = points - y
        return np.sqrt(np.einsum("ij,ij->i", d, d))


class Sphere(Manifold):
    """Unit sphere ``S^n`` in ``R^{n+1}`` with the round metric.

    Geodesics are great circles: ``exp_x(v) = cos|v| x + sin|v| v/|v|`` and
    ``d(x, y) = arccos <x, y>``.  Tangent Gaussians are drawn in an explicit
    orthonormal tangent basis obtained from the Householder reflection that
    swaps ``x`` with the last coordinate axis, so each draw consumes exactly
    ``n`` normal variates and is tangent to machine precision.
    """

    def __init__(self, n: int, curvature_bound: float | None = None):
        if n < 1:
            raise PreconditionError("sphere dimension must be >= 1")
        self.n = int(n)
        self.ambient_dim = self.n + 1
        self.tangent_dim = self.n
        self.curvature_bound = float(n if curvature_bound is None else curvature_bound)
        self.injectivity_radius = math.pi

    @property
    def descriptor(self) -> str:
        return f"sphere:{self.n}"

    def exp(self, x, v):
        t = math.sqrt(v @ v)
        if t == 0.0:
            return x.copy()
        y = math.cos(t) * x + (math.sin(t) / t) * v
        y /= math.sqrt(y @ y)
        return y

    def dist(self, x, y):
        c = x @ y
        if c > 1.0:
            c = 1.0
        elif c < -1.0:
            c = -1.0
        return math.acos(c)

    def tangent_from_gaussian(self, x, g):
        s = 1.0 if x[-1] >= 0.0 else -1.0
        w = x.copy()
        w[-1] += s
        c = 2.0 * (w[:-1] @ g) / (w @ w)
        u = np.empty(self.ambient_dim)
        u[:-1] = g - c * w[:-1]
        u[-1] = -c * w[-1]
        return u

    def project(self, x):
        x = np.asarray(x, dtype=float)
        return x / math.sqrt(x @ x)

    def validate_point(self, x, atol=1e-8):
        x = self._check_shape(x)
        if abs(x @ x - 1.0) > 2.0 * atol:
            raise PreconditionError(
                f"point is off the unit sphere by {abs(math.sqrt(x @ x) - 1.0):.3g}"
            )

    def validate_tangent(self, x, v, atol=1e-8):
        v = self._check_shape(v, "tangent")
        if abs(x @ v) > atol * max(1.0, math.sqrt(v @ v)):
            raise PreconditionError("vector is not tangent to the sphere at x")

    def exp_many(self, points, tangents):
        t = np.sqrt(np.einsum("ij,ij->i", tangents, tangents))
        y = np.cos(t)[:, None] * points + np.sinc(t / np.pi)[:, None] * tangents
        y /= np.sqrt(np.einsum("ij,ij->i", y, y))[:, None]
        return y

    def tangent_from_gaussian_many(self, points, g):
        m = points.shape[0]
        s = np.where(points[:, -1] >= 0.0, 1.0, -1.0)
        w = points.copy()
        w[:, -1] += s
        c = 2.0 * np.einsum("ij,ij->i", w[:, :-1], g) / np.einsum("ij,ij->i", w, w)
        u = np.empty((m, self.ambient_dim))
        u[:, :-1] = g - c[:, None] * w[:, :-1]
        u[:, -1] = -c * w[:, -1]
        return u

    def dist_many(self, points, y):
        return np.arccos(np.clip(points @ y, -1.0, 1.0))


class SpecialOrthogonal(Manifold):
    """Rotation group ``SO(n)`` under the metric ``<A, B> = tr(A^T B)``.

    Points are flattened ``n x n`` matrices.  ``exp_X(V) = X expm(X^T V)``;
    the geodesic distance is the Frobenius norm of the principal logarithm of
    ``X^T Y``, computed from the eigenvalue angles of that (normal) relative
    rotation.  When an eigenvalue sits within 1e-6 of -1 the principal branch
    degenerates and :class:`CutLocusError` is raised.

    The injectivity radius is declared as ``pi`` under this metric
    normalisation (conservative; override via the constructor if you know
    better), and the curvature bound defaults to ``n``.
    """

    def __init__(
        self,
        n: int,
        curvature_bound: float | None = None,
        injectivity_radius: float | None = None,
    ):
        if n < 2:
            raise PreconditionError("SO(n) needs n >= 2")
        self.n = int(n)
        self.ambient_dim = self.n * self.n
        self.tangent_dim = self.n * (self.n - 1) // 2
        self.curvature_bound = float(n if curvature_bound is None else curvature_bound)
        self.injectivity_radius = float(
            math.pi if injectivity_radius is None else injectivity_radius
        )
        self._iu = np.triu_indices(self.n, 1)

    @property
    def descriptor(self) -> str:
        return f"so:{self.n}"

    def _mat(self, x: np.ndarray) -> np.ndarray:
        return x.reshape(self.n, self.n)

    def _polar(self, m: np.ndarray) -> np.ndarray:
        u, _, vt = np.linalg.svd(m)
        q = u @ vt
        if np.linalg.det(q) < 0.0:
            u = u.copy()
            u[:, -1] = -u[:, -1]
            q = u @ vt
        return q

    def exp(self, x, v):
        xm = self._mat(x)
        om = xm.T @ self._mat(v)
        om = 0.5 * (om - om.T)
        y = xm @ matexp(om)
        return self._polar(y).ravel()

    def dist(self, x, y):
        rel = self._mat(x).T @ self._mat(y)
        lam = np.linalg.eigvals(rel)
        if np.min(np.abs(lam + 1.0)) <= 1e-6:
            raise CutLocusError(
                "relative rotation has an eigenvalue at -1; points are on "
                "each other's cut locus"
            )
        ang = np.angle(lam)
        return float(math.sqrt(np.sum(ang * ang)))

    def tangent_from_gaussian(self, x, g):
        om = np.zeros((self.n, self.n))
        om[self._iu] = g * _INV_SQRT2
        om -= om.T
        return (self._mat(x) @ om).ravel()

    def tangent_from_gaussian_many(self, points, g):
        m = len(points)
        om = np.zeros((m, self.n, self.n))
        om[:, self._iu[0], self._iu[1]] = g * _INV_SQRT2
        om -= np.transpose(om, (0, 2, 1))
        xs = points.reshape(m, self.n, self.n)
        return np.einsum("kij,kjl->kil", xs, om).reshape(m, self.ambient_dim)

    def project(self, x):
        return self._polar(self._mat(np.asarray(x, dtype=float))).ravel()

    def validate_point(self, x, atol=1e-8):
        x = self._check_shape(x)
        xm = self._mat(x)
        if np.linalg.norm(xm.T @ xm - np.eye(self.n)) > atol:
            raise PreconditionError("matrix is not orthogonal to tolerance")
        if np.linalg.det(xm) < 0.0:
            raise PreconditionError("matrix has determinant -1, not in SO(n)")

    def validate_tangent(self, x, v, atol=1e-8):
        v = self._check_shape(v, "tangent")
        om = self._mat(x).T @ self._mat(v)
        if np.linalg.norm(om + om.T) > atol * max(1.0, np.linalg.norm(om)):
            raise PreconditionError("X^T V is not skew-symmetric: not a tangent vector")

    def dist_many(self, points, y):
        xs = points.reshape(-1, self.n, self.n)
        rel = np.einsum("kji,jl->kil", xs, self._mat(y))
        lam = np.linalg.eigvals(rel)
        if np.min(np.abs(lam + 1.0)) <= 1e-6:
            raise CutLocusError(
                "a relative rotation has an eigenvalue at -1; some point is "
                "on the cut locus of y"
            )
        ang = np.angle(lam)
        return np.sqrt(np.sum(ang * ang, axis=1))

    def haar_many(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """``count`` Haar-uniform rotations, flattened, via sign-fixed QR."""
        g = rng.standard_normal((count, self.n, self.n))
        q, r = np.linalg.qr(g)
        d = np.sign(np.einsum("kii->ki", r))
        d[d == 0.0] = 1.0
        q = q * d[:, None, :]
        dets = np.linalg.det(q)
        q[dets < 0.0, :, -1] *= -1.0
        return q.reshape(count, self.ambient_dim)


# ---------------------------------------------------------------------------
# Wrapper types: a point or tangent vector that knows its manifold.


@dataclass(eq=False)
class ManifoldPoint:
    manifold: Manifold
    coords: np.ndarray

    def __post_init__(self):
        self.coords = np.asarray(self.coords, dtype=float)
        self.manifold.validate_point(self.coords)


@dataclass(eq=False)
class TangentVector:
    base: ManifoldPoint
    components: np.ndarray

    def __post_init__(self):
        self.components = np.asarray(self.components, dtype=float)
        self.base.manifold.validate_tangent(self.base.coords, self.components)


def exp_map(point: ManifoldPoint, vector: TangentVector) -> ManifoldPoint:
    """Follow the geodesic from ``point`` with initial velocity ``vector``."""
    if vector.base is not point and not np.array_equal(vector.base.coords, point.coords):
        raise PreconditionError("tangent vector is based at a different point")
    man = point.manifold
    return ManifoldPoint(man, man.exp(point.coords, vector.components))


def distance(a: ManifoldPoint, b: ManifoldPoint) -> float:
    if a.manifold is not b.manifold and a.manifold.descriptor != b.manifold.descriptor:
        raise PreconditionError("points live on different manifolds")
    return a.manifold.dist(a.coords, b.coords)


def geodesic_point(point: ManifoldPoint, vector: TangentVector, t: float) -> ManifoldPoint:
    """Point at parameter ``t`` along the geodesic ``s -> exp(s * vector)``."""
    if vector.base is not point and not np.array_equal(vector.base.coords, point.coords):
        raise PreconditionError("tangent vector is based at a different point")
    man = point.manifold
    return ManifoldPoint(man, man.exp(point.coords, float(t) * vector.components))


def sample_tangent_gaussian(point: ManifoldPoint, rng: np.random.Generator) -> TangentVector:
    """Standard Gaussian in the tangent space at ``point`` (identity
    covariance in any orthonormal tangent basis, so E|u|^2 = tangent_dim)."""
    u = point.manifold.tangent_gaussian(point.coords, rng)
    return TangentVector(point, u)


def from_descriptor(text: str) -> Manifold:
    """Build a manifold from ``euclidean:<n>``, ``sphere:<n>``, or ``so:<n>``."""
    parts = text.strip().lower().split(":")
    if len(parts) != 2:
        raise PreconditionError(f"bad manifold descriptor {text!r}")
    kind, num = parts
    try:
        n = int(num)
    except ValueError as exc:
        raise PreconditionError(f"bad manifold dimension in {text!r}") from exc
    if kind == "euclidean":
        return Euclidean(n)
    if kind == "sphere":
        return Sphere(n)
    if kind == "so":
        return SpecialOrthogonal(n)
    raise PreconditionError(f"unknown manifold kind {kind!r}")
