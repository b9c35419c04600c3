"""Built-in convex energies with known minima.

Three families, chosen because their minima are analytic, which is what
lets the optimization tests assert absolute optimality gaps:

- ``distance_to(p)``: geodesic distance to an anchor, Lipschitz 1, minimum
  0 at the anchor.  Geodesically convex on the bodies this package builds
  (caps inside a hemisphere, small balls).
- ``sqdist_to(p)``: half the squared geodesic distance.  Its gradient at
  ``x`` has norm ``d(x, p)``, so on a set of diameter ``D`` the Lipschitz
  constant is ``D``.
- ``linear(c)``: flat-space linear functional, Lipschitz ``|c|``; over a
  box the minimum sits at the vertex picked coordinatewise by the sign of
  ``c``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .bodies import EuclideanBox
from .errors import DimensionMismatch, PreconditionError
from .manifolds import Euclidean, Manifold
from .walk import GibbsTarget

__all__ = ["Target", "distance_to", "sqdist_to", "linear", "as_gibbs"]


@dataclass(frozen=True)
class Target:
    name: str
    f: Callable[[np.ndarray], float]
    f_many: Callable[[np.ndarray], np.ndarray]
    lipschitz: float
    min_value: Optional[float] = None
    minimizer: Optional[np.ndarray] = None


def distance_to(manifold: Manifold, point: np.ndarray) -> Target:
    point = np.asarray(point, dtype=float)
    manifold.validate_point(point)

    def f(x: np.ndarray) -> float:
        return manifold.dist(point, x)

    def f_many(points: np.ndarray) -> np.ndarray:
        return manifold.dist_many(points, point)

    return Target("distance_to", f, f_many, 1.0, 0.0, point)


def sqdist_to(manifold: Manifold, point: np.ndarray, diameter: float) -> Target:
    """Half squared distance; ``diameter`` bounds the Lipschitz constant on
    the body the target will be used with."""
    point = np.asarray(point, dtype=float)
    manifold.validate_point(point)
    if diameter <= 0.0:
        raise PreconditionError("diameter must be positive")

    def f(x: np.ndarray) -> float:
        d = manifold.dist(point, x)
        return 0.5 * d * d

    def f_many(points: np.ndarray) -> np.ndarray:
        d = manifold.dist_many(points, point)
        return 0.5 * d * d

    return Target("sqdist_to", f, f_many, float(diameter), 0.0, point)


def linear(coefficients: np.ndarray, box: Optional[EuclideanBox] = None) -> Target:
    """Linear functional on flat space; pass the box to get its analytic
    minimum filled in."""
    c = np.asarray(coefficients, dtype=float)
    if c.ndim != 1 or c.size < 1:
        raise PreconditionError("coefficients must be a 1-D vector")
    norm = float(np.linalg.norm(c))
    if norm == 0.0:
        raise PreconditionError("coefficients must not all be zero")

    def f(x: np.ndarray) -> float:
        return float(c @ x)

    def f_many(points: np.ndarray) -> np.ndarray:
        return points @ c

    min_value = None
    minimizer = None
    if box is not None:
        if not isinstance(box.manifold, Euclidean) or box.manifold.n != c.size:
            raise DimensionMismatch("box dimension does not match the coefficients")
        minimizer = np.where(c > 0.0, box.lo, box.hi)
        min_value = float(c @ minimizer)
    return Target("linear", f, f_many, norm, min_value, minimizer)


def as_gibbs(target: Target, temperature: float) -> GibbsTarget:
    return GibbsTarget(target.f, target.lipschitz, temperature, target.f_many)
