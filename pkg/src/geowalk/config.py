"""Run configuration: INI files, spec strings, and the config hash.

A run is described by plain strings (manifold ``sphere:2``, body
``cap:north:1.0472``, target ``distance_to:north``) so that configs are
diffable and the resolved form can be hashed into every output row.  All
parsing problems surface as :class:`ConfigError`.
"""

from __future__ import annotations

import configparser
import hashlib
import json
import math
from dataclasses import dataclass, fields, replace
from typing import Optional

import numpy as np

from .bodies import ConvexBody, EuclideanBox, GeodesicBall, SphericalCap
from .diagnostics import builtin_check_names
from .errors import ConfigError, GeoWalkError
from .manifolds import Euclidean, Manifold, SpecialOrthogonal, Sphere, from_descriptor
from .targets import Target, distance_to, linear, sqdist_to


@dataclass
class RunConfig:
    """Everything a CLI run needs, as parsed (strings stay strings)."""

    mode: str = "sample"
    seed: int = 0
    output_dir: str = "geowalk-out"
    jobs: int = 1
    manifold: str = ""
    body: str = ""
    start: str = ""
    steps: int = 10_000
    thin: int = 1
    burn_in: int = 0
    chains: int = 1
    delta: Optional[float] = None
    override_delta: bool = False
    target: str = ""
    temperature: float = 1.0
    epsilon: float = 0.1
    fail_prob: float = 0.1
    budget_constant: float = 1.0
    max_total_steps: int = 10**6
    trials: int = 1
    checks: tuple[str, ...] = ()


_SECTIONS = {
    "run": ("mode", "seed", "output_dir", "jobs"),
    "space": ("manifold", "body", "start"),
    "walk": ("steps", "thin", "burn_in", "chains", "delta", "override_delta"),
    "target": ("kind", "temperature"),
    "anneal": (
        "epsilon",
        "fail_prob",
        "budget_constant",
        "max_total_steps",
        "trials",
    ),
    "diagnose": ("checks",),
}

_INT_KEYS = {
    "seed",
    "jobs",
    "steps",
    "thin",
    "burn_in",
    "chains",
    "max_total_steps",
    "trials",
}
_FLOAT_KEYS = {"temperature", "epsilon", "fail_prob", "budget_constant"}
_BOOL_KEYS = {"override_delta"}


def load_config(path: str) -> RunConfig:
    """Parse an INI file into a :class:`RunConfig`, strictly.

    Unknown sections or keys are errors; catching typos beats silently
    running with defaults.
    """
    parser = configparser.ConfigParser()
    try:
        read = parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config file {path!r}: {exc}") from exc
    if not read:
        raise ConfigError(f"cannot read config file {path!r}")
    cfg = RunConfig()
    for section in parser.sections():
        if section not in _SECTIONS:
            raise ConfigError(
                f"unknown section [{section}]; known: {', '.join(_SECTIONS)}"
            )
        for key, raw in parser.items(section):
            if key not in _SECTIONS[section]:
                raise ConfigError(
                    f"unknown key {key!r} in [{section}]; "
                    f"known: {', '.join(_SECTIONS[section])}"
                )
            attr = "target" if (section, key) == ("target", "kind") else key
            cfg = replace(cfg, **{attr: _coerce(section, key, raw)})
    validate_config(cfg)
    return cfg


def _coerce(section: str, key: str, raw: str):
    raw = raw.strip()
    try:
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            return float(raw)
        if key in _BOOL_KEYS:
            lowered = raw.lower()
            if lowered in ("1", "true", "yes", "on"):
                return True
            if lowered in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if key == "delta":
            return None if raw in ("", "auto") else float(raw)
        if key == "checks":
            return tuple(c.strip() for c in raw.split(",") if c.strip())
    except ValueError:
        raise ConfigError(f"bad value {raw!r} for {key} in [{section}]") from None
    return raw


def validate_config(cfg: RunConfig) -> None:
    if cfg.mode not in ("sample", "anneal", "diagnose"):
        raise ConfigError(f"mode must be sample, anneal, or diagnose, got {cfg.mode!r}")
    if cfg.seed < 0:
        raise ConfigError("seed must be non-negative")
    if cfg.jobs < 1:
        raise ConfigError("jobs must be at least 1")
    if cfg.mode in ("sample", "anneal"):
        if not cfg.manifold:
            raise ConfigError(f"mode {cfg.mode} requires [space] manifold")
        if not cfg.body:
            raise ConfigError(f"mode {cfg.mode} requires [space] body")
    if cfg.mode == "sample":
        if cfg.steps < 1 or cfg.chains < 1 or cfg.thin < 1 or cfg.burn_in < 0:
            raise ConfigError("sample mode needs steps, chains, thin >= 1, burn_in >= 0")
        if cfg.target and cfg.temperature <= 0.0:
            raise ConfigError("temperature must be positive")
    if cfg.mode == "anneal":
        if not cfg.target:
            raise ConfigError("anneal mode requires [target] kind")
        if not 0.0 < cfg.fail_prob < 1.0:
            raise ConfigError("fail_prob must lie in (0, 1)")
        if cfg.epsilon <= 0.0:
            raise ConfigError("epsilon must be positive")
        if cfg.trials < 1:
            raise ConfigError("trials must be at least 1")
    if cfg.mode == "diagnose":
        known = builtin_check_names()
        unknown = [name for name in cfg.checks if name not in known]
        if unknown:
            raise ConfigError(
                f"unknown checks: {', '.join(unknown)}; known: {', '.join(known)}"
            )
    if cfg.delta is not None and not (cfg.delta > 0.0 and math.isfinite(cfg.delta)):
        raise ConfigError("delta must be positive and finite")


def resolved_dict(cfg: RunConfig) -> dict:
    """Canonical JSON-serializable view, hashed into every output row."""
    out = {}
    for f in fields(cfg):
        value = getattr(cfg, f.name)
        out[f.name] = list(value) if isinstance(value, tuple) else value
    return out


def config_hash(cfg: RunConfig) -> str:
    payload = json.dumps(resolved_dict(cfg), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()[:12]


# ---------------------------------------------------------------------------
# Spec strings -> objects.


def _parse_floats(text: str) -> np.ndarray:
    try:
        values = [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise ConfigError(f"expected comma-separated floats, got {text!r}") from None
    if not values:
        raise ConfigError(f"expected comma-separated floats, got {text!r}")
    return np.array(values, dtype=float)


def parse_point_spec(text: str, manifold: Manifold) -> np.ndarray:
    """A point given as ``north``, ``identity``, or comma-separated floats."""
    spec = text.strip()
    if spec == "north":
        if not isinstance(manifold, Sphere):
            raise ConfigError("'north' is only defined on spheres")
        coords = np.zeros(manifold.ambient_dim)
        coords[-1] = 1.0
        return coords
    if spec == "identity":
        if not isinstance(manifold, SpecialOrthogonal):
            raise ConfigError("'identity' is only defined on rotation groups")
        return np.eye(manifold.n).ravel()
    coords = _parse_floats(spec)
    try:
        manifold.validate_point(coords)
    except GeoWalkError as exc:
        raise ConfigError(f"point {text!r} is not on {manifold.descriptor}: {exc}") from None
    return coords


def manifold_from_string(text: str) -> Manifold:
    try:
        return from_descriptor(text.strip())
    except GeoWalkError as exc:
        raise ConfigError(str(exc)) from None


def body_from_string(text: str, manifold: Manifold) -> ConvexBody:
    """A body given as ``cap:<axis>:<angle>``, ``ball:<center>:<radius>``,
    or ``box:<lo>:<hi>`` (box only on matching Euclidean space)."""
    kind, _, rest = text.strip().partition(":")
    try:
        if kind == "cap":
            axis_spec, _, angle_text = rest.rpartition(":")
            if not axis_spec:
                raise ConfigError(f"cap needs axis and angle, got {text!r}")
            if not isinstance(manifold, Sphere):
                raise ConfigError("cap bodies require a sphere manifold")
            axis = parse_point_spec(axis_spec, manifold)
            return SphericalCap(manifold, axis, _parse_scalar(angle_text, "cap angle"))
        if kind == "ball":
            center_spec, _, radius_text = rest.rpartition(":")
            if not center_spec:
                raise ConfigError(f"ball needs center and radius, got {text!r}")
            center = parse_point_spec(center_spec, manifold)
            return GeodesicBall(manifold, center, _parse_scalar(radius_text, "radius"))
        if kind == "box":
            lo_text, _, hi_text = rest.partition(":")
            if not hi_text:
                raise ConfigError(f"box needs lo and hi lists, got {text!r}")
            lo = _parse_floats(lo_text)
            hi = _parse_floats(hi_text)
            if not isinstance(manifold, Euclidean) or manifold.n != lo.size:
                raise ConfigError(
                    f"box bodies require euclidean:{lo.size}, got {manifold.descriptor}"
                )
            return EuclideanBox(lo, hi)
    except ConfigError:
        raise
    except GeoWalkError as exc:
        raise ConfigError(f"invalid body {text!r}: {exc}") from None
    raise ConfigError(f"unknown body kind {kind!r}; known: cap, ball, box")


def _parse_scalar(text: str, label: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"bad {label} {text!r}") from None


def target_from_string(text: str, manifold: Manifold, body: ConvexBody) -> Target:
    """A target given as ``distance_to:<point>``, ``sqdist_to:<point>``,
    or ``linear:<coefficients>`` (linear only on a box)."""
    kind, _, rest = text.strip().partition(":")
    try:
        if kind == "distance_to":
            return distance_to(manifold, parse_point_spec(rest, manifold))
        if kind == "sqdist_to":
            point = parse_point_spec(rest, manifold)
            return sqdist_to(manifold, point, body.diameter)
        if kind == "linear":
            if not isinstance(body, EuclideanBox):
                raise ConfigError("linear targets require a box body")
            return linear(_parse_floats(rest), box=body)
    except ConfigError:
        raise
    except GeoWalkError as exc:
        raise ConfigError(f"invalid target {text!r}: {exc}") from None
    raise ConfigError(
        f"unknown target kind {kind!r}; known: distance_to, sqdist_to, linear"
    )
