"""Discrete paths on a manifold: sampling, energy, length, concatenation.

A path gamma : [0,1] -> M is stored as N+1 samples on the uniform grid
t_i = i/N. Paths that take part in concatenation carry a *collar*: a
width delta such that the path is constant on [0, delta] and [1-delta, 1],
so joins stay smooth under the 2t reparametrization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import manifold as mf
from .manifold import DomainError, NormalNeighborhoodError

DEFAULT_GRID = 256
DEFAULT_COLLAR = 1.0 / 16


@dataclass(frozen=True)
class DiscretePath:
    manifold: mf.ManifoldSpec
    samples: np.ndarray  # (N+1, d)
    collar: float = 0.0

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if self.manifold.kind == mf.FLAT_TORUS:
            samples = mf.wrap_coords(self.manifold, samples)
        object.__setattr__(self, "samples", samples)
        if samples.ndim != 2 or samples.shape[1] != self.manifold.point_dim:
            raise DomainError("samples must have shape (N+1, point_dim)")
        if self.n_segments < 2:
            raise DomainError("a path needs at least N = 2 segments")
        if not (0.0 <= self.collar < 0.5):
            raise DomainError("collar must lie in [0, 1/2)")
        if self.collar > 0:
            self._check_collar()

    def _check_collar(self):
        t = self.grid
        head = self.samples[t <= self.collar + 1e-12]
        tail = self.samples[t >= 1.0 - self.collar - 1e-12]
        spec = self.manifold
        if len(head) and np.max(mf.dist(spec, head, head[0])) > 1e-9:
            raise DomainError("samples inside the start collar must coincide")
        if len(tail) and np.max(mf.dist(spec, tail, tail[-1])) > 1e-9:
            raise DomainError("samples inside the end collar must coincide")

    @property
    def n_segments(self):
        return self.samples.shape[0] - 1

    @property
    def grid(self):
        n = self.n_segments
        return np.arange(n + 1) / n

    def point(self, i):
        return mf.ManifoldPoint(self.manifold, self.samples[i])

    def start(self):
        return self.point(0)

    def end(self):
        return self.point(-1)

    def to_json(self):
        return {
            "manifold": self.manifold.to_json(),
            "collar": self.collar,
            "samples": self.samples.tolist(),
        }

    @classmethod
    def from_json(cls, obj):
        return cls(
            mf.ManifoldSpec.from_json(obj["manifold"]),
            np.asarray(obj["samples"], dtype=float),
            float(obj.get("collar", 0.0)),
        )


@dataclass(frozen=True)
class PathTangentField:
    base: DiscretePath
    components: np.ndarray  # (N+1, d)

    def __post_init__(self):
        comps = np.asarray(self.components, dtype=float)
        object.__setattr__(self, "components", comps)
        if comps.shape != self.base.samples.shape:
            raise DomainError("field shape must match the base path grid")
        spec = self.base.manifold
        if spec.kind == mf.SPHERE:
            ip = np.abs(np.sum(comps * self.base.samples, axis=-1))
            bound = 1e-8 * (np.linalg.norm(comps, axis=-1) * spec.radius + 1e-12)
            if np.any(ip > np.maximum(bound, 1e-12)):
                raise DomainError("sphere field must be tangent at every sample")
        if self.base.collar > 0:
            t = self.base.grid
            head = comps[t <= self.base.collar + 1e-12]
            tail = comps[t >= 1.0 - self.base.collar - 1e-12]
            if len(head) and np.max(np.abs(head - head[0])) > 1e-9:
                raise DomainError("field must be constant on the start collar")
            if len(tail) and np.max(np.abs(tail - tail[-1])) > 1e-9:
                raise DomainError("field must be constant on the end collar")

    @property
    def manifold(self):
        return self.base.manifold

    def vector(self, i):
        return mf.TangentVector(self.base.point(i), self.components[i])

    def to_json(self):
        return {"base": self.base.to_json(), "components": self.components.tolist()}

    @classmethod
    def from_json(cls, obj):
        return cls(DiscretePath.from_json(obj["base"]), np.asarray(obj["components"]))


# ---------------------------------------------------------------------------
# evaluation and resampling
# ---------------------------------------------------------------------------


def evaluate_many(gamma, ts):
    """Sample positions at parameters ts (array-like in [0,1]).

    On-grid parameters return the stored samples exactly; in between,
    neighbors are joined by the connecting geodesic (log/exp interpolation).
    """
    ts = np.asarray(ts, dtype=float)
    if np.any(ts < -1e-12) or np.any(ts > 1 + 1e-12):
        raise DomainError("parameter outside [0, 1]")
    n = gamma.n_segments
    u = np.clip(ts, 0.0, 1.0) * n
    idx = np.minimum(u.astype(int), n - 1)
    frac = u - idx
    spec = gamma.manifold
    p0 = gamma.samples[idx]
    p1 = gamma.samples[idx + 1]
    vel = mf.log(spec, p0, p1)
    pts, _ = mf.flow(spec, p0, vel, frac)
    on_grid = np.abs(frac - np.round(frac)) < 1e-12
    snap = gamma.samples[np.clip(np.round(u).astype(int), 0, n)]
    return np.where(on_grid[..., None], snap, pts)


def evaluate(gamma, t):
    """gamma(t) as a ManifoldPoint."""
    x = evaluate_many(gamma, np.asarray([t]))[0]
    return mf.ManifoldPoint(gamma.manifold, x)


def resample(gamma, n, collar=None):
    """The same path re-sampled on a uniform n-grid."""
    pts = evaluate_many(gamma, np.arange(n + 1) / n)
    return DiscretePath(gamma.manifold, pts, gamma.collar if collar is None else collar)


def reparametrize(gamma, phi_values, collar=0.0):
    """Path t -> gamma(phi(t)) for nondecreasing phi values on a uniform grid."""
    phi_values = np.asarray(phi_values, dtype=float)
    if np.any(np.diff(phi_values) < -1e-12):
        raise DomainError("reparametrization must be nondecreasing")
    return DiscretePath(gamma.manifold, evaluate_many(gamma, phi_values), collar)


# ---------------------------------------------------------------------------
# core operations
# ---------------------------------------------------------------------------


def reverse(gamma):
    """Traversal in the opposite direction; an exact involution on samples."""
    return DiscretePath(gamma.manifold, gamma.samples[::-1].copy(), gamma.collar)


def concatenate(gamma1, gamma2):
    """gamma1 followed by gamma2 on a doubled grid (each run at speed 2t).

    Requires matching endpoints and strictly positive collars on both
    halves, so the join point is an honest constant plateau.
    """
    if gamma1.manifold != gamma2.manifold:
        raise DomainError("cannot concatenate paths on different manifolds")
    spec = gamma1.manifold
    gap = float(mf.dist(spec, gamma1.samples[-1], gamma2.samples[0]))
    if gap > 1e-9:
        raise DomainError("paths are not composable: endpoint gap %.3g" % gap)
    if gamma1.collar <= 0 or gamma2.collar <= 0:
        raise DomainError("concatenation needs positive collars on both paths")
    samples = np.concatenate([gamma1.samples, gamma2.samples[1:]])
    # collar width in node counts survives; re-express it on the joint grid
    n1, n2 = gamma1.n_segments, gamma2.n_segments
    head = np.floor(gamma1.collar * n1 + 1e-9)
    tail = np.floor(gamma2.collar * n2 + 1e-9)
    collar = min(head, tail, (n1 + n2) / 2 - 1) / (n1 + n2)
    return DiscretePath(spec, samples, collar)


def velocity_components(gamma):
    """Discrete velocity at each sample via log maps of the neighbors.

    Central differences of neighbor logs in the interior, one-sided at the
    ends; chart independent by construction.
    """
    spec = gamma.manifold
    s = gamma.samples
    n = gamma.n_segments
    dt = 1.0 / n
    v = np.empty_like(s)
    fwd = mf.log(spec, s[:-1], s[1:])  # log(p_i -> p_{i+1})
    bwd = mf.log(spec, s[1:], s[:-1])  # log(p_i -> p_{i-1})
    v[0] = fwd[0] / dt
    v[-1] = -bwd[-1] / dt
    v[1:-1] = (fwd[1:] - bwd[:-1]) / (2 * dt)
    return v


def velocity_field(gamma):
    return PathTangentField(gamma, velocity_components(gamma))


def _trapezoid(values, dx):
    w = np.ones(len(values))
    w[0] = w[-1] = 0.5
    return float(np.sum(w * values) * dx)


def path_energy(gamma):
    """Discrete Dirichlet energy (1/2) integral of g(gamma', gamma') dt."""
    spec = gamma.manifold
    v = velocity_components(gamma)
    g = mf.inner(spec, gamma.samples, v, v)
    return 0.5 * _trapezoid(g, 1.0 / gamma.n_segments)


def segment_lengths(gamma):
    spec = gamma.manifold
    d = mf.dist(spec, gamma.samples[:-1], gamma.samples[1:])
    if np.any(d >= spec.injectivity_radius()):
        raise NormalNeighborhoodError(
            "adjacent samples farther apart than the injectivity radius; refine the grid"
        )
    return d


def arc_length(gamma):
    """Sum of geodesic segment lengths between consecutive samples."""
    return float(np.sum(segment_lengths(gamma)))


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------


def collar_ramp(ts, collar):
    """Piecewise-linear time warp: 0 on [0, collar], 1 on [1-collar, 1]."""
    if collar == 0:
        return np.asarray(ts, dtype=float)
    return np.clip((np.asarray(ts, dtype=float) - collar) / (1 - 2 * collar), 0.0, 1.0)


def make_constant_path(p, n=DEFAULT_GRID, collar=DEFAULT_COLLAR):
    return DiscretePath(p.manifold, np.tile(p.coords, (n + 1, 1)), collar)


def make_line(spec, start, end, n=DEFAULT_GRID, collar=DEFAULT_COLLAR):
    """Chart-straight segment (euclidean / flat torus)."""
    start = np.asarray(start, dtype=float)
    end = np.asarray(end, dtype=float)
    phi = collar_ramp(np.arange(n + 1) / n, collar)
    return DiscretePath(spec, start + phi[:, None] * (end - start), collar)


def make_geodesic_arc(p, q, n=DEFAULT_GRID, collar=DEFAULT_COLLAR):
    """The minimizing geodesic from p to q, collar-warped; any manifold."""
    spec = p.manifold
    v = mf.log_map(p, q)
    phi = collar_ramp(np.arange(n + 1) / n, collar)
    pts, _ = mf.flow(spec, p.coords, v.components, phi)
    return DiscretePath(spec, pts, collar)


def make_great_circle_arc(spec, start, end, n=DEFAULT_GRID, collar=DEFAULT_COLLAR):
    if spec.kind != mf.SPHERE:
        raise DomainError("great_circle_arc requires a sphere")
    return make_geodesic_arc(mf.point(spec, start), mf.point(spec, end), n, collar)


def make_latitude_circle(
    spec, colatitude, n=DEFAULT_GRID, collar=DEFAULT_COLLAR, fraction=1.0, phase=0.0
):
    """Latitude circle at the given colatitude (sphere), constant angular speed."""
    if spec.kind != mf.SPHERE:
        raise DomainError("latitude_circle requires a sphere")
    r = spec.radius
    phi = collar_ramp(np.arange(n + 1) / n, collar)
    ang = phase + 2 * np.pi * fraction * phi
    st, ct = np.sin(colatitude), np.cos(colatitude)
    pts = r * np.stack([st * np.cos(ang), st * np.sin(ang), ct * np.ones_like(ang)], axis=-1)
    return DiscretePath(spec, pts, collar)


def make_vertical_ray(spec, x, y_start, y_end, n=DEFAULT_GRID, collar=DEFAULT_COLLAR):
    """Vertical geodesic x = const in the half plane, constant hyperbolic speed."""
    if spec.kind != mf.HALF_PLANE:
        raise DomainError("vertical_ray requires the hyperbolic half plane")
    phi = collar_ramp(np.arange(n + 1) / n, collar)
    ys = y_start * (y_end / y_start) ** phi
    pts = np.stack([np.full_like(ys, float(x)), ys], axis=-1)
    return DiscretePath(spec, pts, collar)


GENERATORS = {
    "line": make_line,
    "great_circle_arc": make_great_circle_arc,
    "latitude_circle": make_latitude_circle,
    "vertical_ray": make_vertical_ray,
}


# ---------------------------------------------------------------------------
# field generators
# ---------------------------------------------------------------------------


def make_constant_field(gamma, components):
    """Same chart components at every sample (projected tangentially on the sphere)."""
    comps = np.tile(np.asarray(components, dtype=float), (gamma.n_segments + 1, 1))
    spec = gamma.manifold
    if spec.kind == mf.SPHERE:
        xhat = gamma.samples / spec.radius
        comps = comps - np.sum(comps * xhat, axis=-1, keepdims=True) * xhat
    return PathTangentField(gamma, comps)


def make_zero_field(gamma):
    return PathTangentField(gamma, np.zeros_like(gamma.samples))


def _direction_at(gamma, i):
    # tangent direction from the nearest distinct neighbor; forward first
    spec = gamma.manifold
    n = gamma.n_segments
    for j in range(i + 1, n + 1):
        if mf.dist(spec, gamma.samples[i], gamma.samples[j]) > 1e-12:
            u = mf.log(spec, gamma.samples[i], gamma.samples[j])
            return u / mf.norm(spec, gamma.samples[i], u)
    for j in range(i - 1, -1, -1):
        if mf.dist(spec, gamma.samples[i], gamma.samples[j]) > 1e-12:
            u = mf.log(spec, gamma.samples[i], gamma.samples[j])
            return -u / mf.norm(spec, gamma.samples[i], u)
    raise DomainError("cannot orient a normal field on a constant path")


def make_normal_field(gamma, scale=1.0):
    """Unit normal to the path, scaled: 90-degree rotation in 2d charts,
    cross product with the radial direction on the sphere."""
    spec = gamma.manifold
    n = gamma.n_segments
    comps = np.empty_like(gamma.samples)
    for i in range(n + 1):
        u = _direction_at(gamma, i)
        if spec.kind == mf.SPHERE:
            nvec = np.cross(gamma.samples[i] / spec.radius, u)
        elif spec.point_dim == 2:
            nvec = np.array([-u[1], u[0]])
        else:
            raise DomainError("normal field needs a 2d chart or the sphere")
        comps[i] = scale * nvec
    return PathTangentField(gamma, comps)


FIELD_GENERATORS = {
    "constant_in_chart": make_constant_field,
    "normal_to_path": make_normal_field,
    "zero": lambda gamma: make_zero_field(gamma),
}
