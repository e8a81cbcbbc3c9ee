"""Built-in Riemannian manifolds in coordinates.

Four model geometries are provided, each with closed-form geodesics so
every numerical routine has an analytic counterpart:

* ``euclidean(dim)`` -- flat R^d in the identity chart.
* ``sphere(radius)`` -- the round 2-sphere, stored as embedded 3-vectors
  of length ``radius`` (no chart singularities at the poles).
* ``hyperbolic_half_plane`` -- the Poincare upper half plane (x, y), y > 0,
  with metric (dx^2 + dy^2) / y^2.
* ``flat_torus(circumferences)`` -- R^d modulo a rectangular lattice.

All kernels are vectorized over leading axes; the public API wraps them in
small value types (ManifoldPoint, TangentVector).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

EUCLIDEAN = "euclidean"
SPHERE = "sphere"
HALF_PLANE = "hyperbolic_half_plane"
FLAT_TORUS = "flat_torus"

# chart-coordinate tolerance for "these two base points coincide"
COINCIDENCE_TOL = 1e-9


class GeometryError(Exception):
    """Base class for geometric domain errors."""


class DomainError(GeometryError):
    """Invalid input: wrong manifold, mismatched base points, bad coordinates."""


class IntegrationError(GeometryError):
    """A trajectory left the chart domain. Carries the last valid state."""

    def __init__(self, message, last_state=None):
        super().__init__(message)
        self.last_state = last_state


class NormalNeighborhoodError(GeometryError):
    """The target point lies at or beyond the injectivity radius."""


@dataclass(frozen=True)
class ManifoldSpec:
    """Identifies one of the built-in manifolds together with its parameters."""

    kind: str
    dim: int = 0
    radius: float = 0.0
    circumferences: tuple = ()

    def __post_init__(self):
        if self.kind == EUCLIDEAN:
            if self.dim < 1:
                raise DomainError("euclidean dim must be >= 1")
        elif self.kind == SPHERE:
            if not self.radius > 0:
                raise DomainError("sphere radius must be > 0")
        elif self.kind == HALF_PLANE:
            pass
        elif self.kind == FLAT_TORUS:
            if len(self.circumferences) < 1 or any(c <= 0 for c in self.circumferences):
                raise DomainError("torus circumferences must be positive")
        else:
            raise DomainError("unknown manifold kind: %r" % (self.kind,))

    @classmethod
    def euclidean(cls, dim):
        return cls(EUCLIDEAN, dim=dim)

    @classmethod
    def sphere(cls, radius=1.0):
        return cls(SPHERE, radius=float(radius))

    @classmethod
    def hyperbolic_half_plane(cls):
        return cls(HALF_PLANE)

    @classmethod
    def flat_torus(cls, circumferences):
        return cls(FLAT_TORUS, circumferences=tuple(float(c) for c in circumferences))

    @property
    def point_dim(self):
        """Number of chart coordinates per point."""
        if self.kind == EUCLIDEAN:
            return self.dim
        if self.kind == SPHERE:
            return 3
        if self.kind == HALF_PLANE:
            return 2
        return len(self.circumferences)

    def injectivity_radius(self):
        if self.kind == SPHERE:
            return math.pi * self.radius
        if self.kind == FLAT_TORUS:
            return 0.5 * min(self.circumferences)
        return math.inf

    def to_json(self):
        if self.kind == EUCLIDEAN:
            return {"kind": EUCLIDEAN, "dim": self.dim}
        if self.kind == SPHERE:
            return {"kind": SPHERE, "radius": self.radius}
        if self.kind == HALF_PLANE:
            return {"kind": HALF_PLANE}
        return {"kind": FLAT_TORUS, "circumferences": list(self.circumferences)}

    @classmethod
    def from_json(cls, obj):
        kind = obj["kind"]
        if kind == EUCLIDEAN:
            return cls.euclidean(int(obj["dim"]))
        if kind == SPHERE:
            return cls.sphere(float(obj["radius"]))
        if kind == HALF_PLANE:
            return cls.hyperbolic_half_plane()
        if kind == FLAT_TORUS:
            return cls.flat_torus(obj["circumferences"])
        raise DomainError("unknown manifold kind: %r" % (kind,))


@dataclass(frozen=True)
class ManifoldPoint:
    manifold: ManifoldSpec
    coords: np.ndarray = field(repr=True)

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=float)
        object.__setattr__(self, "coords", coords)
        spec = self.manifold
        if coords.shape != (spec.point_dim,):
            raise DomainError(
                "expected %d coordinates, got shape %r" % (spec.point_dim, coords.shape)
            )
        if spec.kind == SPHERE:
            nrm = np.linalg.norm(coords)
            if abs(nrm - spec.radius) > 1e-9 * spec.radius:
                raise DomainError("sphere point must have |coords| = radius")
        elif spec.kind == HALF_PLANE:
            if not coords[1] > 0:
                raise DomainError("half-plane point needs y > 0")
        elif spec.kind == FLAT_TORUS:
            object.__setattr__(self, "coords", wrap_coords(spec, coords))


@dataclass(frozen=True)
class TangentVector:
    base: ManifoldPoint
    components: np.ndarray

    def __post_init__(self):
        comps = np.asarray(self.components, dtype=float)
        object.__setattr__(self, "components", comps)
        spec = self.base.manifold
        if comps.shape != (spec.point_dim,):
            raise DomainError("tangent components have wrong shape %r" % (comps.shape,))
        if spec.kind == SPHERE:
            ip = float(np.dot(comps, self.base.coords))
            if abs(ip) > 1e-9 * (np.linalg.norm(comps) * spec.radius + 1e-300):
                raise DomainError("sphere tangent must be orthogonal to the base point")

    @property
    def manifold(self):
        return self.base.manifold


def point(spec, coords):
    return ManifoldPoint(spec, np.asarray(coords, dtype=float))


def tangent(p, components):
    return TangentVector(p, np.asarray(components, dtype=float))


# ---------------------------------------------------------------------------
# vectorized kernels: arrays of shape (..., d)
# ---------------------------------------------------------------------------


def wrap_coords(spec, x):
    """Reduce torus coordinates into [0, L) per axis; identity elsewhere."""
    if spec.kind != FLAT_TORUS:
        return x
    L = np.asarray(spec.circumferences)
    return np.mod(x, L)


def inner(spec, x, u, v):
    """Riemannian inner product g_x(u, v), vectorized."""
    dot = np.sum(u * v, axis=-1)
    if spec.kind == HALF_PLANE:
        return dot / x[..., 1] ** 2
    return dot


def norm(spec, x, u):
    return np.sqrt(np.maximum(inner(spec, x, u, u), 0.0))


def christoffel_array(spec, x):
    """Full Gamma^k_{ij} array at x, shape (..., d, d, d).

    For the embedded sphere these are the coefficients of the constraint
    form x^k delta_ij / r^2 (the coordinates are not an honest chart, so
    they are not the Levi-Civita symbols of any 3d metric).
    """
    d = spec.point_dim
    out = np.zeros(x.shape[:-1] + (d, d, d))
    if spec.kind == HALF_PLANE:
        y = x[..., 1]
        out[..., 0, 0, 1] = -1.0 / y
        out[..., 0, 1, 0] = -1.0 / y
        out[..., 1, 0, 0] = 1.0 / y
        out[..., 1, 1, 1] = -1.0 / y
    elif spec.kind == SPHERE:
        eye = np.eye(3)
        out[...] = x[..., :, None, None] * eye / spec.radius**2
    return out


def gamma_quad(spec, x, a, b):
    """The bilinear form Gamma^k_{ij} a^i b^j, vectorized."""
    if spec.kind == HALF_PLANE:
        y = x[..., 1]
        out = np.empty_like(a)
        out[..., 0] = -(a[..., 0] * b[..., 1] + a[..., 1] * b[..., 0]) / y
        out[..., 1] = (a[..., 0] * b[..., 0] - a[..., 1] * b[..., 1]) / y
        return out
    if spec.kind == SPHERE:
        return x * (np.sum(a * b, axis=-1) / spec.radius**2)[..., None]
    return np.zeros_like(a)


def project_state(spec, x, v):
    """Constraint/chart cleanup after an integration step.

    Sphere: renormalize the point and remove the radial velocity component.
    Torus: wrap coordinates. Half-plane: raise if the chart was left.
    """
    if spec.kind == SPHERE:
        nrm = np.linalg.norm(x, axis=-1, keepdims=True)
        x = x * (spec.radius / nrm)
        xhat = x / spec.radius
        v = v - np.sum(v * xhat, axis=-1, keepdims=True) * xhat
    elif spec.kind == FLAT_TORUS:
        x = wrap_coords(spec, x)
    elif spec.kind == HALF_PLANE:
        if np.any(x[..., 1] <= 0):
            raise IntegrationError("trajectory left the upper half plane")
    return x, v


def _geo_rhs(spec, x, v):
    return v, -gamma_quad(spec, x, v, v)


def integrate_batch(spec, x0, v0, s_end, steps):
    """Fixed-step RK4 for the geodesic equation, vectorized over leading axes.

    Returns (xs, vs) with shape (steps + 1,) + x0.shape, including both
    endpoints. Raises IntegrationError (with the last valid state attached)
    if the trajectory leaves the chart domain.
    """
    if steps < 1:
        raise DomainError("steps must be >= 1")
    x = np.array(x0, dtype=float)
    v = np.array(v0, dtype=float)
    h = s_end / steps
    xs = np.empty((steps + 1,) + x.shape)
    vs = np.empty_like(xs)
    xs[0], vs[0] = x, v
    for i in range(steps):
        k1x, k1v = _geo_rhs(spec, x, v)
        k2x, k2v = _geo_rhs(spec, x + 0.5 * h * k1x, v + 0.5 * h * k1v)
        k3x, k3v = _geo_rhs(spec, x + 0.5 * h * k2x, v + 0.5 * h * k2v)
        k4x, k4v = _geo_rhs(spec, x + h * k3x, v + h * k3v)
        x = x + (h / 6.0) * (k1x + 2 * k2x + 2 * k3x + k4x)
        v = v + (h / 6.0) * (k1v + 2 * k2v + 2 * k3v + k4v)
        try:
            x, v = project_state(spec, x, v)
        except IntegrationError as err:
            err.last_state = (xs[i].copy(), vs[i].copy())
            raise
        xs[i + 1], vs[i + 1] = x, v
    return xs, vs


# -- hyperboloid model helpers for the half plane ---------------------------
#
# (x, y) maps to P = ((x^2+y^2+1)/2y, x/y, (x^2+y^2-1)/2y) on the hyperboloid
# <P,P> = -1 in Minkowski signature (-,+,+); geodesics there are cosh/sinh
# combinations, which avoids the semicircle-center degeneracy of the chart.


def _uhp_to_hyp(x):
    a, y = x[..., 0], x[..., 1]
    q = a * a + y * y
    return np.stack([(q + 1) / (2 * y), a / y, (q - 1) / (2 * y)], axis=-1)


def _uhp_vec_to_hyp(x, v):
    a, y = x[..., 0], x[..., 1]
    vx, vy = v[..., 0], v[..., 1]
    dPdx = np.stack([a / y, 1 / y, a / y], axis=-1)
    dPdy = np.stack(
        [(y * y - a * a - 1) / (2 * y * y), -a / (y * y), (y * y - a * a + 1) / (2 * y * y)],
        axis=-1,
    )
    return dPdx * vx[..., None] + dPdy * vy[..., None]


def _hyp_to_uhp(P):
    t = P[..., 0] - P[..., 2]
    return np.stack([P[..., 1] / t, 1.0 / t], axis=-1)


def _hyp_vec_to_uhp(P, U):
    t = P[..., 0] - P[..., 2]
    dt = U[..., 0] - U[..., 2]
    vx = U[..., 1] / t - P[..., 1] * dt / (t * t)
    vy = -dt / (t * t)
    return np.stack([vx, vy], axis=-1)


def _mink(A, B):
    return -A[..., 0] * B[..., 0] + A[..., 1] * B[..., 1] + A[..., 2] * B[..., 2]


def flow(spec, x, v, s):
    """Closed-form geodesic flow: point and velocity at arc parameter s.

    Vectorized over leading axes of x, v; s may be a scalar or an array
    broadcastable against those leading axes.
    """
    s = np.asarray(s, dtype=float)[..., None]
    if spec.kind == EUCLIDEAN:
        pt = x + s * v
        return pt, np.broadcast_to(v, pt.shape).copy()
    if spec.kind == FLAT_TORUS:
        pt = wrap_coords(spec, x + s * v)
        return pt, np.broadcast_to(v, pt.shape).copy()
    if spec.kind == SPHERE:
        r = spec.radius
        speed = np.linalg.norm(v, axis=-1, keepdims=True)
        safe = np.where(speed > 0, speed, 1.0)
        vdir = v / safe
        theta = s * speed / r
        pt = np.cos(theta) * x + np.sin(theta) * r * vdir
        vel = np.cos(theta) * v - np.sin(theta) * speed * x / r
        pt = np.where(speed > 0, pt, x + 0 * theta)
        vel = np.where(speed > 0, vel, v + 0 * theta)
        return pt, vel
    # half plane via the hyperboloid model
    P = _uhp_to_hyp(x)
    U = _uhp_vec_to_hyp(x, v)
    sigma = np.sqrt(np.maximum(_mink(U, U), 0.0))[..., None]
    safe = np.where(sigma > 0, sigma, 1.0)
    Uh = U / safe
    Ph = np.cosh(s * sigma) * P + np.sinh(s * sigma) * Uh
    Vh = sigma * (np.sinh(s * sigma) * P + np.cosh(s * sigma) * Uh)
    pt = np.where(sigma > 0, _hyp_to_uhp(Ph), x + 0 * s)
    vel = np.where(sigma > 0, _hyp_vec_to_uhp(Ph, Vh), v + 0 * s)
    return pt, vel


def dist(spec, x, y):
    """Riemannian distance, vectorized."""
    if spec.kind == EUCLIDEAN:
        return np.linalg.norm(y - x, axis=-1)
    if spec.kind == FLAT_TORUS:
        L = np.asarray(spec.circumferences)
        d = np.mod(y - x + L / 2, L) - L / 2
        return np.linalg.norm(d, axis=-1)
    if spec.kind == SPHERE:
        r = spec.radius
        c = np.sum(x * y, axis=-1) / r**2
        s = np.linalg.norm(np.cross(x, y), axis=-1) / r**2
        return r * np.arctan2(s, c)
    # half plane: 2 asinh(|dq| / (2 sqrt(y1 y2))), stable for close points
    dq = np.linalg.norm(y - x, axis=-1)
    return 2.0 * np.arcsinh(dq / (2.0 * np.sqrt(x[..., 1] * y[..., 1])))


def log(spec, x, y):
    """Initial velocity of the unit-time geodesic from x to y, vectorized.

    Requires dist(x, y) < injectivity radius; the sphere's antipodal case is
    resolved arbitrarily and must be rejected by the caller.
    """
    if spec.kind == EUCLIDEAN:
        return y - x
    if spec.kind == FLAT_TORUS:
        L = np.asarray(spec.circumferences)
        return np.mod(y - x + L / 2, L) - L / 2
    if spec.kind == SPHERE:
        r = spec.radius
        ang = dist(spec, x, y)[..., None] / r
        w = y - np.sum(x * y, axis=-1)[..., None] * x / r**2
        wn = np.linalg.norm(w, axis=-1, keepdims=True)
        safe = np.where(wn > 0, wn, 1.0)
        return np.where(wn > 0, ang * r * w / safe, np.zeros_like(x))
    P = _uhp_to_hyp(x)
    Q = _uhp_to_hyp(y)
    alpha = -_mink(P, Q)
    d = dist(spec, x, y)
    w = Q - alpha[..., None] * P
    sinh_d = np.sinh(d)
    scale = np.where(sinh_d > 0, d / np.where(sinh_d > 0, sinh_d, 1.0), 0.0)
    return _hyp_vec_to_uhp(P, w * scale[..., None])


def transport_along(spec, points, X0, substeps=8):
    """Parallel transport X0 along a sampled curve, RK4 per segment.

    ``points`` has shape (m+1, ..., d); transport runs along axis 0. Between
    consecutive samples the position follows the closed-form connecting
    geodesic (degenerate zero-length segments transport by identity).
    Returns the transported field at every sample, shape like ``points``.
    """
    points = np.asarray(points, dtype=float)
    X = np.array(X0, dtype=float)
    out = np.empty_like(points)
    out[0] = X
    h = 1.0 / substeps
    for i in range(points.shape[0] - 1):
        p0, p1 = points[i], points[i + 1]
        seg = dist(spec, p0, p1)
        if np.all(seg <= 1e-15):
            out[i + 1] = X
            continue
        u = log(spec, p0, p1)

        def rhs(tau, Xc):
            xc, wc = flow(spec, p0, u, tau)
            return -gamma_quad(spec, xc, wc, Xc)

        for k in range(substeps):
            t0 = k * h
            k1 = rhs(t0, X)
            k2 = rhs(t0 + 0.5 * h, X + 0.5 * h * k1)
            k3 = rhs(t0 + 0.5 * h, X + 0.5 * h * k2)
            k4 = rhs(t0 + h, X + h * k3)
            X = X + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if spec.kind == SPHERE:
            xhat = p1 / spec.radius
            X = X - np.sum(X * xhat, axis=-1, keepdims=True) * xhat
        out[i + 1] = X
    return out


def tangent_basis(spec, x):
    """Orthonormal (w.r.t. g) basis of the tangent space at x, rows = vectors."""
    d = spec.point_dim
    if spec.kind == SPHERE:
        xhat = x / spec.radius
        a = np.zeros(3)
        a[np.argmin(np.abs(xhat))] = 1.0
        e1 = a - np.dot(a, xhat) * xhat
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(xhat, e1)
        return np.stack([e1, e2])
    if spec.kind == HALF_PLANE:
        return np.eye(2) * x[1]
    return np.eye(d)


# ---------------------------------------------------------------------------
# public wrappers on the value types
# ---------------------------------------------------------------------------


def _check_same_base(p, *vectors):
    for v in vectors:
        if v.base.manifold != p.manifold:
            raise DomainError("tangent vector lives on a different manifold")
        if np.max(np.abs(v.base.coords - p.coords)) > COINCIDENCE_TOL:
            raise DomainError("tangent vector based at a different point")


def _check_same_manifold(p, q):
    if p.manifold != q.manifold:
        raise DomainError("points live on different manifolds")


def metric_eval(p, u, v):
    """g_p(u, v) for tangent vectors u, v based at p."""
    _check_same_base(p, u, v)
    return float(inner(p.manifold, p.coords, u.components, v.components))


def christoffel(p):
    """Gamma^k_{ij} at p as an array indexed [k, i, j]."""
    return christoffel_array(p.manifold, p.coords)


def geodesic_integrate(p, v, s_end, steps):
    """RK4 geodesic trajectory from (p, v); all steps, endpoints included."""
    _check_same_base(p, v)
    spec = p.manifold
    xs, vs = integrate_batch(spec, p.coords, v.components, s_end, steps)
    out = []
    for x, w in zip(xs, vs):
        pt = ManifoldPoint(spec, x)
        out.append((pt, TangentVector(pt, w)))
    return out


def geodesic_flow(p, v, s):
    """Closed-form geodesic state at arc parameter s."""
    _check_same_base(p, v)
    x, w = flow(p.manifold, p.coords, v.components, s)
    pt = ManifoldPoint(p.manifold, x)
    return pt, TangentVector(pt, w)


def exp_map(p, v):
    """Endpoint of the geodesic seeded by (p, v) at parameter 1 (closed form)."""
    return geodesic_flow(p, v, 1.0)[0]


def distance(p, q):
    _check_same_manifold(p, q)
    return float(dist(p.manifold, p.coords, q.coords))


def log_map(p, q):
    """Closed-form Riemannian logarithm; requires q in p's normal neighborhood."""
    _check_same_manifold(p, q)
    spec = p.manifold
    d = distance(p, q)
    if d >= spec.injectivity_radius():
        raise NormalNeighborhoodError(
            "distance %.6g is not below the injectivity radius %.6g"
            % (d, spec.injectivity_radius())
        )
    return TangentVector(p, log(spec, p.coords, q.coords))


def log_map_shooting(p, q, max_iter=50, tol=1e-10, steps=200):
    """Riemannian logarithm via shooting: Newton on the RK4 endpoint residual.

    Independent of the closed forms (the endpoint is integrated, not
    evaluated); used as a boundary-value regression oracle.
    """
    _check_same_manifold(p, q)
    spec = p.manifold
    basis = tangent_basis(spec, p.coords)
    a = _chart_components(spec, p.coords, log(spec, p.coords, q.coords), basis)

    def endpoint(coeffs):
        v0 = coeffs @ basis
        xs, _ = integrate_batch(spec, p.coords, v0, 1.0, steps)
        return xs[-1]

    target = q.coords
    for _ in range(max_iter):
        r = _chart_diff(spec, endpoint(a), target)
        if np.linalg.norm(r) < tol:
            break
        J = np.empty((len(r), len(a)))
        h = 1e-6
        for j in range(len(a)):
            ap = a.copy()
            am = a.copy()
            ap[j] += h
            am[j] -= h
            J[:, j] = _chart_diff(spec, endpoint(ap), endpoint(am)) / (2 * h)
        delta, *_ = np.linalg.lstsq(J, -r, rcond=None)
        a = a + delta
    return TangentVector(p, a @ basis)


def _chart_components(spec, x, v, basis):
    # coefficients of v in the given g-orthonormal basis
    return np.array([inner(spec, x, v, b) for b in basis])


def _chart_diff(spec, a, b):
    if spec.kind == FLAT_TORUS:
        L = np.asarray(spec.circumferences)
        return np.mod(a - b + L / 2, L) - L / 2
    return a - b


def parallel_transport(curve, v0, substeps=8):
    """Parallel transport of v0 along an (s, point) sample sequence.

    Transport is parametrization independent; the s values only fix the
    ordering and are validated to be nondecreasing. Coincident consecutive
    samples transport by identity.
    """
    if not curve:
        raise DomainError("empty curve")
    svals = [s for s, _ in curve]
    if any(b < a for a, b in zip(svals, svals[1:])):
        raise DomainError("curve samples must be ordered in s")
    first = curve[0][1]
    _check_same_base(first, v0)
    spec = first.manifold
    pts = np.stack([pt.coords for _, pt in curve])
    fields = transport_along(spec, pts, v0.components, substeps=substeps)
    return [
        TangentVector(ManifoldPoint(spec, x), X) for (x, X) in zip(pts, fields)
    ]
