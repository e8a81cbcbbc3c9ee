"""Geometry of the path space: L2 metric, worldsheets, distance.

A path of paths Gamma : [a,b] -> PM is a *worldsheet*: an (S+1) x (N+1)
grid of points with the fiber velocity dGamma/ds stored at every node.
Gamma is a path-space geodesic exactly when each transverse curve
Gamma_t (fixed t, varying s) is a geodesic on M.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import manifold as mf
from . import path as pth
from .manifold import DomainError, NormalNeighborhoodError
from .path import DiscretePath, PathTangentField


@dataclass(frozen=True)
class Worldsheet:
    manifold: mf.ManifoldSpec
    s_nodes: np.ndarray  # (S+1,)
    points: np.ndarray  # (S+1, N+1, d)
    velocities: np.ndarray  # (S+1, N+1, d)
    collar: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "s_nodes", np.asarray(self.s_nodes, dtype=float))
        object.__setattr__(self, "points", np.asarray(self.points, dtype=float))
        object.__setattr__(self, "velocities", np.asarray(self.velocities, dtype=float))
        if self.points.shape != self.velocities.shape:
            raise DomainError("points and velocities must share a grid")
        if self.points.shape[0] != self.s_nodes.shape[0]:
            raise DomainError("s grid does not match the sheet")

    @property
    def interval(self):
        return float(self.s_nodes[0]), float(self.s_nodes[-1])

    @property
    def n_s_segments(self):
        return len(self.s_nodes) - 1

    @property
    def n_t_segments(self):
        return self.points.shape[1] - 1

    def slice_path(self, j):
        """Longitudinal slice Gamma^{s_j} as a DiscretePath."""
        return DiscretePath(self.manifold, self.points[j].copy(), self.collar)

    def slice_field(self, j):
        """Fiber velocity at s_j as a tangent field on the slice."""
        return PathTangentField(self.slice_path(j), self.velocities[j].copy())

    def to_json(self):
        return {
            "manifold": self.manifold.to_json(),
            "s_nodes": self.s_nodes.tolist(),
            "points": self.points.tolist(),
            "velocities": self.velocities.tolist(),
            "collar": self.collar,
        }

    @classmethod
    def from_json(cls, obj):
        return cls(
            mf.ManifoldSpec.from_json(obj["manifold"]),
            np.asarray(obj["s_nodes"], dtype=float),
            np.asarray(obj["points"], dtype=float),
            np.asarray(obj["velocities"], dtype=float),
            float(obj.get("collar", 0.0)),
        )


def _check_field_on(gamma, field):
    if field.base.manifold != gamma.manifold:
        raise DomainError("field lives on a different manifold")
    if field.base.samples.shape != gamma.samples.shape:
        raise DomainError("field grid does not match the path")
    if np.max(mf.dist(gamma.manifold, field.base.samples, gamma.samples)) > 1e-9:
        raise DomainError("field is based on a different path")


def l2_metric(gamma, field1, field2):
    """L2 inner product of two tangent fields along gamma (trapezoid rule)."""
    _check_field_on(gamma, field1)
    _check_field_on(gamma, field2)
    g = mf.inner(gamma.manifold, gamma.samples, field1.components, field2.components)
    return pth._trapezoid(g, 1.0 / gamma.n_segments)


# ---------------------------------------------------------------------------
# worldsheet construction
# ---------------------------------------------------------------------------


def build_sheet(
    spec,
    samples,
    vcomps,
    s_nodes,
    collar=0.0,
    method="closed_form",
    steps_per_unit=1000,
):
    """Geodesic worldsheet from raw seed arrays; fibers evolve independently.

    method "closed_form" evaluates the analytic geodesic flow per node;
    "rk4" integrates node to node with the fixed-step integrator. Nodes at
    s = 0 reproduce the seed bitwise in both cases.
    """
    s_nodes = np.asarray(s_nodes, dtype=float)
    samples = np.asarray(samples, dtype=float)
    vcomps = np.asarray(vcomps, dtype=float)
    shape = (len(s_nodes),) + samples.shape
    points = np.empty(shape)
    vels = np.empty(shape)
    if method == "closed_form":
        pts, vv = mf.flow(spec, samples[None, :, :], vcomps[None, :, :], s_nodes[:, None])
        points[:], vels[:] = pts, vv
    elif method == "rk4":
        for sign in (1, -1):
            if sign > 0:
                targets = [(j, s) for j, s in enumerate(s_nodes) if s >= 0]
            else:
                targets = [(j, s) for j, s in enumerate(s_nodes) if s < 0][::-1]
            x, v = samples.copy(), vcomps.copy()
            cur = 0.0
            for j, s in targets:
                if s != cur:
                    steps = max(1, int(np.ceil(steps_per_unit * abs(s - cur))))
                    try:
                        xs, vs = mf.integrate_batch(spec, x, v, s - cur, steps)
                    except mf.IntegrationError as err:
                        raise mf.IntegrationError(
                            "fiber integration failed between s=%g and s=%g" % (cur, s),
                            err.last_state,
                        )
                    x, v = xs[-1], vs[-1]
                    cur = s
                points[j], vels[j] = x, v
    else:
        raise DomainError("unknown worldsheet method %r" % (method,))
    at_zero = s_nodes == 0.0
    points[at_zero] = samples
    vels[at_zero] = vcomps
    return Worldsheet(spec, s_nodes, points, vels, collar)


def pathspace_geodesic(
    gamma, field, interval, S, method="closed_form", steps_per_unit=1000
):
    """The unique path-space geodesic with Gamma(0) = gamma, dGamma/ds(0) = field,
    sampled on S+1 uniform nodes over the interval."""
    _check_field_on(gamma, field)
    a, b = float(interval[0]), float(interval[1])
    if a > b:
        raise DomainError("interval must satisfy a <= b")
    s_nodes = np.linspace(a, b, S + 1) if b > a else np.asarray([a])
    return build_sheet(
        gamma.manifold,
        gamma.samples,
        field.components,
        s_nodes,
        collar=gamma.collar,
        method=method,
        steps_per_unit=steps_per_unit,
    )


def pathspace_exp(gamma, field, method="closed_form", steps_per_unit=1000):
    """Time-1 point of the path-space geodesic: the pointwise exponential."""
    sheet = pathspace_geodesic(
        gamma, field, (0.0, 1.0), 1, method=method, steps_per_unit=steps_per_unit
    )
    return sheet.slice_path(-1)


def pathspace_transport(sheet, field, substeps=8):
    """Parallel transport of a tangent field along the sheet, fiber by fiber.

    ``field`` must be based on the first longitudinal slice; returns one
    PathTangentField per s node. Preserves the L2 norm up to solver error.
    """
    base = sheet.slice_path(0)
    _check_field_on(base, field)
    out = mf.transport_along(
        sheet.manifold, sheet.points, field.components, substeps=substeps
    )
    fields = []
    for j in range(len(sheet.s_nodes)):
        fields.append(PathTangentField(sheet.slice_path(j), out[j]))
    return fields


# ---------------------------------------------------------------------------
# energy, length, distance
# ---------------------------------------------------------------------------


def _t_trapezoid_weights(n):
    w = np.ones(n + 1)
    w[0] = w[-1] = 0.5
    return w


def transverse_energies(sheet):
    """Energy of each transverse curve Gamma_t, from the stored velocities."""
    spec = sheet.manifold
    g = mf.inner(spec, sheet.points, sheet.velocities, sheet.velocities)
    S = sheet.n_s_segments
    if S == 0:
        return np.zeros(sheet.n_t_segments + 1)
    a, b = sheet.interval
    ws = _t_trapezoid_weights(S) * ((b - a) / S)
    return 0.5 * np.sum(ws[:, None] * g, axis=0)


def sheet_energy(sheet):
    """Path-space Dirichlet energy of the sheet (both quadratures trapezoid)."""
    n = sheet.n_t_segments
    wt = _t_trapezoid_weights(n) / n
    return float(np.sum(wt * transverse_energies(sheet)))


def sheet_length(sheet):
    """Length of a geodesic sheet via the Cauchy-Schwarz equality L^2 = 2|b-a|E."""
    a, b = sheet.interval
    return float(np.sqrt(max(2.0 * (b - a) * sheet_energy(sheet), 0.0)))


def _pointwise_distances(gamma1, gamma2):
    if gamma1.manifold != gamma2.manifold:
        raise DomainError("paths live on different manifolds")
    if gamma1.samples.shape != gamma2.samples.shape:
        raise DomainError("paths must share a grid")
    return mf.dist(gamma1.manifold, gamma1.samples, gamma2.samples)


def in_normal_neighborhood(gamma0, gamma):
    """True iff every fiber pair sits strictly inside the injectivity radius."""
    d = _pointwise_distances(gamma0, gamma)
    return bool(np.max(d) < gamma0.manifold.injectivity_radius())


def _require_normal(gamma1, gamma2):
    d = _pointwise_distances(gamma1, gamma2)
    inj = gamma1.manifold.injectivity_radius()
    if not np.max(d) < inj:
        worst = int(np.argmax(d))
        raise NormalNeighborhoodError(
            "fibers leave the normal neighborhood; worst at t=%g (distance %.6g >= %.6g)"
            % (worst / gamma1.n_segments, float(d[worst]), inj)
        )
    return d


def pathspace_distance(gamma1, gamma2):
    """L2 distance: sqrt of the t-integral of squared pointwise distances."""
    d = _require_normal(gamma1, gamma2)
    return float(np.sqrt(pth._trapezoid(d * d, 1.0 / gamma1.n_segments)))


def connecting_geodesic(gamma1, gamma2, S=64):
    """The unique geodesic sheet over [0,1] joining two paths in a common
    normal neighborhood; fibers are the pointwise minimizing geodesics."""
    _require_normal(gamma1, gamma2)
    spec = gamma1.manifold
    vcomps = mf.log(spec, gamma1.samples, gamma2.samples)
    collar = 0.0
    if gamma1.collar > 0 and gamma2.collar > 0:
        collar = min(gamma1.collar, gamma2.collar)
    return build_sheet(spec, gamma1.samples, vcomps, np.linspace(0, 1, S + 1), collar)


# ---------------------------------------------------------------------------
# diagnostics and raw-grid sheets
# ---------------------------------------------------------------------------


def sheet_from_grid(spec, s_nodes, points, collar=0.0):
    """Worldsheet from a raw point grid; velocities by finite differences in s.

    For perturbed (non-geodesic) sheets used in minimization experiments.
    """
    s_nodes = np.asarray(s_nodes, dtype=float)
    points = np.asarray(points, dtype=float)
    S = len(s_nodes) - 1
    if S < 1:
        raise DomainError("need at least two s nodes")
    ds = (s_nodes[-1] - s_nodes[0]) / S
    vels = np.empty_like(points)
    fwd = mf.log(spec, points[:-1], points[1:])
    bwd = mf.log(spec, points[1:], points[:-1])
    vels[0] = fwd[0] / ds
    vels[-1] = -bwd[-1] / ds
    vels[1:-1] = (fwd[1:] - bwd[:-1]) / (2 * ds)
    return Worldsheet(spec, s_nodes, points, vels, collar)


def transverse_residual(sheet):
    """Max norm of the discrete geodesic-equation residual over all
    transverse curves; zero for exact geodesic sheets up to step error."""
    S = sheet.n_s_segments
    if S < 2:
        return 0.0
    spec = sheet.manifold
    a, b = sheet.interval
    ds = (b - a) / S
    p = sheet.points
    if spec.kind == mf.FLAT_TORUS:
        L = np.asarray(spec.circumferences)
        d2 = np.mod(p[2:] - p[1:-1] + L / 2, L) - L / 2
        d1 = np.mod(p[:-2] - p[1:-1] + L / 2, L) - L / 2
        acc = (d2 + d1) / ds**2
    else:
        acc = (p[2:] - 2 * p[1:-1] + p[:-2]) / ds**2
    v = sheet.velocities[1:-1]
    res = acc + mf.gamma_quad(spec, p[1:-1], v, v)
    if spec.kind == mf.SPHERE:
        # remove the radial part: the second difference picks up the
        # constraint curvature that the projected velocity already absorbs
        xhat = p[1:-1] / spec.radius
        res = res - np.sum(res * xhat, axis=-1, keepdims=True) * xhat
    return float(np.max(np.abs(res)))
