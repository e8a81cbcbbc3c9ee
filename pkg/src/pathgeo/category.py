"""Worldsheet morphisms and their two compositions.

Objects are (point, tangent vector, time) triples; 1-morphisms carry a
path with a tangent field and a time label; 2-morphisms are geodesic
worldsheet segments over an interval, determined by their seed. Vertical
composition extends a geodesic segment in time; horizontal composition
joins the seeds end to end. The composition of 1-morphisms keeps the
appended-sample representative (strictly associative on the nose);
equality of 1-morphisms is always decided through canonical forms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backtrack as bt
from . import manifold as mf
from . import path as pth
from . import pathspace as ps
from .manifold import DomainError
from .path import DiscretePath, PathTangentField
from .pathspace import Worldsheet

SEED_TOL = 1e-6  # "same seed" tolerance for vertical composability
JOIN_TOL = 1e-9  # endpoint / field-endpoint tolerance for 1-composition


class CompositionError(DomainError):
    """Morphisms do not satisfy the composability conditions."""


@dataclass(frozen=True)
class GeodObject:
    point: mf.ManifoldPoint
    vector: mf.TangentVector
    time: float

    def __post_init__(self):
        if np.max(np.abs(self.vector.base.coords - self.point.coords)) > 1e-9:
            raise DomainError("object vector must be based at the object point")


@dataclass(frozen=True)
class GeodMorphism1:
    path: DiscretePath
    field: PathTangentField
    time: float

    def __post_init__(self):
        if self.field.base is not self.path and not np.array_equal(
            self.field.base.samples, self.path.samples
        ):
            raise DomainError("field must be based on the morphism path")


@dataclass(frozen=True)
class GeodMorphism2:
    seed: GeodMorphism1
    sheet: Worldsheet

    @property
    def interval(self):
        return self.sheet.interval


def morphism1(path, field, time):
    return GeodMorphism1(path, field, float(time))


def canonical_morphism1(m, tol=bt.DETECT_TOL):
    """The canonical-pair representative used for equality checks."""
    fld = bt.field_canonical_form(m.field, tol)
    return GeodMorphism1(fld.base, fld, m.time)


def identity1(obj, n=pth.DEFAULT_GRID):
    """The constant-path morphism at an object."""
    base = pth.make_constant_path(obj.point, n)
    comps = np.tile(obj.vector.components, (n + 1, 1))
    return GeodMorphism1(base, PathTangentField(base, comps), obj.time)


def src1(m):
    return GeodObject(m.path.start(), m.field.vector(0), m.time)


def tgt1(m):
    return GeodObject(m.path.end(), m.field.vector(-1), m.time)


def compose1(g, f):
    """Composition g after f: append paths and fields, keep the time label.

    Requires tgt1(f) = src1(g): matching endpoint, matching field value
    there, identical times (times are labels and compared exactly).
    """
    if f.time != g.time:
        raise CompositionError("time labels differ: %r vs %r" % (f.time, g.time))
    spec = f.path.manifold
    gap = float(mf.dist(spec, f.path.samples[-1], g.path.samples[0]))
    if gap > JOIN_TOL:
        raise CompositionError("path endpoints do not meet (gap %.3g)" % gap)
    fgap = float(np.max(np.abs(f.field.components[-1] - g.field.components[0])))
    if fgap > JOIN_TOL:
        raise CompositionError("field endpoints do not meet (gap %.3g)" % fgap)
    joined = pth.concatenate(f.path, g.path)
    comps = np.concatenate([f.field.components, g.field.components[1:]])
    return GeodMorphism1(joined, PathTangentField(joined, comps), f.time)


def morphism1_equal(m1, m2, tol=1e-6):
    """Equality in the quotient: canonical forms built on a common grid
    agree node-wise and the time labels match exactly."""
    if m1.time != m2.time:
        return False
    n = max(m1.path.n_segments, m2.path.n_segments)
    f1 = bt.field_canonical_form(m1.field, bt.DETECT_TOL, n)
    f2 = bt.field_canonical_form(m2.field, bt.DETECT_TOL, n)
    spec = m1.path.manifold
    if np.max(mf.dist(spec, f1.base.samples, f2.base.samples)) > tol:
        return False
    return bool(np.max(np.abs(f1.components - f2.components)) <= tol)


# ---------------------------------------------------------------------------
# 2-morphisms
# ---------------------------------------------------------------------------


def morphism2(seed, interval, S=16, method="closed_form", steps_per_unit=1000):
    """Geodesic worldsheet segment over the interval, seeded at s = 0."""
    a, b = float(interval[0]), float(interval[1])
    if a > b:
        raise DomainError("interval must satisfy a <= b")
    sheet = ps.pathspace_geodesic(
        seed.path, seed.field, (a, b), S if b > a else 0,
        method=method, steps_per_unit=steps_per_unit,
    )
    return GeodMorphism2(seed, sheet)


def identity2(seed):
    """The degenerate segment over [a, a]; neutral for vertical composition."""
    return morphism2(seed, (seed.time, seed.time))


def _slice_morphism(F, j, time):
    sheet = F.sheet
    return GeodMorphism1(sheet.slice_path(j), sheet.slice_field(j), float(time))


def src2(F):
    a, _ = F.interval
    return _slice_morphism(F, 0, a)


def tgt2(F):
    _, b = F.interval
    return _slice_morphism(F, -1, b)


def _morphism1_gap(m1, m2):
    if m1.path.samples.shape != m2.path.samples.shape:
        raise CompositionError("morphism grids differ")
    spec = m1.path.manifold
    dpath = float(np.max(mf.dist(spec, m1.path.samples, m2.path.samples)))
    dfield = float(np.max(np.abs(m1.field.components - m2.field.components)))
    return max(dpath, dfield)


def compose2_vertical(G, F, tol=SEED_TOL):
    """Extension in time: F over [a,b] followed by G over [b,c].

    Composability (src2(G) = tgt2(F)) forces the two segments to belong to
    one geodesic, so the composite is re-derived from F's seed over [a,c];
    its restrictions reproduce F and G node for node.
    """
    a, b = F.interval
    b2, c = G.interval
    if abs(b2 - b) > 1e-12:
        raise CompositionError("intervals do not abut: [%g,%g] then [%g,%g]" % (a, b, b2, c))
    gap = _morphism1_gap(src2(G), tgt2(F))
    if gap > tol:
        raise CompositionError("segments are not one geodesic (seed gap %.3g)" % gap)
    s_nodes = np.concatenate([F.sheet.s_nodes, G.sheet.s_nodes[1:]])
    seed = F.seed
    sheet = ps.build_sheet(
        seed.path.manifold,
        seed.path.samples,
        seed.field.components,
        s_nodes,
        collar=seed.path.collar,
    )
    return GeodMorphism2(seed, sheet)


def compose2_horizontal(F, G):
    """Sideways join: F over gamma1 first, then G over gamma2, same interval.

    The composite is the geodesic segment seeded by the composed
    1-morphism; its boundary fibers agree with the shared fiber of F and G.
    """
    if abs(F.interval[0] - G.interval[0]) > 1e-12 or abs(F.interval[1] - G.interval[1]) > 1e-12:
        raise CompositionError("horizontal composition needs equal intervals")
    seed = compose1(G.seed, F.seed)  # F's path first, then G's
    sheet = ps.build_sheet(
        seed.path.manifold,
        seed.path.samples,
        seed.field.components,
        F.sheet.s_nodes,
        collar=seed.path.collar,
    )
    return GeodMorphism2(seed, sheet)


def sheet_discrepancy(A, B):
    """Max node-wise gap between two sheets (points and velocities).

    Returns (value, (j, i)) with the worst s/t node indices.
    """
    sa, sb = A.sheet, B.sheet
    if sa.points.shape != sb.points.shape:
        raise CompositionError("sheets live on different grids")
    spec = sa.manifold
    dp = mf.dist(spec, sa.points, sb.points)
    dv = np.max(np.abs(sa.velocities - sb.velocities), axis=-1)
    gaps = np.maximum(dp, dv)
    j, i = np.unravel_index(int(np.argmax(gaps)), gaps.shape)
    return float(gaps[j, i]), (int(j), int(i))


@dataclass(frozen=True)
class ExchangeReport:
    passed: bool
    max_discrepancy: float
    failing_node: tuple | None
    error: str | None = None

    def to_json(self):
        return {
            "passed": self.passed,
            "max_discrepancy": self.max_discrepancy,
            "failing_node": list(self.failing_node) if self.failing_node else None,
            "error": self.error,
        }


def check_exchange(F1, G1, F2, G2, tol=1e-9):
    """Both evaluation orders of (G1*F1) x (G2*F2); reports the worst node.

    F1, F2 live over [a,b] and G1, G2 over [b,c]; 1 and 2 index the two
    horizontally composable seeds. Composability failures are reported,
    not raised.
    """
    try:
        lhs = compose2_horizontal(compose2_vertical(G1, F1), compose2_vertical(G2, F2))
        rhs = compose2_vertical(compose2_horizontal(G1, G2), compose2_horizontal(F1, F2))
        gap, node = sheet_discrepancy(lhs, rhs)
    except CompositionError as err:
        return ExchangeReport(False, float("nan"), None, str(err))
    return ExchangeReport(gap <= tol, gap, node)
