"""Property suites: randomized invariant checks with reproducible reports.

Each suite runs a fixed list of properties; every property draws its own
random cases from a seed derived deterministically from the run seed, so
reports are byte-identical for identical inputs regardless of execution
order. Failures are report content, never exceptions.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import backtrack as bt
from . import category as cat
from . import manifold as mf
from . import path as pth
from . import pathspace as ps

DEFAULT_SEED = 42

SUITES = ("manifold", "pathspace", "backtrack", "category", "all")


def builtin_manifolds():
    return {
        "euclidean": mf.ManifoldSpec.euclidean(2),
        "sphere": mf.ManifoldSpec.sphere(1.0),
        "hyperbolic_half_plane": mf.ManifoldSpec.hyperbolic_half_plane(),
        "flat_torus": mf.ManifoldSpec.flat_torus([1.0, 2.0]),
    }


@dataclass(frozen=True)
class PropertyResult:
    name: str
    passed: bool
    worst: float
    tolerance: float
    cases: int
    detail: str = ""

    def to_json(self):
        out = {
            "name": self.name,
            "passed": self.passed,
            "worst": self.worst if np.isfinite(self.worst) else None,
            "tolerance": self.tolerance,
            "cases": self.cases,
        }
        if self.detail:
            out["detail"] = self.detail
        return out


def _thread_count():
    env = os.environ.get("PATHGEO_THREADS", "")
    if env.strip():
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


# ---------------------------------------------------------------------------
# random case generators
# ---------------------------------------------------------------------------


def random_point(spec, rng):
    if spec.kind == mf.EUCLIDEAN:
        return rng.uniform(-2.0, 2.0, spec.point_dim)
    if spec.kind == mf.SPHERE:
        x = rng.standard_normal(3)
        return spec.radius * x / np.linalg.norm(x)
    if spec.kind == mf.HALF_PLANE:
        return np.array([rng.uniform(-2.0, 2.0), rng.uniform(0.5, 3.0)])
    L = np.asarray(spec.circumferences)
    return rng.uniform(0.0, 1.0, len(L)) * L


def random_tangent(spec, x, rng, max_norm=2.0):
    v = rng.standard_normal(spec.point_dim)
    if spec.kind == mf.SPHERE:
        xhat = x / spec.radius
        v = v - np.dot(v, xhat) * xhat
    nrm = mf.norm(spec, x, v)
    if nrm > 0:
        v = v * (rng.uniform(0.2, 1.0) * max_norm / nrm)
    return v


def _speed_cap(spec, requested):
    """Keep random constructions well inside the injectivity radius."""
    inj = spec.injectivity_radius()
    return min(requested, 0.7 * inj) if np.isfinite(inj) else requested


def random_collared_path(spec, rng, n=64, collar=pth.DEFAULT_COLLAR, max_speed=1.0):
    """A collar-warped geodesic arc between two random nearby points."""
    x = random_point(spec, rng)
    v = random_tangent(spec, x, rng, max_norm=_speed_cap(spec, max_speed))
    p = mf.ManifoldPoint(spec, x)
    q = mf.exp_map(p, mf.TangentVector(p, v))
    return pth.make_geodesic_arc(p, q, n=n, collar=collar)


def random_collared_field(gamma, rng, scale=0.3):
    """A random tangent field, constant on the collars of its base path.

    Scaled so the largest pointwise metric norm equals the (injectivity
    capped) scale; pointwise exponentials then stay in normal range.
    """
    spec = gamma.manifold
    n = gamma.n_segments
    comps = rng.standard_normal((n + 1, spec.point_dim))
    t = gamma.grid
    head = t <= gamma.collar + 1e-12
    tail = t >= 1.0 - gamma.collar - 1e-12
    k_head = int(np.sum(head))
    k_tail = int(np.sum(tail))
    if spec.kind == mf.SPHERE:
        xhat = gamma.samples / spec.radius
        comps = comps - np.sum(comps * xhat, axis=-1, keepdims=True) * xhat
    if k_head:
        comps[:k_head] = comps[k_head - 1]
    if k_tail:
        comps[-k_tail:] = comps[-k_tail]
    peak = float(np.max(mf.norm(spec, gamma.samples, comps)))
    if peak > 0:
        comps = comps * (_speed_cap(spec, scale) / peak)
    return pth.PathTangentField(gamma, comps)


def nearby_path(gamma, rng, scale=0.2):
    """A second path in the same normal neighborhood, via a pointwise Exp."""
    field = random_collared_field(gamma, rng, scale=scale)
    return ps.pathspace_exp(gamma, field)


# ---------------------------------------------------------------------------
# manifold suite
# ---------------------------------------------------------------------------


def _prop_geodesic_oracle(spec, rng, cases, steps_per_unit=1000):
    xs = np.stack([random_point(spec, rng) for _ in range(cases)])
    vs = np.stack([random_tangent(spec, x, rng) for x in xs])
    s_end = 1.0
    pts, _ = mf.integrate_batch(spec, xs, vs, s_end, int(steps_per_unit * s_end))
    ref, _ = mf.flow(spec, xs, vs, s_end)
    worst = float(np.max(mf.dist(spec, pts[-1], ref)))
    return worst


def _prop_exp_log(spec, rng, cases):
    inj = spec.injectivity_radius()
    cap = 0.9 * inj if np.isfinite(inj) else 2.0
    worst = 0.0
    for _ in range(cases):
        x = random_point(spec, rng)
        v = random_tangent(spec, x, rng, max_norm=cap)
        p = mf.ManifoldPoint(spec, x)
        q = mf.exp_map(p, mf.TangentVector(p, v))
        back = mf.log_map(p, q)
        worst = max(worst, float(np.max(np.abs(back.components - v))))
    return worst


def _prop_distance_axioms(spec, rng, cases):
    worst = 0.0
    for _ in range(cases):
        x, y, z = (random_point(spec, rng) for _ in range(3))
        dxy = mf.dist(spec, x, y)
        worst = max(worst, abs(float(dxy - mf.dist(spec, y, x))))
        slack = float(dxy + mf.dist(spec, y, z) - mf.dist(spec, x, z))
        worst = max(worst, max(0.0, -slack))
    return worst


def _prop_transport_isometry(spec, rng, cases):
    worst = 0.0
    for _ in range(cases):
        x = random_point(spec, rng)
        v = random_tangent(spec, x, rng, max_norm=1.0)
        w = random_tangent(spec, x, rng, max_norm=1.0)
        pts, _ = mf.flow(spec, x[None], v[None], np.linspace(0, 1, 33)[:, None])
        curve = pts[:, 0, :]
        moved = mf.transport_along(spec, curve, w)
        n0 = mf.norm(spec, curve[0], moved[0])
        n1 = mf.norm(spec, curve[-1], moved[-1])
        worst = max(worst, abs(float(n1 - n0)) / max(float(n0), 1e-12))
    return worst


def _manifold_properties(seed, cases):
    props = []
    for idx, (name, spec) in enumerate(builtin_manifolds().items()):
        base = seed + 1000 * idx
        props.append(
            (
                "geodesic_oracle/" + name,
                lambda spec=spec, base=base: _prop_geodesic_oracle(
                    spec, np.random.default_rng(base + 1), cases
                ),
                1e-5,
                cases,
            )
        )
        props.append(
            (
                "exp_log_roundtrip/" + name,
                lambda spec=spec, base=base: _prop_exp_log(
                    spec, np.random.default_rng(base + 2), cases
                ),
                1e-5,
                cases,
            )
        )
        props.append(
            (
                "distance_axioms/" + name,
                lambda spec=spec, base=base: _prop_distance_axioms(
                    spec, np.random.default_rng(base + 3), cases
                ),
                1e-9,
                cases,
            )
        )
        props.append(
            (
                "transport_isometry/" + name,
                lambda spec=spec, base=base: _prop_transport_isometry(
                    spec, np.random.default_rng(base + 4), cases
                ),
                1e-5,
                cases,
            )
        )
    return props


# ---------------------------------------------------------------------------
# pathspace suite
# ---------------------------------------------------------------------------


def _prop_fubini(spec, rng, cases, n=64, S=16):
    worst = 0.0
    for _ in range(cases):
        gamma = random_collared_path(spec, rng, n=n)
        field = random_collared_field(gamma, rng)
        sheet = ps.pathspace_geodesic(gamma, field, (0.0, 1.0), S)
        E = ps.sheet_energy(sheet)
        et = ps.transverse_energies(sheet)
        wt = np.ones(n + 1) / n
        wt[0] = wt[-1] = 0.5 / n
        resummed = float(np.sum(wt * et))
        worst = max(worst, abs(E - resummed) / (1.0 + abs(E)))
    return worst


def _prop_distance_chain(spec, rng, cases, n=64):
    worst = 0.0
    for _ in range(cases):
        g1 = random_collared_path(spec, rng, n=n)
        g2 = nearby_path(g1, rng)
        sheet = ps.connecting_geodesic(g1, g2, S=32)
        worst = max(
            worst, abs(ps.sheet_length(sheet) - ps.pathspace_distance(g1, g2))
        )
    return worst


def _prop_minimizing(spec, rng, cases, n=64):
    worst = 0.0
    for _ in range(cases):
        g1 = random_collared_path(spec, rng, n=n)
        g2 = nearby_path(g1, rng)
        dtilde = ps.pathspace_distance(g1, g2)
        sheet = ps.connecting_geodesic(g1, g2, S=16)
        pts = sheet.points.copy()
        bump = np.sin(np.pi * np.linspace(0, 1, len(sheet.s_nodes)))[:, None, None]
        noise = 0.05 * rng.standard_normal(pts.shape) * bump
        if spec.kind == mf.SPHERE:
            pts = pts + noise
            pts = spec.radius * pts / np.linalg.norm(pts, axis=-1, keepdims=True)
        elif spec.kind == mf.HALF_PLANE:
            pts = pts + noise
            pts[..., 1] = np.maximum(pts[..., 1], 0.05)
        else:
            pts = pts + noise
        perturbed = ps.sheet_from_grid(spec, sheet.s_nodes, pts)
        worst = max(worst, dtilde - ps.sheet_length(perturbed))
    return worst


def _prop_l2_transport(spec, rng, cases, n=64, S=16):
    worst = 0.0
    for _ in range(cases):
        gamma = random_collared_path(spec, rng, n=n)
        vfield = random_collared_field(gamma, rng)
        xfield = random_collared_field(gamma, rng)
        sheet = ps.pathspace_geodesic(gamma, vfield, (0.0, 1.0), S)
        moved = ps.pathspace_transport(sheet, xfield, substeps=4)
        g0 = ps.l2_metric(moved[0].base, moved[0], moved[0])
        g1 = ps.l2_metric(moved[-1].base, moved[-1], moved[-1])
        worst = max(worst, abs(g1 - g0) / max(abs(g0), 1e-12))
    return worst


def _prop_geodesic_residual(spec, rng, cases, n=32, S=64):
    worst = 0.0
    for _ in range(cases):
        gamma = random_collared_path(spec, rng, n=n)
        field = random_collared_field(gamma, rng)
        sheet = ps.pathspace_geodesic(gamma, field, (0.0, 1.0), S)
        worst = max(worst, ps.transverse_residual(sheet))
    return worst


def _pathspace_properties(seed, cases):
    props = []
    for idx, (name, spec) in enumerate(builtin_manifolds().items()):
        base = seed + 2000 + 1000 * idx
        for off, (label, fn, tol) in enumerate(
            [
                ("fubini_identity", _prop_fubini, 1e-6),
                ("distance_chain", _prop_distance_chain, 1e-4),
                ("minimizing_sheet", _prop_minimizing, 1e-4),
                ("l2_transport_isometry", _prop_l2_transport, 1e-5),
                ("geodesic_residual", _prop_geodesic_residual, 1e-4),
            ]
        ):
            props.append(
                (
                    label + "/" + name,
                    lambda fn=fn, spec=spec, s=base + off: fn(
                        spec, np.random.default_rng(s), cases
                    ),
                    tol,
                    cases,
                )
            )
    return props


# ---------------------------------------------------------------------------
# backtrack suite
# ---------------------------------------------------------------------------


def _spur_path(spec, rng, n=64):
    """A collared path with one exact retraced spur; returns it with its
    spur-free counterpart and the spur window."""
    clean = random_collared_path(spec, rng, n=n, collar=0.0)
    k = n // 4
    mid = n // 2
    out_and_back = clean.samples[mid : mid + k + 1]
    samples = np.concatenate(
        [clean.samples[: mid + k + 1], out_and_back[::-1][1:], clean.samples[mid + 1 :]]
    )
    # window center sits at the spur tip, index mid + k
    return pth.DiscretePath(spec, samples, 0.0), clean, (mid, k)


def _prop_detect_erase(spec, rng, cases, n=64):
    worst = 0.0
    for _ in range(cases):
        spurred, clean, (T, k) = _spur_path(spec, rng, n=n)
        wins = bt.detect_backtracks(spurred)
        if len(wins) != 1 or wins[0].start != T or wins[0].half_width != k:
            return float("inf")
        if not bt.bt_equivalent(spurred, clean, 1e-6):
            return float("inf")
        c = bt.canonical_form(spurred)
        cc = bt.canonical_form(c)
        worst = max(worst, float(np.max(mf.dist(spec, c.samples, cc.samples))))
    return worst


def _prop_exp_preserves_windows(spec, rng, cases, n=64):
    worst = 0.0
    for _ in range(cases):
        spurred, _, (T, k) = _spur_path(spec, rng, n=n)
        field = pth.make_constant_field(spurred, 0.2 * rng.standard_normal(spec.point_dim))
        moved = ps.pathspace_exp(spurred, field)
        wins = bt.detect_backtracks(moved, tol=1e-9)
        covered = any(w.start <= T and w.start + 2 * w.half_width >= T + 2 * k for w in wins)
        if not covered:
            return float("inf")
        for u in range(k + 1):
            worst = max(
                worst,
                float(mf.dist(spec, moved.samples[T + u], moved.samples[T + 2 * k - u])),
            )
    return worst


def _prop_field_reflection(spec, rng, cases, n=64):
    worst = 0.0
    for _ in range(cases):
        spurred, _, _ = _spur_path(spec, rng, n=n)
        field = pth.make_constant_field(spurred, 0.3 * rng.standard_normal(spec.point_dim))
        try:
            out = bt.field_canonical_form(field)
        except mf.DomainError:
            return float("inf")
        out2 = bt.field_canonical_form(out)
        worst = max(worst, float(np.max(np.abs(out.components - out2.components))))
    return worst


def _backtrack_properties(seed, cases, config=None):
    props = []
    specs = builtin_manifolds()
    for idx, (name, spec) in enumerate(specs.items()):
        base = seed + 4000 + 1000 * idx
        props.append(
            (
                "detect_erase_canonical/" + name,
                lambda spec=spec, s=base + 1: _prop_detect_erase(
                    spec, np.random.default_rng(s), cases
                ),
                1e-9,
                cases,
            )
        )
        props.append(
            (
                "exp_preserves_windows/" + name,
                lambda spec=spec, s=base + 2: _prop_exp_preserves_windows(
                    spec, np.random.default_rng(s), cases
                ),
                1e-9,
                cases,
            )
        )
        props.append(
            (
                "field_reflection/" + name,
                lambda spec=spec, s=base + 3: _prop_field_reflection(
                    spec, np.random.default_rng(s), cases
                ),
                1e-9,
                cases,
            )
        )
    if config is not None:
        for fname in sorted(config.fields):
            props.append(
                (
                    "config_field_reflection/" + fname,
                    lambda fname=fname: _prop_config_field(config, fname),
                    1e-9,
                    1,
                )
            )
    return props


def _prop_config_field(config, fname):
    field = config.build_field(fname)
    try:
        bt.field_canonical_form(field)
    except mf.DomainError:
        return float("inf")
    return 0.0


# ---------------------------------------------------------------------------
# category suite
# ---------------------------------------------------------------------------


def _composable_triple(spec, rng, n=32):
    """Three head-to-tail morphisms sharing a constant-in-chart field value."""
    pts = [random_point(spec, rng)]
    for _ in range(3):
        p = mf.ManifoldPoint(spec, pts[-1])
        v = random_tangent(spec, pts[-1], rng, max_norm=_speed_cap(spec, 0.8))
        pts.append(mf.exp_map(p, mf.TangentVector(p, v)).coords)
    c = 0.3 * rng.standard_normal(spec.point_dim)
    ms = []
    for a, b in zip(pts[:-1], pts[1:]):
        arc = pth.make_geodesic_arc(
            mf.ManifoldPoint(spec, a), mf.ManifoldPoint(spec, b), n=n
        )
        ms.append(cat.morphism1(arc, pth.make_constant_field(arc, c), 0.0))
    return ms


def _prop_cat1_laws(spec, rng, cases, n=32):
    worst = 0.0
    for _ in range(cases):
        m1, m2, m3 = _composable_triple(spec, rng, n=n)
        lhs = cat.compose1(m3, cat.compose1(m2, m1))
        rhs = cat.compose1(cat.compose1(m3, m2), m1)
        worst = max(
            worst,
            float(np.max(np.abs(lhs.path.samples - rhs.path.samples))),
            float(np.max(np.abs(lhs.field.components - rhs.field.components))),
        )
        ido = cat.identity1(cat.src1(m1), n=n)
        if not cat.morphism1_equal(cat.compose1(m1, ido), m1, 1e-6):
            return float("inf")
        idt = cat.identity1(cat.tgt1(m1), n=n)
        if not cat.morphism1_equal(cat.compose1(idt, m1), m1, 1e-6):
            return float("inf")
    return worst


def _prop_cat2_laws(spec, rng, cases, n=32, S=8):
    worst = 0.0
    for _ in range(cases):
        m1, m2, _ = _composable_triple(spec, rng, n=n)
        a, b, c = 0.0, float(rng.uniform(0.3, 0.7)), 1.0
        F1 = cat.morphism2(m1, (a, b), S=S)
        G1 = cat.morphism2(m1, (b, c), S=S)
        F2 = cat.morphism2(m2, (a, b), S=S)
        G2 = cat.morphism2(m2, (b, c), S=S)
        V = cat.compose2_vertical(G1, F1)
        worst = max(
            worst,
            float(np.max(np.abs(V.sheet.points[: S + 1] - F1.sheet.points))),
            float(np.max(np.abs(V.sheet.points[S:] - G1.sheet.points))),
        )
        H = cat.compose2_horizontal(F1, F2)
        if not cat.morphism1_equal(
            cat.src2(H), cat.compose1(cat.src2(F2), cat.src2(F1)), 1e-9
        ):
            return float("inf")
        rep = cat.check_exchange(F1, G1, F2, G2)
        if rep.error is not None:
            return float("inf")
        worst = max(worst, rep.max_discrepancy)
        ids = cat.identity2(m1)
        V2 = cat.compose2_vertical(F1, ids) if a == ids.interval[0] else None
        if V2 is not None:
            worst = max(worst, float(np.max(np.abs(V2.sheet.points - F1.sheet.points))))
    return worst


def _category_properties(seed, cases):
    props = []
    for idx, (name, spec) in enumerate(builtin_manifolds().items()):
        base = seed + 6000 + 1000 * idx
        props.append(
            (
                "category_1_laws/" + name,
                lambda spec=spec, s=base + 1: _prop_cat1_laws(
                    spec, np.random.default_rng(s), cases
                ),
                1e-9,
                cases,
            )
        )
        props.append(
            (
                "category_2_laws/" + name,
                lambda spec=spec, s=base + 2: _prop_cat2_laws(
                    spec, np.random.default_rng(s), cases
                ),
                1e-9,
                cases,
            )
        )
    return props


# ---------------------------------------------------------------------------
# runner
# ---------------------------------------------------------------------------


def _run_properties(props):
    def run_one(entry):
        name, fn, tol, cases = entry
        try:
            worst = float(fn())
        except Exception as err:  # report, never raise
            return PropertyResult(name, False, float("inf"), tol, cases, str(err))
        return PropertyResult(name, worst <= tol, worst, tol, cases)

    workers = _thread_count()
    if workers <= 1:
        results = [run_one(p) for p in props]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_one, props))
    return results


def run_checks(suite, seed=DEFAULT_SEED, cases=10, config=None):
    """Run a named suite; returns a JSON-ready deterministic report."""
    if suite not in SUITES:
        raise mf.DomainError("unknown suite %r (choose from %s)" % (suite, ", ".join(SUITES)))
    props = []
    if suite in ("manifold", "all"):
        props += _manifold_properties(seed, cases)
    if suite in ("pathspace", "all"):
        props += _pathspace_properties(seed, max(3, cases // 2))
    if suite in ("backtrack", "all"):
        props += _backtrack_properties(seed, max(3, cases // 2), config=config)
    if suite in ("category", "all"):
        props += _category_properties(seed, max(3, cases // 2))
    results = _run_properties(props)
    return {
        "suite": suite,
        "seed": int(seed),
        "passed": all(r.passed for r in results),
        "properties": [r.to_json() for r in results],
    }
