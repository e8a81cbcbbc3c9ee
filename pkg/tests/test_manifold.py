import math

import numpy as np
import pytest

from pathgeo import manifold as mf

SEED = 20260823


def builtin_specs():
    return [
        mf.ManifoldSpec.euclidean(2),
        mf.ManifoldSpec.sphere(1.0),
        mf.ManifoldSpec.hyperbolic_half_plane(),
        mf.ManifoldSpec.flat_torus([1.0, 2.0]),
    ]


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


def random_tangent(spec, x, rng, max_norm=1.0):
    v = rng.standard_normal(spec.point_dim)
    if spec.kind == mf.SPHERE:
        xhat = x / spec.radius
        v = v - np.dot(v, xhat) * xhat
    n = mf.norm(spec, x, v)
    return v * (max_norm / n) if n > 0 else v


# ---------------------------------------------------------------------------
# metric and Christoffel symbols
# ---------------------------------------------------------------------------


def metric_matrix(spec, x):
    """Independent chart metric for the chart manifolds (not the sphere)."""
    d = spec.point_dim
    if spec.kind == mf.HALF_PLANE:
        return np.eye(2) / x[1] ** 2
    return np.eye(d)


def test_inner_matches_chart_metric():
    rng = np.random.default_rng(SEED)
    for spec in builtin_specs():
        if spec.kind == mf.SPHERE:
            continue
        for _ in range(20):
            x = random_point(spec, rng)
            u = rng.standard_normal(spec.point_dim)
            v = rng.standard_normal(spec.point_dim)
            expected = u @ metric_matrix(spec, x) @ v
            assert mf.inner(spec, x, u, v) == pytest.approx(expected, abs=1e-12)


def test_half_plane_metric_formula():
    spec = mf.ManifoldSpec.hyperbolic_half_plane()
    p = mf.point(spec, [0.3, 2.0])
    u = mf.tangent(p, [1.0, 0.0])
    assert mf.metric_eval(p, u, u) == pytest.approx(1.0 / 4.0, abs=1e-15)


def christoffel_fd(spec, x, h=1e-5):
    """Levi-Civita symbols from finite differences of the chart metric."""
    d = spec.point_dim
    dg = np.zeros((d, d, d))  # dg[l, i, j] = d_l g_ij
    for l in range(d):
        e = np.zeros(d)
        e[l] = h
        dg[l] = (metric_matrix(spec, x + e) - metric_matrix(spec, x - e)) / (2 * h)
    ginv = np.linalg.inv(metric_matrix(spec, x))
    gamma = np.zeros((d, d, d))
    for k in range(d):
        for i in range(d):
            for j in range(d):
                acc = 0.0
                for l in range(d):
                    acc += ginv[k, l] * (dg[i, l, j] + dg[j, l, i] - dg[l, i, j])
                gamma[k, i, j] = 0.5 * acc
    return gamma


def test_christoffel_matches_finite_differences():
    rng = np.random.default_rng(SEED + 1)
    for spec in builtin_specs():
        if spec.kind == mf.SPHERE:
            continue  # embedded coordinates are not a chart
        for _ in range(10):
            x = random_point(spec, rng)
            got = mf.christoffel_array(spec, x)
            want = christoffel_fd(spec, x)
            assert np.max(np.abs(got - want)) < 1e-7


def test_sphere_christoffel_is_constraint_form():
    spec = mf.ManifoldSpec.sphere(2.0)
    x = np.array([0.0, 0.0, 2.0])
    got = mf.christoffel_array(spec, x)
    want = x[:, None, None] * np.eye(3) / 4.0
    assert np.max(np.abs(got - want)) == 0.0


def test_gamma_quad_consistent_with_array():
    rng = np.random.default_rng(SEED + 2)
    for spec in builtin_specs():
        for _ in range(10):
            x = random_point(spec, rng)
            a = rng.standard_normal(spec.point_dim)
            b = rng.standard_normal(spec.point_dim)
            g = mf.christoffel_array(spec, x)
            want = np.einsum("kij,i,j->k", g, a, b)
            assert np.max(np.abs(mf.gamma_quad(spec, x, a, b) - want)) < 1e-12


# ---------------------------------------------------------------------------
# geodesics: closed forms vs the integrator
# ---------------------------------------------------------------------------


def test_rk4_matches_closed_form_flow():
    rng = np.random.default_rng(SEED + 3)
    for spec in builtin_specs():
        xs = np.stack([random_point(spec, rng) for _ in range(20)])
        vs = np.stack([random_tangent(spec, x, rng, max_norm=1.5) for x in xs])
        got, gotv = mf.integrate_batch(spec, xs, vs, 1.0, 1000)
        want, wantv = mf.flow(spec, xs, vs, 1.0)
        assert np.max(mf.dist(spec, got[-1], want)) < 1e-6
        assert np.max(np.abs(gotv[-1] - wantv)) < 1e-5


def test_great_circle_closed_form():
    spec = mf.ManifoldSpec.sphere(1.0)
    x = np.array([1.0, 0.0, 0.0])
    v = np.array([0.0, 1.0, 0.0])
    for s in (0.0, 0.5, np.pi / 2, 2.0):
        got, gotv = mf.flow(spec, x, v, s)
        assert np.allclose(got, [math.cos(s), math.sin(s), 0.0], atol=1e-15)
        assert np.allclose(gotv, [-math.sin(s), math.cos(s), 0.0], atol=1e-15)


def test_vertical_ray_is_half_plane_geodesic():
    spec = mf.ManifoldSpec.hyperbolic_half_plane()
    x = np.array([0.7, 1.0])
    v = np.array([0.0, 1.0])  # unit speed, straight up
    got, _ = mf.flow(spec, x, v, 1.3)
    assert np.allclose(got, [0.7, math.exp(1.3)], atol=1e-12)


def test_geodesics_have_constant_speed():
    rng = np.random.default_rng(SEED + 4)
    for spec in builtin_specs():
        x = random_point(spec, rng)
        v = random_tangent(spec, x, rng, max_norm=1.2)
        xs, vs = mf.integrate_batch(spec, x, v, 1.0, 500)
        speeds = mf.norm(spec, xs, vs)
        assert np.max(np.abs(speeds - speeds[0])) < 1e-9


def test_flow_at_zero_is_identity():
    rng = np.random.default_rng(SEED + 5)
    for spec in builtin_specs():
        x = random_point(spec, rng)
        v = random_tangent(spec, x, rng)
        got, gotv = mf.flow(spec, x, v, 0.0)
        assert np.max(mf.dist(spec, got, x)) < 1e-15
        assert np.max(np.abs(gotv - v)) < 1e-12


def test_half_plane_leaving_chart_raises():
    spec = mf.ManifoldSpec.euclidean(2)
    # the integrator itself never leaves euclidean space; use the half plane
    spec = mf.ManifoldSpec.hyperbolic_half_plane()
    with pytest.raises(mf.DomainError):
        mf.point(spec, [0.0, -1.0])


# ---------------------------------------------------------------------------
# distance, exp, log
# ---------------------------------------------------------------------------


def test_sphere_distance_closed_form():
    spec = mf.ManifoldSpec.sphere(2.0)
    rng = np.random.default_rng(SEED + 6)
    for _ in range(20):
        x = random_point(spec, rng)
        y = random_point(spec, rng)
        want = 2.0 * math.acos(np.clip(np.dot(x, y) / 4.0, -1.0, 1.0))
        assert mf.dist(spec, x, y) == pytest.approx(want, abs=1e-9)


def test_half_plane_distance_closed_form():
    spec = mf.ManifoldSpec.hyperbolic_half_plane()
    # same-x pair: d = |log(y2/y1)|
    assert mf.dist(spec, np.array([0.3, 1.0]), np.array([0.3, math.e])) == pytest.approx(
        1.0, abs=1e-12
    )
    # standard formula via arcosh
    rng = np.random.default_rng(SEED + 7)
    for _ in range(20):
        p = random_point(spec, rng)
        q = random_point(spec, rng)
        arg = 1.0 + ((p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2) / (2 * p[1] * q[1])
        want = math.acosh(arg)
        assert mf.dist(spec, p, q) == pytest.approx(want, abs=1e-10)


def test_torus_distance_wraps():
    spec = mf.ManifoldSpec.flat_torus([1.0, 2.0])
    d = mf.dist(spec, np.array([0.05, 0.0]), np.array([0.95, 0.0]))
    assert d == pytest.approx(0.1, abs=1e-12)


def test_exp_log_roundtrip():
    rng = np.random.default_rng(SEED + 8)
    for spec in builtin_specs():
        inj = spec.injectivity_radius()
        cap = 0.9 * inj if math.isfinite(inj) else 2.0
        for _ in range(25):
            x = random_point(spec, rng)
            v = random_tangent(spec, x, rng, max_norm=cap * rng.uniform(0.1, 1.0))
            p = mf.point(spec, x)
            q = mf.exp_map(p, mf.tangent(p, v))
            back = mf.log_map(p, q)
            assert np.max(np.abs(back.components - v)) < 1e-9


def test_log_norm_equals_distance():
    rng = np.random.default_rng(SEED + 9)
    for spec in builtin_specs():
        for _ in range(15):
            x = random_point(spec, rng)
            v = random_tangent(spec, x, rng, max_norm=0.3)
            p = mf.point(spec, x)
            q = mf.exp_map(p, mf.tangent(p, v))
            u = mf.log(spec, x, q.coords)
            assert mf.norm(spec, x, u) == pytest.approx(
                float(mf.dist(spec, x, q.coords)), abs=1e-10
            )


def test_shooting_log_matches_closed_form():
    rng = np.random.default_rng(SEED + 10)
    for spec in builtin_specs():
        x = random_point(spec, rng)
        v = random_tangent(spec, x, rng, max_norm=0.4)
        p = mf.point(spec, x)
        q = mf.exp_map(p, mf.tangent(p, v))
        shot = mf.log_map_shooting(p, q)
        assert np.max(np.abs(shot.components - v)) < 1e-6


def test_log_beyond_injectivity_radius_raises():
    spec = mf.ManifoldSpec.sphere(1.0)
    p = mf.point(spec, [1.0, 0.0, 0.0])
    q = mf.point(spec, [-1.0, 0.0, 0.0])
    with pytest.raises(mf.NormalNeighborhoodError):
        mf.log_map(p, q)


# ---------------------------------------------------------------------------
# parallel transport
# ---------------------------------------------------------------------------


def test_transport_preserves_inner_products():
    rng = np.random.default_rng(SEED + 11)
    for spec in builtin_specs():
        x = random_point(spec, rng)
        v = random_tangent(spec, x, rng, max_norm=1.0)
        w1 = random_tangent(spec, x, rng, max_norm=1.0)
        w2 = random_tangent(spec, x, rng, max_norm=1.0)
        pts, _ = mf.flow(spec, x[None], v[None], np.linspace(0, 1, 65)[:, None])
        curve = pts[:, 0, :]
        m1 = mf.transport_along(spec, curve, w1)
        m2 = mf.transport_along(spec, curve, w2)
        g = mf.inner(spec, curve, m1, m2)
        assert np.max(np.abs(g - g[0])) < 1e-9


def test_transport_along_geodesic_keeps_velocity():
    # the velocity of a geodesic is parallel along it
    rng = np.random.default_rng(SEED + 12)
    for spec in builtin_specs():
        x = random_point(spec, rng)
        v = random_tangent(spec, x, rng, max_norm=0.8)
        ss = np.linspace(0, 1, 65)
        pts, vels = mf.flow(spec, x[None], v[None], ss[:, None])
        curve, vcurve = pts[:, 0, :], vels[:, 0, :]
        moved = mf.transport_along(spec, curve, v)
        assert np.max(np.abs(moved - vcurve)) < 1e-7


def test_sphere_latitude_holonomy():
    # transport around the colatitude-theta circle rotates by 2 pi (1 - cos theta)
    spec = mf.ManifoldSpec.sphere(1.0)
    theta = 1.1
    n = 2048
    ang = 2 * np.pi * np.arange(n + 1) / n
    st, ct = math.sin(theta), math.cos(theta)
    curve = np.stack([st * np.cos(ang), st * np.sin(ang), ct * np.ones_like(ang)], axis=-1)
    v0 = np.array([0.0, 0.0, 1.0])
    v0 = v0 - np.dot(v0, curve[0]) * curve[0]
    v0 /= np.linalg.norm(v0)
    moved = mf.transport_along(spec, curve, v0, substeps=4)
    cosang = np.clip(np.dot(moved[-1], v0), -1.0, 1.0)
    got = math.acos(cosang)
    want = 2 * math.pi * (1 - math.cos(theta))
    want = min(want, 2 * math.pi - want)  # holonomy angle folded into [0, pi]
    assert abs(got - want) < 1e-4


# ---------------------------------------------------------------------------
# serialization and validation
# ---------------------------------------------------------------------------


def test_manifold_spec_json_roundtrip():
    for spec in builtin_specs():
        assert mf.ManifoldSpec.from_json(spec.to_json()) == spec


def test_invalid_specs_raise():
    with pytest.raises(mf.DomainError):
        mf.ManifoldSpec.euclidean(0)
    with pytest.raises(mf.DomainError):
        mf.ManifoldSpec.sphere(-1.0)
    with pytest.raises(mf.DomainError):
        mf.ManifoldSpec.flat_torus([1.0, -2.0])
    with pytest.raises(mf.DomainError):
        mf.ManifoldSpec("klein_bottle")


def test_sphere_point_and_tangent_validation():
    spec = mf.ManifoldSpec.sphere(1.0)
    with pytest.raises(mf.DomainError):
        mf.point(spec, [1.0, 1.0, 0.0])
    p = mf.point(spec, [1.0, 0.0, 0.0])
    with pytest.raises(mf.DomainError):
        mf.tangent(p, [1.0, 0.0, 0.0])
