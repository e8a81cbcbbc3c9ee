import math

import numpy as np
import pytest

from pathgeo import manifold as mf
from pathgeo import path as pth

SEED = 31415


def test_line_energy_is_half_speed_squared():
    spec = mf.ManifoldSpec.euclidean(2)
    gamma = pth.make_line(spec, [0, 0], [1, 0], n=256, collar=0.0)
    assert pth.path_energy(gamma) == pytest.approx(0.5, abs=1e-12)
    assert pth.arc_length(gamma) == pytest.approx(1.0, abs=1e-12)


def test_energy_analytic_oracle_on_smooth_curve():
    # gamma(t) = (a sin 2pi t, b cos 2pi t) has energy pi^2 (a^2 + b^2)
    spec = mf.ManifoldSpec.euclidean(2)
    a, b = 0.7, 0.4
    t = np.arange(257) / 256
    pts = np.stack([a * np.sin(2 * np.pi * t), b * np.cos(2 * np.pi * t)], axis=1)
    gamma = pth.DiscretePath(spec, pts, 0.0)
    want = math.pi**2 * (a * a + b * b)
    assert pth.path_energy(gamma) == pytest.approx(want, rel=1e-3)


def test_constant_path_has_zero_energy_and_length():
    spec = mf.ManifoldSpec.sphere(1.0)
    gamma = pth.make_constant_path(mf.point(spec, [0.0, 0.0, 1.0]), n=32)
    assert pth.path_energy(gamma) == 0.0
    assert pth.arc_length(gamma) == 0.0


def test_quarter_great_circle_energy():
    spec = mf.ManifoldSpec.sphere(1.0)
    gamma = pth.make_great_circle_arc(spec, [1, 0, 0], [0, 1, 0], n=256, collar=0.0)
    # constant-speed parametrization of a length pi/2 arc
    assert pth.path_energy(gamma) == pytest.approx(0.5 * (math.pi / 2) ** 2, abs=1e-6)
    assert pth.arc_length(gamma) == pytest.approx(math.pi / 2, abs=1e-6)


def test_velocity_components_oracle_on_line():
    spec = mf.ManifoldSpec.euclidean(2)
    gamma = pth.make_line(spec, [0, 0], [2, 1], n=64, collar=0.0)
    v = pth.velocity_components(gamma)
    assert np.max(np.abs(v - np.array([2.0, 1.0]))) < 1e-10


def test_collar_warp_velocity_vanishes_on_collars():
    spec = mf.ManifoldSpec.euclidean(2)
    gamma = pth.make_line(spec, [0, 0], [1, 1], n=64, collar=1.0 / 16)
    v = pth.velocity_components(gamma)
    assert np.max(np.abs(v[:4])) == 0.0
    assert np.max(np.abs(v[-4:])) == 0.0


def test_evaluate_snaps_to_grid():
    spec = mf.ManifoldSpec.sphere(1.0)
    gamma = pth.make_great_circle_arc(spec, [1, 0, 0], [0, 0, 1], n=32, collar=0.0)
    ts = gamma.grid
    pts = pth.evaluate_many(gamma, ts)
    assert np.array_equal(pts, gamma.samples)


def test_evaluate_interpolates_geodesically():
    spec = mf.ManifoldSpec.sphere(1.0)
    gamma = pth.make_great_circle_arc(spec, [1, 0, 0], [0, 1, 0], n=4, collar=0.0)
    # halfway between grid nodes must stay on the great circle, unit norm
    p = pth.evaluate_many(gamma, np.array([1.0 / 8]))[0]
    assert np.linalg.norm(p) == pytest.approx(1.0, abs=1e-12)
    assert p[2] == pytest.approx(0.0, abs=1e-12)


def test_resample_identity_on_same_grid():
    spec = mf.ManifoldSpec.euclidean(3)
    rng = np.random.default_rng(SEED + 1)
    pts = np.cumsum(0.1 * rng.standard_normal((17, 3)), axis=0)
    gamma = pth.DiscretePath(spec, pts, 0.0)
    again = pth.resample(gamma, 16)
    assert np.array_equal(again.samples, gamma.samples)


def test_reverse_is_involution():
    spec = mf.ManifoldSpec.flat_torus([1.0, 2.0])
    rng = np.random.default_rng(SEED + 2)
    pts = np.cumsum(0.02 * rng.standard_normal((33, 2)), axis=0)
    gamma = pth.DiscretePath(spec, pts, 0.0)
    assert np.array_equal(pth.reverse(pth.reverse(gamma)).samples, gamma.samples)


def test_concatenate_requires_matching_endpoints_and_collars():
    spec = mf.ManifoldSpec.euclidean(2)
    a = pth.make_line(spec, [0, 0], [1, 0], n=32)
    b = pth.make_line(spec, [1, 0], [1, 1], n=32)
    c = pth.make_line(spec, [2, 0], [3, 0], n=32)
    joined = pth.concatenate(a, b)
    assert joined.n_segments == 64
    assert np.array_equal(joined.samples[:33], a.samples)
    assert np.array_equal(joined.samples[33:], b.samples[1:])
    with pytest.raises(mf.DomainError):
        pth.concatenate(a, c)
    flat_a = pth.make_line(spec, [0, 0], [1, 0], n=32, collar=0.0)
    with pytest.raises(mf.DomainError):
        pth.concatenate(flat_a, b)


def test_concatenate_energy_scales_by_two():
    # running each half at double speed doubles the total energy of one half
    spec = mf.ManifoldSpec.euclidean(2)
    a = pth.make_line(spec, [0, 0], [1, 0], n=128)
    b = pth.make_line(spec, [1, 0], [2, 0], n=128)
    joined = pth.concatenate(a, b)
    assert pth.path_energy(joined) == pytest.approx(4 * pth.path_energy(a), rel=1e-9)


def test_collar_validation():
    spec = mf.ManifoldSpec.euclidean(2)
    pts = np.linspace([0, 0], [1, 0], 17)
    with pytest.raises(mf.DomainError):
        pth.DiscretePath(spec, pts, 0.25)  # moving samples inside the collar
    with pytest.raises(mf.DomainError):
        pth.DiscretePath(spec, pts, 0.6)  # collar too wide


def test_field_validation():
    spec = mf.ManifoldSpec.sphere(1.0)
    gamma = pth.make_great_circle_arc(spec, [1, 0, 0], [0, 1, 0], n=16, collar=0.0)
    with pytest.raises(mf.DomainError):
        pth.PathTangentField(gamma, gamma.samples)  # radial, not tangent
    ok = pth.make_constant_field(gamma, [0.0, 0.0, 1.0])
    assert np.max(np.abs(np.sum(ok.components * gamma.samples, axis=1))) < 1e-12


def test_field_collar_constancy_enforced():
    spec = mf.ManifoldSpec.euclidean(2)
    gamma = pth.make_line(spec, [0, 0], [1, 0], n=32, collar=1.0 / 8)
    comps = np.outer(np.linspace(0, 1, 33), [1.0, 0.0])
    with pytest.raises(mf.DomainError):
        pth.PathTangentField(gamma, comps)


def test_normal_field_is_orthogonal_to_velocity():
    spec = mf.ManifoldSpec.euclidean(2)
    gamma = pth.make_line(spec, [0, 0], [1, 1], n=32, collar=0.0)
    field = pth.make_normal_field(gamma, scale=2.0)
    v = pth.velocity_components(gamma)
    ips = np.sum(field.components * v, axis=1)
    assert np.max(np.abs(ips)) < 1e-9
    assert np.allclose(np.linalg.norm(field.components, axis=1), 2.0)


def test_generators_registry_and_fixtures():
    sph = mf.ManifoldSpec.sphere(1.0)
    uhp = mf.ManifoldSpec.hyperbolic_half_plane()
    lat = pth.make_latitude_circle(sph, math.pi / 3, n=64)
    assert np.allclose(lat.samples[:, 2], math.cos(math.pi / 3), atol=1e-12)
    ray = pth.make_vertical_ray(uhp, 0.5, 1.0, math.e, n=64, collar=0.0)
    assert np.allclose(ray.samples[:, 0], 0.5)
    assert pth.arc_length(ray) == pytest.approx(1.0, abs=1e-9)
    assert set(pth.GENERATORS) == {
        "line",
        "great_circle_arc",
        "latitude_circle",
        "vertical_ray",
    }


def test_path_json_roundtrip():
    spec = mf.ManifoldSpec.flat_torus([1.0, 2.0])
    gamma = pth.make_line(spec, [0.1, 0.2], [0.4, 1.0], n=16)
    back = pth.DiscretePath.from_json(gamma.to_json())
    assert back.manifold == spec
    assert np.array_equal(back.samples, gamma.samples)
    assert back.collar == gamma.collar
