import numpy as np
import pytest

from pathgeo import backtrack as bt
from pathgeo import checks
from pathgeo import manifold as mf
from pathgeo import path as pth
from pathgeo import pathspace as ps

SEED = 16180


def specs():
    return list(checks.builtin_manifolds().values())


def brute_force_windows(spec, samples, tol=1e-9):
    """Independent O(n^3) reference: maximal reflection windows, greedily
    disjoint left to right."""
    n = len(samples) - 1
    cand = []
    for c in range(1, n):
        sigma = 0
        for u in range(1, min(c, n - c) + 1):
            if float(mf.dist(spec, samples[c - u], samples[c + u])) <= tol:
                sigma = u
            else:
                break
        if sigma >= 1:
            cand.append((c - sigma, sigma))
    maximal = []
    for T, s in cand:
        contained = any(
            T2 <= T and T + 2 * s <= T2 + 2 * s2 and (T2, s2) != (T, s)
            for T2, s2 in cand
        )
        if not contained:
            maximal.append((T, s))
    out = []
    last = -1
    for T, s in sorted(maximal):
        if T > last:
            out.append((T, s))
            last = T + 2 * s
    return out


def abcba_path(spec=None):
    spec = spec or mf.ManifoldSpec.euclidean(2)
    A, B, C = [0.0, 0.0], [1.0, 0.0], [2.0, 0.0]
    return pth.DiscretePath(spec, np.array([A, B, C, B, A]), 0.0)


def test_full_palindrome_window():
    gamma = abcba_path()
    wins = bt.detect_backtracks(gamma)
    assert [(w.start, w.half_width) for w in wins] == [(0, 2)]


def test_interior_spur_window():
    spec = mf.ManifoldSpec.euclidean(2)
    pts = np.array([[0, 0], [1, 0], [2, 0], [1, 0], [3, 0]], dtype=float)
    wins = bt.detect_backtracks(pth.DiscretePath(spec, pts, 0.0))
    assert [(w.start, w.half_width) for w in wins] == [(1, 1)]


def test_no_window_on_injective_path():
    spec = mf.ManifoldSpec.euclidean(2)
    gamma = pth.make_line(spec, [0, 0], [1, 0], n=16, collar=0.0)
    assert bt.detect_backtracks(gamma) == []


def test_detection_matches_brute_force():
    rng = np.random.default_rng(SEED)
    for spec in specs():
        for _ in range(5):
            spurred, _, _ = checks._spur_path(spec, rng, n=32)
            got = [(w.start, w.half_width) for w in bt.detect_backtracks(spurred)]
            want = brute_force_windows(spec, spurred.samples)
            assert got == want


def test_erase_backtrack_index_deletion_oracle():
    spec = mf.ManifoldSpec.euclidean(2)
    rng = np.random.default_rng(SEED + 1)
    spurred, clean, (T, k) = checks._spur_path(spec, rng, n=16)
    win = bt.BackTrackWindow(T, k)
    erased = bt.erase_backtrack(spurred, win)
    # oracle: delete indices (T, T+2k] by hand, then compare canonically
    kept = np.delete(spurred.samples, np.s_[T + 1 : T + 2 * k + 1], axis=0)
    assert np.array_equal(kept, clean.samples)
    assert bt.bt_equivalent(erased, clean, 1e-9)


def test_erase_rejects_non_window():
    spec = mf.ManifoldSpec.euclidean(2)
    gamma = pth.make_line(spec, [0, 0], [1, 0], n=16, collar=0.0)
    with pytest.raises(mf.DomainError):
        bt.erase_backtrack(gamma, bt.BackTrackWindow(2, 3))


def test_canonical_form_idempotent():
    rng = np.random.default_rng(SEED + 2)
    for spec in specs():
        spurred, _, _ = checks._spur_path(spec, rng, n=32)
        c1 = bt.canonical_form(spurred)
        c2 = bt.canonical_form(c1)
        assert np.max(mf.dist(spec, c1.samples, c2.samples)) <= 1e-9


def test_canonical_form_of_constant_path():
    spec = mf.ManifoldSpec.sphere(1.0)
    gamma = pth.make_constant_path(mf.point(spec, [0.0, 0.0, 1.0]), n=16)
    c = bt.canonical_form(gamma)
    assert np.max(mf.dist(spec, c.samples, gamma.samples)) == 0.0


def test_bt_equivalence_positive_and_negative():
    rng = np.random.default_rng(SEED + 3)
    for spec in specs():
        spurred, clean, _ = checks._spur_path(spec, rng, n=32)
        assert bt.bt_equivalent(spurred, clean, 1e-6)
        other = checks.random_collared_path(spec, rng, n=32, collar=0.0)
        if np.max(mf.dist(spec, clean.samples, other.samples)) > 1e-3:
            assert not bt.bt_equivalent(clean, other, 1e-6)


def test_bt_equivalence_is_reparametrization_invariant():
    spec = mf.ManifoldSpec.euclidean(2)
    gamma = pth.make_line(spec, [0, 0], [1, 0], n=64, collar=0.0)
    # quadratic time warp of the same segment
    warped = pth.reparametrize(gamma, (np.arange(65) / 64) ** 2)
    assert bt.bt_equivalent(gamma, warped, 1e-6)


def test_exp_preserves_windows_flat_bitwise():
    spec = mf.ManifoldSpec.euclidean(2)
    rng = np.random.default_rng(SEED + 4)
    spurred, _, (T, k) = checks._spur_path(spec, rng, n=32)
    field = pth.make_constant_field(spurred, [0.3, -0.2])
    moved = ps.pathspace_exp(spurred, field)
    # mirrored samples stay bitwise equal after the pointwise exponential
    for u in range(k + 1):
        assert np.array_equal(moved.samples[T + u], moved.samples[T + 2 * k - u])


def test_exp_preserves_windows_sphere():
    spec = mf.ManifoldSpec.sphere(1.0)
    rng = np.random.default_rng(SEED + 5)
    spurred, _, (T, k) = checks._spur_path(spec, rng, n=32)
    field = pth.make_constant_field(spurred, [0.1, 0.2, -0.1])
    moved = ps.pathspace_exp(spurred, field)
    for u in range(k + 1):
        d = mf.dist(spec, moved.samples[T + u], moved.samples[T + 2 * k - u])
        assert float(d) <= 1e-9


def test_field_canonical_form_accepts_reflecting_field():
    rng = np.random.default_rng(SEED + 6)
    for spec in specs():
        spurred, _, _ = checks._spur_path(spec, rng, n=32)
        field = pth.make_constant_field(spurred, 0.2 * rng.standard_normal(spec.point_dim))
        out = bt.field_canonical_form(field)
        assert bt.detect_backtracks(out.base) == [] or all(
            # only collar plateaus may remain
            float(
                mf.dist(
                    spec, out.base.samples[w.start], out.base.samples[w.start + 1]
                )
            )
            <= 1e-12
            for w in bt.detect_backtracks(out.base)
        )


def test_field_canonical_form_rejects_non_reflecting_field():
    spec = mf.ManifoldSpec.euclidean(2)
    rng = np.random.default_rng(SEED + 7)
    spurred, _, _ = checks._spur_path(spec, rng, n=16)
    comps = np.outer(np.linspace(0.0, 1.0, len(spurred.samples)), [1.0, 0.0])
    field = pth.PathTangentField(spurred, comps)
    with pytest.raises(mf.DomainError):
        bt.field_canonical_form(field)


def test_window_validation():
    with pytest.raises(mf.DomainError):
        bt.BackTrackWindow(-1, 1)
    with pytest.raises(mf.DomainError):
        bt.BackTrackWindow(0, 0)
    with pytest.raises(mf.DomainError):
        bt.detect_backtracks(abcba_path(), tol=-1.0)
