"""Back-track erasure and the exchange law, end to end.

Builds a path with an exact retraced spur, erases it, and confirms the
spurred and clean paths are equivalent. Then assembles four worldsheet
segments over two composable seeds and checks that horizontal-then-
vertical composition equals vertical-then-horizontal.
"""

import numpy as np

from pathgeo import backtrack as bt
from pathgeo import category as cat
from pathgeo import manifold as mf
from pathgeo import path as pth

sphere = mf.ManifoldSpec.sphere(1.0)

# a great-circle arc that runs a quarter of the way back on itself
clean = pth.make_great_circle_arc(sphere, [1, 0, 0], [0, 1, 0], n=32, collar=0.0)
mid, k = 16, 8
spur = clean.samples[mid : mid + k + 1]
spurred = pth.DiscretePath(
    sphere,
    np.concatenate([clean.samples[: mid + k + 1], spur[::-1][1:], clean.samples[mid + 1 :]]),
    0.0,
)

windows = bt.detect_backtracks(spurred)
print("windows           :", [(w.start, w.half_width) for w in windows])
print("equivalent to clean:", bt.bt_equivalent(spurred, clean, 1e-6))
print("canonical idempotent:",
      np.max(np.abs(bt.canonical_form(bt.canonical_form(spurred)).samples
                    - bt.canonical_form(spurred).samples)))

# two composable 1-morphisms sharing the field value at the join
a1 = pth.make_great_circle_arc(sphere, [1, 0, 0], [0, 1, 0], n=32)
a2 = pth.make_great_circle_arc(sphere, [0, 1, 0], [0, 0, 1], n=32)
c = np.array([0.3, -0.2, 0.5])
m1 = cat.morphism1(a1, pth.make_constant_field(a1, c), 0.0)
m2 = cat.morphism1(a2, pth.make_constant_field(a2, c), 0.0)

F1 = cat.morphism2(m1, (0.0, 0.5), S=8)
G1 = cat.morphism2(m1, (0.5, 1.0), S=8)
F2 = cat.morphism2(m2, (0.0, 0.5), S=8)
G2 = cat.morphism2(m2, (0.5, 1.0), S=8)

report = cat.check_exchange(F1, G1, F2, G2)
print("exchange passed   :", report.passed)
print("max discrepancy   :", report.max_discrepancy)
