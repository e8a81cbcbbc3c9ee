"""Distance between two latitude circles on the unit sphere.

The circles at colatitudes 3 pi / 8 and 5 pi / 8 are joined pointwise by
meridian arcs of length pi / 4, so the path-space distance is pi / 4 and
the connecting geodesic sheet realizes it exactly.
"""

import math

from pathgeo import manifold as mf
from pathgeo import path as pth
from pathgeo import pathspace as ps

sphere = mf.ManifoldSpec.sphere(1.0)
lat1 = pth.make_latitude_circle(sphere, 3 * math.pi / 8, n=256)
lat2 = pth.make_latitude_circle(sphere, 5 * math.pi / 8, n=256)

dtilde = ps.pathspace_distance(lat1, lat2)
sheet = ps.connecting_geodesic(lat1, lat2, S=64)

print("dtilde            :", dtilde)
print("pi / 4            :", math.pi / 4)
print("sheet length      :", ps.sheet_length(sheet))
print("|difference|      :", abs(ps.sheet_length(sheet) - dtilde))
print("sheet energy      :", ps.sheet_energy(sheet))
print("2 E equals L^2    :", 2 * ps.sheet_energy(sheet), "vs", dtilde**2)
