"""Geodesics between correlation matrices and the rank along the way.

Interior points of a minimizing geodesic keep a constant rank at least as
large as either endpoint's. A segment extended past its natural end can
leave the full-rank stratum in finite time; max_full_rank_interval finds
where.
"""

import numpy as np

from corrgeo import (
    GeodesicSegment,
    geodesic_rank_profile,
    max_full_rank_interval,
    numerical_rank,
    orbit_log,
)

rng = np.random.default_rng(33)
m, k = 5, 3

# rank-1 endpoint: five copies of one direction
u = rng.standard_normal(k)
u /= np.linalg.norm(u)
X = np.tile(u, (m, 1))

# full-rank endpoint
Y = rng.standard_normal((m, k))
Y /= np.linalg.norm(Y, axis=1)[:, None]

print("endpoint ranks:", numerical_rank(X), "and", numerical_rank(Y))

V = orbit_log(X, Y)
seg = GeodesicSegment(start=X, velocity=V, duration=1.0)
profile = geodesic_rank_profile(seg, samples=9)
print("rank along the geodesic:")
for t, r in profile:
    print(f"  t = {t:.3f}  rank {r}")

# a horizontal direction that grinds a full-rank square factor down
X = np.eye(2)
V = np.array([[0.0, 1.0], [0.0, 0.0]])  # rotate row 0 toward row 1
lo, hi = max_full_rank_interval(X, V, t_max_search=4.0)
print()
print("full-rank interval around the identity factor:", (lo, hi))
print("collision at pi/2:", np.isclose(hi, np.pi / 2.0, atol=1e-4))
