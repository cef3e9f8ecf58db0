"""Convex hulls of the sets {n : |Fix(alpha^n)| <= N} for x2,x3.

The hull area divided by log(N)^2 approaches the area of the entropy unit
ball as N grows.  The Ledrappier example has directions with infinitely
many n of bounded count, which the scan reports as an infinite hull.
"""

from rankone.actions import catalog
from rankone.entropy_geometry import polytope_volume, unit_ball
from rankone.errors import InfiniteHull
from rankone.periodic import hull_experiment

x2x3 = catalog("times2_times3")
target = polytope_volume(unit_ball(x2x3))
for rec in hull_experiment(x2x3, [10, 20, 40, 80]):
    print(f"logN={rec.logN:5.1f}  points={rec.n_points:6d}  ratio={rec.ratio:.4f}  "
          f"ratio/vol(U)={rec.ratio / target:.4f}  inner exceptions={rec.inner_exceptions}")

led = catalog("ledrappier")
try:
    hull_experiment(led, [20])
except InfiniteHull as exc:
    print("ledrappier:", exc)
(rec,) = hull_experiment(led, [40], expansive_only=True)
print(f"ledrappier, expansive directions only: ratio/vol(U)={rec.ratio / polytope_volume(unit_ball(led)):.4f}")
