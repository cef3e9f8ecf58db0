"""Directional zeta functions of x2,x3 and synchronization counts.

Shows the rational zeta function in each cone, compares its logarithm with
the periodic point counts, and traces the strong synchronization counts
for x1, x2, x3 on the 2,3-solenoid.
"""

from rankone.actions import catalog
from rankone.sync import rstar_trace, sync_family, sync_growth_rate, weak_sync_count
from rankone.zeta import directional_zeta_x2x3, omega_envelope, omega_set, x2x3_cone, zeta_series_check

spec = catalog("times2_times3")
for n in [(1, 1), (-1, 1), (-2, 1), (-1, -1), (1, -1), (2, -1)]:
    z = directional_zeta_x2x3(n)
    print(f"n={n}: cone {x2x3_cone(n)}, zeta = {z}, series check {zeta_series_check(spec, n, z, 8)}")

env = omega_envelope(omega_set(40), bins=72)
print("Omega envelope, first samples (theta, y):", [(round(t, 3), round(y, 4)) for t, y in env[:4]])

fam = sync_family()
print("weak counts x3 vs x2:", [weak_sync_count(fam, "x3", "x2", n) for n in range(1, 9)])
print("growth rate r =", sync_growth_rate(fam))
for row in rstar_trace(fam, 12)[-3:]:
    print(f"n={row.n}: strong count {row.count}, n-th root {row.root:.5f}")
