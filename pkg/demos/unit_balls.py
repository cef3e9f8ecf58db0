"""Entropy unit balls of the three catalog examples.

Prints the vertices, volume and Fried average entropy of each unit ball,
in nats and in bits where the Lyapunov vectors are multiples of log 2.
"""

import math

from rankone.actions import catalog, lyapunov_list
from rankone.entropy_geometry import entropy_bounds, fried_average_entropy, polytope_volume, unit_ball

for name in ("times2_times3", "ledrappier", "toral_sqrt2_sqrt5"):
    spec = catalog(name)
    L = lyapunov_list(spec)
    P = unit_ball(spec)
    c1, c2 = entropy_bounds(L)
    print(f"{name}: d={spec.d}, {len(P.vertices)} vertices, {P.n_facets} facets")
    print(f"  vol(U) = {polytope_volume(P):.10f}")
    print(f"  h*     = {fried_average_entropy(spec):.10f}")
    print(f"  C1 = {c1:.6f}, C2 = {c2:.6f}")

# Ledrappier in bits: every Lyapunov vector is an integer multiple of log 2
L = lyapunov_list(catalog("ledrappier")).array / math.log(2)
print("ledrappier Lyapunov vectors in bits:", L.round().astype(int).tolist())
