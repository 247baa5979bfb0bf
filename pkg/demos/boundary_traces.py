"""
Radial traces and point-mass data
=================================

A band-limited boundary function is recovered by ``u(r .)`` as r -> 1, and
for the Dirac mass at the north pole the traces converge in the weak sense.
The second part pairs ``u_{delta_N}(r .)`` against smooth probes.
"""

import math

from ball_dirichlet import PointMassData, Potential, build_quadrature, solve_dirichlet, trace_convergence

pot = Potential.coulomb(1.0)
sol = solve_dirichlet(pot, 3, {(3, 2): 1.0})
radii = [0.9, 0.99, 0.999, 0.9999]
print("   r        sup err      L2 err")
for r, sup, l2 in trace_convergence(sol, None, radii, build_quadrature(3, 40)):
    print(f"{r:<8} {sup:.4e}   {l2:.4e}")
# The error is (1 - r**3 alpha_3(r) / alpha_3(1)) max|Y|, so it decays like (1 - r).

probes = [
    solve_dirichlet(Potential.zero(), 3, {(0, 0): math.sqrt(4 * math.pi)}),
    solve_dirichlet(Potential.zero(), 3, {(1, 0): 1.0}),
]
rows, limits = trace_convergence(None, PointMassData.north(3), radii, probes)
print("\nprobe  limit (f | psi)")
for pid, lim in limits.items():
    print(f"{pid:5d}  {lim.real:.12f}")
for r, pid, val in rows:
    print(f"r = {r:<7} probe {pid}: {val.real:.12f}")
