"""
The generalized Poisson kernel
==============================

With ``V = 0`` the kernel must reduce to the classical
``(1 - r**2) / (omega |r xi - zeta|**d)``.  A Coulomb potential has no such
closed form, yet its Poisson integral must agree with the series solution.
"""

import math

import numpy as np

from ball_dirichlet import (
    KernelEvaluator,
    Potential,
    build_quadrature,
    eval_harmonic,
    eval_kernel,
    eval_solution,
    poisson_integral,
    solve_dirichlet,
)

K0 = KernelEvaluator(Potential.zero(), 3, m_cap=400)
for r in (0.2, 0.5, 0.8):
    t = np.linspace(-1, 1, 5)
    exact = (1 - r * r) / (4 * math.pi * (1 - 2 * r * t + r * r) ** 1.5)
    M, bound = K0.truncation(r, 1e-10)
    print(f"r = {r}: M = {M:3d}, certified tail {bound:.1e}, max rel err {np.max(np.abs(eval_kernel(K0, r, t) / exact - 1)):.1e}")

# The Coulomb kernel applied to a single harmonic returns the series solution.
pot = Potential.coulomb(1.0)
K = KernelEvaluator(pot, 3, m_cap=200)
print("\nconstants: C0 = %.4f, C4 = %.4f, C^d = %.4f" % (K.C0, K.C4, K.Cd))
q = build_quadrature(3, 60)
phi = eval_harmonic(3, (3, 2), q.nodes)
sol = solve_dirichlet(pot, 3, {(3, 2): 1.0})
xi = np.array([0.48, 0.6, 0.64])
for r in (0.3, 0.6):
    print(f"r = {r}: Poisson integral {poisson_integral(K, q, phi, r, xi):.12f}  series {complex(eval_solution(sol, r, xi)):.12f}")
