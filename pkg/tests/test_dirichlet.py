import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from ball_dirichlet import (
    AssumptionError,
    Potential,
    build_quadrature,
    check_assumption,
    eval_at_points,
    eval_harmonic,
    eval_solution,
    first_dirichlet_eigenvalue,
    named_boundary,
    solve_dirichlet,
    sufficient_uniqueness,
    w12_orthogonality_check,
)
from ball_dirichlet import spherical as sph
from ball_dirichlet.oracle import coulomb_alpha


def test_assumption_verdicts():
    rep = check_assumption(Potential.coulomb(1.0), 3)
    assert rep.passed and rep.m_star == 2
    assert_allclose(rep.checked[0].real, 1.5906368546373291, rtol=1e-9)
    bad = check_assumption(Potential.constant(-math.pi**2), 3)
    assert bad.verdict == "fail" and bad.offending_modes == [0]
    assert abs(bad.checked[0]) <= 1e-6
    assert check_assumption(Potential.zero(), 2).m_star == 0


def test_assumption_report_json():
    js = check_assumption(Potential.coulomb(1.0), 3).to_json()
    assert js["verdict"] == "pass" and js["m_star"] == 2 and set(js["checked"]) == {"0", "1"}


def test_solve_refuses_failing_potential():
    with pytest.raises(AssumptionError) as info:
        solve_dirichlet(Potential.constant(-math.pi**2), 3, {(0, 0): 1.0})
    assert info.value.offending_modes == [0]


def test_uniqueness_criterion():
    assert_allclose(first_dirichlet_eigenvalue(3), math.pi**2)
    assert_allclose(first_dirichlet_eigenvalue(2), 2.404825557695773**2)
    assert sufficient_uniqueness(Potential.constant(-5.0), 3) is True
    assert sufficient_uniqueness(Potential.constant(-10.0), 3) is False
    assert sufficient_uniqueness(Potential.coulomb(1.0), 3) is None


def test_coulomb_single_mode():
    pot = Potential.coulomb(1.0)
    sol = solve_dirichlet(pot, 3, {(1, 0): 1.0})
    north = np.array([0.0, 0.0, 1.0])
    expected = 0.5 * coulomb_alpha(1.0, 1, 0.5) / coulomb_alpha(1.0, 1, 1.0) * math.sqrt(3 / (4 * math.pi))
    assert_allclose(eval_solution(sol, 0.5, north).real, expected, rtol=1e-10)


def test_planar_cosine_is_harmonic_extension():
    sol = solve_dirichlet(Potential.zero(), 2, named_boundary(2, "cos"))
    assert_allclose(eval_solution(sol, 0.5, [1.0, 0.0]), 0.5, atol=1e-14)


def test_constant_boundary_zero_potential():
    sol = solve_dirichlet(Potential.zero(), 3, named_boundary(3, "constant", value=2.0))
    x = np.array([[0.1, -0.2, 0.3], [0.0, 0.0, 0.0]])
    assert_allclose(eval_at_points(sol, x), 2.0, atol=1e-14)


def test_sampled_boundary_matches_coefficients():
    pot = Potential.power(1.0, -1.5)
    q = build_quadrature(3, 6)
    samples = eval_harmonic(3, (2, 1), q.nodes) + 0.5 * eval_harmonic(3, (0, 0), q.nodes)
    a = solve_dirichlet(pot, 3, samples, max_degree=6, quadrature=q)
    b = solve_dirichlet(pot, 3, {(2, 1): 1.0, (0, 0): 0.5}, max_degree=6)
    pts = sph.from_angles(np.array([0.3, 1.7]), np.array([2.0, 5.0]))
    assert_allclose(eval_solution(a, 0.8, pts), eval_solution(b, 0.8, pts), atol=1e-12)
    assert a.tail_energy < 1e-20


def test_callable_boundary():
    sol = solve_dirichlet(Potential.zero(), 3, lambda p: p[:, 2], max_degree=4)
    assert_allclose(sol.boundary_coefficients[(1, 0)], math.sqrt(4 * math.pi / 3), rtol=1e-13)


def test_boundary_cancellation():
    pot = Potential.coulomb(1.0)
    coeffs = {(3, 2): 1.0, (5, -4): 0.5j, (0, 0): 2.0}
    sol = solve_dirichlet(pot, 3, coeffs)
    pts = sph.from_angles(np.linspace(0.1, 3.0, 7), np.linspace(0.0, 6.0, 7))
    truth = sum(c * eval_harmonic(3, k, pts) for k, c in coeffs.items())
    assert_allclose(eval_solution(sol, 1.0, pts), truth, rtol=1e-12)


def test_sobolev_seminorm():
    sol = solve_dirichlet(Potential.zero(), 3, {(2, 0): 1.0, (1, 1): 2.0})
    assert_allclose(sol.boundary_norm_sq, 5.0)
    assert_allclose(sol.sobolev_half_seminorm, math.sqrt(6) + 4 * math.sqrt(2))
    assert sol.sobolev_finite


def test_w12_orthogonality():
    worst = w12_orthogonality_check(Potential.coulomb(1.0), 3, range(4))
    assert worst < 1e-10
