import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from ball_dirichlet import (
    DomainError,
    KernelEvaluator,
    PointMassData,
    Potential,
    TruncationError,
    build_quadrature,
    eval_harmonic,
    eval_kernel,
    eval_solution,
    poisson_integral,
    solve_dirichlet,
    solve_measure,
    trace_convergence,
)

# sum_m (2m+1)/(4 pi) P_m(t) r^m alpha_m(r)/alpha_m(1) for coulomb(1), d = 3, mpmath at 30 digits
COULOMB_R05_T03 = 0.048356164634115345262
COULOMB_R05_T1 = 0.43152895197955271102


@pytest.fixture(scope="module")
def harmonic3():
    return KernelEvaluator(Potential.zero(), 3, m_cap=400)


@pytest.fixture(scope="module")
def coulomb3():
    return KernelEvaluator(Potential.coulomb(1.0), 3, m_cap=200)


def test_classical_kernel_d3(harmonic3):
    r, t = 0.5, 0.3
    exact = (1 - r**2) / (4 * math.pi * (1 - 2 * r * t + r**2) ** 1.5)
    assert_allclose(eval_kernel(harmonic3, r, t), exact, rtol=1e-9)


def test_classical_kernel_d2():
    K = KernelEvaluator(Potential.zero(), 2)
    r, dth = 0.6, 1.1
    exact = (1 - r**2) / (2 * math.pi * (1 - 2 * r * math.cos(dth) + r**2))
    assert_allclose(eval_kernel(K, r, math.cos(dth)), exact, rtol=1e-9)


def test_kernel_at_origin(coulomb3):
    assert_allclose(eval_kernel(coulomb3, 0.0, 0.2), 1 / (4 * math.pi * 1.5906368546373291), rtol=1e-9)


def test_coulomb_kernel_frozen(coulomb3):
    assert_allclose(eval_kernel(coulomb3, 0.5, 0.3).real, COULOMB_R05_T03, rtol=1e-9)
    assert_allclose(eval_kernel(coulomb3, 0.5, 1.0).real, COULOMB_R05_T1, rtol=1e-9)


def test_truncation_certificate(coulomb3):
    eps = 1e-10
    M, bound = coulomb3.truncation(0.6, eps)
    assert bound < eps
    ref = coulomb3.partial_sum(0.6, 0.4, 2 * M)
    assert abs(coulomb3.partial_sum(0.6, 0.4, M) - ref) < eps


def test_domain_and_cap():
    K = KernelEvaluator(Potential.coulomb(1.0), 3)
    with pytest.raises(DomainError):
        eval_kernel(K, 1.0, 0.0)
    with pytest.raises(DomainError):
        K.truncation(0.9995)
    with pytest.raises(TruncationError) as info:
        eval_kernel(K, 0.95, 0.0, 1e-12)
    assert info.value.cap == 96 and info.value.needed > 96


def test_symmetry(coulomb3):
    rng = np.random.default_rng(1)
    xi, zeta = rng.normal(size=(2, 3))
    xi /= np.linalg.norm(xi)
    zeta /= np.linalg.norm(zeta)
    assert eval_kernel(coulomb3, 0.4, xi @ zeta) == eval_kernel(coulomb3, 0.4, zeta @ xi)


def test_mean_value(harmonic3):
    q = build_quadrature(3, 40)
    val = poisson_integral(harmonic3, q, np.ones(len(q)), 0.5, [0.0, 0.6, 0.8])
    assert_allclose(val, 1.0, atol=1e-8)


def test_poisson_integral_matches_series(coulomb3):
    q = build_quadrature(3, 60)
    samples = eval_harmonic(3, (3, 2), q.nodes)
    sol = solve_dirichlet(Potential.coulomb(1.0), 3, {(3, 2): 1.0})
    xi = np.array([0.48, 0.6, 0.64])
    assert_allclose(poisson_integral(coulomb3, q, samples, 0.4, xi), eval_solution(sol, 0.4, xi), atol=1e-8)


def test_point_mass_classical(harmonic3):
    f = PointMassData.north(3)
    r, xi = 0.7, np.array([0.6, 0.0, 0.8])
    exact = (1 - r**2) / (4 * math.pi * np.linalg.norm(r * xi - [0, 0, 1]) ** 3)
    assert_allclose(solve_measure(harmonic3, f, r, xi), exact, rtol=1e-6)
    assert solve_measure(harmonic3, PointMassData.north(3, 0.0), r, xi) == 0


def test_point_mass_normalizes():
    f = PointMassData([[0.0, 0.0, 3.0], [1.0, 1.0, 0.0]], [1.0, 2.0])
    assert_allclose(np.linalg.norm(f.points, axis=1), 1.0, atol=1e-15)
    with pytest.raises(DomainError):
        PointMassData([[0.0, 0.0, 1.0]], [1.0, 2.0])


def test_trace_pairing_constant_probe():
    ps = solve_dirichlet(Potential.zero(), 3, {(0, 0): math.sqrt(4 * math.pi)})
    rows, limits = trace_convergence(None, PointMassData.north(3), [0.5, 0.9, 0.99], [ps])
    assert_allclose([v for _, _, v in rows], 1.0, atol=1e-12)
    assert_allclose(limits[0], 1.0, atol=1e-12)


def test_trace_pairing_single_mode():
    y = eval_harmonic(3, (1, 0), [0.0, 0.0, 1.0])
    ps = solve_dirichlet(Potential.zero(), 3, {(1, 0): 1.0})
    rows, limits = trace_convergence(None, PointMassData.north(3), [0.5, 0.9], [ps])
    assert_allclose([v for _, _, v in rows], [0.5 * y, 0.9 * y], rtol=1e-12)
    assert_allclose(limits[0], y)


def test_trace_errors_zero_potential():
    sol = solve_dirichlet(Potential.zero(), 3, {(2, 1): 1.0})
    rows = trace_convergence(sol, None, [0.9, 0.99, 0.999], build_quadrature(3, 8))
    sups = [s for _, s, _ in rows]
    assert sups[0] > sups[1] > sups[2]
    with pytest.raises(DomainError):
        trace_convergence(sol, None, [1.0], build_quadrature(3, 8))


def test_concurrent_first_touch():
    K = KernelEvaluator(Potential.power(1.0, -1.5), 3)
    with ThreadPoolExecutor(8) as ex:
        profs = list(ex.map(lambda _: K.profile(7), range(16)))
    assert all(p is profs[0] for p in profs)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.0, 0.85), st.floats(-1.0, 1.0))
def test_classical_kernel_property(harmonic3, r, t):
    exact = (1 - r * r) / (4 * math.pi * (1 - 2 * r * t + r * r) ** 1.5)
    assert_allclose(eval_kernel(harmonic3, r, t, 1e-12), exact, rtol=1e-8)
