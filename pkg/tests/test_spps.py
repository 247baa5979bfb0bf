import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from scipy.special import hyp0f1

from ball_dirichlet import (
    ConvergenceError,
    DomainError,
    ModeIndex,
    Potential,
    RadialGrid,
    compute_profile,
    compute_profile_singular,
    compute_profiles,
    profile_for,
    refine_profile,
)
from ball_dirichlet.spps import derived_constants, tail_mass, truncation_depth

# alpha_m(1) for V = a r**p: 0F1(; n/mu + 1; a / mu**2), mu = p + 2, frozen at 20 digits (mpmath)
FROZEN = {
    ("coulomb", 3): [1.5906368546373290634, 1.2764397554391159316, 1.1790815187758042785, 1.0866160620466118047, 1.0464565502497851317],
    ("coulomb", 2): [2.2795853023360672674, 1.3778968953974764081, 1.2174856795003257177, 1.0947958525387763425, 1.0487171481983974386],
    ("power", 3): [3.2110946876420527708, 1.7377289985450714678, 1.4309271317023103232, 1.1892093749307433915, 1.0973796400417193983],
    ("power", 2): [11.301921952136330496, 2.1244135614803834848, 1.5450635996235348305, 1.2088392345062669468, 1.1023541239756520552],
    ("constant", 3): [-0.0065407069689386402128, 0.29797360977311618021, 0.45677147511308223063, 0.6735970775551266055, 0.80306192622354900908],
    ("constant", 2): [-0.31004478898638262993, 0.17482385283132812957, 0.3878949134541686076, 0.65049990640236674548, 0.79494948389269386135],
}
POTS = {"coulomb": Potential.coulomb(1.0), "power": Potential.power(1.0, -1.5), "constant": Potential.constant(-10.0)}
DEGREES = (0, 1, 2, 5, 10)


@pytest.mark.parametrize("key", sorted(FROZEN))
def test_alpha_at_one_frozen(key):
    name, d = key
    got = [profile_for(POTS[name], ModeIndex(d, m)).alpha_at_1 for m in DEGREES]
    assert_allclose(np.array(got).real, FROZEN[key], rtol=1e-9)


def test_mode_index():
    mi = ModeIndex(3, 2)
    assert (mi.ell, mi.n, mi.singular) == (2.0, 5, False)
    assert ModeIndex(2, 0).singular
    assert ModeIndex(4, 1).ell == 1.5
    with pytest.raises(DomainError):
        ModeIndex(1, 0)
    with pytest.raises(DomainError):
        ModeIndex(3, -1)


def test_zero_potential_profile():
    p = compute_profile(Potential.zero(), ModeIndex(3, 4))
    assert p.truncation_K == 0
    assert_allclose(p.alpha, 1.0)
    assert p.alpha_at_1 == 1.0


def test_singular_dispatch():
    with pytest.raises(DomainError):
        compute_profile(Potential.coulomb(1.0), ModeIndex(2, 0))
    p = compute_profile_singular(Potential.coulomb(1.0))
    assert_allclose(p.alpha_at_1.real, FROZEN[("coulomb", 2)][0], rtol=1e-9)


def test_complex_strength():
    p = profile_for(Potential.coulomb(1 + 2j), ModeIndex(3, 1))
    assert_allclose(p.alpha_at_1, 1.1594285376004636164 + 0.59598572587950466538j, rtol=1e-9)


def test_interior_values_and_derivative():
    pot = Potential.coulomb(1.0)
    p = profile_for(pot, ModeIndex(3, 3))
    assert_allclose(p.evaluate(0.7).real, 1.0909834539482636535, rtol=1e-10)
    assert_allclose(p.evaluate(0.0), 1.0)
    q = profile_for(pot, ModeIndex(3, 1))
    assert_allclose(q.evaluate_derivative(0.5).real, 0.27606686012071711435, rtol=1e-8)


def test_constant_potential_interior():
    p = profile_for(Potential.constant(-10.0), ModeIndex(3, 2))
    r = np.linspace(0.05, 1.0, 9)
    assert_allclose(p.evaluate(r).real, hyp0f1(3.5, -2.5 * r**2), rtol=1e-9)


def test_truncation_certificate():
    p = profile_for(Potential.coulomb(1.0), ModeIndex(3, 0))
    assert p.tail_bound < 1e-12
    assert tail_mass(p.q, p.truncation_K) == pytest.approx(p.tail_bound)
    assert p.majorant_ratio <= 1.0 + 1e-8
    with pytest.raises(ConvergenceError):
        truncation_depth(50.0, 1e-12, cap=20)


def test_derived_constants():
    pot = Potential.coulomb(1.0)
    profs = [profile_for(pot, ModeIndex(3, m)) for m in (0, 1)]
    c = derived_constants(profs)
    assert c["C0"] == pytest.approx(math.exp(profs[0].q))
    assert c["C4"] >= 1.0 / abs(profs[0].alpha_at_1)


def test_parallel_matches_serial():
    pot = Potential.power(1.0, -1.5)
    par = compute_profiles(pot, 3, range(6), threads=4)
    for m in range(6):
        assert par[m].alpha_at_1 == profile_for(pot, ModeIndex(3, m)).alpha_at_1


def test_grid_refinement_is_stable():
    pot = Potential.power(1.0, -1.5)
    coarse = profile_for(pot, ModeIndex(3, 2), RadialGrid(500))
    fine = refine_profile(pot, ModeIndex(3, 2), RadialGrid(500))
    assert_allclose(coarse.alpha_at_1, fine.alpha_at_1, rtol=1e-9)


def test_export_rows():
    p = profile_for(Potential.coulomb(1.0), ModeIndex(3, 0), RadialGrid(64))
    rows = p.to_rows()
    assert rows.shape == (64, 5)
    assert rows[-1, 0] == 1.0
    assert p.summary()["K"] == p.truncation_K


@settings(max_examples=15, deadline=None)
@given(st.floats(-5.0, 5.0), st.floats(-1.5, 2.0), st.integers(0, 6), st.sampled_from([2, 3, 4]))
def test_power_family_closed_form(a, p, m, d):
    pot = Potential.power(a, p)
    mode = ModeIndex(d, m)
    mu = p + 2.0
    n = 2 * m + d - 2
    expected = hyp0f1(n / mu + 1.0, a / mu**2)
    assert_allclose(profile_for(pot, mode).alpha_at_1.real, expected, rtol=1e-8, atol=1e-10)
