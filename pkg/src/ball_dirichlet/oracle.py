"""Independent references for the series engine.

Two kinds of oracle live here:

* :func:`shoot` integrates the perturbed Bessel equation with an adaptive
  embedded Runge-Kutta pair (``scipy.integrate.solve_ivp``, DOP853);
* :func:`bessel_I` and :func:`closed_form_alpha` evaluate special-function
  closed forms for the Coulomb and constant potentials.

Nothing in the main library imports this module.
"""

import math

import numpy as np
from scipy.integrate import solve_ivp
from scipy.special import hyp0f1

from .errors import DomainError, OracleError


def bessel_I(order, x):
    """Modified Bessel function ``I_order(x)`` by its ascending series.

    Parameters
    ----------
    order : float
        Nonnegative order.
    x : float
        Argument in [0, 30].

    Notes
    -----
    Terms ``(x/2)**(order + 2k) / (k! Gamma(order + k + 1))`` are summed until
    the ratio of the current term to the partial sum drops below 1e-17.
    """
    order = float(order)
    x = float(x)
    if order < 0 or x < 0:
        raise DomainError("bessel_I needs order >= 0 and x >= 0")
    if x > 30.0:
        raise DomainError("ascending series is only used for x <= 30")
    if x == 0.0:
        return 1.0 if order == 0.0 else 0.0
    half = 0.5 * x
    try:
        term = math.exp(order * math.log(half) - math.lgamma(order + 1.0))
    except OverflowError as exc:
        raise DomainError("bessel_I overflows for these arguments") from exc
    total = term
    k = 0
    while True:
        k += 1
        term *= half * half / (k * (order + k))
        total += term
        if term <= 1e-17 * total:
            return total


def coulomb_alpha(c, m, r, d=3):
    """Closed-form profile of ``V = c / r`` (real ``c > 0``).

    ``alpha_m(r) = Gamma(n + 1) (c r)**(-n/2) I_n(2 sqrt(c r))`` with
    ``n = 2m + d - 2``; for d = 3 the prefactor is ``(2m+1)! / (cr)**(m + 1/2)``.
    """
    if c <= 0:
        raise DomainError("the Bessel closed form is used for c > 0 only")
    n = 2 * m + d - 2
    z = c * r
    if z == 0.0:
        return 1.0
    return math.exp(math.lgamma(n + 1.0) - 0.5 * n * math.log(z)) * bessel_I(n, 2.0 * math.sqrt(z))


def coulomb_series(c, m, r, d=3, terms=200):
    """``sum_k (c r)**k / (k! (n + 1)_k)``, the series form of :func:`coulomb_alpha`."""
    n = 2 * m + d - 2
    z = c * r
    term, total = 1.0, 1.0
    for k in range(1, terms):
        term *= z / (k * (n + k))
        total += term
        if abs(term) <= 1e-18 * abs(total):
            break
    return total


def closed_form_alpha(pot, d, m, r):
    """Exact profile for zero, constant (via ``0F1``) and positive Coulomb potentials."""
    n = 2 * m + d - 2
    r = np.asarray(r, dtype=float)
    if pot.is_zero:
        return np.ones(r.shape, dtype=complex)
    if pot.kind == "constant":
        # alpha'' + (n+1)/r alpha' = lam alpha  =>  alpha = 0F1(; n/2 + 1; lam r^2 / 4)
        lam = pot.strength
        if lam.imag != 0:
            raise DomainError("closed form implemented for real constants only")
        return np.asarray(hyp0f1(n / 2.0 + 1.0, lam.real * r**2 / 4.0), dtype=complex)
    if pot.kind == "coulomb" and pot.strength.imag == 0 and pot.strength.real > 0:
        c = pot.strength.real
        return np.vectorize(lambda x: complex(coulomb_alpha(c, m, x, d)))(r)
    raise DomainError(f"no closed form for potential kind {pot.kind!r}")


def default_r0(pot, mode):
    """Starting radius for :func:`shoot`.

    With the first Frobenius correction included in the initial data the
    start-up error is of order ``r0**(2 mu)``, ``mu = sigma + 2``; r0 is chosen
    so that this stays near 1e-12, and never above 1e-6.
    """
    mu = pot.sigma + 2.0
    return min(1e-6, 1e-12 ** (1.0 / (2.0 * mu)))


def shoot(pot, mode, r0=None, r1=1.0, tol=1e-10, init_scale=1.0):
    """Integrate the perturbed Bessel equation from near 0 to ``r1``.

    The profile ``alpha = y / r**(l+1)`` is integrated in ``x = log r``,
    where the equation reads ``alpha_xx = -n alpha_x + r**2 V alpha``.  The
    initial data include the leading correction
    ``alpha ~ 1 + C r**mu`` with ``C = Vr(0) / (mu (mu + n))``.

    Returns
    -------
    (y(r1), y'(r1)) : tuple of complex
    """
    if r0 is None:
        r0 = default_r0(pot, mode)
    if not 0.0 < r0 < r1 <= 1.0:
        raise DomainError(f"need 0 < r0 < r1 <= 1, got r0={r0}, r1={r1}")
    n = mode.n
    ell = mode.ell
    mu = pot.sigma + 2.0
    v0 = complex(pot.reduced(0.0)) if not pot.is_zero else 0j
    C = v0 / (mu * (mu + n))
    a0 = init_scale * (1.0 + C * r0**mu)
    b0 = init_scale * C * mu * r0**mu

    def rhs(x, z):
        r = math.exp(x)
        a, b = z[0] + 1j * z[1], z[2] + 1j * z[3]
        f = r * r * complex(pot(r)) * a - n * b
        return [b.real, b.imag, f.real, f.imag]

    sol = solve_ivp(
        rhs,
        (math.log(r0), math.log(r1)),
        [a0.real, a0.imag, b0.real, b0.imag],
        method="DOP853",
        rtol=tol,
        atol=tol * 1e-3,
    )
    if not sol.success:
        raise OracleError(f"shooting failed: {sol.message}")
    a = sol.y[0, -1] + 1j * sol.y[1, -1]
    b = sol.y[2, -1] + 1j * sol.y[3, -1]
    y = r1 ** (ell + 1.0) * a
    yp = r1**ell * ((ell + 1.0) * a + b)
    return complex(y), complex(yp)
