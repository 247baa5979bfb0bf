"""Dirichlet problem ``Delta u = V(|x|) u`` in the unit ball of R^d (d = 2, 3).

The solution with boundary data ``phi`` is the series

    u(r xi) = sum_{m, j} phi_hat[m, j] / alpha_m(1) * r**m alpha_m(r) Y_j^m(xi),

which requires ``alpha_m(1) != 0`` for every degree.  :func:`check_assumption`
certifies that condition with a finite computation.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.special import jn_zeros, jv

from . import spherical as sph
from .errors import AssumptionError, DomainError
from .spps import ASSUMPTION_TOL, DEFAULT_TOL, RadialGrid, compute_profiles, next_mode_q

DEFAULT_DEGREE = {2: 128, 3: 32}


@dataclass(frozen=True)
class AssumptionReport:
    """Outcome of the nonvanishing check for ``alpha_m(1)``.

    Attributes
    ----------
    m_star : int
        Every degree ``m >= m_star`` is certified by the tail bound.
    checked : dict
        ``m -> alpha_m(1)`` for the degrees below ``m_star``.
    verdict : str
        ``"pass"`` or ``"fail"``.
    offending_modes : list of int
    """

    m_star: int
    checked: dict
    verdict: str
    offending_modes: list = field(default_factory=list)

    @property
    def passed(self):
        return self.verdict == "pass"

    def to_json(self):
        return {
            "verdict": self.verdict,
            "m_star": self.m_star,
            "checked": {str(m): [a.real, a.imag] for m, a in self.checked.items()},
            "offending_modes": list(self.offending_modes),
        }


def certified_degree(pot, d, margin=0.5):
    """Least degree from which ``e**q_m - 1 < margin`` holds for all higher degrees.

    ``q_m = 2 ||V|| / (2m + d - 2)``.  With ``margin <= 1`` this gives
    ``|alpha_m(1) - 1| < margin`` and so ``|alpha_m(1)| > 1 - margin``.  The planar
    degree-0 mode is never covered by this bound.
    """
    if pot.is_zero:
        return 0
    if not 0 < margin <= 1:
        raise ValueError("margin must lie in (0, 1]")
    vnorm = pot.weighted_norm
    m = 1 if d == 2 else 0
    while math.exp(next_mode_q(vnorm, d, m)) - 1.0 >= margin:
        m += 1
    return m


def check_assumption(pot, d, tol_zero=ASSUMPTION_TOL, margin=0.5, grid=None, tol=DEFAULT_TOL, profiles=None):
    """Certify ``alpha_m(1) != 0`` for every degree m.

    Degrees below :func:`certified_degree` are computed; the verdict is
    ``"fail"`` when one of them has ``|alpha_m(1)| <= tol_zero``.

    Examples
    --------
    >>> from ball_dirichlet import Potential
    >>> rep = check_assumption(Potential.coulomb(1.0), 3)
    >>> rep.verdict, rep.m_star
    ('pass', 2)
    """
    m_star = certified_degree(pot, d, margin)
    need = list(range(m_star))
    have = dict(profiles or {})
    missing = [m for m in need if m not in have]
    if missing:
        have.update(compute_profiles(pot, d, missing, grid, tol))
    checked = {m: have[m].alpha_at_1 for m in need}
    bad = [m for m, a in checked.items() if abs(a) <= tol_zero]
    return AssumptionReport(m_star, checked, "fail" if bad else "pass", bad)


def first_dirichlet_eigenvalue(d):
    """``lambda_0 = j_{nu,1}**2`` with ``nu = (d-2)/2``: first Dirichlet eigenvalue of the unit ball."""
    nu = (d - 2) / 2.0
    if nu == 0.5:
        return math.pi**2
    if nu == int(nu):
        return float(jn_zeros(int(nu), 1)[0]) ** 2
    x = np.arange(max(nu, 0.1), nu + 10.0, 0.05)
    f = jv(nu, x)
    k = int(np.nonzero(np.sign(f[1:]) != np.sign(f[:-1]))[0][0])
    return brentq(lambda z: jv(nu, z), x[k], x[k + 1], xtol=1e-15) ** 2


def sufficient_uniqueness(pot, d):
    """Test ``ess inf V > -lambda_0``.

    Returns True or False for real, essentially bounded V and None
    (indeterminate) otherwise.
    """
    lo = pot.essential_infimum()
    if lo is None:
        return None
    return bool(lo > -first_dirichlet_eigenvalue(d))


@dataclass(frozen=True, eq=False)
class DirichletSolution:
    """Truncated series solution; immutable, safe for concurrent evaluation.

    Attributes
    ----------
    d, max_degree : int
    coefficients : dict
        ``HarmonicIndex -> phi_hat / alpha_m(1)``.
    boundary_coefficients : dict
        ``HarmonicIndex -> phi_hat``.
    profiles : dict
        ``m -> RegularProfile``.
    boundary_norm_sq : float
        ``sum |phi_hat|**2``.
    sobolev_half_seminorm : float
        ``sum sqrt(m (m + d - 2)) |phi_hat|**2``.
    tail_energy : float or None
        Boundary energy above ``max_degree`` (only when samples were given).
    """

    d: int
    max_degree: int
    coefficients: dict = field(repr=False)
    boundary_coefficients: dict = field(repr=False)
    profiles: dict = field(repr=False)
    boundary_norm_sq: float
    sobolev_half_seminorm: float
    tail_energy: float = None
    assumption: AssumptionReport = field(default=None, repr=False)

    @property
    def sobolev_finite(self):
        return math.isfinite(self.sobolev_half_seminorm)

    def __call__(self, r, direction):
        return eval_solution(self, r, direction)


def named_boundary(d, name, **params):
    """Coefficient maps of the built-in boundary data.

    ``constant`` (param ``value``), ``harmonic`` (params ``m``, ``j``,
    ``value``) and ``cos`` (``cos theta`` for d = 2, ``cos theta_1 = z`` for d = 3).
    """
    if name == "constant":
        v = complex(params.get("value", 1.0))
        return {sph.HarmonicIndex(0, 0): v * (math.sqrt(4.0 * math.pi) if d == 3 else 1.0)}
    if name == "harmonic":
        idx = sph.check_index(d, (int(params["m"]), int(params["j"])))
        return {idx: complex(params.get("value", 1.0))}
    if name == "cos":
        if d == 2:
            return {sph.HarmonicIndex(1, -1): 0.5 + 0j, sph.HarmonicIndex(1, 1): 0.5 + 0j}
        return {sph.HarmonicIndex(1, 0): complex(math.sqrt(4.0 * math.pi / 3.0))}
    raise DomainError(f"unknown built-in boundary {name!r}")


def _normalize_coefficients(d, coeffs):
    out = {}
    for key, val in coeffs.items():
        if isinstance(key, str):
            key = tuple(int(x) for x in key.split(","))
        idx = sph.check_index(d, key)
        out[idx] = out.get(idx, 0j) + complex(val)
    return out


def solve_dirichlet(
    pot,
    d,
    boundary,
    max_degree=None,
    grid=None,
    tol=DEFAULT_TOL,
    quadrature=None,
    threads=None,
    tol_zero=ASSUMPTION_TOL,
    parseval_tol=1e-6,
):
    """Assemble the truncated series solution.

    Parameters
    ----------
    pot : Potential
    d : {2, 3}
    boundary : dict, callable or array
        A coefficient map ``{(m, j): phi_hat}``; a callable evaluated at the
        quadrature nodes (unit vectors, shape ``(Q, d)``); or samples on
        ``quadrature``.
    max_degree : int, optional
        Truncation degree M; defaults to the largest degree present in a
        coefficient map, otherwise 32 (d = 3) or 128 (d = 2).
    quadrature : SphereQuadrature, optional
        Built for degree M when omitted.

    Raises
    ------
    AssumptionError
        If some ``alpha_m(1)`` vanishes numerically, naming the degrees.
    """
    if d not in (2, 3):
        raise DomainError("full Dirichlet solves are implemented for d = 2 and d = 3")
    grid = grid or RadialGrid()
    tail = None
    if isinstance(boundary, dict):
        phi_hat = _normalize_coefficients(d, boundary)
        if max_degree is None:
            max_degree = max((i.m for i in phi_hat), default=0)
        phi_hat = {i: c for i, c in phi_hat.items() if i.m <= max_degree}
    else:
        if max_degree is None:
            max_degree = DEFAULT_DEGREE[d]
        quadrature = quadrature or sph.build_quadrature(d, max_degree)
        samples = boundary(quadrature.nodes) if callable(boundary) else boundary
        phi_hat, info = sph.fourier_analysis(quadrature, samples, max_degree, parseval_tol)
        tail = info["tail_energy"]
    if max_degree < 0:
        raise DomainError("max_degree must be >= 0")

    m_star = certified_degree(pot, d)
    profiles = compute_profiles(pot, d, range(max(max_degree, m_star - 1) + 1), grid, tol, threads)
    report = check_assumption(pot, d, tol_zero, grid=grid, tol=tol, profiles=profiles)
    if not report.passed:
        raise AssumptionError(
            f"alpha_m(1) vanishes for m in {report.offending_modes}; the Dirichlet problem is not uniquely solvable",
            report.offending_modes,
        )
    profiles = {m: p for m, p in profiles.items() if m <= max_degree}
    coeffs = {i: c / profiles[i.m].alpha_at_1 for i, c in phi_hat.items()}
    norm_sq = float(sum(abs(c) ** 2 for c in phi_hat.values()))
    semi = float(sum(math.sqrt(i.m * (i.m + d - 2)) * abs(c) ** 2 for i, c in phi_hat.items()))
    return DirichletSolution(d, max_degree, coeffs, phi_hat, profiles, norm_sq, semi, tail, report)


def eval_solution(sol, r, direction):
    """``u(r xi)`` for radii ``r`` in [0, 1] and unit vectors ``direction``.

    ``r`` and ``direction`` (shape ``(..., d)``) broadcast against each other.
    """
    r = np.asarray(r, dtype=float)
    direction = np.asarray(direction, dtype=float)
    if np.any(r < 0) or np.any(r > 1):
        raise DomainError("radii must lie in [0, 1]")
    shape = np.broadcast_shapes(r.shape, direction.shape[:-1])
    rr = np.broadcast_to(r, shape).ravel()
    dd = np.broadcast_to(direction, shape + (sol.d,)).reshape(-1, sol.d)
    if not sol.coefficients:
        return np.zeros(shape, dtype=complex)
    L = max(i.m for i in sol.coefficients)
    Y, idx = sph.harmonic_table(sol.d, L, dd)
    cvec = np.array([sol.coefficients.get(i, 0j) for i in idx])
    mvec = np.array([i.m for i in idx])
    radial = np.empty((rr.size, L + 1), dtype=complex)
    for m in range(L + 1):
        radial[:, m] = rr**m * sol.profiles[m].evaluate(rr) if np.any(mvec[cvec != 0] == m) else 0.0
    out = np.sum(Y * cvec[None, :] * radial[:, mvec], axis=1)
    return out.reshape(shape)


def eval_at_points(sol, x):
    """``u(x)`` at Cartesian points ``x`` (shape ``(..., d)``) of the closed ball."""
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x, axis=-1)
    if np.any(r > 1.0 + 1e-14):
        raise DomainError("points must lie in the closed unit ball")
    r = np.minimum(r, 1.0)
    north = np.zeros(sol.d)
    north[-1] = 1.0
    safe = np.where(r[..., None] > 0, x / np.where(r > 0, r, 1.0)[..., None], north)
    return eval_solution(sol, r, safe)


def _radial_integrals(profiles, d, degrees, panels=8, order=32):
    """``R[m, n] = int r^{d-1} (f_m conj f_n + f_m' conj f_n') dr`` and
    ``S[m, n] = int r^{d-3} f_m conj f_n dr`` with ``f_m = r^m alpha_m``.

    Gauss-Legendre in ``t = r**(1/gamma)`` on equal panels; the integrands are
    smooth in t.
    """
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, 1.0, panels + 1)
    tq = np.concatenate([0.5 * (b - a) * x + 0.5 * (a + b) for a, b in zip(edges[:-1], edges[1:])])
    wq = np.concatenate([0.5 * (b - a) * w for a, b in zip(edges[:-1], edges[1:])])
    g = next(iter(profiles.values())).grid.gamma
    r = tq**g
    jac = g * tq ** (g - 1.0)
    f, fp = {}, {}
    for m in degrees:
        a = profiles[m].evaluate(r)
        ap = profiles[m].evaluate_derivative(r)
        f[m] = r**m * a
        fp[m] = m * r ** (m - 1.0) * a + r**m * ap if m else ap
    n = len(degrees)
    R = np.zeros((n, n), dtype=complex)
    S = np.zeros((n, n), dtype=complex)
    for i, m in enumerate(degrees):
        for k, mm in enumerate(degrees):
            R[i, k] = np.sum(wq * jac * r ** (d - 1) * (f[m] * np.conj(f[mm]) + fp[m] * np.conj(fp[mm])))
            S[i, k] = np.sum(wq * jac * r ** (d - 3.0) * f[m] * np.conj(f[mm]))
    return R, S


def w12_gram(pot, d=3, degrees=range(6), quadrature=None, grid=None, profiles=None, tol=DEFAULT_TOL):
    """Gram matrix of ``r^m alpha_m(r) Y(xi)`` in ``W^{1,2}`` of the ball.

    The gradient splits into ``f' Y r_hat + (f / r) grad_S Y``; the spherical
    factors ``<Y, Y'>`` and ``<grad_S Y, grad_S Y'>`` are evaluated by
    quadrature, the radial ones on the profiles.  Returns ``(G, indices)``.
    """
    degrees = sorted(set(int(m) for m in degrees))
    if d == 2 and 0 in degrees:
        raise DomainError("the planar degree-0 mode may lie outside W^{1,2}; use degrees >= 1")
    if d not in (2, 3):
        raise DomainError("w12 check implemented for d = 2 and d = 3")
    L = max(degrees)
    quadrature = quadrature or sph.build_quadrature(d, L + 1)
    if profiles is None:
        profiles = compute_profiles(pot, d, degrees, grid, tol)
    R, S = _radial_integrals(profiles, d, degrees)
    Y, idx = quadrature.harmonics(L)
    if d == 3:
        gt, gp, _ = sph.surface_gradient_table(L, quadrature.theta, quadrature.phi)
        G1 = (np.conj(gt).T * quadrature.weights) @ gt + (np.conj(gp).T * quadrature.weights) @ gp
    else:
        js = np.array([i.j for i in idx])
        dY = 1j * js[None, :] * Y
        G1 = (np.conj(dY).T * quadrature.weights) @ dY
    G0 = (np.conj(Y).T * quadrature.weights) @ Y
    keep = [k for k, i in enumerate(idx) if i.m in degrees]
    pos = {m: i for i, m in enumerate(degrees)}
    rows = [idx[k] for k in keep]
    rm = np.array([pos[i.m] for i in rows])
    # <U_a, U_b> = R[m_a, m_b] <Y_a, Y_b> + S[m_a, m_b] <grad Y_a, grad Y_b>, with conj on b
    G0k = G0[np.ix_(keep, keep)].T
    G1k = G1[np.ix_(keep, keep)].T
    G = R[np.ix_(rm, rm)] * G0k + S[np.ix_(rm, rm)] * G1k
    return G, rows


def w12_orthogonality_check(pot, d=3, degrees=range(6), quadrature=None, grid=None, profiles=None):
    """Largest normalized off-diagonal entry ``|G_ab| / sqrt(G_aa G_bb)`` of :func:`w12_gram`."""
    G, _ = w12_gram(pot, d, degrees, quadrature, grid, profiles)
    diag = np.sqrt(np.abs(np.diag(G)))
    ratio = np.abs(G) / np.outer(diag, diag)
    np.fill_diagonal(ratio, 0.0)
    return float(ratio.max()) if ratio.size > 1 else 0.0
