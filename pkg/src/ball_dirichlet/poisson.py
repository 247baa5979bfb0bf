"""Generalized Poisson kernel and boundary data given by point masses.

The kernel is the zonal series

    P_V(r, t) = sum_m r**m alpha_m(r) / alpha_m(1) * Z_m(t),   t = xi . zeta,

truncated at the smallest M whose certified tail
``C0 C4 C^d sum_{m>M} m**(d-1) r**m`` is below the requested accuracy.
"""

import math
import threading
from dataclasses import dataclass, field

import numpy as np

from . import spherical as sph
from .dirichlet import certified_degree, check_assumption, eval_solution
from .errors import AssumptionError, DomainError, TruncationError
from .spps import ASSUMPTION_TOL, DEFAULT_TOL, ModeIndex, RadialGrid, derived_constants, profile_for

M_CAP = {2: 256, 3: 96}
R_MAX = 0.999
DEFAULT_EPS = 1e-10


def tail_majorant(r, M, k):
    """Upper bound for ``sum_{m > M} m**k r**m``.

    Once the term ratio ``((m+1)/m)**k r`` is below 1 it keeps decreasing, so
    the tail is at most ``(M+1)**k r**(M+1) / (1 - rho)`` with
    ``rho = ((M+2)/(M+1))**k r``; infinity is returned before that point.
    """
    if r == 0.0:
        return 0.0
    rho = ((M + 2.0) / (M + 1.0)) ** k * r
    if rho >= 1.0:
        return math.inf
    return math.exp(k * math.log(M + 1.0) + (M + 1.0) * math.log(r)) / (1.0 - rho)


class KernelEvaluator:
    """Truncated generalized Poisson kernel of a radial potential.

    Profiles are computed lazily and cached up to ``m_cap``.  The cache is
    guarded by per-degree locks, so concurrent first use of one degree
    computes it once; evaluation is otherwise read-only.

    Parameters
    ----------
    pot : Potential
    d : int
        Ambient dimension (any d >= 2; the kernel only needs ``t = xi . zeta``).
    m_cap : int, optional
        Largest degree ever computed (default 96 for d = 3, 256 otherwise).
    r_max : float
        Radii beyond this are refused.
    """

    def __init__(self, pot, d, m_cap=None, grid=None, tol=DEFAULT_TOL, r_max=R_MAX, tol_zero=ASSUMPTION_TOL):
        if d < 2:
            raise DomainError("need d >= 2")
        self.pot = pot
        self.d = int(d)
        self.m_cap = int(m_cap if m_cap is not None else M_CAP.get(d, 256))
        self.grid = grid or RadialGrid()
        self.tol = tol
        self.r_max = r_max
        self._profiles = {}
        self._locks = {}
        self._guard = threading.Lock()
        m_star = certified_degree(pot, self.d)
        warm = range(max(m_star, 1))
        for m in warm:
            self.profile(m)
        report = check_assumption(pot, self.d, tol_zero, grid=self.grid, tol=tol, profiles=self._profiles)
        if not report.passed:
            raise AssumptionError(f"alpha_m(1) vanishes for m in {report.offending_modes}", report.offending_modes)
        self.assumption = report
        consts = derived_constants([self._profiles[m] for m in warm], tol_zero)
        self.C0 = consts["C0"]
        self.C4 = consts["C4"]
        self.Cd = sph.zonal_growth_constant(self.d, self.m_cap)

    def profile(self, m):
        """Profile of degree m, computed on first use."""
        prof = self._profiles.get(m)
        if prof is not None:
            return prof
        if m > self.m_cap:
            raise TruncationError(f"degree {m} exceeds the cap {self.m_cap}", needed=m, cap=self.m_cap)
        with self._guard:
            lock = self._locks.setdefault(m, threading.Lock())
        with lock:
            prof = self._profiles.get(m)
            if prof is None:
                prof = profile_for(self.pot, ModeIndex(self.d, m), self.grid, self.tol)
                self._profiles[m] = prof
        return prof

    @property
    def cached_degrees(self):
        return sorted(self._profiles)

    def truncation(self, r, eps=DEFAULT_EPS):
        """Smallest M with certified tail below ``eps`` at radius r; returns ``(M, bound)``."""
        if not 0.0 <= r < 1.0:
            raise DomainError("the kernel series needs 0 <= r < 1")
        if r > self.r_max:
            raise DomainError(f"radius {r} exceeds r_max = {self.r_max}")
        const = self.C0 * self.C4 * self.Cd
        k = self.d - 1
        M = 0
        while True:
            bound = const * tail_majorant(r, M, k)
            if bound < eps:
                break
            M += 1
            if M > 50 * self.m_cap + 10**5:
                break
        if M > self.m_cap:
            raise TruncationError(
                f"kernel at r = {r} needs M = {M} > cap {self.m_cap} for eps = {eps:g}", needed=M, cap=self.m_cap
            )
        return M, bound

    def radial_factors(self, r, M):
        """``r**m alpha_m(r) / alpha_m(1)`` for m = 0..M, shape ``(M + 1,) + r.shape``."""
        r = np.asarray(r, dtype=float)
        out = np.empty((M + 1,) + r.shape, dtype=complex)
        for m in range(M + 1):
            p = self.profile(m)
            out[m] = r**m * p.evaluate(r) / p.alpha_at_1
        return out

    def partial_sum(self, r, t, M):
        """Kernel series truncated at a given degree M."""
        r, t = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(t, dtype=float))
        Z = sph.zonal_table(self.d, M, t)
        return np.sum(self.radial_factors(r, M) * Z, axis=0)

    def __call__(self, r, t, eps=DEFAULT_EPS):
        return eval_kernel(self, r, t, eps)


def eval_kernel(K, r, t, eps=DEFAULT_EPS):
    """``P_V(r, t)`` with certified truncation error below ``eps``.

    For d = 2 this is the bilateral series over ``m in Z`` folded into cosines.

    >>> from ball_dirichlet import Potential
    >>> K = KernelEvaluator(Potential.zero(), 3, m_cap=200)
    >>> r, t = 0.5, 0.3
    >>> exact = (1 - r**2) / (4 * np.pi * (1 - 2 * r * t + r**2) ** 1.5)
    >>> bool(abs(eval_kernel(K, r, t) - exact) < 1e-9)
    True
    """
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 0.0) or np.any(r_arr >= 1.0):
        raise DomainError("the kernel is evaluated for 0 <= r < 1")
    M, _ = K.truncation(float(np.max(r_arr)), eps)
    val = K.partial_sum(r_arr, t, M)
    return val[()] if val.ndim == 0 else val


def poisson_integral(K, quadrature, samples, r, direction, eps=DEFAULT_EPS):
    """``int phi(zeta) P_V(r, xi . zeta) d sigma_zeta`` by the given quadrature."""
    if quadrature.d != K.d:
        raise DomainError("quadrature and kernel dimensions differ")
    xi = np.asarray(direction, dtype=float)
    t = np.clip(quadrature.nodes @ xi, -1.0, 1.0)
    P = eval_kernel(K, np.full(t.shape, float(r)), t, eps)
    return complex(np.sum(quadrature.weights * np.asarray(samples) * P))


@dataclass(frozen=True, eq=False)
class PointMassData:
    """Finite combination ``sum_i w_i delta_{zeta_i}`` of point masses on the sphere.

    The directions are renormalized to unit length on construction.
    """

    points: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        p = np.atleast_2d(np.asarray(self.points, dtype=float))
        w = np.atleast_1d(np.asarray(self.weights, dtype=complex))
        if p.shape[0] != w.shape[0]:
            raise DomainError("need one weight per point")
        norm = np.linalg.norm(p, axis=1)
        if np.any(norm == 0):
            raise DomainError("point masses need nonzero directions")
        object.__setattr__(self, "points", p / norm[:, None])
        object.__setattr__(self, "weights", w)

    @property
    def d(self):
        return self.points.shape[1]

    @classmethod
    def north(cls, d, weight=1.0):
        """The unit mass at the north pole ``N = e_d``."""
        p = np.zeros((1, d))
        p[0, -1] = 1.0
        return cls(p, [weight])

    def pair(self, psi):
        """``(f | psi) = sum_i w_i psi(zeta_i)`` for a callable on unit vectors."""
        return complex(np.sum(self.weights * np.asarray(psi(self.points))))


def solve_measure(K, f, r, direction, eps=DEFAULT_EPS):
    """``u_f(r xi) = sum_i w_i P_V(r, xi . zeta_i)``."""
    xi = np.asarray(direction, dtype=float)
    t = np.clip(f.points @ xi, -1.0, 1.0)
    P = eval_kernel(K, np.full(t.shape, float(r)), t, eps)
    return complex(np.sum(f.weights * P))


def trace_errors(sol, radii, probes, boundary=None):
    """Sup and L^2 errors of the radial traces ``u(r .)`` against the boundary data.

    Parameters
    ----------
    sol : DirichletSolution
    radii : sequence of float
    probes : SphereQuadrature or array of unit vectors
        With a quadrature the L^2 error uses its weights; for plain points it is
        ``sqrt(omega * mean |err|**2)``.
    boundary : callable, optional
        The exact data; defaults to the degree-M expansion of the solution.

    Returns
    -------
    list of (r, sup_err, l2_err)
    """
    if isinstance(probes, sph.SphereQuadrature):
        pts, w = probes.nodes, probes.weights
    else:
        pts = np.asarray(probes, dtype=float)
        w = np.full(pts.shape[0], sph.surface_area(sol.d) / pts.shape[0])
    target = np.asarray(boundary(pts)) if boundary is not None else eval_solution(sol, 1.0, pts)
    rows = []
    for r in radii:
        err = np.abs(eval_solution(sol, float(r), pts) - target)
        rows.append((float(r), float(err.max()), float(math.sqrt(np.sum(w * err**2)))))
    return rows


def trace_pairings(data, radii, probe_solutions):
    """Pairings ``int u_f(r xi) psi(xi) d sigma`` for point-mass data ``f``.

    By symmetry of the kernel the pairing equals ``sum_i w_i u_psi(r zeta_i)``,
    where ``u_psi`` solves the Dirichlet problem with data ``psi``; this is
    exact for band-limited probes and needs no kernel truncation.

    Returns
    -------
    rows : list of (r, probe_id, value)
    limits : dict probe_id -> (f | psi)
    """
    rows = []
    limits = {}
    for pid, ps in enumerate(probe_solutions):
        limits[pid] = complex(np.sum(data.weights * eval_solution(ps, 1.0, data.points)))
        for r in radii:
            val = complex(np.sum(data.weights * eval_solution(ps, float(r), data.points)))
            rows.append((float(r), pid, val))
    return rows, limits


def trace_convergence(source, data, radii, probes):
    """Dispatch to :func:`trace_errors` (function data) or :func:`trace_pairings` (point masses).

    ``source`` is the DirichletSolution of the data for function data; for
    point masses ``data`` is a :class:`PointMassData` and ``probes`` a list of
    DirichletSolutions of the smooth probes.
    """
    if any(r >= 1.0 for r in radii):
        raise DomainError("trace radii must be < 1")
    if isinstance(data, PointMassData):
        return trace_pairings(data, radii, probes)
    return trace_errors(source, radii, probes, data)
