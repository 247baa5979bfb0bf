"""Regular solutions of the perturbed Bessel equation by iterated integrals.

For a mode ``(d, m)`` put ``l = m + (d - 3) / 2`` and ``n = 2 l + 1``.  The
regular solution of

    -y'' + l (l + 1) y / r**2 + V y = 0,        y(r) ~ r**(l + 1)  (r -> 0)

is stored through its normalized profile ``alpha = y / r**(l + 1)``, built as
the series ``alpha = sum_k a_k`` with ``a_0 = 1`` and

    a_k(r) = (1/n) int_0^r s [1 - (s/r)**n] V(s) a_{k-1}(s) ds,
    a_k'(r) = (1/r) int_0^r (s/r)**n s V(s) a_{k-1}(s) ds.

In the planar degree-0 mode (``n = 0``) the kernel becomes ``s log(r/s)``.

Examples
--------
>>> from ball_dirichlet import Potential, ModeIndex, compute_profile
>>> prof = compute_profile(Potential.coulomb(1.0), ModeIndex(3, 0))
>>> round(prof.alpha_at_1.real, 10)
1.5906368546
"""

import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammainc, gammaln

from . import _quadrature as quad
from .errors import AssumptionError, ConvergenceError, DomainError, IntegrabilityError
from .potentials import weighted_integral

K_CAP = 200
DEFAULT_TOL = 1e-12
ASSUMPTION_TOL = 1e-8


@dataclass(frozen=True)
class ModeIndex:
    """Ambient dimension ``d`` and spherical degree ``m`` of a separated mode."""

    d: int
    m: int

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise DomainError(f"dimension must be an integer >= 2, got {self.d}")
        if int(self.m) != self.m or self.m < 0:
            raise DomainError(f"degree must be an integer >= 0, got {self.m}")

    @property
    def ell(self):
        return self.m + (self.d - 3) / 2.0

    @property
    def n(self):
        """``2 l + 1 = 2 m + d - 2``, the exponent of the scaled kernel."""
        return 2 * self.m + self.d - 2

    @property
    def singular(self):
        return self.n == 0


@dataclass(frozen=True)
class RadialGrid:
    """Graded radial grid ``r_i = (i / N)**gamma``, i = 1..N.

    The node ``r = 0`` is kept internally (the profile equals 1 there) but is
    not part of :attr:`nodes`.
    """

    N: int = 2000
    gamma: float = 2.0

    def __post_init__(self):
        if self.N < 16:
            raise ValueError(f"grid size must be at least 16, got {self.N}")
        if not self.gamma >= 1.0:
            raise ValueError(f"grading exponent must be >= 1, got {self.gamma}")

    @property
    def t(self):
        return np.arange(self.N + 1) / self.N

    @property
    def nodes(self):
        return self.t[1:] ** self.gamma

    def refined(self):
        return RadialGrid(2 * self.N, self.gamma)


def tail_mass(q, K):
    """``sum_{k > K} q**k / k!``, the exponential-series remainder."""
    if q == 0.0:
        return 0.0
    return math.exp(q) * float(gammainc(K + 1, q))


def truncation_depth(q, tol, cap=K_CAP):
    """Smallest K whose remainder ``sum_{k>K} q^k/k!`` is below ``tol``."""
    if q == 0.0:
        return 0, 0.0
    for K in range(cap + 1):
        t = tail_mass(q, K)
        if t < tol:
            return K, t
    raise ConvergenceError(
        f"series with q = {q:.6g} needs more than {cap} terms for tolerance {tol:g}"
    )


@dataclass(frozen=True, eq=False)
class RegularProfile:
    """Normalized regular solution of one mode on a radial grid.

    Attributes
    ----------
    mode : ModeIndex
    grid : RadialGrid
    alpha, alpha_prime : ndarray of complex
        ``alpha_m`` and its derivative at ``grid.nodes``.
    alpha_at_1 : complex
    truncation_K : int
        Number of series terms beyond ``a_0``.
    tail_bound : float
        Guaranteed bound on ``sup |alpha - sum_{k<=K} a_k|``.
    q : float
        Series growth parameter; ``|a_k| <= q**k / k!`` on [0, 1].
    weighted_norm : float
        ``int_0^1 s |V(s)| ds`` of the potential.
    majorant_ratio : float
        Largest observed ``|a_k(r)| / bound_k(r)`` over nodes and terms.
    """

    mode: ModeIndex
    grid: RadialGrid
    alpha: np.ndarray = field(repr=False)
    alpha_prime: np.ndarray = field(repr=False)
    alpha_at_1: complex
    truncation_K: int
    tail_bound: float
    q: float
    weighted_norm: float
    majorant_ratio: float
    _alpha_full: np.ndarray = field(repr=False)
    _ralpha_full: np.ndarray = field(repr=False)
    _slope_at_0: complex = field(default=0j, repr=False)

    @property
    def ell(self):
        return self.mode.ell

    @property
    def C0(self):
        """Per-mode bound ``e**q`` on ``|alpha|``."""
        return math.exp(self.q)

    @property
    def derivative_bound(self):
        """D with ``|alpha'(r)| <= D / r`` on (0, 1].

        Each term satisfies ``|r a_k'| <= int_0^r s |V| |a_{k-1}|``, so
        ``D = ||V|| e**q`` is enough.
        """
        return self.weighted_norm * self.C0

    @property
    def C1(self):
        """Constant of ``|alpha'| <= m C1 / r`` for m >= 1."""
        return self.derivative_bound / self.mode.m if self.mode.m else math.nan

    @property
    def C2(self):
        """Constant of ``|alpha_0'| <= C2 / r`` (m = 0 only)."""
        return self.derivative_bound if self.mode.m == 0 else math.nan

    def _interp(self, values, r):
        r = np.asarray(r, dtype=float)
        if np.any(r < 0.0) or np.any(r > 1.0):
            raise DomainError("profiles are defined on [0, 1]")
        N = self.grid.N
        x = r ** (1.0 / self.grid.gamma) * N
        start = np.clip(np.floor(x).astype(int) - 3, 0, N - quad.STENCIL)
        local = x - start
        out = np.zeros(r.shape, dtype=complex)
        for k in range(quad.STENCIL):
            lk = np.ones(r.shape)
            for j in range(quad.STENCIL):
                if j != k:
                    lk = lk * (local - j) / (k - j)
            out = out + lk * values[start + k]
        return out

    def evaluate(self, r):
        """``alpha_m(r)`` for r in [0, 1] by 8-point interpolation in ``t = r**(1/gamma)``."""
        return self._interp(self._alpha_full, r)

    def evaluate_derivative(self, r):
        """``alpha_m'(r)``; interpolates ``r alpha'`` (smooth in t) and divides by r."""
        r = np.asarray(r, dtype=float)
        ra = self._interp(self._ralpha_full, r)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = ra / r
        return np.where(r == 0.0, self._slope_at_0, out)

    def to_rows(self):
        """Rows ``(r, Re a, Im a, Re a', Im a')`` at the grid nodes."""
        return np.column_stack(
            [self.grid.nodes, self.alpha.real, self.alpha.imag, self.alpha_prime.real, self.alpha_prime.imag]
        )

    def summary(self):
        return {
            "d": self.mode.d,
            "m": self.mode.m,
            "ell": self.mode.ell,
            "K": self.truncation_K,
            "tail_bound": self.tail_bound,
            "q": self.q,
            "alpha_at_1": [self.alpha_at_1.real, self.alpha_at_1.imag],
            "C0": self.C0,
            "derivative_bound": self.derivative_bound,
            "majorant_ratio": self.majorant_ratio,
            "grid": {"N": self.grid.N, "gamma": self.grid.gamma},
        }


class _MajorantAudit:
    """Process-wide record of the worst per-term majorant ratio seen."""

    def __init__(self):
        self._lock = threading.Lock()
        self.reset()

    def reset(self):
        with self._lock:
            self.worst = 0.0
            self.count = 0
            self.worst_mode = None

    def record(self, ratio, mode):
        with self._lock:
            self.count += 1
            if ratio > self.worst:
                self.worst = ratio
                self.worst_mode = mode


majorant_audit = _MajorantAudit()


def _log_bound(c, k):
    """log of ``c**k / k!`` (``-inf`` where c = 0)."""
    with np.errstate(divide="ignore"):
        return k * np.log(c) - gammaln(k + 1)


def _term_ratio(log_scale, scaled, log_bound):
    """max of ``|a_k| / bound_k`` computed in logs, ``a_k = exp(log_scale) * scaled``."""
    mag = np.abs(scaled)
    with np.errstate(divide="ignore", invalid="ignore"):
        lr = log_scale + np.log(mag) - log_bound
    lr = np.where(mag == 0.0, -np.inf, lr)
    return float(np.exp(np.max(lr)))


def _slope_at_origin(pot, n):
    """Limit of alpha'(r) as r -> 0 from the leading Frobenius term."""
    if pot.is_zero:
        return 0j
    mu = pot.sigma + 2.0
    if mu > 1.0:
        return 0j
    if mu == 1.0:
        return complex(pot.reduced(0.0)) / (mu + n)
    return complex(np.nan, np.nan)


def _trivial_profile(mode, grid):
    N = grid.N
    ones = np.ones(N + 1, dtype=complex)
    zeros = np.zeros(N + 1, dtype=complex)
    prof = RegularProfile(
        mode=mode,
        grid=grid,
        alpha=ones[1:],
        alpha_prime=zeros[1:],
        alpha_at_1=1 + 0j,
        truncation_K=0,
        tail_bound=0.0,
        q=0.0,
        weighted_norm=0.0,
        majorant_ratio=0.0,
        _alpha_full=ones,
        _ralpha_full=zeros,
    )
    majorant_audit.record(0.0, (mode.d, mode.m))
    return prof


def _finish(mode, grid, alpha, ralpha, K, tail, q, vnorm, ratio, slope):
    alpha.setflags(write=False)
    ralpha.setflags(write=False)
    nodes = grid.nodes
    majorant_audit.record(ratio, (mode.d, mode.m))
    return RegularProfile(
        mode=mode,
        grid=grid,
        alpha=alpha[1:],
        alpha_prime=ralpha[1:] / nodes,
        alpha_at_1=complex(alpha[-1]),
        truncation_K=K,
        tail_bound=tail,
        q=q,
        weighted_norm=vnorm,
        majorant_ratio=ratio,
        _alpha_full=alpha,
        _ralpha_full=ralpha,
        _slope_at_0=slope,
    )


def _setup(pot, grid):
    g = grid.gamma
    t = grid.t
    with np.errstate(divide="ignore"):
        lt = np.log(t)
    vr = g * pot.reduced(t**g)
    gm = g * (pot.sigma + 2.0)
    return t, lt, vr, gm


def _scaled_integral(R, grid, E):
    """``(1/t_j) int_0^{t_j} (t/t_j)**E R dt`` at every node, with the r -> 0 limit at node 0."""
    idx, w = quad.cell_weights(grid.N, E)
    t = grid.t
    psi = quad.scaled_cumulative(quad.increments(idx, w, R), t, E)
    out = np.empty_like(psi)
    out[1:] = psi[1:] / t[1:]
    out[0] = R[0] / (E + 1.0)
    return out, psi


def compute_profile(pot, mode, grid=None, tol=DEFAULT_TOL, k_cap=K_CAP):
    """Regular profile of a mode with ``n = 2m + d - 2 > 0``.

    Parameters
    ----------
    pot : Potential
    mode : ModeIndex
    grid : RadialGrid, optional
        Defaults to ``RadialGrid()`` (N = 2000, gamma = 2).
    tol : float
        Bound for the guaranteed series remainder.
    k_cap : int
        Largest admissible truncation depth.

    Raises
    ------
    IntegrabilityError
        If ``int_0^1 s |V|`` diverges.
    ConvergenceError
        If more than ``k_cap`` terms would be needed.

    Notes
    -----
    Near the origin the k-th term behaves like ``s**(k mu)`` with
    ``mu = sigma + 2``.  The recursion runs on the rescaled terms
    ``a_k / s**(k mu)``, which stay of moderate size, so no term is ever
    resolved relative to its much larger neighbours on the stencil.
    """
    if mode.singular:
        raise DomainError("the planar degree-0 mode needs compute_profile_singular")
    if not tol > 0:
        raise ValueError("tol must be positive")
    grid = grid or RadialGrid()
    if pot.is_zero:
        return _trivial_profile(mode, grid)
    vnorm = pot.weighted_norm
    if not math.isfinite(vnorm):
        raise IntegrabilityError("int_0^1 s |V(s)| ds is not finite")
    n = mode.n
    q = 2.0 * vnorm / n
    K, tail = truncation_depth(q, tol, k_cap)

    t, lt, vr, gm = _setup(pot, grid)
    gn = grid.gamma * n
    # per-term majorant (2 W(r) / n)**k / k!, W(r) = int_0^r s |V|
    _, psi_w = _scaled_integral(np.abs(vr), grid, gm - 1.0)
    with np.errstate(divide="ignore"):
        log_c = math.log(2.0 / n) + (gm - 1.0) * lt[1:] + np.log(psi_w[1:].real)

    alpha = np.ones(grid.N + 1, dtype=complex)
    ralpha = np.zeros(grid.N + 1, dtype=complex)
    scaled = np.ones(grid.N + 1, dtype=complex)
    ratio = 0.0
    for k in range(1, K + 1):
        E = k * gm - 1.0
        R = vr * scaled
        a_hat, _ = _scaled_integral(R, grid, E)
        b_hat, _ = _scaled_integral(R, grid, E + gn)
        scaled = (a_hat - b_hat) / n
        with np.errstate(divide="ignore", invalid="ignore"):
            lp = k * gm * lt
            pw = np.exp(lp)
        pw[0] = 0.0
        alpha += pw * scaled
        ralpha += pw * b_hat
        ratio = max(ratio, _term_ratio(lp[1:], scaled[1:], k * log_c - gammaln(k + 1)))
    return _finish(mode, grid, alpha, ralpha, K, tail, q, vnorm, ratio, _slope_at_origin(pot, n))


def compute_profile_singular(pot, grid=None, tol=DEFAULT_TOL, k_cap=K_CAP):
    """Regular profile of the planar degree-0 mode (``d = 2, m = 0``).

    Here ``alpha_0 = y_0 / sqrt(r)`` with terms
    ``a_k(r) = int_0^r s log(r/s) V(s) a_{k-1}(s) ds``.  The terms obey both
    ``|a_k| <= (r L(r))**k / k!`` with ``L(r) = int_0^r |V|`` and
    ``|a_k| <= Lam(r)**k / k!`` with ``Lam(r) = int_0^r s log(1/s) |V|``; the
    smaller one (at r = 1) sets the stopping depth.  The second bound remains
    finite for potentials such as ``c / r`` whose plain integral diverges.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    grid = grid or RadialGrid()
    mode = ModeIndex(2, 0)
    if pot.is_zero:
        return _trivial_profile(mode, grid)
    vnorm = pot.weighted_norm
    lw = pot.log_weighted_norm
    if lw is None or not math.isfinite(lw):
        raise IntegrabilityError("int_0^1 s (1 - log s) |V(s)| ds diverges")
    lam1 = max(lw - vnorm, 0.0)
    try:
        l1 = weighted_integral(pot, 0.0, 1.0)
    except IntegrabilityError:
        l1 = math.inf
    q = min(lam1, l1)
    K, tail = truncation_depth(q, tol, k_cap)

    g = grid.gamma
    t, lt, vr, gm = _setup(pot, grid)
    beta = gm - 1.0
    absr = np.abs(vr)
    idx, wl = quad.cell_weights(grid.N, beta, True)
    _, psi = _scaled_integral(absr, grid, beta)
    phi = quad.scaled_log_cumulative(quad.increments(idx, wl, absr), psi, t, beta)
    # log of Lam(r) = int_0^r s log(1/s) |V| and, when finite, of r L(r)
    with np.errstate(divide="ignore", invalid="ignore"):
        lam_hat = -g * (phi[1:] + lt[1:] * psi[1:]).real
        log_bounds = [beta * lt[1:] + np.log(np.maximum(lam_hat, 0.0))]
        beta_l = beta - g
        if beta_l > -1.0:
            _, psi_l = _scaled_integral(absr, grid, beta_l)
            log_bounds.append(beta * lt[1:] + np.log(psi_l[1:].real))

    alpha = np.ones(grid.N + 1, dtype=complex)
    ralpha = np.zeros(grid.N + 1, dtype=complex)
    scaled = np.ones(grid.N + 1, dtype=complex)
    ratio = 0.0
    for k in range(1, K + 1):
        E = k * gm - 1.0
        R = vr * scaled
        a_hat, psi_k = _scaled_integral(R, grid, E)
        idx, wl = quad.cell_weights(grid.N, E, True)
        phi_k = quad.scaled_log_cumulative(quad.increments(idx, wl, R), psi_k, t, E)
        scaled = np.empty_like(a_hat)
        scaled[1:] = -g * phi_k[1:] / t[1:]
        scaled[0] = g * R[0] / (E + 1.0) ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            lp = k * gm * lt
            pw = np.exp(lp)
        pw[0] = 0.0
        alpha += pw * scaled
        ralpha += pw * a_hat
        lb = np.minimum.reduce([k * c for c in log_bounds]) - gammaln(k + 1)
        ratio = max(ratio, _term_ratio(lp[1:], scaled[1:], lb))
    slope = complex(np.nan, np.nan) if pot.sigma + 2.0 <= 1.0 else 0j
    return _finish(mode, grid, alpha, ralpha, K, tail, q, vnorm, ratio, slope)


def profile_for(pot, mode, grid=None, tol=DEFAULT_TOL, k_cap=K_CAP):
    """Dispatch to :func:`compute_profile` or :func:`compute_profile_singular`."""
    if mode.singular:
        return compute_profile_singular(pot, grid, tol, k_cap)
    return compute_profile(pot, mode, grid, tol, k_cap)


def compute_profiles(pot, d, degrees, grid=None, tol=DEFAULT_TOL, threads=None):
    """Profiles for several degrees, computed in parallel. Returns ``{m: profile}``."""
    degrees = sorted(set(int(m) for m in degrees))
    grid = grid or RadialGrid()

    def one(m):
        return m, profile_for(pot, ModeIndex(d, m), grid, tol)

    if threads is None or threads <= 1 or len(degrees) <= 1:
        return dict(one(m) for m in degrees)
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return dict(ex.map(one, degrees))


def refine_profile(pot, mode, grid=None, tol=DEFAULT_TOL, change_tol=1e-10, max_doublings=4):
    """Double the grid until ``alpha_m(1)`` moves by less than ``change_tol``.

    Returns the profile on the finest grid used.
    """
    grid = grid or RadialGrid()
    prof = profile_for(pot, mode, grid, tol)
    for _ in range(max_doublings):
        grid = grid.refined()
        finer = profile_for(pot, mode, grid, tol)
        if abs(finer.alpha_at_1 - prof.alpha_at_1) < change_tol:
            return finer
        prof = finer
    raise ConvergenceError(
        f"alpha_{mode.m}(1) still changing after {max_doublings} grid doublings (N = {grid.N})"
    )


def next_mode_q(weighted_norm, d, m):
    """Growth parameter ``2 ||V|| / (2m + d - 2)`` of a regular mode."""
    return 2.0 * weighted_norm / (2 * m + d - 2)


def derived_constants(profiles, tol_zero=ASSUMPTION_TOL):
    """Global constants ``C0`` and ``C4`` from a set of profiles of one potential.

    ``C0`` is the largest per-mode bound ``e**q``.  ``C4`` bounds
    ``1 / |alpha_m(1)|`` over all degrees: computed degrees contribute their
    observed value, and every higher degree ``m`` obeys
    ``|alpha_m(1)| >= 2 - e**q_m``, which is used for the first degree past the
    computed range (the bound only improves as m grows).

    Raises
    ------
    AssumptionError
        If some ``|alpha_m(1)| <= tol_zero``.
    """
    profiles = list(profiles.values()) if isinstance(profiles, dict) else list(profiles)
    if not profiles:
        raise ValueError("need at least one profile")
    bad = [p.mode.m for p in profiles if abs(p.alpha_at_1) <= tol_zero]
    if bad:
        raise AssumptionError(f"alpha_m(1) vanishes numerically for m in {bad}", bad)
    c0 = max(p.C0 for p in profiles)
    inv = max(1.0 / abs(p.alpha_at_1) for p in profiles)
    d = profiles[0].mode.d
    vnorm = profiles[0].weighted_norm
    m_next = max(p.mode.m for p in profiles) + 1
    e = math.exp(next_mode_q(vnorm, d, m_next))
    tail = 1.0 / (2.0 - e) if e < 2.0 else math.inf
    return {"C0": c0, "C4": max(inv, tail)}
