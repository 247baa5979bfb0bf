"""Spherical harmonics on S^1 and S^2, quadrature rules, and zonal harmonics.

Conventions
-----------
* Surface measure is the unnormalized ``d sigma`` with total mass
  ``omega_{d-1}`` (``2 pi`` on the circle, ``4 pi`` on the sphere).
* d = 3: ``Y_m^j(theta, phi) = Pbar_m^j(cos theta) e^{i j phi}`` with the
  Condon-Shortley phase, orthonormal in ``L^2(S^2, d sigma)``.
* d = 2: the basis is ``e^{i j theta}`` with ``j = +-m`` (not normalized);
  Fourier coefficients carry the factor ``1 / (2 pi)``.
* Zonal harmonics satisfy ``Z_m(1) = d_m / omega_{d-1}``.
"""

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import AccuracyWarning, DomainError


def surface_area(d):
    """``omega_{d-1} = 2 pi**(d/2) / Gamma(d/2)``, the area of the unit sphere in R^d."""
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)


def dim_harmonics(d, m):
    """Dimension ``d_m`` of the degree-m spherical harmonics in R^d.

    >>> dim_harmonics(3, 5), dim_harmonics(4, 2), dim_harmonics(2, 7)
    (11, 9, 2)
    """
    if d < 2 or m < 0:
        raise DomainError("need d >= 2 and m >= 0")
    if d == 2:
        return 1 if m == 0 else 2
    lower = math.comb(d + m - 3, d - 1) if m >= 2 else 0
    return math.comb(d + m - 1, d - 1) - lower


class HarmonicIndex(NamedTuple):
    """Degree ``m`` and order ``j`` (``|j| <= m`` for d = 3, ``j = +-m`` for d = 2)."""

    m: int
    j: int


def check_index(d, idx):
    m, j = idx
    if m < 0 or int(m) != m or int(j) != j:
        raise DomainError(f"invalid harmonic index {idx}")
    if d == 3 and abs(j) > m:
        raise DomainError(f"order {j} exceeds degree {m}")
    if d == 2 and abs(j) != m:
        raise DomainError(f"planar harmonics have j = +-m, got {idx}")
    if d not in (2, 3):
        raise DomainError("explicit bases exist for d = 2 and d = 3 only")
    return HarmonicIndex(int(m), int(j))


def harmonic_indices(d, max_degree):
    """All indices of degree <= max_degree in a fixed order."""
    out = []
    for m in range(max_degree + 1):
        if d == 3:
            out.extend(HarmonicIndex(m, j) for j in range(-m, m + 1))
        elif d == 2:
            out.extend([HarmonicIndex(0, 0)] if m == 0 else [HarmonicIndex(m, -m), HarmonicIndex(m, m)])
        else:
            raise DomainError("explicit bases exist for d = 2 and d = 3 only")
    return out


def to_angles(d, points):
    """Angles of unit vectors: ``theta`` for d = 2, ``(theta, phi)`` for d = 3."""
    p = np.asarray(points, dtype=float)
    if p.shape[-1] != d:
        raise DomainError(f"points must have last dimension {d}")
    norm = np.linalg.norm(p, axis=-1)
    if np.any(np.abs(norm - 1.0) > 1e-8):
        raise DomainError("points must lie on the unit sphere")
    p = p / norm[..., None]
    if d == 2:
        return np.arctan2(p[..., 1], p[..., 0])
    theta = np.arccos(np.clip(p[..., 2], -1.0, 1.0))
    phi = np.arctan2(p[..., 1], p[..., 0])
    return theta, phi


def from_angles(theta, phi=None):
    """Unit vectors from polar angle(s); d = 2 when ``phi`` is None."""
    theta = np.asarray(theta, dtype=float)
    if phi is None:
        return np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    phi = np.asarray(phi, dtype=float)
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=-1)


def legendre_table(max_degree, theta):
    """Normalized associated Legendre values ``Pbar_m^j(cos theta)`` for 0 <= j <= m.

    Returns an array of shape ``(max_degree + 1, max_degree + 1) + theta.shape``
    indexed ``[m, j]`` (zero above the diagonal), including the factor
    ``sqrt((2m+1)(m-j)! / (4 pi (m+j)!))`` and the Condon-Shortley phase.
    """
    theta = np.asarray(theta, dtype=float)
    x, s = np.cos(theta), np.sin(theta)
    L = max_degree
    P = np.zeros((L + 1, L + 1) + theta.shape)
    P[0, 0] = 1.0 / math.sqrt(4.0 * math.pi)
    for j in range(1, L + 1):
        P[j, j] = -math.sqrt((2 * j + 1) / (2.0 * j)) * s * P[j - 1, j - 1]
    for j in range(0, L):
        P[j + 1, j] = math.sqrt(2 * j + 3) * x * P[j, j]
    for j in range(0, L + 1):
        for m in range(j + 2, L + 1):
            a = math.sqrt((4.0 * m * m - 1) / (m * m - j * j))
            b = math.sqrt(((m - 1) ** 2 - j * j) / (4.0 * (m - 1) ** 2 - 1))
            P[m, j] = a * (x * P[m - 1, j] - b * P[m - 2, j])
    return P


def _pbar(P, m, j):
    """``Pbar_m^j`` for signed j, using ``Pbar_m^{-j} = (-1)^j Pbar_m^j``."""
    if abs(j) > m:
        return np.zeros(P.shape[2:])
    val = P[m, abs(j)]
    return val * (-1) ** j if j < 0 else val


def legendre_theta_derivative(P, m, j):
    """``d/dtheta Pbar_m^j(cos theta)`` from the ladder relation."""
    up = math.sqrt((m - j) * (m + j + 1)) * _pbar(P, m, j + 1) if j + 1 <= m else 0.0
    down = math.sqrt((m + j) * (m - j + 1)) * _pbar(P, m, j - 1) if j - 1 >= -m else 0.0
    return 0.5 * (up - down)


def _angles_of(d, point, theta, phi):
    if point is not None:
        return to_angles(d, point)
    if theta is None:
        raise DomainError("give either unit vectors or angles")
    if d == 3:
        return np.asarray(theta, float), np.asarray(0.0 if phi is None else phi, float)
    return np.asarray(theta, float)


def eval_harmonic(d, idx, point=None, *, theta=None, phi=None):
    """Value of the basis harmonic ``idx`` at unit vector(s) or angles.

    >>> bool(abs(eval_harmonic(3, (0, 0), [0.0, 0.0, 1.0]) - 1 / np.sqrt(4 * np.pi)) < 1e-15)
    True
    >>> bool(np.isclose(eval_harmonic(2, (3, 3), theta=np.pi / 2), -1j))
    True
    """
    m, j = check_index(d, idx)
    ang = _angles_of(d, point, theta, phi)
    if d == 2:
        return np.exp(1j * j * ang)
    th, ph = ang
    P = legendre_table(m, th)
    return _pbar(P, m, j) * np.exp(1j * j * ph)


def harmonic_table(d, max_degree, point=None, *, theta=None, phi=None):
    """All basis harmonics of degree <= max_degree at the given points.

    Returns ``(values, indices)`` with ``values`` of shape ``(npoints, nharm)``.
    """
    ang = _angles_of(d, point, theta, phi)
    idx = harmonic_indices(d, max_degree)
    if d == 2:
        th = np.atleast_1d(ang)
        js = np.array([i.j for i in idx])
        return np.exp(1j * th[:, None] * js[None, :]), idx
    th, ph = np.broadcast_arrays(*(np.atleast_1d(a) for a in ang))
    P = legendre_table(max_degree, th)
    cols = [_pbar(P, m, j) * np.exp(1j * j * ph) for m, j in idx]
    return np.stack(cols, axis=-1), idx


def surface_gradient_table(max_degree, theta, phi):
    """Surface gradients of the d = 3 basis in the (theta-hat, phi-hat) frame.

    Returns ``(g_theta, g_phi, indices)``, each array of shape
    ``(npoints, nharm)``; points must avoid the poles.
    """
    th, ph = np.broadcast_arrays(np.atleast_1d(theta), np.atleast_1d(phi))
    P = legendre_table(max_degree, th)
    idx = harmonic_indices(3, max_degree)
    st = np.sin(th)
    gt, gp = [], []
    for m, j in idx:
        e = np.exp(1j * j * ph)
        gt.append(legendre_theta_derivative(P, m, j) * e)
        gp.append(1j * j * _pbar(P, m, j) * e / st)
    return np.stack(gt, axis=-1), np.stack(gp, axis=-1), idx


@dataclass(frozen=True, eq=False)
class SphereQuadrature:
    """Product quadrature on S^{d-1} (d = 2 or 3).

    Attributes
    ----------
    d : int
    degree : int
        The ``max_degree`` it was built for.
    nodes : ndarray, shape (Q, d)
    weights : ndarray, shape (Q,)
        Positive, summing to ``omega_{d-1}``.
    max_exact_degree : int
        Polynomial degree integrated exactly.
    theta, phi : ndarray
        Angles of the nodes (``phi`` is None for d = 2).
    """

    d: int
    degree: int
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    max_exact_degree: int
    theta: np.ndarray = field(repr=False)
    phi: np.ndarray = field(default=None, repr=False)

    def __len__(self):
        return self.weights.size

    def integrate(self, values):
        return np.tensordot(self.weights, values, axes=(0, 0))

    def harmonics(self, max_degree=None):
        L = self.degree if max_degree is None else max_degree
        if self.d == 2:
            return harmonic_table(2, L, theta=self.theta)
        return harmonic_table(3, L, theta=self.theta, phi=self.phi)


def build_quadrature(d, max_degree):
    """Quadrature resolving products of harmonics of degree <= max_degree.

    d = 2: ``2L + 2`` equispaced angles (exact for trigonometric degree ``2L + 1``).
    d = 3: Gauss-Legendre in ``cos theta`` with ``L + 1`` points times ``2L + 1``
    equispaced longitudes (exact to degree ``2L``).
    """
    L = int(max_degree)
    if L < 0:
        raise DomainError("max_degree must be >= 0")
    if d == 2:
        Q = 2 * L + 2
        th = 2.0 * math.pi * np.arange(Q) / Q
        w = np.full(Q, 2.0 * math.pi / Q)
        return SphereQuadrature(2, L, from_angles(th), w, 2 * L + 1, th)
    if d != 3:
        raise DomainError("quadrature is available for d = 2 and d = 3 only")
    x, wx = np.polynomial.legendre.leggauss(L + 1)
    nphi = 2 * L + 1
    ph = 2.0 * math.pi * np.arange(nphi) / nphi
    TH, PH = np.meshgrid(np.arccos(x), ph, indexing="ij")
    W = np.outer(wx, np.full(nphi, 2.0 * math.pi / nphi))
    th, ph_flat, w = TH.ravel(), PH.ravel(), W.ravel()
    return SphereQuadrature(3, L, from_angles(th, ph_flat), w, 2 * L, th, ph_flat)


def fourier_analysis(quadrature, samples, max_degree, parseval_tol=1e-6):
    """Coefficients of the boundary samples plus energy diagnostics.

    Returns
    -------
    coeffs : dict HarmonicIndex -> complex
    info : dict
        ``norm_sq`` (boundary energy in the coefficient normalization),
        ``tail_energy`` (energy above ``max_degree``) and ``parseval_defect``
        (relative energy the quadrature cannot resolve at all).
    """
    q = quadrature
    f = np.asarray(samples, dtype=complex)
    if f.shape != (len(q),):
        raise DomainError(f"expected {len(q)} samples on the quadrature nodes, got shape {f.shape}")
    if max_degree > q.degree:
        warnings.warn(
            f"max_degree {max_degree} exceeds the degree {q.degree} the quadrature resolves",
            AccuracyWarning,
            stacklevel=2,
        )
    L = max(q.degree, max_degree)
    Y, idx = q.harmonics(L)
    proj = (q.weights * f) @ np.conj(Y)
    scale = 1.0 / (2.0 * math.pi) if q.d == 2 else 1.0
    proj = proj * scale
    norm_sq = float(np.real(q.weights @ np.abs(f) ** 2)) * scale
    coeffs = {i: complex(c) for i, c in zip(idx, proj) if i.m <= max_degree}
    kept = sum(abs(c) ** 2 for c in coeffs.values())
    resolved = float(sum(abs(c) ** 2 for i, c in zip(idx, proj) if i.m <= q.degree))
    defect = abs(norm_sq - resolved) / norm_sq if norm_sq > 0 else 0.0
    if defect > parseval_tol:
        warnings.warn(
            f"Parseval defect {defect:.3g} exceeds {parseval_tol:g}: the quadrature is too coarse for the data",
            AccuracyWarning,
            stacklevel=2,
        )
    info = {"norm_sq": norm_sq, "tail_energy": max(norm_sq - kept, 0.0), "parseval_defect": defect}
    return coeffs, info


def fourier_coefficients(quadrature, samples, max_degree, parseval_tol=1e-6):
    """``phi_hat[m, j]`` for all degrees <= max_degree (see :func:`fourier_analysis`)."""
    return fourier_analysis(quadrature, samples, max_degree, parseval_tol)[0]


def _clamp_t(t):
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1.0 + 1e-12):
        raise DomainError("zonal harmonics need t in [-1, 1]")
    return np.clip(t, -1.0, 1.0)


def zonal_table(d, max_degree, t):
    """``Z_m(t)`` for m = 0..max_degree, shape ``(max_degree + 1,) + t.shape``."""
    if d < 2:
        raise DomainError("need d >= 2")
    t = _clamp_t(t)
    L = int(max_degree)
    Z = np.empty((L + 1,) + t.shape)
    area = surface_area(d)
    if d == 2:
        T_prev, T = np.ones_like(t), t.copy()
        Z[0] = 1.0 / (2.0 * math.pi)
        if L >= 1:
            Z[1] = 2.0 * T / (2.0 * math.pi)
        for m in range(2, L + 1):
            T_prev, T = T, 2.0 * t * T - T_prev
            Z[m] = 2.0 * T / (2.0 * math.pi)
        return Z
    a = d / 2.0 - 1.0
    C_prev, C = np.ones_like(t), 2.0 * a * t
    Z[0] = 1.0 / area
    if L >= 1:
        Z[1] = (2 + d - 2) / ((d - 2) * area) * C
    for m in range(2, L + 1):
        C_prev, C = C, (2.0 * t * (m + a - 1.0) * C - (m + 2.0 * a - 2.0) * C_prev) / m
        Z[m] = (2 * m + d - 2) / ((d - 2) * area) * C
    return Z


def eval_zonal(d, m, t):
    """Zonal harmonic ``Z_m`` as a function of ``t = xi . zeta``.

    >>> round(float(eval_zonal(3, 2, 1.0)) * 4 * np.pi, 12)
    5.0
    """
    return zonal_table(d, m, t)[m]


def zonal_at_one(d, m):
    """``Z_m(1) = d_m / omega_{d-1}``."""
    return dim_harmonics(d, m) / surface_area(d)


def zonal_growth_constant(d, m_cap):
    """``C^d = max_{1 <= m <= m_cap} Z_m(1) / m**(d-1)``."""
    return max(zonal_at_one(d, m) / m ** (d - 1) for m in range(1, max(m_cap, 1) + 1))
