"""Cumulative product integration on the graded radial grid.

The radial grid is uniform in the variable ``t`` with ``s = t**gamma``.  The
series engine needs running integrals of the form

    Psi_j = int_0^{t_j} (t / t_j)**E R(t) dt     (optionally times log(t / t_j))

with ``R`` smooth and ``E > -1`` possibly fractional or in the thousands.  On
each cell ``[t_i, t_{i+1}]`` the factor ``R`` is replaced by its 8-point
Lagrange interpolant on neighbouring nodes while the power weight is
integrated exactly, so the rule stays high order for every exponent.
"""

from functools import lru_cache

import numpy as np
from numpy.polynomial import polynomial as npoly

STENCIL = 8
_STEEP = 10.0
_BLOCK_LOG = 600.0

_GL_X, _GL_W = np.polynomial.legendre.leggauss(24)
_GL_X = 0.5 * (_GL_X + 1.0)
_GL_W = 0.5 * _GL_W


def stencil(N):
    """Node indices of the interpolation stencil of every cell, plus its left offset."""
    if N < STENCIL:
        raise ValueError(f"grid needs at least {STENCIL} cells, got {N}")
    i = np.arange(N)
    start = np.clip(i - 3, 0, N + 1 - STENCIL)
    return start[:, None] + np.arange(STENCIL), start - i


@lru_cache(maxsize=None)
def _lagrange_coefficients(offset, flip=False):
    """Monomial coefficients of the Lagrange basis on the stencil starting at ``offset``.

    The basis is written in the cell coordinate ``x`` or, with ``flip``, in
    ``y = 1 - x``.  The nodes are integers, so ``polyfromroots`` and the
    denominators are exact.
    """
    nodes = offset + np.arange(STENCIL, dtype=float)
    if flip:
        nodes = 1.0 - nodes
    coef = np.empty((STENCIL, STENCIL))
    for k in range(STENCIL):
        others = np.delete(nodes, k)
        coef[k] = npoly.polyfromroots(others) / np.prod(nodes[k] - others)
    return coef


@lru_cache(maxsize=None)
def _lagrange_at_gauss(offset):
    """Lagrange basis of the stencil evaluated at the Gauss nodes, shape (24, 8)."""
    nodes = offset + np.arange(STENCIL, dtype=float)
    vals = np.ones((_GL_X.size, STENCIL))
    for k in range(STENCIL):
        for j in range(STENCIL):
            if j != k:
                vals[:, k] *= (_GL_X - nodes[j]) / (nodes[k] - nodes[j])
    return vals


def _power_weights(u0, E, offsets):
    """Weights for ``int_0^1 (u0 + (1 - u0) x)**E R(x) dx`` with R sampled on the stencil.

    The first cell (``u0 = 0``) uses exact moments of ``x**E``.  Cells where the
    weight is steep use exact moments in ``y = 1 - x``, obtained by an upward
    integration-by-parts recursion that is stable in that regime.  All other
    cells use 24-point Gauss-Legendre, which is exact to rounding there.
    """
    a = 1.0 - u0
    w = np.empty((u0.size, STENCIL))
    p = np.arange(STENCIL)
    zero = u0 == 0.0
    steep = ~zero & ((E + 1.0) * a >= _STEEP)
    flat = ~zero & ~steep
    for o in np.unique(offsets):
        sel = offsets == o
        z = sel & zero
        if np.any(z):
            w[z] = (1.0 / (E + p + 1.0)) @ _lagrange_coefficients(int(o)).T
        st = sel & steep
        if np.any(st):
            # K_p(E) = int_0^1 (1 - a y)**E y**p dy
            #        = [p K_{p-1}(E+1) - u0**(E+1)] / ((E+1) a)
            lu = np.log(u0[st])
            av = a[st]
            cur = [-np.expm1((E + k + 1.0) * lu) / ((E + k + 1.0) * av) for k in range(STENCIL)]
            cols = [cur[0]]
            for pp in range(1, STENCIL):
                cur = [
                    (pp * cur[k + 1] - np.exp((E + k + 1.0) * lu)) / ((E + k + 1.0) * av)
                    for k in range(STENCIL - pp)
                ]
                cols.append(cur[0])
            w[st] = np.stack(cols, axis=1) @ _lagrange_coefficients(int(o), True).T
        fl = sel & flat
        if np.any(fl):
            u = u0[fl, None] + a[fl, None] * _GL_X[None, :]
            w[fl] = (np.exp(E * np.log(u)) * _GL_W) @ _lagrange_at_gauss(int(o))
    return w


def _log_weights(u0, beta, offsets):
    """Weights for ``int_0^1 u**beta log(u) R(x) dx`` with ``u = u0 + (1 - u0) x``."""
    w = np.empty((u0.size, STENCIL))
    p = np.arange(STENCIL)
    zero = u0 == 0.0
    for o in np.unique(offsets):
        sel = offsets == o
        z = sel & zero
        if np.any(z):
            w[z] = (-1.0 / (beta + p + 1.0) ** 2) @ _lagrange_coefficients(int(o)).T
        r = sel & ~zero
        if np.any(r):
            u = u0[r, None] + (1.0 - u0[r, None]) * _GL_X[None, :]
            w[r] = (u**beta * np.log(u) * _GL_W) @ _lagrange_at_gauss(int(o))
    return w


@lru_cache(maxsize=64)
def cell_weights(N, E, with_log=False):
    """Product-integration weights for every cell of the uniform t-grid.

    Returns ``(idx, P)`` such that the cell integral
    ``int_{t_i}^{t_{i+1}} (t / t_{i+1})**E [log(t / t_{i+1})] R(t) dt``
    equals ``P[i] @ R[idx[i]]`` whenever R is a polynomial of degree < 8 in t.
    """
    if not E > -1.0:
        raise ValueError(f"weight exponent must exceed -1, got {E}")
    t = np.arange(N + 1) / N
    u0 = t[:-1] / t[1:]
    idx, off = stencil(N)
    if with_log:
        w = _log_weights(u0, E, off)
    else:
        w = _power_weights(u0, E, off)
    w = w / N
    idx.setflags(write=False)
    w.setflags(write=False)
    return idx, w


def increments(idx, w, values):
    """Cell integrals ``P[i] @ values[idx[i]]``."""
    return np.einsum("ik,ik->i", w, values[idx])


def scaled_cumulative(inc, t, E):
    """``Psi_j = int_0^{t_j} (t / t_j)**E G dt`` from the cell increments for exponent E.

    The recursion ``Psi_{i+1} = (t_i / t_{i+1})**E Psi_i + inc_i`` is evaluated
    in vectorized blocks over which ``(t_end / t_start)**|E|`` stays below e**600.
    """
    N = inc.size
    out = np.zeros(N + 1, dtype=np.result_type(inc, float))
    if E == 0.0:
        np.cumsum(inc, out=out[1:])
        return out
    out[1] = inc[0]
    with np.errstate(divide="ignore"):
        lt = np.log(t)
    span = _BLOCK_LOG / abs(E)
    j = 1
    while j < N:
        e = min(int(np.searchsorted(lt, lt[j] + span, side="right")) - 1, N)
        if e <= j + 1:
            out[j + 1] = np.exp(E * (lt[j] - lt[j + 1])) * out[j] + inc[j]
            j += 1
            continue
        grow = np.exp(E * (lt[j + 1 : e + 1] - lt[j]))
        acc = np.cumsum(inc[j:e] * grow)
        out[j + 1 : e + 1] = (out[j] + acc) / grow
        j = e
    return out


def scaled_log_cumulative(inc_log, psi, t, E):
    """``Phi_j = int_0^{t_j} (t / t_j)**E log(t / t_j) G dt``.

    ``inc_log`` are the log-weighted cell increments and ``psi`` the output of
    :func:`scaled_cumulative` for the same integrand and exponent.  Uses
    ``Phi_{i+1} = rho**E (Phi_i + log(rho) Psi_i) + inc_log_i`` with
    ``rho = t_i / t_{i+1}``.
    """
    N = inc_log.size
    out = np.zeros(N + 1, dtype=np.result_type(inc_log, psi, float))
    out[1] = inc_log[0]
    lrho = np.log(t[1:-1] / t[2:])
    fac = np.exp(E * lrho)
    for j in range(1, N):
        out[j + 1] = fac[j - 1] * (out[j] + lrho[j - 1] * psi[j]) + inc_log[j]
    return out
