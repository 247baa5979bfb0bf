"""Radial potentials V(r) on (0, 1].

Every potential carries a singularity exponent ``sigma``: near the origin
``V(s) ~ Vr(s) * s**sigma`` with ``Vr`` (the *reduced* potential) bounded and
continuous up to ``s = 0``.  The series engine integrates ``Vr`` against exact
power weights, so integrable singularities such as ``c / r`` never have to be
sampled at the origin.
"""

import csv
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicSpline

from .errors import DomainError, IntegrabilityError

KINDS = ("zero", "constant", "coulomb", "power", "tabulated")


def parse_complex(value):
    """Read a complex number from a JSON-style value (number, ``[re, im]`` or ``{"re", "im"}``)."""
    if isinstance(value, dict):
        return complex(float(value.get("re", 0.0)), float(value.get("im", 0.0)))
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ValueError(f"complex value must have two components, got {value!r}")
        return complex(float(value[0]), float(value[1]))
    return complex(value)


def _complex_to_json(z):
    z = complex(z)
    return z.real if z.imag == 0 else [z.real, z.imag]


@dataclass(frozen=True, eq=False)
class Potential:
    """An immutable radial potential.

    Use the constructors :meth:`zero`, :meth:`constant`, :meth:`coulomb`,
    :meth:`power` and :meth:`tabulated` rather than the raw initializer.

    Attributes
    ----------
    kind : str
        One of ``zero``, ``constant``, ``coulomb``, ``power``, ``tabulated``.
    strength : complex
        lambda for ``constant``, c for ``coulomb``, a for ``power``.
    exponent : float
        Power p for the ``power`` kind (p > -2).
    r_nodes, v_nodes : ndarray
        Samples of a tabulated potential.
    order : int
        Interpolation order for tabulated data (1 = piecewise linear, 3 = cubic spline).
    sigma : float
        Singularity exponent of the model ``V(s) ~ const * s**sigma`` at 0.
    """

    kind: str
    strength: complex = 0j
    exponent: float = 0.0
    r_nodes: np.ndarray = field(default=None, repr=False)
    v_nodes: np.ndarray = field(default=None, repr=False)
    order: int = 1
    sigma: float = 0.0

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls):
        return cls("zero")

    @classmethod
    def constant(cls, lam):
        return cls("constant", strength=complex(lam))

    @classmethod
    def coulomb(cls, c):
        return cls("coulomb", strength=complex(c), sigma=-1.0)

    @classmethod
    def power(cls, a, p):
        p = float(p)
        if not p > -2.0:
            raise IntegrabilityError(f"power potential needs p > -2 for r|V| to be integrable, got p={p}")
        return cls("power", strength=complex(a), exponent=p, sigma=p)

    @classmethod
    def tabulated(cls, r, v, order=1, singularity=0.0):
        """Potential sampled at nodes ``r`` (strictly increasing in (0, 1]).

        Between nodes the samples are interpolated (``order`` 1 or 3); beyond
        the last node the last value is held; below the first node the value
        at the first node is continued with the power law ``s**singularity``.
        """
        r = np.asarray(r, dtype=float)
        v = np.asarray(v, dtype=complex)
        if r.ndim != 1 or r.shape != v.shape or r.size < 2:
            raise ValueError("tabulated potential needs matching 1-d arrays with at least two nodes")
        if r[0] <= 0.0 or r[-1] > 1.0 or np.any(np.diff(r) <= 0):
            raise DomainError("tabulated nodes must be strictly increasing in (0, 1]")
        if not np.all(np.isfinite(v)):
            raise IntegrabilityError("tabulated potential contains non-finite values")
        if order not in (1, 3):
            raise ValueError(f"interpolation order must be 1 or 3, got {order}")
        if not singularity > -2.0:
            raise IntegrabilityError(f"singularity exponent must exceed -2, got {singularity}")
        r.setflags(write=False)
        v.setflags(write=False)
        return cls("tabulated", r_nodes=r, v_nodes=v, order=int(order), sigma=float(singularity))

    @classmethod
    def from_csv(cls, path, order=1, singularity=0.0):
        """Load a tabulated potential from CSV columns ``r, Re V[, Im V]``."""
        path = Path(path)
        rows = []
        with path.open(newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0].strip().startswith("#"):
                    continue
                try:
                    rows.append([float(x) for x in row])
                except ValueError:
                    if rows:
                        raise
                    continue  # header line
        if not rows:
            raise ValueError(f"no numeric rows in {path}")
        data = np.array(rows, dtype=float)
        v = data[:, 1] + (1j * data[:, 2] if data.shape[1] > 2 else 0.0)
        return cls.tabulated(data[:, 0], v, order=order, singularity=singularity)

    @classmethod
    def from_config(cls, cfg, base_dir="."):
        """Build from a run-config mapping such as ``{"kind": "coulomb", "c": 1.0}``."""
        kind = cfg.get("kind")
        if kind == "zero":
            return cls.zero()
        if kind == "constant":
            return cls.constant(parse_complex(cfg.get("lambda", cfg.get("value"))))
        if kind == "coulomb":
            return cls.coulomb(parse_complex(cfg["c"]))
        if kind == "power":
            return cls.power(parse_complex(cfg["a"]), float(cfg["p"]))
        if kind == "tabulated":
            order = int(cfg.get("order", 1))
            sing = float(cfg.get("singularity", 0.0))
            if "path" in cfg:
                return cls.from_csv(Path(base_dir) / cfg["path"], order=order, singularity=sing)
            v = [parse_complex(x) for x in cfg["v"]]
            return cls.tabulated(cfg["r"], v, order=order, singularity=sing)
        raise ValueError(f"unknown potential kind {kind!r}; expected one of {KINDS}")

    def to_config(self):
        if self.kind == "zero":
            return {"kind": "zero"}
        if self.kind == "constant":
            return {"kind": "constant", "lambda": _complex_to_json(self.strength)}
        if self.kind == "coulomb":
            return {"kind": "coulomb", "c": _complex_to_json(self.strength)}
        if self.kind == "power":
            return {"kind": "power", "a": _complex_to_json(self.strength), "p": self.exponent}
        return {
            "kind": "tabulated",
            "r": self.r_nodes.tolist(),
            "v": [_complex_to_json(z) for z in self.v_nodes],
            "order": self.order,
            "singularity": self.sigma,
        }

    # -- evaluation ---------------------------------------------------
    @cached_property
    def _spline(self):
        if self.kind != "tabulated" or self.order != 3:
            return None
        return CubicSpline(self.r_nodes, self.v_nodes)

    def _tabulated_values(self, s):
        r0, r1 = self.r_nodes[0], self.r_nodes[-1]
        inside = np.clip(s, r0, r1)
        if self.order == 3:
            vals = self._spline(inside)
        else:
            vals = np.interp(inside, self.r_nodes, self.v_nodes.real) + 1j * np.interp(
                inside, self.r_nodes, self.v_nodes.imag
            )
        return np.asarray(vals, dtype=complex)

    def reduced(self, s):
        """Reduced potential ``V(s) / s**sigma``, continuous on [0, 1]."""
        s = np.asarray(s, dtype=float)
        if self.kind == "zero":
            return np.zeros(s.shape, dtype=complex)
        if self.kind in ("constant", "coulomb", "power"):
            return np.full(s.shape, self.strength, dtype=complex)
        r0 = self.r_nodes[0]
        out = self._tabulated_values(s)
        below = s < r0
        if np.any(below):
            out = np.where(below, self.v_nodes[0] * r0 ** (-self.sigma), out)
        above = ~below
        if np.any(above) and self.sigma != 0.0:
            out = np.where(above, out * np.where(above, s, 1.0) ** (-self.sigma), out)
        return out

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(~(r > 0.0)) or np.any(r > 1.0):
            raise DomainError("potential is defined on (0, 1] only")
        return self.reduced(r) * r**self.sigma

    # -- integrals ----------------------------------------------------
    @cached_property
    def weighted_norm(self):
        """The weighted norm ``int_0^1 r |V(r)| dr``."""
        return weighted_integral(self, 1.0, 1.0)

    @cached_property
    def log_weighted_norm(self):
        """``int_0^1 r (1 - log r) |V(r)| dr``, or None if it diverges."""
        try:
            return log_weighted_integral(self)
        except IntegrabilityError:
            return None

    @property
    def is_real(self):
        if self.kind == "tabulated":
            return bool(np.all(self.v_nodes.imag == 0))
        return self.strength.imag == 0

    @property
    def is_zero(self):
        if self.kind == "tabulated":
            return bool(np.all(self.v_nodes == 0))
        return self.kind == "zero" or self.strength == 0

    def essential_infimum(self):
        """ess-inf of a real, essentially bounded V; None when V is complex or unbounded."""
        if not self.is_real:
            return None
        if self.is_zero:
            return 0.0
        a = self.strength.real
        if self.kind == "constant":
            return a
        if self.kind == "coulomb":
            return None
        if self.kind == "power":
            if self.exponent < 0:
                return None
            return min(a, 0.0) if self.exponent > 0 else a
        if self.sigma < 0:
            return None
        vals = self.v_nodes.real
        if self.order == 3:
            fine = np.linspace(self.r_nodes[0], self.r_nodes[-1], 20 * self.r_nodes.size)
            vals = np.concatenate([vals, self._spline(fine).real])
        lo = float(vals.min())
        if self.sigma > 0:
            lo = min(lo, 0.0)  # the power-law continuation tends to 0
        return lo


def evaluate(pot, r):
    """V(r) for r in (0, 1]."""
    return pot(r)


def _reduced_breakpoints(pot, upper, kappa):
    if pot.kind != "tabulated":
        return None
    nodes = pot.r_nodes[(pot.r_nodes > 0) & (pot.r_nodes < upper)]
    if nodes.size == 0:
        return None
    return list((nodes / upper) ** kappa)


def weighted_integral(pot, weight_exponent=1.0, upper=1.0):
    """``int_0^upper s**weight_exponent |V(s)| ds``.

    The substitution ``s = upper * x**(1/kappa)`` with
    ``kappa = weight_exponent + sigma + 1`` removes the power singularity,
    leaving a bounded integrand for adaptive quadrature.
    """
    if not 0.0 < upper <= 1.0:
        raise DomainError(f"upper limit must lie in (0, 1], got {upper}")
    kappa = weight_exponent + pot.sigma + 1.0
    if kappa <= 0.0:
        raise IntegrabilityError(
            f"int s^{weight_exponent} |V| diverges at 0 (singularity exponent {pot.sigma})"
        )
    if pot.is_zero:
        return 0.0
    g = 1.0 / kappa

    def f(x):
        return float(np.abs(pot.reduced(upper * x**g)))

    val, err = integrate.quad(
        f, 0.0, 1.0, points=_reduced_breakpoints(pot, upper, kappa), epsabs=0.0, epsrel=1e-13, limit=500
    )
    if not math.isfinite(val) or err > 1e-9 * max(abs(val), 1e-300):
        raise IntegrabilityError(f"weighted integral failed to converge (estimate {val}, error {err})")
    return upper**kappa / kappa * val


def log_weighted_integral(pot, upper=1.0):
    """``int_0^upper s (1 - log s) |V(s)| ds``, needed for the planar degree-0 mode."""
    if not 0.0 < upper <= 1.0:
        raise DomainError(f"upper limit must lie in (0, 1], got {upper}")
    kappa = pot.sigma + 2.0
    if kappa <= 0.0:
        raise IntegrabilityError("log-weighted integral diverges at 0")
    if pot.is_zero:
        return 0.0
    g = 1.0 / kappa
    logu = math.log(upper)

    def f(x):
        if x == 0.0:
            return 0.0
        return float(np.abs(pot.reduced(upper * x**g))) * (1.0 - logu - g * math.log(x))

    val, err = integrate.quad(
        f, 0.0, 1.0, points=_reduced_breakpoints(pot, upper, kappa), epsabs=0.0, epsrel=1e-12, limit=500
    )
    if not math.isfinite(val) or err > 1e-8 * max(abs(val), 1e-300):
        raise IntegrabilityError(f"log-weighted integral failed to converge (estimate {val}, error {err})")
    return upper**kappa / kappa * val
