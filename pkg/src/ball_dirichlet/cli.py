"""Batch front-end.

Usage::

    ball-dirichlet <subcommand> --config run.json [--out DIR] [--threads N] [--seed S]

The config is one JSON document with the sections ``dimension``,
``potential``, ``grid``, ``truncation``, ``boundary`` and ``output``; see the
README for the keys each subcommand reads.  Exit codes: 0 success, 1 a
``validate`` check failed, 2 config error, 3 integrability error, 4 assumption
violation, 5 truncation or convergence failure.
"""

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import io
from . import spherical as sph
from .dirichlet import check_assumption, eval_solution, named_boundary, solve_dirichlet
from .errors import AssumptionError, ConvergenceError, IntegrabilityError
from .poisson import DEFAULT_EPS, KernelEvaluator, PointMassData, eval_kernel, solve_measure, trace_convergence
from .potentials import Potential
from .spps import ASSUMPTION_TOL, DEFAULT_TOL, ModeIndex, RadialGrid, compute_profiles, profile_for

log = logging.getLogger("ball_dirichlet")

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_INTEGRABILITY, EXIT_ASSUMPTION, EXIT_TRUNCATION = 0, 1, 2, 3, 4, 5


class ConfigError(Exception):
    pass


class Run:
    """Parsed configuration plus command-line overrides."""

    def __init__(self, cfg, base_dir, out_dir, threads, seed):
        self.cfg = cfg
        self.base_dir = Path(base_dir)
        self.out = Path(out_dir)
        self.threads = threads
        self.seed = seed
        try:
            self.d = int(cfg.get("dimension", 3))
        except (TypeError, ValueError) as exc:
            raise ConfigError("dimension must be an integer") from exc
        if self.d < 2:
            raise ConfigError("dimension must be >= 2")
        if "potential" not in cfg:
            raise ConfigError("missing section 'potential'")
        self.pot = Potential.from_config(cfg["potential"], self.base_dir)
        g = cfg.get("grid", {})
        self.grid = RadialGrid(int(g.get("N", 2000)), float(g.get("gamma", 2.0)))
        tr = cfg.get("truncation", {})
        self.tol = float(tr.get("tol", DEFAULT_TOL))
        self.eps = float(tr.get("eps", DEFAULT_EPS))
        self.tol_zero = float(tr.get("tol_zero", ASSUMPTION_TOL))
        self.max_degree = tr.get("max_degree")
        self.m_cap = tr.get("m_cap")
        self.output = cfg.get("output", {})
        self.boundary_cfg = cfg.get("boundary", {})

    def section_list(self, key, default=None):
        val = self.output.get(key, default)
        if val is None:
            raise ConfigError(f"output.{key} is required for this subcommand")
        return val

    def directions(self):
        """``output.angles`` as unit vectors plus the angle columns for the CSV."""
        angles = self.section_list("angles")
        if self.d == 2:
            th = np.array([a[0] if isinstance(a, (list, tuple)) else a for a in angles], dtype=float)
            return sph.from_angles(th), th[:, None], ["theta"]
        if self.d != 3:
            raise ConfigError("angle grids are supported for d = 2 and d = 3")
        arr = np.array(angles, dtype=float).reshape(-1, 2)
        return sph.from_angles(arr[:, 0], arr[:, 1]), arr, ["theta", "phi"]

    def boundary(self):
        """Coefficient map or samples described by the ``boundary`` section."""
        b = self.boundary_cfg
        if "coefficients" in b:
            return {k: _complex(v) for k, v in b["coefficients"].items()}
        if "name" in b:
            params = {k: v for k, v in b.items() if k != "name"}
            return named_boundary(self.d, b["name"], **params)
        if "samples" in b:
            L = int(b.get("degree", self.max_degree if self.max_degree is not None else 8))
            quad = sph.build_quadrature(self.d, L)
            path = self.base_dir / b["samples"]
            return io.read_samples(path, expected=len(quad)), quad
        raise ConfigError("boundary needs one of 'coefficients', 'name' or 'samples'")


def _complex(v):
    if isinstance(v, (list, tuple)):
        return complex(float(v[0]), float(v[1]))
    return complex(v)


def _solve(run):
    b = run.boundary()
    kw = dict(grid=run.grid, tol=run.tol, threads=run.threads, tol_zero=run.tol_zero)
    if isinstance(b, tuple):
        samples, quad = b
        return solve_dirichlet(run.pot, run.d, samples, max_degree=quad.degree, quadrature=quad, **kw)
    return solve_dirichlet(run.pot, run.d, b, max_degree=run.max_degree, **kw)


def cmd_profile(run):
    degrees = run.output.get("degrees")
    if degrees is None:
        degrees = list(range(int(run.max_degree or 0) + 1))
    profiles = compute_profiles(run.pot, run.d, degrees, run.grid, run.tol, run.threads)
    for m in degrees:
        io.write_profile(run.out, profiles[m])
    return EXIT_OK


def cmd_assumption(run):
    report = check_assumption(run.pot, run.d, run.tol_zero, grid=run.grid, tol=run.tol)
    io.write_json(run.out / "assumption.json", report.to_json())
    print(json.dumps({"verdict": report.verdict, "m_star": report.m_star}))
    return EXIT_OK if report.passed else EXIT_ASSUMPTION


def cmd_solve(run):
    sol = _solve(run)
    dirs, ang, names = run.directions()
    radii = np.asarray(run.section_list("radii"), dtype=float)
    rows = []
    for r in radii:
        u = eval_solution(sol, r, dirs)
        rows.append(np.column_stack([np.full(len(dirs), r), ang, u.real, u.imag]))
    io.write_csv(run.out / "solution.csv", ["r", *names, "re_u", "im_u"], np.vstack(rows))
    io.write_json(
        run.out / "solution.json",
        {
            "d": sol.d,
            "max_degree": sol.max_degree,
            "boundary_norm_sq": sol.boundary_norm_sq,
            "sobolev_half_seminorm": sol.sobolev_half_seminorm,
            "tail_energy": sol.tail_energy,
            "assumption": sol.assumption.to_json() if sol.assumption else None,
        },
    )
    return EXIT_OK


def _kernel(run):
    return KernelEvaluator(run.pot, run.d, m_cap=run.m_cap, grid=run.grid, tol=run.tol, tol_zero=run.tol_zero)


def cmd_kernel(run):
    K = _kernel(run)
    radii = np.asarray(run.section_list("radii"), dtype=float)
    ts = np.asarray(run.section_list("t"), dtype=float)
    rows = []
    for r in radii:
        P = np.atleast_1d(eval_kernel(K, np.full(ts.shape, r), ts, run.eps))
        rows.append(np.column_stack([np.full(ts.shape, r), ts, P.real, P.imag]))
    io.write_csv(run.out / "kernel.csv", ["r", "t", "re_P", "im_P"], np.vstack(rows))
    return EXIT_OK


def _point_masses(run):
    b = run.boundary_cfg
    if "points" not in b:
        raise ConfigError("boundary.points and boundary.weights describe the point masses")
    w = [_complex(x) for x in b.get("weights", [1.0] * len(b["points"]))]
    data = PointMassData(np.array(b["points"], dtype=float), w)
    if data.d != run.d:
        raise ConfigError("point-mass directions do not match the dimension")
    return data


def cmd_measure(run):
    K = _kernel(run)
    data = _point_masses(run)
    dirs, ang, names = run.directions()
    rows = []
    for r in np.asarray(run.section_list("radii"), dtype=float):
        for xi, a in zip(dirs, ang):
            u = solve_measure(K, data, r, xi, run.eps)
            rows.append([r, *a, u.real, u.imag])
    io.write_csv(run.out / "measure.csv", ["r", *names, "re_u", "im_u"], rows)
    return EXIT_OK


def cmd_trace(run):
    radii = [float(r) for r in run.section_list("radii")]
    if "points" in run.boundary_cfg:
        data = _point_masses(run)
        probes = run.section_list("probes", [{"name": "constant"}])
        sols = []
        for p in probes:
            coeffs = p["coefficients"] if "coefficients" in p else named_boundary(
                run.d, p["name"], **{k: v for k, v in p.items() if k != "name"}
            )
            sols.append(solve_dirichlet(run.pot, run.d, coeffs, grid=run.grid, tol=run.tol, threads=run.threads))
        rows, limits = trace_convergence(None, data, radii, sols)
        table = [[r, pid, v.real, v.imag, limits[pid].real, limits[pid].imag] for r, pid, v in rows]
        io.write_csv(
            run.out / "trace.csv", ["r", "probe_id", "re_pairing", "im_pairing", "re_limit", "im_limit"], table
        )
        return EXIT_OK
    sol = _solve(run)
    L = int(run.output.get("probe_degree", max(2 * sol.max_degree, 8)))
    rows = trace_convergence(sol, None, radii, sph.build_quadrature(run.d, L))
    io.write_csv(run.out / "trace.csv", ["r", "sup_err", "l2_err"], rows)
    return EXIT_OK


def cmd_validate(run):
    """Closed-form and oracle checks; the random probe pairs come from ``--seed``."""
    from . import oracle  # test-time reference, kept out of the library import path

    rng = np.random.default_rng(run.seed)
    checks = []

    def record(name, err, tol):
        checks.append({"name": name, "error": float(err), "tol": tol, "passed": bool(err <= tol)})

    if run.pot.is_zero:
        for d in (2, 3):
            K = KernelEvaluator(run.pot, d, m_cap=400, grid=run.grid, tol=run.tol)
            omega = sph.surface_area(d)
            worst = 0.0
            for _ in range(int(run.output.get("samples", 20))):
                r, t = rng.uniform(0.0, 0.9), rng.uniform(-1.0, 1.0)
                exact = (1 - r * r) / (omega * (1 - 2 * r * t + r * r) ** (d / 2))
                worst = max(worst, abs(eval_kernel(K, r, t, 1e-12) - exact) / exact)
            record(f"classical_kernel_d{d}", worst, 1e-6)
    degrees = run.output.get("degrees", [0, 1, 2, 5])
    if run.d in (2, 3):
        for m in degrees:
            mode = ModeIndex(run.d, int(m))
            prof = profile_for(run.pot, mode, run.grid, run.tol)
            try:
                exact = complex(oracle.closed_form_alpha(run.pot, run.d, int(m), 1.0))
                record(f"closed_form_m{m}", abs(prof.alpha_at_1 - exact) / max(abs(exact), 1e-300), 1e-8)
            except ValueError:
                pass
            if not mode.singular:
                y, _ = oracle.shoot(run.pot, mode)
                record(f"shoot_m{m}", abs(prof.alpha_at_1 - y) / abs(y), 1e-6)
    passed = all(c["passed"] for c in checks)
    io.write_json(run.out / "validate.json", {"passed": passed, "seed": run.seed, "checks": checks})
    for c in checks:
        print(f"{'PASS' if c['passed'] else 'FAIL'} {c['name']} error={c['error']:.3e} tol={c['tol']:g}")
    return EXIT_OK if passed else EXIT_CHECK


COMMANDS = {
    "profile": cmd_profile,
    "assumption": cmd_assumption,
    "solve": cmd_solve,
    "kernel": cmd_kernel,
    "measure": cmd_measure,
    "trace": cmd_trace,
    "validate": cmd_validate,
}


def build_parser():
    p = argparse.ArgumentParser(prog="ball-dirichlet", description="Radial Schroedinger Dirichlet problems on the unit ball.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", required=True, help="JSON run configuration")
    p.add_argument("--out", default=".", help="output directory (default: current)")
    p.add_argument("--threads", type=int, default=None, help="worker threads for per-mode profiles")
    p.add_argument("--seed", type=int, default=0, help="seed for validate probe sampling")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def resolve_threads(flag):
    """The ``--threads`` flag wins; otherwise ``BALL_DIRICHLET_THREADS``; otherwise automatic."""
    if flag is not None:
        return max(1, flag)
    env = os.environ.get("BALL_DIRICHLET_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ConfigError(f"BALL_DIRICHLET_THREADS must be an integer, got {env!r}") from exc
    return None


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    config_path = Path(args.config)
    try:
        try:
            cfg = json.loads(config_path.read_text())
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {config_path}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{config_path} is not valid JSON: {exc}") from exc
        if not isinstance(cfg, dict):
            raise ConfigError("the config must be a JSON object")
        run = Run(cfg, config_path.parent, args.out, resolve_threads(args.threads), args.seed)
        return COMMANDS[args.command](run)
    except IntegrabilityError as exc:
        print(f"integrability error: {exc}", file=sys.stderr)
        return EXIT_INTEGRABILITY
    except AssumptionError as exc:
        print(f"assumption violated: {exc}", file=sys.stderr)
        return EXIT_ASSUMPTION
    except ConvergenceError as exc:
        print(f"truncation or convergence failure: {exc}", file=sys.stderr)
        return EXIT_TRUNCATION
    except (ConfigError, FileNotFoundError, KeyError, TypeError, ValueError) as exc:
        msg = f"missing key {exc}" if isinstance(exc, KeyError) else str(exc)
        print(f"config error: {msg}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
