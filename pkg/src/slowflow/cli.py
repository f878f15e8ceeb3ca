"""Batch experiment runner.

Subcommands: ``solve``, ``verify``, ``mollify-study``, ``convergence-study``.
Each reads a JSON config (unknown keys are errors), runs a fixed pipeline, and
writes LERF fields, a diagnostics CSV, and a report JSON into the output
directory.  Exit status: 0 all checks pass, 1 a check failed (reports are
still written), 2 config error.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import analysis, energy, fieldgen, lerf, mollifier
from .fields import ScalarField, integrate, make_grid
from .report import make_report, write_reports_json
from .stokes import FluidParams, residual_check, solve_linearized


class ConfigError(ValueError):
    pass


# one config document can drive every subcommand; unknown keys are errors
_ALLOWED_KEYS = {"grid", "params", "output", "initial", "forcing", "times",
                 "checks", "epsilons", "field_width", "study", "grids"}

VERIFY_CHECKS = (
    "energy_balance", "energy_inequality", "monotone_bounds", "schwarz",
    "hardy", "representation", "quasi_derivative", "negative_control",
)


def _require(cond, msg):
    if not cond:
        raise ConfigError(msg)


def _section(cfg, key, allowed, required=()):
    sec = cfg.get(key, {})
    _require(isinstance(sec, dict), f"{key} must be an object")
    unknown = set(sec) - set(allowed)
    _require(not unknown, f"unknown key(s) in {key}: {sorted(unknown)}")
    for r in required:
        _require(r in sec, f"{key}.{r} is required")
    return sec


class ExperimentConfig:
    """Validated experiment description (fail-fast on unknown keys)."""

    def __init__(self, raw, command):
        _require(isinstance(raw, dict), "config must be a JSON object")
        unknown = set(raw) - _ALLOWED_KEYS
        _require(not unknown, f"unknown config key(s): {sorted(unknown)}")
        self.command = command

        g = _section(raw, "grid", ("n", "L"), required=("n", "L"))
        try:
            self.grid = make_grid(g["n"], g["L"])
        except ValueError as e:
            raise ConfigError(f"grid: {e}") from e

        p = _section(raw, "params", ("nu", "rho"))
        try:
            self.params = FluidParams(float(p.get("nu", 1.0)), float(p.get("rho", 1.0)))
        except (TypeError, ValueError) as e:
            raise ConfigError(f"params: {e}") from e

        ic = _section(raw, "initial", ("generator", "params"))
        self.initial_name = ic.get("generator", "solenoidal_gaussian")
        self.initial_params = ic.get("params", {})
        _require(self.initial_name in fieldgen.INITIAL_GENERATORS,
                 f"initial.generator: unknown generator '{self.initial_name}'")

        fc = _section(raw, "forcing", ("generator", "params"))
        self.forcing_name = fc.get("generator", "none")
        self.forcing_params = fc.get("params", {})
        _require(self.forcing_name in fieldgen.FORCING_GENERATORS,
                 f"forcing.generator: unknown generator '{self.forcing_name}'")

        tm = _section(raw, "times", ("start", "end", "count"))
        self.t_start = float(tm.get("start", 0.0))
        self.t_end = float(tm.get("end", 1.0))
        self.t_count = int(tm.get("count", 10))
        _require(self.t_start >= 0.0, "times.start must be >= 0")
        _require(self.t_end > self.t_start, "times.end must exceed times.start")
        _require(self.t_count >= 1, "times.count must be >= 1")

        eps = raw.get("epsilons", [1.0, 0.5, 0.25])
        _require(isinstance(eps, list) and all(isinstance(e, (int, float)) and e > 0 for e in eps),
                 "epsilons must be a list of positive numbers")
        self.epsilons = [float(e) for e in eps]
        self.field_width = float(raw.get("field_width", 1.0))

        grids = raw.get("grids", [16, 24, 32])
        _require(isinstance(grids, list) and len(grids) >= 2, "grids must list >= 2 sizes")
        self.grids = grids
        self.study = raw.get("study", "representation")
        _require(self.study in ("representation", "quasi_derivative", "energy_balance"),
                 f"study: unknown study '{self.study}'")

        checks = raw.get("checks", ["energy_balance", "energy_inequality", "monotone_bounds"])
        _require(isinstance(checks, list) and checks, "checks must be a nonempty list")
        for c in checks:
            _require(c in VERIFY_CHECKS, f"checks: unknown check '{c}'")
        self.checks = checks

        self.output = raw.get("output", "out")

    def times(self):
        return list(np.linspace(self.t_start, self.t_end, self.t_count))

    def initial_field(self):
        return fieldgen.initial_condition(self.initial_name, self.grid, self.initial_params)

    def forcing_field(self):
        return fieldgen.forcing(self.forcing_name, self.grid, self.forcing_params, self.params)


def _fmt(x):
    return repr(float(x))


def write_diagnostics_csv(path, series):
    rows = ["t,W,J1,J2,V,D1,Xnorm"]
    for s, fn in zip(series.samples, series.forcing_norms):
        rows.append(",".join(_fmt(v) for v in (s.t, s.W, s.J1, s.J2, s.V, s.D1, fn)))
    with open(path, "w", newline="\n") as f:
        f.write("\n".join(rows) + "\n")


def _solve_pipeline(cfg, out_dir, write_fields=True):
    u0 = cfg.initial_field()
    forcing = cfg.forcing_field()
    states = solve_linearized(u0, forcing, cfg.params, cfg.times())
    series = energy.diagnostics_series(states, forcing, cfg.params)
    write_diagnostics_csv(os.path.join(out_dir, "diagnostics.csv"), series)
    if write_fields:
        for k, s in enumerate(states):
            for ci, comp in enumerate(s.u.components, start=1):
                lerf.write_field(os.path.join(out_dir, f"u{ci}_{k:03d}.lerf"), comp)
            lerf.write_field(os.path.join(out_dir, f"p_{k:03d}.lerf"), s.p)
        manifest = {
            "times": [float(s.t) for s in states],
            "nu": cfg.params.nu, "rho": cfg.params.rho,
            "grid": {"n": cfg.grid.n, "L": cfg.grid.L},
        }
        with open(os.path.join(out_dir, "manifest.json"), "w") as f:
            json.dump(manifest, f, sort_keys=True, indent=2)
            f.write("\n")
    return u0, forcing, states, series


def _run_verify_checks(cfg, u0, forcing, states, series):
    reports = []
    for check in cfg.checks:
        if check == "energy_balance":
            reports.append(energy.energy_balance_residual(series, states, forcing, cfg.params))
        elif check == "energy_inequality":
            reports.append(energy.energy_inequality_check(series))
        elif check == "monotone_bounds":
            reports.extend(energy.bound_suite(u0, states, forcing, cfg.params, scaling=False))
        elif check == "schwarz":
            u = states[-1].u
            reports.append(analysis.schwarz_check(u.u1, u.u2))
        elif check == "hardy":
            probe = fieldgen.gaussian_bump(cfg.grid, width=min(1.0, cfg.grid.L / 6.0))
            reports.append(analysis.hardy_check(probe))
        elif check == "representation":
            probe = fieldgen.gaussian_bump(cfg.grid, width=min(1.0, cfg.grid.L / 6.0))
            _, rep = analysis.representation_reconstruct(probe)
            reports.append(rep)
        elif check == "quasi_derivative":
            reports.append(_quasi_derivative_report(cfg.grid))
        elif check == "negative_control":
            reports.append(_negative_control_report(cfg, states, forcing))
    return reports


def _quasi_derivative_report(grid):
    w = min(1.0, grid.L / 6.0)
    X1, X2, X3 = grid.meshgrid()
    r2 = X1 ** 2 + X2 ** 2 + X3 ** 2
    U = ScalarField(grid, np.exp(-r2 / (2 * w * w)))
    dU = ScalarField(grid, -(X1 / w ** 2) * U.samples)  # analytic d/dx1
    a = fieldgen.gaussian_bump(grid, width=w, center=(0.3 * w, -0.2 * w, 0.1 * w))
    res = abs(analysis.quasi_derivative_residual(U, dU, 1, a))
    scale = np.sqrt(integrate(U, U) * integrate(a, a))
    tol = 2.0 * grid.h ** 2 * max(scale, 1.0)
    return make_report("quasi-derivative-residual", res, tol, 0.0,
                       {"h": grid.h, "scale": float(scale)})


def _negative_control_report(cfg, states, forcing=None):
    """Deliberately corrupted final state: the residual check must fail."""
    if len(states) < 2:
        raise ConfigError("negative_control needs at least 2 time samples")
    bad = states[-1]
    t_mid = 0.5 * (states[-1].t + states[-2].t)
    X_mid = forcing.at(t_mid) if forcing is not None else None
    clean = residual_check(states[-1], states[-2], X_mid, cfg.params)
    rng = np.random.default_rng(7)
    noisy = ScalarField(bad.grid, bad.u.u1.samples + rng.normal(0.0, 1.0, bad.u.u1.samples.shape))
    from .fields import VectorField3
    from .stokes import FlowState
    corrupted = FlowState(bad.t, VectorField3(noisy, bad.u.u2, bad.u.u3), bad.p)
    # judged against the clean pair's residual: corruption must dominate it
    rep = residual_check(corrupted, states[-2], X_mid, cfg.params,
                         tol=10.0 * max(clean.lhs, 1e-12))
    rep.name = "negative-control-corrupted-state"
    rep.metadata["expected"] = "fail"
    rep.metadata["clean_residual"] = clean.lhs
    return rep


def _mollify_study(cfg, out_dir):
    grid = cfg.grid
    U = fieldgen.gaussian_bump(grid, width=cfg.field_width)
    reports = []
    rows = ["epsilon,mass_error,distance,norm_ratio,selfadjoint_residual"]
    distances = []
    eps_sorted = sorted(cfg.epsilons, reverse=True)
    for eps in eps_sorted:
        if eps < 2 * grid.h:
            raise ConfigError(f"epsilons: {eps} under-resolved on n={grid.n} (needs >= 2h)")
        k = mollifier.make_kernel(eps)
        mass_err = abs(mollifier.kernel_grid_mass(k, grid) - 1.0)
        tol = 5e-4 if eps >= 8 * grid.h else 0.1
        reports.append(make_report(f"mollifier-mass-eps-{eps:g}", mass_err, tol, 0.0,
                                   {"epsilon": eps, "resolved_8h": eps >= 8 * grid.h}))
        Um = mollifier.mollify(U, k)
        n0, n1 = integrate(U, U), integrate(Um, Um)
        reports.append(make_report(f"mollifier-contraction-eps-{eps:g}", n1, n0, 1e-10 * n0,
                                   {"epsilon": eps}))
        V = fieldgen.gaussian_bump(grid, width=1.3 * cfg.field_width, center=(0.4, 0.1, -0.2))
        sa = abs(integrate(Um, V) - integrate(U, mollifier.mollify(V, k)))
        reports.append(make_report(f"mollifier-selfadjoint-eps-{eps:g}", sa, 1e-10 * n0, 0.0,
                                   {"epsilon": eps}))
        d = analysis.strong_mean_distance(Um, U)
        distances.append(d)
        rows.append(",".join(_fmt(v) for v in (eps, mass_err, d, n1 / n0, sa)))
    ratios = [b / a for a, b in zip(distances, distances[1:])]
    reports.append(make_report("mollifier-strong-convergence", max(ratios) if ratios else 0.0,
                               1.0, 0.0, {"epsilons": eps_sorted, "distances": distances}))
    with open(os.path.join(out_dir, "mollify.csv"), "w", newline="\n") as f:
        f.write("\n".join(rows) + "\n")
    return reports


def _convergence_study(cfg, out_dir):
    reports = []
    values = []
    for n in cfg.grids:
        try:
            grid = make_grid(int(n), cfg.grid.L)
        except ValueError as e:
            raise ConfigError(f"grids: {e}") from e
        if cfg.study == "representation":
            probe = fieldgen.gaussian_bump(grid, width=min(1.0, grid.L / 6.0))
            _, rep = analysis.representation_reconstruct(probe)
            rep.name = f"representation-n{grid.n}"
            reports.append(rep)
            values.append(rep.lhs)
        elif cfg.study == "quasi_derivative":
            rep = _quasi_derivative_report(grid)
            rep.name = f"quasi-derivative-n{grid.n}"
            reports.append(rep)
            values.append(rep.lhs)
        else:  # energy_balance: only the refinement claim is judged (the
            # 2-percent per-grid default needs >= 64^3 data)
            u0 = fieldgen.initial_condition(cfg.initial_name,
                                            grid, cfg.initial_params)
            states = solve_linearized(u0, None, cfg.params, cfg.times())
            series = energy.diagnostics_series(states, None, cfg.params)
            rep = energy.energy_balance_residual(series, states, None, cfg.params,
                                                 rel_tol=1.0)
            values.append(rep.lhs)
    worst_ratio = max(b / a for a, b in zip(values, values[1:])) if len(values) > 1 else 0.0
    reports.append(make_report(f"{cfg.study}-refinement-decrease", worst_ratio, 1.0, 0.0,
                               {"grids": cfg.grids, "values": values}))
    return reports


def run_experiment(cfg, out_dir):
    """Run the configured pipeline; returns (exit_code, reports)."""
    os.makedirs(out_dir, exist_ok=True)
    reports = []
    if cfg.command == "solve":
        _solve_pipeline(cfg, out_dir, write_fields=True)
    elif cfg.command == "verify":
        u0, forcing, states, series = _solve_pipeline(cfg, out_dir, write_fields=False)
        reports = _run_verify_checks(cfg, u0, forcing, states, series)
    elif cfg.command == "mollify-study":
        reports = _mollify_study(cfg, out_dir)
    elif cfg.command == "convergence-study":
        reports = _convergence_study(cfg, out_dir)
    if reports:
        write_reports_json(reports, os.path.join(out_dir, "report.json"))
    ok = all(r.passed for r in reports)
    return (0 if ok else 1), reports


def field_io(path, mode, field=None):
    """Read or write one LERF field file (bit-exact round-trip)."""
    if mode == "read":
        return lerf.read_field(path)
    if mode == "write":
        if field is None:
            raise ValueError("field required for write")
        lerf.write_field(path, field)
        return None
    raise ValueError("mode must be 'read' or 'write'")


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="slowflow",
        description="linearized-flow experiment runner and verifier",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("solve", "verify", "mollify-study", "convergence-study"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="JSON experiment config")
        sp.add_argument("--out", default=None, help="output directory (overrides config)")
        sp.add_argument("--check", action="append", default=None,
                        help="check name (repeatable; verify only)")
        sp.add_argument("--grid-n", type=int, default=None, help="override grid.n")
        sp.add_argument("--grid-L", type=float, default=None, help="override grid.L")
    args = parser.parse_args(argv)

    try:
        with open(args.config) as f:
            raw = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2

    if args.grid_n is not None or args.grid_L is not None:
        raw.setdefault("grid", {})
        if args.grid_n is not None:
            raw["grid"]["n"] = args.grid_n
        if args.grid_L is not None:
            raw["grid"]["L"] = args.grid_L
    if args.check:
        raw["checks"] = list(args.check)

    try:
        cfg = ExperimentConfig(raw, args.command)
        out_dir = args.out or cfg.output
        code, reports = run_experiment(cfg, out_dir)
    except (ConfigError, ValueError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    for r in reports:
        status = "pass" if r.passed else "FAIL"
        print(f"[{status}] {r.name}: lhs={r.lhs:.6g} rhs={r.rhs:.6g}")
    return code


if __name__ == "__main__":
    sys.exit(main())
