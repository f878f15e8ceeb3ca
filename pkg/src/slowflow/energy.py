"""Time-series diagnostics, the energy balance and its inequality form, and
the bound suite (monotone decay, scaling exponents, forced-response ratios,
Hölder-modulus probe)."""

from dataclasses import dataclass, field

import numpy as np

from .fields import derive, flow_energy, sample_diagnostics, sup_norm
from .report import make_report, make_value_report

__all__ = [
    "DiagnosticsSeries", "diagnostics_series",
    "energy_balance_residual", "energy_inequality_check", "bound_suite",
    "fit_loglog_slope", "abel_integral", "continuity_probe",
    "max_increment_structure", "holder_half_report",
]

SCALING_TOL = 0.15  # acceptance band around each predicted exponent


@dataclass
class DiagnosticsSeries:
    samples: list
    forcing_norms: list
    metadata: dict = field(default_factory=dict)

    @property
    def times(self):
        return np.array([s.t for s in self.samples])

    def column(self, name):
        return np.array([getattr(s, name) for s in self.samples])


def diagnostics_series(states, forcing=None, params=None):
    """Per-state W, J1, J2, V, D1 plus the forcing L2 norm at each time."""
    if not states:
        raise ValueError("states must be nonempty")
    grid = states[0].grid
    times = [s.t for s in states]
    if any(b <= a for a, b in zip(times, times[1:])):
        raise ValueError("state times must be strictly increasing")
    if any(s.grid != grid for s in states):
        raise ValueError("mixed grids in state list")
    samples = [sample_diagnostics(s.u, s.t) for s in states]
    if forcing is None:
        fnorms = [0.0] * len(states)
    else:
        fnorms = [float(np.sqrt(max(flow_energy(forcing.at(s.t)), 0.0))) for s in states]
    md = {"grid_n": grid.n, "grid_L": grid.L}
    if params is not None:
        md["nu"] = params.nu
        md["rho"] = params.rho
    return DiagnosticsSeries(samples, fnorms, md)


def energy_balance_residual(series, states, forcing, params=None, rel_tol=0.02):
    """Residual of nu * int J1^2 + (W(t) - W(0))/2 = work done by the forcing.

    Trapezoidal time quadrature on the state grid; the report carries the
    worst |residual| / W(0) over the samples.
    """
    if len(states) < 3:
        raise ValueError("need at least 3 time samples")
    t = series.times
    J1sq = series.column("J1") ** 2
    W = series.column("W")
    if forcing is None:
        work_rate = np.zeros_like(t)
    else:
        work_rate = np.zeros_like(t)
        for k, s in enumerate(states):
            X = forcing.at(s.t)
            work_rate[k] = sum(
                float(np.sum(s.u.components[i].samples * X.components[i].samples))
                for i in range(3)
            ) * s.grid.cell_volume
    nu = params.nu if params is not None else series.metadata.get("nu")
    if nu is None:
        raise ValueError("viscosity unknown: pass params or build the series with them")
    if W[0] == 0.0 and (W.max() > 0.0 or np.any(np.abs(work_rate) > 0.0)):
        raise ValueError("W(0) = 0 with nonzero flow: relative residual undefined")
    worst = 0.0
    residuals = []
    for k in range(1, len(t)):
        dissip = nu * np.trapezoid(J1sq[: k + 1], t[: k + 1])
        work = np.trapezoid(work_rate[: k + 1], t[: k + 1])
        res = dissip + 0.5 * (W[k] - W[0]) - work
        rel = abs(res) / W[0] if W[0] > 0 else 0.0
        residuals.append(rel)
        worst = max(worst, rel)
    return make_report("energy-balance", worst, rel_tol, 0.0,
                       {"residuals": residuals, "W0": float(W[0])})


def energy_inequality_check(series, rtol=1e-10):
    """sqrt(W(t)) <= sqrt(W(0)) + int_0^t sqrt(forcing energy) dt', every sample."""
    t = series.times
    sqw = np.sqrt(series.column("W"))
    fn = np.asarray(series.forcing_norms)
    worst_lhs, worst_rhs = 0.0, np.inf
    margins = []
    for k in range(len(t)):
        rhs = sqw[0] + (np.trapezoid(fn[: k + 1], t[: k + 1]) if k else 0.0)
        margins.append(float(rhs - sqw[k]))
        if sqw[k] - rhs > worst_lhs - worst_rhs:
            worst_lhs, worst_rhs = sqw[k], rhs
    tol = rtol * max(sqw[0], 1e-300)
    return make_report("energy-inequality", worst_lhs, worst_rhs, tol,
                       {"margins": margins})


def fit_loglog_slope(x, y):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    good = (x > 0) & (y > 0)
    if good.sum() < 2:
        raise ValueError("need at least 2 positive points for a log-log fit")
    return float(np.polyfit(np.log(x[good]), np.log(y[good]), 1)[0])


def abel_integral(times, values, power, nu):
    """int_0^t values(t') / (nu (t - t'))^power dt' at t = times[-1].

    Piecewise-linear values; the weakly singular moments are integrated in
    closed form on each subinterval.
    """
    times = np.asarray(times, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    t = times[-1]
    p = float(power)
    total = 0.0
    for a, b, fa, fb in zip(times[:-1], times[1:], values[:-1], values[1:]):
        # substitute s = t - t' in [t-b, t-a]; f(t') = C - slope*s
        slope = (fb - fa) / (b - a)
        C = fa + slope * (t - a)
        s1, s2 = t - b, t - a
        m1 = (s2 ** (1 - p) - s1 ** (1 - p)) / (1 - p)
        m2 = (s2 ** (2 - p) - s1 ** (2 - p)) / (2 - p)
        total += C * m1 - slope * m2
    return float(total / nu ** p)


def _monotone_report(name, values, tol_rel):
    v0 = values[0]
    worst = float(np.max(values[1:])) if len(values) > 1 else v0
    tol = tol_rel * max(abs(v0), 1e-300)
    return make_report(name, worst, v0, tol, {"initial": float(v0)})


def _scaling_report(name, t, ratio, expected):
    slope = fit_loglog_slope(t, ratio)
    return make_value_report(name, slope, expected, SCALING_TOL,
                             {"points": len(t), "t_span": float(t[-1] / t[0])})


def bound_suite(u0, states, forcing, params, scaling=False, holder=None):
    """Monotone decay (25/27/28), decay exponents (26/29/30), forced-response
    ratio bounds (34/35), and optionally the Hölder-modulus fit (36).

    Scaling exponents are fitted on the self-similar normalizations
    V/J1 ~ t^{-1/4}, D_m/sqrt(W) ~ t^{-(2m+3)/4} and J_m/sqrt(W) ~ t^{-m/2};
    they require at least 5 positive-time samples spanning a decade.
    """
    series = diagnostics_series(states, forcing)
    t = series.times
    reports = []
    forced = forcing is not None and any(f > 0 for f in series.forcing_norms)

    if not forced:
        V = series.column("V")
        W = series.column("W")
        J1 = series.column("J1")
        reports.append(_monotone_report("sup-speed-monotone", V, 1e-10))
        reports.append(_monotone_report("energy-monotone", W, 1e-10))
        reports.append(_monotone_report("gradient-seminorm-monotone", J1, 1e-10))

        pos = t > 0
        want_scaling = scaling is True or (
            scaling == "auto" and pos.sum() >= 5 and t[pos].max() / t[pos].min() >= 10.0
        )
        if scaling is True and (pos.sum() < 5 or t[pos].max() / t[pos].min() < 10.0):
            raise ValueError("fewer than 5 usable time samples spanning a decade")
        if want_scaling:
            tp = t[pos]
            J2 = series.column("J2")[pos]
            D1 = series.column("D1")[pos]
            Vp, Wp, J1p = V[pos], W[pos], J1[pos]
            sqW = np.sqrt(Wp)
            reports.append(_scaling_report("speed-over-gradient-decay", tp, Vp / J1p, -0.25))
            reports.append(_scaling_report("sup-speed-decay-rate", tp, Vp / sqW, -0.75))
            reports.append(_scaling_report("sup-gradient-decay-rate", tp, D1 / sqW, -1.25))
            reports.append(_scaling_report("gradient-seminorm-decay-rate", tp, J1p / sqW, -0.5))
            reports.append(_scaling_report("second-seminorm-decay-rate", tp, J2 / sqW, -1.0))
    else:
        # forced-response ratio bounds; meaningful for runs started from rest
        J1 = series.column("J1")
        D1 = series.column("D1")
        sup_f = [float(sup_norm(forcing.at(tk))) for tk in t]
        ratios_34, ratios_35 = [], []
        for k in range(1, len(t)):
            rhs34 = abel_integral(t[: k + 1], series.forcing_norms[: k + 1], 0.5, params.nu)
            rhs35 = abel_integral(t[: k + 1], sup_f[: k + 1], 0.5, params.nu)
            if rhs34 > 0:
                ratios_34.append(J1[k] / rhs34)
            if rhs35 > 0:
                ratios_35.append(D1[k] / rhs35)
        for name, ratios, note in (
            ("forced-gradient-ratio", ratios_34, None),
            ("forced-sup-derivative-ratio", ratios_35,
             "stated with '=' in the source relation; certified as an upper bound"),
        ):
            ratios = np.asarray(ratios)
            ok = ratios.size > 0 and bool(np.all(np.isfinite(ratios)))
            med = float(np.median(ratios)) if ratios.size else 0.0
            worst = float(ratios.max()) if ratios.size else 0.0
            md = {"empirical_constant": worst, "ratios": [float(r) for r in ratios]}
            if note:
                md["note"] = note
            # bounded + stable: the worst ratio stays within 3x the median
            rep = make_report(name, worst, 3.0 * med if ok else 0.0, 0.0, md)
            reports.append(rep)

    if holder is not None:
        reports.append(holder_half_report(**holder))
    return reports


def max_increment_structure(u, separations_cells, core_half_cells):
    """Sup over axis-aligned point pairs of |grad-component increments|.

    Pairs are restricted to the central core (origin-centered cube of
    half-width core_half_cells cells); separations are in cells.
    """
    grid = u.grid
    n, h = grid.n, grid.h
    lo, hi = n // 2 - core_half_cells, n // 2 + core_half_cells
    grads = [derive(c, ax).samples for c in u.components for ax in (1, 2, 3)]
    out = []
    for m in separations_cells:
        if m >= 2 * core_half_cells:
            raise ValueError("separation exceeds the sampling core")
        best = 0.0
        for g in grads:
            for axis in range(3):
                a = np.take(g, range(lo, hi - m), axis=axis)
                b = np.take(g, range(lo + m, hi), axis=axis)
                dif = np.abs(b - a)
                sl = [slice(lo, hi)] * 3
                sl[axis] = slice(None, dif.shape[axis])
                best = max(best, float(dif[tuple(sl)].max()))
        out.append(best)
    return np.asarray(separations_cells) * h, np.array(out)


def holder_half_report(u, separations_cells, core_half_cells, bound_scale=None):
    """Fit of the gradient increment modulus against r^{1/2}.

    ``bound_scale``, when given, is the time-integral factor of the modulus
    bound; the empirical constant max S(r)/(sqrt(r) * bound_scale) is recorded.
    """
    rs, S = max_increment_structure(u, separations_cells, core_half_cells)
    slope = fit_loglog_slope(rs, S)
    md = {"r": [float(r) for r in rs], "S": [float(s) for s in S]}
    if bound_scale:
        md["empirical_constant"] = float(np.max(S / (np.sqrt(rs) * bound_scale)))
    return make_value_report("holder-half-modulus", slope, 0.5, SCALING_TOL, md)


def continuity_probe(states_at_dts, reference, mode="strong"):
    """Distance to the reference state along a shrinking dt schedule.

    mode "strong": L2 distance; "uniform": sup distance.  Pass requires the
    fitted convergence rate in dt to be positive.
    """
    if len(states_at_dts) < 3:
        raise ValueError("need at least 3 probe states")
    dts = np.array([abs(s.t - reference.t) for s in states_at_dts])
    if np.any(dts <= 0):
        raise ValueError("probe states must differ from the reference time")
    dists = []
    for s in states_at_dts:
        d = s.u - reference.u
        if mode == "strong":
            dists.append(np.sqrt(flow_energy(d)))
        elif mode == "uniform":
            dists.append(sup_norm(d))
        else:
            raise ValueError("mode must be 'strong' or 'uniform'")
    rate = fit_loglog_slope(dts, dists)
    # pass requires a materially positive convergence rate in dt
    return make_report(f"continuity-{mode}", 0.05, rate, 0.0,
                       {"dts": [float(d) for d in dts],
                        "distances": [float(d) for d in dists],
                        "fitted_rate": rate})
