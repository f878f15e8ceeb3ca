"""Explicit solution operators for the linearized incompressible flow equations.

The unforced problem is solved by Gaussian-kernel convolution (heat
semigroup); the forced problem by the Duhamel integral of the unsteady-Stokes
fundamental tensor

    T_ij(z, tau) = delta_ij * G(r, tau) + d_i d_j Phi(r, tau),
    G(r, tau)    = exp(-r^2 / (4 nu tau)) / (4 pi nu tau)^{3/2},
    Phi(r, tau)  = erf(r / (2 sqrt(nu tau))) / (4 pi r),

and the pressure by the Newtonian potential of the forcing divergence.
T integrates to delta_ij over space for every tau and acts as the identity on
solenoidal fields as tau -> 0.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import erf

from .convolve import SpectralAccumulator, convolve_offsets, newton_kernel
from .fields import ScalarField, VectorField3, derive, divergence, seminorm_jm
from .report import make_report

__all__ = [
    "FluidParams", "FlowState", "ForcingField",
    "heat_propagate", "heat_kernel_on_grid",
    "oseen_tensor_eval", "oseen_decay_constant",
    "forced_response", "pressure_field", "solve_linearized", "residual_check",
]

SQRT_PI = np.sqrt(np.pi)
# Duhamel quadrature: geometric nodes per decade of tau, and the resolution
# floor below which T acts as the identity (kernel radius < h/4).
NODES_PER_DECADE = 12
FLOOR_FACTOR = 32.0


@dataclass(frozen=True)
class FluidParams:
    nu: float
    rho: float

    def __post_init__(self):
        if not np.isfinite(self.nu) or self.nu <= 0:
            raise ValueError("nu must be > 0")
        if not np.isfinite(self.rho) or self.rho <= 0:
            raise ValueError("rho must be > 0")


@dataclass
class FlowState:
    """Velocity/pressure snapshot at time t."""

    t: float
    u: VectorField3
    p: ScalarField

    def __post_init__(self):
        if self.t < 0:
            raise ValueError("t must be >= 0")
        if self.u.grid != self.p.grid:
            raise ValueError("velocity and pressure must share one grid")

    @property
    def grid(self):
        return self.u.grid


class ForcingField:
    """Time-indexed body force, sampled on demand at quadrature nodes."""

    def __init__(self, grid, sampler: Callable[[float], VectorField3]):
        self.grid = grid
        self._sampler = sampler

    @classmethod
    def zero(cls, grid):
        z = VectorField3.zeros(grid)
        return cls(grid, lambda t: z)

    def at(self, t):
        X = self._sampler(float(t))
        if X.grid != self.grid:
            raise ValueError("forcing sampler returned a field on the wrong grid")
        return X


def heat_kernel_on_grid(grid, nu_t, normalized=True):
    """Gaussian offset kernel of variance 2*nu*t per axis, truncated at 8 widths.

    ``normalized`` rescales to exact unit discrete mass, making the
    convolution weights a convex combination (sup and energy contraction hold
    exactly, constants are preserved exactly).
    """
    sigma = np.sqrt(2.0 * nu_t)
    R = max(1, min(grid.n - 1, int(np.ceil(8.0 * sigma / grid.h)) + 1))
    off = grid.offsets(R)
    OX, OY, OZ = np.meshgrid(off, off, off, indexing="ij")
    K = np.exp(-(OX ** 2 + OY ** 2 + OZ ** 2) / (4.0 * nu_t)) / (4.0 * np.pi * nu_t) ** 1.5
    if normalized:
        K = K / (K.sum() * grid.cell_volume)
    return K, R


def heat_propagate(u0, params, t):
    """Evolve u0 for time t under pure diffusion (componentwise convolution)."""
    if t < 0:
        raise ValueError("t must be >= 0")
    if t == 0:
        return VectorField3(*(c.copy() for c in u0.components))
    grid = u0.grid
    # resolution floor: at least one sample inside one kernel standard width
    if np.sqrt(2.0 * params.nu * t) < 0.5 * grid.h:
        raise ValueError("under-resolved: heat kernel width sqrt(2 nu t) < h/2")
    K, _ = heat_kernel_on_grid(grid, params.nu * t)
    return VectorField3.from_arrays(
        grid, *(convolve_offsets(c.samples, K, grid.h) for c in u0.components)
    )


def _oseen_radial(x):
    """g(x) = erf(x)/x^3 - (2/sqrt(pi)) exp(-x^2)/x^2, series-protected near 0."""
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    small = x < 0.1
    xs = x[small]
    x2 = xs * xs
    out[small] = (2.0 / SQRT_PI) * (2.0 / 3.0 - 0.4 * x2 + x2 ** 2 / 7.0 - x2 ** 3 / 27.0)
    xl = x[~small]
    out[~small] = erf(xl) / xl ** 3 - (2.0 / SQRT_PI) * np.exp(-xl * xl) / xl ** 2
    return out


def _oseen_profiles(r, nu_tau):
    """Isotropic and anisotropic radial weights of T at distance r.

    T_ij = delta_ij f1(r) + zhat_i zhat_j f2(r);
    f1 = G + Phi'/r, f2 = Phi'' - Phi'/r.
    """
    a = 2.0 * np.sqrt(nu_tau)
    x = np.asarray(r, dtype=np.float64) / a
    e = np.exp(-x * x)
    g = _oseen_radial(x)
    c = 1.0 / (4.0 * np.pi * a ** 3)
    gamma = e / (SQRT_PI ** 3 * a ** 3)
    phi_p_over_r = -c * g
    phi_pp = c * (2.0 * g - (4.0 / SQRT_PI) * e)
    return gamma + phi_p_over_r, phi_pp - phi_p_over_r


def oseen_tensor_eval(dx, tau, params):
    """Fundamental tensor at displacement dx and time lag tau > 0 (3x3, symmetric)."""
    if tau <= 0:
        raise ValueError("tau must be > 0")
    dx = np.asarray(dx, dtype=np.float64)
    r = float(np.sqrt(np.sum(dx * dx)))
    if r == 0.0:
        raise ValueError("r = 0 is singular; evaluate off the source point")
    f1, f2 = _oseen_profiles(r, params.nu * tau)
    zhat = dx / r
    return np.eye(3) * float(f1) + np.outer(zhat, zhat) * float(f2)


def oseen_decay_constant(displacements, taus, params):
    """Empirical A in |T_ij| < A / (r^2 + nu tau)^{3/2} over an evaluation batch."""
    best = 0.0
    for dx in displacements:
        for tau in taus:
            T = oseen_tensor_eval(dx, tau, params)
            r2 = float(np.sum(np.asarray(dx, float) ** 2))
            best = max(best, float(np.abs(T).max()) * (r2 + params.nu * tau) ** 1.5)
    return best


def _phi_from_quadrature(r, nu_tau):
    """Oracle route for Phi: radial integral of the one-dimensional heat profile
    E(alpha) = exp(-alpha^2/(4 nu tau)) / (4 pi^{3/2} sqrt(nu tau)), by adaptive
    quadrature.  Equals erf(r/(2 sqrt(nu tau)))/(4 pi r)."""
    from scipy import integrate as _si

    c = 1.0 / (4.0 * SQRT_PI ** 3 * np.sqrt(nu_tau))
    val, _ = _si.quad(lambda a: np.exp(-a * a / (4.0 * nu_tau)), 0.0, r,
                      epsabs=1e-14, epsrel=1e-13)
    return c * val / r


def _duhamel_taus(t, h, nu):
    tau_min = h * h / (FLOOR_FACTOR * nu)
    if tau_min >= t:
        raise ValueError("under-resolved final subinterval: t below the quadrature floor")
    decades = np.log10(t / tau_min)
    m = max(8, int(np.ceil(NODES_PER_DECADE * decades)) + 1)
    return np.geomspace(tau_min, t, m)


def _erf_potential_kernel(grid, nu_tau, R):
    """Offset kernel Phi(r, tau) = erf(r/(2 sqrt(nu tau)))/(4 pi r).

    Smooth for tau > 0 (Phi(0) = 1/(2 pi^{3/2} a)); when the inner scale
    a = 2 sqrt(nu tau) is under-resolved, cells near the origin are replaced
    by Gauss-Legendre cell averages so the kernel's action on smooth fields
    stays second-order accurate.
    """
    from scipy.special import erf as _erf_fn
    from .convolve import gauss_legendre_cell_average

    a = 2.0 * np.sqrt(nu_tau)
    off = grid.offsets(R)
    OX, OY, OZ = np.meshgrid(off, off, off, indexing="ij")
    R2 = OX ** 2 + OY ** 2 + OZ ** 2
    c = R
    R2[c, c, c] = 1.0
    r = np.sqrt(R2)
    K = erf(r / a) / (4.0 * np.pi * r)
    K[c, c, c] = 1.0 / (2.0 * SQRT_PI ** 3 * a)
    if a < 2.0 * grid.h:
        h = grid.h
        fn = lambda x, y, z: np.where(
            (x * x + y * y + z * z) > 0,
            _erf_fn(np.sqrt(x * x + y * y + z * z) * (h / a)) /
            (4.0 * np.pi * np.maximum(np.sqrt(x * x + y * y + z * z), 1e-300) * h),
            1.0 / (2.0 * SQRT_PI ** 3 * a),
        )
        from itertools import product as _product
        for i, j, k in _product(range(-2, 3), repeat=3):
            K[c + i, c + j, c + k] = gauss_legendre_cell_average(
                fn, np.array([i, j, k], float), m=8)
    return K


def forced_response(X, params, t, assume_solenoidal=False):
    """Duhamel superposition of propagated forcing snapshots up to time t.

    The tensor action splits as T*X = G*X + grad(Phi * div X): the Gaussian
    part convolves each component, the gradient part responds only to the
    discrete divergence of the forcing (and is skipped entirely under
    ``assume_solenoidal``).  Time-lag nodes are geometric from t down to the
    floor h^2/(32 nu); below the floor the tensor acts as the identity plus
    the Newtonian-potential gradient.
    """
    if X is None:
        raise ValueError("empty forcing")
    if t <= 0:
        raise ValueError("t must be > 0")
    grid = X.grid
    nu = params.nu
    taus = _duhamel_taus(t, grid.h, nu)
    sigma_max = np.sqrt(2.0 * nu * taus[-1])
    R_heat = max(1, min(grid.n - 1, int(np.ceil(8.0 * sigma_max / grid.h)) + 1))
    acc = [SpectralAccumulator(grid.n, R_heat, grid.h) for _ in range(3)]
    acc_div = SpectralAccumulator(grid.n, grid.n - 1, grid.h) if not assume_solenoidal else None

    def weights(k):
        if k == 0:
            return 0.5 * (taus[1] - taus[0])
        if k == len(taus) - 1:
            return 0.5 * (taus[-1] - taus[-2])
        return 0.5 * (taus[k + 1] - taus[k - 1])

    for k, tau in enumerate(taus):
        w = weights(k)
        Xf = X.at(t - tau)
        K, _ = heat_kernel_on_grid(grid, nu * tau)
        rk = (K.shape[0] - 1) // 2
        full = np.zeros((2 * R_heat + 1,) * 3)
        sl = slice(R_heat - rk, R_heat + rk + 1)
        full[sl, sl, sl] = K
        KF = acc[0].kernel_fft(full)
        for i in range(3):
            acc[i].add(acc[0].field_fft(Xf.components[i].samples), KF, w)
        if acc_div is not None:
            div = divergence(Xf).samples
            PF = acc_div.kernel_fft(_erf_potential_kernel(grid, nu * tau, grid.n - 1))
            acc_div.add(acc_div.field_fft(div), PF, w)

    out = [a.extract() for a in acc]

    # below-floor sliver: identity action plus the Newtonian-potential gradient
    tau0 = taus[0]
    X_t, X_t0 = X.at(t), X.at(t - tau0)
    for i in range(3):
        out[i] += 0.5 * tau0 * (X_t.components[i].samples + X_t0.components[i].samples)
    if acc_div is not None:
        pot = acc_div.extract()
        N = newton_kernel(grid)
        div_t = divergence(X_t).samples
        div_t0 = divergence(X_t0).samples
        pot += 0.5 * tau0 * convolve_offsets(0.5 * (div_t + div_t0), N, grid.h)
        pot_field = ScalarField(grid, pot)
        for i in range(3):
            out[i] += derive(pot_field, i + 1).samples
    return VectorField3.from_arrays(grid, *out)


def pressure_field(X_t, params):
    """Newtonian-potential pressure -rho * d_j (N * X_j) for the forcing at one time."""
    grid = X_t.grid
    N = newton_kernel(grid)
    total = np.zeros((grid.n,) * 3)
    for comp, ax in zip(X_t.components, (1, 2, 3)):
        pot = ScalarField(grid, convolve_offsets(comp.samples, N, grid.h))
        total += derive(pot, ax).samples
    return ScalarField(grid, -params.rho * total)


def solve_linearized(u0, X, params, times, div_rtol=0.2, assume_solenoidal=False):
    """Superpose the diffusive and forced responses at each requested time.

    u0 must be (discretely) solenoidal: the L2 norm of its divergence must not
    exceed div_rtol times its gradient seminorm.
    """
    times = [float(t) for t in times]
    if any(t < 0 for t in times) or any(b <= a for a, b in zip(times, times[1:])):
        raise ValueError("times must be strictly increasing and >= 0")
    grid = u0.grid
    j1 = seminorm_jm(u0, 1)
    if j1 > 0:
        div = divergence(u0)
        div_l2 = np.sqrt(np.sum(div.samples ** 2) * grid.cell_volume)
        if div_l2 > div_rtol * j1:
            raise ValueError("u0 is not solenoidal within tolerance")
    u0_is_zero = all(not c.samples.any() for c in u0.components)
    states = []
    for t in times:
        u = VectorField3.zeros(grid) if u0_is_zero else heat_propagate(u0, params, t)
        if X is not None and t > 0:
            u = u + forced_response(X, params, t, assume_solenoidal=assume_solenoidal)
            p = pressure_field(X.at(t), params)
        else:
            p = ScalarField.zeros(grid)
        states.append(FlowState(t=t, u=u, p=p))
    return states


def residual_check(state, state_prev, X_t, params, tol=None):
    """Field residual of the linearized momentum equation over a state pair.

    Spatial terms are evaluated on the midpoint average of the two states, the
    time derivative by the difference quotient; X_t is the forcing at the
    midpoint time.  Reports the sup residual against ``tol`` (default: half of
    the largest term magnitude), with the L2 residual in metadata.
    """
    dt = state.t - state_prev.t
    if dt <= 0:
        raise ValueError("states must be ordered with dt > 0")
    grid = state.grid
    nu, rho = params.nu, params.rho
    sup_terms = []
    res_max = 0.0
    res_l2_sq = 0.0
    for i in range(3):
        um = 0.5 * (state.u.components[i].samples + state_prev.u.components[i].samples)
        um_f = ScalarField(grid, um)
        lap = sum(derive(um_f, ax, 2).samples for ax in (1, 2, 3))
        dudt = (state.u.components[i].samples - state_prev.u.components[i].samples) / dt
        pm = ScalarField(grid, 0.5 * (state.p.samples + state_prev.p.samples))
        gradp = derive(pm, i + 1).samples
        Xi = X_t.components[i].samples if X_t is not None else 0.0
        R = nu * lap - dudt - gradp / rho + Xi
        res_max = max(res_max, float(np.abs(R).max()))
        res_l2_sq += float(np.sum(R ** 2) * grid.cell_volume)
        sup_terms.extend([
            float(np.abs(nu * lap).max()), float(np.abs(dudt).max()),
            float(np.abs(gradp / rho).max()),
            float(np.abs(Xi).max()) if X_t is not None else 0.0,
        ])
    denom = max(max(sup_terms), 1e-300)
    if tol is None:
        tol = 0.5 * denom
    return make_report(
        "linearized-residual", res_max, float(tol), 0.0,
        {"residual_l2": float(np.sqrt(res_l2_sq)), "dt": dt, "h": grid.h,
         "relative_to_terms": res_max / denom},
    )
