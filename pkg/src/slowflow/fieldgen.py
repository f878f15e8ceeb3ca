"""Named analytic field generators: decaying test data, solenoidal velocities,
time-modulated forcings, and the cusp target for the modulus probe.

Every generator returns exactly sampled closed-form fields (derivatives are
analytic, never finite-differenced), so generated data can serve as reference
in solver tests.
"""

import numpy as np

from .fields import ScalarField, VectorField3
from .stokes import ForcingField

__all__ = [
    "gaussian_bump", "gaussian_mixture", "solenoidal_gaussian",
    "random_solenoidal", "sin_probe", "cusp_flow",
    "initial_condition", "forcing", "INITIAL_GENERATORS", "FORCING_GENERATORS",
]


def gaussian_bump(grid, width=1.0, center=(0.0, 0.0, 0.0), amplitude=1.0):
    cx, cy, cz = center
    w2 = 2.0 * width * width
    return ScalarField.from_function(
        grid, lambda x, y, z: amplitude * np.exp(-((x - cx) ** 2 + (y - cy) ** 2 + (z - cz) ** 2) / w2)
    )


def gaussian_mixture(grid, rng, n_bumps=3, width_range=(0.6, 1.4), center_radius=None,
                     amplitude=1.0):
    """Random sum of Gaussian bumps, centers well inside the box."""
    if center_radius is None:
        center_radius = grid.L / 4.0
    total = np.zeros((grid.n,) * 3)
    for _ in range(n_bumps):
        c = rng.uniform(-center_radius, center_radius, size=3)
        w = rng.uniform(*width_range)
        a = amplitude * rng.uniform(0.3, 1.0) * rng.choice([-1.0, 1.0])
        total += gaussian_bump(grid, w, c, a).samples
    return ScalarField(grid, total)


def _curl_gaussian_arrays(grid, width, center, axis_vec, amplitude):
    """curl(g * e) for a Gaussian bump g and constant direction e (solenoidal)."""
    X1, X2, X3 = grid.meshgrid()
    cx, cy, cz = center
    dx, dy, dz = X1 - cx, X2 - cy, X3 - cz
    g = amplitude * np.exp(-(dx ** 2 + dy ** 2 + dz ** 2) / (2.0 * width ** 2))
    gx, gy, gz = -dx / width ** 2 * g, -dy / width ** 2 * g, -dz / width ** 2 * g
    e1, e2, e3 = axis_vec
    # curl(g e) = grad g x e
    return (gy * e3 - gz * e2, gz * e1 - gx * e3, gx * e2 - gy * e1)


def solenoidal_gaussian(grid, width=1.0, center=(0.0, 0.0, 0.0),
                        axis_vec=(0.0, 0.0, 1.0), amplitude=1.0):
    """Divergence-free single-vortex field: curl of a Gaussian vector potential."""
    a = _curl_gaussian_arrays(grid, width, center, axis_vec, amplitude)
    return VectorField3.from_arrays(grid, *a)


def random_solenoidal(grid, seed, n_vortices=4, width_range=(0.7, 1.3), amplitude=1.0):
    """Seeded superposition of randomly placed and oriented vortices."""
    rng = np.random.default_rng(seed)
    parts = [np.zeros((grid.n,) * 3) for _ in range(3)]
    for _ in range(n_vortices):
        c = rng.uniform(-grid.L / 4.0, grid.L / 4.0, size=3)
        w = rng.uniform(*width_range)
        e = rng.normal(size=3)
        e /= np.sqrt(np.sum(e ** 2))
        a = amplitude * rng.uniform(0.3, 1.0)
        comp = _curl_gaussian_arrays(grid, w, c, e, a)
        for i in range(3):
            parts[i] += comp[i]
    return VectorField3.from_arrays(grid, *parts)


def sin_probe(grid, index):
    """Oscillatory probe sin(index * x1)."""
    return ScalarField.from_function(grid, lambda x, y, z: np.sin(index * x))


def cusp_flow(grid, delta, window):
    """Solenoidal velocity with a gradient of exact r^{1/2} modulus at the origin.

    Stream potential psi = x1 * F(r^2), F(s) = (s + delta^2)^{3/4}
    * exp(-s^2/(4 w^4)); returns (u, lap_u), both analytic.
    """
    X1, X2, X3 = grid.meshgrid()
    S = X1 ** 2 + X2 ** 2 + X3 ** 2
    d2 = delta * delta
    w4 = window ** 4
    P = (S + d2) ** 0.75
    P1 = 0.75 * (S + d2) ** -0.25
    P2 = -0.1875 * (S + d2) ** -1.25
    P3 = 0.234375 * (S + d2) ** -2.25
    E = np.exp(-S * S / (4.0 * w4))
    E1 = -(S / (2.0 * w4)) * E
    E2 = (S * S / (4.0 * w4 * w4) - 1.0 / (2.0 * w4)) * E
    E3 = (-S ** 3 / (8.0 * w4 ** 3) + 3.0 * S / (4.0 * w4 * w4)) * E
    F = P * E
    F1 = P1 * E + P * E1
    F2 = P2 * E + 2.0 * P1 * E1 + P * E2
    F3 = P3 * E + 3.0 * P2 * E1 + 3.0 * P1 * E2 + P * E3
    zero = np.zeros_like(F)
    u = VectorField3.from_arrays(grid, 2.0 * X1 * X2 * F1, -(F + 2.0 * X1 ** 2 * F1), zero)
    # Lap psi = 10 x1 F' + 4 s x1 F'' ; Lap u = (d2 Lap psi, -d1 Lap psi, 0)
    d2_lap = 28.0 * X1 * X2 * F2 + 8.0 * X1 * X2 * S * F3
    d1_lap = 10.0 * F1 + 4.0 * S * F2 + 28.0 * X1 ** 2 * F2 + 8.0 * X1 ** 2 * S * F3
    lap_u = VectorField3.from_arrays(grid, d2_lap, -d1_lap, zero)
    return u, lap_u


def ramped_forcing(grid, shape, lap_shape, nu, t_ramp):
    """Forcing whose exact response from rest is q(t) * shape, with
    q = sin^2(pi t / (2 t_ramp)) ramping from 0 to 1."""

    def sampler(t):
        q = np.sin(0.5 * np.pi * t / t_ramp) ** 2
        qp = (0.5 * np.pi / t_ramp) * np.sin(np.pi * t / t_ramp)
        return VectorField3.from_arrays(
            grid,
            *(qp * s.samples - nu * q * l.samples
              for s, l in zip(shape.components, lap_shape.components)),
        )

    return ForcingField(grid, sampler)


def _gaussian_laplacian_curl(grid, width, center, axis_vec, amplitude):
    """Componentwise Laplacian of the curl-Gaussian field (analytic)."""
    X1, X2, X3 = grid.meshgrid()
    cx, cy, cz = center
    dx, dy, dz = X1 - cx, X2 - cy, X3 - cz
    r2 = dx ** 2 + dy ** 2 + dz ** 2
    w2 = width ** 2
    g = amplitude * np.exp(-r2 / (2.0 * w2))
    # Lap(curl(g e)) = curl(Lap(g) e) = grad(Lap g) x e
    lap_g_over_g = r2 / w2 ** 2 - 3.0 / w2
    # d/dx_i (Lap g) = [2 x_i / w^4 - lap_g_over_g * x_i / w^2] g
    gx = (2.0 * dx / w2 ** 2 - lap_g_over_g * dx / w2) * g
    gy = (2.0 * dy / w2 ** 2 - lap_g_over_g * dy / w2) * g
    gz = (2.0 * dz / w2 ** 2 - lap_g_over_g * dz / w2) * g
    e1, e2, e3 = axis_vec
    return (gy * e3 - gz * e2, gz * e1 - gx * e3, gx * e2 - gy * e1)


def solenoidal_gaussian_laplacian(grid, width=1.0, center=(0.0, 0.0, 0.0),
                                  axis_vec=(0.0, 0.0, 1.0), amplitude=1.0):
    a = _gaussian_laplacian_curl(grid, width, center, axis_vec, amplitude)
    return VectorField3.from_arrays(grid, *a)


def gradient_pulse_forcing(grid, width=1.0, amplitude=1.0, t_scale=1.0):
    """Irrotational forcing X = q(t) grad(phi), phi a Gaussian bump."""
    X1, X2, X3 = grid.meshgrid()
    r2 = X1 ** 2 + X2 ** 2 + X3 ** 2
    phi = amplitude * np.exp(-r2 / (2.0 * width ** 2))
    gcomp = (-X1 / width ** 2 * phi, -X2 / width ** 2 * phi, -X3 / width ** 2 * phi)

    def sampler(t):
        q = np.exp(-t / t_scale)
        return VectorField3.from_arrays(grid, *(q * g for g in gcomp))

    return ForcingField(grid, sampler)


def solenoidal_pulse_forcing(grid, width=1.0, amplitude=1.0, t_scale=1.0,
                             axis_vec=(0.0, 0.0, 1.0)):
    """Divergence-free forcing: time-damped curl-Gaussian."""
    base = _curl_gaussian_arrays(grid, width, (0.0, 0.0, 0.0), axis_vec, amplitude)

    def sampler(t):
        q = np.exp(-t / t_scale)
        return VectorField3.from_arrays(grid, *(q * b for b in base))

    return ForcingField(grid, sampler)


# --- named registries for experiment configs -------------------------------

def _ic_zero(grid, params):
    return VectorField3.zeros(grid)


def _ic_solenoidal_gaussian(grid, params):
    return solenoidal_gaussian(grid, width=params.get("width", 1.0),
                               amplitude=params.get("amplitude", 1.0))


def _ic_random_solenoidal(grid, params):
    return random_solenoidal(grid, seed=int(params.get("seed", 0)),
                             n_vortices=int(params.get("n_vortices", 4)),
                             amplitude=params.get("amplitude", 1.0))


INITIAL_GENERATORS = {
    "zero": _ic_zero,
    "solenoidal_gaussian": _ic_solenoidal_gaussian,
    "random_solenoidal": _ic_random_solenoidal,
}


def _f_none(grid, params, fluid):
    return None


def _f_solenoidal_pulse(grid, params, fluid):
    return solenoidal_pulse_forcing(grid, width=params.get("width", 1.0),
                                    amplitude=params.get("amplitude", 1.0),
                                    t_scale=params.get("t_scale", 1.0))


def _f_gradient_pulse(grid, params, fluid):
    return gradient_pulse_forcing(grid, width=params.get("width", 1.0),
                                  amplitude=params.get("amplitude", 1.0),
                                  t_scale=params.get("t_scale", 1.0))


FORCING_GENERATORS = {
    "none": _f_none,
    "solenoidal_pulse": _f_solenoidal_pulse,
    "gradient_pulse": _f_gradient_pulse,
}


def initial_condition(name, grid, params=None):
    if name not in INITIAL_GENERATORS:
        raise ValueError(f"unknown initial-condition generator '{name}'")
    return INITIAL_GENERATORS[name](grid, params or {})


def forcing(name, grid, params=None, fluid=None):
    if name not in FORCING_GENERATORS:
        raise ValueError(f"unknown forcing generator '{name}'")
    return FORCING_GENERATORS[name](grid, params or {}, fluid)
