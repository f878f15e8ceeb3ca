"""
Energy accounting along a run
=============================

Along any computed run, viscous dissipation plus the kinetic-energy change
must equal the work done by the forcing, and the square root of the energy is
controlled by its initial value plus the integrated forcing norm.  The bound
suite certifies the monotone decay laws and, on a self-similar release, the
decay exponents -1/4, -3/4, -5/4, -1/2, -1.
"""

import numpy as np

from slowflow import make_grid
from slowflow.energy import (bound_suite, diagnostics_series,
                             energy_balance_residual, energy_inequality_check)
from slowflow.fieldgen import solenoidal_gaussian
from slowflow.stokes import FluidParams, solve_linearized

par = FluidParams(nu=1.0, rho=1.0)

grid = make_grid(64, 8.0)
u0 = solenoidal_gaussian(grid, width=1.0)
states = solve_linearized(u0, None, par, list(np.linspace(0.0, 1.0, 20)))
series = diagnostics_series(states, None, par)

rep = energy_balance_residual(series, states, None, par)
print(f"energy balance: worst residual {rep.lhs * 100:.2f}% of W(0), pass = {rep.passed}")
rep = energy_inequality_check(series)
print(f"energy inequality: pass = {rep.passed}")

print("\nmonotone decay:")
for r in bound_suite(u0, states, None, par):
    print(f"  {r.name}: {r.lhs:.6f} <= {r.rhs:.6f}  pass = {r.passed}")

# decay exponents need a narrow release followed over a decade of times
print("\ndecay exponents (narrow release, decade of t):")
g = make_grid(80, 8.0)
s = 0.3
u0 = solenoidal_gaussian(g, width=s)
times = [0.0] + list(np.geomspace(3 * s * s, 33 * s * s, 8))
states = solve_linearized(u0, None, par, times)
for r in bound_suite(u0, states, None, par, scaling=True):
    if "decay" in r.name or "scaling" in r.name:
        print(f"  {r.name}: fitted {r.lhs:+.3f}, predicted {r.rhs:+.2f}, pass = {r.passed}")
