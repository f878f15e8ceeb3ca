"""
Sampled fields, quadrature, and the basic integral inequalities
===============================================================

Build a cell-centered grid on [-L, L]^3, sample decaying test fields, and
check the Schwarz and Hardy inequalities against closed-form radial values.
"""

import numpy as np

from slowflow import ScalarField, derive, integrate, make_grid
from slowflow.analysis import hardy_check, schwarz_check
from slowflow.fieldgen import gaussian_bump

# A 64^3 grid with half-width 8: spacing h = 0.25, one quadrature weight h^3
# per cell.  Test fields are Gaussians, so everything decays far inside the
# box and truncation is below quadrature noise.
grid = make_grid(64, 8.0)
print(f"grid: n = {grid.n}, L = {grid.L}, h = {grid.h}")

U = gaussian_bump(grid, width=1.0)
print(f"integral of U^2      = {integrate(U, U):.12f}")
print(f"pi^(3/2) (exact)     = {np.pi ** 1.5:.12f}")

# Schwarz: (int U V)^2 <= int U^2 * int V^2, with equality for V = c U.
V = gaussian_bump(grid, width=1.3, center=(0.5, -0.4, 0.2))
rep = schwarz_check(U, V)
print(f"\nSchwarz: lhs = {rep.lhs:.6f}, rhs = {rep.rhs:.6f}, pass = {rep.passed}")
rep_eq = schwarz_check(U, 3.0 * U)
print(f"Schwarz at equality: margin = {rep_eq.margin:.2e}")

# Hardy: int u^2/r^2 <= 4 int |grad u|^2.  For the unit Gaussian the two
# sides approach 2 pi^(3/2) and 6 pi^(3/2) -- a ratio of exactly 1/3.
fine = make_grid(128, 8.0)
rep = hardy_check(gaussian_bump(fine, width=1.0))
print(f"\nHardy: lhs = {rep.lhs:.4f} (2 pi^1.5 = {2 * np.pi ** 1.5:.4f})")
print(f"       rhs = {rep.rhs:.4f} (6 pi^1.5 = {6 * np.pi ** 1.5:.4f})")
print(f"       ratio = {rep.lhs / rep.rhs:.5f}, pass = {rep.passed}")

# Derivatives are centered O(h^2) stencils with one-sided boundaries.
S = ScalarField.from_function(grid, lambda x, y, z: np.sin(x) * np.exp(-(y * y + z * z) / 4))
dS = derive(S, 1)
X1, X2, X3 = grid.meshgrid()
exact = np.cos(X1) * np.exp(-(X2 ** 2 + X3 ** 2) / 4)
err = np.abs(dS.samples - exact)[(slice(2, -2),) * 3].max()
print(f"\ncentered-difference error on sin(x1): {err:.2e} (h^2 = {grid.h ** 2:.2e})")
