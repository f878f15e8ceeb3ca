"""
The smoothing kernel and its calculus
=====================================

The radial profile A exp(1/(s-1)) on [0, 1) with its computed normalization
gives a compactly supported unit-mass kernel.  Convolving with it never
increases the L2 norm, is self-adjoint, converges strongly to the identity as
the support radius shrinks, and commutes with differentiation.
"""

import numpy as np

from slowflow import derive, integrate, make_grid, sup_norm
from slowflow.analysis import strong_mean_distance
from slowflow.fieldgen import gaussian_bump
from slowflow.mollifier import (kernel_grid_mass, make_kernel, mollify,
                                mollify_derivative)

k = make_kernel(1.0)
print(f"normalization A = {k.normalization:.12f}")
print(f"profile at s=0: {k.profile(0.0):.6f}, at s=1: {k.profile(1.0):.6f}")

grid = make_grid(64, 4.0)
print(f"\nraw midpoint mass at eps/h = {k.epsilon / grid.h:.0f}: "
      f"{kernel_grid_mass(k, grid):.10f}")

U = gaussian_bump(grid, width=0.8)
Um = mollify(U, k)
print(f"\nL2 contraction: {integrate(Um, Um):.6f} <= {integrate(U, U):.6f}")

V = gaussian_bump(grid, width=1.2, center=(0.4, 0.0, -0.3))
print(f"self-adjointness residual: "
      f"{abs(integrate(Um, V) - integrate(U, mollify(V, k))):.2e}")

print("\nstrong convergence (squared L2 distance to U):")
for eps in (1.0, 0.5, 0.25):
    d = strong_mean_distance(mollify(U, make_kernel(eps)), U)
    print(f"  eps = {eps:5.2f}: {d:.6e}")

print("\ncommutation with the derivative (sup residual, halving h):")
for n in (32, 64):
    g = make_grid(n, 4.0)
    Ug = gaussian_bump(g, width=0.8)
    delta = derive(mollify(Ug, k), 1) - mollify_derivative(Ug, k, (1, 0, 0))
    print(f"  n = {n}: {sup_norm(delta):.3e}")
