"""Offset-lattice convolutions and singular-kernel cell averages.

A kernel is sampled at lattice offsets z = k*h (odd-shaped array, center =
offset 0), and the convolution out(x) = h^3 * sum_y K(x - y) U(y) treats U as
zero outside the box.  The FFT path zero-pads; a direct-sum path exists for
oracle comparisons on small grids.

Kernels with an integrable singularity at an offset are represented by their
exact cell averages near the singular point (scale-invariant constants,
computed once by quadrature) and by midpoint values elsewhere.
"""

import os
from functools import lru_cache
from itertools import product

import numpy as np
import scipy.fft as sfft

# Integral of 1/|z|^2 over the unit corner cube [0,1]^3 (octant recursion +
# Gauss-Legendre; agrees with the Bailey-Borwein box integral B3(-2)).
CORNER_CUBE_INV_R2 = 1.9185177746113493
# Integral of 1/|z| over the unit corner cube [0,1]^3 (box integral B3(-1)).
CORNER_CUBE_INV_R = 1.1900386819102190


def fft_workers():
    """Thread count for FFTs, from SLOWFLOW_THREADS (default 1, deterministic)."""
    try:
        return max(1, int(os.environ.get("SLOWFLOW_THREADS", "1")))
    except ValueError:
        return 1


def convolve_offsets(samples, kernel, h):
    """h^3 * linear convolution of a field with an odd-shaped offset kernel."""
    n = samples.shape[0]
    R = (kernel.shape[0] - 1) // 2
    P = sfft.next_fast_len(n + 2 * R)
    w = fft_workers()
    F = sfft.rfftn(samples, s=(P, P, P), workers=w)
    K = sfft.rfftn(kernel, s=(P, P, P), workers=w)
    out = sfft.irfftn(F * K, s=(P, P, P), workers=w)
    sl = slice(R, R + n)
    return out[sl, sl, sl] * h ** 3


class SpectralAccumulator:
    """Accumulate sums of kernel convolutions in the spectral domain.

    All kernels must share one offset radius; the inverse transform runs once.
    """

    def __init__(self, n, radius_cells, h):
        self.n = n
        self.R = int(radius_cells)
        self.h = h
        self.P = sfft.next_fast_len(n + 2 * self.R)
        self._acc = None
        self._field_cache = {}

    def field_fft(self, samples, key=None):
        if key is not None and key in self._field_cache:
            return self._field_cache[key]
        F = sfft.rfftn(samples, s=(self.P,) * 3, workers=fft_workers())
        if key is not None:
            self._field_cache[key] = F
        return F

    def kernel_fft(self, kernel):
        if kernel.shape[0] != 2 * self.R + 1:
            raise ValueError("kernel radius does not match accumulator")
        return sfft.rfftn(kernel, s=(self.P,) * 3, workers=fft_workers())

    def add(self, field_fft, kernel_fft, weight=1.0):
        term = field_fft * kernel_fft
        if weight != 1.0:
            term *= weight
        if self._acc is None:
            self._acc = term
        else:
            self._acc += term

    def extract(self):
        if self._acc is None:
            return np.zeros((self.n,) * 3)
        out = sfft.irfftn(self._acc, s=(self.P,) * 3, workers=fft_workers())
        sl = slice(self.R, self.R + self.n)
        return out[sl, sl, sl] * self.h ** 3


def convolve_direct(samples, kernel, h):
    """Direct-sum reference convolution (small grids / small kernels only)."""
    n = samples.shape[0]
    R = (kernel.shape[0] - 1) // 2
    out = np.zeros_like(samples)
    for di, dj, dk in product(range(-R, R + 1), repeat=3):
        w = kernel[di + R, dj + R, dk + R]
        if w == 0.0:
            continue
        src_i = slice(max(0, -di), min(n, n - di))
        src_j = slice(max(0, -dj), min(n, n - dj))
        src_k = slice(max(0, -dk), min(n, n - dk))
        dst_i = slice(max(0, di), min(n, n + di))
        dst_j = slice(max(0, dj), min(n, n + dj))
        dst_k = slice(max(0, dk), min(n, n + dk))
        out[dst_i, dst_j, dst_k] += w * samples[src_i, src_j, src_k]
    return out * h ** 3


def gauss_legendre_cell_average(fn, center, m=16):
    """Average of fn over the unit cube centered at ``center`` (GL m^3 rule)."""
    xg, wg = np.polynomial.legendre.leggauss(m)
    pts = [center[d] + 0.5 * xg for d in range(3)]
    W = wg[:, None, None] * wg[None, :, None] * wg[None, None, :]
    X, Y, Z = np.meshgrid(*pts, indexing="ij")
    return float(np.sum(W * fn(X, Y, Z)) / 8.0)


@lru_cache(maxsize=None)
def _lattice_cell_averages(kind, near):
    """Unit-h cell averages of a singular radial kernel at integer offsets.

    kind "newton": 1/(4 pi |z|); the offset-0 cell uses the exact centered-cube
    integral.  Offsets are cells centered at lattice points; values scale as
    1/h (newton).  Returns dict {(i,j,k): unit-average} for |offset|_inf <= near.
    """
    if kind != "newton":
        raise ValueError(kind)
    fn = lambda x, y, z: 1.0 / (4.0 * np.pi * np.sqrt(x * x + y * y + z * z))
    out = {}
    for i, j, k in product(range(near + 1), repeat=3):
        key = tuple(sorted((i, j, k)))
        if key in out:
            continue
        if key == (0, 0, 0):
            # centered unit cube = 8 corner half-cubes, each (1/4) of B3(-1)
            out[key] = 8 * 0.25 * CORNER_CUBE_INV_R / (4.0 * np.pi)
        else:
            out[key] = gauss_legendre_cell_average(fn, np.array([i, j, k], float))
    return out


@lru_cache(maxsize=None)
def _dipole_cell_averages(near):
    """Unit-h cell averages of z1/(4 pi |z|^3) at integer offsets (i,j,k), i >= 0.

    Odd in z1: the offset-0 cell average is exactly zero.  Values scale as
    1/h^2.  Keyed by (i, j, k) with j <= k; signs/axes handled by the caller.
    """
    fn = lambda x, y, z: x / (4.0 * np.pi * (x * x + y * y + z * z) ** 1.5)
    out = {}
    for i in range(near + 1):
        for j, k in product(range(near + 1), repeat=2):
            key = (i, *sorted((j, k)))
            if key in out:
                continue
            if i == 0:
                out[key] = 0.0  # odd in z1 across the cell
            else:
                out[key] = gauss_legendre_cell_average(fn, np.array([i, j, k], float))
    return out


@lru_cache(maxsize=None)
def _half_offset_inv_r2_averages(near):
    """Unit-h cell averages of 1/|z|^2 over cells [i,i+1]x[j,j+1]x[k,k+1].

    This is the corner-singularity layout (origin at a cell vertex, as on an
    even cell-centered grid).  The eight corner cells use the exact corner-cube
    integral.  Values scale as 1/h^2.
    """
    fn = lambda x, y, z: 1.0 / (x * x + y * y + z * z)
    out = {}
    for i, j, k in product(range(near), repeat=3):
        key = tuple(sorted((i, j, k)))
        if key in out:
            continue
        if key == (0, 0, 0):
            out[key] = CORNER_CUBE_INV_R2
        else:
            out[key] = gauss_legendre_cell_average(fn, np.array([i, j, k], float) + 0.5)
    return out


def inverse_square_weights(grid, near=3):
    """Cell-averaged samples of 1/|y|^2 on the grid (origin at the center vertex).

    Far cells use the midpoint value plus the (h^2/24) Laplacian correction
    (the second-order term of the exact cell average); cells within ``near``
    of the origin use exact averages.
    """
    X1, X2, X3 = grid.meshgrid()
    R2 = X1 ** 2 + X2 ** 2 + X3 ** 2
    h = grid.h
    W = 1.0 / R2 + (h * h / 12.0) / R2 ** 2
    avgs = _half_offset_inv_r2_averages(near)
    i0 = grid.n // 2
    for i, j, k in product(range(-near, near), repeat=3):
        idx = (i0 + i, i0 + j, i0 + k)
        if not all(0 <= t < grid.n for t in idx):
            continue
        key = tuple(sorted((i if i >= 0 else -1 - i,
                            j if j >= 0 else -1 - j,
                            k if k >= 0 else -1 - k)))
        W[idx] = avgs[key] / (h * h)
    return W


def newton_kernel(grid, near=3):
    """Offset kernel for the Newtonian potential 1/(4 pi r), full lattice."""
    off = grid.offsets()
    OX, OY, OZ = np.meshgrid(off, off, off, indexing="ij")
    R2 = OX ** 2 + OY ** 2 + OZ ** 2
    c = grid.n - 1
    R2[c, c, c] = 1.0
    K = 1.0 / (4.0 * np.pi * np.sqrt(R2))
    h = grid.h
    avgs = _lattice_cell_averages("newton", near)
    for i, j, k in product(range(-near, near + 1), repeat=3):
        key = tuple(sorted((abs(i), abs(j), abs(k))))
        K[c + i, c + j, c + k] = avgs[key] / h
    return K


def dipole_kernels(grid, near=3):
    """Offset kernels K_i(z) = z_i/(4 pi |z|^3), i = 1,2,3, full lattice.

    The kernel is harmonic away from 0 (midpoint values are 4th-order cell
    averages there); near cells use exact averages, the singular cell is 0.
    """
    off = grid.offsets()
    OX, OY, OZ = np.meshgrid(off, off, off, indexing="ij")
    R2 = OX ** 2 + OY ** 2 + OZ ** 2
    c = grid.n - 1
    R2[c, c, c] = 1.0
    denom = 4.0 * np.pi * R2 ** 1.5
    h = grid.h
    avgs = _dipole_cell_averages(near)
    kernels = []
    for comp, O in enumerate((OX, OY, OZ)):
        K = O / denom
        K[c, c, c] = 0.0
        for i, j, k in product(range(-near, near + 1), repeat=3):
            trip = (i, j, k)
            a = trip[comp]
            rest = tuple(sorted(abs(trip[m]) for m in range(3) if m != comp))
            val = np.sign(a) * avgs[(abs(a), *rest)]
            K[c + i, c + j, c + k] = val / (h * h)
        kernels.append(K)
    return kernels
