"""Cell-centered cubic grids, sampled fields, derivatives, and flow diagnostics.

The computational domain is the cube [-L, L]^3 sampled at n cell centers per
axis (midpoint quadrature, weight h^3 per cell).  All fields are expected to
decay well inside the box; boundary stencils are one-sided and see ~zero data.
"""

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Grid3", "ScalarField", "VectorField3", "DiagnosticsSample",
    "make_grid", "integrate", "derive", "divergence", "sup_norm",
    "seminorm_jm", "flow_energy", "sup_derivative", "sample_diagnostics",
]


@dataclass(frozen=True)
class Grid3:
    """Uniform cell-centered grid on [-L, L]^3: n cells per axis, spacing h = 2L/n."""

    n: int
    L: float

    @property
    def h(self):
        return 2.0 * self.L / self.n

    @property
    def cell_volume(self):
        return self.h ** 3

    def axis(self):
        """Cell-center coordinates along one axis: -L + (k + 1/2) h."""
        return -self.L + (np.arange(self.n) + 0.5) * self.h

    def meshgrid(self):
        ax = self.axis()
        return np.meshgrid(ax, ax, ax, indexing="ij")

    def offsets(self, radius_cells=None):
        """Lattice-offset coordinates k*h for |k| <= radius (default: full n-1)."""
        r = self.n - 1 if radius_cells is None else int(radius_cells)
        return self.h * np.arange(-r, r + 1)


def make_grid(n, L):
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise ValueError("n must be an even integer >= 8")
    if n < 8 or n % 2 != 0:
        raise ValueError("n must be even >= 8")
    if not np.isfinite(L) or L <= 0:
        raise ValueError("L must be > 0")
    return Grid3(int(n), float(L))


@dataclass
class ScalarField:
    """Real samples of a function at the cell centers of a Grid3.

    ``samples`` has shape (n, n, n) indexed [i1, i2, i3]; the canonical flat
    order (files, checksums) is x1-fastest, i.e. ``samples.ravel(order="F")``.
    """

    grid: Grid3
    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        shape = (self.grid.n,) * 3
        if self.samples.shape != shape:
            raise ValueError(f"samples must have shape {shape}, got {self.samples.shape}")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("samples must be finite")

    @classmethod
    def from_function(cls, grid, fn):
        X1, X2, X3 = grid.meshgrid()
        return cls(grid, np.asarray(fn(X1, X2, X3), dtype=np.float64))

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros((grid.n,) * 3))

    def copy(self):
        return ScalarField(self.grid, self.samples.copy())

    def __add__(self, other):
        _check_same_grid(self, other)
        return ScalarField(self.grid, self.samples + other.samples)

    def __sub__(self, other):
        _check_same_grid(self, other)
        return ScalarField(self.grid, self.samples - other.samples)

    def __mul__(self, c):
        return ScalarField(self.grid, self.samples * float(c))

    __rmul__ = __mul__


@dataclass
class VectorField3:
    """Three scalar components u1, u2, u3 on one shared grid."""

    u1: ScalarField
    u2: ScalarField
    u3: ScalarField

    def __post_init__(self):
        if not (self.u1.grid == self.u2.grid == self.u3.grid):
            raise ValueError("vector components must share one grid")

    @property
    def grid(self):
        return self.u1.grid

    @property
    def components(self):
        return (self.u1, self.u2, self.u3)

    @classmethod
    def from_functions(cls, grid, f1, f2, f3):
        return cls(*(ScalarField.from_function(grid, f) for f in (f1, f2, f3)))

    @classmethod
    def from_arrays(cls, grid, a1, a2, a3):
        return cls(ScalarField(grid, a1), ScalarField(grid, a2), ScalarField(grid, a3))

    @classmethod
    def zeros(cls, grid):
        return cls(*(ScalarField.zeros(grid) for _ in range(3)))

    def __add__(self, other):
        return VectorField3(*(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other):
        return VectorField3(*(a - b for a, b in zip(self.components, other.components)))

    def __mul__(self, c):
        return VectorField3(*(a * c for a in self.components))

    __rmul__ = __mul__

    def speed_squared(self):
        return sum(c.samples ** 2 for c in self.components)


def _check_same_grid(a, b):
    if a.grid != b.grid:
        raise ValueError("grid mismatch")


def integrate(U, V):
    """Midpoint-rule inner product h^3 * sum(U V); symmetric and bilinear."""
    _check_same_grid(U, V)
    return float(np.sum(U.samples * V.samples) * U.grid.cell_volume)


def _derive_array(a, axis, order, h):
    n = a.shape[axis]
    out = np.empty_like(a)

    def sl(i):
        s = [slice(None)] * 3
        s[axis] = i
        return tuple(s)

    if order == 1:
        out[sl(slice(1, n - 1))] = (a[sl(slice(2, n))] - a[sl(slice(0, n - 2))]) / (2 * h)
        out[sl(0)] = (-3 * a[sl(0)] + 4 * a[sl(1)] - a[sl(2)]) / (2 * h)
        out[sl(n - 1)] = (3 * a[sl(n - 1)] - 4 * a[sl(n - 2)] + a[sl(n - 3)]) / (2 * h)
    else:
        out[sl(slice(1, n - 1))] = (
            a[sl(slice(2, n))] - 2 * a[sl(slice(1, n - 1))] + a[sl(slice(0, n - 2))]
        ) / h ** 2
        out[sl(0)] = (2 * a[sl(0)] - 5 * a[sl(1)] + 4 * a[sl(2)] - a[sl(3)]) / h ** 2
        out[sl(n - 1)] = (2 * a[sl(n - 1)] - 5 * a[sl(n - 2)] + 4 * a[sl(n - 3)] - a[sl(n - 4)]) / h ** 2
    return out


def derive(U, axis, order=1):
    """Finite-difference partial derivative along axis 1, 2 or 3 (order 1 or 2).

    Centered O(h^2) stencils inside, one-sided O(h^2) stencils at the two
    boundary layers.  Deterministic.
    """
    if axis not in (1, 2, 3):
        raise ValueError("axis must be 1, 2, or 3")
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    return ScalarField(U.grid, _derive_array(U.samples, axis - 1, order, U.grid.h))


def divergence(u):
    parts = [derive(c, ax).samples for c, ax in zip(u.components, (1, 2, 3))]
    return ScalarField(u.grid, parts[0] + parts[1] + parts[2])


def sup_norm(u):
    """Max over the grid of |U| (scalar) or of the Euclidean speed (vector)."""
    if isinstance(u, ScalarField):
        return float(np.abs(u.samples).max())
    return float(np.sqrt(u.speed_squared().max()))


def _gradient_arrays(c, h):
    return [_derive_array(c.samples, ax, 1, h) for ax in range(3)]


def seminorm_jm(u, m):
    """L^2 seminorm over all ordered m-th derivative combinations of all components."""
    if m not in (1, 2):
        raise ValueError("m must be 1 or 2")
    h = u.grid.h
    vol = u.grid.cell_volume
    total = 0.0
    for c in u.components:
        if m == 1:
            for g in _gradient_arrays(c, h):
                total += np.sum(g ** 2)
        else:
            for a in range(3):
                for b in range(3):
                    if a == b:
                        d2 = _derive_array(c.samples, a, 2, h)
                    else:
                        d2 = _derive_array(_derive_array(c.samples, a, 1, h), b, 1, h)
                    total += np.sum(d2 ** 2)
    return float(np.sqrt(total * vol))


def flow_energy(u):
    """W = integral of u_i u_i over the box."""
    return float(sum(np.sum(c.samples ** 2) for c in u.components) * u.grid.cell_volume)


def sup_derivative(u, m=1):
    """D_m: max over components and m-th derivative combinations of the sup norm."""
    if m not in (1, 2):
        raise ValueError("m must be 1 or 2")
    h = u.grid.h
    best = 0.0
    for c in u.components:
        if m == 1:
            for g in _gradient_arrays(c, h):
                best = max(best, float(np.abs(g).max()))
        else:
            for a in range(3):
                for b in range(3):
                    if a == b:
                        d2 = _derive_array(c.samples, a, 2, h)
                    else:
                        d2 = _derive_array(_derive_array(c.samples, a, 1, h), b, 1, h)
                    best = max(best, float(np.abs(d2).max()))
    return best


@dataclass(frozen=True)
class DiagnosticsSample:
    """One time slice of the flow diagnostics W, J1, J2, V, D1 (all >= 0)."""

    t: float
    W: float
    J1: float
    J2: float
    V: float
    D1: float


def sample_diagnostics(u, t):
    return DiagnosticsSample(
        t=float(t),
        W=flow_energy(u),
        J1=seminorm_jm(u, 1),
        J2=seminorm_jm(u, 2),
        V=sup_norm(u),
        D1=sup_derivative(u, 1),
    )
