import numpy as np
import pytest

from slowflow import make_grid
from slowflow.convolve import (convolve_direct, convolve_offsets,
                               dipole_kernels, gauss_legendre_cell_average,
                               inverse_square_weights, newton_kernel)


def test_fft_matches_direct_sum(rng):
    g = make_grid(16, 4.0)
    field = rng.standard_normal((16,) * 3)
    kernel = rng.standard_normal((7, 7, 7))
    a = convolve_offsets(field, kernel, g.h)
    b = convolve_direct(field, kernel, g.h)
    np.testing.assert_allclose(a, b, atol=1e-12 * np.abs(b).max())


def test_cell_average_exact_for_polynomials():
    assert gauss_legendre_cell_average(lambda x, y, z: 1.0 + 0 * x, np.zeros(3)) == pytest.approx(1.0)
    # int of x^2 over centered unit interval = 1/12
    assert gauss_legendre_cell_average(lambda x, y, z: x * x, np.zeros(3)) == pytest.approx(1.0 / 12.0)


def test_inverse_square_weights_match_exact_cell_averages():
    # the midpoint + curvature form used far from the origin should agree
    # with brute-force cell averages of 1/r^2
    g = make_grid(32, 8.0)
    W = inverse_square_weights(g)
    h = g.h
    i0 = g.n // 2
    for off in [(5, 2, 1), (7, 0, 0), (4, 4, 4), (9, 3, 2)]:
        center = (np.array(off) + 0.5) * h
        exact = gauss_legendre_cell_average(
            lambda x, y, z: 1.0 / (x * x + y * y + z * z), center / h, m=24) / (h * h)
        got = W[i0 + off[0], i0 + off[1], i0 + off[2]]
        assert got == pytest.approx(exact, rel=2e-5)


def test_dipole_kernels_are_odd():
    g = make_grid(12, 3.0)  # small but valid even grid
    # make_grid requires n >= 8; 12 is fine
    Ks = dipole_kernels(g)
    for axis, K in enumerate(Ks):
        flipped = np.flip(K, axis=axis)
        np.testing.assert_allclose(K + flipped, 0.0, atol=1e-15)
        c = g.n - 1
        assert K[c, c, c] == 0.0


def test_newton_kernel_symmetric_and_positive():
    g = make_grid(12, 3.0)
    N = newton_kernel(g)
    assert np.all(N > 0)
    for axis in range(3):
        np.testing.assert_allclose(N, np.flip(N, axis=axis), atol=1e-15)
    # far cells agree with the point kernel
    c = g.n - 1
    r = 5 * g.h
    assert N[c + 5, c, c] == pytest.approx(1.0 / (4 * np.pi * r), rel=1e-4)
