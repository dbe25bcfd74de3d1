"""Parity between the compiled kernels and the NumPy fallback."""

import numpy as np
import pytest

from phasefront import _kernels_py
from phasefront.numerics import Rng

compiled = pytest.importorskip("phasefront._kernels")


def random_field(n_y, n_x, seed):
    return Rng(seed).uniform(n_y * n_x, -1.0, 1.0).reshape(n_y, n_x)


def test_fd1_parity():
    f = random_field(12, 64, 1)
    a = compiled.fd1_periodic(f, 0.31)
    b = _kernels_py.fd1_periodic(f, 0.31)
    assert np.array_equal(a, b)
    v = f[3]
    assert np.array_equal(compiled.fd1_periodic(v, 0.31), _kernels_py.fd1_periodic(v, 0.31))


def test_fd2_parity():
    f = random_field(12, 64, 2)
    a = compiled.fd2_periodic(f, 0.17)
    b = _kernels_py.fd2_periodic(f, 0.17)
    assert np.array_equal(a, b)


def test_allen_cahn_rhs_parity():
    phi = random_field(48, 40, 3)
    a = compiled.allen_cahn_rhs_core(phi, -0.1, 0.1, 0.25, 0.3)
    b = _kernels_py.allen_cahn_rhs_core(phi, -0.1, 0.1, 0.25, 0.3)
    assert np.array_equal(a, b)


def test_tanh_fit_parity():
    rng = Rng(4)
    y = np.linspace(0.0, 90.0, 200)
    m = 24
    h = rng.uniform(m, 12.0, 18.0)
    width = np.sqrt(0.2)
    cols = np.tanh((h[None, :] - y[:, None]) / width)
    cols += rng.uniform(200 * m, -1e-4, 1e-4).reshape(200, m)
    c0 = np.full(m, -1.0 / width)
    d0 = c0 * h

    ca, da, conv_a, cost_a = compiled.tanh_fit_batch(y, cols, c0, d0, 100, 1e-10)
    cb, db, conv_b, cost_b = _kernels_py.tanh_fit_batch(y, cols, c0, d0, 100, 1e-10)
    assert conv_a.all() and conv_b.all()
    # identical algorithm, different summation order: agreement to rounding
    assert np.abs(ca - cb).max() <= 1e-9
    assert np.abs(da / ca - db / cb).max() <= 1e-9
    assert np.abs(cost_a - cost_b).max() <= 1e-12
