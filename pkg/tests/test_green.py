import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nfhmimo import WaveParams, amplitude_tensor, green_frobenius_sq_closed_form, green_tensor
from nfhmimo.errors import CoincidentPoints
from nfhmimo.green import frobenius_coefficients

from conftest import fd_operator_green


def test_matches_operator_form_by_finite_differences():
    rng = np.random.default_rng(2024)
    w = WaveParams.from_wavelength(0.01)
    worst = 0.0
    for _ in range(100):
        direction = rng.normal(size=3)
        direction /= np.linalg.norm(direction)
        d = rng.uniform(0.1, 5.0) * w.wavelength
        r = d * direction
        ref = fd_operator_green(r, w.k0, 2e-3 * min(d, w.wavelength / (2 * np.pi)))
        got = green_tensor(r, np.zeros(3), w)
        worst = max(worst, np.linalg.norm(got - ref) / np.linalg.norm(ref))
    assert worst <= 1e-6


def test_entries_along_z_axis():
    w = WaveParams.from_wavelength(0.01)
    d = 0.013
    x = w.k0 * d
    g = green_tensor([0, 0, d], [0, 0, 0], w)
    pref = -1j * np.exp(1j * x) / (4 * np.pi * d)
    # longitudinal: 1 + i/x - 1/x^2 + 3/x^2 - 3i/x - 1 = 2/x^2 - 2i/x
    assert g[2, 2] == pytest.approx(pref * (2 / x ** 2 - 2j / x), rel=1e-13)
    assert g[0, 0] == pytest.approx(pref * (1 + 1j / x - 1 / x ** 2), rel=1e-13)
    assert g[1, 1] == pytest.approx(g[0, 0], rel=1e-15)
    assert abs(g[0, 1]) == 0 and abs(g[0, 2]) == 0


def test_trace_identity_random():
    rng = np.random.default_rng(5)
    w = WaveParams.from_wavelength(0.01)
    kd = rng.uniform(0.1, 100, 1000)
    dirs = rng.normal(size=(1000, 3))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    d_vec = dirs * (kd / w.k0)[:, None]
    g = green_tensor(d_vec, np.zeros(3), w)
    tr = np.einsum("nij,nij->n", g.conj(), g).real
    closed = green_frobenius_sq_closed_form(d_vec, w)
    assert np.max(np.abs(closed - tr) / tr) <= 1e-10


def test_frobenius_coefficients():
    w = WaveParams.from_wavelength(0.01)
    e1, e2, e3 = frobenius_coefficients(np.array([0.3, -0.2, 0.7]), w)
    c = 16 * np.pi ** 2
    assert e1 == pytest.approx(1 / (8 * np.pi ** 2), rel=1e-14)
    assert e2 == pytest.approx(2 / (c * w.k0 ** 2), rel=1e-14)
    assert e3 == pytest.approx(6 / (c * w.k0 ** 4), rel=1e-14)


def test_power_law_limits():
    w = WaveParams.from_wavelength(0.01)
    # far: d^2 ||G||^2 -> 1/(8 pi^2); near: d^6 ||G||^2 -> 6/(16 pi^2 k^4)
    far = 1e4 * w.wavelength
    near = 1e-4 * w.wavelength
    g_far = green_frobenius_sq_closed_form([0, 0, far], w)
    g_near = green_frobenius_sq_closed_form([0, 0, near], w)
    assert g_far * far ** 2 == pytest.approx(1 / (8 * np.pi ** 2), rel=1e-6)
    assert g_near * near ** 6 == pytest.approx(6 / (16 * np.pi ** 2 * w.k0 ** 4), rel=1e-6)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=6, max_size=6))
def test_reciprocity_and_symmetry(xs):
    r, t = np.array(xs[:3]), np.array(xs[3:])
    if np.linalg.norm(r - t) < 1e-3:
        return
    w = WaveParams.from_wavelength(0.01)
    g = green_tensor(r, t, w)
    np.testing.assert_array_equal(g, green_tensor(t, r, w))
    np.testing.assert_allclose(g, g.T, rtol=0, atol=1e-14 * np.abs(g).max())


def test_rotation_covariance():
    rng = np.random.default_rng(9)
    w = WaveParams.from_wavelength(0.01)
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    d = rng.normal(size=3) * 0.01
    np.testing.assert_allclose(green_tensor(q @ d, np.zeros(3), w),
                               q @ green_tensor(d, np.zeros(3), w) @ q.T, atol=1e-12)


def test_amplitude_times_phase():
    w = WaveParams.from_wavelength(0.01)
    d_vec = np.array([[0.01, 0.02, 0.03], [0.5, 0.0, -0.1]])
    d = np.linalg.norm(d_vec, axis=1)
    amp = amplitude_tensor(d_vec, w)
    np.testing.assert_allclose(amp * np.exp(1j * w.k0 * d)[:, None, None],
                               green_tensor(d_vec, np.zeros(3), w), rtol=1e-13)


def test_broadcasting_shapes():
    w = WaveParams.from_wavelength(0.01)
    d_vec = np.ones((4, 5, 3))
    assert green_tensor(d_vec, np.zeros(3), w).shape == (4, 5, 3, 3)
    assert green_frobenius_sq_closed_form(d_vec, w).shape == (4, 5)


def test_coincident_points_rejected():
    w = WaveParams.from_wavelength(0.01)
    with pytest.raises(CoincidentPoints):
        green_tensor([1, 2, 3], [1, 2, 3], w)
    with pytest.raises(CoincidentPoints):
        green_frobenius_sq_closed_form([[0, 0, 1], [0, 0, 0]], w)


def test_wave_params():
    w = WaveParams.from_frequency(30e9, round_wavelength=True)
    assert w.wavelength == 0.01
    assert w.k0 * w.wavelength == pytest.approx(2 * math.pi, rel=1e-15)
    exact = WaveParams.from_frequency(30e9)
    assert exact.wavelength == pytest.approx(0.00999308, rel=1e-6)
    with pytest.raises(ValueError):
        WaveParams(-1.0, 0.01)
