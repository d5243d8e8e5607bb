import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from fracsplit.core import adjoint_mismatch, objective_F
from fracsplit.problems import (angles_for_range, dct2, default_detectors, discrete_gradient, make_ct_instance,
                                make_divergence_instance, make_quadratic_over_abs, make_sharp_ratio,
                                make_toy_recovery, parallel_beam_projector, sharp_ratio_data, shepp_logan)
from fracsplit.problems.export import read_pgm, write_csv_vector, write_pgm, write_sinogram_csv
from fracsplit.problems.tomography import _ray_row


def test_toy_instance():
    setup = make_toy_recovery()
    B = dct2()
    assert_allclose(B @ B.T, np.eye(2), atol=1e-15)
    p = setup.problem
    assert_allclose(objective_F(p, p.x_true), 1e-3)
    assert p.S.contains(setup.x0)
    assert_allclose(setup.delta_schedule(0), 5.0 + 1.0 + 2.0)
    assert_allclose(setup.gamma_schedule(2), 0.9999 ** 2)


def test_small_ratio_instances():
    p = make_quadratic_over_abs()
    assert_allclose(objective_F(p, np.array([0.0])), 1.0)
    assert_allclose(objective_F(p, np.array([0.5])), 1.25 / 1.5)
    d = make_divergence_instance()
    assert_allclose(objective_F(d.problem, np.array([1.0, 0.0])), 1.5 / 1.5)


def test_sharp_ratio_data_is_seeded_and_well_formed():
    a = sharp_ratio_data(12, 3, 4, seed=5)
    b = sharp_ratio_data(12, 3, 4, seed=5)
    assert_array_equal(a.a, b.a)
    assert_array_equal(a.c_half, b.c_half)
    assert not np.array_equal(a.a, sharp_ratio_data(12, 3, 4, seed=6).a)
    assert np.all(a.r > a.a.max(axis=1))
    for j in range(4):
        C = a.c_half[j] @ a.c_half[j]
        assert_allclose(a.c_half[j], a.c_half[j].T, atol=1e-14)
        assert_allclose(np.sort(np.linalg.eigvalsh(C)), np.sort(a.eigs[j]), atol=1e-12)


def test_sharp_ratio_objective_matches_direct_formula():
    data = sharp_ratio_data(10, 3, 4, seed=2)
    p = make_sharp_ratio(10, 3, 4, seed=2)
    x = np.random.default_rng(0).dirichlet(np.ones(10))
    num = np.max(np.abs(data.r - data.a @ x))
    den = max(x @ (data.c_half[j] @ data.c_half[j]) @ x for j in range(4))
    assert_allclose(objective_F(p, x), num / den, rtol=1e-12)
    assert_allclose(objective_F(p.original, x), num / den, rtol=1e-12)


def test_shepp_logan_phantom():
    img = shepp_logan(64)
    assert img.shape == (64, 64)
    assert img.min() == 0.0 and img.max() == 1.0
    assert_allclose(img[32, 32], 0.2)
    assert img[0, 0] == 0.0
    # the two small ellipses near the bottom sit in the lower half (row 0 is the top)
    assert_allclose([img[51, 31], img[12, 31]], [0.3, 0.2])
    with pytest.raises(ValueError):
        shepp_logan(4)


def test_gradient_hand_value_and_adjoint():
    G = discrete_gradient(2)
    assert_array_equal(G.apply(np.array([0.0, 1.0, 0.0, 1.0])), [1, 0, 1, 0, 0, 0, 0, 0])
    rng = np.random.default_rng(0)
    G8 = discrete_gradient(8)
    for _ in range(20):
        assert adjoint_mismatch(G8, rng.normal(size=64), rng.normal(size=128)) <= 1e-12
    # ||grad|| <= sqrt(8) for forward differences
    assert G8.norm <= np.sqrt(8.0) + 1e-12


def _sampled_lengths(n, theta, t, step=2e-4):
    """Pixel intersection lengths by dense sampling along the ray."""
    half = n / 2.0
    s = np.arange(-n, n, step) + step / 2
    c, sn = np.cos(theta), np.sin(theta)
    X, Y = -t * sn + s * c, t * c + s * sn
    inside = (np.abs(X) < half) & (np.abs(Y) < half)
    col = np.floor(X[inside] + half).astype(int)
    row = np.floor(half - Y[inside]).astype(int)
    out = np.zeros(n * n)
    np.add.at(out, row * n + col, step)
    return out


@given(st.floats(0, np.pi), st.floats(-5.3, 5.3))
def test_siddon_lengths_match_sampling(theta, t):
    n = 8
    dense = np.zeros(n * n)
    hit = _ray_row(n, theta, t)
    if hit is not None:
        np.add.at(dense, hit[0], hit[1])
    assert_allclose(dense, _sampled_lengths(n, theta, t), atol=2e-3)


def test_siddon_hand_values():
    idx, length = _ray_row(8, 0.0, 0.5)
    assert_array_equal(np.sort(idx), 3 * 8 + np.arange(8))
    assert_allclose(length, 1.0)
    idx, length = _ray_row(8, np.pi / 4, 0.0)
    assert_allclose(length.sum(), 8 * np.sqrt(2))
    assert _ray_row(8, 0.0, 4.0) is None


def test_projector_shape_and_adjoint():
    P = parallel_beam_projector(16, angles_for_range(30))
    assert P.shape == (30 * default_detectors(16), 256)
    assert default_detectors(64) == 95
    rng = np.random.default_rng(1)
    for _ in range(20):
        assert adjoint_mismatch(P, rng.normal(size=256), rng.normal(size=P.shape[0])) <= 1e-10
    assert angles_for_range(90)[:3] == [0.0, 1.0, 2.0]


def test_ct_instance_noise_and_convexification():
    clean = make_ct_instance(16, 60, sigma=0.0)
    noisy = make_ct_instance(16, 60, sigma=0.5, seed=3)
    assert_allclose(clean.measurements, clean.projector.apply(clean.phantom.ravel()))
    assert not np.allclose(clean.measurements, noisy.measurements)
    assert_array_equal(noisy.measurements, make_ct_instance(16, 60, sigma=0.5, seed=3).measurements)
    x = clean.phantom.ravel()
    assert_allclose(objective_F(clean.problem, x), objective_F(clean.problem.original, x), rtol=1e-12)
    with pytest.raises(ValueError):
        make_ct_instance(16, 60, sigma=-1.0)


def test_export_round_trip(tmp_path):
    img = np.linspace(0, 1, 12).reshape(3, 4)
    write_pgm(tmp_path / "a.pgm", img)
    back = read_pgm(tmp_path / "a.pgm")
    assert back.shape == (3, 4) and back[0, 0] == 0 and back[-1, -1] == 255
    write_csv_vector(tmp_path / "v.csv", img)
    assert_allclose(np.loadtxt(tmp_path / "v.csv"), img.ravel(), rtol=0)
    write_sinogram_csv(tmp_path / "s.csv", np.arange(6.0), 2)
    assert np.loadtxt(tmp_path / "s.csv", delimiter=",").shape == (2, 3)
