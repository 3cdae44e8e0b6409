import itertools
import math

import numpy as np
import pytest
from scipy.linalg import block_diag

from elastrf import harmonics

from conftest import rand_rot


def test_real_harmonics_orthonormal():
    nodes, w = harmonics.sphere_quadrature(12, 20)
    for l in (0, 1, 3, 6, 8):
        tab = harmonics.real_sph_harm_row(l, nodes)
        gram = np.einsum("q,qm,qn->mn", w, tab, tab)
        assert np.max(np.abs(gram - np.eye(2 * l + 1))) < 1e-12


def test_l1_axis_correspondence():
    pt = np.array([0.3, -0.5, 0.81])
    pt /= np.linalg.norm(pt)
    c = math.sqrt(3.0 / (4.0 * math.pi))
    vals = harmonics.real_sph_harm_row(1, pt) / c
    assert np.max(np.abs(vals - pt[[1, 2, 0]])) < 1e-12


def test_quadrature_weights_total():
    _, w = harmonics.sphere_quadrature(6, 10)
    assert abs(np.sum(w) - 4 * math.pi) < 1e-12


def test_rotation_matrices_orthogonal_homomorphism(rng):
    for l in (1, 2, 4, 8):
        g1, g2 = rand_rot(rng), rand_rot(rng)
        U1 = harmonics.rotation_matrix(l, g1)
        assert np.max(np.abs(U1.T @ U1 - np.eye(2 * l + 1))) < 1e-11
        U12 = harmonics.rotation_matrix(l, g1 @ g2)
        assert np.max(np.abs(U12 - U1 @ harmonics.rotation_matrix(l, g2))) < 1e-11


def test_rotation_matrix_l1_is_permuted_cartesian(rng):
    g = rand_rot(rng)
    perm = [1, 2, 0]
    assert np.max(np.abs(harmonics.rotation_matrix(1, g)
                         - g[np.ix_(perm, perm)])) < 1e-12


def test_rotation_matrix_parity():
    for l in (1, 2, 3, 4):
        U = harmonics.rotation_matrix(l, -np.eye(3))
        assert np.max(np.abs(U - (-1) ** l * np.eye(2 * l + 1))) < 1e-12


def test_clebsch_gordan_pinned():
    assert harmonics.clebsch_gordan(1, 0, 1, 0, 2, 0) == pytest.approx(math.sqrt(2 / 3))
    assert harmonics.clebsch_gordan(1, 1, 1, -1, 0, 0) == pytest.approx(1 / math.sqrt(3))
    assert harmonics.clebsch_gordan(2, 2, 2, -2, 0, 0) == pytest.approx(1 / math.sqrt(5))
    assert harmonics.clebsch_gordan(1, 1, 1, 1, 2, 2) == pytest.approx(1.0)
    assert harmonics.clebsch_gordan(1, 1, 1, 0, 1, 1) == pytest.approx(1 / math.sqrt(2))


def test_clebsch_gordan_orthogonality():
    j1, j2 = 3, 4
    for J in range(abs(j1 - j2), j1 + j2 + 1):
        for Jp in range(abs(j1 - j2), j1 + j2 + 1):
            for M in range(-min(J, Jp), min(J, Jp) + 1):
                s = sum(harmonics.clebsch_gordan(j1, m1, j2, M - m1, J, M)
                        * harmonics.clebsch_gordan(j1, m1, j2, M - m1, Jp, M)
                        for m1 in range(-j1, j1 + 1))
                assert s == pytest.approx(1.0 if J == Jp else 0.0, abs=1e-12)


def test_gg_triangle_error():
    with pytest.raises(harmonics.TriangleError):
        harmonics.gg_coefficients(8, 2, 2)


def test_gg_trivial_cases():
    t = harmonics.gg_coefficients(0, 0, 0)
    assert t.shape == (1, 1, 1) and t[0, 0, 0] == pytest.approx(1.0)
    t = harmonics.gg_coefficients(0, 1, 1)
    assert np.max(np.abs(t[0] * math.sqrt(3) - np.eye(3))) < 1e-12


def test_gg_orthonormal_and_complete():
    for l1, l2 in itertools.product(range(5), repeat=2):
        B = harmonics.gg_block_matrix(l1, l2)
        n = (2 * l1 + 1) * (2 * l2 + 1)
        assert np.max(np.abs(B @ B.T - np.eye(B.shape[0]))) < 1e-10
        assert np.max(np.abs(B.T @ B - np.eye(n))) < 1e-10


def test_gg_intertwines_rotations(rng):
    g = rand_rot(rng)
    for l1, l2 in ((1, 1), (2, 2), (2, 4), (4, 4)):
        B = harmonics.gg_block_matrix(l1, l2)
        U12 = np.kron(harmonics.rotation_matrix(l1, g),
                      harmonics.rotation_matrix(l2, g))
        Ul = block_diag(*[harmonics.rotation_matrix(l, g)
                          for l in range(abs(l1 - l2), l1 + l2 + 1)])
        assert np.max(np.abs(B @ U12 - Ul @ B)) < 1e-10


def test_gg_sign_convention_first_nonzero_positive():
    for l, l1, l2 in ((0, 2, 2), (2, 2, 4), (3, 2, 2), (8, 4, 4)):
        t = harmonics.gg_coefficients(l, l1, l2).ravel()
        nz = t[np.abs(t) > 1e-12]
        assert nz[0] > 0


def test_gg_equivariance_linear_system_oracle(rng):
    """Independent oracle: the coupling table solves the equivariance system
    (U1 x U2) G = G Ul, so it must lie in that system's null space."""
    l, l1, l2 = 2, 1, 1
    G = harmonics.gg_coefficients(l, l1, l2).reshape(2 * l + 1, -1).T
    for _ in range(6):
        g = rand_rot(rng, proper=True)
        U12 = np.kron(harmonics.rotation_matrix(l1, g),
                      harmonics.rotation_matrix(l2, g))
        Ul = harmonics.rotation_matrix(l, g)
        assert np.max(np.abs(U12 @ G - G @ Ul)) < 1e-11
