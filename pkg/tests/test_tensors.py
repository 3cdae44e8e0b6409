import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from elastrf import tensors
from elastrf.groups import rot_x, rot_z

from conftest import rand_rot


def test_basis_orthonormal():
    G = tensors._BASIS_FLAT @ tensors._BASIS_FLAT.T
    assert np.max(np.abs(G - np.eye(21))) < 1e-14


def test_vec_roundtrip_preserves_norm(rng):
    C = tensors.symmetrize(rng.standard_normal((3, 3, 3, 3)))
    v = tensors.tensor_to_vec(C)
    back = tensors.vec_to_tensor(v)
    assert np.max(np.abs(back - C)) < 1e-12
    assert abs(np.linalg.norm(v) - np.linalg.norm(C)) < 1e-12


def test_enumeration_matches_axis_letters():
    # first entries of the fixed ordering: yyyy, zzzz, xxxx, zxzx
    assert tensors.INDEX_QUADS[0] == (1, 1, 1, 1)
    assert tensors.INDEX_QUADS[1] == (2, 2, 2, 2)
    assert tensors.INDEX_QUADS[2] == (0, 0, 0, 0)
    assert tensors.INDEX_QUADS[3] == (2, 0, 2, 0)


def test_rotate_identity_and_inversion(rng):
    C = tensors.symmetrize(rng.standard_normal((3, 3, 3, 3)))
    assert np.allclose(tensors.rotate_tensor(np.eye(3), C), C)
    assert np.allclose(tensors.rotate_tensor(-np.eye(3), C), C)


def test_rotate_fixes_isotropic(rng):
    C = tensors.isotropic_tensor(2.0, 0.7)
    for _ in range(5):
        g = rand_rot(rng)
        assert np.max(np.abs(tensors.rotate_tensor(g, C) - C)) < 1e-12


def test_rotate_rejects_non_orthogonal():
    with pytest.raises(ValueError):
        tensors.rotate_tensor(np.diag([2.0, 1.0, 1.0]), np.zeros((3, 3, 3, 3)))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_rotation_preserves_frobenius_norm(seed):
    rng = np.random.default_rng(seed)
    g = rand_rot(rng)
    C = tensors.symmetrize(rng.standard_normal((3, 3, 3, 3)))
    assert abs(np.linalg.norm(tensors.rotate_tensor(g, C))
               - np.linalg.norm(C)) < 1e-12


def test_rep_matrix_consistency_and_orthogonality(rng):
    for _ in range(5):
        g = rand_rot(rng)
        M = tensors.rep_matrix_21(g)
        assert np.max(np.abs(M.T @ M - np.eye(21))) < 1e-10
        C = tensors.symmetrize(rng.standard_normal((3, 3, 3, 3)))
        assert np.max(np.abs(M @ tensors.tensor_to_vec(C)
                             - tensors.tensor_to_vec(tensors.rotate_tensor(g, C)))) < 1e-12


def test_rep_matrix_homomorphism(rng):
    for _ in range(5):
        g1, g2 = rand_rot(rng), rand_rot(rng)
        lhs = tensors.rep_matrix_21(g1 @ g2)
        rhs = tensors.rep_matrix_21(g1) @ tensors.rep_matrix_21(g2)
        assert np.max(np.abs(lhs - rhs)) < 1e-10


def test_rep_matrix_rx_pi_against_componentwise_rotation():
    g = rot_x(np.pi)
    M = tensors.rep_matrix_21(g)
    oracle = np.array([tensors.tensor_to_vec(tensors.rotate_tensor(g, T))
                       for T in tensors.BASIS21]).T
    assert np.max(np.abs(M - oracle)) < 1e-12


def test_ogden_pinned_values():
    assert np.array_equal(tensors.ogden_tensor(0), np.eye(3))
    I1 = tensors.ogden_tensor(1)
    assert I1[0, 0, 1, 1] == 0.0
    assert I1[0, 1, 0, 1] == 0.5
    assert tensors.ogden_tensor(2)[0, 0, 0, 0, 0, 0] == pytest.approx(1.0)
    assert tensors.ogden_tensor(3).shape == (3,) * 8


def test_ogden_recursion_oracle():
    # direct evaluation of the recursion for nu = 2 at scattered indices
    I1 = tensors.ogden_tensor(1)
    I2 = tensors.ogden_tensor(2)
    rng = np.random.default_rng(0)
    for _ in range(20):
        i, j, a, b, c, d = rng.integers(0, 3, 6)
        direct = 0.5 * (np.dot(I1[i, :, a, b], I1[:, j, c, d])
                        + np.dot(I1[i, :, c, d], I1[:, j, a, b]))
        assert I2[i, j, a, b, c, d] == pytest.approx(direct, abs=1e-14)


def test_ogden_range():
    with pytest.raises(ValueError):
        tensors.ogden_tensor(4)
    with pytest.raises(ValueError):
        tensors.ogden_tensor(-1)


def test_L1_and_L4_pinned():
    L1 = tensors.L_function_rank8(1)
    expect = np.einsum("ij,kl,ab,cd->ijklabcd", *([np.eye(3)] * 4))
    assert np.max(np.abs(L1 - expect)) < 1e-14
    I1 = tensors.ogden_tensor(1)
    L4 = tensors.L_function_rank8(4)
    assert np.max(np.abs(L4 - 4 * np.multiply.outer(I1, I1))) < 1e-14
    # L4 is independent of x
    assert np.max(np.abs(tensors.L_function(4, [1.0, 2, 3])
                         - tensors.L_function(4))) < 1e-14


def test_L29_pinned_direction():
    L = tensors.L_function_rank8(29, np.array([0.0, 0.0, 1.0]))
    expect = np.zeros((3,) * 8)
    expect[(2,) * 8] = 1.0
    assert np.max(np.abs(L - expect)) < 1e-14


def test_L_singular_at_origin():
    with pytest.raises(ValueError):
        tensors.L_function(8, np.zeros(3))
    with pytest.raises(ValueError):
        tensors.L_function(29, None)


def test_L_q_range():
    with pytest.raises(ValueError):
        tensors.L_function(0)
    with pytest.raises(ValueError):
        tensors.L_function(30, [1, 0, 0])


def test_constant_L_invariance(rng):
    for q in range(1, 8):
        L = tensors.L_constant(q)
        for _ in range(3):
            M = tensors.rep_matrix_21(rand_rot(rng))
            assert np.max(np.abs(M @ L @ M.T - L)) < 1e-10


def test_L_equivariance(rng):
    for q in range(8, 30):
        for _ in range(2):
            g = rand_rot(rng)
            x = rng.standard_normal(3)
            M = tensors.rep_matrix_21(g)
            lhs = tensors.L_function(q, g @ x)
            rhs = M @ tensors.L_function(q, x) @ M.T
            assert np.max(np.abs(lhs - rhs)) < 1e-10, q


def test_L_homogeneous_degree_zero(rng):
    x = rng.standard_normal(3)
    for q in (8, 17, 22, 25, 29):
        a = tensors.L_function(q, x)
        b = tensors.L_function(q, 3.7 * x)
        assert np.max(np.abs(a - b)) < 1e-12


def test_L25_printed_variant_breaks_symmetry():
    """The one thrice-checked table row with a misprinted monomial: using the
    printed x_j x_k in the (jl)-term instead of x_i x_k breaks the i<->j
    index symmetry, so the corrected form is implemented."""
    x = np.array([0.4, -1.2, 0.9])
    terms = [(2.0, [("I", a, b, 4, 5)], xs + [6, 7])
             for a, b, xs in [(0, 2, [1, 3]), (0, 3, [1, 2]),
                              (1, 2, [0, 3]), (1, 3, [1, 2])]]  # printed: x_j x_k
    bad = tensors._assemble_rank8(terms, x)
    sym_gap = np.max(np.abs(bad - bad.transpose(1, 0, 2, 3, 4, 5, 6, 7)))
    assert sym_gap > 1e-3
    good = tensors.L_function_rank8(25, x)
    assert np.max(np.abs(good - good.transpose(1, 0, 2, 3, 4, 5, 6, 7))) < 1e-12


def test_voigt_round_trip(rng):
    C = tensors.symmetrize(rng.standard_normal((3, 3, 3, 3)))
    V = tensors.to_voigt(C)
    assert np.max(np.abs(tensors.from_voigt(V) - C)) < 1e-13
    assert np.max(np.abs(V - V.T)) < 1e-13


def test_isotropic_tensor_voigt_pattern():
    lam, mu = 1.3, 0.6
    V = tensors.to_voigt(tensors.isotropic_tensor(lam, mu))
    assert V[0, 0] == pytest.approx(lam + 2 * mu)
    assert V[0, 1] == pytest.approx(lam)
    assert V[3, 3] == pytest.approx(mu)
