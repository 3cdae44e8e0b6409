import math

import numpy as np
import pytest

from elastrf import covariance, groups, harmonics, reps, tensors

from conftest import rand_rot

CLASS_DIM_ROW = {"triclinic": 21, "monoclinic": 13, "orthotropic": 9,
                 "trigonal": 6, "tetragonal": 6, "transverse_isotropic": 5,
                 "cubic": 3, "isotropic": 2}

FIXED_DIMS = {"K1": 21, "K2": 2, "K3": 13, "K4": 5, "K5": 9, "K6": 6,
              "K7": 5, "K8": 3, "K9": 3, "K10": 6, "K11": 5, "K12": 6,
              "K13": 5, "K14": 5, "K15": 3, "K16": 2}


def test_class_dims():
    for name, d in CLASS_DIM_ROW.items():
        assert reps.class_fixed_space(name).shape == (d, 21)


@pytest.mark.parametrize("tag", groups.GROUP_TAGS)
def test_fixed_point_dimensions(tag):
    assert reps.trivial_multiplicity(tag) == FIXED_DIMS[tag]


@pytest.mark.parametrize("tag", groups.GROUP_TAGS)
def test_structure_matches_expected_table(tag):
    assert reps.structure_summary(tag) == reps.EXPECTED_STRUCTURE[tag]


@pytest.mark.parametrize("tag", groups.GROUP_TAGS)
def test_adapted_basis_orthonormal(tag):
    Q = reps.adapted_basis(tag)
    assert np.max(np.abs(Q @ Q.T - np.eye(Q.shape[0]))) < 1e-9


def test_fixed_vectors_invariant_under_whole_group(rng):
    for tag in groups.FINITE_TAGS:
        B = reps.fixed_point_basis(tag)
        for e in groups.enumerate_elements(tag):
            R = tensors.rep_matrix_21(e.matrix)
            assert np.max(np.abs(B @ R.T - B)) < 1e-9
    for tag in ("K2", "K4", "K14", "K16"):
        B = reps.fixed_point_basis(tag)
        gens = groups.group_case(tag).generators
        for g in gens:
            R = tensors.rep_matrix_21(g)
            assert np.max(np.abs(B @ R.T - B)) < 1e-9


def test_trivial_projector_rank_matches(rng):
    # projector averaging the 21-dim rep has the trivial multiplicity as rank
    for tag in ("K5", "K6", "K9", "K13"):
        mats = groups.element_matrices(tag)
        P = np.mean([tensors.rep_matrix_21(g) for g in mats], axis=0)
        assert np.max(np.abs(P @ P - P)) < 1e-10
        assert np.max(np.abs(P - P.T)) < 1e-10
        assert round(float(np.trace(P))) == reps.trivial_multiplicity(tag)


def test_adapted_rep_is_block_diagonal(rng):
    for tag in ("K6", "K7", "K8", "K9", "K11", "K13"):
        els = groups.enumerate_elements(tag)
        for e in [els[i] for i in rng.integers(0, len(els), 4)]:
            U = reps.rep_on_adapted(tag, e.matrix)
            for lab, n, sl in reps.block_slices(tag):
                W = groups.irrep_value(tag, lab, e)
                assert np.max(np.abs(U[sl, sl] - W)) < 1e-9
                U[sl, sl] = 0.0
            assert np.max(np.abs(U)) < 1e-9


def test_class_membership_of_value_space():
    """Adapted vectors are fixed by the class group, except for the hexagonal
    orthotropic-size case whose value space is the invariant realization."""
    for tag in groups.FINITE_TAGS:
        if tag == "K7":
            continue
        htag = groups.CLASS_GROUP[groups.group_case(tag).class_name]
        Q = reps.adapted_basis(tag)
        for e in groups.enumerate_elements(htag):
            R = tensors.rep_matrix_21(e.matrix)
            assert np.max(np.abs(Q @ R.T - Q)) < 1e-9, tag


def test_k7_value_space_is_k_invariant():
    Q = reps.adapted_basis("K7")
    P = Q.T @ Q
    for e in groups.enumerate_elements("K7"):
        R = tensors.rep_matrix_21(e.matrix)
        assert np.max(np.abs(R @ P @ R.T - P)) < 1e-9


def test_harmonic_tensor_basis_orthonormal_and_equivariant(rng):
    hb = reps.harmonic_tensor_basis()
    rows = np.vstack([hb[k] for k in ((0, 1), (0, 2), (2, 1), (2, 2), (4, 1))])
    assert np.max(np.abs(rows @ rows.T - np.eye(21))) < 1e-12
    for _ in range(3):
        g = rand_rot(rng)
        R = tensors.rep_matrix_21(g)
        for (l, n) in ((2, 1), (2, 2), (4, 1)):
            U = harmonics.rotation_matrix(l, g)
            assert np.max(np.abs(R @ hb[(l, n)].T - hb[(l, n)].T @ U)) < 1e-11


def test_isotropic_pair_construction():
    hb = reps.harmonic_tensor_basis()
    dd = np.einsum("ij,kl->ijkl", np.eye(3), np.eye(3))
    assert np.max(np.abs(tensors.vec_to_tensor(hb[(0, 1)][0]) - dd / 3)) < 1e-14
    t02 = tensors.vec_to_tensor(hb[(0, 2)][0])
    expect = (tensors.ogden_tensor(1) - dd / 3) / math.sqrt(5)
    assert np.max(np.abs(t02 - expect)) < 1e-14


def test_coupled_basis_counts_and_orthonormality():
    sizes = {0: 7, 1: 10, 2: 8, 3: 3, 4: 1}
    vecs = []
    for t in range(5):
        fam = reps.coupled_basis(t)
        assert len(fam) == sizes[t]
        for cb in fam:
            assert cb.blocks.shape[0] == 4 * t + 1
            vecs.extend(b.ravel() for b in cb.blocks)
    V = np.array(vecs)
    assert np.max(np.abs(V @ V.T - np.eye(len(V)))) < 1e-10


def test_coupled_basis_range():
    with pytest.raises(ValueError):
        reps.coupled_basis(5)


def test_first_coupled_row_is_isotropic_product():
    hb = reps.harmonic_tensor_basis()
    t01 = hb[(0, 1)][0]
    cb = reps.coupled_basis(0)[0]
    assert np.max(np.abs(cb.block(0) - np.outer(t01, t01))) < 1e-14


def test_zonal_family_spans_axis_invariant_space():
    mats, labels = reps.zonal_invariant_matrices()
    assert mats.shape == (29, 21, 21)
    gens = [groups.rot_z(0.7), np.diag([1.0, -1.0, 1.0])]
    for g in gens:
        R = tensors.rep_matrix_21(g)
        assert np.max(np.abs(np.einsum("ij,ajk,lk->ail", R, mats, R) - mats)) < 1e-12


def test_zonal_transport_identity(rng):
    """Transporting the zonal block to direction n matches the row-mixed
    combination given by the rotation matrix column through the pole."""
    n = rng.standard_normal(3)
    n /= np.linalg.norm(n)
    g = reps.rotation_to_pole(n)
    for (tt, v) in ((2, 1), (4, 2)):
        cb = reps.coupled_basis_all()[(tt, v)]
        U = harmonics.rotation_matrix(tt, g)
        R = tensors.rep_matrix_21(g)
        lhs = R @ cb.block(0) @ R.T
        rhs = sum(U[u + tt, tt] * cb.blocks[u + tt] for u in range(-tt, tt + 1))
        assert np.max(np.abs(lhs - rhs)) < 1e-11


def test_m_to_l_expansion_residual_and_invariance(rng):
    m2l = reps.m_to_l_expansion()
    assert set(m2l) == {(2 * t, v) for t in range(5)
                        for v in range(1, reps.FAMILY_SIZES[t] + 1)}
    # the first zonal block is a pure multiple of the first coupling block
    alpha = m2l[(0, 1)]
    assert alpha[0] == pytest.approx(1.0 / 9.0, abs=1e-12)
    assert np.max(np.abs(alpha[1:])) < 1e-12
    # coefficients are direction-independent: re-derive at two fresh points
    for (tt, v) in ((2, 3), (8, 1)):
        for _ in range(2):
            n = rng.standard_normal(3)
            n /= np.linalg.norm(n)
            M = reps.zonal_block_at(tt, v, n)
            L = sum(m2l[(tt, v)][q - 1] * tensors.L_function(q, n)
                    for q in range(1, 30))
            assert np.max(np.abs(M - L)) < 1e-9


def test_printed_equality_relations_hold():
    mats, _ = reps.zonal_invariant_matrices()
    scale = covariance._COMP_SCALE

    def e(i, j):
        return mats[:, i - 1, j - 1] * scale[i - 1] * scale[j - 1]

    for k, (a, b) in enumerate(covariance.H1_ROWS, start=1):
        assert np.max(np.abs(e(*a) - e(*b))) < 1e-12, f"H1 row {k}"
    for k, (targets, combo) in enumerate(covariance.H2_ROWS, start=1):
        rhs = sum(c * e(*ij) for c, ij in combo)
        for t in targets:
            assert np.max(np.abs(e(*t) - rhs)) < 1e-12, f"H2 row {k}"


def test_h1_row1_as_literally_printed_fails():
    """The first equality row's printed indices (1,3) cannot hold on the
    invariant family (the identity matrix is invariant yet has f13 = 0);
    the corrected diagonal pair (1,1) = (3,3) is implemented."""
    mats, _ = reps.zonal_invariant_matrices()
    bad = np.max(np.abs(mats[:, 0, 0] - mats[:, 0, 2]))
    assert bad > 1e-3
    good = np.max(np.abs(mats[:, 0, 0] - mats[:, 2, 2]))
    assert good < 1e-12


def test_u_sum_identities_of_the_isotropic_blocks():
    """The block trace densities of the three isotropic zonal matrices carry
    the printed rational coefficients, and the second is twice the third."""
    mats, labels = reps.zonal_invariant_matrices()
    idx = {lab: i for i, lab in enumerate(labels)}
    expect = {3: (1 / (2 * math.sqrt(5)), 1 / (4 * math.sqrt(5))),
              6: (11 / (28 * math.sqrt(5)), 11 / (56 * math.sqrt(5))),
              7: (2 / 7, 1 / 7)}
    for v, (c2, c3) in expect.items():
        _, phi2, phi3 = covariance.phi_group_sums(mats[idx[(0, v)]])
        assert phi2 == pytest.approx(c2, abs=1e-12)
        assert phi3 == pytest.approx(c3, abs=1e-12)
        assert phi2 == pytest.approx(2 * phi3, abs=1e-12)


def test_snapshot_artifact_matches():
    assert reps.check_snapshot(tol=1e-9) < 1e-9
