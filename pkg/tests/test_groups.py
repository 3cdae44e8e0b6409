import math

import numpy as np
import pytest

from elastrf import groups

from conftest import rand_rot

EXPECTED_ORDER = {"K1": 2, "K3": 4, "K5": 8, "K6": 16, "K7": 24, "K8": 24,
                  "K9": 48, "K10": 12, "K11": 24, "K12": 16, "K13": 32,
                  "K15": 48}


@pytest.mark.parametrize("tag,n", sorted(EXPECTED_ORDER.items()))
def test_element_counts_and_closure(tag, n):
    els = groups.enumerate_elements(tag)
    assert len(els) == n
    keys = {groups._key(e.matrix) for e in els}
    assert groups._key(-np.eye(3)) in keys
    rng = np.random.default_rng(1)
    sample = [els[i] for i in rng.integers(0, n, min(8, n))]
    for e1 in sample:
        assert groups._key(np.linalg.inv(e1.matrix)) in keys
        for e2 in sample:
            assert groups._key(e1.matrix @ e2.matrix) in keys


def test_k1_is_inversion_pair():
    mats = sorted(tuple(np.round(e.matrix, 6).ravel())
                  for e in groups.enumerate_elements("K1"))
    assert mats == sorted([tuple(np.eye(3).ravel()),
                           tuple((-np.eye(3)).ravel())])


def test_k5_oracle_closure_of_generators():
    gen = [groups.rot_z(math.pi), groups.rot_x(math.pi), -np.eye(3)]
    oracle = groups._closure(gen)
    assert len(oracle) == 8
    ours = {groups._key(e.matrix) for e in groups.enumerate_elements("K5")}
    assert {groups._key(e.matrix) for e in oracle} == ours


def test_k9_oracle_closure_of_octahedral_generators():
    gen = [groups.rot_z(math.pi / 2),
           groups.rot_axis((1, 1, 1), 2 * math.pi / 3), -np.eye(3)]
    oracle = groups._closure(gen)
    assert len(oracle) == 48
    ours = {groups._key(e.matrix) for e in groups.enumerate_elements("K9")}
    assert {groups._key(e.matrix) for e in oracle} == ours


def test_infinite_groups_raise():
    for tag in ("K2", "K4", "K14", "K16"):
        with pytest.raises(groups.InfiniteGroupError):
            groups.enumerate_elements(tag)


def test_irrep_homomorphism(rng):
    for tag in ("K6", "K7", "K8", "K9", "K10", "K13"):
        els = groups.enumerate_elements(tag)
        by_key = {groups._key(e.matrix): e for e in els}
        for lab in groups.irrep_labels(tag):
            for _ in range(10):
                i, j = rng.integers(0, len(els), 2)
                e1, e2 = els[i], els[j]
                e3 = by_key[groups._key(e1.matrix @ e2.matrix)]
                prod = (groups.irrep_value(tag, lab, e1)
                        @ groups.irrep_value(tag, lab, e2))
                assert np.max(np.abs(prod - groups.irrep_value(tag, lab, e3))) < 1e-9


def test_strata_pinned_examples():
    assert groups.stratum_of("K2", (0, 0, 0)) == 0
    assert groups.stratum_of("K5", (1, 0, 0)) == 1
    assert groups.stratum_of("K9", (1, 1, 1)) == 1
    charts = groups.orbit_strata("K2")
    assert len(charts) == 2 and charts[1].chart.startswith("(0,0,p3)")
    assert len(groups.orbit_strata("K5")) == 5
    assert len(groups.orbit_strata("K9")) == 7
    # the diagonal stratum of the octahedral chain is listed as printed
    assert "0<p1=p2=p3" in groups.orbit_strata("K9")[1].chart


def test_stratum_of_total_and_orbit_constant(rng):
    for tag in groups.FINITE_TAGS:
        for _ in range(60):
            p = rng.standard_normal(3) * rng.choice([1.0, 0.01, 10.0])
            s0 = groups.stratum_of(tag, p)
            assert 0 <= s0 < len(groups.orbit_strata(tag))
            for e in groups.enumerate_elements(tag):
                assert groups.stratum_of(tag, e.matrix @ p) == s0


def test_stratum_of_special_points():
    assert groups.stratum_of("K9", (0, 0, 1)) == 2
    assert groups.stratum_of("K9", (0, 1, 1)) == 3
    assert groups.stratum_of("K9", (0, 1, 2)) == 4
    assert groups.stratum_of("K9", (1, 1, 2)) == 5
    assert groups.stratum_of("K9", (2, 1, 3)) == 6
    assert groups.stratum_of("K4", (1, 0, 0)) == 1
    assert groups.stratum_of("K4", (0, 0, 2)) == 2
    assert groups.stratum_of("K4", (1, 0, 2)) == 3


def test_isotropy_subgroups_fix_representatives():
    for tag in groups.GROUP_TAGS:
        strata = groups.orbit_strata(tag)
        isos = groups.isotropy_subgroups(tag)
        for st, iso in zip(strata, isos):
            assert iso.fixes(st.representative, tol=1e-9), (tag, st.index)


def test_isotropy_subgroups_maximal_among_listed():
    """No later-listed (less symmetric) point's stabilizer strictly contains
    an earlier one's while also fixing the earlier representative."""
    for tag in groups.FINITE_TAGS:
        strata = groups.orbit_strata(tag)
        isos = groups.isotropy_subgroups(tag)
        # stabilizer orders weakly decrease from the origin stratum
        assert isos[0].order == groups.group_case(tag).order
        for st, iso in zip(strata[1:], isos[1:]):
            assert iso.order < isos[0].order
        # a generic point has the smallest stabilizer
        assert isos[-1].order == min(i.order for i in isos[1:])


def test_canonical_representative_is_orbit_invariant(rng):
    for tag in ("K5", "K9", "K13"):
        p = rng.standard_normal(3)
        c0 = groups.canonical_representative(tag, p)
        for e in groups.enumerate_elements(tag):
            c1 = groups.canonical_representative(tag, e.matrix @ p)
            assert np.max(np.abs(c0 - c1)) < 1e-9


def test_wigner_to_gordienko_identity_and_blocks():
    assert np.allclose(groups.wigner_to_gordienko(np.eye(3)), np.eye(3))
    phi = 0.37
    m = groups.wigner_to_gordienko(groups.rot_z(phi))
    c, s = math.cos(phi), math.sin(phi)
    # cos/sin block between the two in-plane rows, middle row fixed
    assert m[1, 1] == pytest.approx(1.0)
    assert abs(m[0, 0] - c) < 1e-12 and abs(m[2, 2] - c) < 1e-12
    assert abs(abs(m[0, 2]) - s) < 1e-12 and abs(abs(m[2, 0]) - s) < 1e-12


def test_wigner_to_gordienko_real_orthogonal_hom(rng):
    for _ in range(10):
        g1, g2 = rand_rot(rng), rand_rot(rng)
        m1 = groups.wigner_to_gordienko(g1)
        assert np.max(np.abs(m1.T @ m1 - np.eye(3))) < 1e-12
        m12 = groups.wigner_to_gordienko(g1 @ g2)
        assert np.max(np.abs(m12 - m1 @ groups.wigner_to_gordienko(g2))) < 1e-12


def test_wigner_to_gordienko_matches_harmonic_convention(rng):
    """The printed unitary differs from the package's real-harmonic basis by
    the sign of one basis vector; the conjugated matrices agree after that
    sign twist."""
    from elastrf import harmonics
    S = np.diag([1.0, 1.0, -1.0])
    for _ in range(5):
        g = rand_rot(rng)
        a = groups.wigner_to_gordienko(g)
        b = S @ harmonics.rotation_matrix(1, g) @ S
        assert np.max(np.abs(a - b)) < 1e-12


def test_basis_mismatch_error():
    # a Wigner-basis matrix in the wrong phase convention leaves an
    # imaginary residue after conjugation
    with pytest.raises(groups.BasisMismatchError):
        groups.gordienko_from_wigner(np.diag([1.0, 1j, 1.0]))
    with pytest.raises(ValueError):
        groups.wigner_to_gordienko(np.diag([2.0, 1.0, 1.0]))
