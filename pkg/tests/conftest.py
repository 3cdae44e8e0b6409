import numpy as np
import pytest

from elastrf import covariance, groups, reps


def rand_rot(rng, proper=None):
    q = np.linalg.qr(rng.standard_normal((3, 3)))[0]
    if proper is True and np.linalg.det(q) < 0:
        q[:, 0] *= -1
    return q


def rand_valid_f(tag, p, rng):
    """Random admissible spectral density at p: a stabilizer-averaged PSD
    matrix with unit trace."""
    d = reps.adapted_basis(tag).shape[0]
    A = rng.standard_normal((d, d))
    f = A @ A.T
    case = groups.group_case(tag)
    if case.finite:
        g3, Ud = covariance._adapted_rep_elements(tag)
        scale = max(1.0, float(np.linalg.norm(p)))
        stab = [i for i in range(len(g3))
                if np.max(np.abs(g3[i] @ p - p)) <= 1e-10 * scale]
        f = np.mean([Ud[i] @ f @ Ud[i].T for i in stab], axis=0)
    elif tag == "K2":
        mats, _ = reps.zonal_invariant_matrices()
        coef = np.einsum("aij,ij->a", mats, f)
        f = np.einsum("a,aij->ij", coef, mats)
    elif tag == "K4":
        f = _k4_structure_average(f)
    return f / np.trace(f)


def _k4_structure_average(f):
    out = np.zeros_like(f)
    slices = reps.block_slices("K4")
    for la, na, sa in slices:
        for lb, nb, sb in slices:
            B = f[sa, sb]
            if la == lb == "U0gg":
                out[sa, sb] = B
            elif la == lb and la != "U0gg":
                out[sa, sb] = (np.trace(B) / 2.0) * np.eye(2)
    return out


def random_spec(tag, rng, n_atoms=1, with_mean=True):
    m = reps.trivial_multiplicity(tag)
    atoms = []
    for _ in range(n_atoms):
        if tag in ("K2", "K16"):
            p = np.array([0.0, 0.0, float(rng.uniform(0.5, 2.5))])
        else:
            p = rng.standard_normal(3)
        atoms.append(covariance.SpectralAtom(p, float(rng.uniform(0.2, 1.0)),
                                             rand_valid_f(tag, p, rng)))
    mean = rng.standard_normal(m) if with_mean else np.zeros(m)
    return covariance.FieldSpec(tag, mean, atoms)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
