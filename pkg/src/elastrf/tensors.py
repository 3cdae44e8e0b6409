"""Rank-4 elasticity tensor algebra.

An elasticity tensor C has the minor symmetries C_ijkl = C_jikl = C_ijlk and
the major symmetry C_ijkl = C_klij, leaving 21 independent components.  This
module fixes an orthonormal (Kelvin-style) basis of that 21-dimensional space,
provides the orthogonal action of O(3) on it, the Ogden tensor family, and the
29 invariant coupling blocks used by the triclinic/isotropic covariance
machinery.
"""

from __future__ import annotations

import functools
import itertools

import numpy as np

# The 21 index quadruples, written with the letters (-1, 0, 1) that label the
# three axes (y, z, x respectively), in the fixed enumeration used by the
# constraint tables.  AXIS_OF maps a letter to the Cartesian axis number.
AXIS_OF = {-1: 1, 0: 2, 1: 0}

ENUM_LETTERS = [
    (-1, -1, -1, -1), (0, 0, 0, 0), (1, 1, 1, 1), (0, 1, 0, 1),
    (-1, 1, -1, 1), (-1, 0, -1, 0), (-1, -1, 0, 0), (-1, -1, 1, 1),
    (0, 0, 1, 1), (-1, 1, -1, 0), (-1, -1, 0, 1), (1, 1, 0, 1),
    (0, 0, 0, 1), (0, 1, -1, 1), (1, 1, -1, 0), (-1, -1, -1, 0),
    (0, 0, -1, 0), (0, 1, -1, 0), (-1, -1, -1, 1), (1, 1, -1, 1),
    (0, 0, -1, 1),
]

INDEX_QUADS = [tuple(AXIS_OF[a] for a in q) for q in ENUM_LETTERS]

VOIGT_PAIRS = [(0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1)]


def _symmetry_orbit(quad):
    """All index quadruples equivalent to `quad` under the minor/major symmetries."""
    i, j, k, l = quad
    orbit = set()
    for a, b in ((i, j), (j, i)):
        for c, d in ((k, l), (l, k)):
            orbit.add((a, b, c, d))
            orbit.add((c, d, a, b))
    return sorted(orbit)


def _build_basis():
    basis = np.zeros((21, 3, 3, 3, 3))
    for n, quad in enumerate(INDEX_QUADS):
        orbit = _symmetry_orbit(quad)
        val = 1.0 / np.sqrt(len(orbit))
        for idx in orbit:
            basis[n][idx] = val
    return basis


#: Orthonormal basis tensors of the 21-dimensional space, shape (21, 3, 3, 3, 3).
BASIS21 = _build_basis()
_BASIS_FLAT = BASIS21.reshape(21, 81)


def tensor_to_vec(C):
    """Coordinates of a rank-4 symmetric tensor in the fixed orthonormal basis."""
    return _BASIS_FLAT @ np.asarray(C, dtype=float).reshape(81)


def vec_to_tensor(v):
    """Inverse of :func:`tensor_to_vec`."""
    v = np.asarray(v, dtype=float)
    return (v @ _BASIS_FLAT).reshape(3, 3, 3, 3)


def symmetrize(C):
    """Project an arbitrary rank-4 tensor onto the minor/major symmetric part."""
    C = np.asarray(C, dtype=float)
    C = 0.5 * (C + C.transpose(1, 0, 2, 3))
    C = 0.5 * (C + C.transpose(0, 1, 3, 2))
    return 0.5 * (C + C.transpose(2, 3, 0, 1))


def check_orthogonal(g, tol=1e-12):
    g = np.asarray(g, dtype=float)
    if g.shape != (3, 3):
        raise ValueError("expected a 3x3 matrix")
    if np.max(np.abs(g.T @ g - np.eye(3))) > tol:
        raise ValueError("matrix is not orthogonal within tolerance")
    if abs(abs(np.linalg.det(g)) - 1.0) > tol:
        raise ValueError("matrix determinant is not +-1 within tolerance")
    return g


def rotate_tensor(g, C):
    """Apply the orthogonal action g_ia g_jb g_kc g_ld C_abcd."""
    g = check_orthogonal(g, tol=1e-10)
    return np.einsum("ia,jb,kc,ld,abcd->ijkl", g, g, g, g, np.asarray(C, float))


@functools.lru_cache(maxsize=4096)
def _rep21_cached(key):
    g = np.frombuffer(key, dtype=float).reshape(3, 3)
    rotated = np.einsum("ia,jb,kc,ld,nabcd->nijkl", g, g, g, g, BASIS21)
    return _BASIS_FLAT @ rotated.reshape(21, 81).T


def rep_matrix_21(g):
    """21x21 orthogonal matrix M with M @ vec(C) = vec(rotate_tensor(g, C))."""
    g = check_orthogonal(g, tol=1e-10)
    m = _rep21_cached(np.ascontiguousarray(g, dtype=float).tobytes())
    return m.copy()


def to_voigt(C):
    """6x6 Voigt matrix of stiffness components (no Kelvin scaling)."""
    C = np.asarray(C, dtype=float)
    V = np.empty((6, 6))
    for a, (i, j) in enumerate(VOIGT_PAIRS):
        for b, (k, l) in enumerate(VOIGT_PAIRS):
            V[a, b] = C[i, j, k, l]
    return V


def from_voigt(V):
    """Rank-4 tensor from a 6x6 Voigt stiffness matrix."""
    V = np.asarray(V, dtype=float)
    C = np.empty((3, 3, 3, 3))
    voigt_index = np.array([[0, 5, 4], [5, 1, 3], [4, 3, 2]])
    for i, j, k, l in itertools.product(range(3), repeat=4):
        C[i, j, k, l] = V[voigt_index[i, j], voigt_index[k, l]]
    return C


# ---------------------------------------------------------------------------
# Ogden tensors
# ---------------------------------------------------------------------------

_DELTA = np.eye(3)
_I1 = 0.5 * (np.einsum("ik,jl->ijkl", _DELTA, _DELTA)
             + np.einsum("il,jk->ijkl", _DELTA, _DELTA))


@functools.lru_cache(maxsize=None)
def ogden_tensor(nu):
    """Ogden tensor of rank 2*nu + 2 for 0 <= nu <= 3.

    I^0 = delta, I^1_ijkl = (d_ik d_jl + d_il d_jk)/2, and higher ranks follow
    the recursion that symmetrizes I^1 against each trailing index pair.
    """
    if not 0 <= nu <= 3:
        raise ValueError("nu must be in 0..3")
    if nu == 0:
        return _DELTA.copy()
    if nu == 1:
        return _I1.copy()
    prev = ogden_tensor(nu - 1)
    npair = nu  # trailing index pairs (i3 i4), ..., (i_{2nu+1} i_{2nu+2})
    pair_letters = [chr(ord("a") + 2 * t) + chr(ord("a") + 2 * t + 1) for t in range(npair)]
    total = 0.0
    for t in range(npair):
        rest = "".join(pair_letters[:t] + pair_letters[t + 1:])
        sub = f"ip{pair_letters[t]},pj{rest}->ij{''.join(pair_letters)}"
        total = total + np.einsum(sub, _I1, prev)
    return total / nu


# ---------------------------------------------------------------------------
# The 29 invariant coupling blocks L^q
# ---------------------------------------------------------------------------
#
# Each block is a rank-8 tensor over the slots (i j k l i' j' k' l') numbered
# 0..7, written as a sum of terms.  A term is (coefficient, factors, x_slots)
# where a factor is ("d", a, b) for delta, ("I", 4 slots), ("I2", 6 slots), or
# ("I3", 8 slots), and x_slots lists the slots carrying an x component.

def _lq_terms():
    d = lambda a, b: ("d", a, b)
    I = lambda *s: ("I",) + s
    I2 = lambda *s: ("I2",) + s
    I3 = lambda *s: ("I3",) + s

    # Index groups: unprimed pairs (0,1), (2,3); primed pairs (4,5), (6,7).
    terms = {}
    terms[1] = [(1.0, [d(0, 1), d(2, 3), d(4, 5), d(6, 7)], [])]
    terms[2] = [(2.0, [d(0, 1), d(2, 3), I(4, 5, 6, 7)], []),
                (2.0, [d(4, 5), d(6, 7), I(0, 1, 2, 3)], [])]
    terms[3] = [(2.0, [d(0, 1), d(4, 5), I(2, 3, 6, 7)], []),
                (2.0, [d(0, 1), d(6, 7), I(2, 3, 4, 5)], []),
                (2.0, [d(2, 3), d(4, 5), I(0, 1, 6, 7)], []),
                (2.0, [d(2, 3), d(6, 7), I(0, 1, 4, 5)], [])]
    terms[4] = [(4.0, [I(0, 1, 2, 3), I(4, 5, 6, 7)], [])]
    terms[5] = [(8.0, [d(0, 1), I2(2, 3, 4, 5, 6, 7)], []),
                (8.0, [d(2, 3), I2(0, 1, 4, 5, 6, 7)], []),
                (8.0, [d(4, 5), I2(0, 1, 2, 3, 6, 7)], []),
                (8.0, [d(6, 7), I2(0, 1, 2, 3, 4, 5)], [])]
    terms[6] = [(4.0, [I(0, 1, 4, 5), I(2, 3, 6, 7)], []),
                (4.0, [I(0, 1, 6, 7), I(2, 3, 4, 5)], [])]
    terms[7] = [(4.0, [I(0, 1, 4, 6), I(2, 3, 5, 7)], []),
                (4.0, [I(0, 1, 4, 7), I(2, 3, 5, 6)], []),
                (4.0, [I(0, 1, 5, 6), I(2, 3, 4, 7)], []),
                (4.0, [I(0, 1, 5, 7), I(2, 3, 4, 6)], [])]
    terms[8] = [(1.0, [d(0, 1), d(2, 3), d(4, 5)], [6, 7]),
                (1.0, [d(0, 1), d(2, 3), d(6, 7)], [4, 5]),
                (1.0, [d(4, 5), d(6, 7), d(0, 1)], [2, 3]),
                (1.0, [d(4, 5), d(6, 7), d(2, 3)], [0, 1])]
    terms[9] = [(2.0, [I(0, 1, 2, 3), d(4, 5)], [6, 7]),
                (2.0, [I(0, 1, 2, 3), d(6, 7)], [4, 5]),
                (2.0, [I(4, 5, 6, 7), d(0, 1)], [2, 3]),
                (2.0, [I(4, 5, 6, 7), d(2, 3)], [0, 1])]

    cross_primed = [(4, 6, [5, 7]), (4, 7, [5, 6]), (5, 6, [4, 7]), (5, 7, [4, 6])]
    cross_unprimed = [(0, 2, [1, 3]), (0, 3, [1, 2]), (1, 2, [0, 3]), (1, 3, [0, 2])]

    terms[10] = ([(1.0, [d(0, 1), d(2, 3), d(a, b)], xs) for a, b, xs in cross_primed]
                 + [(1.0, [d(4, 5), d(6, 7), d(a, b)], xs) for a, b, xs in cross_unprimed])

    def mixed(u, p):
        # delta couplings between the members of unprimed pair u and primed pair p
        (a, b), (c, e) = u, p
        return [(a, c, [b, e]), (a, e, [b, c]), (b, c, [a, e]), (b, e, [a, c])]

    terms[11] = []
    for du, other_u in (((0, 1), (2, 3)), ((2, 3), (0, 1))):
        for dp, other_p in (((4, 5), (6, 7)), ((6, 7), (4, 5))):
            for a, b, xs in mixed(other_u, other_p):
                terms[11].append((1.0, [d(*du), d(*dp), d(a, b)], xs))

    terms[12] = ([(2.0, [I(0, 1, 2, 3), d(a, b)], xs) for a, b, xs in cross_primed]
                 + [(2.0, [I(4, 5, 6, 7), d(a, b)], xs) for a, b, xs in cross_unprimed])

    terms[13] = [(2.0, [d(0, 1), I(2, 3, 4, 5)], [6, 7]),
                 (2.0, [d(2, 3), I(0, 1, 4, 5)], [6, 7]),
                 (2.0, [d(0, 1), I(2, 3, 6, 7)], [4, 5]),
                 (2.0, [d(2, 3), I(0, 1, 6, 7)], [4, 5]),
                 (2.0, [d(4, 5), I(0, 1, 6, 7)], [2, 3]),
                 (2.0, [d(6, 7), I(0, 1, 4, 5)], [2, 3]),
                 (2.0, [d(4, 5), I(2, 3, 6, 7)], [0, 1]),
                 (2.0, [d(6, 7), I(2, 3, 4, 5)], [0, 1])]

    terms[14] = []
    for a, b, xs in cross_primed:
        terms[14].append((2.0, [d(0, 1), I(2, 3, a, b)], xs))
        terms[14].append((2.0, [d(2, 3), I(0, 1, a, b)], xs))
    for a, b, xs in cross_unprimed:
        terms[14].append((2.0, [d(4, 5), I(a, b, 6, 7)], xs))
        terms[14].append((2.0, [d(6, 7), I(a, b, 4, 5)], xs))

    terms[15] = [(8.0, [I2(0, 1, 2, 3, 4, 5)], [6, 7]),
                 (8.0, [I2(0, 1, 2, 3, 6, 7)], [4, 5]),
                 (8.0, [I2(0, 1, 4, 5, 6, 7)], [2, 3]),
                 (8.0, [I2(2, 3, 4, 5, 6, 7)], [0, 1])]

    terms[16] = ([(8.0, [I2(0, 1, 2, 3, a, b)], xs) for a, b, xs in cross_primed]
                 + [(8.0, [I2(a, b, 4, 5, 6, 7)], xs) for a, b, xs in cross_unprimed])

    terms[17] = []
    for iu, ip, rest_u, rest_p in (((0, 1), (4, 5), (2, 3), (6, 7)),
                                   ((0, 1), (6, 7), (2, 3), (4, 5)),
                                   ((2, 3), (4, 5), (0, 1), (6, 7)),
                                   ((2, 3), (6, 7), (0, 1), (4, 5))):
        for a, b, xs in mixed(rest_u, rest_p):
            terms[17].append((2.0, [I(*iu, *ip), d(a, b)], xs))

    terms[18] = [(1.0, [d(0, 1), d(2, 3)], [4, 5, 6, 7]),
                 (1.0, [d(4, 5), d(6, 7)], [0, 1, 2, 3])]
    terms[19] = [(1.0, [d(0, 1), d(4, 5)], [2, 3, 6, 7]),
                 (1.0, [d(0, 1), d(6, 7)], [2, 3, 4, 5]),
                 (1.0, [d(2, 3), d(4, 5)], [0, 1, 6, 7]),
                 (1.0, [d(2, 3), d(6, 7)], [0, 1, 4, 5])]
    terms[20] = [(2.0, [I(0, 1, 2, 3)], [4, 5, 6, 7]),
                 (2.0, [I(4, 5, 6, 7)], [0, 1, 2, 3])]
    terms[21] = ([(1.0, [d(0, 1), d(a, b)], [2, 3] + xs) for a, b, xs in cross_primed]
                 + [(1.0, [d(2, 3), d(a, b)], [0, 1] + xs) for a, b, xs in cross_primed]
                 + [(1.0, [d(4, 5), d(a, b)], [6, 7] + xs) for a, b, xs in cross_unprimed]
                 + [(1.0, [d(6, 7), d(a, b)], [4, 5] + xs) for a, b, xs in cross_unprimed])

    def one_to_group(single_pair, target_group):
        # delta between a member of single_pair and a member of target_group;
        # x's on the remaining member of single_pair and the remaining members
        # of the target side.
        out = []
        for a in single_pair:
            rest_a = [s for s in single_pair if s != a]
            for b in target_group:
                rest_b = [s for s in target_group if s != b]
                out.append((a, b, rest_a + rest_b))
        return out

    terms[22] = []
    for dpair, opair in (((0, 1), (2, 3)), ((2, 3), (0, 1))):
        for a, b, xs in one_to_group(opair, [4, 5, 6, 7]):
            terms[22].append((1.0, [d(*dpair), d(a, b)], xs))
    for dpair, opair in (((4, 5), (6, 7)), ((6, 7), (4, 5))):
        for a, b, xs in one_to_group(opair, [0, 1, 2, 3]):
            terms[22].append((1.0, [d(*dpair), d(a, b)], xs))

    terms[23] = [(1.0, [d(a, b), d(c, e)], xs + ys)
                 for a, b, xs in cross_unprimed for c, e, ys in cross_primed]

    terms[24] = [(2.0, [I(0, 1, 4, 5)], [2, 3, 6, 7]),
                 (2.0, [I(0, 1, 6, 7)], [2, 3, 4, 5]),
                 (2.0, [I(2, 3, 4, 5)], [0, 1, 6, 7]),
                 (2.0, [I(2, 3, 6, 7)], [0, 1, 4, 5])]

    terms[25] = []
    for a, b, xs in cross_primed:
        terms[25].append((2.0, [I(0, 1, a, b)], [2, 3] + xs))
        terms[25].append((2.0, [I(2, 3, a, b)], [0, 1] + xs))
    for a, b, xs in cross_unprimed:
        terms[25].append((2.0, [I(a, b, 4, 5)], xs + [6, 7]))
        terms[25].append((2.0, [I(a, b, 6, 7)], xs + [4, 5]))

    terms[26] = [(1.0, [d(0, 1)], [2, 3, 4, 5, 6, 7]),
                 (1.0, [d(2, 3)], [0, 1, 4, 5, 6, 7]),
                 (1.0, [d(4, 5)], [6, 7, 0, 1, 2, 3]),
                 (1.0, [d(6, 7)], [4, 5, 0, 1, 2, 3])]
    terms[27] = ([(1.0, [d(a, b)], xs + [4, 5, 6, 7]) for a, b, xs in cross_unprimed]
                 + [(1.0, [d(a, b)], xs + [0, 1, 2, 3]) for a, b, xs in cross_primed])
    terms[28] = [(1.0, [d(a, b)], [u for u in (0, 1, 2, 3) if u != a]
                  + [p for p in (4, 5, 6, 7) if p != b])
                 for a in (0, 1, 2, 3) for b in (4, 5, 6, 7)]
    terms[29] = [(1.0, [], [0, 1, 2, 3, 4, 5, 6, 7])]
    return terms


_LQ_TERMS = _lq_terms()

#: Power of |x|^2 dividing each L^q (0 for the constant blocks).
L_HOMOGENEITY = {q: (0 if q <= 7 else 1 if q <= 17 else 2 if q <= 25 else 3 if q <= 28 else 4)
                 for q in range(1, 30)}


def _assemble_rank8(terms, x):
    out = np.zeros((3,) * 8)
    for coeff, factors, x_slots in terms:
        arrays = []
        slots = []
        for f in factors:
            kind = f[0]
            if kind == "d":
                arrays.append(_DELTA)
            elif kind == "I":
                arrays.append(_I1)
            elif kind == "I2":
                arrays.append(ogden_tensor(2))
            else:
                arrays.append(ogden_tensor(3))
            slots.extend(f[1:])
        for s in x_slots:
            arrays.append(x)
            slots.append(s)
        term = arrays[0]
        for a in arrays[1:]:
            term = np.multiply.outer(term, a)
        out += coeff * np.transpose(term, np.argsort(slots))
    return out


def L_function_rank8(q, x=None):
    """Rank-8 form of L^q over index slots (i j k l i' j' k' l')."""
    if not 1 <= q <= 29:
        raise ValueError("q must be in 1..29")
    k = L_HOMOGENEITY[q]
    if k == 0:
        return _assemble_rank8(_LQ_TERMS[q], None)
    x = np.asarray(x, dtype=float)
    n2 = float(x @ x)
    if n2 == 0.0:
        raise ValueError(f"L^{q} is singular at x = 0; pass a nonzero direction")
    return _assemble_rank8(_LQ_TERMS[q], x) / n2 ** k


def L_function(q, x=None):
    """L^q as a 21x21 block in the orthonormal 21-vector coordinates.

    L^1..L^7 are constant in x; the rest are homogeneous of degree zero and
    undefined at the origin.
    """
    t = L_function_rank8(q, x)
    return _BASIS_FLAT @ t.reshape(81, 81) @ _BASIS_FLAT.T


@functools.lru_cache(maxsize=None)
def L_constant(q):
    """Cached 21x21 matrices for the x-independent blocks L^1..L^7."""
    if not 1 <= q <= 7:
        raise ValueError("only L^1..L^7 are constant")
    return L_function(q)


def isotropic_tensor(lam, mu):
    """lam * delta x delta + 2 mu * I, the classical isotropic stiffness."""
    dd = np.einsum("ij,kl->ijkl", _DELTA, _DELTA)
    return lam * dd + 2.0 * mu * _I1
