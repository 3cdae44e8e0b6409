"""Fixed-point spaces and isotypic structure of the 21-dimensional action.

For each group case this module produces an orthonormal basis of the class
fixed-point space V^H adapted to the isotypic decomposition of the case's
group: copies of the trivial representation come first (they host the mean),
followed by the remaining irreducible blocks with aligned rows.  It also
builds the harmonic tensor families of the full 21-dimensional space, the
coupled rank-8 basis indexed by even angular momenta, and the expansion of
the zonal invariant blocks over the L^q family.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from . import groups, harmonics, tensors

# multiplicities of the irreducible pieces of U for every group case
EXPECTED_STRUCTURE = {
    "K1": {"Ag": 21},
    "K2": {"U0g": 2, "U2g": 2, "U4g": 1},
    "K3": {"Ag": 13},
    "K4": {"U0gg": 5, "U2g": 3, "U4g": 1},
    "K5": {"Ag": 9},
    "K6": {"A1g": 6, "B1g": 3},
    "K7": {"A1g": 5, "E2g": 2},
    "K8": {"Ag": 3, "Eg": 3},
    "K9": {"A1g": 3, "Eg": 3},
    "K10": {"A1g": 6},
    "K11": {"A1g": 5, "B1g": 1},
    "K12": {"A1g": 6},
    # B1g under this package's flip-labelling (C2x -> +1); some tables name
    # the same irrep B2g via the other prime-class assignment.
    "K13": {"A1g": 5, "B1g": 1},
    "K14": {"U0gg": 5},
    "K15": {"A1g": 3},
    "K16": {"U0g": 2},
}

IRREP_DIMS = {"U0g": 1, "U0gg": 1, "U2g": 5, "U4g": 9}


def _irrep_dim(tag, label):
    if label in IRREP_DIMS:
        return IRREP_DIMS[label]
    return groups.irrep_dim(tag, label)


# ---------------------------------------------------------------------------
# Harmonic tensor families of the full space
# ---------------------------------------------------------------------------

def _quadratic_form(l, q):
    """Symmetric matrix H with x.H.x = |x|^2 S^q_2(x/|x|), Frobenius-normalized."""
    def f(v):
        v = np.asarray(v, dtype=float)
        r2 = float(v @ v)
        return r2 * harmonics.real_sph_harm(2, q, v / math.sqrt(r2))
    H = np.zeros((3, 3))
    e = np.eye(3)
    for a in range(3):
        H[a, a] = f(e[a])
    for a in range(3):
        for b in range(a + 1, 3):
            H[a, b] = H[b, a] = 0.5 * (f(e[a] + e[b]) - H[a, a] - H[b, b])
    return H / np.linalg.norm(H)


def _quartic_tensor(q):
    """Fully symmetric rank-4 tensor T with T:x^4 = |x|^4 S^q_4(x/|x|)."""
    rng = np.random.default_rng(1234 + q)
    pts = rng.standard_normal((60, 3))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    monos = [(a, b, 4 - a - b) for a in range(5) for b in range(5 - a)]
    A = np.array([[p[0] ** a * p[1] ** b * p[2] ** c for a, b, c in monos]
                  for p in pts])
    y = harmonics.real_sph_harm(4, q, pts)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    T = np.zeros((3, 3, 3, 3))
    import itertools
    for idx in itertools.product(range(3), repeat=4):
        a = idx.count(0)
        b = idx.count(1)
        c = idx.count(2)
        T[idx] = coef[monos.index((a, b, c))] * (
            math.factorial(a) * math.factorial(b) * math.factorial(c)
            / math.factorial(4))
    return T / np.linalg.norm(T)


@functools.lru_cache(maxsize=1)
def harmonic_tensor_basis():
    """The 21 tensors T^{l,n,q} organized as {(l, n): array (2l+1, 21)}.

    Two scalar copies (l=0), two five-dimensional copies (l=2), and one
    nine-dimensional copy (l=4); rows transform like the real harmonics h^q_l.
    """
    dd = np.einsum("ij,kl->ijkl", np.eye(3), np.eye(3))
    t01 = dd / 3.0
    i1 = tensors.ogden_tensor(1)
    overlap = float(tensors.tensor_to_vec(i1) @ tensors.tensor_to_vec(t01))
    t02 = i1 - overlap * t01
    t02 = t02 / np.linalg.norm(t02)

    out = {(0, 1): np.array([tensors.tensor_to_vec(t01)]),
           (0, 2): np.array([tensors.tensor_to_vec(t02)])}

    a_rows, b_rows = [], []
    for q in range(-2, 3):
        H = _quadratic_form(2, q)
        A = (np.einsum("ij,kl->ijkl", np.eye(3), H)
             + np.einsum("ij,kl->ijkl", H, np.eye(3)))
        B = (np.einsum("ik,jl->ijkl", np.eye(3), H)
             + np.einsum("il,jk->ijkl", np.eye(3), H)
             + np.einsum("jk,il->ijkl", np.eye(3), H)
             + np.einsum("jl,ik->ijkl", np.eye(3), H))
        a_rows.append(tensors.tensor_to_vec(A))
        b_rows.append(tensors.tensor_to_vec(B))
    a_rows = np.array(a_rows)
    b_rows = np.array(b_rows)
    na = np.linalg.norm(a_rows[0])
    a_rows /= na
    # Gram-Schmidt of the second copy against the first (q-independent weights)
    ab = float(b_rows[0] @ a_rows[0])
    b_rows = b_rows - ab * a_rows
    b_rows /= np.linalg.norm(b_rows[0])
    out[(2, 1)] = a_rows
    out[(2, 2)] = b_rows

    out[(4, 1)] = np.array([tensors.tensor_to_vec(_quartic_tensor(q))
                            for q in range(-4, 5)])
    return out


# ---------------------------------------------------------------------------
# Isotypic decomposition and adapted bases
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IsotypicComponent:
    irrep: str
    dim: int
    copies: int
    vectors: np.ndarray  # (copies, dim, 21), orthonormal rows


class StructureMismatchError(RuntimeError):
    """Computed isotypic multiplicities disagree with the expected table."""


_NICE_CANDIDATES = None


def _nice_candidates():
    global _NICE_CANDIDATES
    if _NICE_CANDIDATES is None:
        hb = harmonic_tensor_basis()
        cubic = np.zeros((3, 3, 3, 3))
        for i in range(3):
            cubic[i, i, i, i] = 1.0
        cand = [hb[(0, 1)][0], hb[(0, 2)][0],
                tensors.tensor_to_vec(cubic) / math.sqrt(3.0)]
        cand.extend(np.eye(21))
        _NICE_CANDIDATES = np.array(cand)
    return _NICE_CANDIDATES


def _greedy_basis(project, rank, candidates, tol=1e-8):
    """Orthonormal basis of a projector's range from preferred candidates."""
    basis = []
    for c in candidates:
        v = project(c)
        for b in basis:
            v = v - (b @ v) * b
        n = np.linalg.norm(v)
        if n > math.sqrt(tol):
            basis.append(v / n)
            if len(basis) == rank:
                break
    if len(basis) != rank:
        raise RuntimeError("candidate set failed to span the projector range")
    return np.array(basis)


@functools.lru_cache(maxsize=None)
def class_fixed_space(class_name):
    """Orthonormal basis (d, 21) of V^H for an elasticity class."""
    htag = groups.CLASS_GROUP[class_name]
    d = groups.CLASS_DIMS[class_name]
    hb = harmonic_tensor_basis()
    if class_name == "isotropic":
        return np.vstack([hb[(0, 1)], hb[(0, 2)]])
    if class_name == "transverse_isotropic":
        rows = [hb[(0, 1)][0], hb[(0, 2)][0], hb[(2, 1)][2], hb[(2, 2)][2],
                hb[(4, 1)][4]]
        return np.array(rows)
    mats = groups.element_matrices(htag)
    P = np.mean([tensors.rep_matrix_21(g) for g in mats], axis=0)
    assert abs(np.trace(P) - d) < 1e-8, (class_name, np.trace(P))
    return _greedy_basis(lambda c: P @ c, d, _nice_candidates())


def _full_rep_elements(tag):
    els = groups.enumerate_elements(tag)
    mats = np.array([tensors.rep_matrix_21(e.matrix) for e in els])
    return els, mats


def _k7_pair_projector():
    """Projector onto the two rank-2-harmonic azimuthal-weight-2 pairs.

    The hexagonal case on the orthotropic-sized space is the one pairing
    whose class group is not normalized by the acting group; the value space
    is realized as the trivial isotypic part plus these two invariant pairs,
    which carry exactly two copies of the required two-dimensional irrep.
    """
    hb = harmonic_tensor_basis()
    rows = np.array([hb[(2, 1)][0], hb[(2, 1)][4], hb[(2, 2)][0], hb[(2, 2)][4]])
    return rows.T @ rows


@functools.lru_cache(maxsize=None)
def isotypic_decomposition(tag):
    """Isotypic components of the group case's value space, trivial first.

    The value space is spanned by the isotypic components of the full
    21-dimensional action whose irreducible piece restricts to the class
    group with at least one trivial copy.  Raises StructureMismatchError if
    the computed multiplicities disagree with the expected structure table.
    """
    case = groups.group_case(tag)
    if not case.finite:
        return _continuous_decomposition(tag)
    els, mats = _full_rep_elements(tag)
    order = len(els)
    htag = groups.CLASS_GROUP[case.class_name]
    hkeys = {groups._key(e.matrix) for e in groups.enumerate_elements(htag)}
    h_index = [i for i, e in enumerate(els) if groups._key(e.matrix) in hkeys]
    trU = np.trace(mats, axis1=1, axis2=2)
    comps = []
    for label in groups.irrep_labels(tag):
        dw = groups.irrep_dim(tag, label)
        W = np.array([groups.irrep_value(tag, label, e) for e in els])
        chars = np.trace(W, axis1=1, axis2=2)
        iota = float(np.sum(chars * chars)) / order  # Frobenius-Schur norm
        if abs(iota - round(iota)) > 1e-6:
            raise StructureMismatchError(f"{tag}:{label} (chi,chi) = {iota}")
        iota = int(round(iota))
        mult = float(np.sum(chars * trU)) / order / iota
        if abs(mult - round(mult)) > 1e-6:
            raise StructureMismatchError(f"{tag}:{label} multiplicity {mult}")
        mult = int(round(mult))
        if mult == 0:
            continue
        trivial_in_h = float(np.sum(chars[h_index])) / len(h_index)
        if trivial_in_h <= 1e-9:
            continue
        pre = None
        if tag == "K7" and label == "E2g":
            pre = _k7_pair_projector()
            mult = 2
        if label in ("Ag", "A1g"):
            cand = _nice_candidates()
        else:
            cand = np.eye(21)
        if iota == 1:
            vectors = _real_type_copies(order, W, mats, mult, dw, pre, cand)
        else:
            vectors = _complex_type_copies(order, W, chars, mats, mult, dw,
                                           pre, cand)
        comps.append(IsotypicComponent(label, dw, mult, vectors))
    expected = EXPECTED_STRUCTURE[tag]
    got = {c.irrep: c.copies for c in comps}
    if got != expected:
        raise StructureMismatchError(f"{tag}: structure {got} != expected {expected}")
    comps.sort(key=lambda c: (c.irrep not in ("Ag", "A1g"), c.irrep))
    return tuple(comps)


def _real_type_copies(order, W, mats, mult, dw, pre, candidates):
    P00 = (dw / order) * np.einsum("g,gij->ij", W[:, 0, 0], mats)
    if pre is not None:
        P00 = P00 @ pre
    row0 = _greedy_basis(lambda c: P00 @ c, mult, candidates)
    vectors = np.zeros((mult, dw, 21))
    vectors[:, 0, :] = row0
    for a in range(1, dw):
        Pa0 = (dw / order) * np.einsum("g,gij->ij", W[:, a, 0], mats)
        vectors[:, a, :] = row0 @ Pa0.T
    return vectors


def _complex_type_copies(order, W, chars, mats, mult, dw, pre, candidates):
    """Copies for a two-dimensional complex-type component: the image of the
    irrep is a rotation group; partners come from the skew intertwiner."""
    if dw != 2:
        raise StructureMismatchError("complex-type handling expects dim 2")
    P_iso = (1.0 / order) * np.einsum("g,gij->ij", chars, mats)
    J = (2.0 / order) * np.einsum("g,gij->ij", W[:, 1, 0], mats)
    if pre is not None:
        P_iso = P_iso @ pre
    basis = []
    vectors = np.zeros((mult, 2, 21))
    n = 0
    for c in candidates:
        v = P_iso @ c
        for b in basis:
            v = v - (b @ v) * b
        nv = np.linalg.norm(v)
        if nv > 1e-4:
            v = v / nv
            w = J @ v
            vectors[n, 0] = v
            vectors[n, 1] = w
            basis.extend([v, w])
            n += 1
            if n == mult:
                break
    if n != mult:
        raise StructureMismatchError("could not span complex-type component")
    return vectors


def _continuous_decomposition(tag):
    hb = harmonic_tensor_basis()
    if tag == "K16":
        comps = [IsotypicComponent("U0g", 1, 2,
                                   np.stack([hb[(0, 1)], hb[(0, 2)]]))]
    elif tag == "K2":
        comps = [
            IsotypicComponent("U0g", 1, 2, np.stack([hb[(0, 1)], hb[(0, 2)]])),
            IsotypicComponent("U2g", 5, 2, np.stack([hb[(2, 1)], hb[(2, 2)]])),
            IsotypicComponent("U4g", 9, 1, np.stack([hb[(4, 1)]])),
        ]
    elif tag in ("K4", "K14"):
        trivial = np.stack([hb[(0, 1)], hb[(0, 2)],
                            hb[(2, 1)][2:3], hb[(2, 2)][2:3], hb[(4, 1)][4:5]])
        if tag == "K14":
            comps = [IsotypicComponent("U0gg", 1, 5, trivial)]
        else:
            pairs2 = []
            for (l, n) in ((2, 1), (2, 2)):
                pairs2.append(np.stack([hb[(l, n)][l + 2], hb[(l, n)][l - 2]]))
            pairs2.append(np.stack([hb[(4, 1)][4 + 2], hb[(4, 1)][4 - 2]]))
            pair4 = [np.stack([hb[(4, 1)][8], hb[(4, 1)][0]])]
            comps = [
                IsotypicComponent("U0gg", 1, 5, trivial),
                IsotypicComponent("U2g", 2, 3, np.stack(pairs2)),
                IsotypicComponent("U4g", 2, 1, np.stack(pair4)),
            ]
    else:
        raise ValueError(tag)
    expected = EXPECTED_STRUCTURE[tag]
    got = {c.irrep: c.copies for c in comps}
    if got != expected:
        raise StructureMismatchError(f"{tag}: structure {got} != expected {expected}")
    return tuple(comps)


def structure_summary(tag):
    """Multiset of irrep labels with multiplicities, e.g. {'A1g': 6, 'B1g': 3}."""
    return {c.irrep: c.copies for c in isotypic_decomposition(tag)}


@functools.lru_cache(maxsize=None)
def adapted_basis(tag):
    """Orthonormal basis (d, 21) of V^H ordered trivial-first with aligned rows."""
    comps = isotypic_decomposition(tag)
    rows = []
    for c in comps:
        for n in range(c.copies):
            rows.extend(c.vectors[n])
    return np.array(rows)


def fixed_point_basis(tag):
    """Basis of the subspace fixed by the whole group case, shape (m, 21)."""
    comps = isotypic_decomposition(tag)
    c0 = comps[0]
    if c0.irrep not in ("Ag", "A1g", "U0g", "U0gg"):
        return np.zeros((0, 21))
    return c0.vectors[:, 0, :].copy()


def trivial_multiplicity(tag):
    return fixed_point_basis(tag).shape[0]


@functools.lru_cache(maxsize=None)
def block_slices(tag):
    """Index ranges of the adapted basis per (irrep, copy)."""
    comps = isotypic_decomposition(tag)
    out = []
    pos = 0
    for c in comps:
        for n in range(c.copies):
            out.append((c.irrep, n, slice(pos, pos + c.dim)))
            pos += c.dim
    return tuple(out)


def rep_on_adapted(tag, g):
    """Matrix of g on V^H in the adapted basis (d x d, orthogonal)."""
    Q = adapted_basis(tag)
    return Q @ tensors.rep_matrix_21(g) @ Q.T


# ---------------------------------------------------------------------------
# Coupled rank-8 basis (families of even angular momentum 0, 2, 4, 6, 8)
# ---------------------------------------------------------------------------

FAMILY_SIZES = {0: 7, 1: 10, 2: 8, 3: 3, 4: 1}


@dataclass(frozen=True)
class CoupledBasisTensor:
    two_t: int
    v: int
    blocks: np.ndarray  # (2*two_t + 1, 21, 21), index u = -2t..2t

    def block(self, u):
        return self.blocks[u + self.two_t]


def _pair(avec, bvec):
    return np.outer(avec, bvec)


def _sym_pair(avec, bvec):
    return (np.outer(avec, bvec) + np.outer(bvec, avec)) / math.sqrt(2)


def _coupled(l, l1, l2, rows1, rows2, sym):
    """sum_{q q'} g^{u[q,q']}_{l[l1,l2]} rows1[q] x rows2[q'], per u."""
    g = harmonics.gg_coefficients(l, l1, l2)
    out = np.einsum("uab,ai,bj->uij", g, rows1, rows2)
    if sym:
        out = (out + np.transpose(out, (0, 2, 1))) / math.sqrt(2)
    return out


@functools.lru_cache(maxsize=1)
def coupled_basis_all():
    """All T^{2t,v,u} as {(2t, v): CoupledBasisTensor}."""
    hb = harmonic_tensor_basis()
    t01 = hb[(0, 1)][0]
    t02 = hb[(0, 2)][0]
    t21 = hb[(2, 1)]
    t22 = hb[(2, 2)]
    t41 = hb[(4, 1)]
    out = {}

    def add(two_t, v, blocks):
        out[(two_t, v)] = CoupledBasisTensor(two_t, v, np.asarray(blocks))

    add(0, 1, [_pair(t01, t01)])
    add(0, 2, [_sym_pair(t01, t02)])
    add(0, 3, _coupled(0, 2, 2, t21, t21, sym=False))
    add(0, 4, [_pair(t02, t02)])
    add(0, 5, _coupled(0, 2, 2, t21, t22, sym=True))
    add(0, 6, _coupled(0, 2, 2, t22, t22, sym=False))
    add(0, 7, _coupled(0, 4, 4, t41, t41, sym=False))

    add(2, 1, [_sym_pair(t01, t21[q]) for q in range(5)])
    add(2, 2, [_sym_pair(t02, t21[q]) for q in range(5)])
    add(2, 3, [_sym_pair(t01, t22[q]) for q in range(5)])
    add(2, 4, _coupled(2, 2, 2, t21, t21, sym=False))
    add(2, 5, [_sym_pair(t02, t22[q]) for q in range(5)])
    add(2, 6, _coupled(2, 2, 4, t21, t41, sym=True))
    add(2, 7, _coupled(2, 2, 2, t22, t21, sym=True))
    add(2, 8, _coupled(2, 2, 2, t22, t22, sym=False))
    add(2, 9, _coupled(2, 2, 4, t22, t41, sym=True))
    add(2, 10, _coupled(2, 4, 4, t41, t41, sym=False))

    add(4, 1, [_sym_pair(t01, t41[q]) for q in range(9)])
    add(4, 2, _coupled(4, 2, 2, t21, t21, sym=False))
    add(4, 3, [_sym_pair(t02, t41[q]) for q in range(9)])
    add(4, 4, _coupled(4, 2, 2, t22, t21, sym=True))
    add(4, 5, _coupled(4, 2, 4, t21, t41, sym=True))
    add(4, 6, _coupled(4, 2, 2, t22, t22, sym=False))
    add(4, 7, _coupled(4, 2, 4, t22, t41, sym=True))
    add(4, 8, _coupled(4, 4, 4, t41, t41, sym=False))

    add(6, 1, _coupled(6, 2, 4, t21, t41, sym=True))
    add(6, 2, _coupled(6, 2, 4, t22, t41, sym=True))
    add(6, 3, _coupled(6, 4, 4, t41, t41, sym=False))

    add(8, 1, _coupled(8, 4, 4, t41, t41, sym=False))
    return out


def coupled_basis(t):
    """The family of coupled tensors at angular momentum 2t (t = 0..4)."""
    if not 0 <= t <= 4:
        raise ValueError("t must be in 0..4")
    allb = coupled_basis_all()
    return [allb[(2 * t, v)] for v in range(1, FAMILY_SIZES[t] + 1)]


@functools.lru_cache(maxsize=1)
def zonal_invariant_matrices():
    """The 29 matrices T^{2t,v,0}: a basis of the symmetric operators that
    commute with the stabilizer of the z-axis, as (29, 21, 21) plus labels."""
    mats, labels = [], []
    for t in range(5):
        for v in range(1, FAMILY_SIZES[t] + 1):
            mats.append(coupled_basis_all()[(2 * t, v)].block(0))
            labels.append((2 * t, v))
    return np.array(mats), tuple(labels)


# ---------------------------------------------------------------------------
# Expansion of the zonal blocks over the L^q family
# ---------------------------------------------------------------------------

def rotation_to_pole(n):
    """A rotation g with g e_z = n (any such; callers quotient the freedom)."""
    n = np.asarray(n, dtype=float)
    n = n / np.linalg.norm(n)
    theta = math.acos(np.clip(n[2], -1, 1))
    phi = math.atan2(n[1], n[0])
    return groups.rot_z(phi) @ np.array(
        [[math.cos(theta), 0, math.sin(theta)],
         [0, 1, 0],
         [-math.sin(theta), 0, math.cos(theta)]])


def zonal_block_at(two_t, v, n):
    """M^{2t,v}(n): the zonal invariant block transported to direction n."""
    R = tensors.rep_matrix_21(rotation_to_pole(n))
    T0 = coupled_basis_all()[(two_t, v)].block(0)
    return R @ T0 @ R.T


class BasisInsufficiencyError(RuntimeError):
    pass


@functools.lru_cache(maxsize=1)
def m_to_l_expansion(tol=1e-9):
    """Coefficients alpha[(2t, v)][q] with M^{2t,v}(n) = sum_q alpha_q L^q(n).

    Solved by least squares on an overdetermined sample of directions;
    residuals above `tol` raise BasisInsufficiencyError.
    """
    rng = np.random.default_rng(42)
    dirs = rng.standard_normal((40, 3))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    Lcols = np.array([np.concatenate([tensors.L_function(q, n).ravel() for n in dirs])
                      for q in range(1, 30)]).T
    out = {}
    _, labels = zonal_invariant_matrices()
    for (two_t, v) in labels:
        y = np.concatenate([zonal_block_at(two_t, v, n).ravel() for n in dirs])
        alpha, *_ = np.linalg.lstsq(Lcols, y, rcond=None)
        resid = float(np.max(np.abs(Lcols @ alpha - y)))
        if resid > tol:
            raise BasisInsufficiencyError(
                f"T^({two_t},{v},0) not in the span of L^1..L^29 "
                f"(residual {resid:.2e})")
        out[(two_t, v)] = alpha
    return out


# ---------------------------------------------------------------------------
# Frozen data artifact
# ---------------------------------------------------------------------------

def snapshot_payload():
    """Computed basis data frozen for reproducibility checks.

    Covers the adapted bases of all sixteen cases, the zonal invariant
    family, and the expansion of the zonal blocks over the L family.
    """
    payload = {"version": 1, "groups": {}, "zonal": {}, "m_to_l": {}}
    for tag in groups.GROUP_TAGS:
        comps = isotypic_decomposition(tag)
        payload["groups"][tag] = {
            "structure": {c.irrep: c.copies for c in comps},
            "basis": [[float(v) for v in row] for row in adapted_basis(tag)],
        }
    mats, labels = zonal_invariant_matrices()
    payload["zonal"] = {
        "labels": [list(lab) for lab in labels],
        "matrices": [[float(v) for v in m.ravel()] for m in mats],
    }
    for (tt, v), alpha in m_to_l_expansion().items():
        payload["m_to_l"][f"{tt},{v}"] = [float(a) for a in alpha]
    return payload


def snapshot_path():
    import pathlib
    return pathlib.Path(__file__).parent / "data" / "snapshot.json"


def write_snapshot():
    import json
    path = snapshot_path()
    path.parent.mkdir(exist_ok=True)
    with open(path, "w") as fh:
        json.dump(snapshot_payload(), fh)
    return path


def check_snapshot(tol=1e-9):
    """Largest deviation between freshly computed data and the frozen file."""
    import json
    with open(snapshot_path()) as fh:
        stored = json.load(fh)
    fresh = snapshot_payload()
    worst = 0.0
    for tag in groups.GROUP_TAGS:
        if stored["groups"][tag]["structure"] != fresh["groups"][tag]["structure"]:
            raise StructureMismatchError(f"snapshot structure drifted for {tag}")
        a = np.array(stored["groups"][tag]["basis"])
        b = np.array(fresh["groups"][tag]["basis"])
        worst = max(worst, float(np.max(np.abs(a - b))))
    a = np.array(stored["zonal"]["matrices"])
    b = np.array(fresh["zonal"]["matrices"])
    worst = max(worst, float(np.max(np.abs(a - b))))
    for key, alpha in stored["m_to_l"].items():
        worst = max(worst, float(np.max(np.abs(
            np.array(alpha) - fresh["m_to_l"][key]))))
    if worst > tol:
        raise StructureMismatchError(f"snapshot deviates by {worst:.3e}")
    return worst
