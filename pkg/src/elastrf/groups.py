"""Catalog of the sixteen symmetry-group cases K1..K16.

Each case pairs a group K acting on wavenumber space with the elasticity
class whose fixed-point space it leaves invariant.  Finite groups carry an
explicit element list (closed under products and inverses, with generator
words retained so irreducible representations can be evaluated on every
element); the four continuous cases carry an axis/mirror descriptor plus
generator matrices sufficient for fixed-space computations.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

_TOL = 1e-12


def rot_z(angle):
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rot_x(angle):
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rot_axis(axis, angle):
    """Rotation about an arbitrary axis (Rodrigues form)."""
    u = np.asarray(axis, dtype=float)
    u = u / np.linalg.norm(u)
    K = np.array([[0, -u[2], u[1]], [u[2], 0, -u[0]], [-u[1], u[0], 0]])
    return np.eye(3) + math.sin(angle) * K + (1 - math.cos(angle)) * (K @ K)


_C3_DIAG = rot_axis((1.0, 1.0, 1.0), 2.0 * math.pi / 3.0)
_INV = -np.eye(3)


@dataclass(frozen=True)
class GroupElement:
    matrix: np.ndarray
    word: tuple  # generator indices whose product (left to right) is `matrix`

    def __repr__(self):
        return f"GroupElement(word={self.word})"


def _key(m):
    return tuple(np.round(np.asarray(m), 10).ravel())


def _closure(generators):
    """Enumerate the group generated by `generators`, tracking words."""
    elems = {_key(np.eye(3)): GroupElement(np.eye(3), ())}
    frontier = list(elems.values())
    while frontier:
        new = []
        for e in frontier:
            for gi, g in enumerate(generators):
                prod = e.matrix @ g
                k = _key(prod)
                if k not in elems:
                    el = GroupElement(prod, e.word + (gi,))
                    elems[k] = el
                    new.append(el)
        frontier = new
        if len(elems) > 10000:
            raise RuntimeError("group closure did not terminate")
    return list(elems.values())


# ---------------------------------------------------------------------------
# Irreducible representations (generator images, Mulliken labels)
# ---------------------------------------------------------------------------

def _r2(angle):
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


_FLIP2 = np.array([[1.0, 0.0], [0.0, -1.0]])


def _dihedral_irreps(n):
    """Irreps of D_n x Z2c on generators (Rz(2pi/n), Rx(pi), -I); 'g' parity."""
    one = np.eye(1)
    irreps = {"A1g": [one, one, one], "A2g": [one, -one, one]}
    if n == 2:
        # D2 is abelian; Mulliken uses A, B1, B2, B3.
        return {
            "Ag": [one, one, one],
            "B1g": [one, -one, one],
            "B2g": [-one, -one, one],
            "B3g": [-one, one, one],
        }
    if n % 2 == 0:
        irreps["B1g"] = [-one, one, one]
        irreps["B2g"] = [-one, -one, one]
    e_max = (n - 1) // 2 if n % 2 else n // 2 - 1
    for k in range(1, e_max + 1):
        label = "Eg" if e_max == 1 else f"E{k}g"
        irreps[label] = [_r2(2 * math.pi * k / n), _FLIP2, np.eye(2)]
    return irreps


_TETRA_IRREPS = {
    "Ag": [np.eye(1), np.eye(1), np.eye(1)],
    "Eg": [np.eye(2), _r2(2 * math.pi / 3), np.eye(2)],
    "Tg": [rot_z(math.pi), _C3_DIAG, np.eye(3)],
}

_OCTA_IRREPS = {
    "A1g": [np.eye(1), np.eye(1), np.eye(1)],
    "A2g": [-np.eye(1), np.eye(1), np.eye(1)],
    "Eg": [_FLIP2, _r2(2 * math.pi / 3), np.eye(2)],
    "T1g": [rot_z(math.pi / 2), _C3_DIAG, np.eye(3)],
    "T2g": [-rot_z(math.pi / 2), _C3_DIAG, np.eye(3)],
}


# ---------------------------------------------------------------------------
# Group case table
# ---------------------------------------------------------------------------

CLASS_DIMS = {
    "triclinic": 21, "monoclinic": 13, "orthotropic": 9, "trigonal": 6,
    "tetragonal": 6, "transverse_isotropic": 5, "cubic": 3, "isotropic": 2,
}

#: elasticity class -> group tag realizing the class symmetry group H
CLASS_GROUP = {
    "triclinic": "K1", "monoclinic": "K3", "orthotropic": "K5",
    "trigonal": "K10", "tetragonal": "K12", "transverse_isotropic": "K14",
    "cubic": "K15", "isotropic": "K16",
}


@dataclass(frozen=True)
class GroupCase:
    tag: str
    name: str
    class_name: str
    finite: bool
    order: int | None
    generators: tuple
    irreps: dict = field(default_factory=dict, repr=False, compare=False)
    descriptor: str = ""

    @property
    def class_dim(self):
        return CLASS_DIMS[self.class_name]

    @property
    def class_group_tag(self):
        return CLASS_GROUP[self.class_name]

    def elements(self):
        return enumerate_elements(self.tag)


def _dn_gens(n):
    return (rot_z(2 * math.pi / n), rot_x(math.pi), _INV)


_CONT_ANGLE = 1.0  # generic (irrational multiple of pi) rotation angle

_CASES = {
    "K1": GroupCase("K1", "Z2c", "triclinic", True, 2, (_INV,),
                    {"Ag": [np.eye(1)]}),
    "K2": GroupCase("K2", "O(3)", "triclinic", False, None,
                    (rot_z(_CONT_ANGLE), rot_x(_CONT_ANGLE), _INV),
                    descriptor="full orthogonal group"),
    "K3": GroupCase("K3", "Z2xZ2c", "monoclinic", True, 4,
                    (rot_z(math.pi), _INV),
                    {"Ag": [np.eye(1), np.eye(1)], "Bg": [-np.eye(1), np.eye(1)]}),
    "K4": GroupCase("K4", "O(2)xZ2c", "monoclinic", False, None,
                    (rot_z(_CONT_ANGLE), rot_x(math.pi), _INV),
                    descriptor="rotations about z, flip about x, inversion"),
    "K5": GroupCase("K5", "D2xZ2c", "orthotropic", True, 8, _dn_gens(2),
                    _dihedral_irreps(2)),
    "K6": GroupCase("K6", "D4xZ2c", "orthotropic", True, 16, _dn_gens(4),
                    _dihedral_irreps(4)),
    "K7": GroupCase("K7", "D6xZ2c", "orthotropic", True, 24, _dn_gens(6),
                    _dihedral_irreps(6)),
    "K8": GroupCase("K8", "TxZ2c", "orthotropic", True, 24,
                    (rot_z(math.pi), _C3_DIAG, _INV), _TETRA_IRREPS),
    "K9": GroupCase("K9", "OxZ2c", "orthotropic", True, 48,
                    (rot_z(math.pi / 2), _C3_DIAG, _INV), _OCTA_IRREPS),
    "K10": GroupCase("K10", "D3xZ2c", "trigonal", True, 12, _dn_gens(3),
                     _dihedral_irreps(3)),
    "K11": GroupCase("K11", "D6xZ2c", "trigonal", True, 24, _dn_gens(6),
                     _dihedral_irreps(6)),
    "K12": GroupCase("K12", "D4xZ2c", "tetragonal", True, 16, _dn_gens(4),
                     _dihedral_irreps(4)),
    "K13": GroupCase("K13", "D8xZ2c", "tetragonal", True, 32, _dn_gens(8),
                     _dihedral_irreps(8)),
    "K14": GroupCase("K14", "O(2)xZ2c", "transverse_isotropic", False, None,
                     (rot_z(_CONT_ANGLE), rot_x(math.pi), _INV),
                     descriptor="rotations about z, flip about x, inversion"),
    "K15": GroupCase("K15", "OxZ2c", "cubic", True, 48,
                     (rot_z(math.pi / 2), _C3_DIAG, _INV), _OCTA_IRREPS),
    "K16": GroupCase("K16", "O(3)", "isotropic", False, None,
                     (rot_z(_CONT_ANGLE), rot_x(_CONT_ANGLE), _INV),
                     descriptor="full orthogonal group"),
}

GROUP_TAGS = tuple(f"K{i}" for i in range(1, 17))
FINITE_TAGS = tuple(t for t in GROUP_TAGS if _CASES[t].finite)
CONTINUOUS_TAGS = tuple(t for t in GROUP_TAGS if not _CASES[t].finite)


def group_case(tag):
    if tag not in _CASES:
        raise KeyError(f"unknown group tag {tag!r}; expected K1..K16")
    return _CASES[tag]


class InfiniteGroupError(ValueError):
    """Raised when element enumeration is requested for a continuous group."""


@functools.lru_cache(maxsize=None)
def _elements_cached(tag):
    case = _CASES[tag]
    if not case.finite:
        raise InfiniteGroupError(
            f"{tag} ({case.name}) is not finite; use the continuous-group "
            "descriptor and closed-form kernels instead")
    elems = _closure(case.generators)
    if len(elems) != case.order:
        raise RuntimeError(f"{tag}: closure produced {len(elems)} elements, "
                           f"expected {case.order}")
    return tuple(elems)


def enumerate_elements(tag):
    """All elements of a finite group case, as GroupElement records."""
    return list(_elements_cached(tag))


def element_matrices(tag):
    return np.array([e.matrix for e in _elements_cached(tag)])


def irrep_value(tag, label, element):
    """Value of the labelled irreducible representation on one element."""
    case = _CASES[tag]
    images = case.irreps[label]
    out = np.eye(images[0].shape[0])
    for gi in element.word:
        out = out @ images[gi]
    return out


def irrep_dim(tag, label):
    return _CASES[tag].irreps[label][0].shape[0]


def irrep_labels(tag):
    return list(_CASES[tag].irreps)


# ---------------------------------------------------------------------------
# Orbit-type strata
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Stratum:
    index: int
    chart: str
    representative: tuple


def _unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def _strata_table():
    s = {}
    origin = Stratum(0, "{0}", (0.0, 0.0, 0.0))
    ax = Stratum(1, "(0,0,p3): p3>0", (0.0, 0.0, 1.0))
    s["K1"] = [origin, Stratum(1, "p != 0", (0.3, 0.4, 0.5))]
    s["K2"] = [origin, ax]
    s["K16"] = s["K2"]
    s["K3"] = [origin, ax,
               Stratum(2, "(p1,p2,0): p perp z-axis", (1.0, 0.5, 0.0)),
               Stratum(3, "generic", (0.3, 0.4, 0.5))]
    s["K4"] = [origin,
               Stratum(1, "(p1,0,0): p1>0 (equatorial circle)", (1.0, 0.0, 0.0)),
               Stratum(2, "(0,0,p3): p3>0 (axis)", (0.0, 0.0, 1.0)),
               Stratum(3, "(p1,0,p3): p1,p3>0", (1.0, 0.0, 1.5))]
    s["K14"] = s["K4"]

    def dihedral(m):
        # Eq.-(6)-style charts; the azimuthal fundamental arc is (0, pi/(2m)).
        return [origin,
                Stratum(1, "coordinate axis of the axial frame", (0.0, 0.0, 1.0)),
                Stratum(2, "vertical mirror plane, 0<theta<pi/2",
                        tuple(_unit((1.0, 0.0, 1.0)))),
                Stratum(3, f"equator, 0<phi<pi/{2 * m}",
                        tuple(_unit(rot_z(math.pi / (4 * m)) @ (1.0, 0.0, 0.0)))),
                Stratum(4, f"generic, 0<theta<pi/2, 0<phi<pi/{2 * m}",
                        tuple(_unit(rot_z(math.pi / (4 * m)) @ (1.0, 0.0, 1.0))))]

    s["K5"] = dihedral(1)
    s["K6"] = dihedral(2)
    s["K12"] = s["K6"]
    s["K7"] = dihedral(3)
    s["K11"] = s["K7"]
    s["K13"] = dihedral(4)
    s["K8"] = [origin,
               Stratum(1, "three-fold axis: |p1|=|p2|=|p3|>0", tuple(_unit((1, 1, 1)))),
               Stratum(2, "two-fold (coordinate) axis", (0.0, 0.0, 1.0)),
               Stratum(3, "coordinate mirror plane", tuple(_unit((1.0, 2.0, 0.0)))),
               Stratum(4, "generic", tuple(_unit((0.3, 0.4, 0.5))))]
    s["K9"] = [origin,
               Stratum(1, "0<p1=p2=p3", tuple(_unit((1, 1, 1)))),
               Stratum(2, "(0,0,p3): p3>0", (0.0, 0.0, 1.0)),
               Stratum(3, "(0,p2,p3): 0<p2=p3", tuple(_unit((0, 1, 1)))),
               Stratum(4, "(0,p2,p3): 0<p2<p3", tuple(_unit((0, 1, 2)))),
               Stratum(5, "two equal components: 0<p1=p2<p3", tuple(_unit((1, 1, 2)))),
               Stratum(6, "0<p1<p2<p3", tuple(_unit((1, 2, 3))))]
    s["K15"] = s["K9"]
    s["K10"] = [origin,
                Stratum(1, "(0,0,p3): p3>0", (0.0, 0.0, 1.0)),
                Stratum(2, "vertical mirror plane (normal to a two-fold axis)",
                        tuple(_unit((0.0, 1.0, 1.0)))),
                Stratum(3, "equator p3=0", (1.0, 0.4, 0.0)),
                Stratum(4, "generic", tuple(_unit((0.5, 0.2, 0.8))))]
    return s


_STRATA = _strata_table()


def orbit_strata(tag):
    """The orbit-type strata of the group action on wavenumber space."""
    group_case(tag)
    return list(_STRATA[tag])


def _is0(x, scale):
    return abs(x) <= 1e-12 * max(1.0, scale)


def stratum_of(tag, p):
    """Index of the stratum containing p (boundaries resolve to the more
    symmetric stratum)."""
    case = group_case(tag)
    p = np.asarray(p, dtype=float)
    n = float(np.linalg.norm(p))
    if _is0(n, 1.0):
        return 0
    a = np.abs(p)
    perp = math.hypot(p[0], p[1])
    tag_eff = tag
    if tag in ("K16",):
        tag_eff = "K2"
    if tag == "K14":
        tag_eff = "K4"
    if tag in ("K12",):
        tag_eff = "K6"
    if tag == "K11":
        tag_eff = "K7"
    if tag == "K15":
        tag_eff = "K9"

    if tag_eff == "K1":
        return 1
    if tag_eff == "K2":
        return 1
    if tag_eff == "K3":
        if _is0(perp, n):
            return 1
        if _is0(p[2], n):
            return 2
        return 3
    if tag_eff == "K4":
        if _is0(p[2], n):
            return 1
        if _is0(perp, n):
            return 2
        return 3
    if tag_eff in ("K5", "K6", "K7", "K13"):
        nfold = {"K5": 2, "K6": 4, "K7": 6, "K13": 8}[tag_eff]
        if tag_eff == "K5":
            nz = int(np.sum(a > 1e-12 * n))
            if nz == 1:
                return 1
            if _is0(p[2], n):
                return 3
            if _is0(p[0], n) or _is0(p[1], n):
                return 2
            return 4
        if _is0(perp, n):
            return 1
        on_mirror = False
        for k in range(2 * nfold):
            u = rot_z(math.pi * k / nfold) @ np.array([1.0, 0.0, 0.0])
            if _is0(p[0] * u[1] - p[1] * u[0], n):
                on_mirror = True
                break
        if _is0(p[2], n):
            return 3
        if on_mirror:
            return 2
        return 4
    if tag_eff == "K8":
        if a.max() - a.min() <= 1e-12 * n:
            return 1
        if int(np.sum(a > 1e-12 * n)) == 1:
            return 2
        if np.any(a <= 1e-12 * n):
            return 3
        return 4
    if tag_eff == "K9":
        q = np.sort(a)
        if q[2] - q[0] <= 1e-12 * n:
            return 1
        if q[0] <= 1e-12 * n and q[1] <= 1e-12 * n:
            return 2
        if q[0] <= 1e-12 * n:
            return 3 if q[2] - q[1] <= 1e-12 * n else 4
        if q[1] - q[0] <= 1e-12 * n or q[2] - q[1] <= 1e-12 * n:
            return 5
        return 6
    if tag_eff == "K10":
        if _is0(perp, n):
            return 1
        on_mirror = False
        for k in range(3):
            u = rot_z(2 * math.pi * k / 3) @ np.array([1.0, 0.0, 0.0])
            if _is0(float(p @ u), n):
                on_mirror = True
                break
        if on_mirror and not _is0(p[2], n):
            return 2
        if _is0(p[2], n):
            return 3
        return 4
    raise KeyError(tag)


@dataclass(frozen=True)
class IsotropySubgroup:
    label: str
    order: int | None
    generators: tuple

    def fixes(self, p, tol=1e-12):
        p = np.asarray(p, dtype=float)
        scale = max(1.0, float(np.linalg.norm(p)))
        return all(np.max(np.abs(g @ p - p)) <= tol * scale for g in self.generators)


def _classify_stabilizer(mats):
    order = len(mats)
    if order == 1:
        return "I"
    n_mirror = sum(1 for m in mats
                   if np.linalg.det(m) < 0 and _is0(np.trace(m) - 1.0, 1.0))
    has_inv = any(np.max(np.abs(m + np.eye(3))) < 1e-9 for m in mats)
    n_rot = sum(1 for m in mats if np.linalg.det(m) > 0) - 1
    if order == 2:
        if n_mirror:
            return "Z2-"          # single reflection
        if has_inv:
            return "Z2c"
        return "Z2"
    base = f"order{order}"
    if has_inv:
        base += "(contains -I)"
    elif n_mirror and n_rot:
        return {6: "D3-like", 8: "D4-like", 4: "Z2+Z2-"}.get(order, base)
    return base


def stabilizer(tag, p):
    """Stabilizer of p inside the (finite or continuous) group case."""
    case = group_case(tag)
    p = np.asarray(p, dtype=float)
    scale = max(1.0, float(np.linalg.norm(p)))
    if case.finite:
        mats = [e.matrix for e in enumerate_elements(tag)
                if np.max(np.abs(e.matrix @ p - p)) <= 1e-10 * scale]
        return IsotropySubgroup(_classify_stabilizer(mats), len(mats), tuple(mats))
    # continuous cases: stabilizers have closed forms
    n = float(np.linalg.norm(p))
    if _is0(n, 1.0):
        return IsotropySubgroup(case.name, None, tuple(case.generators))
    if tag in ("K2", "K16"):
        # O(2): rotations about p plus mirrors through planes containing p
        axis = p / n
        ref = rot_axis(np.cross(axis, [0, 0, 1.0]) if abs(axis[2]) < 1 - 1e-12
                       else [1.0, 0, 0], 0.0)
        del ref
        # build a rotation about p and one mirror fixing p
        r = rot_axis(axis, _CONT_ANGLE)
        # mirror through the plane spanned by p and an orthogonal vector
        t = np.array([1.0, 0, 0]) if abs(axis[0]) < 0.9 else np.array([0, 1.0, 0])
        u = np.cross(axis, t)
        u /= np.linalg.norm(u)
        mirror = np.eye(3) - 2.0 * np.outer(u, u)
        return IsotropySubgroup("O(2)", None, (r, mirror))
    # K4 / K14
    perp = math.hypot(p[0], p[1])
    finite_part = [m for m in _k4_sample_elements()
                   if np.max(np.abs(m @ p - p)) <= 1e-10 * scale]
    if _is0(perp, n):
        r = rot_z(_CONT_ANGLE)
        mirror = np.diag([1.0, -1.0, 1.0])
        return IsotropySubgroup("O(2)", None, (r, mirror))
    return IsotropySubgroup(_classify_stabilizer(finite_part), len(finite_part),
                            tuple(finite_part))


@functools.lru_cache(maxsize=1)
def _k4_sample_elements():
    """Finite sampler of O(2) x Z2c: flips/mirrors plus a few rotations."""
    mats = []
    for ang in (0.0, math.pi / 2, math.pi, _CONT_ANGLE):
        for flip in (np.eye(3), rot_x(math.pi)):
            for sign in (1.0, -1.0):
                mats.append(sign * (rot_z(ang) @ flip))
    uniq = {}
    for m in mats:
        uniq[_key(m)] = m
    return tuple(uniq.values())


def isotropy_subgroups(tag):
    """Stabilizer of each stratum's representative point."""
    return [stabilizer(tag, s.representative) for s in orbit_strata(tag)]


def canonical_representative(tag, p):
    """Lexicographically canonical point of the orbit of p (finite groups)."""
    case = group_case(tag)
    p = np.asarray(p, dtype=float)
    if not case.finite:
        n = float(np.linalg.norm(p))
        if tag in ("K2", "K16"):
            return np.array([0.0, 0.0, n])
        return np.array([math.hypot(p[0], p[1]), 0.0, abs(p[2])])
    orbit = [e.matrix @ p for e in enumerate_elements(tag)]
    best = max(orbit, key=lambda q: tuple(np.round(q, 10)[::-1]))
    return best


# ---------------------------------------------------------------------------
# Wigner-basis to real (Gordienko) basis conversion for the vector rep
# ---------------------------------------------------------------------------

# Columns of the Cartesian -> Wigner change of basis, Condon-Shortley phases:
# |1,-1> = (e_x - i e_y)/sqrt2, |1,0> = e_z, |1,1> = -(e_x + i e_y)/sqrt2.
_V_WIGNER = np.array([
    [1 / math.sqrt(2), 0.0, -1 / math.sqrt(2)],
    [-1j / math.sqrt(2), 0.0, -1j / math.sqrt(2)],
    [0.0, 1.0, 0.0],
], dtype=complex)

# Unitary mapping the Wigner basis to the real basis ordered (m=-1, 0, 1);
# the real row vectors realize (y, z, x) up to a uniform phase per row.
_U_GORDIENKO = (1 / math.sqrt(2)) * np.array([
    [-1.0, 0.0, -1.0],
    [0.0, -1j * math.sqrt(2), 0.0],
    [1j, 0.0, -1j],
], dtype=complex)


class BasisMismatchError(ValueError):
    """Conjugation left a non-negligible imaginary part."""


def wigner_matrix_l1(g):
    """The orthogonal matrix g in the Wigner basis of the vector representation."""
    g = np.asarray(g, dtype=float)
    return _V_WIGNER.conj().T @ g @ _V_WIGNER


def gordienko_from_wigner(d1, tol=1e-12):
    """Conjugate a Wigner-basis matrix into the real (Gordienko) basis.

    Raises BasisMismatchError when the input does not follow the expected
    Wigner-basis convention, leaving an imaginary residue.
    """
    d1 = np.asarray(d1, dtype=complex)
    out = _U_GORDIENKO @ d1 @ _U_GORDIENKO.conj().T
    resid = float(np.max(np.abs(out.imag)))
    if resid > tol:
        raise BasisMismatchError(f"imaginary residue {resid:.3e} exceeds {tol:.1e}")
    return out.real


def wigner_to_gordienko(g, tol=1e-12):
    """Real matrix of an orthogonal g in the Gordienko basis (m = -1, 0, 1)."""
    g = np.asarray(g, dtype=float)
    if np.max(np.abs(g.T @ g - np.eye(3))) > 1e-10:
        raise ValueError("matrix is not orthogonal within tolerance")
    return gordienko_from_wigner(wigner_matrix_l1(g), tol)
