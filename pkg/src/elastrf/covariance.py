"""Spectral measures and two-point kernels for all sixteen group cases.

A field specification is a group case, mean coefficients over the trivial
copies, and a finite list of spectral atoms.  Each atom carries a wavevector
(or a radius for the two full-rotation cases), a nonnegative weight, and a
spectral density value f: a symmetric nonnegative-definite matrix with unit
trace on the value space, constrained to be invariant under the stabilizer
of the atom's wavevector.

For finite groups the kernel is the exact group-averaged plane-wave sum

    sum_atoms w * (1/|K|) sum_g cos(g p . (y - x)) U(g) f U(g)^T,

which specializes to the per-class forms (products of cosines, coset
branches with sign-flipped or conjugated blocks).  The axial continuous
cases use the closed Bessel form, the isotropic case the sinc form, and the
full triclinic-isotropic case a spherical quadrature.
"""

from __future__ import annotations

import functools
import math
import os
from dataclasses import dataclass

import numpy as np
from scipy.special import j0 as bessel_j0

from . import groups, reps, tensors

PSD_TOL = 1e-10
TRACE_TOL = 1e-12
STRUCT_TOL = 1e-10

#: orbit sizes of the 21 index patterns; the constraint tables are written
#: for component covariances f~_IJ = f_IJ / sqrt(N_I N_J).
_N_ORBIT = np.array([len(tensors._symmetry_orbit(q)) for q in tensors.INDEX_QUADS],
                    dtype=float)
_COMP_SCALE = 1.0 / np.sqrt(_N_ORBIT)


def component_scaled(f):
    """21x21 spectral density rescaled to raw component covariances."""
    return f * np.outer(_COMP_SCALE, _COMP_SCALE)


def _n_threads():
    try:
        return max(1, int(os.environ.get("ELASTRF_THREADS", "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# Constraint tables for the full triclinic-isotropic case
# ---------------------------------------------------------------------------

# Equality rows (H1): pairs of component-scaled entries forced equal on the
# axis stratum.  1-based indices in the fixed enumeration; row 1 is the
# diagonal pair (1,1) = (3,3).
H1_ROWS = [
    ((1, 1), (3, 3)), ((1, 2), (2, 3)), ((1, 6), (3, 4)), ((1, 7), (3, 9)),
    ((1, 8), (3, 8)), ((2, 4), (2, 6)), ((2, 7), (2, 9)), ((4, 4), (6, 6)),
    ((4, 5), (5, 6)), ((4, 9), (6, 7)), ((5, 7), (5, 9)), ((7, 7), (9, 9)),
    ((10, 10), (14, 14)), ((10, 11), (14, 15)), ((10, 13), (14, 17)),
    ((11, 11), (15, 15)), ((12, 13), (16, 17)), ((13, 13), (17, 17)),
    ((18, 19), (18, 20)), ((19, 19), (20, 20)), ((19, 21), (20, 21)),
]

# Affine rows (H2): entry = linear combination of other entries, all in
# component-scaled units.  Each row is (targets, [(coeff, entry), ...]).
H2_ROWS = [
    ([(1, 3)], [(-1, (1, 1)), (8, (5, 5)), (-2, (8, 8)), (4, (1, 8))]),
    ([(1, 4), (3, 6)], [(1, (1, 6)), (-4, (18, 19))]),
    ([(1, 5), (3, 5)], [(0.5, (1, 1)), (-2, (19, 19)), (-0.5, (1, 8))]),
    ([(1, 9), (3, 7)], [(1, (1, 7)), (-4, (19, 21))]),
    ([(2, 8)], [(1, (1, 2)), (-2, (2, 5))]),
    ([(4, 6)], [(1, (4, 4)), (-2, (18, 18))]),
    ([(4, 7), (6, 9)], [(1, (4, 9)), (-2, (18, 21))]),
    ([(4, 8), (6, 8)], [(1, (1, 6)), (-2, (4, 5)), (-2, (18, 19))]),
    ([(5, 8)], [(-0.5, (1, 1)), (2, (5, 5)), (-1, (8, 8)), (2, (19, 19)),
                (1.5, (1, 8))]),
    ([(7, 8), (8, 9)], [(1, (1, 7)), (-2, (5, 7)), (-2, (19, 21))]),
    ([(7, 9)], [(1, (7, 7)), (-2, (21, 21))]),
    ([(10, 12), (14, 16)], [(-0.5, (11, 11)), (0.5, (12, 12)), (-1, (10, 11))]),
    ([(11, 12), (15, 16)], [(-2, (10, 10)), (0.5, (11, 11)), (0.5, (12, 12))]),
    ([(11, 13), (15, 17)], [(1, (12, 13)), (-2, (10, 13))]),
    ([(19, 20)], [(0.5, (1, 1)), (-2, (5, 5)), (0.5, (8, 8)), (-1, (19, 19)),
                  (-1, (1, 8))]),
]

# the 29 free component-scaled entries, in order u_1 .. u_29
U_ENTRIES = [
    (2.0, (1, 1)), (1.0, (2, 2)), (2.0, (4, 4)), (1.0, (5, 5)), (2.0, (7, 7)),
    (1.0, (8, 8)), (1.0, (1, 2)), (1.0, (1, 6)), (1.0, (1, 7)), (1.0, (1, 8)),
    (1.0, (2, 4)), (1.0, (2, 5)), (1.0, (2, 7)), (1.0, (4, 5)), (1.0, (4, 9)),
    (1.0, (5, 9)), (2.0, (10, 10)), (2.0, (11, 11)), (2.0, (12, 12)),
    (2.0, (13, 13)), (1.0, (10, 11)), (1.0, (10, 13)), (1.0, (12, 13)),
    (1.0, (18, 18)), (2.0, (19, 19)), (1.0, (21, 21)), (1.0, (18, 19)),
    (1.0, (18, 21)), (1.0, (19, 21)),
]


def u_from_f(f):
    """The 29 free coordinates u_i read off a 21x21 spectral density."""
    ft = component_scaled(f)
    return np.array([c * ft[i - 1, j - 1] for c, (i, j) in U_ENTRIES])


@functools.lru_cache(maxsize=1)
def _u_to_coeff_matrix():
    mats, _ = reps.zonal_invariant_matrices()
    E = np.array([[c * (m * np.outer(_COMP_SCALE, _COMP_SCALE))[i - 1, j - 1]
                   for m in mats] for c, (i, j) in U_ENTRIES])
    return np.linalg.inv(E)


def f_from_u(u):
    """Axis-stratum spectral density from its 29 free coordinates."""
    u = np.asarray(u, dtype=float)
    if u.shape != (29,):
        raise ValueError("expected 29 coordinates")
    mats, _ = reps.zonal_invariant_matrices()
    coeff = _u_to_coeff_matrix() @ u
    return np.einsum("a,aij->ij", coeff, mats)


def phi_group_sums(f):
    """(Phi1, Phi2, Phi3) diagonal-block trace densities of a 21x21 f."""
    u = u_from_f(f)
    return float(np.sum(u[0:6])), float(np.sum(u[16:20])), float(np.sum(u[23:26]))


# ---------------------------------------------------------------------------
# Specification objects and validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    name: str
    magnitude: float
    detail: str = ""

    def __str__(self):
        extra = f" ({self.detail})" if self.detail else ""
        return f"{self.name}: residual {self.magnitude:.3e}{extra}"


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple

    def __str__(self):
        if self.ok:
            return "valid"
        return "; ".join(str(v) for v in self.violations)


@dataclass(frozen=True)
class SpectralAtom:
    p: np.ndarray
    weight: float
    f: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "p", np.asarray(self.p, dtype=float))
        object.__setattr__(self, "f", np.asarray(self.f, dtype=float))

    @property
    def radius(self):
        return float(np.linalg.norm(self.p))


def atom_from_u(lam, weight, u):
    """Radial atom of the full-rotation triclinic case from 29 coordinates."""
    return SpectralAtom(np.array([0.0, 0.0, float(lam)]), weight, f_from_u(u))


@dataclass(frozen=True)
class FieldSpec:
    tag: str
    mean: np.ndarray
    atoms: tuple

    def __post_init__(self):
        object.__setattr__(self, "mean", np.asarray(self.mean, dtype=float))
        object.__setattr__(self, "atoms", tuple(self.atoms))

    @property
    def dim(self):
        return reps.adapted_basis(self.tag).shape[0]

    def validate(self):
        return validate_spec(self)

    def require_valid(self):
        report = self.validate()
        if not report.ok:
            raise InvalidSpecError(str(report))
        return self


class InvalidSpecError(ValueError):
    pass


def _check_common(f, d, out):
    if f.shape != (d, d):
        raise ValueError(f"spectral density must be {d}x{d}, got {f.shape}")
    sym = float(np.max(np.abs(f - f.T)))
    if sym > 1e-12:
        out.append(Violation("symmetry", sym))
    tr = abs(float(np.trace(f)) - 1.0)
    if tr > TRACE_TOL:
        out.append(Violation("unit-trace", tr))
    w = np.linalg.eigvalsh(0.5 * (f + f.T))
    if w[0] < -PSD_TOL:
        out.append(Violation("nonnegative-definite", float(-w[0])))


def _stabilizer_violation(tag, p, f, out):
    stab = groups.stabilizer(tag, p)
    Q = reps.adapted_basis(tag)
    worst = 0.0
    for h in stab.generators:
        U = Q @ tensors.rep_matrix_21(h) @ Q.T
        worst = max(worst, float(np.max(np.abs(U @ f @ U.T - f))))
    if worst > STRUCT_TOL:
        blocks = _offending_blocks(tag, p, f)
        out.append(Violation("stabilizer-invariance", worst,
                             f"subgroup {stab.label}" +
                             (f"; blocks {blocks}" if blocks else "")))


def _offending_blocks(tag, p, f):
    stab = groups.stabilizer(tag, p)
    Q = reps.adapted_basis(tag)
    favg = f.copy()
    for h in stab.generators:
        U = Q @ tensors.rep_matrix_21(h) @ Q.T
        favg = 0.5 * (favg + U @ favg @ U.T)
    resid = np.abs(f - favg)
    names = []
    for la, na, sa in reps.block_slices(tag):
        for lb, nb, sb in reps.block_slices(tag):
            if np.max(resid[sa, sb]) > STRUCT_TOL and (la, na) <= (lb, nb):
                names.append(f"{la}[{na + 1}]x{lb}[{nb + 1}]")
    return ", ".join(sorted(set(names))[:6])


def _validate_k2_structure(p, f, out):
    ft = component_scaled(f)

    def e(i, j):
        return ft[i - 1, j - 1]

    off_axis = math.hypot(p[0], p[1])
    if off_axis > 1e-12 * max(1.0, abs(p[2])) or p[2] < 0:
        out.append(Violation("atom must lie on the canonical axis (0,0,lambda)",
                             float(off_axis)))
        return
    if np.linalg.norm(p) <= 1e-12:
        # the origin is fixed by everything: f must be invariant under the
        # full rotation group, and the block trace densities must balance
        for gen in (groups.rot_z(0.9), groups.rot_x(0.9)):
            R = tensors.rep_matrix_21(gen)
            resid = float(np.max(np.abs(R @ f @ R.T - f)))
            if resid > STRUCT_TOL:
                out.append(Violation("full-rotation-invariance at 0", resid))
                break
        _, phi2, phi3 = phi_group_sums(f)
        resid = abs(phi2 - 2.0 * phi3)
        if resid > STRUCT_TOL:
            out.append(Violation("phi2 = 2 phi3 at the origin", resid,
                                 f"phi2={phi2:.6g}, phi3={phi3:.6g}"))
        return

    for k, (a, b) in enumerate(H1_ROWS, start=1):
        resid = abs(e(*a) - e(*b))
        if resid > STRUCT_TOL:
            out.append(Violation(f"H1 row {k}", resid, f"f{a} != f{b}"))
    for k, (targets, combo) in enumerate(H2_ROWS, start=1):
        rhs = sum(c * e(*ij) for c, ij in combo)
        for t in targets:
            resid = abs(e(*t) - rhs)
            if resid > STRUCT_TOL:
                out.append(Violation(f"H2 row {k}", resid, f"f{t}"))
    # entries not generated by the invariant family must vanish
    mats, _ = reps.zonal_invariant_matrices()
    proj = np.einsum("aij,ij->a", mats, f)
    resid = float(np.max(np.abs(f - np.einsum("a,aij->ij", proj, mats))))
    if resid > STRUCT_TOL:
        out.append(Violation("zero-pattern / axis-invariance", resid))


def _validate_k4_structure(tag, f, out):
    slices = reps.block_slices(tag)
    for la, na, sa in slices:
        for lb, nb, sb in slices:
            if (la, na) >= (lb, nb):
                continue
            B = f[sa, sb]
            if la != lb:
                resid = float(np.max(np.abs(B)))
                if resid > STRUCT_TOL:
                    out.append(Violation("cross-symmetry coupling must vanish",
                                         resid, f"{la}[{na + 1}]x{lb}[{nb + 1}]"))
            elif la != "U0gg":
                resid = float(np.max(np.abs(B - np.trace(B) / 2.0 * np.eye(2))))
                if resid > STRUCT_TOL:
                    out.append(Violation(
                        "paired block must be a multiple of the identity",
                        resid, f"{la}[{na + 1}]x{lb}[{nb + 1}]"))
    for la, na, sa in slices:
        if la == "U0gg":
            continue
        B = f[sa, sa]
        resid = float(np.max(np.abs(B - np.trace(B) / 2.0 * np.eye(2))))
        if resid > STRUCT_TOL:
            out.append(Violation("paired block must be a multiple of the identity",
                                 resid, f"{la}[{na + 1}] diagonal"))


def _validate_k16_structure(f, out):
    v1, v2 = float(f[0, 0]), float(f[0, 1])
    resid = (v1 - 0.5) ** 2 + v2 ** 2 - 0.25
    if resid > PSD_TOL:
        out.append(Violation("disk constraint (v1-1/2)^2 + v2^2 <= 1/4",
                             float(resid), f"v1={v1:.6g}, v2={v2:.6g}"))


def validate_f(tag, p, f, stratum=None):
    """Validity report for a spectral density value at wavevector p.

    Checks symmetry, unit trace, nonnegative definiteness, invariance under
    the stabilizer of p, and the class-specific structural constraints.  If
    `stratum` is given it must match the computed stratum of p.
    """
    case = groups.group_case(tag)
    f = np.asarray(f, dtype=float)
    p = np.asarray(p, dtype=float)
    d = reps.adapted_basis(tag).shape[0]
    out = []
    _check_common(f, d, out)
    if stratum is not None:
        actual = groups.stratum_of(tag, p)
        if actual != stratum:
            out.append(Violation("stratum mismatch", float(abs(actual - stratum)),
                                 f"declared {stratum}, computed {actual}"))
    if tag == "K2":
        _validate_k2_structure(p, f, out)
    elif tag in ("K4",):
        _validate_k4_structure(tag, f, out)
        if np.linalg.norm(p) <= 1e-12:
            out.append(Violation("atom at the origin not supported", 1.0,
                                 "use a positive radius"))
    elif tag == "K16":
        _validate_k16_structure(f, out)
    elif tag == "K14":
        if np.linalg.norm(p) <= 1e-12:
            out.append(Violation("atom at the origin not supported", 1.0,
                                 "use a positive radius"))
    else:
        _stabilizer_violation(tag, p, f, out)
    return ValidationReport(not out, tuple(out))


def validate_spec(spec):
    """Validate the mean length, atom weights, and every atom's density."""
    out = []
    m = reps.trivial_multiplicity(spec.tag)
    if spec.mean.shape != (m,):
        out.append(Violation("mean length", float(abs(len(spec.mean) - m)),
                             f"expected {m} coefficients"))
    for idx, atom in enumerate(spec.atoms):
        if not np.isfinite(atom.p).all():
            out.append(Violation(f"atom {idx}: wavevector finite", math.inf))
            continue
        if atom.weight < 0 or not math.isfinite(atom.weight):
            out.append(Violation(f"atom {idx}: weight >= 0", float(atom.weight)))
        rep = validate_f(spec.tag, atom.p, atom.f)
        out.extend(Violation(f"atom {idx}: {v.name}", v.magnitude, v.detail)
                   for v in rep.violations)
    return ValidationReport(not out, tuple(out))


# ---------------------------------------------------------------------------
# Means
# ---------------------------------------------------------------------------

def mean_vector(spec):
    """Mean in adapted coordinates (zero outside the trivial block)."""
    d = spec.dim
    out = np.zeros(d)
    out[:len(spec.mean)] = spec.mean
    return out


def mean_tensor(spec):
    """The one-point correlation tensor expanded to rank-4 form."""
    basis = reps.fixed_point_basis(spec.tag)
    vec = spec.mean @ basis
    return tensors.vec_to_tensor(vec)


# ---------------------------------------------------------------------------
# Finite-group kernels and coset structure
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=None)
def _adapted_rep_elements(tag):
    """(rotation matrices (n,3,3), adapted rep matrices (n,d,d))."""
    els = groups.enumerate_elements(tag)
    Q = reps.adapted_basis(tag)
    g3 = np.array([e.matrix for e in els])
    Ud = np.array([Q @ tensors.rep_matrix_21(e.matrix) @ Q.T for e in els])
    return g3, Ud


@functools.lru_cache(maxsize=None)
def coset_partition(tag):
    """Partition of a finite group by the value of the adapted representation.

    Returns a tuple of (element-index array, U value) pairs; the coset of the
    identity comes first.  Each coset is closed under g -> -g.
    """
    g3, Ud = _adapted_rep_elements(tag)
    seen = {}
    order = []
    for i in range(len(Ud)):
        key = tuple(np.round(Ud[i], 9).ravel())
        if key not in seen:
            seen[key] = len(order)
            order.append(([i], Ud[i]))
        else:
            order[seen[key]][0].append(i)
    ident = next(k for k, (idx, U) in enumerate(order)
                 if np.max(np.abs(U - np.eye(U.shape[0]))) < 1e-9)
    order.insert(0, order.pop(ident))
    return tuple((np.array(idx), U) for idx, U in order)


def j_functions(tag, p, z):
    """Per-coset averaged plane-wave sums.

    Entry s is (1/|G_s|) sum_{g in G_s} cos(g p . z); the equally weighted
    mean over the family, scaled by coset size, is the full group average.
    """
    case = groups.group_case(tag)
    if not case.finite:
        raise groups.InfiniteGroupError(f"{tag} has no finite plane-wave family")
    g3, _ = _adapted_rep_elements(tag)
    p = np.asarray(p, dtype=float)
    z = np.asarray(z, dtype=float)
    phases = (g3 @ p) @ z
    return np.array([float(np.mean(np.cos(phases[idx])))
                     for idx, _ in coset_partition(tag)])


def _kernel_finite(spec, z):
    g3, Ud = _adapted_rep_elements(spec.tag)
    d = Ud.shape[1]
    out = np.zeros((d, d))
    for atom in spec.atoms:
        phases = (g3 @ atom.p) @ z
        c = np.cos(phases)
        out += atom.weight * np.einsum("g,gij,jk,glk->il", c, Ud, atom.f, Ud,
                                       optimize=True) / len(c)
    return out


# ---------------------------------------------------------------------------
# Continuous-group kernels
# ---------------------------------------------------------------------------

def kernel_O2_bessel(spec, x, y):
    """Axial-case kernel: J0 in-plane radial factor times an axial cosine.

    Valid for the two cases whose group is the axial continuous one; the
    spectral density must pass the block-structure validation.
    """
    if spec.tag not in ("K4", "K14"):
        raise ValueError("axial Bessel kernel applies to K4/K14 specs")
    z = np.asarray(y, dtype=float) - np.asarray(x, dtype=float)
    rho = math.hypot(z[0], z[1])
    d = spec.dim
    out = np.zeros((d, d))
    for atom in spec.atoms:
        s = math.hypot(atom.p[0], atom.p[1])
        out += (atom.weight * bessel_j0(s * rho) * math.cos(atom.p[2] * z[2])
                * atom.f)
    return out


def _sinc(t):
    return 1.0 if t == 0.0 else math.sin(t) / t


def _kernel_k16(spec, z):
    r = float(np.linalg.norm(z))
    out = np.zeros((2, 2))
    for atom in spec.atoms:
        out += atom.weight * _sinc(atom.radius * r) * atom.f
    return out


class QuadratureError(RuntimeError):
    pass


@functools.lru_cache(maxsize=64)
def _pole_rotations(n_theta, n_phi):
    from .harmonics import sphere_quadrature
    nodes, w = sphere_quadrature(n_theta, n_phi)
    mats = np.array([tensors.rep_matrix_21(reps.rotation_to_pole(n))
                     for n in nodes])
    return nodes, w / (4.0 * math.pi), mats


_QUAD_PHI = 24


def _zonal_quadrature(f21, lam, r, n_theta):
    """(1/4pi) int cos(lam r n3) R(n) f R(n)^T dOmega by product quadrature."""
    nodes, w, mats = _pole_rotations(n_theta, _QUAD_PHI)
    c = np.cos(lam * r * nodes[:, 2]) * w
    return np.einsum("q,qij,jk,qlk->il", c, mats, f21, mats, optimize=True)


def _auto_theta_order(lam_r):
    return int(max(14, math.ceil(lam_r / 2.0) + 12))


def kernel_O3_quadrature(spec, x, y, tol=1e-9, max_order=220):
    """Full-rotation kernel via spherical quadrature of the orbit integral.

    The zonal integral is evaluated with the separation aligned to the pole
    and transported back, so the result is exactly equivariant; the azimuthal
    rule is exact for the polynomial integrand and only the polar order
    adapts.  Used for the triclinic-isotropic case; an isotropic-class spec
    is embedded into the 21-dimensional space and projected back, which
    cross-checks the closed sinc form.
    """
    if spec.tag not in ("K2", "K16"):
        raise ValueError("spherical quadrature applies to K2/K16 specs")
    z = np.asarray(y, dtype=float) - np.asarray(x, dtype=float)
    r = float(np.linalg.norm(z))
    d = spec.dim
    Q = reps.adapted_basis(spec.tag) if spec.tag == "K16" else None
    zonal = np.zeros((21, 21))
    for atom in spec.atoms:
        lam = atom.radius
        f21 = atom.f if spec.tag == "K2" else Q.T @ atom.f @ Q
        if lam * r == 0.0:
            block = f21
        else:
            n1 = _auto_theta_order(lam * r)
            block = _zonal_quadrature(f21, lam, r, n1)
            while True:
                n2 = min(n1 + 8, max_order)
                block2 = _zonal_quadrature(f21, lam, r, n2)
                delta = float(np.max(np.abs(block2 - block)))
                block = block2
                if delta <= tol:
                    break
                if n2 >= max_order:
                    raise QuadratureError(
                        f"spherical quadrature did not stabilize below {tol:g} "
                        f"at order {max_order} (last delta {delta:.2e})")
                n1 = n2
        zonal += atom.weight * block
    if r > 0.0:
        R = tensors.rep_matrix_21(reps.rotation_to_pole(z / r))
        zonal = R @ zonal @ R.T
    if spec.tag == "K16":
        return Q @ zonal @ Q.T
    return zonal


def kernel(spec, x, y):
    """Two-point correlation matrix in adapted coordinates."""
    case = groups.group_case(spec.tag)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    z = y - x
    if case.finite:
        return _kernel_finite(spec, z)
    if spec.tag in ("K4", "K14"):
        return kernel_O2_bessel(spec, x, y)
    if spec.tag == "K16":
        return _kernel_k16(spec, z)
    return kernel_O3_quadrature(spec, x, y)


def kernel_tensor(spec, x, y):
    """Kernel as a 21x21 block over tensor coordinates."""
    Q = reps.adapted_basis(spec.tag)
    return Q.T @ kernel(spec, x, y) @ Q
