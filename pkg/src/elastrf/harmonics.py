"""Real spherical harmonics, rotation matrices, and coupling coefficients.

The real basis h^m_l (m = -l..l) consists of the standard real spherical
harmonics: sin-type for m < 0, zonal for m = 0, cos-type for m > 0, with the
index correspondence (m = -1, 0, 1) <-> (y, z, x) at l = 1.  Rotation matrices
of O(3) in this basis are obtained by quadrature projection (exact, since the
integrands are polynomials), and the coupling coefficients expanding a tensor
product h^{m1}_{l1} x h^{m2}_{l2} over h^m_l are obtained from exact
Clebsch-Gordan values conjugated into the real basis.
"""

from __future__ import annotations

import functools
import math
from fractions import Fraction

import numpy as np
from scipy.special import sph_harm_y


# ---------------------------------------------------------------------------
# Real spherical harmonics
# ---------------------------------------------------------------------------

def _theta_phi(xyz):
    xyz = np.asarray(xyz, dtype=float)
    r = np.linalg.norm(xyz, axis=-1)
    theta = np.arccos(np.clip(xyz[..., 2] / np.where(r == 0, 1.0, r), -1, 1))
    phi = np.arctan2(xyz[..., 1], xyz[..., 0])
    return theta, phi


def real_sph_harm(l, m, xyz):
    """S^m_l evaluated at unit vectors xyz (shape (..., 3)).

    Normalized so that the S^m_l are orthonormal for the measure d(Omega)
    (total mass 4 pi).
    """
    theta, phi = _theta_phi(xyz)
    if m == 0:
        return sph_harm_y(l, 0, theta, phi).real
    mu = abs(m)
    yp = sph_harm_y(l, mu, theta, phi)
    ym = sph_harm_y(l, -mu, theta, phi)
    if m > 0:
        return ((ym + (-1) ** mu * yp) / math.sqrt(2)).real
    return ((1j * (ym - (-1) ** mu * yp)) / math.sqrt(2)).real


def real_sph_harm_row(l, xyz):
    """All S^m_l for m = -l..l, stacked along the last axis."""
    return np.stack([real_sph_harm(l, m, xyz) for m in range(-l, l + 1)], axis=-1)


@functools.lru_cache(maxsize=None)
def complex_to_real_matrix(l):
    """W with S^m_l = sum_k W[m, k] Y^k_l (rows/cols indexed -l..l)."""
    n = 2 * l + 1
    W = np.zeros((n, n), dtype=complex)
    W[l, l] = 1.0
    for mu in range(1, l + 1):
        W[l + mu, l - mu] = 1 / math.sqrt(2)
        W[l + mu, l + mu] = (-1) ** mu / math.sqrt(2)
        W[l - mu, l - mu] = 1j / math.sqrt(2)
        W[l - mu, l + mu] = -1j * (-1) ** mu / math.sqrt(2)
    return W


# ---------------------------------------------------------------------------
# Sphere quadrature (Gauss-Legendre x uniform azimuth)
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=32)
def sphere_quadrature(n_theta, n_phi):
    """Nodes (N, 3) and weights (N,) with sum(w) = 4 pi; exact for spherical
    polynomials of degree <= min(2 n_theta - 1, n_phi - 1)."""
    x, wx = np.polynomial.legendre.leggauss(n_theta)
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    ct = x[:, None]
    st = np.sqrt(1 - ct ** 2)
    nodes = np.stack(np.broadcast_arrays(st * np.cos(phi)[None, :],
                                         st * np.sin(phi)[None, :],
                                         ct * np.ones((1, n_phi))), axis=-1)
    w = (wx[:, None] * (2 * np.pi / n_phi) * np.ones((1, n_phi)))
    return nodes.reshape(-1, 3), w.reshape(-1)


_LMAX_ROT = 8


@functools.lru_cache(maxsize=None)
def _harm_table(l, n_theta, n_phi):
    nodes, w = sphere_quadrature(n_theta, n_phi)
    return nodes, w, real_sph_harm_row(l, nodes)


def rotation_matrix(l, g):
    """U^l(g) in the real basis: (rho(g) S^{m'})(x) = S^{m'}(g^-1 x)
    = sum_m U[m, m'] S^m(x).  Orthogonal for g in O(3)."""
    g = np.asarray(g, dtype=float)
    key = np.ascontiguousarray(g).tobytes()
    return _rotation_cached(l, key).copy()


@functools.lru_cache(maxsize=65536)
def _rotation_cached(l, gkey):
    g = np.frombuffer(gkey, dtype=float).reshape(3, 3)
    n_theta = l + 2
    n_phi = 2 * l + 2
    nodes, w, table = _harm_table(l, n_theta, n_phi)
    rotated = real_sph_harm_row(l, nodes @ g)  # S(g^-1 x) at x = nodes
    return np.einsum("q,qm,qn->mn", w, table, rotated)


# ---------------------------------------------------------------------------
# Exact Clebsch-Gordan coefficients (integer angular momenta)
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=None)
def _fact(n):
    return math.factorial(n)


@functools.lru_cache(maxsize=None)
def clebsch_gordan(j1, m1, j2, m2, j, m):
    """<j1 m1 j2 m2 | j m> by Racah's formula, evaluated exactly."""
    if m1 + m2 != m or abs(m1) > j1 or abs(m2) > j2 or abs(m) > j:
        return 0.0
    if not (abs(j1 - j2) <= j <= j1 + j2):
        return 0.0
    pref = Fraction(2 * j + 1) \
        * Fraction(_fact(j1 + j2 - j) * _fact(j1 - j2 + j) * _fact(-j1 + j2 + j),
                   _fact(j1 + j2 + j + 1)) \
        * Fraction(_fact(j + m) * _fact(j - m) * _fact(j1 - m1) * _fact(j1 + m1)
                   * _fact(j2 - m2) * _fact(j2 + m2))
    total = Fraction(0)
    kmin = max(0, j2 - j - m1, j1 - j + m2)
    kmax = min(j1 + j2 - j, j1 - m1, j2 + m2)
    for k in range(kmin, kmax + 1):
        den = (_fact(k) * _fact(j1 + j2 - j - k) * _fact(j1 - m1 - k)
               * _fact(j2 + m2 - k) * _fact(j - j2 + m1 + k) * _fact(j - j1 - m2 + k))
        total += Fraction((-1) ** k, den)
    val = float(total) * math.sqrt(float(pref))
    return val


# ---------------------------------------------------------------------------
# Real-basis (Godunov-Gordienko style) coupling coefficients
# ---------------------------------------------------------------------------

class TriangleError(ValueError):
    """l outside |l1 - l2| .. l1 + l2."""


@functools.lru_cache(maxsize=None)
def gg_coefficients(l, l1, l2):
    """Coupling table g[m, m1, m2] with
    h^{m1}_{l1} (x) h^{m2}_{l2} = sum_{l, m} g[m, m1, m2] h^m_l.

    Real by construction; the overall sign per (l, l1, l2) makes the first
    nonzero entry in (m, m1, m2)-lexicographic order positive.
    """
    if not abs(l1 - l2) <= l <= l1 + l2:
        raise TriangleError(f"need |{l1}-{l2}| <= {l} <= {l1}+{l2}")
    W = complex_to_real_matrix(l).conj()
    W1 = complex_to_real_matrix(l1)
    W2 = complex_to_real_matrix(l2)
    out = np.zeros((2 * l + 1, 2 * l1 + 1, 2 * l2 + 1), dtype=complex)
    for k1 in range(-l1, l1 + 1):
        col1 = W1[:, l1 + k1]
        for k2 in range(-l2, l2 + 1):
            k = k1 + k2
            if abs(k) > l:
                continue
            c = clebsch_gordan(l1, k1, l2, k2, l, k)
            if c == 0.0:
                continue
            out += c * np.einsum("m,a,b->mab", W[:, l + k], col1, W2[:, l2 + k2])
    re = float(np.max(np.abs(out.real)))
    im = float(np.max(np.abs(out.imag)))
    if re >= im:
        if im > 1e-12 * max(re, 1.0):
            raise RuntimeError("coupling table is neither purely real nor imaginary")
        table = out.real.copy()
    else:
        if re > 1e-12 * max(im, 1.0):
            raise RuntimeError("coupling table is neither purely real nor imaginary")
        table = out.imag.copy()
    flat = table.ravel()
    nz = np.nonzero(np.abs(flat) > 1e-12)[0]
    if nz.size and flat[nz[0]] < 0:
        table = -table
    table.flags.writeable = False
    return table


def gg_block_matrix(l1, l2):
    """Stacked orthogonal matrix from (l1 x l2)-product basis to the sum of
    h^m_l bases over l = |l1-l2| .. l1+l2; rows ordered by increasing l."""
    rows = []
    for l in range(abs(l1 - l2), l1 + l2 + 1):
        rows.append(gg_coefficients(l, l1, l2).reshape(2 * l + 1, -1))
    return np.vstack(rows)
