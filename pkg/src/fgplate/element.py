"""MITC4 Mindlin-Reissner plate element with graded, variable-thickness sections.

Nodal DOFs are ordered (u0, v0, w0, phi_x, phi_y). Membrane-bending terms
use the standard bilinear interpolation; transverse shear uses covariant
strains tied at the four edge midpoints (Bathe-Dvorkin). All routines are
batched over elements and in-plane Gauss points.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .case import SHEAR_CORRECTION, InPlaneForceState, LoadKind, PlateCase
from .material import ceramic_volume_fraction, properties_from_fraction, thickness

NODE_XI = np.array([[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]])
Z_GAUSS_ORDER = 16
_MAX_GRADING = 4
_PANEL_RATIO, _PANEL_ORDER, _TOP_PANELS, _PANEL_TOL = 0.25, 12, 3, 1e-14

_g = 1.0 / np.sqrt(3.0)
GAUSS_2X2 = np.array([[-_g, -_g], [_g, -_g], [_g, _g], [-_g, _g]])
GAUSS_2X2_W = np.ones(4)


class ShearScheme(Enum):
    MITC4 = "mitc4"
    DISPLACEMENT = "displacement"


def shape_functions(xi, eta):
    """Bilinear shape functions and their natural derivatives.

    Returns ``N`` with shape (..., 4) and ``dN`` with shape (..., 4, 2),
    where ``dN[..., i, 0] = dN_i/dxi`` and ``dN[..., i, 1] = dN_i/deta``.
    """
    xi = np.asarray(xi, dtype=float)[..., None]
    eta = np.asarray(eta, dtype=float)[..., None]
    sx, sy = NODE_XI[:, 0], NODE_XI[:, 1]
    n = 0.25 * (1 + sx * xi) * (1 + sy * eta)
    dn = np.stack([0.25 * sx * (1 + sy * eta), 0.25 * sy * (1 + sx * xi)], axis=-1)
    return n, dn


@dataclass
class SectionStiffness:
    d_mb: np.ndarray  # (..., 6, 6)
    d_s: np.ndarray  # (..., 2, 2)


@dataclass
class InertiaMoments:
    i0: np.ndarray
    i1: np.ndarray
    i2: np.ndarray


@dataclass
class ElementMatrices:
    ke: np.ndarray
    me: np.ndarray
    kge: np.ndarray
    fe: np.ndarray


def _plane_stress(e, nu):
    q11 = e / (1.0 - nu**2)
    q12 = nu * q11
    q66 = e / (2.0 * (1.0 + nu))
    return q11, q12, q66


def _q_matrix(q11, q12, q66):
    zero = np.zeros_like(q11)
    return np.stack([
        np.stack([q11, q12, zero], -1),
        np.stack([q12, q11, zero], -1),
        np.stack([zero, zero, q66], -1),
    ], -2)


def _grading_power(kz: float) -> int | None:
    """Smallest m <= 4 with m*kz integral, so t**kz is analytic in u = t**(1/m)."""
    for m in range(1, _MAX_GRADING + 1):
        if abs(m * kz - round(m * kz)) < 1e-9 * max(1.0, m * kz):
            return m
    return None


def _graded_panels(kz: float):
    # geometric panels toward t = 0 where t**kz is singular, uniform above
    depth = int(np.ceil(np.log(_PANEL_TOL) / ((1.0 + kz) * np.log(_PANEL_RATIO))))
    edges = np.concatenate([[0.0], _PANEL_RATIO ** np.arange(depth, 0, -1),
                            np.linspace(_PANEL_RATIO, 1.0, _TOP_PANELS + 1)[1:]])
    s, w = np.polynomial.legendre.leggauss(_PANEL_ORDER)
    lo, hi = edges[:-1, None], edges[1:, None]
    return (lo + 0.5 * (hi - lo) * (s + 1.0)).ravel(), (0.5 * (hi - lo) * w).ravel()


def thickness_rule(h, kz: float, order: int = Z_GAUSS_ORDER):
    """Nodes ``z`` and weights on [-h/2, h/2] for integrands in t**kz, t = 1/2 + z/h.

    Integer kz (and kz with a small denominator m) use ``order``-point
    Gauss-Legendre in u = t**(1/m), which is exact up to round-off. Other kz
    fall back to panels graded toward the singular face. Broadcasts over ``h``.
    """
    h = np.asarray(h, dtype=float)[..., None]
    m = _grading_power(kz)
    if m is None:
        t, wt = _graded_panels(kz)
    else:
        s, ws = np.polynomial.legendre.leggauss(order)
        u = 0.5 * (s + 1.0)
        t, wt = u**m, 0.5 * ws * m * u ** (m - 1)
    return h * (t - 0.5), h * wt


def section_stiffness(x, y, case: PlateCase, order: int = Z_GAUSS_ORDER):
    """Through-thickness integrated constitutive blocks at planar points.

    ``A1 = int Q dz``, ``A2 = int z Q dz``, ``A3 = int z^2 Q dz`` over the
    local thickness, shear block scaled by pi^2/12. Returns
    ``(SectionStiffness, InertiaMoments)`` broadcast over ``x, y``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    h = thickness(x, y, case.a, case.profile)
    z, jac = thickness_rule(h, case.gradation.kz, order)
    vc = ceramic_volume_fraction(x[..., None], y[..., None], z, case.a, h[..., None], case.gradation)
    props = properties_from_fraction(vc, case.ceramic, case.metal, case.mixing)
    q11, q12, q66 = _plane_stress(props.young_modulus, props.poisson_ratio)

    def moment(f, p):
        return np.sum(f * z**p * jac, axis=-1)

    q = [q11, q12, q66]
    a1, a2, a3 = (_q_matrix(*(moment(f, p) for f in q)) for p in (0, 1, 2))
    d_mb = np.concatenate([
        np.concatenate([a1, a2], -1),
        np.concatenate([a2, a3], -1),
    ], -2)
    gs = SHEAR_CORRECTION * moment(q66, 0)
    d_s = gs[..., None, None] * np.eye(2)
    rho = props.density
    inertia = InertiaMoments(moment(rho, 0), moment(rho, 1), moment(rho, 2))
    return SectionStiffness(d_mb, d_s), inertia


def reference_bending_stiffness(case: PlateCase) -> float:
    """D11 = int z^2 Q11 dz over the reference thickness h0 at the plate centre."""
    z, w = thickness_rule(case.h0, case.gradation.kz)
    c = 0.5 * case.a
    vc = ceramic_volume_fraction(c, c, z, case.a, case.h0, case.gradation)
    props = properties_from_fraction(vc, case.ceramic, case.metal, case.mixing)
    q11, _, _ = _plane_stress(props.young_modulus, props.poisson_ratio)
    return float(np.sum(q11 * z**2 * w))


def _jacobian(coords, dn_nat):
    # coords (E, 4, 2), dn_nat (G, 4, 2) -> J (E, G, 2, 2), J[i, j] = dx_j / dxi_i
    return np.einsum("gai,eaj->egij", dn_nat, coords)


def _physical_derivatives(coords, dn_nat):
    jac = _jacobian(coords, dn_nat)
    det = jac[..., 0, 0] * jac[..., 1, 1] - jac[..., 0, 1] * jac[..., 1, 0]
    if np.any(det <= 0):
        raise ValueError("non-positive Jacobian determinant")
    inv = np.empty_like(jac)
    inv[..., 0, 0] = jac[..., 1, 1] / det
    inv[..., 1, 1] = jac[..., 0, 0] / det
    inv[..., 0, 1] = -jac[..., 0, 1] / det
    inv[..., 1, 0] = -jac[..., 1, 0] / det
    dn = np.einsum("egij,gaj->egai", inv, dn_nat)
    return jac, det, inv, dn


def membrane_bending_strain_matrix(dn):
    """B^mb (..., 6, 20) from physical derivatives ``dn`` (..., 4, 2)."""
    shape = dn.shape[:-2]
    b = np.zeros(shape + (6, 4, 5))
    nx, ny = dn[..., 0], dn[..., 1]
    b[..., 0, :, 0] = nx
    b[..., 1, :, 1] = ny
    b[..., 2, :, 0] = ny
    b[..., 2, :, 1] = nx
    b[..., 3, :, 3] = nx
    b[..., 4, :, 4] = ny
    b[..., 5, :, 3] = ny
    b[..., 5, :, 4] = nx
    return b.reshape(shape + (6, 20))


def displacement_shear_strain_matrix(n, dn):
    """Plain interpolated B^s (..., 2, 20): rows w,x + phi_x and w,y + phi_y."""
    shape = dn.shape[:-2]
    n = np.broadcast_to(n, shape + (4,))
    b = np.zeros(shape + (2, 4, 5))
    b[..., 0, :, 2] = dn[..., 0]
    b[..., 0, :, 3] = n
    b[..., 1, :, 2] = dn[..., 1]
    b[..., 1, :, 4] = n
    return b.reshape(shape + (2, 20))


# Tying points: gamma_xi at eta = -1 (C) and eta = +1 (A);
# gamma_eta at xi = -1 (B) and xi = +1 (D).
_TYING = {"A": (0.0, 1.0), "C": (0.0, -1.0), "B": (-1.0, 0.0), "D": (1.0, 0.0)}


def _covariant_shear_row(coords, xi, eta, direction):
    """Row of the covariant shear strain e_dir = w,dir + x,dir phi_x + y,dir phi_y.

    ``coords`` (E, 4, 2); returns (E, 20).
    """
    n, dn = shape_functions(xi, eta)
    dxd = np.einsum("a,eaj->ej", dn[:, direction], coords)  # (E, 2)
    row = np.zeros((coords.shape[0], 4, 5))
    row[:, :, 2] = dn[:, direction]
    row[:, :, 3] = dxd[:, 0:1] * n
    row[:, :, 4] = dxd[:, 1:2] * n
    return row.reshape(-1, 20)


def mitc_shear_strain_matrix(coords, points, inv_jac=None):
    """Assumed-strain B^s (E, G, 2, 20) at natural ``points`` (G, 2)."""
    coords = np.asarray(coords, dtype=float)
    if coords.ndim == 2:
        coords = coords[None]
    points = np.atleast_2d(points)
    if inv_jac is None:
        _, dn_nat = shape_functions(points[:, 0], points[:, 1])
        _, _, inv_jac, _ = _physical_derivatives(coords, dn_nat)
    e_a = _covariant_shear_row(coords, *_TYING["A"], 0)
    e_c = _covariant_shear_row(coords, *_TYING["C"], 0)
    e_b = _covariant_shear_row(coords, *_TYING["B"], 1)
    e_d = _covariant_shear_row(coords, *_TYING["D"], 1)
    xi = points[:, 0][None, :, None]
    eta = points[:, 1][None, :, None]
    g_xi = 0.5 * (1 + eta) * e_a[:, None] + 0.5 * (1 - eta) * e_c[:, None]
    g_eta = 0.5 * (1 + xi) * e_d[:, None] + 0.5 * (1 - xi) * e_b[:, None]
    covariant = np.stack([g_xi, g_eta], axis=-2)  # (E, G, 2, 20)
    return np.einsum("egij,egjk->egik", inv_jac, covariant)


def _mass_density(inertia: InertiaMoments):
    i0, i1, i2 = inertia.i0, inertia.i1, inertia.i2
    m = np.zeros(i0.shape + (5, 5))
    m[..., 0, 0] = m[..., 1, 1] = m[..., 2, 2] = i0
    m[..., 0, 3] = m[..., 3, 0] = i1
    m[..., 1, 4] = m[..., 4, 1] = i1
    m[..., 3, 3] = m[..., 4, 4] = i2
    return m


def load_intensity(x, y, case: PlateCase):
    if case.load is LoadKind.UNIFORM:
        return case.q0 * np.ones_like(x)
    return case.q0 * np.sin(np.pi * x / case.a) * np.sin(np.pi * y / case.a)


def element_matrices_batch(coords, case: PlateCase, force_state: InPlaneForceState | None = None,
                           shear: ShearScheme = ShearScheme.MITC4, gauss_order: int = 2):
    """Stiffness, mass, geometric stiffness and load for a batch of elements.

    ``coords`` has shape (E, 4, 2). Section properties are evaluated at every
    in-plane Gauss point, so thickness and gradation vary inside elements.
    """
    coords = np.asarray(coords, dtype=float)
    if coords.ndim == 2:
        coords = coords[None]
    shear = ShearScheme(shear)
    force_state = force_state or case.force_state
    if gauss_order == 2:
        pts, wts = GAUSS_2X2, GAUSS_2X2_W
    else:
        t, w = np.polynomial.legendre.leggauss(gauss_order)
        pts = np.array([[a, b] for b in t for a in t])
        wts = np.array([wa * wb for wb in w for wa in w])
    n, dn_nat = shape_functions(pts[:, 0], pts[:, 1])  # (G, 4), (G, 4, 2)
    _, det, inv, dn = _physical_derivatives(coords, dn_nat)
    dv = det * wts  # (E, G)

    xg = np.einsum("ga,ea->eg", n, coords[..., 0])
    yg = np.einsum("ga,ea->eg", n, coords[..., 1])
    sect, inertia = section_stiffness(xg, yg, case)

    b_mb = membrane_bending_strain_matrix(dn)
    if shear is ShearScheme.MITC4:
        b_s = mitc_shear_strain_matrix(coords, pts, inv)
    else:
        b_s = displacement_shear_strain_matrix(n[None], dn)

    ke = np.einsum("egki,egkl,eglj,eg->eij", b_mb, sect.d_mb, b_mb, dv, optimize=True)
    ke += np.einsum("egki,egkl,eglj,eg->eij", b_s, sect.d_s, b_s, dv, optimize=True)

    nn = np.einsum("ga,gb->gab", n, n)  # (G, 4, 4)
    w_idx = np.arange(4) * 5 + 2
    kw = case.kw
    if kw:
        ke[:, w_idx[:, None], w_idx] += kw * np.einsum("gab,eg->eab", nn, dv)

    m5 = _mass_density(inertia)  # (E, G, 5, 5)
    me = np.einsum("gab,egij,eg->eaibj", nn, m5, dv).reshape(-1, 20, 20)

    n0 = force_state.matrix
    kgw = np.einsum("egai,ij,egbj,eg->eab", dn, n0, dn, dv)
    kge = np.zeros_like(ke)
    kge[:, w_idx[:, None], w_idx] = kgw

    q = load_intensity(xg, yg, case)
    fe = np.zeros((coords.shape[0], 20))
    fe[:, w_idx] = np.einsum("ga,eg,eg->ea", n, q, dv)
    return ElementMatrices(ke, me, kge, fe)


def element_matrices(coords, case: PlateCase, gauss_order: int = 2, **kwargs) -> ElementMatrices:
    """Matrices of a single element with (4, 2) nodal coordinates."""
    em = element_matrices_batch(np.asarray(coords)[None], case, gauss_order=gauss_order, **kwargs)
    return ElementMatrices(em.ke[0], em.me[0], em.kge[0], em.fe[0])
