import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fgplate.case import BIAXIAL, LoadKind, PlateCase, Problem
from fgplate.element import (
    ShearScheme,
    displacement_shear_strain_matrix,
    element_matrices,
    element_matrices_batch,
    membrane_bending_strain_matrix,
    mitc_shear_strain_matrix,
    reference_bending_stiffness,
    section_stiffness,
    shape_functions,
    thickness_rule,
)
from fgplate.material import Gradation, ThicknessKind
from fgplate.mesh import build_mesh

SQUARE = np.array([[0.0, 0.0], [0.25, 0.0], [0.25, 0.25], [0.0, 0.25]])
SKEWED = np.array([[0.1, 0.05], [0.42, 0.0], [0.5, 0.37], [0.03, 0.3]])
W_DOFS = np.arange(4) * 5 + 2


def nodal_field(coords, u=None, v=None, w=None, px=None, py=None):
    q = np.zeros((4, 5))
    for k, f in enumerate((u, v, w, px, py)):
        if f is not None:
            q[:, k] = [f(x, y) for x, y in coords]
    return q.ravel()


def _rel_asym(m):
    return np.abs(m - m.T).max() / np.abs(m).max()


def test_shape_functions_centre_and_node():
    n, _ = shape_functions(0.0, 0.0)
    assert np.allclose(n, 0.25)
    n, _ = shape_functions(-1.0, -1.0)
    assert np.allclose(n, [1, 0, 0, 0])


@settings(max_examples=50, deadline=None)
@given(xi=st.floats(-1, 1), eta=st.floats(-1, 1))
def test_partition_of_unity(xi, eta):
    n, dn = shape_functions(xi, eta)
    assert n.sum() == pytest.approx(1.0, abs=1e-14)
    assert np.allclose(dn.sum(axis=-2), 0.0, atol=1e-14)


def test_homogeneous_section_matches_plate_rigidity():
    case = PlateCase(h0=0.1)
    sect, _ = section_stiffness(0.5, 0.5, case)
    d_c = case.ceramic.flexural_rigidity(0.1)
    assert sect.d_mb[3, 3] == pytest.approx(d_c, rel=1e-13)
    assert np.abs(sect.d_mb[:3, 3:]).max() < 1e-9 * d_c


def test_graded_section_couples_membrane_and_bending():
    sect, _ = section_stiffness(0.5, 0.5, PlateCase(gradation=Gradation(0, 0, 1)))
    assert abs(sect.d_mb[0, 3]) > 0


@pytest.mark.parametrize("kz", [0.5, 1.0, 2.0, 6.0, 0.37, 2.3])
def test_thickness_rule_integrates_powers(kz):
    # int_0^1 t^kz (t - 1/2)^2 dt in closed form
    z, w = thickness_rule(1.0, kz)
    t = z + 0.5
    exact = 1 / (kz + 3) - 1 / (kz + 2) + 0.25 / (kz + 1)
    assert np.sum(t**kz * z**2 * w) == pytest.approx(exact, rel=1e-12)


def test_reference_bending_stiffness_homogeneous():
    case = PlateCase(h0=0.05)
    e, nu = case.ceramic.young_modulus, case.ceramic.poisson_ratio
    assert reference_bending_stiffness(case) == pytest.approx(e * 0.05**3 / (12 * (1 - nu**2)), rel=1e-13)


def _dn(coords, xi, eta):
    _, dn_nat = shape_functions(xi, eta)
    jac = dn_nat.T @ coords
    return dn_nat @ np.linalg.inv(jac).T


def test_membrane_rigid_translation_zero_strain():
    q = nodal_field(SKEWED, u=lambda x, y: 1.0)
    b = membrane_bending_strain_matrix(_dn(SKEWED, 0.3, -0.2))
    assert np.allclose(b @ q, 0.0)
    assert np.allclose(b @ np.zeros(20), 0.0)


@pytest.mark.parametrize("xi, eta", [(-0.57, -0.57), (0.57, 0.1), (0.0, 0.0)])
def test_constant_curvature(xi, eta):
    c = 0.8
    q = nodal_field(SQUARE, px=lambda x, y: c * x)
    eps = membrane_bending_strain_matrix(_dn(SQUARE, xi, eta)) @ q
    assert eps[3] == pytest.approx(c)
    assert np.allclose(np.delete(eps, 3), 0.0)


@pytest.mark.parametrize("coords", [SQUARE, SKEWED])
def test_kirchhoff_field_has_no_shear(coords):
    alpha, beta = 0.3, -0.7
    q = nodal_field(coords, w=lambda x, y: alpha * x + beta * y,
                    px=lambda x, y: -alpha, py=lambda x, y: -beta)
    pts = np.array([[-0.5, 0.2], [0.9, -0.9], [0.0, 0.0]])
    assert np.allclose(mitc_shear_strain_matrix(coords, pts)[0] @ q, 0.0, atol=1e-13)
    for xi, eta in pts:
        n, _ = shape_functions(xi, eta)
        b = displacement_shear_strain_matrix(n, _dn(coords, xi, eta))
        assert np.allclose(b @ q, 0.0, atol=1e-13)


def test_mitc_matches_displacement_shear_at_square_centre():
    n, _ = shape_functions(0.0, 0.0)
    plain = displacement_shear_strain_matrix(n, _dn(SQUARE, 0.0, 0.0))
    mitc = mitc_shear_strain_matrix(SQUARE, np.array([[0.0, 0.0]]))[0, 0]
    assert np.allclose(mitc, plain, atol=1e-13)


@pytest.mark.parametrize("coords", [SQUARE, SKEWED])
@pytest.mark.parametrize("kind", list(ThicknessKind))
def test_element_matrix_symmetry(coords, kind):
    case = PlateCase(thickness_kind=kind, gradation=Gradation(1, 2, 3), kw_bar=50.0)
    em = element_matrices(coords, case, force_state=BIAXIAL)
    for m in (em.ke, em.me, em.kge):
        assert _rel_asym(m) < 1e-12
    assert np.linalg.eigvalsh(em.me).min() > -1e-12 * np.abs(em.me).max()


@pytest.mark.parametrize("coords", [SQUARE, SKEWED])
def test_free_element_has_only_rigid_body_nullspace(coords):
    ke = element_matrices(coords, PlateCase(gradation=Gradation(0, 0, 2))).ke
    ev = np.linalg.eigvalsh(ke)
    scale = ev.max()
    assert ev.min() > -1e-10 * scale
    assert np.sum(ev < 1e-9 * scale) == 6


def test_rigid_translation_in_kernel():
    ke = element_matrices(SKEWED, PlateCase(gradation=Gradation(1, 1, 1))).ke
    for field in ("u", "w"):
        q = nodal_field(SKEWED, **{field: lambda x, y: 1.0})
        assert np.abs(ke @ q).max() < 1e-8 * np.abs(ke).max()


def test_winkler_only_touches_deflection_dofs():
    base = element_matrices(SKEWED, PlateCase()).ke
    spring = element_matrices(SKEWED, PlateCase(kw_bar=100.0)).ke
    diff = spring - base
    mask = np.zeros((20, 20), dtype=bool)
    mask[np.ix_(W_DOFS, W_DOFS)] = True
    assert np.all(diff[~mask] == 0.0)
    assert np.all(np.diag(diff)[W_DOFS] > 0)


def test_uniform_load_resultant():
    case = PlateCase(load=LoadKind.UNIFORM, q0=3.0)
    fe = element_matrices(SKEWED, case).fe
    p = SKEWED
    area = 0.5 * abs(np.dot(p[:, 0], np.roll(p[:, 1], -1)) - np.dot(p[:, 1], np.roll(p[:, 0], -1)))
    assert fe[W_DOFS].sum() == pytest.approx(3.0 * area, rel=1e-13)
    assert np.all(np.delete(fe, W_DOFS) == 0.0)


def test_sinusoidal_load_resultant_converges():
    case = PlateCase(load=LoadKind.SINUSOIDAL)
    exact = 4.0 / np.pi**2
    errors = []
    for n in (4, 8, 16):
        mesh = build_mesh(1.0, n)
        fe = element_matrices_batch(mesh.nodes[mesh.elements], case).fe
        errors.append(abs(fe.sum() - exact) / exact)
    assert errors[0] > errors[1] > errors[2]
    assert errors[2] < 1e-3


def test_geometric_stiffness_only_on_deflection():
    kge = element_matrices(SQUARE, PlateCase(problem=Problem.UNI_BUCKLING)).kge
    mask = np.zeros((20, 20), dtype=bool)
    mask[np.ix_(W_DOFS, W_DOFS)] = True
    assert np.all(kge[~mask] == 0.0)
    assert np.linalg.eigvalsh(kge[np.ix_(W_DOFS, W_DOFS)]).min() > -1e-14


def test_displacement_scheme_is_stiffer():
    case = PlateCase.from_ratio(1000.0)
    ke_mitc = element_matrices(SQUARE, case).ke
    ke_disp = element_matrices(SQUARE, case, shear=ShearScheme.DISPLACEMENT).ke
    # pure bending about the element centre: parasitic shear only without tying
    q = nodal_field(SQUARE, px=lambda x, y: x - 0.125)
    assert q @ ke_disp @ q > 10 * (q @ ke_mitc @ q)


def test_non_positive_jacobian_rejected():
    flipped = SQUARE[::-1]
    with pytest.raises(ValueError):
        element_matrices(flipped, PlateCase())
