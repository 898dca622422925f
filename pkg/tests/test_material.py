import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fgplate.material import (
    MATERIALS,
    ConstituentMaterial,
    Gradation,
    Mixing,
    ThicknessKind,
    ThicknessProfile,
    ceramic_volume_fraction,
    effective_properties,
    get_material,
    mori_tanaka,
    properties_from_fraction,
    thickness,
)

SI3N4 = get_material("Si3N4")
SUS304 = get_material("SUS304")

# scalar evaluation of the Mori-Tanaka bulk/shear expressions, frozen
MT_HALF_BULK = 207315138698.38614
MT_HALF_SHEAR = 102752203122.71367
MT_HALF_E = 264550041415.15347
MT_HALF_NU = 0.28732053121629814

fractions = st.floats(0.0, 1.0)
indexes = st.floats(0.0, 10.0)


def test_registry_holds_known_constituents():
    assert set(MATERIALS) >= {"Si3N4", "SUS304", "Al2O3", "ZrO2", "Al"}
    assert SI3N4.young_modulus == pytest.approx(348.43e9)
    with pytest.raises(KeyError):
        get_material("unobtainium")


@pytest.mark.parametrize("e, nu, rho", [(-1.0, 0.3, 1.0), (1.0, 0.5, 1.0), (1.0, 0.3, 0.0)])
def test_constituent_validation(e, nu, rho):
    with pytest.raises(ValueError):
        ConstituentMaterial("bad", e, nu, rho)


def test_negative_index_rejected():
    with pytest.raises(ValueError):
        Gradation(-0.5, 0.0, 0.0)


def test_volume_fraction_examples():
    a, h = 1.0, 0.1
    assert ceramic_volume_fraction(0.3, 0.7, 0.01, a, h, Gradation()) == 1.0
    assert ceramic_volume_fraction(0.3, 0.7, -h / 2, a, h, Gradation(0, 0, 2)) == 0.0
    assert ceramic_volume_fraction(0.5, 0.5, 0.0, a, h, Gradation(1, 1, 1)) == pytest.approx(0.125, abs=1e-15)


def test_volume_fraction_rejects_points_outside_section():
    with pytest.raises(ValueError):
        ceramic_volume_fraction(0.5, 0.5, 0.06, 1.0, 0.1, Gradation(0, 0, 1))


@settings(max_examples=50, deadline=None)
@given(kx=indexes, ky=indexes, kz=st.floats(0.01, 10.0))
def test_volume_fraction_monotone_in_z(kx, ky, kz):
    z = np.linspace(-0.05, 0.05, 41)
    vc = ceramic_volume_fraction(0.6, 0.8, z, 1.0, 0.1, Gradation(kx, ky, kz))
    assert np.all(np.diff(vc) >= 0)
    assert np.all((vc >= 0) & (vc <= 1))


@settings(max_examples=50, deadline=None)
@given(kx=st.floats(0.01, 10.0), kz=indexes)
def test_volume_fraction_monotone_in_x(kx, kz):
    x = np.linspace(0, 1, 41)
    vc = ceramic_volume_fraction(x, 0.4, 0.02, 1.0, 0.1, Gradation(kx, 0.0, kz))
    assert np.all(np.diff(vc) >= 0)


def test_thickness_profiles():
    h0 = 0.1
    uniform = ThicknessProfile(h0, ThicknessKind.UNIFORM)
    linear = ThicknessProfile(h0, ThicknessKind.NON_UNIFORM_LINEAR)
    curved = ThicknessProfile(h0, ThicknessKind.NON_UNIFORM_NONLINEAR)
    assert thickness(0.37, 0.81, 1.0, uniform) == pytest.approx(h0)
    assert thickness(0.0, 0.3, 1.0, linear) == pytest.approx(h0)
    assert thickness(1.0, 0.3, 1.0, linear) == pytest.approx(2 * h0)
    assert thickness(0.5, 0.5, 1.0, curved) == pytest.approx(h0)
    assert thickness(0.0, 0.0, 1.0, curved) == pytest.approx(1.5 * h0)


def test_mori_tanaka_endpoints_exact():
    k, mu = mori_tanaka(1.0, SI3N4, SUS304)
    assert (k, mu) == (SI3N4.bulk_modulus, SI3N4.shear_modulus)
    k, mu = mori_tanaka(0.0, SI3N4, SUS304)
    assert (k, mu) == (SUS304.bulk_modulus, SUS304.shear_modulus)


def test_mori_tanaka_half_fraction_golden():
    k, mu = mori_tanaka(0.5, SI3N4, SUS304)
    assert k == pytest.approx(MT_HALF_BULK, rel=1e-13)
    assert mu == pytest.approx(MT_HALF_SHEAR, rel=1e-13)
    p = properties_from_fraction(0.5, SI3N4, SUS304)
    assert p.young_modulus == pytest.approx(MT_HALF_E, rel=1e-13)
    assert p.poisson_ratio == pytest.approx(MT_HALF_NU, rel=1e-13)


def test_endpoint_properties_recover_constituents():
    p = properties_from_fraction(1.0, SI3N4, SUS304)
    assert p.young_modulus == pytest.approx(348.43e9, rel=1e-12)
    assert p.poisson_ratio == pytest.approx(0.24, rel=1e-12)
    assert p.density == pytest.approx(2370.0)
    p = properties_from_fraction(0.0, SI3N4, SUS304)
    assert p.young_modulus == pytest.approx(201.04e9, rel=1e-12)
    assert p.poisson_ratio == pytest.approx(0.3262, rel=1e-12)
    assert p.density == pytest.approx(8166.0)
    assert properties_from_fraction(0.5, SI3N4, SUS304).density == pytest.approx(5268.0)


@settings(max_examples=100, deadline=None)
@given(vc=fractions)
def test_mori_tanaka_bounded_by_constituents(vc):
    p = properties_from_fraction(vc, SI3N4, SUS304)
    lo, hi = sorted((SI3N4.young_modulus, SUS304.young_modulus))
    assert lo * (1 - 1e-12) <= p.young_modulus <= hi * (1 + 1e-12)
    lo, hi = sorted((SI3N4.poisson_ratio, SUS304.poisson_ratio))
    assert lo - 1e-12 <= p.poisson_ratio <= hi + 1e-12


@settings(max_examples=50, deadline=None)
@given(vc=st.floats(0.01, 0.99))
def test_mori_tanaka_differs_from_rule_of_mixture(vc):
    mt = properties_from_fraction(vc, SI3N4, SUS304, Mixing.MORI_TANAKA)
    rom = properties_from_fraction(vc, SI3N4, SUS304, Mixing.RULE_OF_MIXTURE)
    assert mt.young_modulus < rom.young_modulus


@settings(max_examples=50, deadline=None)
@given(vc=fractions)
def test_properties_continuous(vc):
    d = 1e-9
    a = properties_from_fraction(vc, SI3N4, SUS304)
    b = properties_from_fraction(min(vc + d, 1.0), SI3N4, SUS304)
    assert abs(a.young_modulus - b.young_modulus) / a.young_modulus < 1e-7
    assert abs(a.poisson_ratio - b.poisson_ratio) < 1e-7


def test_effective_properties_at_faces():
    prof = ThicknessProfile(0.1, ThicknessKind.UNIFORM)
    top = effective_properties(0.5, 0.5, 0.05, 1.0, prof, Gradation(0, 0, 2), SI3N4, SUS304)
    bottom = effective_properties(0.5, 0.5, -0.05, 1.0, prof, Gradation(0, 0, 2), SI3N4, SUS304)
    assert top.young_modulus == pytest.approx(SI3N4.young_modulus)
    assert bottom.young_modulus == pytest.approx(SUS304.young_modulus)
