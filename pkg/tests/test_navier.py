"""Self-checks of the series oracle against classical thin-plate closed forms."""

import numpy as np
import pytest

from fgplate import navier
from fgplate.case import LoadKind, PlateCase
from fgplate.solver import analyze

E, NU, RHO, A = 348.43e9, 0.24, 2370.0, 1.0


def rigidity(h):
    return E * h**3 / (12 * (1 - NU**2))


def test_thin_sinusoidal_deflection():
    h = 1e-3
    w = navier.centre_deflection(E, NU, h, A)
    assert w == pytest.approx(A**4 / (4 * np.pi**4 * rigidity(h)), rel=1e-5)


def test_thin_uniform_load_coefficient():
    h = 1e-3
    w = navier.centre_deflection(E, NU, h, A, load="uniform", terms=199)
    assert w * rigidity(h) / A**4 == pytest.approx(0.00406235, rel=1e-4)


def test_winkler_sinusoidal_closed_form():
    h, kw = 1e-3, 2e5
    d = rigidity(h)
    w = navier.centre_deflection(E, NU, h, A, kw=kw)
    assert w == pytest.approx(1.0 / (4 * np.pi**4 * d / A**4 + kw), rel=1e-5)


def test_thin_fundamental_frequency():
    h = 1e-4  # rotary inertia shifts omega by O(h^2)
    omega = navier.fundamental_frequency(E, NU, RHO, h, A)
    classical = 2 * np.pi**2 / A**2 * np.sqrt(rigidity(h) / (RHO * h))
    assert omega == pytest.approx(classical, rel=1e-5)


@pytest.mark.parametrize("nyy, factor", [(0.0, 4.0), (1.0, 2.0)])
def test_thin_critical_loads(nyy, factor):
    h = 1e-3
    p = navier.critical_load(E, NU, h, A, 1.0, nyy)
    assert p * A**2 / (np.pi**2 * rigidity(h)) == pytest.approx(factor, rel=1e-5)


def test_shear_deformation_softens_thick_plates():
    thin = navier.critical_load(E, NU, 0.01, A) / rigidity(0.01)
    thick = navier.critical_load(E, NU, 0.1, A) / rigidity(0.1)
    assert thick < thin


@pytest.mark.parametrize("ratio", [10.0, 100.0])
def test_fem_converges_to_series(ratio):
    case = PlateCase.from_ratio(ratio)
    ref = navier.centre_deflection(E, NU, case.h0, A)
    errs = [abs(analyze(case, n=n).value - ref) / ref for n in (4, 8, 16)]
    assert errs[0] > errs[1] > errs[2]


def test_fem_uniform_load_matches_series():
    case = PlateCase.from_ratio(20.0, load=LoadKind.UNIFORM)
    ref = navier.centre_deflection(E, NU, case.h0, A, load="uniform", terms=199)
    assert analyze(case, n=16).value == pytest.approx(ref, rel=5e-3)
