"""Point-wise material description of a two-phase graded plate.

Ceramic content follows a separable power law in x, y and z; elastic
constants are homogenised with the Mori-Tanaka scheme and density with a
linear mixture. Every function here is vectorised over numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

GPA = 1.0e9


@dataclass(frozen=True)
class ConstituentMaterial:
    name: str
    young_modulus: float  # Pa
    poisson_ratio: float
    density: float  # kg/m^3

    def __post_init__(self):
        if not self.young_modulus > 0:
            raise ValueError(f"{self.name}: young_modulus must be positive")
        if not 0 < self.poisson_ratio < 0.5:
            raise ValueError(f"{self.name}: poisson_ratio must lie in (0, 0.5)")
        if not self.density > 0:
            raise ValueError(f"{self.name}: density must be positive")

    @property
    def bulk_modulus(self) -> float:
        return self.young_modulus / (3.0 * (1.0 - 2.0 * self.poisson_ratio))

    @property
    def shear_modulus(self) -> float:
        return self.young_modulus / (2.0 * (1.0 + self.poisson_ratio))

    def flexural_rigidity(self, h: float) -> float:
        """E h^3 / (12 (1 - nu^2)) of a homogeneous plate of this material."""
        return self.young_modulus * h**3 / (12.0 * (1.0 - self.poisson_ratio**2))


# Moduli are taken as GPa.
MATERIALS = {
    "Si3N4": ConstituentMaterial("Si3N4", 348.43 * GPA, 0.24, 2370.0),
    "Al2O3": ConstituentMaterial("Al2O3", 380.0 * GPA, 0.3, 3800.0),
    "ZrO2": ConstituentMaterial("ZrO2", 151.0 * GPA, 0.3, 3000.0),
    "SUS304": ConstituentMaterial("SUS304", 201.04 * GPA, 0.3262, 8166.0),
    "Al": ConstituentMaterial("Al", 70.0 * GPA, 0.32, 2702.0),
}


def get_material(name: str) -> ConstituentMaterial:
    try:
        return MATERIALS[name]
    except KeyError:
        raise KeyError(f"unknown material {name!r}; known: {sorted(MATERIALS)}") from None


@dataclass(frozen=True)
class Gradation:
    kx: float = 0.0
    ky: float = 0.0
    kz: float = 0.0

    def __post_init__(self):
        for name in ("kx", "ky", "kz"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value >= 0):
                raise ValueError(f"gradation index {name} must be finite and >= 0, got {value}")


class ThicknessKind(Enum):
    UNIFORM = 1
    NON_UNIFORM_LINEAR = 2
    NON_UNIFORM_NONLINEAR = 3


@dataclass(frozen=True)
class ThicknessProfile:
    h0: float
    kind: ThicknessKind = ThicknessKind.UNIFORM

    def __post_init__(self):
        if not self.h0 > 0:
            raise ValueError("h0 must be positive")
        object.__setattr__(self, "kind", ThicknessKind(self.kind))


@dataclass
class PointProperties:
    young_modulus: np.ndarray
    poisson_ratio: np.ndarray
    density: np.ndarray


class Mixing(Enum):
    MORI_TANAKA = "mori-tanaka"
    RULE_OF_MIXTURE = "rule-of-mixture"


def _power(base, k):
    # 0**0 == 1 in numpy, so a zero index switches a direction off
    return np.power(base, k)


def ceramic_volume_fraction(x, y, z, a, h, g: Gradation):
    """Ceramic volume fraction (x/a)^kx (y/a)^ky (1/2 + z/h)^kz."""
    x, y, z, h = (np.asarray(v, dtype=float) for v in (x, y, z, h))
    zeta = 0.5 + z / h
    tol = 1e-12
    if np.any(zeta < -tol) or np.any(zeta > 1 + tol):
        raise ValueError("z lies outside [-h/2, h/2]")
    zeta = np.clip(zeta, 0.0, 1.0)
    xr = np.clip(x / a, 0.0, 1.0)
    yr = np.clip(y / a, 0.0, 1.0)
    return _power(xr, g.kx) * _power(yr, g.ky) * _power(zeta, g.kz)


def thickness(x, y, a, p: ThicknessProfile):
    """Local thickness h0 * lambda in normalised coordinates x/a, y/a."""
    xh = np.asarray(x, dtype=float) / a
    yh = np.asarray(y, dtype=float) / a
    if p.kind is ThicknessKind.UNIFORM:
        lam = np.ones(np.broadcast(xh, yh).shape)
    elif p.kind is ThicknessKind.NON_UNIFORM_LINEAR:
        lam = np.broadcast_to(1.0 + xh, np.broadcast(xh, yh).shape)
    else:
        lam = 1.0 + (xh - 0.5) ** 2 + (yh - 0.5) ** 2
    return p.h0 * lam


def mori_tanaka(vc, ceramic: ConstituentMaterial, metal: ConstituentMaterial):
    """Effective (bulk, shear) moduli for ceramic volume fraction ``vc``."""
    vc = np.asarray(vc, dtype=float)
    vm = 1.0 - vc
    kc, km = ceramic.bulk_modulus, metal.bulk_modulus
    gc, gm = ceramic.shear_modulus, metal.shear_modulus
    f1 = gm * (9.0 * km + 8.0 * gm) / (6.0 * (km + 2.0 * gm))
    k_f = vc * (kc - km) / (1.0 + vm * (kc - km) / (km + 4.0 / 3.0 * gm)) + km
    mu_f = vc * (gc - gm) / (1.0 + vm * (gc - gm) / (gm + f1)) + gm
    return k_f, mu_f


def properties_from_fraction(vc, ceramic, metal, mixing=Mixing.MORI_TANAKA) -> PointProperties:
    vc = np.asarray(vc, dtype=float)
    rho = ceramic.density * vc + metal.density * (1.0 - vc)
    if Mixing(mixing) is Mixing.RULE_OF_MIXTURE:
        e = ceramic.young_modulus * vc + metal.young_modulus * (1.0 - vc)
        nu = ceramic.poisson_ratio * vc + metal.poisson_ratio * (1.0 - vc)
    else:
        k_f, mu_f = mori_tanaka(vc, ceramic, metal)
        e = 9.0 * k_f * mu_f / (3.0 * k_f + mu_f)
        nu = (3.0 * k_f - 2.0 * mu_f) / (2.0 * (3.0 * k_f + mu_f))
    return PointProperties(e, nu, rho)


def effective_properties(x, y, z, a, profile: ThicknessProfile, g: Gradation,
                         ceramic, metal, mixing=Mixing.MORI_TANAKA) -> PointProperties:
    h = thickness(x, y, a, profile)
    vc = ceramic_volume_fraction(x, y, z, a, h, g)
    return properties_from_fraction(vc, ceramic, metal, mixing)
