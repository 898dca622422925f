"""Problem description shared by the element, solver and surrogate layers."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .material import (
    ConstituentMaterial,
    Gradation,
    Mixing,
    ThicknessKind,
    ThicknessProfile,
    get_material,
)
from .mesh import validate_boundary

SHEAR_CORRECTION = np.pi**2 / 12.0


class Problem(Enum):
    BENDING = "bending"
    FREE_VIBRATION = "free-vibration"
    UNI_BUCKLING = "uni-buckling"
    BI_BUCKLING = "bi-buckling"


class LoadKind(Enum):
    UNIFORM = "uniform"
    SINUSOIDAL = "sinusoidal"


@dataclass(frozen=True)
class InPlaneForceState:
    """Uniform compressive pre-buckling resultants (positive = compression)."""

    nxx0: float = 1.0
    nyy0: float = 0.0
    nxy0: float = 0.0

    def __post_init__(self):
        if self.nxx0 == 0 and self.nyy0 == 0 and self.nxy0 == 0:
            raise ValueError("at least one in-plane resultant must be nonzero")

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.nxx0, self.nxy0], [self.nxy0, self.nyy0]])


UNIAXIAL = InPlaneForceState(1.0, 0.0, 0.0)
BIAXIAL = InPlaneForceState(1.0, 1.0, 0.0)


@dataclass(frozen=True)
class PlateCase:
    """Square graded plate: geometry, materials, supports, foundation, load."""

    a: float = 1.0
    h0: float = 0.1
    thickness_kind: ThicknessKind = ThicknessKind.UNIFORM
    gradation: Gradation = field(default_factory=Gradation)
    ceramic: ConstituentMaterial = field(default_factory=lambda: get_material("Si3N4"))
    metal: ConstituentMaterial = field(default_factory=lambda: get_material("SUS304"))
    mixing: Mixing = Mixing.MORI_TANAKA
    bc: str = "SSSS"
    problem: Problem = Problem.BENDING
    kw_bar: float = 0.0
    kw_si: float = 0.0  # dimensional Winkler modulus, N/m^3, added to the kw_bar part
    load: LoadKind = LoadKind.SINUSOIDAL
    q0: float = 1.0

    def __post_init__(self):
        if not self.a > 0 or not self.h0 > 0:
            raise ValueError("a and h0 must be positive")
        if self.kw_bar < 0 or self.kw_si < 0:
            raise ValueError("Winkler moduli must be >= 0")
        object.__setattr__(self, "bc", validate_boundary(self.bc))
        object.__setattr__(self, "thickness_kind", ThicknessKind(self.thickness_kind))
        object.__setattr__(self, "problem", Problem(self.problem))
        object.__setattr__(self, "load", LoadKind(self.load))
        object.__setattr__(self, "mixing", Mixing(self.mixing))

    @classmethod
    def from_ratio(cls, a_over_h0: float, a: float = 1.0, **kwargs) -> "PlateCase":
        return cls(a=a, h0=a / a_over_h0, **kwargs)

    @property
    def a_over_h0(self) -> float:
        return self.a / self.h0

    @property
    def profile(self) -> ThicknessProfile:
        return ThicknessProfile(self.h0, self.thickness_kind)

    @property
    def d_c(self) -> float:
        return self.ceramic.flexural_rigidity(self.h0)

    @property
    def kw(self) -> float:
        """Physical Winkler modulus (N/m^3): kw_si plus kw_bar D11 / a^4."""
        if self.kw_bar == 0:
            return self.kw_si
        from .element import reference_bending_stiffness

        return self.kw_si + self.kw_bar * reference_bending_stiffness(self) / self.a**4

    @property
    def force_state(self) -> InPlaneForceState:
        if self.problem is Problem.BI_BUCKLING:
            return BIAXIAL
        return UNIAXIAL

    def with_(self, **changes) -> "PlateCase":
        return replace(self, **changes)
