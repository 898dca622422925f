"""Plain ``key = value`` case files.

Example::

    # Table 9, SSSS uniaxial, a/h0 = 10
    problem = uni-buckling
    bc = SSSS
    a_over_h0 = 10
    kz = 0
    mesh = 32
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .case import LoadKind, PlateCase, Problem
from .material import ConstituentMaterial, Gradation, Mixing, ThicknessKind, get_material
from .solver import CONVENTIONS


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


THICKNESS_ALIASES = {
    "1": ThicknessKind.UNIFORM, "uniform": ThicknessKind.UNIFORM,
    "2": ThicknessKind.NON_UNIFORM_LINEAR, "linear": ThicknessKind.NON_UNIFORM_LINEAR,
    "non-uniform-linear": ThicknessKind.NON_UNIFORM_LINEAR,
    "3": ThicknessKind.NON_UNIFORM_NONLINEAR, "nonlinear": ThicknessKind.NON_UNIFORM_NONLINEAR,
    "non-uniform-nonlinear": ThicknessKind.NON_UNIFORM_NONLINEAR,
}

KNOWN_KEYS = {
    "problem", "bc", "a", "h0", "a_over_h0", "thickness", "kx", "ky", "kz", "kw_bar", "kw",
    "ceramic", "metal", "mixing", "load", "q0", "mesh", "nx", "ny", "convention", "modes",
    *(f"{p}_{q}" for p in ("ceramic", "metal") for q in ("E", "nu", "rho")),
}
BENDING_ONLY = {"load", "q0"}
CONVENTION_PROBLEM = {
    "uniform-metal-deflection": Problem.BENDING,
    "metal-frequency": Problem.FREE_VIBRATION,
}


@dataclass(frozen=True)
class CaseConfig:
    case: PlateCase
    nx: int = 32
    ny: int = 32
    convention: str = "ceramic"
    modes: int = 1


def parse_text(text: str) -> dict[str, str]:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KNOWN_KEYS:
            raise ConfigError(key, "unknown key")
        if key in values:
            raise ConfigError(key, "given twice")
        values[key] = value
    return values


def _number(values, key, default=None, kind=float):
    if key not in values:
        if default is None:
            raise ConfigError(key, "required key missing")
        return default
    try:
        return kind(values[key])
    except ValueError:
        raise ConfigError(key, f"not a valid {kind.__name__}: {values[key]!r}") from None


def _constituent(values, role, default):
    name = values.get(role, default)
    explicit = [f"{role}_{q}" for q in ("E", "nu", "rho")]
    if name == "custom" or any(k in values for k in explicit):
        try:
            return ConstituentMaterial(
                name if name != default else f"custom-{role}",
                _number(values, f"{role}_E"), _number(values, f"{role}_nu"), _number(values, f"{role}_rho"))
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(role, str(exc)) from None
    try:
        return get_material(name)
    except KeyError as exc:
        raise ConfigError(role, exc.args[0]) from None


def build_config(values: dict[str, str]) -> CaseConfig:
    try:
        problem = Problem(values.get("problem", ""))
    except ValueError:
        raise ConfigError("problem", f"expected one of {[p.value for p in Problem]}") from None
    if problem is not Problem.BENDING:
        for key in BENDING_ONLY & values.keys():
            raise ConfigError(key, "only valid for problem = bending")
    a = _number(values, "a", 1.0)
    if "h0" in values and "a_over_h0" in values:
        raise ConfigError("h0", "give either h0 or a_over_h0, not both")
    h0 = _number(values, "h0") if "h0" in values else a / _number(values, "a_over_h0")
    try:
        thickness = THICKNESS_ALIASES[values.get("thickness", "uniform").lower()]
    except KeyError:
        raise ConfigError("thickness", f"expected one of {sorted(THICKNESS_ALIASES)}") from None
    try:
        load = LoadKind(values.get("load", "sinusoidal"))
    except ValueError:
        raise ConfigError("load", "expected 'uniform' or 'sinusoidal'") from None
    try:
        mixing = Mixing(values.get("mixing", "mori-tanaka"))
    except ValueError:
        raise ConfigError("mixing", "expected 'mori-tanaka' or 'rule-of-mixture'") from None
    mesh = _number(values, "mesh", 32, int)
    nx, ny = _number(values, "nx", mesh, int), _number(values, "ny", mesh, int)
    if nx < 1 or ny < 1:
        raise ConfigError("mesh", "element counts must be >= 1")
    if nx != ny:
        raise ConfigError("ny", "square plates use nx = ny")
    convention = values.get("convention", "ceramic")
    if convention not in CONVENTIONS:
        raise ConfigError("convention", f"expected one of {CONVENTIONS}")
    if convention in CONVENTION_PROBLEM and CONVENTION_PROBLEM[convention] is not problem:
        raise ConfigError("convention", f"{convention} needs problem = {CONVENTION_PROBLEM[convention].value}")
    modes = _number(values, "modes", 1, int)
    if modes < 1:
        raise ConfigError("modes", "must be >= 1")
    try:
        gradation = Gradation(_number(values, "kx", 0.0), _number(values, "ky", 0.0), _number(values, "kz", 0.0))
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError("kx/ky/kz", str(exc)) from None
    try:
        case = PlateCase(
            a=a, h0=h0, thickness_kind=thickness, gradation=gradation,
            ceramic=_constituent(values, "ceramic", "Si3N4"),
            metal=_constituent(values, "metal", "SUS304"),
            mixing=mixing, bc=values.get("bc", "SSSS"), problem=problem,
            kw_bar=_number(values, "kw_bar", 0.0), kw_si=_number(values, "kw", 0.0),
            load=load, q0=_number(values, "q0", 1.0),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError("case", str(exc)) from None
    return CaseConfig(case, nx, ny, convention, modes)


def load_config(path: str | Path) -> CaseConfig:
    return build_config(parse_text(Path(path).read_text(encoding="utf-8")))
