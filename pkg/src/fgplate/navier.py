"""Navier double-series solutions for a homogeneous simply supported FSDT plate.

Used as an independent reference for the finite-element path: each
(m, n) harmonic reduces the plate equations to a 3 x 3 system in the
amplitudes of w, phi_x and phi_y.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .case import SHEAR_CORRECTION


def _operator(m, n, a, b, d, nu, shear, kw):
    al, be = m * np.pi / a, n * np.pi / b
    return al, be, np.array([
        [shear * (al**2 + be**2) + kw, shear * al, shear * be],
        [shear * al, d * al**2 + 0.5 * d * (1 - nu) * be**2 + shear, 0.5 * d * (1 + nu) * al * be],
        [shear * be, 0.5 * d * (1 + nu) * al * be, d * be**2 + 0.5 * d * (1 - nu) * al**2 + shear],
    ])


def _rigidities(e, nu, h, scf):
    d = e * h**3 / (12 * (1 - nu**2))
    shear = scf * e / (2 * (1 + nu)) * h
    return d, shear


def centre_deflection(e, nu, h, a, q0=1.0, load="sinusoidal", kw=0.0, terms=99,
                      scf=SHEAR_CORRECTION, b=None):
    """Deflection at (a/2, b/2) under a sinusoidal or uniform transverse load."""
    b = a if b is None else b
    d, shear = _rigidities(e, nu, h, scf)
    if load == "sinusoidal":
        harmonics = [(1, 1, q0)]
    elif load == "uniform":
        odd = range(1, 2 * terms, 2)
        harmonics = [(m, n, 16 * q0 / (np.pi**2 * m * n)) for m in odd for n in odd]
    else:
        raise ValueError(f"unknown load {load!r}")
    w = 0.0
    for m, n, qmn in harmonics:
        _, _, op = _operator(m, n, a, b, d, nu, shear, kw)
        amp = np.linalg.solve(op, [qmn, 0.0, 0.0])[0]
        w += amp * np.sin(m * np.pi / 2) * np.sin(n * np.pi / 2)
    return float(w)


def fundamental_frequency(e, nu, rho, h, a, kw=0.0, modes=4, scf=SHEAR_CORRECTION, b=None):
    """Lowest angular frequency including rotary inertia."""
    b = a if b is None else b
    d, shear = _rigidities(e, nu, h, scf)
    mass = np.diag([rho * h, rho * h**3 / 12, rho * h**3 / 12])
    best = np.inf
    for m in range(1, modes + 1):
        for n in range(1, modes + 1):
            _, _, op = _operator(m, n, a, b, d, nu, shear, kw)
            lam = scipy.linalg.eigh(op, mass, eigvals_only=True)[0]
            best = min(best, np.sqrt(lam))
    return float(best)


def critical_load(e, nu, h, a, nxx=1.0, nyy=0.0, kw=0.0, modes=6, scf=SHEAR_CORRECTION, b=None):
    """Smallest load factor for uniform compressive resultants (nxx, nyy)."""
    b = a if b is None else b
    d, shear = _rigidities(e, nu, h, scf)
    best = np.inf
    for m in range(1, modes + 1):
        for n in range(1, modes + 1):
            al, be, op = _operator(m, n, a, b, d, nu, shear, kw)
            # condense the rotations onto w
            k_ww = op[0, 0] - op[0, 1:] @ np.linalg.solve(op[1:, 1:], op[1:, 0])
            g = nxx * al**2 + nyy * be**2
            if g > 0:
                best = min(best, k_ww / g)
    return float(best)
