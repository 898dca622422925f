"""Global assembly, boundary reduction and the static / eigen solves."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .case import InPlaneForceState, PlateCase, Problem
from .element import ShearScheme, element_matrices_batch
from .mesh import DOFS_PER_NODE, W, Mesh, build_mesh, constrained_dofs

log = logging.getLogger(__name__)

# below this many free DOFs a dense LAPACK solve is cheaper than ARPACK
DENSE_LIMIT = 600
EIGEN_RESIDUAL_TOL = 1e-8


class SolverError(RuntimeError):
    """Numerical failure: singular system, no positive eigenvalue, bad residual."""


@dataclass
class GlobalSystem:
    mesh: Mesh
    case: PlateCase
    k: sp.csr_matrix
    m: sp.csr_matrix
    kg: sp.csr_matrix
    f: np.ndarray
    free: np.ndarray  # reduced -> full DOF map
    fixed: np.ndarray

    @property
    def n_free(self) -> int:
        return len(self.free)

    def expand(self, q_free: np.ndarray) -> np.ndarray:
        q = np.zeros((self.mesh.n_dofs,) + q_free.shape[1:])
        q[self.free] = q_free
        return q


@dataclass
class AnalysisResult:
    kind: Problem
    raw: np.ndarray | list  # displacement vector, or list of (eigenvalue, full mode vector)
    value: float  # centre deflection, angular frequency or critical load
    nondimensional: float
    residual: float = 0.0
    mesh: tuple = (0, 0)
    eigenvalues: np.ndarray = field(default_factory=lambda: np.empty(0))


def _scatter(mesh: Mesh, blocks: np.ndarray) -> sp.csr_matrix:
    dofs = mesh.element_dofs()
    rows = np.repeat(dofs, 20, axis=1).ravel()
    cols = np.tile(dofs, (1, 20)).ravel()
    n = mesh.n_dofs
    return sp.coo_matrix((blocks.ravel(), (rows, cols)), shape=(n, n)).tocsr()


def assemble(mesh: Mesh, case: PlateCase, force_state: InPlaneForceState | None = None,
             shear: ShearScheme = ShearScheme.MITC4, order: np.ndarray | None = None) -> GlobalSystem:
    """Scatter-add element contributions and split off constrained DOFs.

    ``order`` optionally permutes the element loop (summation is commutative).
    """
    if abs(mesh.a - case.a) > 1e-12 * case.a:
        raise ValueError("mesh edge length does not match the case")
    coords = mesh.nodes[mesh.elements]
    em = element_matrices_batch(coords, case, force_state=force_state, shear=shear)
    for name in ("ke", "me", "kge", "fe"):
        if not np.all(np.isfinite(getattr(em, name))):
            raise SolverError(f"non-finite entries in element {name}")
    if order is not None:
        sub = Mesh(mesh.a, mesh.nx, mesh.ny, mesh.nodes, mesh.elements[order])
        em.ke, em.me, em.kge, em.fe = em.ke[order], em.me[order], em.kge[order], em.fe[order]
    else:
        sub = mesh
    k = _scatter(sub, em.ke)
    m = _scatter(sub, em.me)
    kg = _scatter(sub, em.kge)
    f = np.zeros(mesh.n_dofs)
    np.add.at(f, sub.element_dofs().ravel(), em.fe.ravel())

    fixed = constrained_dofs(mesh, case.bc)
    free = np.setdiff1d(np.arange(mesh.n_dofs), fixed)
    k, m, kg = (mat[free][:, free].tocsr() for mat in (k, m, kg))
    return GlobalSystem(mesh, case, k, m, kg, f[free], free, fixed)


def _centre_w(system: GlobalSystem, q_full: np.ndarray) -> float:
    mesh = system.mesh
    node = mesh.node_at(0.5 * mesh.a, 0.5 * mesh.a)
    if np.hypot(*(mesh.nodes[node] - 0.5 * mesh.a)) > 1e-9 * mesh.a:
        log.warning("no node at the plate centre; using the nearest one")
    return float(q_full[DOFS_PER_NODE * node + W])


def solve_bending(system: GlobalSystem, convention: str = "ceramic") -> AnalysisResult:
    case = system.case
    if system.n_free == 0:
        q = np.zeros(system.mesh.n_dofs)
        return AnalysisResult(Problem.BENDING, q, 0.0, 0.0, 0.0, (system.mesh.nx, system.mesh.ny))
    try:
        lu = spla.splu(system.k.tocsc())
    except RuntimeError as exc:
        raise SolverError(f"singular stiffness matrix ({exc}); the plate is under-constrained") from exc
    q_free = lu.solve(system.f)
    if not np.all(np.isfinite(q_free)):
        raise SolverError("non-finite displacement; the plate is under-constrained")
    res = np.linalg.norm(system.k @ q_free - system.f) / max(np.linalg.norm(system.f), 1e-300)
    q = system.expand(q_free)
    wc = _centre_w(system, q)
    nd = nondimensionalize(wc, case, convention, kind=Problem.BENDING)
    return AnalysisResult(Problem.BENDING, q, wc, nd, float(res), (system.mesh.nx, system.mesh.ny))


def _generalized_eigs(a: sp.csr_matrix, b: sp.csr_matrix, n_modes: int):
    """Largest mu of b x = mu a x, i.e. the smallest lam = 1/mu of a x = lam b x.

    ``a`` must be symmetric positive definite; ``b`` only symmetric, which
    covers the singular mass-like Kg of buckling.
    """
    n = a.shape[0]
    if n <= DENSE_LIMIT or n_modes >= n - 1:
        return scipy.linalg.eigh(b.toarray(), a.toarray())
    k = min(n - 2, max(2 * n_modes, n_modes + 6))
    lu = spla.splu(a.tocsc())
    a_inv = spla.LinearOperator(a.shape, matvec=lu.solve, dtype=float)
    # fixed start vector keeps labels bit-reproducible
    v0 = np.random.default_rng(0).standard_normal(n)
    return spla.eigsh(b, k=k, M=a, Minv=a_inv, which="LA", tol=1e-13, maxiter=50000, v0=v0)


def _positive_modes(system, a, b, n_modes, label):
    if system.n_free == 0:
        raise SolverError("empty reduced system: every DOF is constrained")
    mu, vec = _generalized_eigs(a, b, n_modes)
    keep = mu > 1e-12 * np.max(np.abs(mu))
    if not np.any(keep):
        raise SolverError(f"no positive {label} eigenvalue; check the load sign convention")
    lam = 1.0 / mu[keep]
    vec = vec[:, keep]
    order = np.argsort(lam)[:n_modes]
    lam, vec = lam[order], vec[:, order]
    res = []
    for i in range(len(lam)):
        ax = a @ vec[:, i]
        res.append(np.linalg.norm(ax - lam[i] * (b @ vec[:, i])) / np.linalg.norm(ax))
    res = float(max(res))
    if res > EIGEN_RESIDUAL_TOL:
        raise SolverError(f"{label} eigen-solution did not converge (residual {res:.2e})")
    return lam, vec, res


def solve_frequencies(system: GlobalSystem, n_modes: int = 1, convention: str = "ceramic") -> AnalysisResult:
    """Smallest angular frequencies of (K - omega^2 M) q = 0."""
    lam, vec, res = _positive_modes(system, system.k, system.m, n_modes, "frequency")
    omega = np.sqrt(lam)
    modes = [(float(l), system.expand(vec[:, i])) for i, l in enumerate(lam)]
    nd = nondimensionalize(omega[0], system.case, convention, kind=Problem.FREE_VIBRATION)
    return AnalysisResult(Problem.FREE_VIBRATION, modes, float(omega[0]), nd, res,
                          (system.mesh.nx, system.mesh.ny), eigenvalues=lam)


def solve_buckling(system: GlobalSystem, n_modes: int = 1, convention: str = "ceramic") -> AnalysisResult:
    """Smallest positive critical load factor of (K - lambda Kg) q = 0.

    Kg is built from compressive-positive resultants, so lambda > 0.
    """
    lam, vec, res = _positive_modes(system, system.k, system.kg, n_modes, "buckling")
    modes = [(float(l), system.expand(vec[:, i])) for i, l in enumerate(lam)]
    kind = system.case.problem if system.case.problem in (Problem.UNI_BUCKLING, Problem.BI_BUCKLING) \
        else Problem.UNI_BUCKLING
    nd = nondimensionalize(lam[0], system.case, convention, kind=kind)
    return AnalysisResult(kind, modes, float(lam[0]), nd, res, (system.mesh.nx, system.mesh.ny),
                          eigenvalues=lam)


CONVENTIONS = ("ceramic", "uniform-metal-deflection", "metal-frequency")


def nondimensionalize(raw: float, case: PlateCase, convention: str = "ceramic",
                      kind: Problem | None = None) -> float:
    """Scale-free form of a centre deflection, frequency or critical load.

    ``ceramic``: w E_c h0^2 / (a^3 q0), omega (a/pi)^2 sqrt(rho_c h0 / D_c),
    P a^2 / (pi^2 D_c). ``uniform-metal-deflection``: 100 w E_m h0^3 /
    (12 a^4 q0 (1 - nu_m^2)). ``metal-frequency``: omega h0 sqrt(rho_m / E_m).
    Deflections are reported as magnitudes.
    """
    kind = Problem(kind or case.problem)
    a, h0 = case.a, case.h0
    c, m = case.ceramic, case.metal
    if convention == "ceramic":
        if kind is Problem.BENDING:
            return float(abs(raw) * c.young_modulus * h0**2 / (a**3 * abs(case.q0)))
        if kind is Problem.FREE_VIBRATION:
            return float(raw * (a / np.pi) ** 2 * np.sqrt(c.density * h0 / case.d_c))
        return float(raw * a**2 / (np.pi**2 * case.d_c))
    if convention == "uniform-metal-deflection":
        if kind is not Problem.BENDING:
            raise ValueError("uniform-metal-deflection applies to bending only")
        return float(100.0 * abs(raw) * m.young_modulus * h0**3
                     / (12.0 * a**4 * abs(case.q0) * (1 - m.poisson_ratio**2)))
    if convention == "metal-frequency":
        if kind is not Problem.FREE_VIBRATION:
            raise ValueError("metal-frequency applies to free vibration only")
        return float(raw * h0 * np.sqrt(m.density / m.young_modulus))
    raise ValueError(f"unknown convention {convention!r}; expected one of {CONVENTIONS}")


def analyze(case: PlateCase, n: int = 32, convention: str = "ceramic", n_modes: int = 1,
            shear: ShearScheme = ShearScheme.MITC4) -> AnalysisResult:
    """Build, assemble and solve the case on an n x n mesh."""
    mesh = build_mesh(case.a, n, n)
    if case.problem is Problem.BENDING:
        return solve_bending(assemble(mesh, case, shear=shear), convention)
    if case.problem is Problem.FREE_VIBRATION:
        return solve_frequencies(assemble(mesh, case, shear=shear), n_modes, convention)
    system = assemble(mesh, case, force_state=case.force_state, shear=shear)
    return solve_buckling(system, n_modes, convention)
