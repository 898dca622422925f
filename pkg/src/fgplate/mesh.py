"""Structured quadrilateral meshes and boundary-condition DOF sets."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DOFS_PER_NODE = 5
U, V, W, PHI_X, PHI_Y = range(DOFS_PER_NODE)

BOUNDARY_CODES = ("CCCC", "SSSS", "CFCF", "SFSF", "CSCS", "CFFF")


@dataclass(frozen=True)
class Mesh:
    a: float
    nx: int
    ny: int
    nodes: np.ndarray  # (n_nodes, 2)
    elements: np.ndarray  # (n_elements, 4), counter-clockwise

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_dofs(self) -> int:
        return DOFS_PER_NODE * self.n_nodes

    def element_dofs(self) -> np.ndarray:
        """(n_elements, 20) global DOF indexes, node-major."""
        base = DOFS_PER_NODE * self.elements[:, :, None] + np.arange(DOFS_PER_NODE)
        return base.reshape(len(self.elements), -1)

    def node_at(self, x: float, y: float) -> int:
        d = np.hypot(self.nodes[:, 0] - x, self.nodes[:, 1] - y)
        return int(np.argmin(d))


def build_mesh(a: float, nx: int, ny: int | None = None) -> Mesh:
    ny = nx if ny is None else ny
    if nx < 1 or ny < 1:
        raise ValueError("element counts must be >= 1")
    if not a > 0:
        raise ValueError("edge length must be positive")
    i = np.arange((nx + 1) * (ny + 1))
    nodes = np.column_stack([a * (i % (nx + 1)) / nx, a * (i // (nx + 1)) / ny])
    ex, ey = np.meshgrid(np.arange(nx), np.arange(ny))
    n0 = (ey * (nx + 1) + ex).ravel()
    elements = np.column_stack([n0, n0 + 1, n0 + nx + 2, n0 + nx + 1])
    nodes.flags.writeable = False
    elements.flags.writeable = False
    return Mesh(float(a), nx, ny, nodes, elements)


# DOFs fixed by each support type, keyed on the edge orientation
# ("x" = an edge x = const). S restrains the normal in-plane displacement,
# the deflection and the rotation about the edge normal.
_FIXED = {
    ("C", "x"): (U, V, W, PHI_X, PHI_Y),
    ("C", "y"): (U, V, W, PHI_X, PHI_Y),
    ("S", "x"): (U, W, PHI_Y),
    ("S", "y"): (V, W, PHI_X),
    ("F", "x"): (),
    ("F", "y"): (),
}
_TANGENTIAL = {"x": V, "y": U}


def validate_boundary(code: str) -> str:
    code = code.strip().upper()
    if len(code) != 4 or any(c not in "CSF" for c in code):
        raise ValueError(f"boundary code must be 4 characters over C/S/F, got {code!r}")
    if code not in BOUNDARY_CODES:
        raise ValueError(f"unsupported boundary code {code!r}; expected one of {BOUNDARY_CODES}")
    return code


def constrained_dofs(mesh: Mesh, code: str) -> np.ndarray:
    """Sorted global DOF indexes fixed by ``code``.

    Edge order is (x=0, y=0, x=a, y=a). Corner nodes collect the union of
    the constraints of both edges they sit on.
    """
    code = validate_boundary(code)
    x, y = mesh.nodes[:, 0], mesh.nodes[:, 1]
    tol = 1e-9 * mesh.a
    edges = (
        (np.abs(x) < tol, "x"),
        (np.abs(y) < tol, "y"),
        (np.abs(x - mesh.a) < tol, "x"),
        (np.abs(y - mesh.a) < tol, "y"),
    )
    fixed = set()
    for c, (on_edge, orient) in zip(code, edges):
        local = _FIXED[(c, orient)]
        for node in np.flatnonzero(on_edge):
            fixed.update(DOFS_PER_NODE * int(node) + d for d in local)
    # Opposite S edges with the other pair free (SFSF) leave the in-plane
    # translation along the S edges unrestrained; pin it at their corners.
    for first, second, orient in ((0, 2, "x"), (1, 3, "y")):
        others = [i for i in range(4) if i not in (first, second)]
        if "C" in (code[first], code[second]) or any(code[i] != "F" for i in others):
            continue
        corners = np.zeros(mesh.n_nodes, dtype=bool)
        for i in (first, second):
            if code[i] == "S":
                on_edge = edges[i][0]
                corners |= on_edge & (edges[others[0]][0] | edges[others[1]][0])
        d = _TANGENTIAL[orient]
        fixed.update(DOFS_PER_NODE * int(node) + d for node in np.flatnonzero(corners))
    return np.array(sorted(fixed), dtype=int)
