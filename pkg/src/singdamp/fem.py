"""P1 Galerkin assembly on structured interval and rectangle meshes.

Builds the three symmetric operators of the damped wave system: the mass
matrix, the Dirichlet stiffness matrix, and the damping Gram matrix
``D_ij = sum_k w_k phi_i(p_k) phi_j(p_k)`` obtained by pairing basis
functions against a measure's atoms.  Dirichlet conditions are imposed by
eliminating boundary vertices, so atoms sitting exactly on the boundary
contribute nothing -- consistent with the zero trace of the energy space.

Rectangle cells are split into two triangles with alternating diagonal
directions (checkerboard), which keeps the triangulation symmetric under
the reflections of the box; mirror-antisymmetric eigenvectors then vanish
exactly on the symmetry lines.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (
    AtomOutsideDomain,
    DegenerateDomain,
    NoInteriorDofs,
    SolverFailure,
)
from .measures import AtomSet

__all__ = [
    "Mesh",
    "OperatorTriple",
    "build_mesh",
    "basis_matrix",
    "assemble",
    "dirichlet_eigs",
    "multiplier_bound_probe",
    "export_coo",
]

_DENSE_CAP = 2000


# ---------------------------------------------------------------------------
# meshes
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Mesh:
    """Uniform P1 mesh with Dirichlet boundary elimination.

    ``dof_of_vertex`` maps a vertex index to its interior dof index, or
    -1 on the boundary; interior dofs are numbered contiguously in vertex
    order.
    """

    dimension: int
    vertices: np.ndarray        # (nv, dim)
    elements: np.ndarray        # (ne, dim+1) vertex indices
    boundary_flags: np.ndarray  # (nv,) bool
    dof_of_vertex: np.ndarray   # (nv,) int
    domain: tuple
    n: int

    @property
    def ndof(self) -> int:
        return int((self.dof_of_vertex >= 0).sum())

    @property
    def interior_vertices(self) -> np.ndarray:
        return np.nonzero(self.dof_of_vertex >= 0)[0]


def _domain_tuple(domain) -> tuple:
    if isinstance(domain, dict):
        kind = domain["kind"]
        if kind == "interval":
            return ("interval", float(domain["a"]), float(domain["b"]))
        if kind == "rectangle":
            return ("rectangle", float(domain["ax"]), float(domain["bx"]),
                    float(domain["ay"]), float(domain["by"]))
        raise ValueError(f"unknown domain kind: {kind!r}")
    t = tuple(domain)
    if t[0] not in ("interval", "rectangle"):
        raise ValueError(f"unknown domain kind: {t[0]!r}")
    return (t[0],) + tuple(float(x) for x in t[1:])


def build_mesh(domain, n: int) -> Mesh:
    """Uniform mesh of an interval or an axis-aligned rectangle.

    ``n`` is the subdivision count per axis: an interval yields ``n``
    segments and ``n - 1`` interior dofs, a rectangle ``2 n^2`` triangles
    and ``(n - 1)^2`` interior dofs.
    """
    dom = _domain_tuple(domain)
    n = int(n)
    if n < 1:
        raise ValueError("n must be a positive integer")

    if dom[0] == "interval":
        _, a, b = dom
        if b <= a:
            raise DegenerateDomain(f"interval ({a}, {b}) is empty")
        if n < 2:
            raise NoInteriorDofs("an interval needs n >= 2 for interior dofs")
        verts = np.linspace(a, b, n + 1)[:, None]
        elems = np.column_stack([np.arange(n), np.arange(1, n + 1)])
        boundary = np.zeros(n + 1, dtype=bool)
        boundary[[0, n]] = True
        dof = np.full(n + 1, -1, dtype=int)
        dof[1:n] = np.arange(n - 1)
        return Mesh(1, verts, elems, boundary, dof, dom, n)

    _, ax, bx, ay, by = dom
    if bx <= ax or by <= ay:
        raise DegenerateDomain(f"rectangle ({ax},{bx})x({ay},{by}) is empty")
    if n < 2:
        raise NoInteriorDofs("a rectangle needs n >= 2 for interior dofs")
    xs = np.linspace(ax, bx, n + 1)
    ys = np.linspace(ay, by, n + 1)
    gx, gy = np.meshgrid(xs, ys, indexing="xy")  # vertex id = iy*(n+1) + ix
    verts = np.column_stack([gx.ravel(), gy.ravel()])

    ix, iy = np.meshgrid(np.arange(n), np.arange(n), indexing="xy")
    ix, iy = ix.ravel(), iy.ravel()
    v00 = iy * (n + 1) + ix
    v10 = v00 + 1
    v01 = v00 + (n + 1)
    v11 = v01 + 1
    even = (ix + iy) % 2 == 0
    lower = np.where(even[:, None],
                     np.column_stack([v00, v10, v11]),
                     np.column_stack([v00, v10, v01]))
    upper = np.where(even[:, None],
                     np.column_stack([v00, v11, v01]),
                     np.column_stack([v10, v11, v01]))
    elems = np.vstack([lower, upper])

    bx_mask = (np.arange(n + 1) == 0) | (np.arange(n + 1) == n)
    boundary = (bx_mask[None, :] | bx_mask[:, None]).ravel()
    dof = np.full((n + 1) ** 2, -1, dtype=int)
    interior = np.nonzero(~boundary)[0]
    dof[interior] = np.arange(interior.size)
    return Mesh(2, verts, elems, boundary, dof, dom, n)


# ---------------------------------------------------------------------------
# basis evaluation at scattered points
# ---------------------------------------------------------------------------

def _locate_outside(mesh: Mesh, pts: np.ndarray) -> np.ndarray:
    dom = mesh.domain
    tol = 1e-12
    if mesh.dimension == 1:
        _, a, b = dom
        scale = b - a
        return (pts[:, 0] < a - tol * scale) | (pts[:, 0] > b + tol * scale)
    _, ax, bx, ay, by = dom
    sx, sy = bx - ax, by - ay
    return ((pts[:, 0] < ax - tol * sx) | (pts[:, 0] > bx + tol * sx) |
            (pts[:, 1] < ay - tol * sy) | (pts[:, 1] > by + tol * sy))


def _snap_to_grid(u: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Collapse cell coordinates that sit within roundoff of a grid line.

    Points meant to lie exactly on a node (or mesh line) must evaluate
    the basis to an exact Kronecker delta there; a one-ulp slip across a
    cell boundary would otherwise leak tiny spurious couplings.
    """
    r = np.round(u)
    snap = np.abs(u - r) <= tol * np.maximum(1.0, np.abs(u))
    return np.where(snap, r, u)


def basis_matrix(mesh: Mesh, points: np.ndarray) -> sp.csr_matrix:
    """Rows of P1 basis values: ``Phi[k, i] = phi_i(p_k)`` over all vertices.

    Points are assumed to lie in the closed domain (clipped to it for the
    purpose of cell lookup).
    """
    pts = np.atleast_2d(np.asarray(points, float))
    npts = pts.shape[0]
    if npts == 0:
        return sp.csr_matrix((0, mesh.vertices.shape[0]))
    n = mesh.n

    if mesh.dimension == 1:
        _, a, b = mesh.domain
        h = (b - a) / n
        u = _snap_to_grid((pts[:, 0] - a) / h)
        cell = np.clip(np.floor(u).astype(int), 0, n - 1)
        xi = np.clip(u - cell, 0.0, 1.0)
        rows = np.repeat(np.arange(npts), 2)
        cols = np.column_stack([cell, cell + 1]).ravel()
        vals = np.column_stack([1.0 - xi, xi]).ravel()
        return sp.csr_matrix((vals, (rows, cols)),
                             shape=(npts, mesh.vertices.shape[0]))

    _, ax, bx, ay, by = mesh.domain
    hx = (bx - ax) / n
    hy = (by - ay) / n
    u = _snap_to_grid((pts[:, 0] - ax) / hx)
    v = _snap_to_grid((pts[:, 1] - ay) / hy)
    cx = np.clip(np.floor(u).astype(int), 0, n - 1)
    cy = np.clip(np.floor(v).astype(int), 0, n - 1)
    xi = np.clip(u - cx, 0.0, 1.0)
    eta = np.clip(v - cy, 0.0, 1.0)
    v00 = cy * (n + 1) + cx
    v10 = v00 + 1
    v01 = v00 + (n + 1)
    v11 = v01 + 1
    even = (cx + cy) % 2 == 0

    cols = np.empty((npts, 3), dtype=int)
    vals = np.empty((npts, 3))
    # checkerboard diagonal: even cells split along (0,0)-(1,1),
    # odd cells along (1,0)-(0,1); barycentric coordinates per half
    m = even & (eta <= xi)
    cols[m] = np.column_stack([v00[m], v10[m], v11[m]])
    vals[m] = np.column_stack([1.0 - xi[m], xi[m] - eta[m], eta[m]])
    m = even & (eta > xi)
    cols[m] = np.column_stack([v00[m], v11[m], v01[m]])
    vals[m] = np.column_stack([1.0 - eta[m], xi[m], eta[m] - xi[m]])
    m = ~even & (xi + eta <= 1.0)
    cols[m] = np.column_stack([v00[m], v10[m], v01[m]])
    vals[m] = np.column_stack([1.0 - xi[m] - eta[m], xi[m], eta[m]])
    m = ~even & (xi + eta > 1.0)
    cols[m] = np.column_stack([v10[m], v11[m], v01[m]])
    vals[m] = np.column_stack([1.0 - eta[m], xi[m] + eta[m] - 1.0, 1.0 - xi[m]])

    rows = np.repeat(np.arange(npts), 3)
    return sp.csr_matrix((vals.ravel(), (rows, cols.ravel())),
                         shape=(npts, mesh.vertices.shape[0]))


# ---------------------------------------------------------------------------
# assembly
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class OperatorTriple:
    """Mass, stiffness, and damping Gram matrices on the interior dofs.

    All three are stored sparse and exactly symmetric; ``B`` and ``K``
    are positive definite, ``D`` is positive semidefinite with rank at
    most the number of atoms.  ``damping_factor`` is the rectangular
    root ``D = F^T F`` with ``F = sqrt(W) Phi`` restricted to interior
    dofs; it gives the probe below an exact reduced form.
    """

    B: sp.csr_matrix
    K: sp.csr_matrix
    D: sp.csr_matrix
    ndof: int
    damping_factor: sp.csr_matrix
    atom_count: int


def _symmetrize(X: sp.spmatrix) -> sp.csr_matrix:
    return ((X + X.T) * 0.5).tocsr()


def _assemble_mass_stiffness(mesh: Mesh):
    if mesh.dimension == 1:
        verts = mesh.vertices[:, 0]
        e = mesh.elements
        h = verts[e[:, 1]] - verts[e[:, 0]]
        ne = e.shape[0]
        me = (h / 6.0)[:, None, None] * np.array([[2.0, 1.0], [1.0, 2.0]])
        ke = (1.0 / h)[:, None, None] * np.array([[1.0, -1.0], [-1.0, 1.0]])
        rows = np.repeat(e, 2, axis=1).reshape(ne, 2, 2)
        cols = np.tile(e, (1, 2)).reshape(ne, 2, 2)
    else:
        e = mesh.elements
        coords = mesh.vertices[e]  # (ne, 3, 2)
        ne = e.shape[0]
        x, y = coords[:, :, 0], coords[:, :, 1]
        # b_i = y_j - y_k, c_i = x_k - x_j with (i, j, k) cyclic
        jj = [1, 2, 0]
        kk = [2, 0, 1]
        bb = y[:, jj] - y[:, kk]
        cc = x[:, kk] - x[:, jj]
        area = 0.5 * np.abs(
            (x[:, 1] - x[:, 0]) * (y[:, 2] - y[:, 0])
            - (x[:, 2] - x[:, 0]) * (y[:, 1] - y[:, 0])
        )
        ke = (np.einsum("ei,ej->eij", bb, bb) + np.einsum("ei,ej->eij", cc, cc))
        ke /= (4.0 * area)[:, None, None]
        me = area[:, None, None] * ((np.ones((3, 3)) + np.eye(3)) / 12.0)
        rows = np.repeat(e, 3, axis=1).reshape(ne, 3, 3)
        cols = np.tile(e, (1, 3)).reshape(ne, 3, 3)

    nv = mesh.vertices.shape[0]
    B = sp.coo_matrix((me.ravel(), (rows.ravel(), cols.ravel())), shape=(nv, nv))
    K = sp.coo_matrix((ke.ravel(), (rows.ravel(), cols.ravel())), shape=(nv, nv))
    return B.tocsr(), K.tocsr()


def assemble(mesh: Mesh, atoms: AtomSet) -> OperatorTriple:
    """Assemble the operator triple for a mesh and an atomized measure.

    Atoms may touch the closed boundary (they then pair only with
    eliminated dofs and drop out); atoms strictly outside the closed
    domain raise :class:`AtomOutsideDomain`.
    """
    if len(atoms) and atoms.dim != mesh.dimension:
        raise AtomOutsideDomain(
            f"{atoms.dim}-dimensional atoms on a {mesh.dimension}-dimensional mesh")
    if len(atoms):
        outside = _locate_outside(mesh, atoms.points)
        if np.any(outside):
            k = int(np.nonzero(outside)[0][0])
            raise AtomOutsideDomain(
                f"atom {k} at {atoms.points[k].tolist()} lies outside the domain")

    B_full, K_full = _assemble_mass_stiffness(mesh)
    idx = mesh.interior_vertices
    B = _symmetrize(B_full[idx][:, idx])
    K = _symmetrize(K_full[idx][:, idx])

    ndof = idx.size
    if len(atoms):
        phi = basis_matrix(mesh, atoms.points)[:, idx]
        # D built from the exact weights; the sqrt factor would round them
        D = _symmetrize(phi.T @ sp.diags(atoms.weights) @ phi)
        factor = (sp.diags(np.sqrt(atoms.weights)) @ phi).tocsr()
    else:
        factor = sp.csr_matrix((0, ndof))
        D = sp.csr_matrix((ndof, ndof))
    return OperatorTriple(B=B, K=K, D=D, ndof=ndof,
                          damping_factor=factor, atom_count=len(atoms))


# ---------------------------------------------------------------------------
# eigenpairs and the multiplier-bound probe
# ---------------------------------------------------------------------------

def dirichlet_eigs(triple: OperatorTriple, count: int):
    """Lowest ``count`` eigenpairs of ``K psi = lambda B psi``.

    Returns ``(lams, Psi)`` with eigenvalues ascending and eigenvectors
    B-orthonormal (columns of ``Psi``).
    """
    if not 1 <= count <= triple.ndof:
        raise ValueError(f"count must lie in [1, {triple.ndof}]")
    try:
        if triple.ndof <= _DENSE_CAP:
            lams, Psi = scipy.linalg.eigh(
                triple.K.toarray(), triple.B.toarray(),
                subset_by_index=[0, count - 1])
        else:
            v0 = np.ones(triple.ndof)
            lams, Psi = spla.eigsh(triple.K, k=count, M=triple.B,
                                   sigma=0.0, which="LM", v0=v0)
            order = np.argsort(lams)
            lams, Psi = lams[order], Psi[:, order]
    except (np.linalg.LinAlgError, spla.ArpackError) as exc:
        raise SolverFailure(f"generalized eigensolver failed: {exc}") from exc
    # enforce exact B-normalization and a deterministic sign
    for j in range(Psi.shape[1]):
        psi = Psi[:, j]
        nrm = float(psi @ (triple.B @ psi))
        psi /= np.sqrt(nrm)
        k = int(np.argmax(np.abs(psi)))
        if psi[k] < 0:
            psi *= -1.0
    return np.asarray(lams, float), Psi


def multiplier_bound_probe(triple: OperatorTriple) -> float:
    """Largest eigenvalue of the pencil ``(D, K)``.

    This is the discrete constant ``C_h = max_f (f^T D f) / (f^T K f)``
    bounding the damping form by the energy form.  Compared across mesh
    refinements it is the computable proxy for the measure's multiplier
    bound: bounded ``C_h`` evidences a bounded continuum constant,
    divergence evidences failure (a point mass in 2D).
    """
    F = triple.damping_factor
    m = F.shape[0]
    if m == 0 or F.nnz == 0:
        return 0.0
    try:
        if m <= max(64, triple.ndof // 8):
            # reduced form: nonzero spectrum of (D, K) equals that of F K^-1 F^T
            rhs = np.asarray(F.T.todense())
            if triple.ndof <= _DENSE_CAP:
                X = scipy.linalg.cho_solve(
                    scipy.linalg.cho_factor(triple.K.toarray()), rhs)
            else:
                X = spla.splu(triple.K.tocsc()).solve(rhs)
            G = np.asarray(F @ X)
            G = 0.5 * (G + G.T)
            return float(scipy.linalg.eigvalsh(G)[-1])
        if triple.ndof <= _DENSE_CAP:
            vals = scipy.linalg.eigh(triple.D.toarray(), triple.K.toarray(),
                                     eigvals_only=True,
                                     subset_by_index=[triple.ndof - 1,
                                                      triple.ndof - 1])
            return float(vals[0])
        v0 = np.ones(triple.ndof)
        vals = spla.eigsh(triple.D, k=1, M=triple.K, which="LA", v0=v0,
                          return_eigenvectors=False)
        return float(vals[0])
    except (np.linalg.LinAlgError, spla.ArpackError, RuntimeError) as exc:
        raise SolverFailure(f"multiplier-bound probe failed: {exc}") from exc


# ---------------------------------------------------------------------------
# export
# ---------------------------------------------------------------------------

def export_coo(triple: OperatorTriple, directory, meta: dict | None = None,
               prefix: str = "") -> list:
    """Write B, K, D in text COO format plus a JSON metadata sidecar.

    Each ``<prefix><name>.coo`` file starts with a ``rows cols nnz``
    header line followed by ``i j value`` entries in row-major order.
    Returns the list of written paths.
    """
    import json
    import os

    os.makedirs(directory, exist_ok=True)
    written = []
    for name, mat in (("B", triple.B), ("K", triple.K), ("D", triple.D)):
        coo = mat.tocoo()
        order = np.lexsort((coo.col, coo.row))
        path = os.path.join(directory, f"{prefix}{name}.coo")
        with open(path, "w") as fh:
            fh.write(f"{coo.shape[0]} {coo.shape[1]} {coo.nnz}\n")
            for i, j, v in zip(coo.row[order], coo.col[order], coo.data[order]):
                fh.write(f"{i} {j} {v!r}\n")
        written.append(path)
    sidecar = {"ndof": triple.ndof, "atom_count": triple.atom_count,
               "nnz": {"B": int(triple.B.nnz), "K": int(triple.K.nnz),
                       "D": int(triple.D.nnz)}}
    if meta:
        sidecar.update(meta)
    path = os.path.join(directory, f"{prefix}operators.json")
    with open(path, "w") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")
    written.append(path)
    return written
