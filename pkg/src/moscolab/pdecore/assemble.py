"""P1 finite-element machinery on crack meshes.

Triangle quadrature is the three-point edge-midpoint rule (exact for
quadratics, and by declaration the definition of every fractional-power
integral at the discrete level). Edge quadrature is Gauss with two or
three points.
"""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp

# P1 values at the three edge midpoints: rows are midpoints of (01), (12), (20)
EDGE_MID = np.array([[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]])

# 3-point Gauss on [0,1] (degree 5)
EDGE_GAUSS3_T = 0.5 + 0.5 * np.array([-np.sqrt(3.0 / 5.0), 0.0, np.sqrt(3.0 / 5.0)])
EDGE_GAUSS3_W = np.array([5.0, 8.0, 5.0]) / 18.0
EDGE_GAUSS2_T = 0.5 + 0.5 * np.array([-1.0, 1.0]) / np.sqrt(3.0)
EDGE_GAUSS2_W = np.array([0.5, 0.5])


class P1Space:
    """Precomputed geometry and scatter/gather operators for one mesh."""

    def __init__(self, mesh):
        self.mesh = mesh
        v, t = mesh.vertices, mesh.triangles
        self.tri_dofs = mesh.tri_dofs
        p0, p1, p2 = v[t[:, 0]], v[t[:, 1]], v[t[:, 2]]
        d1, d2 = p1 - p0, p2 - p0
        det = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
        self.areas = 0.5 * np.abs(det)
        inv_det = 1.0 / det
        # gradients of the three barycentric basis functions, shape (nt, 3, 2)
        gb1 = np.stack([d2[:, 1] * inv_det, -d2[:, 0] * inv_det], axis=1)
        gb2 = np.stack([-d1[:, 1] * inv_det, d1[:, 0] * inv_det], axis=1)
        self.grads = np.stack([-gb1 - gb2, gb1, gb2], axis=1)
        self.qpoints = np.einsum("qk,tkx->tqx", EDGE_MID, np.stack([p0, p1, p2], axis=1))
        self.qweights = self.areas[:, None] / 3.0 * np.ones((1, 3))
        self.centroids = (p0 + p1 + p2) / 3.0
        self.n_dofs = mesh.n_dofs

    # -- evaluation ---------------------------------------------------------

    def local_values(self, u: np.ndarray) -> np.ndarray:
        return u[self.tri_dofs]

    def at_qpoints(self, u: np.ndarray) -> np.ndarray:
        return np.einsum("qk,tk->tq", EDGE_MID, self.local_values(u))

    def gradient(self, u: np.ndarray) -> np.ndarray:
        return np.einsum("tk,tkx->tx", self.local_values(u), self.grads)

    def interpolate(self, fn) -> np.ndarray:
        coords = self.mesh.vertices[self.mesh.dof_vertex]
        return np.asarray(fn(coords[:, 0], coords[:, 1]))

    # -- assembly -------------------------------------------------------------

    def _scatter(self, local: np.ndarray, dtype=None) -> sp.csr_matrix:
        t = self.tri_dofs
        rows = np.repeat(t, 3, axis=1).ravel()
        cols = np.tile(t, (1, 3)).ravel()
        mat = sp.coo_matrix(
            (local.ravel(), (rows, cols)), shape=(self.n_dofs, self.n_dofs), dtype=dtype
        )
        return mat.tocsr()

    def stiffness(self, weight=None, sigma=None) -> sp.csr_matrix:
        """sum_T w_T int_T (sigma grad u) . grad v with per-triangle weights."""
        g = self.grads
        if sigma is not None:
            sg = np.einsum("txy,tky->tkx", sigma, g)
        else:
            sg = g
        local = np.einsum("tkx,tlx->tkl", sg, g) * self.areas[:, None, None]
        if weight is not None:
            local = local * np.asarray(weight)[:, None, None]
        return self._scatter(local)

    def mass(self, qp_weight=None) -> sp.csr_matrix:
        """Edge-midpoint-rule mass matrix, optionally with per-point weights."""
        if qp_weight is None:
            w = self.qweights
        else:
            w = self.qweights * np.asarray(qp_weight)
        local = np.einsum("tq,qk,ql->tkl", w, EDGE_MID, EDGE_MID)
        return self._scatter(local)

    def load(self, source) -> np.ndarray:
        """int f phi_i + int F . grad phi_i via the triangle rule."""
        pts = self.qpoints.reshape(-1, 2)
        fv = source.f_at(pts).reshape(self.qpoints.shape[:2])
        b_local = np.einsum("tq,qk->tk", self.qweights * fv, EDGE_MID)
        Fv = source.F_at(pts).reshape(self.qpoints.shape[0], 3, 2)
        Fmean = np.einsum("tq,tqx->tx", self.qweights, Fv)
        b_local += np.einsum("tx,tkx->tk", Fmean, self.grads)
        b = np.zeros(self.n_dofs)
        np.add.at(b, self.tri_dofs.ravel(), b_local.ravel())
        return b

    def scatter_qp_to_dofs(self, qp_values: np.ndarray) -> np.ndarray:
        """Adjoint of at_qpoints: sum_qp value * phi_i(qp)."""
        local = np.einsum("tq,qk->tk", qp_values, EDGE_MID)
        out = np.zeros(self.n_dofs, dtype=qp_values.dtype)
        np.add.at(out, self.tri_dofs.ravel(), local.ravel())
        return out

    def scatter_grad_to_dofs(self, tri_vectors: np.ndarray) -> np.ndarray:
        """Adjoint of gradient: sum_T area * vec_T . grad phi_i (area folded in by caller)."""
        local = np.einsum("tx,tkx->tk", tri_vectors, self.grads)
        out = np.zeros(self.n_dofs, dtype=tri_vectors.dtype)
        np.add.at(out, self.tri_dofs.ravel(), local.ravel())
        return out

    # -- regions --------------------------------------------------------------

    def triangles_in_disk(self, radius: float, center=(0.0, 0.0)) -> np.ndarray:
        c = np.asarray(center, dtype=float)
        return np.linalg.norm(self.centroids - c, axis=1) <= radius

    def region_mask(self, region) -> np.ndarray:
        if region is None:
            return np.ones(self.areas.shape[0], dtype=bool)
        if isinstance(region, tuple) and region[0] == "disk":
            return self.triangles_in_disk(region[1])
        return np.asarray(region, dtype=bool)


class BoundaryPart:
    """Quadrature data for a set of boundary or crack edges.

    For crack edges both side DOF pairs are kept so traces can take the
    two-sided maximum; one-sided edges replicate the inner trace.
    """

    def __init__(self, mesh, which="all"):
        va, vb, side_a, side_b, kinds = [], [], [], [], []
        if which in ("all", "outer", "solid"):
            for ea, eb, kind in mesh.boundary_edges:
                if which in ("all", kind):
                    dof_a = (mesh.dof_map[ea][0], mesh.dof_map[eb][0])
                    va.append(ea)
                    vb.append(eb)
                    side_a.append(dof_a)
                    side_b.append(dof_a)
                    kinds.append(kind)
        if which in ("all", "cracks"):
            for ce in mesh.crack_edges:
                va.append(ce.vertices[0])
                vb.append(ce.vertices[1])
                side_a.append(ce.side_a)
                side_b.append(ce.side_b)
                kinds.append("crack")
        self.mesh = mesh
        self.va = np.asarray(va, dtype=np.int64)
        self.vb = np.asarray(vb, dtype=np.int64)
        self.side_a = np.asarray(side_a, dtype=np.int64).reshape(-1, 2)
        self.side_b = np.asarray(side_b, dtype=np.int64).reshape(-1, 2)
        self.kinds = kinds
        if len(va):
            pa, pb = mesh.vertices[self.va], mesh.vertices[self.vb]
            self.lengths = np.linalg.norm(pb - pa, axis=1)
            self.pa, self.pb = pa, pb
        else:
            self.lengths = np.zeros(0)
            self.pa = self.pb = np.zeros((0, 2))

    @property
    def n_edges(self) -> int:
        return self.va.shape[0]

    def total_length(self) -> float:
        return float(self.lengths.sum())

    def nodal_trace_plus(self, u: np.ndarray) -> np.ndarray:
        """|u|+ nodewise: max of the side moduli on cracks, |u| elsewhere."""
        ua = np.abs(u[self.side_a])
        ub = np.abs(u[self.side_b])
        return np.maximum(ua, ub)

    def integrate_power(self, nodal: np.ndarray, s: float, n_gauss=3) -> float:
        """int |v|^s over the edges for piecewise-linear nodal data."""
        t = EDGE_GAUSS3_T if n_gauss == 3 else EDGE_GAUSS2_T
        w = EDGE_GAUSS3_W if n_gauss == 3 else EDGE_GAUSS2_W
        vals = nodal[:, [0]] * (1 - t)[None, :] + nodal[:, [1]] * t[None, :]
        return float(np.einsum("eq,q,e->", np.abs(vals) ** s, w, self.lengths))


def outer_boundary_quadrature(mesh, n_gauss=2):
    """Outer-edge Gauss points, weights, outward normals, and P1 hooks."""
    edges = [(a, b) for a, b, kind in mesh.boundary_edges if kind == "outer"]
    va = np.asarray([e[0] for e in edges], dtype=np.int64)
    vb = np.asarray([e[1] for e in edges], dtype=np.int64)
    pa, pb = mesh.vertices[va], mesh.vertices[vb]
    tang = pb - pa
    lengths = np.linalg.norm(tang, axis=1)
    normals = np.column_stack([tang[:, 1], -tang[:, 0]]) / lengths[:, None]
    # orient outward: away from the owning triangle's centroid
    owners = [mesh._edge_tris[tuple(sorted(e))][0] for e in edges]
    centroids = mesh.vertices[mesh.triangles[owners]].mean(axis=1)
    flip = np.einsum("ex,ex->e", normals, centroids - 0.5 * (pa + pb)) > 0
    normals[flip] *= -1.0
    t = EDGE_GAUSS3_T if n_gauss == 3 else EDGE_GAUSS2_T
    w = EDGE_GAUSS3_W if n_gauss == 3 else EDGE_GAUSS2_W
    qp = pa[:, None, :] * (1 - t)[None, :, None] + pb[:, None, :] * t[None, :, None]
    dof_a = np.asarray([mesh.dof_map[v][0] for v in va], dtype=np.int64)
    dof_b = np.asarray([mesh.dof_map[v][0] for v in vb], dtype=np.int64)
    return {
        "dof_a": dof_a,
        "dof_b": dof_b,
        "lengths": lengths,
        "normals": normals,
        "qp": qp,
        "t": t,
        "w": w,
    }


def outer_boundary_mass(mesh, n_dofs, quad=None) -> sp.csr_matrix:
    """Edge mass matrix on the outer boundary (for absorbing terms)."""
    q = quad or outer_boundary_quadrature(mesh)
    t, w, lengths = q["t"], q["w"], q["lengths"]
    phi = np.stack([1 - t, t])  # (2, nq)
    local = np.einsum("q,iq,jq->ij", w, phi, phi)
    n_e = lengths.shape[0]
    rows, cols, vals = [], [], []
    dofs = np.stack([q["dof_a"], q["dof_b"]], axis=1)
    for i in range(2):
        for j in range(2):
            rows.append(dofs[:, i])
            cols.append(dofs[:, j])
            vals.append(local[i, j] * lengths)
    mat = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n_dofs, n_dofs),
    )
    return mat.tocsr()
