"""Truncated sound-hard scattering with a first-order absorbing boundary.

Total-field formulation on the meshed truncation box: find complex u with

    int sigma grad u . grad v - k^2 int q u v - i k oint u v
        = oint (d u^i/d nu - i k u^i) v         for all P1 v,

so the sound-hard condition on the cracks is natural (duplicated DOFs,
no constraint) and the boundary term absorbs outgoing waves to first
order. The truncation bias is not certified; stability experiments
compare solutions with identical truncation so it cancels to first
order.
"""
from __future__ import annotations

import numpy as np

from ..errors import BadTruncation
from .assemble import P1Space, outer_boundary_mass, outer_boundary_quadrature
from .fields import FeField, ScatterConfig
from .linsolve import direct_complex


def solve_scattering(mesh, config: ScatterConfig, space=None):
    """Returns (total field u, scattered field u_s) on the truncated mesh."""
    if abs(mesh.box_radius - config.s_trunc) > 1e-9:
        raise BadTruncation(
            f"mesh box radius {mesh.box_radius} != truncation radius {config.s_trunc}"
        )
    space = space or P1Space(mesh)
    k = config.wavenumber

    sigma, q = config.coeff.sample(space.centroids)
    _, q_qp = config.coeff.sample(space.qpoints.reshape(-1, 2))
    K = space.stiffness(sigma=sigma)
    M = space.mass(qp_weight=q_qp.reshape(space.qpoints.shape[:2]))
    quad = outer_boundary_quadrature(mesh, n_gauss=3)
    B = outer_boundary_mass(mesh, mesh.n_dofs, quad)
    A = (K - k * k * M).astype(complex) - 1j * k * B

    rhs = np.zeros(mesh.n_dofs, dtype=complex)
    qp = quad["qp"]
    n_e = qp.shape[0]
    normals = np.repeat(quad["normals"][:, None, :], qp.shape[1], axis=1).reshape(-1, 2)
    flat = qp.reshape(-1, 2)
    g = config.incident_normal_derivative(flat, normals) - 1j * k * config.incident(flat)
    g = g.reshape(n_e, -1)
    t, w = quad["t"], quad["w"]
    phi = np.stack([1 - t, t])
    contrib = np.einsum("eq,q,iq,e->ei", g, w, phi, quad["lengths"])
    np.add.at(rhs, quad["dof_a"], contrib[:, 0])
    np.add.at(rhs, quad["dof_b"], contrib[:, 1])

    u = direct_complex(A, rhs)
    coords = mesh.vertices[mesh.dof_vertex]
    ui = config.incident(coords)
    return FeField(mesh, u), FeField(mesh, u - ui)
