"""Discrete norms and two-sided traces on crack meshes.

The triangle rule (edge midpoints) and the 3-point edge Gauss rule are
the definition of every fractional-power integral at the discrete
level; both are exact for the polynomial cases that admit exactness.
"""
from __future__ import annotations

import numpy as np

from ..errors import BadExponent
from .assemble import BoundaryPart, P1Space
from .fields import FeField


def norm(field: FeField, kind: str, p=2.0, s=2.0, region=None, part="all", space=None) -> float:
    """Lp / W1p volume norms and Ls boundary trace norms of a P1 field.

    kind: "Lp" (needs p), "W1p" (needs p), "TraceLs" (needs s and a
    boundary part: "all", "cracks", "outer", "solid"). region restricts
    volume integrals to a triangle mask or ("disk", radius).
    """
    if kind in ("Lp", "W1p") and p < 1:
        raise BadExponent(f"p = {p} below 1")
    if kind == "TraceLs" and s < 1:
        raise BadExponent(f"s = {s} below 1")
    space = space or P1Space(field.mesh)
    u = field.values
    if kind == "Lp":
        return _lp(space, u, p, region)
    if kind == "W1p":
        vol = _lp(space, u, p, region) ** p
        grad = _grad_lp(space, u, p, region) ** p
        return float((vol + grad) ** (1.0 / p))
    if kind == "TraceLs":
        bp = part if isinstance(part, BoundaryPart) else BoundaryPart(field.mesh, part)
        nodal = bp.nodal_trace_plus(u)
        return bp.integrate_power(nodal, s) ** (1.0 / s)
    raise BadExponent(f"unknown norm kind {kind!r}")


def _lp(space, u, p, region=None) -> float:
    mask = space.region_mask(region)
    vals = np.abs(space.at_qpoints(u)[mask])
    return float((space.qweights[mask] * vals**p).sum() ** (1.0 / p))


def _grad_lp(space, u, p, region=None) -> float:
    mask = space.region_mask(region)
    g = space.gradient(u)[mask]
    gmag = np.sqrt(np.einsum("tx,tx->t", g.real, g.real) + np.einsum("tx,tx->t", g.imag, g.imag)) if np.iscomplexobj(g) else np.linalg.norm(g, axis=1)
    return float((space.areas[mask] * gmag**p).sum() ** (1.0 / p))


def grad_norm(field: FeField, p=2.0, region=None, space=None) -> float:
    """Lp norm of the gradient alone."""
    space = space or P1Space(field.mesh)
    return _grad_lp(space, field.values, p, region)


def trace_plus(field: FeField, mesh=None, part="all"):
    """Per-edge piecewise-linear |u|+ on a boundary part.

    On crack edges |u|+ is the nodewise maximum of the two side traces;
    on solid and outer edges the exterior sees zero, so |u|+ is the
    inner trace modulus.
    """
    mesh = mesh or field.mesh
    bp = part if isinstance(part, BoundaryPart) else BoundaryPart(mesh, part)
    nodal = bp.nodal_trace_plus(field.values)
    return [
        {
            "vertices": (int(bp.va[i]), int(bp.vb[i])),
            "kind": bp.kinds[i],
            "values": (float(nodal[i, 0]), float(nodal[i, 1])),
        }
        for i in range(bp.n_edges)
    ]
