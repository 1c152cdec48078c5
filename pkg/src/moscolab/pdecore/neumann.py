"""Nonlinear Neumann solver for the p-Laplacian-plus-identity operator.

The discrete problem minimizes

    J(v) = (1/p) int (|grad v|^p + |v|^p) - int (f v + F . grad v)

over the P1 space of a crack mesh, for 1 < p <= 2. Degenerate powers are
regularized by (eps^2 + |.|^2)^((p-2)/2) with eps driven down a fixed
schedule (eps0, eps0/10, ..., floor 1e-8) until the unregularized
weak-form residual meets the tolerance; each stage runs a damped Newton
iteration with Armijo backtracking. The p = 2 path is one SPD solve.
"""
from __future__ import annotations

import numpy as np

from ..errors import BadExponent, NoConvergence
from .assemble import P1Space
from .fields import FeField, SourceData
from .linsolve import pcg

EPS_FLOOR = 1e-8
NEWTON_MAX = 40


def _stage_terms(space, u, p, eps):
    g = space.gradient(u)
    g2 = np.einsum("tx,tx->t", g, g)
    w_grad = (eps * eps + g2) ** ((p - 2) / 2)
    v = space.at_qpoints(u)
    w_mass = (eps * eps + v * v) ** ((p - 2) / 2)
    return g, g2, w_grad, v, w_mass


def _energy(space, u, p, eps, b):
    g = space.gradient(u)
    g2 = np.einsum("tx,tx->t", g, g)
    v = space.at_qpoints(u)
    t1 = float(space.areas @ (eps * eps + g2) ** (p / 2)) / p
    t2 = float((space.qweights * (eps * eps + v * v) ** (p / 2)).sum()) / p
    return t1 + t2 - float(b @ u)


def _residual(space, u, p, eps, b):
    g, g2, w_grad, v, w_mass = _stage_terms(space, u, p, eps)
    r = space.scatter_grad_to_dofs(space.areas[:, None] * w_grad[:, None] * g)
    r += space.scatter_qp_to_dofs(space.qweights * w_mass * v)
    return r - b


def _unregularized_residual(space, u, p, b):
    g = space.gradient(u)
    g2 = np.einsum("tx,tx->t", g, g)
    with np.errstate(divide="ignore", invalid="ignore"):
        w = np.where(g2 > 0, g2 ** ((p - 2) / 2), 0.0)
    r = space.scatter_grad_to_dofs(space.areas[:, None] * w[:, None] * g)
    v = space.at_qpoints(u)
    with np.errstate(divide="ignore", invalid="ignore"):
        m = np.where(np.abs(v) > 0, np.abs(v) ** (p - 2), 0.0)
    r += space.scatter_qp_to_dofs(space.qweights * m * v)
    return r - b


def _hessian(space, u, p, eps):
    g, g2, w_grad, v, w_mass = _stage_terms(space, u, p, eps)
    denom = eps * eps + g2
    sigma = w_grad[:, None, None] * (
        np.eye(2)[None, :, :]
        + (p - 2) / denom[:, None, None] * np.einsum("tx,ty->txy", g, g)
    )
    K = space.stiffness(sigma=sigma)
    mw = w_mass * (1 + (p - 2) * v * v / (eps * eps + v * v))
    M = space.mass(qp_weight=mw)
    return K + M


def solve_neumann(mesh, p, f, F=None, opts=None) -> FeField:
    """Solve the homogeneous Neumann problem on box-minus-scene.

    opts: regularization eps0 (default 1.0), tol (default 1e-10 on the
    unregularized residual), max_iter per Newton stage.
    """
    if not (1.0 < p <= 2.0):
        raise BadExponent(f"p = {p} outside (1, 2]")
    opts = dict(opts or {})
    eps0 = float(opts.get("regularization", 1.0))
    tol = float(opts.get("tol", 1e-10))
    max_iter = int(opts.get("max_iter", NEWTON_MAX))

    space = opts.get("_space") or P1Space(mesh)
    source = f if isinstance(f, SourceData) else SourceData(f=f, F=F)
    b = space.load(source)
    # residuals are measured per unit of lumped mass so tol has nodal strength
    lump = space.scatter_qp_to_dofs(space.qweights)
    scale = 1.0 + float(np.abs(b / lump).max())

    # p = 2: single SPD solve, also the warm start for p < 2
    A2 = space.stiffness() + space.mass()
    u = pcg(A2, b, tol=1e-14)
    if p == 2.0:
        return FeField(mesh, u)

    eps = eps0
    last_res = np.inf
    while True:
        for _ in range(max_iter):
            r = _residual(space, u, p, eps, b)
            if np.abs(r).max() <= 1e-13 * scale:
                break
            H = _hessian(space, u, p, eps)
            d = pcg(H, -r, tol=1e-13)
            # Armijo backtracking on the stage energy
            j0 = _energy(space, u, p, eps, b)
            slope = float(r @ d)
            step = 1.0
            for _ls in range(30):
                if _energy(space, u + step * d, p, eps, b) <= j0 + 1e-4 * step * slope:
                    break
                step *= 0.5
            u = u + step * d
        last_res = float(np.abs(_unregularized_residual(space, u, p, b) / lump).max())
        if last_res <= tol * scale:
            return FeField(mesh, u)
        if eps <= EPS_FLOOR:
            raise NoConvergence(
                f"unregularized residual {last_res:.3e} above tol after the eps schedule",
                last_iterate=FeField(mesh, u),
                residual=last_res,
            )
        eps /= 10.0


def weak_residual(mesh, field: FeField, p, f, F=None) -> np.ndarray:
    """Unregularized weak-form residual vector of a field (diagnostics)."""
    space = P1Space(mesh)
    source = f if isinstance(f, SourceData) else SourceData(f=f, F=F)
    b = space.load(source)
    return _unregularized_residual(space, np.asarray(field.values, float), p, b)


def energy(mesh, field: FeField, p, f, F=None) -> float:
    """Unregularized discrete energy of a field."""
    space = P1Space(mesh)
    source = f if isinstance(f, SourceData) else SourceData(f=f, F=F)
    b = space.load(source)
    return _energy(space, np.asarray(field.values, float), p, 0.0, b)
