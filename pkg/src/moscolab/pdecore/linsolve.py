"""Linear solvers: diagonally preconditioned CG and a direct complex path."""
from __future__ import annotations

import numpy as np
import scipy.sparse.linalg as spla

from ..errors import SingularSystem


def pcg(A, b, tol=1e-13, maxiter=None, x0=None):
    """Conjugate gradients with the diagonal preconditioner.

    Falls back to a sparse direct factorization if the iteration stalls;
    either path must meet the relative-residual tolerance.
    """
    n = b.shape[0]
    maxiter = maxiter or max(200, 12 * int(np.sqrt(n)) * 40)
    diag = A.diagonal()
    diag = np.where(np.abs(diag) > 0, diag, 1.0)
    x = np.zeros_like(b) if x0 is None else x0.copy()
    r = b - A @ x
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return np.zeros_like(b)
    z = r / diag
    p = z.copy()
    rz = float(r @ z)
    for _ in range(maxiter):
        if np.linalg.norm(r) <= tol * bnorm:
            return x
        Ap = A @ p
        alpha = rz / float(p @ Ap)
        x += alpha * p
        r -= alpha * Ap
        z = r / diag
        rz_new = float(r @ z)
        p = z + (rz_new / rz) * p
        rz = rz_new
    # direct fallback keeps the residual contract
    x = spla.spsolve(A.tocsc(), b)
    if np.linalg.norm(b - A @ x) > max(tol, 1e-10) * bnorm:
        raise SingularSystem("no solver met the residual tolerance")
    return x


def direct_complex(A, b, rel_residual=1e-8):
    """Sparse LU for complex (indefinite) systems with a residual check."""
    try:
        lu = spla.splu(A.tocsc())
        x = lu.solve(b)
    except Exception as exc:  # singular factorization
        raise SingularSystem(f"factorization failed: {exc}") from exc
    res = np.linalg.norm(b - A @ x) / max(np.linalg.norm(b), 1e-300)
    if not np.isfinite(res) or res > rel_residual:
        raise SingularSystem(f"relative residual {res:.2e} above {rel_residual:.0e}")
    return x
