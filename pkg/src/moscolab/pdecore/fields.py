"""Field and coefficient containers for the FE solvers."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import BadExponent, BadTruncation, InputError
from ..geomkit import CompactScene, points_in_polygon


@dataclass
class FeField:
    """Per-DOF scalar coefficients bound to a crack mesh."""

    mesh: object
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.values.shape != (self.mesh.n_dofs,):
            raise InputError(
                f"field length {self.values.shape} != DOF count {self.mesh.n_dofs}"
            )
        if not np.all(np.isfinite(self.values.view(float))):
            raise InputError("non-finite field entries")

    @property
    def kind(self) -> str:
        return "COMPLEX" if np.iscomplexobj(self.values) else "REAL"

    def dump(self) -> str:
        """Per-DOF values keyed by vertex coordinates, 17 significant digits."""
        coords = self.mesh.vertices[self.mesh.dof_vertex]
        lines = [f"# fefield kind={self.kind} ndof={len(self.values)}"]
        for (x, y), v in zip(coords, self.values):
            if self.kind == "COMPLEX":
                lines.append(f"{x:.17g} {y:.17g} {v.real:.17g} {v.imag:.17g}")
            else:
                lines.append(f"{x:.17g} {y:.17g} {v:.17g}")
        return "\n".join(lines) + "\n"


@dataclass
class SourceData:
    """Scalar source f and vector source F, as constants or callables."""

    f: object = 0.0
    F: object = None

    def f_at(self, pts: np.ndarray) -> np.ndarray:
        if callable(self.f):
            out = np.asarray(self.f(pts[:, 0], pts[:, 1]), dtype=float)
            return np.broadcast_to(out, (pts.shape[0],)).copy()
        return np.full(pts.shape[0], float(self.f))

    def F_at(self, pts: np.ndarray) -> np.ndarray:
        if self.F is None:
            return np.zeros((pts.shape[0], 2))
        if callable(self.F):
            fx, fy = self.F(pts[:, 0], pts[:, 1])
            out = np.column_stack(
                [np.broadcast_to(fx, pts.shape[0]), np.broadcast_to(fy, pts.shape[0])]
            )
            return out.astype(float)
        return np.broadcast_to(np.asarray(self.F, dtype=float), (pts.shape[0], 2)).copy()


@dataclass
class SobolevExponents:
    """Derived embedding/trace exponents in ambient dimension two.

    For p < 2 the conjugate pair is exact: p* = 2p/(2-p), s = p/(2-p).
    For p = 2 a finite target q picks p1 = 2q/(2+q) and s = q/2.
    """

    p: float
    q: float = None
    N: int = 2

    def __post_init__(self):
        if self.p < 1:
            raise BadExponent(f"p = {self.p} below 1")
        if self.p >= self.N and self.q is None:
            raise BadExponent("p >= N needs a finite target exponent q")

    @property
    def pstar(self) -> float:
        if self.p < self.N:
            return self.p * self.N / (self.N - self.p)
        return float(self.q)

    @property
    def p1(self) -> float:
        if self.p < self.N:
            return self.p
        return self.N * self.q / (self.N + self.q)

    @property
    def s(self) -> float:
        if self.p < self.N:
            return (self.N - 1) * self.p / (self.N - self.p)
        return (self.N - 1) * self.q / self.N


class CoefficientField:
    """Symmetric tensor sigma and scalar q, isotropic outside radius R0.

    The builder enforces the structural hypotheses: piecewise Lipschitz
    sigma on a partition of the isotropy ball, identity/unity outside,
    two-sided eigenvalue and amplitude bounds everywhere.
    """

    def __init__(self, sigma_fn, q_fn, lam0, lam1, c0, c1, R0, label="coeff"):
        if not (0 < lam0 <= lam1 and 0 < c0 <= c1):
            raise InputError("coefficient bounds must satisfy 0 < lam0 <= lam1, 0 < c0 <= c1")
        self.sigma_fn = sigma_fn
        self.q_fn = q_fn
        self.lam0, self.lam1 = float(lam0), float(lam1)
        self.c0, self.c1 = float(c0), float(c1)
        self.R0 = float(R0)
        self.label = label

    @classmethod
    def isotropic(cls, R0=1.0):
        return cls(None, None, 1.0, 1.0, 1.0, 1.0, R0, label="identity")

    @classmethod
    def piecewise(cls, regions, lam0, lam1, c0, c1, R0, label="piecewise"):
        """Piecewise-constant coefficients on polygonal regions inside B_R0.

        regions: list of (ring, sigma 2x2, q). Outside every region the
        medium is isotropic, as required outside the isotropy ball.
        """
        rings = [np.asarray(r[0], dtype=float) for r in regions]
        for ring in rings:
            if np.linalg.norm(ring, axis=1).max() > R0 + 1e-12:
                raise InputError("coefficient region escapes the isotropy ball")
        sigmas = [np.asarray(r[1], dtype=float) for r in regions]
        qs = [float(r[2]) for r in regions]
        for s in sigmas:
            if not np.allclose(s, s.T):
                raise InputError("sigma must be symmetric")

        def sigma_fn(pts):
            out = np.broadcast_to(np.eye(2), (pts.shape[0], 2, 2)).copy()
            for ring, s in zip(rings, sigmas):
                out[points_in_polygon(pts, ring)] = s
            return out

        def q_fn(pts):
            out = np.ones(pts.shape[0])
            for ring, qv in zip(rings, qs):
                out[points_in_polygon(pts, ring)] = qv
            return out

        return cls(sigma_fn, q_fn, lam0, lam1, c0, c1, R0, label=label)

    def sample(self, pts: np.ndarray):
        """(sigma, q) at sample points, with the invariants checked there."""
        pts = np.atleast_2d(pts)
        if self.sigma_fn is None:
            sigma = np.broadcast_to(np.eye(2), (pts.shape[0], 2, 2)).copy()
            q = np.ones(pts.shape[0])
        else:
            sigma = np.asarray(self.sigma_fn(pts), dtype=float)
            q = np.asarray(self.q_fn(pts), dtype=float)
        tr = sigma[:, 0, 0] + sigma[:, 1, 1]
        det = sigma[:, 0, 0] * sigma[:, 1, 1] - sigma[:, 0, 1] * sigma[:, 1, 0]
        disc = np.sqrt(np.maximum(tr * tr / 4 - det, 0.0))
        lam_min, lam_max = tr / 2 - disc, tr / 2 + disc
        tol = 1e-9
        if lam_min.min() < self.lam0 - tol or lam_max.max() > self.lam1 + tol:
            raise InputError("sigma violates its ellipticity bounds")
        if q.min() < self.c0 - tol or q.max() > self.c1 + tol:
            raise InputError("q violates its amplitude bounds")
        outside = np.linalg.norm(pts, axis=1) > self.R0
        if outside.any():
            iso = np.abs(sigma[outside] - np.eye(2)).max() if outside.any() else 0.0
            if iso > tol or np.abs(q[outside] - 1.0).max() > tol:
                raise InputError("medium must be isotropic outside the R0 ball")
        return sigma, q


@dataclass
class ScatterConfig:
    """Plane-wave scattering setup: wavenumber, direction, truncation, medium."""

    wavenumber: float
    direction: tuple
    s_trunc: float
    coeff: CoefficientField
    scene: CompactScene
    k_lo: float = 0.5
    k_hi: float = 8.0

    def __post_init__(self):
        d = np.asarray(self.direction, dtype=float)
        n = np.linalg.norm(d)
        if n <= 0:
            raise InputError("direction must be a nonzero vector")
        object.__setattr__(self, "direction", tuple(d / n))
        if not (0 < self.k_lo < self.wavenumber < self.k_hi):
            raise BadExponent(
                f"wavenumber {self.wavenumber} outside ({self.k_lo}, {self.k_hi})"
            )
        if self.s_trunc <= max(self.scene.box_radius, self.coeff.R0) + 1.0:
            raise BadTruncation("s_trunc must exceed max(scene radius, R0) + 1")

    def incident(self, pts: np.ndarray) -> np.ndarray:
        d = np.asarray(self.direction)
        return np.exp(1j * self.wavenumber * (pts @ d))

    def incident_normal_derivative(self, pts: np.ndarray, normals: np.ndarray) -> np.ndarray:
        d = np.asarray(self.direction)
        return 1j * self.wavenumber * (normals @ d) * self.incident(pts)
