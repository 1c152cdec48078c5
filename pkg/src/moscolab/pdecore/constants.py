"""Lower-bound estimation of discrete Sobolev / trace / Friedrichs constants.

The estimator maximizes the relevant Rayleigh-type ratio over the P1
space by normalized gradient ascent with seeded random restarts. The
search climbs a smoothed surrogate (|.| replaced by sqrt(.^2 + mu^2))
but every reported constant is the exact discrete ratio of an actual FE
field, hence always a certified lower bound on the discrete constant.
"""
from __future__ import annotations

import numpy as np

from ..errors import BadExponent
from .assemble import BoundaryPart, P1Space
from .fields import FeField, SobolevExponents

_MU = 1e-9


class _Ratio:
    """Exact ratio and smoothed-surrogate gradient for one mode."""

    def __init__(self, mesh, mode, p, q=None, s=None):
        self.space = P1Space(mesh)
        self.boundary = BoundaryPart(mesh, "all")
        self.mode = mode
        self.p = p
        self.q = q
        self.s = s

    # exact pieces (3-point rules are the discrete definition)

    def _lq_exact(self, u, q):
        vals = np.abs(self.space.at_qpoints(u))
        return float((self.space.qweights * vals**q).sum() ** (1.0 / q))

    def _grad_exact(self, u, p):
        g = self.space.gradient(u)
        return float((self.space.areas * np.linalg.norm(g, axis=1) ** p).sum() ** (1.0 / p))

    def _trace_exact(self, u, s):
        nodal = self.boundary.nodal_trace_plus(u)
        return self.boundary.integrate_power(nodal, s) ** (1.0 / s)

    def exact(self, u):
        if self.mode == "SOBOLEV":
            den = (self._lq_exact(u, self.p) ** self.p + self._grad_exact(u, self.p) ** self.p) ** (
                1.0 / self.p
            )
            num = self._lq_exact(u, self.q)
        elif self.mode == "TRACE":
            den = (self._lq_exact(u, self.p) ** self.p + self._grad_exact(u, self.p) ** self.p) ** (
                1.0 / self.p
            )
            num = self._trace_exact(u, self.s)
        else:  # FRIEDRICHS
            num = self._lq_exact(u, self.q)
            den = self._grad_exact(u, self.p) + self._trace_exact(u, self.s)
        return num / den if den > 0 else 0.0

    # smoothed numerator/denominator values and gradients

    def _lq_grad(self, u, q):
        x = self.space.at_qpoints(u)
        phi = np.sqrt(x * x + _MU * _MU)
        val = float((self.space.qweights * phi**q).sum()) ** (1.0 / q)
        if val <= 0:
            return 0.0, np.zeros_like(u)
        coef = self.space.qweights * phi ** (q - 2) * x * val ** (1 - q)
        return val, self.space.scatter_qp_to_dofs(coef)

    def _grad_grad(self, u, p):
        g = self.space.gradient(u)
        psi = np.sqrt(np.einsum("tx,tx->t", g, g) + _MU * _MU)
        val = float((self.space.areas * psi**p).sum()) ** (1.0 / p)
        if val <= 0:
            return 0.0, np.zeros_like(u)
        coef = (self.space.areas * psi ** (p - 2) * val ** (1 - p))[:, None] * g
        return val, self.space.scatter_grad_to_dofs(coef)

    def _trace_grad(self, u, s):
        bp = self.boundary
        ua, ub = u[bp.side_a], u[bp.side_b]
        pick_a = np.abs(ua) >= np.abs(ub)
        nodal = np.where(pick_a, np.abs(ua), np.abs(ub))
        sign = np.where(pick_a, np.sign(ua), np.sign(ub))
        dof = np.where(pick_a, bp.side_a, bp.side_b)
        t = np.array([0.11270166537925831, 0.5, 0.8872983346207417])
        w = np.array([5.0, 8.0, 5.0]) / 18.0
        vals = nodal[:, [0]] * (1 - t)[None, :] + nodal[:, [1]] * t[None, :]
        phi = np.sqrt(vals * vals + _MU * _MU)
        val = float(np.einsum("eq,q,e->", phi**s, w, bp.lengths)) ** (1.0 / s)
        if val <= 0:
            return 0.0, np.zeros_like(u)
        coef = phi ** (s - 2) * vals * w[None, :] * bp.lengths[:, None] * val ** (1 - s)
        g0 = (coef * (1 - t)[None, :]).sum(axis=1) * sign[:, 0]
        g1 = (coef * t[None, :]).sum(axis=1) * sign[:, 1]
        out = np.zeros_like(u)
        np.add.at(out, dof[:, 0], g0)
        np.add.at(out, dof[:, 1], g1)
        return val, out

    def surrogate(self, u):
        if self.mode in ("SOBOLEV", "TRACE"):
            lp_val, lp_g = self._lq_grad(u, self.p)
            gr_val, gr_g = self._grad_grad(u, self.p)
            den = (lp_val**self.p + gr_val**self.p) ** (1.0 / self.p)
            den_g = (
                (lp_val ** (self.p - 1) * lp_g + gr_val ** (self.p - 1) * gr_g)
                * den ** (1 - self.p)
                if den > 0
                else np.zeros_like(u)
            )
            if self.mode == "SOBOLEV":
                num, num_g = self._lq_grad(u, self.q)
            else:
                num, num_g = self._trace_grad(u, self.s)
        else:
            num, num_g = self._lq_grad(u, self.q)
            g_val, g_g = self._grad_grad(u, self.p)
            t_val, t_g = self._trace_grad(u, self.s)
            den, den_g = g_val + t_val, g_g + t_g
        if den <= 0:
            return 0.0, np.zeros_like(u)
        ratio = num / den
        return ratio, (num_g - ratio * den_g) / den


def _mode_exponents(mode, p, q, s, opts):
    if mode == "SOBOLEV":
        if q is None:
            raise BadExponent("SOBOLEV mode needs a target exponent q")
        if p < 1 or q < 1:
            raise BadExponent("exponents must be >= 1")
        return p, q, None
    if mode == "TRACE":
        if s is None:
            raise BadExponent("TRACE mode needs a boundary exponent s")
        if p < 2 and s > p / (2 - p) + 1e-12:
            raise BadExponent(f"s = {s} above the admissible ceiling {p / (2 - p)}")
        return p, None, s
    if mode == "FRIEDRICHS":
        exps = SobolevExponents(p, q=opts.get("q_target", 4.0) if p >= 2 else None)
        return exps.p1, exps.pstar, exps.s
    raise BadExponent(f"unknown mode {mode!r}")


def estimate_best_constant(mesh, mode, p, q=None, s=None, opts=None) -> dict:
    """Maximize the mode's ratio over the FE space; a lower-bound estimate.

    opts: iters (default 250), restarts (4), seed (0), candidates (warm
    starts as DOF vectors).
    """
    opts = dict(opts or {})
    iters = int(opts.get("iters", 250))
    restarts = int(opts.get("restarts", 4))
    seed = int(opts.get("seed", 0))
    p_eff, q_eff, s_eff = _mode_exponents(mode, p, q, s, opts)
    ratio = _Ratio(mesh, mode, p_eff, q=q_eff, s=s_eff)

    rng = np.random.default_rng(seed)
    coords = mesh.vertices[mesh.dof_vertex]
    r_box = mesh.box_radius
    inits = [np.ones(mesh.n_dofs)]
    for k in range(restarts):
        if k % 2 == 0:
            c = rng.uniform(-r_box, r_box, size=2)
            w = rng.uniform(2 * mesh.h, r_box / 2)
            inits.append(np.exp(-np.linalg.norm(coords - c, axis=1) ** 2 / (2 * w * w)))
        else:
            inits.append(rng.standard_normal(mesh.n_dofs))
    for cand in opts.get("candidates", []):
        inits.append(np.asarray(cand, dtype=float))

    best_u, best_val = None, -np.inf
    for u0 in inits:
        nrm = np.linalg.norm(u0)
        if nrm == 0:
            continue
        u = u0 / nrm
        val = ratio.exact(u)
        if val > best_val:
            best_u, best_val = u.copy(), val
        step = 0.2
        cur = ratio.surrogate(u)[0]
        for _ in range(iters):
            _, g = ratio.surrogate(u)
            gn = np.linalg.norm(g)
            if gn == 0:
                break
            accepted = False
            for _bt in range(8):
                trial = u + step * g / gn
                trial /= np.linalg.norm(trial)
                tval = ratio.surrogate(trial)[0]
                if tval > cur:
                    u, cur = trial, tval
                    step *= 1.25
                    accepted = True
                    break
                step *= 0.5
            ex = ratio.exact(u)
            if ex > best_val:
                best_u, best_val = u.copy(), ex
            if not accepted or step < 1e-12:
                break
    return {
        "constant": float(best_val),
        "maximizer": FeField(mesh, best_u),
        "mode": mode,
        "exponents": {"p": p_eff, "q": q_eff, "s": s_eff},
        "converged": bool(np.isfinite(best_val) and best_val > 0),
    }
