import numpy as np
import pytest

from moscolab import errors
from moscolab.crackmesh import build_cracked_mesh
from moscolab.geomkit import CompactScene, build_compact_set
from moscolab.pdecore import (
    CoefficientField,
    FeField,
    P1Space,
    ScatterConfig,
    norm,
    solve_scattering,
)


def truncation_mesh(scene_cracks=(), s_trunc=3.0, h=0.05):
    scene = build_compact_set({"box_radius": s_trunc, "cracks": list(scene_cracks)})
    return build_cracked_mesh(scene, h=h)


def config_for(scene, k=2.0, d=(1.0, 0.0), s_trunc=3.0):
    return ScatterConfig(
        wavenumber=k,
        direction=d,
        s_trunc=s_trunc,
        coeff=CoefficientField.isotropic(R0=1.0),
        scene=scene,
    )


def centroid_values(mesh, values):
    out = {}
    cent = mesh.vertices[mesh.triangles].mean(axis=1)
    local = values[mesh.tri_dofs].mean(axis=1)
    for (x, y), v in zip(np.round(cent, 9), local):
        out[(x, y)] = v
    return out


class TestSanity:
    def test_empty_scatterer_small_scattered_field(self):
        mesh = truncation_mesh(h=0.05)
        cfg = config_for(CompactScene(1.0))
        u, us = solve_scattering(mesh, cfg)
        sp = P1Space(mesh)
        ui = FeField(mesh, cfg.incident(mesh.vertices[mesh.dof_vertex]))
        ratio = norm(us, "Lp", p=2, region=("disk", 3.0), space=sp) / norm(
            ui, "Lp", p=2, region=("disk", 3.0), space=sp
        )
        assert ratio <= 1e-2

    def test_reflection_symmetry(self):
        crack = [[[0.0, -0.5], [0.0, 0.5]]]
        mesh = truncation_mesh(scene_cracks=crack)
        cfg = config_for(build_compact_set({"box_radius": 1.0, "cracks": crack}))
        u, _ = solve_scattering(mesh, cfg)
        vals = centroid_values(mesh, u.values)
        residual = max(
            abs(v - vals[(x, -y)]) for (x, y), v in vals.items() if (x, -y) in vals
        )
        assert residual <= 1e-6

    def test_crack_scatters_and_self_converges(self):
        crack = [[[0.0, -0.5], [0.0, 0.5]]]
        scene = build_compact_set({"box_radius": 1.0, "cracks": crack})
        norms = []
        for h in (0.05, 0.025):
            mesh = truncation_mesh(scene_cracks=crack, h=h)
            _, us = solve_scattering(mesh, config_for(scene))
            norms.append(norm(us, "Lp", p=2, region=("disk", 3.0)))
        assert norms[1] > 0.05  # the crack genuinely scatters
        assert abs(norms[0] - norms[1]) / norms[1] <= 0.05

    def test_bad_truncation_guard(self):
        scene = build_compact_set({"box_radius": 2.5, "cracks": [[[0, 0], [1, 0]]]})
        with pytest.raises(errors.BadTruncation):
            config_for(scene, s_trunc=3.0)

    def test_mesh_truncation_mismatch(self):
        mesh = truncation_mesh(h=0.1, s_trunc=3.0)
        cfg = config_for(CompactScene(1.0), s_trunc=3.5)
        with pytest.raises(errors.BadTruncation):
            solve_scattering(mesh, cfg)


class TestCoefficients:
    def test_piecewise_coefficients_register(self):
        ring = [[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]]
        coeff = CoefficientField.piecewise(
            [(ring, 1.5 * np.eye(2), 1.2)], lam0=0.9, lam1=1.6, c0=0.9, c1=1.3, R0=1.0
        )
        pts = np.array([[0.0, 0.0], [2.0, 2.0]])
        sigma, q = coeff.sample(pts)
        assert sigma[0, 0, 0] == 1.5 and q[0] == 1.2
        assert sigma[1, 0, 0] == 1.0 and q[1] == 1.0

    def test_bounds_enforced(self):
        ring = [[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]]
        coeff = CoefficientField.piecewise(
            [(ring, 3.0 * np.eye(2), 1.0)], lam0=0.9, lam1=1.6, c0=0.9, c1=1.3, R0=1.0
        )
        with pytest.raises(errors.InputError):
            coeff.sample(np.array([[0.0, 0.0]]))

    def test_region_must_stay_in_isotropy_ball(self):
        ring = [[-2.0, -2.0], [2.0, -2.0], [2.0, 2.0], [-2.0, 2.0]]
        with pytest.raises(errors.InputError):
            CoefficientField.piecewise(
                [(ring, np.eye(2), 1.0)], lam0=0.9, lam1=1.1, c0=0.9, c1=1.1, R0=1.0
            )

    def test_scattering_with_variable_medium_runs(self):
        ring = [[-0.4, -0.4], [0.4, -0.4], [0.4, 0.4], [-0.4, 0.4]]
        coeff = CoefficientField.piecewise(
            [(ring, 1.3 * np.eye(2), 1.1)], lam0=0.9, lam1=1.4, c0=0.9, c1=1.2, R0=1.0
        )
        scene = CompactScene(1.0)
        cfg = ScatterConfig(2.0, (0.0, 1.0), 3.0, coeff, scene)
        mesh = truncation_mesh(h=0.1)
        u, us = solve_scattering(mesh, cfg)
        assert norm(us, "Lp", p=2) > 1e-3  # the inhomogeneity scatters
