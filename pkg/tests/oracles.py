"""Independent brute-force oracles used to pin expected test values.

These deliberately avoid the branch-and-bound and checker code paths:
suprema are taken over dense point samples and nearest-neighbour queries
go through a KD-tree.
"""
import numpy as np
from scipy.spatial import cKDTree


def sample_segment(a, b, ds):
    a, b = np.asarray(a, float), np.asarray(b, float)
    n = max(2, int(np.ceil(np.linalg.norm(b - a) / ds)) + 1)
    t = np.linspace(0.0, 1.0, n)
    return a[None, :] + t[:, None] * (b - a)[None, :]


def sample_scene(scene, ds, interior=True):
    """Dense point sample of a scene (curves plus solid interiors)."""
    pts = []
    for poly in scene.cracks:
        for i in range(poly.shape[0] - 1):
            pts.append(sample_segment(poly[i], poly[i + 1], ds))
    for ring in scene.solids:
        closed = np.vstack([ring, ring[:1]])
        for i in range(ring.shape[0]):
            pts.append(sample_segment(closed[i], closed[i + 1], ds))
        if interior:
            from moscolab.geomkit import points_in_polygon

            lo, hi = ring.min(axis=0), ring.max(axis=0)
            nx = max(2, int(np.ceil((hi[0] - lo[0]) / ds)) + 1)
            ny = max(2, int(np.ceil((hi[1] - lo[1]) / ds)) + 1)
            gx, gy = np.meshgrid(np.linspace(lo[0], hi[0], nx), np.linspace(lo[1], hi[1], ny))
            grid = np.column_stack([gx.ravel(), gy.ravel()])
            pts.append(grid[points_in_polygon(grid, ring)])
    if not pts:
        return np.zeros((0, 2))
    return np.vstack(pts)


def sample_frame(r_in, r_out, ds):
    """Sample of the closed frame between the inner box and the outer box.

    The inner boundary (the part closest to any scene) is sampled at ds;
    the frame interior only needs a capped coarse grid.
    """
    corners = [(-r_in, -r_in), (r_in, -r_in), (r_in, r_in), (-r_in, r_in), (-r_in, -r_in)]
    rings = [
        np.vstack([sample_segment(corners[i], corners[i + 1], ds) for i in range(4)])
    ]
    coarse = max(ds, (r_out - r_in) / 8, 2e-2)
    xs = np.arange(-r_out, r_out + coarse / 2, coarse)
    gx, gy = np.meshgrid(xs, xs)
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    rings.append(pts[np.abs(pts).max(axis=1) >= r_in - 1e-15])
    return np.vstack(rings)


def oracle_sup_distance(points_from, points_to):
    if points_from.shape[0] == 0:
        return 0.0
    tree = cKDTree(points_to)
    d, _ = tree.query(points_from)
    return float(d.max())


def oracle_hausdorff(scene1, scene2, ds):
    p1 = sample_scene(scene1, ds)
    p2 = sample_scene(scene2, ds)
    return max(oracle_sup_distance(p1, p2), oracle_sup_distance(p2, p1))


def oracle_hausdorff_complementary(scene1, scene2, outer_radius, ds):
    f1 = sample_frame(scene1.box_radius, outer_radius, ds)
    f2 = sample_frame(scene2.box_radius, outer_radius, ds)
    c1 = np.vstack([sample_scene(scene1, ds), f1])
    c2 = np.vstack([sample_scene(scene2, ds), f2])
    return max(oracle_sup_distance(c1, c2), oracle_sup_distance(c2, c1))
