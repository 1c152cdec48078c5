"""Certified computational geometry for compact planar scenes.

A scene is a compact subset of the closed box ``[-R, R]^2`` written as
crack polylines (one-dimensional pieces) plus filled simple polygons
(solid obstacles). Distances are exact point-segment formulas; suprema
over a scene (Hausdorff distances) are certified by branch-and-bound,
exploiting the 1-Lipschitzness of ``x -> dist(x, E)``.

Geometric predicates use ``EPS = 1e-12``; points exactly on a boundary
count as inside.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateSegment, EmptyScene, MalformedSpec, OutOfBox

EPS = 1e-12


@dataclass(frozen=True)
class CertifiedScalar:
    """A value with a rigorous two-sided error bound."""

    value: float
    error_bound: float

    @property
    def upper(self) -> float:
        return self.value + self.error_bound

    @property
    def lower(self) -> float:
        return self.value - self.error_bound


@dataclass(frozen=True)
class CompactScene:
    """Cracks (polylines) and solids (simple polygons) in a closed box.

    Vertices are immutable float arrays; every polyline has at least two
    vertices and strictly positive segment lengths, every polygon is
    simple and positively oriented.
    """

    box_radius: float
    cracks: tuple = ()
    solids: tuple = ()
    label: str = ""
    _segments: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "cracks", tuple(np.asarray(c, dtype=float) for c in self.cracks))
        object.__setattr__(self, "solids", tuple(np.asarray(s, dtype=float) for s in self.solids))
        for c in self.cracks + self.solids:
            c.setflags(write=False)

    @property
    def is_empty(self) -> bool:
        return not self.cracks and not self.solids

    def segments(self) -> np.ndarray:
        """All scene segments (crack segments + polygon edges), shape (n, 2, 2)."""
        cached = object.__getattribute__(self, "_segments")
        if cached is not None:
            return cached
        segs = []
        for poly in self.cracks:
            segs.append(np.stack([poly[:-1], poly[1:]], axis=1))
        for ring in self.solids:
            closed = np.vstack([ring, ring[:1]])
            segs.append(np.stack([closed[:-1], closed[1:]], axis=1))
        out = np.concatenate(segs, axis=0) if segs else np.zeros((0, 2, 2))
        out.setflags(write=False)
        object.__setattr__(self, "_segments", out)
        return out

    def to_dict(self) -> dict:
        return {
            "box_radius": self.box_radius,
            "cracks": [c.tolist() for c in self.cracks],
            "solids": [s.tolist() for s in self.solids],
            "label": self.label,
        }


# -- primitive predicates -----------------------------------------------------


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def segments_intersect(p0, p1, q0, q1, eps=EPS):
    """True if closed segments [p0,p1] and [q0,q1] share at least one point."""
    d1 = _cross(q0, q1, p0)
    d2 = _cross(q0, q1, p1)
    d3 = _cross(p0, p1, q0)
    d4 = _cross(p0, p1, q1)
    scale = max(
        abs(p1[0] - p0[0]) + abs(p1[1] - p0[1]),
        abs(q1[0] - q0[0]) + abs(q1[1] - q0[1]),
        1.0,
    )
    tol = eps * scale
    if ((d1 > tol and d2 < -tol) or (d1 < -tol and d2 > tol)) and (
        (d3 > tol and d4 < -tol) or (d3 < -tol and d4 > tol)
    ):
        return True
    # collinear / endpoint contact
    for d, a, b, c in ((d1, q0, q1, p0), (d2, q0, q1, p1), (d3, p0, p1, q0), (d4, p0, p1, q1)):
        if abs(d) <= tol and _on_segment(a, b, c, tol):
            return True
    return False


def _on_segment(a, b, c, tol):
    return (
        min(a[0], b[0]) - tol <= c[0] <= max(a[0], b[0]) + tol
        and min(a[1], b[1]) - tol <= c[1] <= max(a[1], b[1]) + tol
    )


def point_segment_distance(pts: np.ndarray, a, b) -> np.ndarray:
    """Exact distances from points (n,2) to the closed segment [a,b]."""
    pts = np.atleast_2d(pts)
    ab = np.asarray(b, dtype=float) - np.asarray(a, dtype=float)
    denom = float(ab @ ab)
    if denom <= 0.0:
        return np.linalg.norm(pts - a, axis=1)
    t = np.clip((pts - a) @ ab / denom, 0.0, 1.0)
    proj = np.asarray(a) + t[:, None] * ab
    return np.linalg.norm(pts - proj, axis=1)


def points_to_segments_distance(pts: np.ndarray, segs: np.ndarray) -> np.ndarray:
    """Min distance from each point (n,2) to a segment array (m,2,2)."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    if segs.shape[0] == 0:
        return np.full(pts.shape[0], np.inf)
    a = segs[:, 0, :]
    ab = segs[:, 1, :] - a
    denom = np.einsum("ij,ij->i", ab, ab)
    denom = np.where(denom <= 0.0, 1.0, denom)
    diff = pts[:, None, :] - a[None, :, :]
    t = np.clip(np.einsum("nmj,mj->nm", diff, ab) / denom[None, :], 0.0, 1.0)
    proj = a[None, :, :] + t[..., None] * ab[None, :, :]
    d = np.linalg.norm(pts[:, None, :] - proj, axis=2)
    return d.min(axis=1)


def polygon_area(ring: np.ndarray) -> float:
    x, y = ring[:, 0], ring[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def polygon_perimeter(ring: np.ndarray) -> float:
    closed = np.vstack([ring, ring[:1]])
    return float(np.linalg.norm(np.diff(closed, axis=0), axis=1).sum())


def points_in_polygon(pts: np.ndarray, ring: np.ndarray, eps=EPS) -> np.ndarray:
    """Crossing-number membership; points on the boundary count as inside."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    x, y = pts[:, 0], pts[:, 1]
    n = ring.shape[0]
    inside = np.zeros(pts.shape[0], dtype=bool)
    with np.errstate(divide="ignore", invalid="ignore"):
        for i in range(n):
            x0, y0 = ring[i]
            x1, y1 = ring[(i + 1) % n]
            straddles = (y0 > y) != (y1 > y)
            xcross = (x1 - x0) * (y - y0) / (y1 - y0) + x0
            inside ^= straddles & (x < np.where(straddles, xcross, np.inf))
    segs = np.stack([ring, np.roll(ring, -1, axis=0)], axis=1)
    on_bdry = points_to_segments_distance(pts, segs) <= eps * max(1.0, np.abs(ring).max())
    return inside | on_bdry


def triangulate_polygon(ring: np.ndarray) -> list:
    """Ear-clipping triangulation of a simple, positively oriented polygon."""
    idx = list(range(ring.shape[0]))
    tris = []
    guard = 0
    while len(idx) > 3 and guard < 10000:
        guard += 1
        n = len(idx)
        clipped = False
        for k in range(n):
            i0, i1, i2 = idx[(k - 1) % n], idx[k], idx[(k + 1) % n]
            a, b, c = ring[i0], ring[i1], ring[i2]
            if _cross(a, b, c) <= EPS:
                continue  # reflex or degenerate corner
            tri = np.array([a, b, c])
            others = [j for j in idx if j not in (i0, i1, i2)]
            if others and points_in_polygon(ring[others], tri, eps=0.0).any():
                continue
            tris.append(tri)
            idx.pop(k)
            clipped = True
            break
        if not clipped:
            break
    if len(idx) == 3:
        tris.append(ring[idx])
    return tris


# -- scene construction -------------------------------------------------------


def build_compact_set(spec: dict) -> CompactScene:
    """Validate a scene description and construct the ``CompactScene``.

    Polygons are reoriented to positive orientation; self-crossing
    polylines and non-simple polygons are rejected.
    """
    try:
        radius = float(spec["box_radius"])
        cracks = [np.asarray(c, dtype=float) for c in spec.get("cracks", [])]
        solids = [np.asarray(s, dtype=float) for s in spec.get("solids", [])]
        label = str(spec.get("label", ""))
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedSpec(f"unreadable scene description: {exc}") from exc
    if not math.isfinite(radius) or radius <= 0:
        raise MalformedSpec("box_radius must be positive and finite")

    for poly in cracks:
        if poly.ndim != 2 or poly.shape[1] != 2 or poly.shape[0] < 2:
            raise MalformedSpec("each crack needs >= 2 plane vertices")
        _validate_vertices(poly, radius)
        _validate_polyline(poly)
    oriented = []
    for ring in solids:
        if ring.ndim != 2 or ring.shape[1] != 2 or ring.shape[0] < 3:
            raise MalformedSpec("each solid needs >= 3 plane vertices")
        _validate_vertices(ring, radius)
        _validate_ring(ring)
        if polygon_area(ring) < 0:
            ring = ring[::-1].copy()
        oriented.append(ring)
    return CompactScene(radius, tuple(cracks), tuple(oriented), label)


def _validate_vertices(arr, radius):
    if not np.isfinite(arr).all():
        raise MalformedSpec("non-finite vertex")
    if np.abs(arr).max() > radius + EPS:
        raise OutOfBox(f"vertex at {arr[np.abs(arr).max(axis=1).argmax()]} beyond radius {radius}")


def _validate_polyline(poly):
    lengths = np.linalg.norm(np.diff(poly, axis=0), axis=1)
    if (lengths <= EPS).any():
        raise DegenerateSegment("zero-length polyline segment")
    n = poly.shape[0] - 1
    closed = bool(np.linalg.norm(poly[0] - poly[-1]) <= EPS)
    for i in range(n):
        for j in range(i + 1, n):
            wraps = closed and i == 0 and j == n - 1
            if j == i + 1 or wraps:
                # consecutive segments may only share their common vertex
                a, b, c = (poly[i], poly[i + 1], poly[j + 1]) if not wraps else (
                    poly[1], poly[0], poly[n - 1])
                if _fold_back(a, b, c):
                    raise MalformedSpec("polyline folds back onto itself")
                continue
            if segments_intersect(poly[i], poly[i + 1], poly[j], poly[j + 1]):
                raise MalformedSpec("self-crossing polyline")


def _fold_back(a, b, c):
    # b is shared; fold-back means c re-enters [a, b]
    cr = _cross(a, b, c)
    scale = max(np.abs(np.asarray([a, b, c])).max(), 1.0)
    if abs(cr) > EPS * scale:
        return False
    return float((np.asarray(a) - b) @ (np.asarray(c) - b)) > 0


def _validate_ring(ring):
    closed = np.vstack([ring, ring[:1]])
    lengths = np.linalg.norm(np.diff(closed, axis=0), axis=1)
    if (lengths <= EPS).any():
        raise DegenerateSegment("zero-length polygon edge")
    n = ring.shape[0]
    for i in range(n):
        for j in range(i + 1, n):
            adjacent = (j == i + 1) or (i == 0 and j == n - 1)
            if adjacent:
                continue
            a, b = closed[i], closed[i + 1]
            c, d = closed[j], closed[j + 1]
            if segments_intersect(a, b, c, d):
                raise MalformedSpec("polygon is not simple")
    if abs(polygon_area(ring)) <= EPS:
        raise MalformedSpec("polygon with vanishing area")


# -- distances ----------------------------------------------------------------


def distance_to_set(x, scene: CompactScene) -> float:
    """Exact Euclidean distance from a point to the scene (0 inside a solid)."""
    if scene.is_empty:
        raise EmptyScene("distance to an empty scene is undefined")
    pt = np.asarray(x, dtype=float).reshape(1, 2)
    for ring in scene.solids:
        if points_in_polygon(pt, ring)[0]:
            return 0.0
    return float(points_to_segments_distance(pt, scene.segments())[0])


class _DistanceTarget:
    """Distance field to a scene, optionally united with the outer frame.

    Exposes both exact evaluation at points and a per-segment convex
    upper-bound helper used by the branch-and-bound: dist(., S) is convex
    for each single segment S, so its max over a cell is attained at the
    cell corners.
    """

    def __init__(self, scene: CompactScene, frame_radius=None):
        segs = [scene.segments()]
        if frame_radius is not None:
            r = scene.box_radius
            box = np.array([[-r, -r], [r, -r], [r, r], [-r, r], [-r, -r]])
            segs.append(np.stack([box[:-1], box[1:]], axis=1))
        self.segments = np.concatenate(segs, axis=0) if segs else np.zeros((0, 2, 2))
        self.rings = scene.solids
        self.frame_radius = frame_radius
        self.box_radius = scene.box_radius

    def __call__(self, pts):
        pts = np.atleast_2d(pts)
        d = points_to_segments_distance(pts, self.segments)
        for ring in self.rings:
            d = np.where(points_in_polygon(pts, ring), 0.0, d)
        if self.frame_radius is not None:
            d = np.where(np.abs(pts).max(axis=1) >= self.box_radius, 0.0, d)
        return d

    def cell_bounds(self, corners):
        """(lb, ub) for sup of the field over the convex hull of the corners.

        dist(., S) is convex for a single segment S, so each per-segment
        max over the cell sits at the corners; the min over segments then
        bounds the sup of the min. A cell buried inside a target solid
        (or inside the frame) sees the exact zero field instead.
        """
        lb = float(self(corners).max())
        diam = float(
            max(np.linalg.norm(corners[i] - corners[j]) for i in range(len(corners)) for j in range(i))
        )
        for ring in self.rings:
            ring_segs = np.stack([ring, np.roll(ring, -1, axis=0)], axis=1)
            d_bdry = points_to_segments_distance(corners, ring_segs)
            inside = points_in_polygon(corners, ring)
            if bool(np.any(inside & (d_bdry >= diam))):
                return lb, lb
        if self.frame_radius is not None:
            if float(np.abs(corners).max(axis=1).min()) >= self.box_radius + diam:
                return lb, lb
        if self.segments.shape[0] == 0:
            return lb, lb
        a = self.segments[:, 0, :]
        ab = self.segments[:, 1, :] - a
        denom = np.einsum("ij,ij->i", ab, ab)
        denom = np.where(denom <= 0.0, 1.0, denom)
        diff = corners[:, None, :] - a[None, :, :]
        t = np.clip(np.einsum("nmj,mj->nm", diff, ab) / denom[None, :], 0.0, 1.0)
        proj = a[None, :, :] + t[..., None] * ab[None, :, :]
        d = np.linalg.norm(corners[:, None, :] - proj, axis=2)
        ub = float(d.max(axis=0).min())
        return lb, max(lb, ub)


def _sup_items(scene: CompactScene):
    """Branch-and-bound cells covering the scene: segments and solid triangles."""
    items = []
    segs = scene.segments()
    for k in range(segs.shape[0]):
        items.append(np.stack([segs[k, 0], segs[k, 1]]))
    for ring in scene.solids:
        for tri in triangulate_polygon(ring):
            items.append(np.asarray(tri, dtype=float))
    return items


def _split(corners):
    if corners.shape[0] == 2:
        a, b = corners
        m = 0.5 * (a + b)
        return [np.stack([a, m]), np.stack([m, b])]
    a, b, c = corners
    m01, m12, m20 = 0.5 * (a + b), 0.5 * (b + c), 0.5 * (c + a)
    return [
        np.stack([a, m01, m20]),
        np.stack([m01, b, m12]),
        np.stack([m20, m12, c]),
        np.stack([m01, m12, m20]),
    ]


def _certified_sup(items, target: "_DistanceTarget", tol, max_cells=500_000) -> tuple:
    """sup of dist(., target) over the union of cells, certified within tol."""
    if not items:
        return 0.0, 0.0
    heap = []
    best_lb = -math.inf
    for n, corners in enumerate(items):
        lb, ub = target.cell_bounds(corners)
        best_lb = max(best_lb, lb)
        heapq.heappush(heap, (-ub, n, corners))
    counter = len(items)
    while heap and counter < max_cells:
        neg_ub, _, corners = heapq.heappop(heap)
        ub = -neg_ub
        if ub - best_lb <= tol:
            return best_lb, ub
        for child in _split(corners):
            clb, cub = target.cell_bounds(child)
            best_lb = max(best_lb, clb)
            if cub > best_lb + tol:
                counter += 1
                heapq.heappush(heap, (-cub, counter, child))
    if heap:
        return best_lb, max(best_lb, -heap[0][0])
    return best_lb, best_lb


def _distance_field(scene: CompactScene, frame_radius=None):
    return _DistanceTarget(scene, frame_radius)


def _one_sided(scene_from: CompactScene, dist_to, tol):
    return _certified_sup(_sup_items(scene_from), dist_to, tol)


def hausdorff_distance(k1: CompactScene, k2: CompactScene, tol: float) -> CertifiedScalar:
    """Certified Hausdorff distance between two non-empty compact scenes."""
    if k1.is_empty or k2.is_empty:
        raise EmptyScene("Hausdorff distance needs non-empty scenes")
    if tol <= 0:
        raise MalformedSpec("tol must be positive")
    lb1, ub1 = _one_sided(k1, _distance_field(k2), tol)
    lb2, ub2 = _one_sided(k2, _distance_field(k1), tol)
    lo, hi = max(lb1, lb2), max(ub1, ub2)
    return CertifiedScalar(0.5 * (lo + hi), 0.5 * (hi - lo))


def hausdorff_complementary_distance(
    d1: CompactScene, d2: CompactScene, outer_radius: float, tol: float
) -> CertifiedScalar:
    """Certified d_H between the complements of the two open sets.

    The open set of a scene is the open box interior minus the scene; its
    complement inside the closed outer box is the scene plus the frame
    between the scene box and the outer box.
    """
    if d1.is_empty and d2.is_empty and d1.box_radius == d2.box_radius:
        return CertifiedScalar(0.0, 0.0)
    for d in (d1, d2):
        if d.box_radius > outer_radius + EPS:
            raise MalformedSpec("scene box exceeds the outer radius")
    dist1 = _distance_field(d1, frame_radius=outer_radius)
    dist2 = _distance_field(d2, frame_radius=outer_radius)
    lb1, ub1 = _certified_sup(_sup_items(d1), dist2, tol)
    lb2, ub2 = _certified_sup(_sup_items(d2), dist1, tol)
    # frame-vs-frame contributes only when the inner boxes differ
    if abs(d1.box_radius - d2.box_radius) > EPS:
        f1 = _frame_items(d1.box_radius, outer_radius)
        f2 = _frame_items(d2.box_radius, outer_radius)
        flb1, fub1 = _certified_sup(f1, dist2, tol)
        flb2, fub2 = _certified_sup(f2, dist1, tol)
        lb1, ub1 = max(lb1, flb1), max(ub1, fub1)
        lb2, ub2 = max(lb2, flb2), max(ub2, fub2)
    lo, hi = max(lb1, lb2), max(ub1, ub2)
    return CertifiedScalar(0.5 * (lo + hi), 0.5 * (hi - lo))


def _frame_items(r_in, r_out):
    if r_out - r_in <= EPS:
        return []
    quads = [
        np.array([[-r_out, r_in], [r_out, r_in], [r_out, r_out], [-r_out, r_out]]),
        np.array([[-r_out, -r_out], [r_out, -r_out], [r_out, -r_in], [-r_out, -r_in]]),
        np.array([[-r_out, -r_in], [-r_in, -r_in], [-r_in, r_in], [-r_out, r_in]]),
        np.array([[r_in, -r_in], [r_out, -r_in], [r_out, r_in], [r_in, r_in]]),
    ]
    items = []
    for q in quads:
        items.append(q[[0, 1, 2]].astype(float))
        items.append(q[[0, 2, 3]].astype(float))
    return items


def symmetric_difference_area(
    d1: CompactScene, d2: CompactScene, resolution: float
) -> CertifiedScalar:
    """Pixel-counted area of the symmetric difference of the two open sets.

    Cracks have measure zero and are ignored; the error bound is
    resolution times the total solid perimeter of both scenes.
    """
    if abs(d1.box_radius - d2.box_radius) > EPS:
        raise MalformedSpec("symmetric difference needs a common box radius")
    if resolution <= 0:
        raise MalformedSpec("resolution must be positive")
    r = d1.box_radius
    n = max(1, int(math.ceil(2 * r / resolution)))
    cell = 2 * r / n
    centers = -r + cell * (np.arange(n) + 0.5)
    xx, yy = np.meshgrid(centers, centers, indexing="ij")
    pts = np.column_stack([xx.ravel(), yy.ravel()])

    def in_solid(scene):
        mask = np.zeros(pts.shape[0], dtype=bool)
        for ring in scene.solids:
            mask |= points_in_polygon(pts, ring)
        return mask

    diff = in_solid(d1) ^ in_solid(d2)
    area = float(diff.sum()) * cell * cell
    perim = sum(polygon_perimeter(s) for s in d1.solids) + sum(
        polygon_perimeter(s) for s in d2.solids
    )
    return CertifiedScalar(area, resolution * perim)


# -- measures -----------------------------------------------------------------


def length_measure(scene: CompactScene) -> float:
    """Total 1-dimensional measure: deduplicated crack length + solid perimeters.

    Exactly collinear overlapping crack sub-segments are counted once.
    """
    segs = []
    for poly in scene.cracks:
        for i in range(poly.shape[0] - 1):
            segs.append((poly[i], poly[i + 1]))
    total = _dedup_length(segs)
    total += sum(polygon_perimeter(s) for s in scene.solids)
    return total


def _dedup_length(segs) -> float:
    if not segs:
        return 0.0
    n = len(segs)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i, j):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj

    dirs = [np.asarray(b) - np.asarray(a) for a, b in segs]
    scale = max(max(np.abs(np.asarray(s)).max() for s in dirs), 1.0)
    for i in range(n):
        for j in range(i + 1, n):
            ai, bi = segs[i]
            aj, bj = segs[j]
            if abs(_cross((0, 0), dirs[i], dirs[j])) > EPS * scale * scale:
                continue
            if abs(_cross(ai, bi, aj)) > EPS * scale * scale:
                continue
            # same line: merge only if the 1-D intervals overlap
            u = dirs[i] / np.linalg.norm(dirs[i])
            t = sorted([float((np.asarray(p) - ai) @ u) for p in (ai, bi)])
            s = sorted([float((np.asarray(p) - ai) @ u) for p in (aj, bj)])
            if t[0] <= s[1] + EPS and s[0] <= t[1] + EPS:
                union(i, j)

    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    total = 0.0
    for members in groups.values():
        a0 = segs[members[0]][0]
        u = dirs[members[0]] / np.linalg.norm(dirs[members[0]])
        intervals = []
        for i in members:
            t0 = float((np.asarray(segs[i][0]) - a0) @ u)
            t1 = float((np.asarray(segs[i][1]) - a0) @ u)
            intervals.append((min(t0, t1), max(t0, t1)))
        intervals.sort()
        lo, hi = intervals[0]
        for a, b in intervals[1:]:
            if a > hi + EPS:
                total += hi - lo
                lo, hi = a, b
            else:
                hi = max(hi, b)
        total += hi - lo
    return total
