"""Admissible-mesh generators for squares, disks, regular polygons and simplices.

Each generator returns a :class:`Mesh`: a duplicate-free real point set of a
fixed degree together with its norming-constant metadata.  All generated
points satisfy membership of the generating set within 1e-12.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.spatial import cKDTree

from .basis import AffineMap
from .exceptions import UndersamplingError
from .sets import (AffineImage, Box, CompactSet, Disk, Product,
                   RegularPolygon, Simplex)

__all__ = [
    "Mesh",
    "mesh_square",
    "mesh_square_cl",
    "mesh_disk",
    "mesh_simplex",
    "mesh_polygon",
    "mesh_union",
    "mesh_affine_image",
    "mesh_for_set",
    "write_mesh_csv",
    "read_mesh_csv",
]

DEDUP_TOL = 1e-12


@dataclass(frozen=True)
class Mesh:
    """Finite point model of a compact set for polynomials of one degree."""

    points: np.ndarray          # M x n, no duplicates
    degree: int
    constant: float | None      # norming constant C, or None for "empirical"
    source: str = ""

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def n(self) -> int:
        return self.points.shape[1]


def _dedup(points: np.ndarray, tol: float = DEDUP_TOL) -> np.ndarray:
    """Drop points within `tol` (Euclidean) of an earlier one."""
    if points.shape[0] < 2:
        return points
    tree = cKDTree(points)
    drop = np.zeros(points.shape[0], dtype=bool)
    for i, j in tree.query_pairs(tol):
        drop[max(i, j)] = True
    return points[~drop]


def _cl_points(s: int) -> np.ndarray:
    """Chebyshev-Lobatto points cos(j*pi/s), j = 0..s."""
    return np.cos(np.arange(s + 1) * np.pi / s)


def mesh_square(k: int, m_factor: float = 2.0) -> Mesh:
    """Tensor Chebyshev mesh -cos(j*pi/ceil(m*k)) x itself on [-1,1]^2."""
    if k < 1:
        raise ValueError("degree must be >= 1")
    if m_factor < 2:
        raise ValueError("oversampling factor must be >= 2")
    s = math.ceil(m_factor * k)
    x = -_cl_points(s)
    X, Y = np.meshgrid(x, x, indexing="ij")
    pts = np.column_stack([X.ravel(), Y.ravel()])
    c1d = 1.0 / math.cos(k * math.pi / (2 * s))
    return Mesh(points=pts, degree=k, constant=c1d ** 2, source=f"square(m={m_factor})")


def mesh_square_cl(k: int) -> Mesh:
    """(2k+1)^2 Chebyshev-Lobatto grid on [-1,1]^2; norming constant 2."""
    if k < 1:
        raise ValueError("degree must be >= 1")
    x = _cl_points(2 * k)
    X, Y = np.meshgrid(x, x, indexing="ij")
    pts = np.column_stack([X.ravel(), Y.ravel()])
    return Mesh(points=pts, degree=k, constant=2.0, source="square-cl")


def mesh_disk(k: int, s: int | None = None, variant: str = "td-polar") -> Mesh:
    """Polar-product mesh of the closed unit disk (duplicates removed).

    "td-polar": radii and angles i*pi/(2k), i = 0..2k (signed radii sweep
    the full disk).  "lobatto-polar": s+1 Chebyshev-Lobatto radii and s
    equispaced angles in [0, pi); requires s > k, default s = 2k.
    """
    if k < 1:
        raise ValueError("degree must be >= 1")
    if variant == "td-polar":
        t = np.arange(2 * k + 1) * np.pi / (2 * k)
        radii = np.cos(t)
        angles = t
    elif variant == "lobatto-polar":
        if s is None:
            s = 2 * k
        if s <= k:
            raise UndersamplingError(f"disk mesh needs s > k, got s={s}, k={k}")
        radii = _cl_points(s)
        angles = np.arange(s) * np.pi / s
    else:
        raise ValueError(f"unknown disk mesh variant {variant!r}")
    R, T = np.meshgrid(radii, angles, indexing="ij")
    pts = np.column_stack([(R * np.cos(T)).ravel(), (R * np.sin(T)).ravel()])
    return Mesh(points=_dedup(pts), degree=k, constant=2.0, source=f"disk({variant})")


def _duffy(uv01: np.ndarray) -> np.ndarray:
    """(u, v) in [0,1]^2 -> (u(1-v), uv) on the unit simplex."""
    u, v = uv01[:, 0], uv01[:, 1]
    return np.column_stack([u * (1.0 - v), u * v])


def mesh_simplex(k: int) -> Mesh:
    """Duffy image of the (4k+1)^2 Chebyshev-Lobatto grid; constant 2."""
    if k < 1:
        raise ValueError("degree must be >= 1")
    x01 = (_cl_points(4 * k) + 1.0) / 2.0
    U, V = np.meshgrid(x01, x01, indexing="ij")
    pts = _duffy(np.column_stack([U.ravel(), V.ravel()]))
    return Mesh(points=_dedup(pts), degree=k, constant=2.0, source="simplex")


def _map_simplex_to_triangle(points: np.ndarray, v0, v1, v2) -> np.ndarray:
    v0 = np.asarray(v0, dtype=float)
    e1 = np.asarray(v1, dtype=float) - v0
    e2 = np.asarray(v2, dtype=float) - v0
    return v0 + np.outer(points[:, 0], e1) + np.outer(points[:, 1], e2)


def mesh_polygon(k: int, m: int, center=(0.0, 0.0), circumradius: float = 1.0) -> Mesh:
    """Union of per-triangle Duffy meshes over the centroid fan of a regular m-gon."""
    poly = RegularPolygon(m=m, center=tuple(center), circumradius=circumradius)
    verts = poly.vertices()
    centroid = np.asarray(center, dtype=float)
    base = mesh_simplex(k).points
    parts = [_map_simplex_to_triangle(base, centroid, verts[j], verts[(j + 1) % m])
             for j in range(m)]
    pts = _dedup(np.vstack(parts))
    return Mesh(points=pts, degree=k, constant=2.0, source=f"polygon(m={m})")


def mesh_union(a: Mesh, b: Mesh) -> Mesh:
    if a.degree != b.degree:
        raise ValueError(f"cannot union meshes of degrees {a.degree} and {b.degree}")
    pts = _dedup(np.vstack([a.points, b.points]))
    consts = [c for c in (a.constant, b.constant) if c is not None]
    constant = max(consts) if len(consts) == 2 else None
    return Mesh(points=pts, degree=a.degree, constant=constant,
                source=f"union({a.source},{b.source})")


def mesh_affine_image(mesh: Mesh, amap: AffineMap) -> Mesh:
    pts = amap.apply(mesh.points)
    return Mesh(points=pts, degree=mesh.degree, constant=mesh.constant,
                source=f"affine({mesh.source})")


def mesh_for_set(cset: CompactSet, k: int, purpose: str = "extremal",
                 m_factor: float = 2.0) -> Mesh:
    """Default mesh generator dispatch for the supplied geometries.

    `purpose` picks the construction used in the corresponding experiment:
    "extremal" (oversampled square / lobatto-polar disk) or "td"
    (Chebyshev-Lobatto square / td-polar disk).
    """
    if isinstance(cset, Product):
        cset = Box(intervals=(cset.first, cset.second))
    if isinstance(cset, Box):
        base = mesh_square_cl(k) if purpose == "td" else mesh_square(k, m_factor)
        if all(tuple(iv) == (-1.0, 1.0) for iv in cset.intervals):
            return base
        bmap = AffineMap(a=np.array([iv[0] for iv in cset.intervals]),
                         b=np.array([iv[1] for iv in cset.intervals]))
        # bounding map sends the box onto [-1,1]^n; we need its inverse
        return mesh_affine_image(base, _inverse_map(bmap))
    if isinstance(cset, Disk):
        variant = "td-polar" if purpose == "td" else "lobatto-polar"
        mesh = mesh_disk(k, variant=variant)
        if cset.radius != 1.0 or tuple(cset.center) != (0.0, 0.0):
            pts = np.asarray(cset.center) + cset.radius * mesh.points
            mesh = replace(mesh, points=pts)
        return mesh
    if isinstance(cset, RegularPolygon):
        return mesh_polygon(k, cset.m, center=cset.center, circumradius=cset.circumradius)
    if isinstance(cset, Simplex):
        return mesh_simplex(k)
    if isinstance(cset, AffineImage):
        base = mesh_for_set(cset.base, k, purpose=purpose, m_factor=m_factor)
        return mesh_affine_image(base, _inverse_map(cset.map))
    raise ValueError(f"no mesh generator for set {cset.describe()}")


def _inverse_map(amap: AffineMap) -> AffineMap:
    """Inverse of a per-coordinate affine map, again as an AffineMap."""
    s = amap.scale
    t = -(amap.a + amap.b) / 2.0 * s
    s_inv, t_inv = 1.0 / s, -t / s
    b_minus_a = 2.0 / s_inv
    a_plus_b = -2.0 * t_inv / s_inv
    return AffineMap(a=(a_plus_b - b_minus_a) / 2.0, b=(a_plus_b + b_minus_a) / 2.0)


def write_mesh_csv(mesh: Mesh, path) -> None:
    """CSV with header x,y and 17 significant digits per coordinate."""
    with open(path, "w") as f:
        f.write("x,y\n")
        for row in mesh.points:
            f.write(",".join(f"{v:.17g}" for v in row) + "\n")


def read_mesh_csv(path, degree: int, constant: float | None = None) -> Mesh:
    pts = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return Mesh(points=pts, degree=degree, constant=constant, source="csv")
