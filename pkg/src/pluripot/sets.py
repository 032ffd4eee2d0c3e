"""Compact set descriptors with exact membership predicates.

All sets live in R^n (n = 2 for the supplied geometries).  Membership of a
complex point requires a (tolerance-) zero imaginary part plus the real
predicate of the set.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import AffineMap

__all__ = [
    "CompactSet",
    "Box",
    "Disk",
    "RegularPolygon",
    "Simplex",
    "AffineImage",
    "Product",
    "membership",
]


class CompactSet:
    """Base class for compact subsets of R^n."""

    n = 2

    def contains(self, points: np.ndarray, tol: float = 1e-12) -> np.ndarray:
        """Vectorized real membership test; `points` is (L, n) real."""
        raise NotImplementedError

    def describe(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class Box(CompactSet):
    """Cartesian product of closed intervals."""

    intervals: tuple = ((-1.0, 1.0), (-1.0, 1.0))

    @property
    def n(self) -> int:
        return len(self.intervals)

    def contains(self, points, tol=1e-12):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        ok = np.ones(points.shape[0], dtype=bool)
        for c, (lo, hi) in enumerate(self.intervals):
            ok &= (points[:, c] >= lo - tol) & (points[:, c] <= hi + tol)
        return ok

    def describe(self):
        return "box " + "x".join(f"[{lo},{hi}]" for lo, hi in self.intervals)


@dataclass(frozen=True)
class Disk(CompactSet):
    """Closed disk in R^2."""

    center: tuple = (0.0, 0.0)
    radius: float = 1.0

    def contains(self, points, tol=1e-12):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        d = points - np.asarray(self.center)
        return np.hypot(d[:, 0], d[:, 1]) <= self.radius + tol

    def describe(self):
        return f"disk center={self.center} radius={self.radius}"


@dataclass(frozen=True)
class RegularPolygon(CompactSet):
    """Regular m-gon with vertices at angles 2*pi*j/m on the circumcircle."""

    m: int = 6
    center: tuple = (0.0, 0.0)
    circumradius: float = 1.0

    def __post_init__(self):
        if self.m < 3:
            raise ValueError(f"polygon needs m >= 3, got {self.m}")

    def vertices(self) -> np.ndarray:
        j = np.arange(self.m)
        ang = 2.0 * np.pi * j / self.m
        return np.asarray(self.center) + self.circumradius * np.stack(
            [np.cos(ang), np.sin(ang)], axis=1)

    def contains(self, points, tol=1e-12):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        v = self.vertices()
        ok = np.ones(points.shape[0], dtype=bool)
        for j in range(self.m):
            a, b = v[j], v[(j + 1) % self.m]
            edge = b - a
            # interior lies to the left of each ccw edge
            cross = edge[0] * (points[:, 1] - a[1]) - edge[1] * (points[:, 0] - a[0])
            ok &= cross >= -tol * max(1.0, self.circumradius)
        return ok

    def describe(self):
        return f"regular {self.m}-gon center={self.center} circumradius={self.circumradius}"


@dataclass(frozen=True)
class Simplex(CompactSet):
    """Unit simplex {x >= 0, x_1 + x_2 <= 1} in R^2."""

    def contains(self, points, tol=1e-12):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return ((points[:, 0] >= -tol) & (points[:, 1] >= -tol)
                & (points[:, 0] + points[:, 1] <= 1.0 + tol))

    def describe(self):
        return "unit simplex"


@dataclass(frozen=True)
class AffineImage(CompactSet):
    """Image of a base set under the inverse of a per-coordinate AffineMap.

    The stored map sends this set onto the base set, so membership pulls
    points back through it.
    """

    base: CompactSet
    map: AffineMap

    @property
    def n(self) -> int:
        return self.base.n

    def contains(self, points, tol=1e-12):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return self.base.contains(self.map.apply(points), tol=tol)

    def describe(self):
        return f"affine image of ({self.base.describe()})"


@dataclass(frozen=True)
class Product(CompactSet):
    """Cartesian product of two 1-D closed intervals."""

    first: tuple = (-1.0, 1.0)
    second: tuple = (-1.0, 1.0)

    def contains(self, points, tol=1e-12):
        return Box(intervals=(self.first, self.second)).contains(points, tol=tol)

    def describe(self):
        return f"product [{self.first[0]},{self.first[1]}] x [{self.second[0]},{self.second[1]}]"


def membership(cset: CompactSet, points: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Membership of complex points: real (within tol) and inside the set."""
    points = np.atleast_2d(np.asarray(points))
    if np.iscomplexobj(points):
        real_part = points.real
        is_real = np.all(np.abs(points.imag) <= tol, axis=1)
    else:
        real_part = points
        is_real = np.ones(points.shape[0], dtype=bool)
    return is_real & cset.contains(real_part, tol=tol)
