"""Extremal-function approximants on evaluation grids, with references.

The two pipelines produce, for a degree k, either the Bergman-based value
v_k = log(B_k)/(2k) or the kernel-integral value u_k, from the plain mesh
measure (SZEF) or from its Bergman-weighted companion (SZEF-BW).  Closed
forms are available for the disk (Lundin) and for centrally symmetric
convex bodies with known dual extreme points (Baran).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator

from .basis import AffineMap, BasisSpec, dimension, eval_basis
from .exceptions import GridConfigError, NoReferenceAvailableError
from .meshes import Mesh, mesh_for_set
from .orthon import (OrthoState, bergman, build_state, evaluate_onb,
                     evaluate_weighted_onb, kernel_l1, weighted_bergman,
                     weighted_kernel_l1)
from .sets import (AffineImage, Box, CompactSet, Disk, Product,
                   RegularPolygon, membership)

__all__ = [
    "EvalGrid",
    "ErrorReport",
    "inverse_joukowski_abs",
    "reference_extremal",
    "szef_values",
    "error_metrics",
    "ratio_sequence",
    "SiciakExtremal",
]


@dataclass(frozen=True)
class EvalGrid:
    """Tensor evaluation grid in C^2 with an E-membership mask."""

    points: np.ndarray            # complex L x 2
    mask: np.ndarray              # True where the point belongs to E
    axes: tuple = ()              # ((min, max, count), ...) construction metadata
    imag_shift: tuple = (0.0, 0.0)

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def outside(self) -> np.ndarray:
        return ~self.mask

    @classmethod
    def tensor(cls, cset: CompactSet, axes, imag_shift=(0.0, 0.0),
               tol: float = 1e-12) -> "EvalGrid":
        """Grid from per-axis (min, max, count) plus optional imaginary shifts."""
        coords = []
        for (lo, hi, count), shift in zip(axes, imag_shift):
            if count < 2:
                raise GridConfigError("grid needs at least 2 points per axis")
            coords.append(np.linspace(lo, hi, count) + 1j * shift)
        Z1, Z2 = np.meshgrid(coords[0], coords[1], indexing="ij")
        pts = np.column_stack([Z1.ravel(), Z2.ravel()])
        mask = membership(cset, pts, tol=tol)
        return cls(points=pts, mask=mask, axes=tuple(tuple(a) for a in axes),
                   imag_shift=tuple(imag_shift))


def inverse_joukowski_abs(zeta: np.ndarray) -> np.ndarray:
    """|h(zeta)| for the inverse Joukowski branch with modulus >= 1."""
    zeta = np.asarray(zeta, dtype=complex)
    w = np.sqrt(zeta * zeta - 1.0)
    mod = np.maximum(np.abs(zeta + w), np.abs(zeta - w))
    return np.maximum(mod, 1.0)  # clip roundoff below the unit circle


def _dual_extreme_points(cset: CompactSet) -> np.ndarray:
    if isinstance(cset, (Box, Product)):
        intervals = cset.intervals if isinstance(cset, Box) else (cset.first, cset.second)
        if any(abs(lo + hi) > 1e-15 for lo, hi in intervals):
            raise NoReferenceAvailableError("Baran reference needs a centrally "
                                            "symmetric box")
        half = [hi for _, hi in intervals]
        return np.array([[1.0 / half[0], 0.0], [-1.0 / half[0], 0.0],
                         [0.0, 1.0 / half[1]], [0.0, -1.0 / half[1]]])
    if isinstance(cset, RegularPolygon):
        if cset.m % 2 != 0 or tuple(cset.center) != (0.0, 0.0):
            raise NoReferenceAvailableError("Baran reference needs an even-m "
                                            "polygon centred at 0")
        j = np.arange(cset.m)
        ang = (2 * j + 1) * np.pi / cset.m
        scale = 1.0 / (cset.circumradius * np.cos(np.pi / cset.m))
        return scale * np.stack([np.cos(ang), np.sin(ang)], axis=1)
    raise NoReferenceAvailableError(f"no dual description for {cset.describe()}")


def reference_extremal(cset: CompactSet, points: np.ndarray) -> np.ndarray:
    """Closed-form extremal function values at complex points.

    Disk: Lundin formula with argument |z1|^2 + |z2|^2 + |z.z - 1|.
    Centrally symmetric convex bodies (boxes, even regular polygons):
    Baran formula over the dual extreme points.
    """
    points = np.asarray(points, dtype=complex)
    if isinstance(cset, AffineImage):
        return reference_extremal(cset.base, cset.map.apply(points))
    if isinstance(cset, Disk):
        z = (points - np.asarray(cset.center)) / cset.radius
        norm2 = np.abs(z[:, 0]) ** 2 + np.abs(z[:, 1]) ** 2
        bilinear = z[:, 0] ** 2 + z[:, 1] ** 2
        arg = norm2 + np.abs(bilinear - 1.0)
        return 0.5 * np.log(inverse_joukowski_abs(arg))
    duals = _dual_extreme_points(cset)
    vals = np.zeros(points.shape[0])
    for w in duals:
        vals = np.maximum(vals, np.log(inverse_joukowski_abs(points @ w)))
    return vals


def szef_values(state: OrthoState, grid_points: np.ndarray, quantity: str = "v",
                weighted: bool = False) -> np.ndarray:
    """u_k or v_k at complex target points from a prepared state."""
    k = state.degree
    WT = eval_basis(state.spec, k, grid_points, mode="recurrence")
    if weighted:
        Wt = evaluate_weighted_onb(state, WT)
        if quantity == "v":
            return np.log(weighted_bergman(state, Wt)) / (2.0 * k)
        return np.log(weighted_kernel_l1(state, Wt)) / k
    W = evaluate_onb(state, WT)
    if quantity == "v":
        return np.log(bergman(state, W)) / (2.0 * k)
    return np.log(kernel_l1(state, W)) / k


@dataclass
class ErrorReport:
    """Per-degree errors over the off-E part of the grid, plus ratio sequence."""

    degrees: list
    e1: list
    e1_rel: list
    e_inf: list
    s_k: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {"degrees": list(self.degrees), "e1": list(self.e1),
                "e1_rel": list(self.e1_rel), "e_inf": list(self.e_inf),
                "s_k": list(self.s_k)}


def _mean_abs(diff: np.ndarray) -> float:
    return math.fsum(np.abs(diff).tolist()) / diff.size


def error_metrics(approx: np.ndarray, reference: np.ndarray,
                  outside: np.ndarray) -> tuple:
    """(e1, e1_rel, e_inf) over the points flagged outside E."""
    if not np.any(outside):
        raise GridConfigError("grid has no points off E; errors are undefined")
    diff = np.asarray(approx)[outside] - np.asarray(reference)[outside]
    e1 = _mean_abs(diff)
    denom = math.fsum(np.asarray(reference)[outside].tolist())
    e1_rel = math.fsum(np.abs(diff).tolist()) / denom if denom != 0.0 else None
    e_inf = float(np.abs(diff).max())
    return e1, e1_rel, e_inf


def ratio_sequence(fields: list, outside: np.ndarray | None = None) -> list:
    """s_k = e1(f_{k+2}, f_{k+1}) / e1(f_{k+1}, f_k) over consecutive approximants."""
    n = len(fields)
    sel = slice(None) if outside is None else outside
    diffs = [_mean_abs(np.asarray(fields[i + 1])[sel] - np.asarray(fields[i])[sel])
             for i in range(n - 1)]
    return [diffs[i + 1] / diffs[i] if diffs[i] != 0.0 else None
            for i in range(len(diffs) - 1)]


class SiciakExtremal(BaseEstimator):
    """Extremal-function approximant of a compact set at one degree.

    Parameters
    ----------
    cset : CompactSet
        The compact (real) set whose extremal function is approximated.
    degree : int
        Polynomial degree k of the approximant.
    method : {"szef", "szef-bw"}
        Plain mesh measure, or its Bergman-weighted second stage.
    quantity : {"v", "u"}
        Bergman-based value log(B_k)/(2k) or kernel-integral value.
    m_factor : float
        Oversampling of the square test mesh (ignored by other geometries).
    """

    def __init__(self, cset: CompactSet = None, degree: int = 4,
                 method: str = "szef", quantity: str = "v",
                 m_factor: float = 2.0):
        self.cset = cset
        self.degree = degree
        self.method = method
        self.quantity = quantity
        self.m_factor = m_factor

    def fit(self, X=None, y=None) -> "SiciakExtremal":
        """Build the mesh (or adopt X as one) and orthonormalize over it."""
        if self.method not in ("szef", "szef-bw"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.quantity not in ("u", "v"):
            raise ValueError(f"unknown quantity {self.quantity!r}")
        if self.degree < 1:
            raise ValueError("degree must be >= 1")
        if X is not None:
            X = np.asarray(X, dtype=float)
            mesh = Mesh(points=X, degree=self.degree, constant=None, source="user")
        else:
            mesh = mesh_for_set(self.cset, self.degree, purpose="extremal",
                                m_factor=self.m_factor)
        spec = BasisSpec(kind="chebyshev", map=AffineMap.bounding(mesh.points))
        self.mesh_ = mesh
        self.state_ = build_state(mesh, spec, k=self.degree,
                                  weighted=(self.method == "szef-bw"))
        return self

    def predict(self, Z: np.ndarray) -> np.ndarray:
        """Approximant values at complex points Z (L x 2)."""
        Z = np.atleast_2d(np.asarray(Z))
        return szef_values(self.state_, Z, quantity=self.quantity,
                           weighted=(self.method == "szef-bw"))
