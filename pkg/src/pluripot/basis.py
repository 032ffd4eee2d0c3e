"""Graded-lex multi-indices and polynomial bases with derivatives.

Two bases are supported on ``C^n``: the graded lexicographically ordered
monomials and the adapted Chebyshev product basis obtained by composing
1-D Chebyshev polynomials with a per-coordinate affine map.  Ranks are
1-based throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .exceptions import DomainError, FlatMeshError, SizeError

__all__ = [
    "AffineMap",
    "BasisSpec",
    "dimension",
    "graded_lex_index",
    "multi_index_list",
    "eval_basis",
    "eval_basis_derivatives",
]


def dimension(n: int, k: int) -> int:
    """Dimension of the space of polynomials of total degree <= k in n variables."""
    if n < 1 or k < 0:
        raise ValueError(f"need n >= 1 and k >= 0, got n={n}, k={k}")
    value = math.comb(n + k, n)
    if value > 2**53:
        raise SizeError(f"dimension binom({n + k},{n}) exceeds exactly representable range")
    return value


def _degree_block(n: int, d: int) -> Iterator[tuple[int, ...]]:
    # lexicographic (first coordinate ascending) enumeration of |alpha| = d
    if n == 1:
        yield (d,)
        return
    for first in range(d + 1):
        for rest in _degree_block(n - 1, d - first):
            yield (first, *rest)


def multi_index_list(n: int, k: int) -> np.ndarray:
    """All multi-indices with |alpha| <= k in graded lex order, shape (N_k, n)."""
    rows = [alpha for d in range(k + 1) for alpha in _degree_block(n, d)]
    return np.array(rows, dtype=np.int64).reshape(len(rows), n)


def graded_lex_index(i: int, n: int) -> tuple[int, ...]:
    """The i-th multi-index (1-based) of the graded lex order on N^n."""
    if i < 1:
        raise ValueError(f"rank must be >= 1, got {i}")
    remaining = i - 1
    d = 0
    while True:
        block = math.comb(n + d - 1, n - 1)  # number of alpha with |alpha| = d
        if remaining < block:
            break
        remaining -= block
        d += 1
    for pos, alpha in enumerate(_degree_block(n, d)):
        if pos == remaining:
            return alpha
    raise AssertionError("unreachable")


@dataclass(frozen=True)
class AffineMap:
    """Per-coordinate map z_i -> 2/(b_i - a_i) * (z_i - (a_i + b_i)/2)."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if a.shape != b.shape or a.ndim != 1:
            raise ValueError("a and b must be 1-D arrays of equal length")
        if np.any(b <= a):
            raise FlatMeshError(f"degenerate interval(s): a={a}, b={b}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def n(self) -> int:
        return self.a.size

    @property
    def scale(self) -> np.ndarray:
        """d(mapped)/dz per coordinate."""
        return 2.0 / (self.b - self.a)

    def apply(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points)
        return (points - (self.a + self.b) / 2.0) * self.scale

    @classmethod
    def identity(cls, n: int) -> "AffineMap":
        return cls(a=-np.ones(n), b=np.ones(n))

    @classmethod
    def bounding(cls, points: np.ndarray) -> "AffineMap":
        """Map sending the coordinate-wise bounding box of `points` onto [-1,1]^n."""
        points = np.asarray(points, dtype=float)
        if points.ndim != 2 or points.shape[0] < 2:
            raise ValueError("need an M x n array with M >= 2")
        a = points.min(axis=0)
        b = points.max(axis=0)
        if np.any(b <= a):
            flat = np.nonzero(b <= a)[0]
            raise FlatMeshError(f"mesh is flat along coordinate(s) {flat.tolist()}")
        return cls(a=a, b=b)


# kept as a function name mirroring its role; AffineMap.bounding does the work
def bounding_affine_map(points: np.ndarray) -> AffineMap:
    return AffineMap.bounding(points)


@dataclass(frozen=True)
class BasisSpec:
    """Basis selector: graded-lex monomials or affine-adapted Chebyshev products."""

    kind: str = "chebyshev"
    map: AffineMap | None = None

    def __post_init__(self):
        if self.kind not in ("monomial", "chebyshev"):
            raise ValueError(f"unknown basis kind {self.kind!r}")

    def mapped(self, points: np.ndarray) -> np.ndarray:
        if self.kind == "chebyshev" and self.map is not None:
            return self.map.apply(points)
        return np.asarray(points)

    def scales(self, n: int) -> np.ndarray:
        if self.kind == "chebyshev" and self.map is not None:
            return self.map.scale
        return np.ones(n)


def _cheb_recurrence(x: np.ndarray, k: int, with_deriv: bool = False):
    """T_0..T_k at x, shape (..., k+1); optionally also T'_0..T'_k."""
    shape = x.shape + (k + 1,)
    T = np.zeros(shape, dtype=x.dtype)
    T[..., 0] = 1.0
    if k >= 1:
        T[..., 1] = x
    for h in range(1, k):
        T[..., h + 1] = 2.0 * x * T[..., h] - T[..., h - 1]
    if not with_deriv:
        return T
    dT = np.zeros(shape, dtype=x.dtype)
    if k >= 1:
        dT[..., 1] = 1.0
    for h in range(1, k):
        dT[..., h + 1] = 2.0 * T[..., h] + 2.0 * x * dT[..., h] - dT[..., h - 1]
    return T, dT


def _cheb_closed_form(x: np.ndarray, k: int) -> np.ndarray:
    if np.iscomplexobj(x):
        if np.any(np.abs(x.imag) > 1e-14):
            raise DomainError("closed-form Chebyshev evaluation needs real points")
        x = x.real
    if np.any(x < -1.0 - 1e-12) or np.any(x > 1.0 + 1e-12):
        raise DomainError("closed-form Chebyshev evaluation needs points in [-1,1]")
    xc = np.clip(x, -1.0, 1.0)
    h = np.arange(k + 1)
    return np.cos(h * np.arccos(xc)[..., None])


def _monomial_powers(x: np.ndarray, k: int, with_deriv: bool = False):
    shape = x.shape + (k + 1,)
    P = np.ones(shape, dtype=x.dtype)
    for h in range(1, k + 1):
        P[..., h] = P[..., h - 1] * x
    if not with_deriv:
        return P
    dP = np.zeros(shape, dtype=x.dtype)
    for h in range(1, k + 1):
        dP[..., h] = h * P[..., h - 1]
    return P, dP


def _coordinate_tables(spec: BasisSpec, k: int, points: np.ndarray, mode: str,
                       with_deriv: bool = False):
    points = np.asarray(points)
    if points.ndim != 2:
        raise ValueError("points must be an L x n array")
    dtype = complex if np.iscomplexobj(points) else float
    mapped = spec.mapped(points.astype(dtype))
    if spec.kind == "monomial":
        return _monomial_powers(mapped.T, k, with_deriv)
    if mode == "closed-form":
        if with_deriv:
            raise ValueError("derivatives are only available in recurrence mode")
        return _cheb_closed_form(mapped.T, k)
    return _cheb_recurrence(mapped.T, k, with_deriv)


def eval_basis(spec: BasisSpec, k: int, points: np.ndarray,
               mode: str = "recurrence") -> np.ndarray:
    """Evaluate all basis functions of degree <= k at `points`.

    Returns an L x N_k matrix with entry (i, j) = phi_j(point_i), columns in
    graded lex order.  `mode` is "recurrence" (any complex points) or
    "closed-form" (cosine formula, mapped points must be real in [-1,1]^n).
    """
    if mode not in ("recurrence", "closed-form"):
        raise ValueError(f"unknown mode {mode!r}")
    points = np.asarray(points)
    n = points.shape[1]
    tables = _coordinate_tables(spec, k, points, mode)  # (n, L, k+1)
    alphas = multi_index_list(n, k)
    out = tables[0][:, alphas[:, 0]]
    for c in range(1, n):
        out = out * tables[c][:, alphas[:, c]]
    return out


def eval_basis_derivatives(spec: BasisSpec, k: int, points: np.ndarray) -> np.ndarray:
    """Partial derivatives of every basis function: L x N_k x n tensor.

    Entry (i, j, m) is d(phi_j)/dz_m at point_i, computed by the
    differentiated recurrence and the chain rule through the affine map.
    """
    points = np.asarray(points)
    L, n = points.shape
    tables, dtables = _coordinate_tables(spec, k, points, "recurrence", with_deriv=True)
    scales = spec.scales(n)
    alphas = multi_index_list(n, k)
    N = alphas.shape[0]
    dtype = tables.dtype
    out = np.empty((L, N, n), dtype=dtype)
    for m in range(n):
        col = scales[m] * dtables[m][:, alphas[:, m]]
        for c in range(n):
            if c != m:
                col = col * tables[c][:, alphas[:, c]]
        out[:, :, m] = col
    return out
