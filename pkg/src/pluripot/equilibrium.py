"""Equilibrium-measure density via the complex Hessian of log-Bergman.

The density at a point needs only the orthonormal polynomial values b and
their holomorphic partial derivatives D; two algebraically identical
routes are provided (adjugate expansion and thin-QR projector form),
together with a finite-difference Hessian oracle, approximate-Fekete
extraction and discrete moment helpers.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .basis import BasisSpec, eval_basis, eval_basis_derivatives
from .exceptions import OraclePrecisionWarning
from .meshes import Mesh
from .orthon import OrthoState, _right_solve, bergman_weights, build_state
from .sets import CompactSet, membership

__all__ = [
    "DerivativeBundle",
    "DensityField",
    "FeketeSelection",
    "derivative_bundles",
    "density_adjugate",
    "density_qr",
    "equilibrium_density",
    "fd_hessian_density",
    "afp_extract",
    "discrete_measure_moments",
]


@dataclass(frozen=True)
class DerivativeBundle:
    """Orthonormal polynomial values and their partials at one point."""

    b: np.ndarray       # N_k values q_1..q_N
    D: np.ndarray       # N_k x n partials, D[h, i] = d(q_h)/dz_i


@dataclass
class DensityField:
    """Monge-Ampere density of log(B_k)/(2k) sampled on a grid."""

    points: np.ndarray
    mask: np.ndarray              # E membership of the grid points
    degree: int
    raw: np.ndarray
    restricted: np.ndarray        # raw * chi_E
    normalized: np.ndarray | None = None


@dataclass(frozen=True)
class FeketeSelection:
    """Indices of an approximate Fekete subset of a mesh."""

    indices: np.ndarray
    degree: int
    log_abs_det: float


def _adjugate(A: np.ndarray) -> np.ndarray:
    """Adjugate of a small (n <= 3) square matrix, defined for singular A too."""
    n = A.shape[0]
    if n == 1:
        return np.ones((1, 1), dtype=A.dtype)
    if n == 2:
        return np.array([[A[1, 1], -A[0, 1]], [-A[1, 0], A[0, 0]]], dtype=A.dtype)
    if n == 3:
        out = np.empty((3, 3), dtype=A.dtype)
        for i in range(3):
            for j in range(3):
                minor = np.delete(np.delete(A, j, axis=0), i, axis=1)
                out[i, j] = (-1) ** (i + j) * (minor[0, 0] * minor[1, 1]
                                               - minor[0, 1] * minor[1, 0])
        return out
    raise ValueError("adjugate path is implemented for n <= 3 only")


def density_adjugate(bundle: DerivativeBundle, k: int) -> float:
    """Density from the adjugate expansion of the rank-one-corrected Gram of D."""
    b, D = bundle.b, bundle.D
    n = D.shape[1]
    b2 = float(np.vdot(b, b).real)
    A = D.conj().T @ D
    g = D.conj().T @ b                      # D^H b, length n
    correction = float((g.conj() @ (_adjugate(A) @ g)).real) / b2
    det_A = float(np.linalg.det(A).real) if n > 1 else float(A[0, 0].real)
    return (det_A - correction) / (2.0 * k * b2) ** n


def density_qr(bundle: DerivativeBundle, k: int) -> float:
    """Density from the thin-QR projector form; needs D of full column rank."""
    b, D = bundle.b, bundle.D
    n = D.shape[1]
    Q, R = np.linalg.qr(D)
    diag = np.abs(np.diag(R))
    if diag.min() <= D.shape[0] * np.finfo(float).eps * max(diag.max(), 1.0):
        return density_adjugate(bundle, k)   # rank-deficient fallback
    b2 = float(np.vdot(b, b).real)
    det_S = float(np.prod(diag) ** 2)        # det(R^H R)
    u = b / np.sqrt(b2)
    w = Q.conj().T @ u
    quad = float((np.vdot(u, u) - np.vdot(w, w)).real)  # u^H (I - QQ^H) u
    return det_S * quad / (2.0 * k * b2) ** n


def derivative_bundles(state: OrthoState, points: np.ndarray) -> list:
    """Orthonormal values and partials at each point, via the stored factors."""
    points = np.atleast_2d(np.asarray(points))
    k, spec, M = state.degree, state.spec, state.size
    WT = eval_basis(spec, k, points, mode="recurrence")
    dWT = eval_basis_derivatives(spec, k, points)
    W = _push(state, WT)
    dW = np.stack([_push(state, dWT[:, :, m]) for m in range(points.shape[1])], axis=2)
    root_m = np.sqrt(M)
    return [DerivativeBundle(b=root_m * W[i], D=root_m * dW[i]) for i in range(points.shape[0])]


def _push(state: OrthoState, B: np.ndarray) -> np.ndarray:
    out = _right_solve(_right_solve(B, state.R1), state.R2)
    if state.Rw is not None:
        out = _right_solve(out, state.Rw)
    return out


def equilibrium_density(state: OrthoState, cset: CompactSet, points: np.ndarray,
                        normalize: bool = False, cell_volume: float = 1.0) -> DensityField:
    """Monge-Ampere density field on real grid points.

    The raw field is reported everywhere; the restricted field zeroes
    points off E; the normalized field (optional) rescales the restricted
    one to unit discrete mass over the inside points.
    """
    points = np.atleast_2d(np.asarray(points))
    bundles = derivative_bundles(state, points)
    raw = np.array([density_qr(bu, state.degree) for bu in bundles])
    mask = membership(cset, points)
    restricted = np.where(mask, raw, 0.0)
    normalized = None
    if normalize:
        mass = restricted.sum() * cell_volume
        normalized = restricted / mass if mass > 0 else restricted
    return DensityField(points=points, mask=mask, degree=state.degree,
                        raw=raw, restricted=restricted, normalized=normalized)


def fd_hessian_density(v, point: np.ndarray, step: float = 1e-4,
                       check: bool = True) -> float:
    """Determinant of the complex Hessian of v by central differences.

    `v` maps an (L, n) complex array to L real values.  The 2n x 2n real
    Hessian is assembled first, then contracted through
    d^2/dz_i dz_bar_j = (1/4)(d_xi d_xj + d_yi d_yj + i(d_xi d_yj - d_yi d_xj)).
    """
    point = np.asarray(point, dtype=complex).reshape(-1)
    n = point.size
    value = _fd_complex_hessian_det(v, point, n, step)
    if check:
        half = _fd_complex_hessian_det(v, point, n, step / 2.0)
        scale = max(abs(value), abs(half), 1e-300)
        if abs(value - half) > 0.05 * scale:
            warnings.warn(f"finite-difference Hessian disagrees under step "
                          f"halving ({value:.6e} vs {half:.6e})",
                          OraclePrecisionWarning)
    return value


def _fd_complex_hessian_det(v, point: np.ndarray, n: int, h: float) -> float:
    dim = 2 * n

    def shift(i, amount):
        delta = np.zeros(n, dtype=complex)
        if i < n:
            delta[i] = amount
        else:
            delta[i - n] = 1j * amount
        return point + delta

    # batch all stencil points into one call to v
    stencil = [point]
    for i in range(dim):
        stencil += [shift(i, h), shift(i, -h)]
    pairs = [(i, j) for i in range(dim) for j in range(i + 1, dim)]
    for i, j in pairs:
        base = shift(i, h)
        stencil += [_shift_from(base, j, h, n), _shift_from(base, j, -h, n)]
        base = shift(i, -h)
        stencil += [_shift_from(base, j, h, n), _shift_from(base, j, -h, n)]
    vals = np.asarray(v(np.array(stencil)), dtype=float)

    H = np.zeros((dim, dim))
    v0 = vals[0]
    for i in range(dim):
        vp, vm = vals[1 + 2 * i], vals[2 + 2 * i]
        H[i, i] = (vp - 2.0 * v0 + vm) / h ** 2
    off = 1 + 2 * dim
    for idx, (i, j) in enumerate(pairs):
        vpp, vpm, vmp, vmm = vals[off + 4 * idx: off + 4 * idx + 4]
        H[i, j] = H[j, i] = (vpp - vpm - vmp + vmm) / (4.0 * h ** 2)

    Hc = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            Hc[i, j] = 0.25 * (H[i, j] + H[n + i, n + j]
                               + 1j * (H[i, n + j] - H[n + i, j]))
    return float(np.linalg.det(Hc).real)


def _shift_from(base: np.ndarray, j: int, amount: float, n: int) -> np.ndarray:
    out = base.copy()
    if j < n:
        out[j] += amount
    else:
        out[j - n] += 1j * amount
    return out


def afp_extract(mesh: Mesh, k: int | None = None,
                state: OrthoState | None = None) -> FeketeSelection:
    """Greedy approximate-Fekete subset of a mesh.

    The mesh Vandermonde is pre-orthogonalized by the twice-QR state, then
    N_k rows are selected by column-pivoted QR of the transposed matrix,
    which grows the absolute determinant one row at a time.
    """
    k = mesh.degree if k is None else k
    if state is None:
        from .basis import AffineMap
        spec = BasisSpec(kind="chebyshev", map=AffineMap.bounding(mesh.points))
        state = build_state(mesh, spec, k=k)
    Q = state.Q
    N = Q.shape[1]
    _, R, piv = scipy.linalg.qr(Q.T, pivoting=True, mode="economic")
    indices = np.array(piv[:N])
    log_det = float(np.sum(np.log(np.abs(np.diag(R)))))
    return FeketeSelection(indices=indices, degree=k, log_abs_det=log_det)


def discrete_measure_moments(points: np.ndarray, weights: np.ndarray | None,
                             spec: BasisSpec, k_mom: int) -> np.ndarray:
    """Moments of a discrete measure against the basis functions up to k_mom."""
    points = np.atleast_2d(np.asarray(points))
    Phi = eval_basis(spec, k_mom, points, mode="recurrence")
    if weights is None:
        weights = np.full(points.shape[0], 1.0 / points.shape[0])
    return weights @ np.real_if_close(Phi)


def weighted_mesh_moments(state: OrthoState, spec: BasisSpec, k_mom: int) -> np.ndarray:
    """Moments of the Bergman-weighted mesh measure (B_k/N_k) * mu_k."""
    sigma = state.sigma if state.sigma is not None else bergman_weights(state)
    weights = sigma / state.size
    return discrete_measure_moments(state.mesh.points, weights, spec, k_mom)
