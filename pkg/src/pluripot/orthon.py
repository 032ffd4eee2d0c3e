"""Twice-QR orthonormalization over a mesh measure and derived quantities.

The mesh carries the uniform probability measure on its points.  A single
QR pass can leave the computed basis far from orthonormal when the
Vandermonde matrix is ill-conditioned, so a second pass is always applied
and both triangular factors are kept: every later evaluation goes through
the same pair (or triple, in the Bergman-weighted stage) of back
substitutions instead of forming any inverse.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .basis import BasisSpec, dimension, eval_basis
from .exceptions import (ConditioningWarning, DegenerateWeightError,
                         NonUnisolventMeshError)
from .meshes import Mesh

__all__ = [
    "OrthoState",
    "orthonormalize",
    "build_state",
    "evaluate_onb",
    "bergman",
    "kernel_l1",
    "bergman_weights",
    "weighted_orthonormalize",
    "evaluate_weighted_onb",
    "weighted_bergman",
    "weighted_kernel_l1",
]

COND_WARN_THRESHOLD = 1e15


def _positive_diagonal(Q: np.ndarray, R: np.ndarray):
    """Flip column signs so diag(R) > 0; makes the constant polynomial positive."""
    s = np.sign(np.diag(R))
    s[s == 0] = 1.0
    return Q * s, R * s[:, None]


def _right_solve(B: np.ndarray, R: np.ndarray) -> np.ndarray:
    """B @ inv(R) for upper-triangular R, by back substitution."""
    return solve_triangular(R, B.T, trans="T", lower=False).T


def _check_condition(R: np.ndarray, label: str) -> None:
    d = np.abs(np.diag(R))
    if d.min() == 0.0:
        return  # rank handling happens elsewhere
    est = d.max() / d.min()
    if est > COND_WARN_THRESHOLD:
        warnings.warn(f"triangular factor {label} has condition estimate "
                      f"{est:.2e}", ConditioningWarning)


@dataclass
class OrthoState:
    """Factorizations defining the orthonormal polynomials of one mesh/degree."""

    mesh: Mesh
    degree: int
    spec: BasisSpec
    R1: np.ndarray
    R2: np.ndarray
    Q: np.ndarray
    sigma: np.ndarray | None = None   # Bergman weights (weighted stage)
    Rw: np.ndarray | None = None
    Qw: np.ndarray | None = None

    @property
    def size(self) -> int:
        return self.Q.shape[0]

    @property
    def space_dim(self) -> int:
        return self.Q.shape[1]


def orthonormalize(V: np.ndarray):
    """Twice-QR of the mesh Vandermonde V (M x N_k, full rank).

    Returns (Q, R1, R2) with sqrt(M) * Q(i, j) the j-th orthonormal
    polynomial at mesh point i.
    """
    V = np.asarray(V, dtype=float)
    M, N = V.shape
    if M < N:
        raise NonUnisolventMeshError(f"mesh of {M} points cannot determine a "
                                     f"{N}-dimensional polynomial space")
    _, R1 = np.linalg.qr(V)
    dmin = np.abs(np.diag(R1)).min()
    if dmin <= N * np.finfo(float).eps * np.abs(np.diag(R1)).max():
        raise NonUnisolventMeshError("numerically rank-deficient Vandermonde; "
                                     "mesh is not unisolvent for this degree")
    # positive-diagonal convention on R1 (row flips) keeps factors deterministic
    s = np.sign(np.diag(R1)).copy()
    s[s == 0] = 1.0
    R1 = np.triu(R1) * s[:, None]
    _check_condition(R1, "R1")
    Q, R2 = np.linalg.qr(_right_solve(V, R1))
    Q, R2 = _positive_diagonal(Q, np.triu(R2))
    _check_condition(R2, "R2")
    return Q, R1, R2


def build_state(mesh: Mesh, spec: BasisSpec, k: int | None = None,
                weighted: bool = False, mode: str = "closed-form") -> OrthoState:
    """Orthonormalize the mesh Vandermonde in the given basis."""
    k = mesh.degree if k is None else k
    V = eval_basis(spec, k, mesh.points, mode=mode)
    Q, R1, R2 = orthonormalize(np.real_if_close(V))
    state = OrthoState(mesh=mesh, degree=k, spec=spec, R1=R1, R2=R2, Q=Q)
    if weighted:
        weighted_orthonormalize(state)
    return state


def evaluate_onb(state: OrthoState, WT: np.ndarray) -> np.ndarray:
    """Push target-basis evaluations through both triangular factors.

    Returns W with W(i, j) = p_j(zeta_i); orthonormal values are sqrt(M) * W.
    """
    _check_condition(state.R1, "R1")
    _check_condition(state.R2, "R2")
    return _right_solve(_right_solve(np.asarray(WT), state.R1), state.R2)


def bergman(state: OrthoState, W: np.ndarray | None = None) -> np.ndarray:
    """Bergman function B_k = sum_j |q_j|^2 at targets (mesh points if W is None)."""
    W = state.Q if W is None else W
    return state.size * np.einsum("ij,ij->i", W, W.conj()).real


def kernel_l1(state: OrthoState, W: np.ndarray, block: int = 2048) -> np.ndarray:
    """integral of |K_k(zeta_i, .)| d(mesh measure) for each target row of W."""
    W = np.asarray(W)
    out = np.empty(W.shape[0], dtype=float)
    for lo in range(0, W.shape[0], block):
        hi = min(lo + block, W.shape[0])
        # rows are never split, so the result is partition independent
        out[lo:hi] = np.abs(W[lo:hi] @ state.Q.T).sum(axis=1)
    return out


def bergman_weights(state: OrthoState) -> np.ndarray:
    """sigma_i = (M/N) * sum_j Q(i,j)^2 = B_k(z_i)/N_k; mean(sigma) = 1."""
    M, N = state.Q.shape
    return (M / N) * np.einsum("ij,ij->i", state.Q, state.Q)


def weighted_orthonormalize(state: OrthoState) -> OrthoState:
    """Bergman-weighted second stage: QR of sqrt(sigma)-scaled Q."""
    sigma = bergman_weights(state)
    if sigma.min() < 1e-300:
        raise DegenerateWeightError("Bergman weight underflow on the mesh")
    Vw = np.sqrt(sigma)[:, None] * state.Q
    Qw, Rw = np.linalg.qr(Vw)
    Rw = np.triu(Rw)
    Qw, Rw = _positive_diagonal(Qw, Rw)
    _check_condition(Rw, "Rw")
    state.sigma, state.Qw, state.Rw = sigma, Qw, Rw
    return state


def evaluate_weighted_onb(state: OrthoState, WT: np.ndarray) -> np.ndarray:
    """Weighted-basis values at targets: WT through R1, R2 and Rw."""
    if state.Rw is None:
        raise ValueError("weighted stage not computed; call weighted_orthonormalize")
    return _right_solve(evaluate_onb(state, WT), state.Rw)


def weighted_bergman(state: OrthoState, Wt: np.ndarray | None = None) -> np.ndarray:
    """Bergman function of the weighted measure at targets (mesh if Wt is None)."""
    if state.Qw is None:
        raise ValueError("weighted stage not computed")
    if Wt is None:
        # on the mesh, q~_j(z_i) = sqrt(M) sigma_i^(-1/2) Qw(i, j)
        vals = np.einsum("ij,ij->i", state.Qw, state.Qw)
        return state.size * vals / state.sigma
    return state.size * np.einsum("ij,ij->i", Wt, Wt.conj()).real


def weighted_kernel_l1(state: OrthoState, Wt: np.ndarray, block: int = 2048) -> np.ndarray:
    """integral of |K~_k(zeta_i, .)| against the weighted mesh measure."""
    if state.Qw is None:
        raise ValueError("weighted stage not computed")
    Wt = np.asarray(Wt)
    sqrt_sigma = np.sqrt(state.sigma)
    out = np.empty(Wt.shape[0], dtype=float)
    for lo in range(0, Wt.shape[0], block):
        hi = min(lo + block, Wt.shape[0])
        out[lo:hi] = (np.abs(Wt[lo:hi] @ state.Qw.T) * sqrt_sigma).sum(axis=1)
    return out
