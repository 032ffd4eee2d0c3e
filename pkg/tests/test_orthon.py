import numpy as np
import pytest

from pluripot.basis import AffineMap, BasisSpec, dimension, eval_basis
from pluripot.equilibrium import afp_extract
from pluripot.exceptions import NonUnisolventMeshError
from pluripot.meshes import Mesh, mesh_disk, mesh_square, mesh_square_cl
from pluripot.orthon import (bergman, bergman_weights, build_state,
                             evaluate_onb, evaluate_weighted_onb, kernel_l1,
                             orthonormalize, weighted_bergman,
                             weighted_kernel_l1)


def _state(mesh, k=None, weighted=False):
    spec = BasisSpec(kind="chebyshev", map=AffineMap.bounding(mesh.points))
    return build_state(mesh, spec, k=k, weighted=weighted)


def test_orthonormalize_orthonormal_input():
    rng = np.random.default_rng(0)
    V, _ = np.linalg.qr(rng.standard_normal((30, 6)))
    Q, R1, R2 = orthonormalize(V)
    assert np.abs(np.abs(Q) - np.abs(V)).max() < 1e-12
    assert np.abs(np.abs(R1) - np.eye(6)).max() < 1e-12
    assert np.abs(np.abs(R2) - np.eye(6)).max() < 1e-12


@pytest.mark.parametrize("mesh,k", [(mesh_square(10), 10),
                                    (mesh_disk(30), 30),
                                    (mesh_square(30), 30),
                                    (mesh_square_cl(20), 20)])
def test_orthonormality_even_high_degree(mesh, k):
    state = _state(mesh, k)
    gram = state.Q.T @ state.Q
    assert np.abs(gram - np.eye(gram.shape[0])).max() <= 1e-10


def test_constant_polynomial_column():
    state = _state(mesh_square(4), 4)
    assert np.abs(np.sqrt(state.size) * state.Q[:, 0] - 1.0).max() < 1e-10


def test_rank_deficient_mesh_rejected():
    pts = np.column_stack([np.linspace(-1, 1, 12), np.linspace(-1, 1, 12)])
    mesh = Mesh(points=pts, degree=2, constant=None, source="line")
    with pytest.raises(NonUnisolventMeshError):
        _state(mesh, 2)


def test_evaluate_onb_consistency_on_mesh():
    mesh = mesh_square(6)
    state = _state(mesh, 6)
    WT = eval_basis(state.spec, 6, mesh.points, mode="recurrence")
    W = evaluate_onb(state, WT)
    assert np.abs(W - state.Q).max() < 1e-9
    single = evaluate_onb(state, WT[:1])
    assert single[0, 0] == pytest.approx(1.0 / np.sqrt(mesh.size))


def test_evaluate_onb_against_gram_schmidt_oracle():
    """Tiny case: modified Gram-Schmidt in exact arithmetic order."""
    rng = np.random.default_rng(4)
    pts = rng.uniform(-1, 1, size=(6, 2))
    mesh = Mesh(points=pts, degree=1, constant=None, source="tiny")
    state = _state(mesh, 1)
    target = np.array([[0.3 + 0.2j, -0.8j]])
    W = evaluate_onb(state, eval_basis(state.spec, 1, target, mode="recurrence"))
    q_twice_qr = np.sqrt(6) * W[0]

    V = np.real_if_close(eval_basis(state.spec, 1, pts, mode="recurrence"))
    phi_t = eval_basis(state.spec, 1, target, mode="recurrence")[0]
    basis_cols, coeffs = [], []
    for j in range(V.shape[1]):
        col, rep = V[:, j].astype(complex), phi_t[j]
        for prev, prev_rep in zip(basis_cols, coeffs):
            inner = np.vdot(prev, col) / 6.0
            col, rep = col - inner * prev, rep - inner * prev_rep
        norm = np.sqrt(np.vdot(col, col).real / 6.0)
        basis_cols.append(col / norm)
        coeffs.append(rep / norm)
    assert np.abs(q_twice_qr - np.array(coeffs)).max() < 1e-12


def test_bergman_invariants():
    mesh = mesh_square(5)
    state = _state(mesh, 5)
    B = bergman(state)
    N = dimension(2, 5)
    assert abs(B.mean() - N) / N < 1e-10
    rng = np.random.default_rng(5)
    pts = rng.uniform(-1, 1, size=(100, 2))
    W = evaluate_onb(state, eval_basis(state.spec, 5, pts, mode="recurrence"))
    assert bergman(state, W).min() >= 1.0 - 1e-12


def test_degree_zero_bergman_and_kernel():
    mesh = mesh_square(1)
    state = _state(mesh, 0)
    assert np.allclose(bergman(state), 1.0)
    W = evaluate_onb(state, eval_basis(state.spec, 0,
                                       np.array([[0.2, 0.4]]), mode="recurrence"))
    assert kernel_l1(state, W)[0] == pytest.approx(1.0)


def test_kernel_cauchy_schwarz_bound():
    mesh = mesh_square(6)
    state = _state(mesh, 6)
    rng = np.random.default_rng(6)
    pts = rng.uniform(-2, 2, size=(50, 2))
    W = evaluate_onb(state, eval_basis(state.spec, 6, pts, mode="recurrence"))
    N = dimension(2, 6)
    assert (kernel_l1(state, W) <= np.sqrt(N * bergman(state, W)) * (1 + 1e-12)).all()


def test_kernel_l1_is_lebesgue_function_at_minimal_mesh():
    """With M = N_k the kernel integral is the Lebesgue function; compare
    against the Lagrange construction solved directly from the Vandermonde."""
    cl = mesh_square_cl(3)
    sel = afp_extract(cl, 3)
    pts = cl.points[sel.indices]
    mesh = Mesh(points=pts, degree=3, constant=None, source="afp")
    state = _state(mesh, 3)
    targets = np.array([[0.31, -0.57], [0.9, 0.2], [2.0, 1.0], [0.1 + 0.2j, 0.0]])
    W = evaluate_onb(state, eval_basis(state.spec, 3, targets, mode="recurrence"))
    values = kernel_l1(state, W)
    V = np.real_if_close(eval_basis(state.spec, 3, pts, mode="recurrence"))
    Vt = eval_basis(state.spec, 3, targets, mode="recurrence")
    lagrange = np.linalg.solve(V.T, Vt.T).T
    assert np.abs(values - np.abs(lagrange).sum(axis=1)).max() < 1e-9


def test_reproducing_property():
    mesh = mesh_square(5)
    state = _state(mesh, 5)
    rng = np.random.default_rng(7)
    coeff = rng.standard_normal(dimension(2, 5))
    V = np.real_if_close(eval_basis(state.spec, 5, mesh.points, mode="recurrence"))
    p = V @ coeff
    # (1/M) sum_h K(z_i, zeta_h) p(zeta_h) with K = M * Q Q^T
    reproduced = state.Q @ (state.Q.T @ p)
    assert np.abs(reproduced - p).max() / np.abs(p).max() < 1e-8


def test_bergman_weights_and_weighted_stage():
    mesh = mesh_square(5)
    state = _state(mesh, 5, weighted=True)
    sigma = bergman_weights(state)
    assert abs(sigma.mean() - 1.0) < 1e-12
    assert (sigma > 0).all()
    N = dimension(2, 5)
    assert np.abs(sigma - bergman(state) / N).max() < 1e-12

    # weighted ONB orthonormal in L2 of the weighted measure
    M = state.size
    qt = np.sqrt(M) * state.Qw / np.sqrt(state.sigma)[:, None]
    gram = (state.sigma[:, None] * qt).T @ qt / M
    assert np.abs(gram - np.eye(N)).max() < 1e-9

    # q~_1 is the constant 1 (weighted measure is also a probability measure)
    assert np.abs(qt[:, 0] - 1.0).max() < 1e-9


def test_weighted_bergman_bound_on_probe_grid():
    mesh = mesh_square(6)
    state = _state(mesh, 6, weighted=True)
    rng = np.random.default_rng(8)
    pts = rng.uniform(-2, 2, size=(200, 2))
    WT = eval_basis(state.spec, 6, pts, mode="recurrence")
    B = bergman(state, evaluate_onb(state, WT))
    Bw = weighted_bergman(state, evaluate_weighted_onb(state, WT))
    N = dimension(2, 6)
    assert (Bw <= N * B * (1 + 1e-12)).all()


def test_weighted_kernel_block_independence():
    mesh = mesh_disk(8)
    state = _state(mesh, 8, weighted=True)
    rng = np.random.default_rng(9)
    pts = rng.uniform(-2, 2, size=(60, 2))
    Wt = evaluate_weighted_onb(state, eval_basis(state.spec, 8, pts,
                                                 mode="recurrence"))
    full = weighted_kernel_l1(state, Wt, block=4096)
    small = weighted_kernel_l1(state, Wt, block=7)
    # blocking only changes BLAS rounding, never the per-target sums
    assert np.abs(full - small).max() <= 1e-12 * np.abs(full).max()
