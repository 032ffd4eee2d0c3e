"""Acceptance suite: end-to-end checks with fixed tolerances.

Each test prints one machine-greppable PASS line with the measured values
after its assertions succeed.
"""

import math
import time

import numpy as np
import pytest

from pluripot.acceleration import rho_scalar, rho_vector, select
from pluripot.basis import AffineMap, BasisSpec, dimension, eval_basis
from pluripot.cli import run_probe
from pluripot.equilibrium import (density_adjugate, density_qr,
                                  derivative_bundles, fd_hessian_density)
from pluripot.extremal import (EvalGrid, error_metrics, ratio_sequence,
                               reference_extremal, szef_values)
from pluripot.meshes import (Mesh, mesh_disk, mesh_for_set, mesh_square_cl)
from pluripot.orthon import build_state
from pluripot.sets import Box, Disk, Simplex
from pluripot.transfinite import (brute_force_gram_integral, gram_spectrum,
                                  td_estimate)

SQUARE = Box(((-1.0, 1.0), (-1.0, 1.0)))
DISK = Disk((0.0, 0.0), 1.0)
TD_DISK = 1.0 / math.sqrt(2.0 * math.e)
TD_SIMPLEX = 1.0 / (2.0 * math.e)


def _state(cset, k, weighted=False, m_factor=2.0):
    mesh = mesh_for_set(cset, k, purpose="extremal", m_factor=m_factor)
    spec = BasisSpec(kind="chebyshev", map=AffineMap.bounding(mesh.points))
    return build_state(mesh, spec, k=k, weighted=weighted)


def test_criterion_1_disk_transfinite_diameter():
    t0 = time.perf_counter()
    degrees = list(range(4, 29, 2))
    raw = [td_estimate(DISK, k) for k in degrees]
    assert all(a < b for a, b in zip(raw, raw[1:])), "raw sequence not monotone"
    assert all(v < TD_DISK for v in raw), "monotone from below toward 1/sqrt(2e)"
    accel = select(rho_scalar(raw, degrees), "diagonal")
    err = abs(float(accel[-1]) - TD_DISK)
    elapsed = time.perf_counter() - t0
    assert err <= 5e-5
    assert elapsed <= 60.0
    print(f"\nPASS criterion 1: disk TD monotone, accelerated error "
          f"{err:.3e} <= 5e-5, {elapsed:.1f}s")


def test_criterion_2_simplex_transfinite_diameter():
    t0 = time.perf_counter()
    degrees = list(range(4, 29, 2))
    raw = [td_estimate(Simplex(), k) for k in degrees]
    accel = select(rho_scalar(raw, degrees), "diagonal")
    err = abs(float(accel[-1]) - TD_SIMPLEX)
    elapsed = time.perf_counter() - t0
    assert err <= 1e-4
    assert elapsed <= 60.0
    print(f"\nPASS criterion 2: simplex TD accelerated error "
          f"{err:.3e} <= 1e-4, {elapsed:.1f}s")


def test_criterion_3_square_calibration_identity():
    worst = 0.0
    for k in range(1, 29):
        worst = max(worst, abs(td_estimate(SQUARE, k, mesh=mesh_square_cl(k)) - 0.5))
    assert worst <= 1e-12
    print(f"\nPASS criterion 3: calibration identity, worst deviation "
          f"{worst:.3e} <= 1e-12 for k = 1..28")


def test_criterion_4_gram_brute_force_oracle():
    cases = [("square-cl k=1", mesh_square_cl(1), 1),
             ("disk td-polar k=1", mesh_disk(1), 1),
             ("simplex k=1", mesh_for_set(Simplex(), 1), 1),
             ("square-cl 9pt k=2",
              Mesh(points=mesh_square_cl(1).points, degree=2,
                   constant=None, source="user"), 2)]
    worst = 0.0
    for label, mesh, k in cases:
        assert mesh.size ** dimension(2, k) <= 10 ** 7, label
        bf = brute_force_gram_integral(mesh, k)
        det = math.exp(gram_spectrum(mesh, k, "monomial").log_det_gram)
        worst = max(worst, abs(det - bf) / bf)
    assert worst <= 1e-10
    print(f"\nPASS criterion 4: Gram oracle on {len(cases)} cases, worst "
          f"relative error {worst:.3e} <= 1e-10")


def test_criterion_5_square_extremal_convergence():
    grid = EvalGrid.tensor(SQUARE, [(-2.0, 2.0, 100), (-2.0, 2.0, 100)])
    ref = reference_extremal(SQUARE, grid.points)
    degrees = list(range(4, 39, 2))
    fields, e1 = [], []
    for k in degrees:
        state = _state(SQUARE, k, m_factor=6.0)
        v = szef_values(state, grid.points, quantity="v")
        fields.append(v)
        e1.append(error_metrics(v, ref, grid.outside)[0])
    assert all(b < a for a, b in zip(e1, e1[1:])), "e1 not strictly decreasing"
    s_k = ratio_sequence(fields, grid.outside)
    assert all(0.5 < s < 1.05 for s in s_k), f"s_k out of range: {s_k}"
    assert s_k[-1] > s_k[0], "s_k does not trend toward 1"
    table = rho_vector(np.column_stack(fields).T, degrees)
    accel = select(table, "diagonal")[-1]
    e1_acc = error_metrics(accel, ref, grid.outside)[0]
    assert e1_acc < e1[-1]
    print(f"\nPASS criterion 5: square e1 strictly decreasing "
          f"({e1[0]:.4f} -> {e1[-1]:.4f}), s_k in (0.5, 1.05) "
          f"[{s_k[0]:.3f}..{s_k[-1]:.3f}], accelerated e1 {e1_acc:.4f} < raw")


def test_criterion_6_disk_extremal_far_grid():
    state = _state(DISK, 40, weighted=True)
    grid = EvalGrid.tensor(DISK, [(100.0, 102.0, 100), (100.0, 102.0, 100)])
    ref = reference_extremal(DISK, grid.points)
    u = szef_values(state, grid.points, quantity="u", weighted=True)
    e1 = error_metrics(u, ref, grid.outside)[0]
    assert e1 <= 1e-2
    # reference evaluator reproduces V = 0 on real interior points exactly
    rng = np.random.default_rng(0)
    t = rng.uniform(0, 2 * np.pi, 50)
    r = np.sqrt(rng.uniform(0, 1, 50)) * 0.999
    inside = np.column_stack([r * np.cos(t), r * np.sin(t)])
    assert np.abs(reference_extremal(DISK, inside)).max() == 0.0
    print(f"\nPASS criterion 6: disk k=40 weighted kernel e1 {e1:.3e} <= 1e-2 "
          f"on [100,102]^2, reference V = 0 on E exactly")


def test_criterion_7_invariant_probe_suite(tmp_path):
    out = tmp_path / "probe.json"
    code = run_probe(seed=0, output=str(out))
    assert code == 0
    print("\nPASS criterion 7: invariant probe suite (orthonormality, "
          "Parseval, Bergman bounds, kernel inequality, weighted bound, "
          "sampling inequality)")


def test_criterion_8_equilibrium_density():
    # dual-path identity and FD oracle at 50 random interior points
    state = _state(SQUARE, 10)
    rng = np.random.default_rng(8)
    pts = rng.uniform(-0.9, 0.9, size=(50, 2))
    bundles = derivative_bundles(state, pts)
    vfun = lambda Z: szef_values(state, Z, quantity="v")
    dual_worst, fd_worst, eta_min = 0.0, 0.0, np.inf
    for p, bu in zip(pts, bundles):
        a, q = density_adjugate(bu, 10), density_qr(bu, 10)
        dual_worst = max(dual_worst, abs(a - q) / max(1.0, abs(q)))
        fd = fd_hessian_density(vfun, p.astype(complex), step=1e-4, check=False)
        fd_worst = max(fd_worst, abs(q - fd) / abs(fd))
        eta_min = min(eta_min, q)
    assert dual_worst <= 1e-12
    assert fd_worst <= 1e-4
    assert eta_min >= -1e-10

    # disk k=20: radial symmetry and normalized profile versus the
    # finite-difference Monge-Ampere of the exact reference solution
    dstate = _state(DISK, 20)
    radii = np.linspace(0.1, 0.8, 36)
    angles = np.linspace(0, 2 * np.pi, 12, endpoint=False)
    sym_worst = 0.0
    profile = np.empty(radii.size)
    for i, r in enumerate(radii):
        ring = np.column_stack([r * np.cos(angles), r * np.sin(angles)])
        vals = np.array([density_qr(bu, 20)
                         for bu in derivative_bundles(dstate, ring)])
        eta_min = min(eta_min, vals.min())
        sym_worst = max(sym_worst, np.abs(vals - vals.mean()).max() / vals.mean())
        profile[i] = vals.mean()
    assert sym_worst <= 1e-6
    ref_fun = lambda Z: reference_extremal(DISK, Z)
    fd_prof = np.array([fd_hessian_density(ref_fun,
                                           np.array([r, 0.0], dtype=complex),
                                           step=1e-4, check=False)
                        for r in radii])
    pe, pf = profile / profile.mean(), fd_prof / fd_prof.mean()
    prof_dev = np.abs(pe - pf).mean() / pf.mean()
    assert prof_dev <= 0.15
    assert eta_min >= -1e-10
    print(f"\nPASS criterion 8: dual-path {dual_worst:.2e} <= 1e-12, FD oracle "
          f"{fd_worst:.2e} <= 1e-4, eta_min {eta_min:.2e} >= -1e-10, radial "
          f"symmetry {sym_worst:.2e} <= 1e-6, profile deviation "
          f"{prof_dev:.3f} <= 0.15")


def test_criterion_9_rho_exactness_and_consistency():
    nodes = np.arange(1.0, 9.0)
    seq = (2 * nodes + 3.0) / (nodes + 1.0)      # rational, limit 2
    table = rho_scalar(seq, nodes)
    col2 = table.columns[2][table.valid[2]]
    worst = np.abs(col2 - 2.0).max()
    assert worst <= 1e-12
    vec = rho_vector(seq.reshape(-1, 1), nodes)
    for j in range(table.n_columns):
        assert np.array_equal(table.columns[j], vec.columns[j])
        assert np.array_equal(table.valid[j], vec.valid[j])
    print(f"\nPASS criterion 9: rho rational exactness {worst:.3e} <= 1e-12, "
          f"scalar/vector bitwise identical on length-1 vectors")
