"""Command-line front end: meshes, extremal fields, transfinite diameter,
equilibrium densities, Fekete extraction and the invariant probe suite.

Exit codes: 0 success, 2 usage error, 3 numerical failure.  Every failure
prints a one-line reason on stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

import numpy as np

from .acceleration import rho_scalar, rho_vector, select
from .basis import AffineMap, BasisSpec, dimension, eval_basis
from .equilibrium import (afp_extract, density_adjugate, density_qr,
                          derivative_bundles, equilibrium_density,
                          fd_hessian_density)
from .exceptions import (DomainError, GridConfigError,
                         NoReferenceAvailableError, PluripotError, UsageError)
from .extremal import (ErrorReport, EvalGrid, error_metrics, ratio_sequence,
                       reference_extremal, szef_values)
from .meshes import mesh_for_set, mesh_square, mesh_square_cl, write_mesh_csv
from .orthon import (bergman, build_state, evaluate_onb,
                     evaluate_weighted_onb, weighted_bergman)
from .sets import Box, Disk, RegularPolygon, Simplex
from .transfinite import TDEstimate, td_estimate

USAGE_ERRORS = (UsageError, DomainError, GridConfigError,
                NoReferenceAvailableError, ValueError)

TD_REFERENCES = {
    "square": 0.5,
    "disk": 1.0 / math.sqrt(2.0 * math.e),
    "simplex": 1.0 / (2.0 * math.e),
}


def parse_set(text: str):
    if text == "square":
        return Box(((-1.0, 1.0), (-1.0, 1.0)))
    if text == "disk":
        return Disk(center=(0.0, 0.0), radius=1.0)
    if text == "simplex":
        return Simplex()
    if text.startswith("polygon:"):
        m = int(text.split(":", 1)[1])
        if m < 3:
            raise UsageError("polygon needs at least 3 vertices")
        return RegularPolygon(m=m)
    raise UsageError(f"unknown set spec {text!r} "
                     "(use square, disk, simplex or polygon:<m>)")


def parse_degrees(text: str) -> list:
    parts = text.split(":")
    if len(parts) == 1:
        return [int(parts[0])]
    if len(parts) != 3:
        raise UsageError("degree schedule must be <start>:<step>:<end>")
    start, step, end = (int(p) for p in parts)
    if step <= 0 or end < start:
        raise UsageError("degree schedule must be increasing")
    return list(range(start, end + 1, step))


def parse_grid(text: str, imag_shift: str | None, cset) -> EvalGrid:
    axes = []
    for chunk in text.split(","):
        parts = chunk.split(":")
        if len(parts) != 4:
            raise UsageError("grid axis must be <name>:<min>:<max>:<count>")
        axes.append((float(parts[1]), float(parts[2]), int(parts[3])))
    if len(axes) != 2:
        raise UsageError("grid needs exactly two axes")
    shift = (0.0, 0.0)
    if imag_shift:
        vals = [float(v) for v in imag_shift.split(",")]
        if len(vals) != 2:
            raise UsageError("imag shift needs two comma-separated values")
        shift = tuple(vals)
    return EvalGrid.tensor(cset, axes, imag_shift=shift)


def _fmt(x) -> str:
    return f"{x:.17g}"


def _dump_json(payload: dict, path: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_mesh(args) -> int:
    cset = parse_set(args.set)
    mesh = mesh_for_set(cset, args.degree, purpose=args.purpose,
                        m_factor=args.oversampling)
    out = args.output or f"mesh_{args.set.replace(':', '')}_k{args.degree}.csv"
    write_mesh_csv(mesh, out)
    _dump_json({"set": cset.describe(), "k": args.degree,
                "cardinality": mesh.size, "constant": mesh.constant},
               out.rsplit(".", 1)[0] + ".json")
    return 0


def cmd_extremal(args) -> int:
    cset = parse_set(args.set)
    degrees = parse_degrees(args.degrees)
    grid = parse_grid(args.grid, args.imag_shift, cset)
    weighted = args.method == "szef-bw"

    fields = []
    for k in degrees:
        mesh = mesh_for_set(cset, k, purpose="extremal",
                            m_factor=args.oversampling)
        spec = BasisSpec(kind="chebyshev", map=AffineMap.bounding(mesh.points))
        state = build_state(mesh, spec, k=k, weighted=weighted)
        fields.append(szef_values(state, grid.points, quantity=args.quantity,
                                  weighted=weighted))

    reference = None
    report = None
    if args.errors:
        reference = reference_extremal(cset, grid.points)
        e1, e1r, einf = [], [], []
        for vals in fields:
            a, b, c = error_metrics(vals, reference, grid.outside)
            e1.append(a), e1r.append(b), einf.append(c)
        report = ErrorReport(degrees=degrees, e1=e1, e1_rel=e1r, e_inf=einf,
                             s_k=ratio_sequence(fields, grid.outside))

    accel = None
    if args.accelerate is not None and len(degrees) >= 3:
        table = rho_vector(np.column_stack(fields).T, degrees)
        accel = select(table, args.accelerate)[-1]

    out = args.output or f"extremal_{args.set.replace(':', '')}"
    with open(out + ".csv", "w") as fh:
        cols = ["re_z1", "im_z1", "re_z2", "im_z2", "inside"]
        cols += [f"value_k{k}" for k in degrees]
        if accel is not None:
            cols.append("value_accelerated")
        if reference is not None:
            cols.append("reference")
        fh.write(",".join(cols) + "\n")
        for i in range(grid.size):
            row = [_fmt(grid.points[i, 0].real), _fmt(grid.points[i, 0].imag),
                   _fmt(grid.points[i, 1].real), _fmt(grid.points[i, 1].imag),
                   str(int(grid.mask[i]))]
            row += [_fmt(vals[i]) for vals in fields]
            if accel is not None:
                row.append(_fmt(accel[i]))
            if reference is not None:
                row.append(_fmt(reference[i]))
            fh.write(",".join(row) + "\n")

    summary = {"set": cset.describe(), "method": args.method,
               "quantity": args.quantity, "degrees": degrees}
    if report is not None:
        summary["errors"] = report.as_dict()
        if accel is not None:
            a, b, c = error_metrics(accel, reference, grid.outside)
            summary["accelerated_errors"] = {"e1": a, "e1_rel": b, "e_inf": c}
    _dump_json(summary, out + ".json")
    return 0


def cmd_transfinite(args) -> int:
    cset = parse_set(args.set)
    degrees = parse_degrees(args.degrees)
    t0 = time.perf_counter()
    raw = [td_estimate(cset, k, basis=args.basis) for k in degrees]
    accelerated = []
    if args.accelerate is not None and len(degrees) >= 3:
        accelerated = select(rho_scalar(raw, degrees), args.accelerate).ravel().tolist()
    estimate = TDEstimate(set_description=cset.describe(), degrees=degrees,
                          raw=raw, accelerated=accelerated,
                          reference=TD_REFERENCES.get(args.set),
                          wall_time_s=time.perf_counter() - t0)
    _dump_json(estimate.as_dict(), args.output)
    return 0


def cmd_equilibrium(args) -> int:
    cset = parse_set(args.set)
    if args.imag_shift and any(float(v) != 0.0 for v in args.imag_shift.split(",")):
        raise UsageError("equilibrium grids must be real (imag shift 0)")
    grid = parse_grid(args.grid, None, cset)
    k = args.degree
    mesh = mesh_for_set(cset, k, purpose="extremal", m_factor=args.oversampling)
    spec = BasisSpec(kind="chebyshev", map=AffineMap.bounding(mesh.points))
    state = build_state(mesh, spec, k=k)

    (x0, x1, nx), (y0, y1, ny) = grid.axes
    cell = ((x1 - x0) / (nx - 1)) * ((y1 - y0) / (ny - 1))
    pts = np.real(grid.points)
    field = equilibrium_density(state, cset, pts, normalize=args.normalize,
                                cell_volume=cell)

    out = args.output or f"equilibrium_{args.set.replace(':', '')}_k{k}"
    with open(out + ".csv", "w") as fh:
        fh.write("x,y,inside,eta_raw,eta_restricted,eta_normalized\n")
        for i in range(pts.shape[0]):
            norm = field.normalized[i] if field.normalized is not None else ""
            fh.write(",".join([_fmt(pts[i, 0]), _fmt(pts[i, 1]),
                               str(int(field.mask[i])), _fmt(field.raw[i]),
                               _fmt(field.restricted[i]),
                               _fmt(norm) if norm != "" else ""]) + "\n")

    # oracle comparison at a few deterministic interior points
    rng = np.random.default_rng(args.seed)
    inside = pts[field.mask]
    oracle = {}
    if inside.shape[0]:
        sample = inside[rng.choice(inside.shape[0], size=min(5, inside.shape[0]),
                                   replace=False)]
        bundles = derivative_bundles(state, sample)
        dual = max(abs(density_adjugate(bu, k) - density_qr(bu, k)) for bu in bundles)
        fd_rel = []
        vfun = lambda Z: szef_values(state, Z, quantity="v")
        for p, bu in zip(sample, bundles):
            fd = fd_hessian_density(vfun, p.astype(complex), step=1e-4, check=False)
            fd_rel.append(abs(density_qr(bu, k) - fd) / max(abs(fd), 1e-300))
        oracle = {"dual_path_max_abs": dual, "fd_oracle_max_rel": max(fd_rel),
                  "min_eta": float(field.raw.min())}
    _dump_json({"set": cset.describe(), "k": k, "oracle": oracle}, out + ".json")
    return 0


def cmd_fekete(args) -> int:
    cset = parse_set(args.set)
    mesh = mesh_for_set(cset, args.degree, purpose="extremal",
                        m_factor=args.oversampling)
    selection = afp_extract(mesh, args.degree)
    out = args.output or f"fekete_{args.set.replace(':', '')}_k{args.degree}.csv"
    with open(out, "w") as fh:
        fh.write("x,y\n")
        for i in selection.indices:
            fh.write(f"{mesh.points[i, 0]:.17g},{mesh.points[i, 1]:.17g}\n")
    return 0


def run_probe(seed: int = 0, output: str | None = None) -> int:
    """Invariant suite: orthonormality, Parseval, Bergman bounds, kernel
    inequality, weighted bound and the empirical sampling inequality."""
    rng = np.random.default_rng(seed)
    checks = []

    def check(name, value, tolerance, passed):
        checks.append({"name": name, "value": float(value),
                       "tolerance": float(tolerance), "passed": bool(passed)})

    square = Box(((-1.0, 1.0), (-1.0, 1.0)))
    k = 10
    mesh = mesh_for_set(square, k, purpose="extremal")
    spec = BasisSpec(kind="chebyshev", map=AffineMap.bounding(mesh.points))
    state = build_state(mesh, spec, k=k, weighted=True)

    gram = state.Q.T @ state.Q
    ortho = float(np.abs(gram - np.eye(gram.shape[0])).max())
    check("twice_qr_orthonormality", ortho, 1e-10, ortho <= 1e-10)

    N = dimension(2, k)
    parseval = abs(bergman(state).mean() - N) / N
    check("parseval_trace", parseval, 1e-10, parseval <= 1e-10)

    sample = np.vstack([mesh.points, rng.uniform(-1, 1, size=(200, 2))])
    W = evaluate_onb(state, eval_basis(spec, k, sample, mode="recurrence"))
    B = bergman(state, W)
    check("bergman_lower_bound", float(B.min()), 1.0, B.min() >= 1.0 - 1e-12)

    grid = EvalGrid.tensor(square, [(-2.0, 2.0, 25), (-2.0, 2.0, 25)])
    v = szef_values(state, grid.points, quantity="v")
    u = szef_values(state, grid.points, quantity="u")
    slack = float((u - v - math.log(N) / (2.0 * k)).max())
    check("kernel_vs_bergman_bound", slack, 0.0, slack <= 1e-12)

    WTg = eval_basis(spec, k, grid.points, mode="recurrence")
    Bg = bergman(state, evaluate_onb(state, WTg))
    Bwg = weighted_bergman(state, evaluate_weighted_onb(state, WTg))
    ratio = float((Bwg / (N * Bg)).max())
    ratio = max(ratio, float((weighted_bergman(state, None)
                              / (N * bergman(state))).max()))
    check("weighted_bergman_bound", ratio, 1.0, ratio <= 1.0 + 1e-12)

    worst = 0.0
    for kk in (2, 5, 10):
        for maker, desc in ((mesh_square, "tensor"), (mesh_square_cl, "cl")):
            mk = maker(kk)
            sp = BasisSpec(kind="chebyshev", map=None)
            Vm = np.real_if_close(eval_basis(sp, kk, mk.points, mode="recurrence"))
            dense = mesh_square(kk, m_factor=12.0)
            Vd = np.real_if_close(eval_basis(sp, kk, dense.points, mode="recurrence"))
            coeffs = rng.standard_normal((Vm.shape[1], 64))
            sup_mesh = np.abs(Vm @ coeffs).max(axis=0)
            sup_dense = np.abs(Vd @ coeffs).max(axis=0)
            worst = max(worst, float((sup_dense / sup_mesh / mk.constant).max()))
    check("sampling_inequality", worst, 1.0 + 0.05, worst <= 1.0 + 0.05)

    passed = all(c["passed"] for c in checks)
    _dump_json({"passed": passed, "seed": seed, "checks": checks}, output)
    return 0 if passed else 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pluripot",
        description="Numerical pluripotential theory: extremal functions, "
                    "transfinite diameters, equilibrium densities.")
    parser.add_argument("--probe", action="store_true",
                        help="run the invariant probe suite and emit pass/fail JSON")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--output", default=None)
    sub = parser.add_subparsers(dest="command")

    def common(p, degrees=False):
        p.add_argument("--set", required=True)
        p.add_argument("--oversampling", type=float, default=2.0)
        p.add_argument("--output", default=None)
        p.add_argument("--seed", type=int, default=0)
        if degrees:
            p.add_argument("--degrees", required=True)
        else:
            p.add_argument("--degree", type=int, required=True)

    p = sub.add_parser("mesh", help="generate an admissible mesh CSV")
    common(p)
    p.add_argument("--purpose", choices=("extremal", "td"), default="extremal")

    p = sub.add_parser("extremal", help="extremal-function fields and errors")
    common(p, degrees=True)
    p.add_argument("--method", choices=("szef", "szef-bw"), default="szef")
    p.add_argument("--quantity", choices=("v", "u"), default="v")
    p.add_argument("--grid", required=True)
    p.add_argument("--imag-shift", default=None)
    p.add_argument("--errors", action="store_true")
    p.add_argument("--accelerate", nargs="?", const="diagonal", default=None)

    p = sub.add_parser("transfinite", help="transfinite-diameter estimates")
    common(p, degrees=True)
    p.add_argument("--basis", choices=("chebyshev", "monomial"),
                   default="chebyshev")
    p.add_argument("--accelerate", nargs="?", const="diagonal", default=None)

    p = sub.add_parser("equilibrium", help="equilibrium-density field")
    common(p)
    p.add_argument("--grid", required=True)
    p.add_argument("--imag-shift", default=None)
    p.add_argument("--normalize", action="store_true")

    p = sub.add_parser("fekete", help="approximate Fekete points")
    common(p)
    return parser


COMMANDS = {"mesh": cmd_mesh, "extremal": cmd_extremal,
            "transfinite": cmd_transfinite, "equilibrium": cmd_equilibrium,
            "fekete": cmd_fekete}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.probe:
            return run_probe(seed=args.seed, output=args.output)
        if args.command is None:
            parser.print_usage(sys.stderr)
            print("error: no subcommand given", file=sys.stderr)
            return 2
        return COMMANDS[args.command](args)
    except USAGE_ERRORS as exc:
        print(f"error: usage: {exc}", file=sys.stderr)
        return 2
    except PluripotError as exc:
        print(f"error: numerical: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
