import math

import numpy as np
import pytest

from pluripot.exceptions import SizeError
from pluripot.meshes import Mesh, mesh_disk, mesh_square_cl
from pluripot.sets import Box, Disk, Simplex
from pluripot.transfinite import (TDEstimate, brute_force_gram_integral,
                                  calibration_factor, gram_det_exponent,
                                  gram_spectrum, td_estimate)

SQUARE = Box(((-1.0, 1.0), (-1.0, 1.0)))


def test_gram_spectrum_log_space_no_underflow():
    spec = gram_spectrum(mesh_square_cl(28), 28, "monomial")
    assert math.isfinite(spec.log_det_gram)
    # det itself underflows double precision, the log must not
    assert spec.log_det_gram < -10000


def test_brute_force_oracle_small_meshes():
    cases = [(mesh_square_cl(1), 1), (mesh_disk(1), 1),
             (Mesh(points=mesh_square_cl(1).points, degree=2,
                   constant=None, source="user"), 2)]
    for mesh, k in cases:
        bf = brute_force_gram_integral(mesh, k)
        det = math.exp(gram_spectrum(mesh, k, "monomial").log_det_gram)
        assert abs(det - bf) / bf < 1e-10


def test_brute_force_guard():
    with pytest.raises(SizeError):
        brute_force_gram_integral(mesh_square_cl(4), 4)


def test_calibration_on_reference_square():
    for k in range(1, 13):
        assert abs(td_estimate(SQUARE, k, mesh=mesh_square_cl(k)) - 0.5) <= 1e-12


def test_basis_invariance_small_degrees():
    disk = Disk((0.0, 0.0), 1.0)
    for k in (2, 4, 6):
        cheb = td_estimate(disk, k)
        mono = td_estimate(disk, k, basis="monomial")
        assert abs(cheb - mono) / mono < 1e-8


def test_disk_raw_monotone_start():
    disk = Disk((0.0, 0.0), 1.0)
    vals = [td_estimate(disk, k) for k in range(4, 14, 2)]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    assert all(v < 1.0 / math.sqrt(2 * math.e) for v in vals)


def test_simplex_estimate_sane():
    val = td_estimate(Simplex(), 10)
    ref = 1.0 / (2.0 * math.e)
    assert abs(val - ref) / ref < 0.05


def test_td_estimate_dataclass():
    est = TDEstimate(set_description="disk", degrees=[4, 6], raw=[0.44, 0.43],
                     reference=0.42888)
    abs_err, rel_err = est.errors()
    assert abs_err[0] == pytest.approx(0.44 - 0.42888)
    d = est.as_dict()
    assert d["reference"] == 0.42888 and len(d["abs_err"]) == 2


def test_calibration_factor_positive_and_cached():
    a = calibration_factor(8)
    b = calibration_factor(8)
    assert a == b and a > 0


def test_gram_det_exponent_box_scaling():
    """Halving the set multiplies the transfinite diameter estimate by 1/2."""
    small = Box(((-0.5, 0.5), (-0.5, 0.5)))
    for k in (3, 6):
        est = td_estimate(small, k)
        assert abs(est - 0.25) < 1e-10
