"""Characteristic-function fixed point: iteration, envelope, inversion."""

import math

import numpy as np
import pytest

from qslimit.cf_bounds import vdc_cf
from qslimit.cf_solver import (
    CfGrid,
    cf_map,
    cf_to_csv,
    init_gaussian_cf,
    init_uniform_cf,
    invert_cf,
    inversion_to_csv,
    iterate_cf,
)
from qslimit.core_numerics import IterationError, RealGrid
from qslimit.moments import VARIANCE


def test_gaussian_start_value_at_one():
    phi = init_gaussian_cf(t_max=200.0, n=4001)  # dt = 0.05 puts t=1 on-grid
    i = 20
    assert phi.ts[i] == pytest.approx(1.0, abs=1e-12)
    assert phi.values[i].real == pytest.approx(math.exp(-VARIANCE / 2.0), rel=1e-9)
    assert phi.values[i].imag == 0.0
    assert phi.values[0] == 1.0 + 0.0j


def test_uniform_start_is_a_valid_cf():
    phi = init_uniform_cf()
    assert phi.values[0] == 1.0 + 0.0j
    assert np.all(np.abs(phi.values) <= 1.0 + 1e-12)


def test_cf_grid_validation():
    with pytest.raises(ValueError, match="exactly 1"):
        CfGrid.from_values(10.0, np.array([0.9 + 0.0j, 0.5]))
    bad = np.ones(11, dtype=complex)
    bad[3] = 1.5
    with pytest.raises(ValueError, match="modulus"):
        CfGrid.from_values(10.0, bad)


def test_map_of_the_trivial_cf_is_the_oscillatory_integral():
    # with phi = 1 the self-convolution drops out and only exp(itg(u)) remains
    ones = CfGrid.from_values(10.0, np.ones(101, dtype=complex))
    mapped = cf_map(ones)
    assert mapped.values[0] == 1.0 + 0.0j
    for i in (3, 17, 42, 100):
        t = float(mapped.ts[i])
        assert abs(mapped.values[i] - vdc_cf(0.0, 0.0, t)) < 1e-9


def test_iterate_rejects_bad_tolerance():
    with pytest.raises(ValueError):
        iterate_cf(init_gaussian_cf(t_max=10.0, n=64), tol=0.0)


def test_iteration_error_carries_history():
    with pytest.raises(IterationError) as err:
        iterate_cf(init_uniform_cf(t_max=50.0, n=512), max_iter=1)
    assert len(err.value.history) == 1


def test_fixed_point_reached(cf_fixed):
    phi, iters, diff = cf_fixed
    assert iters <= 200
    assert diff < 1e-8
    assert phi.values[0] == 1.0 + 0.0j
    assert np.all(np.abs(phi.values) <= 1.0 + 1e-9)


def test_fixed_point_low_order_moments(cf_fixed):
    phi, _, _ = cf_fixed
    dt = phi.dt
    # phi(-t) = conj(phi(t)): central differences at 0 need only the t>0 side
    second = (2.0 - 2.0 * phi.values[1].real) / dt**2
    assert second == pytest.approx(VARIANCE, abs=1e-3)
    slope_im = phi.values[1].imag / dt
    assert abs(slope_im) < 1e-4  # mean-zero law


def test_both_starts_land_on_the_same_fixed_point(cf_fixed):
    phi_g, _, _ = cf_fixed
    phi_u, iters_u, diff_u = iterate_cf(init_uniform_cf(), tol=1e-8)
    assert iters_u <= 200
    assert diff_u < 1e-8
    assert np.max(np.abs(phi_u.values - phi_g.values)) < 1e-6


def test_inversion_is_a_density(cf_fixed):
    phi, _, _ = cf_fixed
    dens = invert_cf(phi)
    mass = float(np.trapezoid(dens.values, dx=dens.dx))
    assert mass == pytest.approx(1.0, abs=2e-3)
    assert float(dens.values.min()) > -1e-4
    assert float(dens.values.min()) > 0.0  # converged CF inverts to > 0 here
    assert 0.55 < float(dens.values.max()) < 0.75


def test_inversion_derivative_route(cf_fixed):
    phi, _, _ = cf_fixed
    f0 = invert_cf(phi, k=0)
    f1 = invert_cf(phi, k=1)
    num = np.gradient(f0.values, f0.dx)
    mask = (f0.xs >= -3.0) & (f0.xs <= 5.0)
    assert float(np.abs(f1.values[mask] - num[mask]).max()) < 1e-3


def test_inversion_rejects_fat_tails():
    # the sinc start decays like 1/t; its truncation tail cannot be certified
    with pytest.raises(ValueError, match="tail"):
        invert_cf(init_uniform_cf())


def test_invert_rejects_bad_derivative_order(cf_fixed):
    phi, _, _ = cf_fixed
    with pytest.raises(ValueError):
        invert_cf(phi, k=-1)


def test_csv_formats(cf_fixed):
    phi, _, _ = cf_fixed
    lines = cf_to_csv(phi).strip().splitlines()
    assert lines[0] == "t,re,im"
    assert len(lines) == phi.n + 1
    t0, re0, im0 = (float(v) for v in lines[1].split(","))
    assert (t0, re0, im0) == (0.0, 1.0, 0.0)

    grid = RealGrid.domain(-1.0, 0.5, 5)
    out = inversion_to_csv(grid, k=0)
    assert out.splitlines()[0] == "x,f"
    out1 = inversion_to_csv(grid, k=1)
    assert out1.splitlines()[0] == "# k=1"
    assert out1.splitlines()[1] == "x,fk"
