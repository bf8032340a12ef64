import math

import numpy as np
import pytest

from cilab import flows, gas
from cilab.exceptions import CharacteristicCrossing, NonPhysicalState, SupportReachedBoundary
from cilab.grid import Grid
from cilab.scalar import ScalarField

SIGMA = 0.15


def gaussian_rho0(n=1, cells=128):
    g = Grid.cube(n, 1.0, cells)
    return ScalarField(g, flows.cutoff_gaussian(SIGMA, 0.6)(g.centers()))


class TestDust:
    def test_static(self):
        rho0 = gaussian_rho0()
        w = flows.dust_flow(rho0, [0.0], [0.0, 0.1, 0.2])
        for k in range(3):
            np.testing.assert_allclose(w.rho[k], rho0.values, rtol=1e-14, atol=1e-16)
        assert np.all(w.p == 0) and np.all(w.e == 0)

    def test_rigid_translation(self):
        rho0 = gaussian_rho0()
        h = rho0.grid.spacing[0]
        w = flows.dust_flow(rho0, [3 * h / 0.1], [0.0, 0.1, 0.2])
        np.testing.assert_allclose(w.rho[2][6:], rho0.values[:-6], atol=1e-14)
        assert np.allclose(w.u[2][w.rho[2] > 1e-10], 3 * h / 0.1)

    @pytest.mark.parametrize("n,cells", [(1, 128), (2, 64)])
    def test_linear_spreading_matches_closed_form(self, n, cells):
        rho0 = gaussian_rho0(n, cells)
        alpha, t = 0.5, 0.2
        w = flows.dust_flow(rho0, flows.linear_velocity(alpha), [0.0, t])
        exact = flows.linear_dust_density(flows.cutoff_gaussian(SIGMA, 0.6), alpha, t, rho0.grid.centers())
        assert np.abs(w.rho[1] - exact).sum() / exact.sum() < 0.01

    @pytest.mark.parametrize("n,cells", [(1, 128), (2, 48)])
    def test_conserves_mass_and_energy(self, n, cells):
        w = flows.dust_flow(gaussian_rho0(n, cells), flows.linear_velocity(0.5), np.linspace(0.0, 0.3, 4))
        s = gas.summary(w)
        assert s.admissible
        assert s.mass_drift < 1e-12
        assert np.ptp(s.E_of_t) <= 1e-12 * s.E0

    def test_crossing_detected(self):
        with pytest.raises(CharacteristicCrossing) as err:
            flows.dust_flow(gaussian_rho0(), flows.linear_velocity(-1.0), [0.0, 0.5, 1.5])
        assert err.value.time == 1.5

    def test_leaving_box_detected(self):
        with pytest.raises(SupportReachedBoundary):
            flows.dust_flow(gaussian_rho0(), [5.0], [0.0, 0.2])

    def test_cell_velocity_array(self):
        rho0 = gaussian_rho0(cells=32)
        u0 = np.full((32, 1), 0.1)
        a = flows.dust_flow(rho0, u0, [0.0, 0.5])
        b = flows.dust_flow(rho0, [0.1], [0.0, 0.5])
        np.testing.assert_allclose(a.rho, b.rho, atol=1e-15)


@pytest.fixture(scope="module")
def sod():
    g, rho, u, p = flows.sod_in_vacuum(512)
    return flows.fv_solve(g, rho, u, p, t_end=0.05, outputs=20)


class TestFiniteVolume:
    def test_conservation(self, sod):
        s = gas.summary(sod)
        assert s.admissible
        assert s.mass_drift <= 1e-12
        assert np.all(np.diff(s.E_of_t) <= 1e-10 * s.E0)
        ce = np.asarray(sod.meta["conserved_energy"])
        assert np.max(np.abs(ce - ce[0])) <= 1e-12 * ce[0]
        assert np.max(np.abs(sod.meta["momentum"])) < 1e-12

    def test_exact_output_times(self, sod):
        np.testing.assert_array_equal(sod.times, np.linspace(0.0, 0.05, 21))
        assert sod.meta["steps"] >= 20

    def test_stationary_dust_bump(self):
        g = Grid.cube(1, 1.0, 64)
        rho, u, p = flows.gaussian_bump(g, pressure=0.0)
        w = flows.fv_solve(g, rho, u, p, t_end=0.1, outputs=2)
        np.testing.assert_allclose(w.rho[-1], rho, atol=1e-15)

    def test_wave_reaches_boundary(self):
        g, rho, u, p = flows.sod_in_vacuum(128, support=0.8)
        with pytest.raises(SupportReachedBoundary):
            flows.fv_solve(g, rho, u, p, t_end=1.0, outputs=2)

    def test_initial_support_must_be_inside(self):
        g = Grid.cube(1, 1.0, 16)
        with pytest.raises(SupportReachedBoundary):
            flows.fv_solve(g, np.ones(16), np.zeros(16), np.ones(16))

    def test_parameter_validation(self):
        g, rho, u, p = flows.sod_in_vacuum(64)
        with pytest.raises(ValueError):
            flows.fv_solve(g, rho, u, p, gamma=1.0)
        with pytest.raises(ValueError):
            flows.fv_solve(g, rho, u, p, cfl=0.8)
        with pytest.raises(NonPhysicalState):
            flows.fv_solve(g, rho, u, -p)
        with pytest.raises(NonPhysicalState):
            flows.fv_solve(g, rho, u, p, max_steps=3)

    def test_two_dimensional_bump_is_symmetric(self):
        g = Grid.cube(2, 1.0, 48)
        rho, u, p = flows.gaussian_bump(g, sigma=0.1, support=0.3)
        w = flows.fv_solve(g, rho, u, p, t_end=0.05, outputs=2)
        assert gas.summary(w).admissible
        np.testing.assert_allclose(w.rho[-1], w.rho[-1].T, atol=1e-13)
        np.testing.assert_allclose(w.rho[-1], w.rho[-1][::-1], atol=1e-13)

    def test_pgd_stable_under_step_refinement(self):
        g, rho, u, p = flows.sod_in_vacuum(256)
        a = flows.fv_solve(g, rho, u, p, cfl=0.5, t_end=0.05, outputs=10)
        b = flows.fv_solve(g, rho, u, p, cfl=0.25, t_end=0.05, outputs=10)
        la, lb = gas.functional_pgd(a).lhs, gas.functional_pgd(b).lhs
        assert abs(la - lb) < 0.01 * la


class TestConfig:
    def test_fv(self):
        w = flows.run_config({"kind": "fv", "cells": 128, "t_end": 0.02, "outputs": 4})
        assert w.K == 4 and w.meta["generator"] == "fv"

    def test_bump_2d(self):
        w = flows.run_config({"kind": "fv", "init": "bump", "dim": 2, "cells": 32, "t_end": 0.01, "outputs": 1})
        assert w.d == 2

    def test_dust(self):
        w = flows.run_config({"kind": "dust", "cells": 64, "alpha": 0.5, "t_end": 0.1, "outputs": 2})
        assert gas.summary(w).admissible and np.all(w.p == 0)
        w = flows.run_config({"kind": "dust", "dim": 2, "cells": 32, "velocity": [0.1, 0.0], "outputs": 1})
        assert w.d == 2

    def test_errors(self):
        with pytest.raises(ValueError):
            flows.run_config({"kind": "lbm"})
        with pytest.raises(ValueError):
            flows.run_config({"kind": "fv", "init": "sod", "dim": 2})
        with pytest.raises(ValueError):
            flows.run_config({"kind": "fv", "init": "blast"})

    def test_exact_shift_velocity(self):
        g = Grid.cube(1, 1.0, 10)
        assert flows.exact_shift_velocity(g, [0.0, 0.5], 2) == pytest.approx(0.8)
