import math

import numpy as np
from pytest import approx, mark, raises

from solharm.config import DEFAULTS
from solharm.harmonic import HarmonicFunction
from solharm.hyperbolic import RadialEigenfunction
from solharm.liegroup import Point, SolGroup
from solharm.verify import (
    ANALYTIC,
    FINITE_DIFFERENCE,
    GridSpec,
    analytic_laplacian,
    channel_agreement,
    fd_convergence_ratio,
    fd_laplacian_sol,
    fd_residuals,
    identity_suite,
    residual_grid,
)
from solharm.verify.suite import CheckResult, SuiteReport

SMALL_GRID = '-1:1:5,-1:1:5,-1:1:5'


class TestGridSpec:
    def test_parse(self):
        spec = GridSpec.parse('-2:2:21,-1:3:5,0:1:2')
        assert spec.ranges == ((-2.0, 2.0), (-1.0, 3.0), (0.0, 1.0))
        assert spec.counts == (21, 5, 2)
        assert spec.size == 210
        assert GridSpec.parse(spec.describe()) == spec

    @mark.parametrize('text', ['', '1:2:3', '0:1:3,0:1:3', 'a:1:3,0:1:3,0:1:3', '0:1:3,0:1:3,0:1:1.5',
                               '0:1:1,0:1:3,0:1:3', '0:inf:3,0:1:3,0:1:3'])
    def test_parse_rejects(self, text):
        with raises(ValueError):
            GridSpec.parse(text)

    def test_rejects_negative_exclusion(self):
        with raises(ValueError):
            GridSpec(((0, 1),) * 3, (2, 2, 2), exclusion_radius=-1.0)

    def test_points_order(self):
        x, y, z = GridSpec.parse('0:1:2,0:1:2,0:1:3').points()
        assert x.shape == y.shape == z.shape == (12,)
        assert (x[0], y[0], z[0]) == (0.0, 0.0, 0.0)
        assert (x[1], y[1], z[1]) == (0.0, 0.0, 0.5)
        assert (x[-1], y[-1], z[-1]) == (1.0, 1.0, 1.0)


class TestFiniteDifferenceLaplacian:
    @mark.parametrize('a', [0.0, 1.0, 2.0])
    def test_z_squared(self, a):
        assert fd_laplacian_sol(lambda x, y, z: z * z, Point(0.2, -0.4, 0.5), SolGroup(a), 1e-3) == approx(2.0, abs=1e-6)

    @mark.parametrize('z', [-1.0, 0.0, 0.7])
    def test_x_squared_thurston(self, z):
        value = fd_laplacian_sol(lambda x, y, z: x * x, Point(0.3, 0.0, z), SolGroup(0.0), 1e-3)
        assert value == approx(2 * math.exp(2 * z), rel=1e-6)

    def test_xy_sheared(self):
        group = SolGroup(1.0)
        assert fd_laplacian_sol(lambda x, y, z: x * y, Point(0.5, 0.5, 0.0), group, 1e-3) == approx(0.0, abs=1e-6)
        value = fd_laplacian_sol(lambda x, y, z: x * y, Point(0.5, 0.5, 1.0), group, 1e-3)
        assert value == approx(2 * math.sinh(1.0) / math.e, rel=1e-6)

    def test_rejects_bad_step(self):
        with raises(ValueError):
            fd_laplacian_sol(lambda x, y, z: x, Point(0, 0, 0), SolGroup(), 0.0)

    def test_constant_field_has_zero_residual(self, group):
        report = fd_residuals(lambda x, y, z: 3.0 + 0 * x, GridSpec.parse(SMALL_GRID), group, 1e-3)
        assert report.max_abs == report.mean_abs == 0.0
        assert report.channel == FINITE_DIFFERENCE

    def test_second_order_convergence(self, group, rng):
        def field(x, y, z):
            return np.sin(x) * np.cos(y) * np.exp(z / 2)

        def exact(x, y, z):
            c_xx, c_xy, c_yy, c_zz = group.laplacian_coeffs(z)
            return -c_xx * field(x, y, z) - c_xy * np.cos(x) * np.sin(y) * np.exp(z / 2) \
                - c_yy * field(x, y, z) + c_zz * field(x, y, z) / 4

        ratio = fd_convergence_ratio(field, exact, rng.uniform(-1, 1, (3, 50)), group, 2e-2)
        assert 3.5 <= ratio <= 4.5


class TestResidualGrid:
    def test_small_grid(self, hf, group):
        analytic, fd = residual_grid(hf, GridSpec.parse(SMALL_GRID), group, workers=1, seed=3)
        assert analytic.channel == ANALYTIC and fd.channel == FINITE_DIFFERENCE
        assert analytic.grid_size == 5 ** 3 - 5
        assert fd.grid_size == 5 ** 3
        assert analytic.passed(DEFAULTS.analytic_tolerance)
        assert fd.passed(DEFAULTS.fd_tolerance)
        assert analytic.max_abs >= analytic.mean_abs >= 0
        assert analytic.h is None and fd.h == DEFAULTS.fd_step
        assert set(fd.to_dict()) == {'channel', 'max_abs', 'max_rel', 'mean_abs', 'worst_point', 'grid',
                                     'grid_size', 'h', 'a', 'seed'}
        assert fd.to_dict()['seed'] == 3

    def test_default_grid(self, hf, group):
        analytic, fd = residual_grid(hf, GridSpec.parse(DEFAULTS.grid), group)
        assert analytic.grid_size == 21 ** 3 - 21
        assert fd.grid_size == 21 ** 3
        assert analytic.max_rel <= 1e-9
        assert fd.max_rel <= 1e-5

    def test_thread_count_does_not_change_reports(self, hf):
        spec, group = GridSpec.parse(DEFAULTS.grid), SolGroup(0.5)
        assert residual_grid(hf, spec, group, workers=1) == residual_grid(hf, spec, group, workers=4)

    def test_analytic_channel_ignores_shear(self, hf):
        y, z = np.meshgrid(np.linspace(-2, 2, 9), np.linspace(-2, 2, 9))
        keep = hf.radius(y, z) > 1e-6
        y, z = y[keep], z[keep]
        reference = analytic_laplacian(hf, y, z, SolGroup(0.0))
        for a in (0.5, 1.0, 2.0):
            assert np.array_equal(analytic_laplacian(hf, y, z, SolGroup(a)), reference)

    def test_channels_agree(self, hf, group):
        assert channel_agreement(hf, GridSpec.parse(SMALL_GRID), group) <= 1e-5

    def test_exclusion_radius(self, hf):
        spec = GridSpec.parse(SMALL_GRID, exclusion_radius=0.6)
        analytic, fd = residual_grid(hf, spec, SolGroup(), workers=1)
        assert analytic.grid_size < 120
        assert fd.grid_size == 125

    def test_line_above_base_point(self, hf, group):
        spec = GridSpec(((-1.0, 1.0), (0.0, 0.0), (0.0, 0.0)), (3, 2, 2))
        analytic, fd = residual_grid(hf, spec, group, workers=1)
        assert analytic.grid_size == 0 and analytic.max_rel == 0.0
        assert fd.grid_size == 12
        assert fd.passed(DEFAULTS.fd_tolerance)
        assert channel_agreement(hf, spec, group) == 0.0

    @mark.slow
    @mark.parametrize('a, h', [(1.5, 5e-4), (2.0, 1e-3)])
    def test_sheared_acceptance(self, hf, a, h):
        analytic, fd = residual_grid(hf, GridSpec.parse(DEFAULTS.grid), SolGroup(a), h)
        assert analytic.max_rel <= 1e-9
        assert fd.max_rel <= 1e-5


class TestSuiteReport:
    def test_lookup_and_failures(self):
        report = SuiteReport(7, [CheckResult.at_most('a.b', 1.0, 2.0), CheckResult.at_least('c.d', 1.0, 2.0)])
        assert report['a.b'].passed
        assert not report['c.d'].passed
        assert not report.passed
        assert [check.name for check in report.failures] == ['c.d']
        with raises(KeyError):
            report['missing']
        assert 'FAIL' in report.to_text()
        assert report.to_dict()['passed'] is False


class TestIdentitySuite:
    def test_passes(self, eigenfunction):
        report = identity_suite(seed=7, eigenfunction=eigenfunction, samples=200)
        assert report.passed, report.to_text()
        names = {check.name for check in report.checks}
        assert {'group.associativity[a=0]', 'group.associativity[a=2]', 'christoffel.fd_oracle[a=0.5]',
                'orbit.mean_curvature', 'busemann.laplacian', 'weight.laplacian', 'eigenfunction.legendre_oracle',
                'construction.drift', 'fd.convergence_order[a=1]'} <= names

    def test_deterministic(self, eigenfunction):
        first = identity_suite(seed=11, group_params=(1.0,), eigenfunction=eigenfunction, samples=50)
        second = identity_suite(seed=11, group_params=(1.0,), eigenfunction=eigenfunction, samples=50)
        assert first.to_dict() == second.to_dict()

    def test_perturbed_eigenvalue_fails_construction(self):
        report = identity_suite(group_params=(0.0,), eigenvalue=0.26, samples=50)
        assert not report.passed
        assert not report['construction.drift'].passed

    def test_perturbed_exponent_fails_weight(self, eigenfunction):
        report = identity_suite(group_params=(0.0,), weight_exponent=0.6, eigenfunction=eigenfunction, samples=50)
        assert not report['weight.laplacian'].passed
        assert not report['weight.along_flow'].passed
        assert not report['construction.drift'].passed

    @mark.slow
    def test_full_acceptance(self, eigenfunction):
        assert identity_suite(eigenfunction=eigenfunction).passed

    def test_shifted_horocycle_is_still_harmonic(self, eigenfunction):
        hf = HarmonicFunction(eigenfunction, horocycle_height=3.0)
        analytic, _ = residual_grid(hf, GridSpec.parse(SMALL_GRID), SolGroup(1.0), workers=1)
        assert analytic.max_rel <= 1e-9

    def test_fresh_eigenfunction_when_eigenvalue_differs(self, eigenfunction):
        assert isinstance(eigenfunction, RadialEigenfunction)
        report = identity_suite(group_params=(), eigenvalue=0.26, eigenfunction=eigenfunction, samples=10)
        assert not report['construction.drift'].passed
