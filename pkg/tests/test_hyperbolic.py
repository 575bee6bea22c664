import math
from abc import ABC
from typing import TypeVar

import numpy as np
from hypothesis import given
from hypothesis import strategies as st
from pytest import approx, fixture, mark, raises

from solharm.hyperbolic import (
    BASE_POINT,
    BusemannFunction,
    H2Field,
    HorocycleWeight,
    HPoint,
    NotDifferentiableError,
    OutOfDomainError,
    ProductField,
    RadialEigenfunction,
    RadialField,
    SampledField,
    busemann_s,
    drift_L,
    fd_jet,
    h2_distance,
    horocycle_flow,
    j_flow_acceleration,
    to_halfplane,
)
from solharm.hyperbolic.eigenfunction import series
from solharm.hyperbolic.halfplane import christoffel, metric
from solharm.liegroup import Point
from solharm.verify.oracles import fd_christoffel, geodesic_arc_length, legendre_closed_form, legendre_quadrature

T = TypeVar('T', bound=type)


def concrete_subclasses(cls: T, *except_: T) -> list[T]:
    except_ = set(except_)
    seen = {cls}
    queue = [cls]
    concrete = []
    while queue:
        subclasses = set(queue.pop(0).__subclasses__())
        to_see = sorted(subclasses - seen - except_, key=lambda x: x.__name__)  # sort to be deterministic
        for cls in to_see:
            seen.add(cls)
            queue.append(cls)
            if ABC not in cls.__bases__:
                concrete.append(cls)
    return concrete


FACTORIES = {
    BusemannFunction: lambda ef: BusemannFunction(0.5),
    HorocycleWeight: lambda ef: HorocycleWeight(0.5, 2.0),
    RadialField: lambda ef: RadialField(ef),
    ProductField: lambda ef: ProductField(RadialField(ef), HorocycleWeight()),
    SampledField: lambda ef: SampledField(lambda p: p.xi ** 2 * p.h + math.log(p.h)),
}

heights = st.floats(math.exp(-3), math.exp(3))
hpoints = st.builds(HPoint, st.floats(-3.0, 3.0), heights)


@fixture(params=[HPoint(0.5, 0.7), HPoint(-1.0, 2.0), HPoint(2.0, 0.3)], ids=repr)
def point(request) -> HPoint:
    return request.param


@mark.parametrize('cls', concrete_subclasses(H2Field))
class TestAbstractH2Field:
    def test_every_field_has_a_factory(self, cls):
        assert cls in FACTORIES

    def test_jet_value(self, cls, eigenfunction, point):
        field = FACTORIES[cls](eigenfunction)
        assert field.jet(point).value == approx(field(point), rel=1e-14, abs=1e-300)

    def test_jet_matches_differences(self, cls, eigenfunction, point):
        field = FACTORIES[cls](eigenfunction)
        jet, fd = field.jet(point), fd_jet(field, point)
        gradient_scale = max(1.0, np.abs(jet.gradient).max())
        hessian_scale = max(1.0, np.abs(jet.hessian).max())
        assert np.abs(jet.gradient - fd.gradient).max() <= 1e-6 * gradient_scale
        assert np.abs(jet.hessian - fd.hessian).max() <= 1e-5 * hessian_scale

    def test_hessian_symmetric(self, cls, eigenfunction, point):
        hessian = FACTORIES[cls](eigenfunction).jet(point).hessian
        assert hessian[0, 1] == approx(hessian[1, 0], rel=1e-12, abs=1e-12)

    def test_drift_is_laplacian_minus_flow(self, cls, eigenfunction, point):
        field = FACTORIES[cls](eigenfunction)
        jet = field.jet(point)
        assert field.drift(point) == approx(field.laplacian(point) - jet.along_flow(point))

    def test_repr_names_class(self, cls, eigenfunction):
        assert repr(FACTORIES[cls](eigenfunction)).startswith(cls.__name__)


class TestHalfPlane:
    def test_rejects_nonpositive_height(self):
        with raises(ValueError):
            HPoint(0.0, 0.0)
        with raises(ValueError):
            HPoint(0.0, -1.0)

    @mark.parametrize('p, expected', [
        (Point(0, 0, 0), HPoint(0.0, 1.0)),
        (Point(7, 0, 0), HPoint(0.0, 1.0)),
        (Point(0, 2, -1), HPoint(2.0, math.e)),
    ])
    def test_to_halfplane(self, p, expected):
        q = to_halfplane(p)
        assert (q.xi, q.h) == approx((expected.xi, expected.h))

    def test_distance_examples(self):
        p = HPoint(0.3, 0.8)
        assert h2_distance(p, p) == 0.0
        assert h2_distance(HPoint(0, 1), HPoint(0, math.e)) == approx(1.0, rel=1e-15)
        assert h2_distance(HPoint(0, 1), HPoint(1, 1)) == approx(math.acosh(1.5), rel=1e-14)

    def test_distance_matches_arc_length(self):
        p, q = HPoint(0, 1), HPoint(1, 1)
        assert geodesic_arc_length(p, q) == approx(h2_distance(p, q), abs=1e-8)
        p, q = HPoint(0, 0.5), HPoint(0, 3.0)
        assert geodesic_arc_length(p, q) == approx(h2_distance(p, q), abs=1e-8)

    @given(hpoints, hpoints)
    def test_distance_symmetric(self, p, q):
        assert h2_distance(p, q) == approx(h2_distance(q, p), rel=1e-14, abs=1e-15)
        assert h2_distance(p, q) >= 0

    @given(hpoints, hpoints, hpoints)
    def test_triangle_inequality(self, p, q, o):
        assert h2_distance(p, q) <= h2_distance(p, o) + h2_distance(o, q) + 1e-10

    @given(hpoints, hpoints, st.floats(-3.0, 3.0), st.floats(0.1, 10.0))
    def test_distance_isometries(self, p, q, shift, stretch):
        d = h2_distance(p, q)
        assert h2_distance(HPoint(p.xi + shift, p.h), HPoint(q.xi + shift, q.h)) == approx(d, abs=1e-12)
        assert h2_distance(HPoint(stretch * p.xi, stretch * p.h),
                           HPoint(stretch * q.xi, stretch * q.h)) == approx(d, abs=1e-12)

    def test_busemann_normalization(self):
        assert busemann_s(BASE_POINT) == 0.0
        for xi, z in [(0.0, 1.0), (3.0, -2.0), (-1.0, 0.25)]:
            assert busemann_s(HPoint(xi, math.exp(-z))) == approx(z, abs=1e-15)

    def test_busemann_rejects_bad_horocycle(self):
        with raises(ValueError):
            busemann_s(BASE_POINT, 0.0)

    def test_christoffel_matches_oracle(self, point):
        oracle = fd_christoffel(lambda c: metric(HPoint(*c)), np.array([point.xi, point.h]))
        assert christoffel(point) == approx(oracle, rel=1e-6, abs=1e-6)

    def test_j_flow_is_unit_geodesic(self, point):
        j = horocycle_flow(point)
        assert j @ metric(point) @ j == approx(1.0)
        assert j_flow_acceleration(point) == approx(np.zeros(2), abs=1e-14)


class TestBusemannAndWeight:
    def test_busemann_identities(self, point):
        jet = BusemannFunction().jet(point)
        assert jet.laplacian(point) == approx(1.0, abs=1e-12)
        assert jet.gradient_norm_sq(point) == approx(1.0, abs=1e-12)

    def test_busemann_identities_by_differences(self, point):
        jet = fd_jet(BusemannFunction(), point)
        assert jet.laplacian(point) == approx(1.0, abs=1e-6)
        assert jet.gradient_norm_sq(point) == approx(1.0, abs=1e-6)

    def test_weight_identities(self, point):
        weight = HorocycleWeight()
        jet = weight.jet(point)
        assert jet.laplacian(point) == approx(0.75 * jet.value, rel=1e-10)
        assert jet.along_flow(point) == approx(0.5 * jet.value, rel=1e-10)

    def test_weight_drift_is_a_quarter(self, point):
        weight = HorocycleWeight()
        assert drift_L(weight, point) == approx(0.25 * weight(point), rel=1e-10)
        assert drift_L(weight.__call__, point) == approx(0.25 * weight(point), rel=1e-6)

    def test_perturbed_exponent_breaks_weight_identity(self, point):
        jet = HorocycleWeight(0.6).jet(point)
        assert jet.laplacian(point) == approx(0.96 * jet.value, rel=1e-10)
        assert abs(jet.laplacian(point) - 0.75 * jet.value) > 0.2 * jet.value

    def test_constant_has_no_drift(self, point):
        assert drift_L(lambda p: 2.5, point) == 0.0

    def test_plain_callables_are_sampled(self, point):
        def quadratic(p):
            return p.xi ** 2 + p.h
        assert drift_L(quadratic, point, 1e-3) == SampledField(quadratic, 1e-3).drift(point)
        assert drift_L(quadratic, point) == approx(2 * point.h ** 2 + point.h, rel=1e-6)


class TestRadialEigenfunction:
    def test_origin(self, eigenfunction):
        assert eigenfunction.evaluate(0.0) == (1.0, 0.0)

    @mark.parametrize('r', [1.0, 5.0, 10.0])
    def test_matches_legendre_oracle(self, eigenfunction, r):
        assert eigenfunction(r) == approx(legendre_quadrature(r), abs=1e-8)

    @mark.parametrize('r', [0.0, 0.5, 3.0, 8.0, 15.0])
    def test_oracles_agree(self, r):
        assert legendre_closed_form(r) == approx(legendre_quadrature(r), rel=1e-11)

    def test_series_start(self):
        r = 1e-3
        value, derivative = series(r)
        assert value == approx(1 - r * r / 16, abs=1e-13)
        assert derivative == approx(-r / 8, rel=1e-6)

    def test_ode_residual(self, eigenfunction):
        assert eigenfunction.residual() <= 1e-9

    def test_positive_and_decreasing(self, eigenfunction):
        values, derivatives = eigenfunction.evaluate(np.linspace(0.0, eigenfunction.r_max, 2001))
        assert values.min() > 0
        assert (np.diff(values) < 0).all()
        assert (derivatives[1:] < 0).all()

    def test_second_derivative_at_origin(self, eigenfunction):
        assert eigenfunction.second_derivative(0.0, 1.0, 0.0) == approx(-0.125)

    def test_out_of_range(self, eigenfunction):
        with raises(OutOfDomainError):
            eigenfunction.evaluate(-0.1)
        with raises(OutOfDomainError):
            eigenfunction.evaluate(eigenfunction.r_max + 1)
        with raises(OutOfDomainError):
            eigenfunction(np.array([1.0, math.nan]))

    def test_solve_rejects_bad_arguments(self):
        with raises(ValueError):
            RadialEigenfunction.solve(r_max=1e-4)
        with raises(ValueError):
            RadialEigenfunction.solve(rtol=0.0)

    def test_table(self, eigenfunction):
        table = eigenfunction.table(10.0, 1001)
        assert table.shape == (1001, 3)
        assert list(table[0]) == [0.0, 1.0, 0.0]
        assert table[-1, 0] == 10.0
        with raises(ValueError):
            eigenfunction.table(10.0, 1)
        with raises(ValueError):
            eigenfunction.table(-1.0, 10)

    def test_vectorized_matches_scalar(self, eigenfunction):
        radii = np.array([0.0, 5e-4, 0.3, 2.0, 7.5])
        values, derivatives = eigenfunction.evaluate(radii)
        for r, value, derivative in zip(radii, values, derivatives):
            assert eigenfunction.evaluate(float(r)) == approx((value, derivative), rel=1e-13, abs=1e-300)


class TestConstruction:
    def test_drift_of_product_vanishes(self, eigenfunction, rng):
        u = ProductField(RadialField(eigenfunction), HorocycleWeight())
        for _ in range(50):
            p = HPoint(rng.uniform(-3, 3), math.exp(rng.uniform(-3, 3)))
            if RadialField(eigenfunction).radius(p) < 0.1:
                continue
            assert abs(drift_L(u, p)) <= 1e-8 * u(p)

    def test_perturbed_eigenvalue_leaves_drift(self, point):
        perturbed = RadialEigenfunction.solve(r_max=10.0, eigenvalue=0.26)
        u = ProductField(RadialField(perturbed), HorocycleWeight())
        assert drift_L(u, point) == approx(-0.01 * u(point), rel=1e-6)

    def test_radial_jet_refused_at_base(self, eigenfunction):
        with raises(NotDifferentiableError):
            RadialField(eigenfunction).jet(BASE_POINT)
        assert RadialField(eigenfunction)(BASE_POINT) == 1.0
