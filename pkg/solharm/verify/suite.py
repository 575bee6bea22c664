"""The identity suite: every pointwise identity of the construction, checked at seeded random samples.

Each check reports the largest measured error next to its bound. Failures are entries in the report,
never exceptions, so a perturbed build (another eigenvalue, another weight exponent) yields a failing
report rather than a crash.

Wide-range matrix identities are measured relative to the norms of the factors that enter them. At
|z| = 5 the metric has entries near e^{10}, so plain absolute errors would measure the magnitude of
the data instead of the accuracy of the formulas.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from solharm.config import DEFAULTS
from solharm.harmonic import HarmonicFunction
from solharm.hyperbolic import (
    BASE_POINT,
    BOTTOM_OF_SPECTRUM,
    BusemannFunction,
    HorocycleWeight,
    HPoint,
    RadialEigenfunction,
    RadialField,
    drift_L,
    fd_jet,
    h2_distance,
    horocycle_flow,
    j_flow_acceleration,
    to_halfplane,
)
from solharm.hyperbolic.halfplane import metric as h2_metric
from solharm.liegroup import Point, SolGroup
from solharm.verify.grid import GridSpec, fd_convergence_ratio
from solharm.verify.oracles import exp_az_oracle, fd_christoffel, geodesic_arc_length, legendre_quadrature

logger = logging.getLogger(__name__)

GROUP_PARAMS = (0.0, 0.5, 1.0, 2.0)
WIDE = 5.0


@dataclass(frozen=True)
class CheckResult:
    """One identity check.

    Attributes:
        name: Dotted name, ``<area>.<identity>`` with the group parameter appended where it matters.
        measured: Largest error over the sample, or the measured quantity for lower bounds.
        bound: Tolerance.
        passed: ``measured <= bound`` (or ``>=`` for lower bounds).
        comparison: ``'<='`` or ``'>='``.
    """
    name: str
    measured: float
    bound: float
    passed: bool
    comparison: str = '<='

    @classmethod
    def at_most(cls, name: str, measured: float, bound: float) -> CheckResult:
        measured = float(measured)
        return cls(name, measured, bound, bool(measured <= bound), '<=')

    @classmethod
    def at_least(cls, name: str, measured: float, bound: float) -> CheckResult:
        measured = float(measured)
        return cls(name, measured, bound, bool(measured >= bound), '>=')


@dataclass
class SuiteReport:
    seed: int
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> list:
        return [check for check in self.checks if not check.passed]

    def __getitem__(self, name: str) -> CheckResult:
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {'seed': self.seed,
                'passed': self.passed,
                'checks': [asdict(check) for check in self.checks]}

    def to_text(self) -> str:
        lines = [f'identity suite (seed {self.seed}): {"PASS" if self.passed else "FAIL"}']
        for check in self.checks:
            status = 'ok  ' if check.passed else 'FAIL'
            lines.append(f'  {status} {check.name:<40} {check.measured:.3e} {check.comparison} {check.bound:.1e}')
        return '\n'.join(lines)


def _norm(m) -> float:
    m = np.asarray(m, dtype=float)
    return float(np.linalg.norm(m, ord=np.inf)) if m.ndim == 2 else float(np.max(np.abs(m)))


def _random_point(rng: np.random.Generator, span: float = WIDE) -> Point:
    return Point(*rng.uniform(-span, span, 3))


def _product_scale(group: SolGroup, p: Point, q: Point) -> float:
    """Size of the largest term in p ∗ q."""
    return max(1.0, _norm(p.as_array()), _norm(group.exp_az(p.z)) * _norm(q.as_array()))


def group_checks(group: SolGroup, rng: np.random.Generator, samples: int) -> list:
    """Group axioms, exponential, metric and frame identities for one group parameter."""
    tag = f'[a={group.a:g}]'
    errors = {key: 0.0 for key in ('associativity', 'identity', 'inverse', 'exp_homomorphism', 'exp_oracle',
                                   'left_invariance', 'det', 'inverse_metric', 'frame_orthonormal',
                                   'frame_left_invariance', 'metric_z_only')}
    for _ in range(samples):
        p, q, r = (_random_point(rng) for _ in range(3))
        p_q, q_r = group.multiply(p, q), group.multiply(q, r)
        scale = max(_product_scale(group, p, q), _product_scale(group, p_q, r),
                    _product_scale(group, q, r), _product_scale(group, p, q_r))
        gap = _norm(group.multiply(p_q, r).as_array() - group.multiply(p, q_r).as_array())
        errors['associativity'] = max(errors['associativity'], gap / scale)

        e = group.identity
        gap = max(_norm(group.multiply(e, p).as_array() - p.as_array()),
                  _norm(group.multiply(p, e).as_array() - p.as_array()))
        errors['identity'] = max(errors['identity'], gap)

        p_inverse = group.inverse(p)
        scale = max(_product_scale(group, p, p_inverse), _product_scale(group, p_inverse, p))
        gap = max(_norm(group.multiply(p, p_inverse).as_array()), _norm(group.multiply(p_inverse, p).as_array()))
        errors['inverse'] = max(errors['inverse'], gap / scale)

        z1, z2 = rng.uniform(-WIDE / 2, WIDE / 2, 2)
        b1, b2 = group.exp_az(z1), group.exp_az(z2)
        gap = _norm(group.exp_az(z1 + z2) - b1 @ b2)
        errors['exp_homomorphism'] = max(errors['exp_homomorphism'], gap / (_norm(b1) * _norm(b2)))
        b = group.exp_az(p.z)
        errors['exp_oracle'] = max(errors['exp_oracle'], _norm(exp_az_oracle(group, p.z) - b) / _norm(b))

        jacobian = group.left_translation_jacobian(q)
        moved = group.multiply(q, p)
        g_moved = group.metric_at(moved)
        pulled = jacobian.T @ g_moved @ jacobian
        gap = _norm(pulled - group.metric_at(p))
        errors['left_invariance'] = max(errors['left_invariance'], gap / (_norm(jacobian) ** 2 * _norm(g_moved)))

        g, g_inverse = group.metric_at(p), group.inverse_metric_at(p)
        condition = _norm(g) * _norm(g_inverse)
        errors['det'] = max(errors['det'], abs(np.linalg.det(g) - 1.0) / condition)
        errors['inverse_metric'] = max(errors['inverse_metric'], _norm(g_inverse @ g - np.eye(3)) / condition)

        frame = group.frame_at(p)
        gap = _norm(frame.T @ g @ frame - np.eye(3))
        errors['frame_orthonormal'] = max(errors['frame_orthonormal'], gap / (_norm(frame) ** 2 * _norm(g)))
        gap = _norm(jacobian @ frame - group.frame_at(moved))
        errors['frame_left_invariance'] = max(errors['frame_left_invariance'], gap / (_norm(jacobian) * _norm(frame)))

        shifted = Point(q.x, q.y, p.z)
        errors['metric_z_only'] = max(errors['metric_z_only'], _norm(group.metric_at(shifted) - g))

    bounds = {'associativity': 1e-11, 'identity': 1e-13, 'inverse': 1e-11, 'exp_homomorphism': 1e-12,
              'exp_oracle': 1e-12, 'left_invariance': 1e-11, 'det': 1e-12, 'inverse_metric': 1e-12,
              'frame_orthonormal': 1e-12, 'frame_left_invariance': 1e-11, 'metric_z_only': 0.0}
    return [CheckResult.at_most(f'group.{key}{tag}', errors[key], bounds[key]) for key in errors]


def christoffel_checks(group: SolGroup, rng: np.random.Generator, samples: int) -> list:
    """Closed-form Christoffel symbols against the finite-difference oracle, at |z| ≤ 1."""
    tag = f'[a={group.a:g}]'
    oracle_error = symmetry_error = 0.0

    def metric(coords):
        return group.metric_at(Point(*coords))

    for _ in range(samples):
        p = _random_point(rng, 1.0)
        gamma = group.christoffel_at(p)
        scale = max(1.0, float(np.max(np.abs(gamma))))
        oracle_error = max(oracle_error, float(np.max(np.abs(gamma - fd_christoffel(metric, p.as_array())))) / scale)
        symmetry_error = max(symmetry_error, float(np.max(np.abs(gamma - gamma.transpose(0, 2, 1)))) / scale)
    return [CheckResult.at_most(f'christoffel.fd_oracle{tag}', oracle_error, 1e-6),
            CheckResult.at_most(f'christoffel.symmetric{tag}', symmetry_error, 1e-13)]


def orbit_checks(group: SolGroup, rng: np.random.Generator, samples: int) -> list:
    """Mean curvature of the x-orbits and the submersion onto the slice; a = 0 only."""
    curvature = submersion = 0.0
    for _ in range(samples):
        p = _random_point(rng)
        curvature = max(curvature, _norm(group.orbit_mean_curvature(p) - np.array([0.0, 0.0, 1.0])))
        submersion = max(submersion, group.submersion_defect(p))
    return [CheckResult.at_most('orbit.mean_curvature', curvature, 1e-10),
            CheckResult.at_most('orbit.submersion', submersion, 1e-12)]


def _random_hpoint(rng: np.random.Generator, span: float = 3.0) -> HPoint:
    return HPoint(rng.uniform(-span, span), math.exp(rng.uniform(-span, span)))


def halfplane_checks(rng: np.random.Generator, samples: int, weight_exponent: float) -> list:
    """Busemann function, horocycle weight, J-flow, distance and the slice isometry."""
    s_field = BusemannFunction()
    weight = HorocycleWeight(weight_exponent)
    errors = {key: 0.0 for key in ('busemann.laplacian', 'busemann.gradient', 'busemann.fd', 'weight.laplacian',
                                   'weight.along_flow', 'j_flow.geodesic', 'j_flow.unit', 'distance.isometry',
                                   'distance.triangle', 'slice.isometry')}
    for _ in range(samples):
        p = _random_hpoint(rng)
        jet = s_field.jet(p)
        errors['busemann.laplacian'] = max(errors['busemann.laplacian'], abs(jet.laplacian(p) - 1.0))
        errors['busemann.gradient'] = max(errors['busemann.gradient'], abs(jet.gradient_norm_sq(p) - 1.0))
        fd = fd_jet(s_field, p)
        errors['busemann.fd'] = max(errors['busemann.fd'], abs(fd.laplacian(p) - 1.0),
                                    abs(fd.gradient_norm_sq(p) - 1.0))

        w_jet = weight.jet(p)
        errors['weight.laplacian'] = max(errors['weight.laplacian'], abs(w_jet.laplacian(p) - 0.75 * w_jet.value) / w_jet.value)
        errors['weight.along_flow'] = max(errors['weight.along_flow'], abs(w_jet.along_flow(p) - 0.5 * w_jet.value) / w_jet.value)

        errors['j_flow.geodesic'] = max(errors['j_flow.geodesic'], _norm(j_flow_acceleration(p)) / p.h)
        j = horocycle_flow(p)
        errors['j_flow.unit'] = max(errors['j_flow.unit'], abs(j @ h2_metric(p) @ j - 1.0))

        q, o = _random_hpoint(rng), _random_hpoint(rng)
        d = h2_distance(p, q)
        shift, stretch = rng.uniform(-3, 3), math.exp(rng.uniform(-2, 2))
        translated = h2_distance(HPoint(p.xi + shift, p.h), HPoint(q.xi + shift, q.h))
        dilated = h2_distance(HPoint(stretch * p.xi, stretch * p.h), HPoint(stretch * q.xi, stretch * q.h))
        errors['distance.isometry'] = max(errors['distance.isometry'], abs(translated - d), abs(dilated - d))
        excess = d - h2_distance(p, o) - h2_distance(o, q)
        errors['distance.triangle'] = max(errors['distance.triangle'], excess)

        y, z = rng.uniform(-3, 3, 2)
        errors['slice.isometry'] = max(errors['slice.isometry'], _slice_pullback_defect(y, z))

    bounds = {'busemann.laplacian': 1e-12, 'busemann.gradient': 1e-12, 'busemann.fd': 1e-6,
              'weight.laplacian': 1e-10, 'weight.along_flow': 1e-10, 'j_flow.geodesic': 1e-12,
              'j_flow.unit': 1e-12, 'distance.isometry': 1e-12, 'distance.triangle': 1e-10,
              'slice.isometry': 1e-6}
    checks = [CheckResult.at_most(key, errors[key], bounds[key]) for key in errors]
    checks.append(_arc_length_check(rng))
    return checks


def _slice_pullback_defect(y: float, z: float, step: float = 1e-5) -> float:
    """Relative gap between the pull-back of the half-plane metric along (y, z) ↦ (y, e^{-z}) and e^{2z}dy² + dz²."""
    def image(dy, dz):
        return np.array([y + dy, math.exp(-(z + dz))])

    jacobian = np.column_stack([(image(step, 0) - image(-step, 0)) / (2 * step),
                                (image(0, step) - image(0, -step)) / (2 * step)])
    target = to_halfplane(Point(0.0, y, z))
    pulled = jacobian.T @ h2_metric(target) @ jacobian
    slice_metric = np.diag([math.exp(2 * z), 1.0])
    return float(np.max(np.abs(pulled - slice_metric) / np.diag(slice_metric)[:, None]))


def _arc_length_check(rng: np.random.Generator, samples: int = 50) -> CheckResult:
    error = 0.0
    for _ in range(samples):
        p = HPoint(rng.uniform(-3, -1), math.exp(rng.uniform(-2, 2)))
        q = HPoint(rng.uniform(1, 3), math.exp(rng.uniform(-2, 2)))
        d = h2_distance(p, q)
        error = max(error, abs(geodesic_arc_length(p, q) - d) / d)
    return CheckResult.at_most('distance.arc_length', error, 1e-9)


def eigenfunction_checks(eigenfunction: RadialEigenfunction) -> list:
    radii = np.linspace(0.0, 10.0, 101)
    values = eigenfunction(radii)
    oracle = max(abs(value - legendre_quadrature(r)) for r, value in zip(radii, values))
    profile, slope = eigenfunction.evaluate(np.linspace(0.0, eigenfunction.r_max, 2001))
    return [CheckResult.at_most('eigenfunction.ode_residual', eigenfunction.residual(), 1e-9),
            CheckResult.at_most('eigenfunction.legendre_oracle', oracle, 1e-8),
            CheckResult.at_most('eigenfunction.origin', abs(eigenfunction(0.0) - 1.0), 0.0),
            CheckResult.at_least('eigenfunction.positive', float(profile.min()), np.finfo(float).tiny),
            CheckResult.at_most('eigenfunction.decreasing', float(np.diff(profile).max()), -np.finfo(float).tiny),
            CheckResult.at_most('eigenfunction.negative_slope', float(slope[1:].max()), -np.finfo(float).tiny)]


def construction_checks(hf: HarmonicFunction, rng: np.random.Generator, samples: int, grid: GridSpec) -> list:
    """The product computation u = v·w and the drift equation L(u) = 0 at random points."""
    radial = RadialField(hf.eigenfunction, hf.base, hf.exclusion_radius)
    weight = HorocycleWeight(hf.weight_exponent, hf.horocycle_height)
    drift = laplacian_side = flow_side = 0.0
    count = 0
    while count < samples:
        p = _random_hpoint(rng)
        if radial.radius(p) < 0.1:
            continue
        count += 1
        u_jet = hf.h2_field.jet(p)
        v_jet, w_jet = radial.jet(p), weight.jet(p)
        u = u_jet.value
        drift = max(drift, abs(drift_L(hf.h2_field, p)) / u)
        expected = 0.5 * v_jet.value * w_jet.value + w_jet.value * v_jet.along_flow(p)
        laplacian_side = max(laplacian_side, abs(u_jet.laplacian(p) - expected) / u)
        flow_side = max(flow_side, abs(u_jet.along_flow(p) - expected) / u)

    x, y, z = grid.points()
    values = hf(x, y, z)
    return [CheckResult.at_most('construction.drift', drift, 1e-8),
            CheckResult.at_most('construction.laplacian_side', laplacian_side, 1e-9),
            CheckResult.at_most('construction.flow_side', flow_side, 1e-9),
            CheckResult.at_least('construction.positive', float(values.min()), np.finfo(float).tiny),
            CheckResult.at_least('construction.nonconstant', float(values.max() - values.min()), 0.1)]


def _control_field(x, y, z):
    return np.sin(x) * np.cos(y) * np.exp(z / 2)


def convergence_check(group: SolGroup, rng: np.random.Generator) -> CheckResult:
    """Second-order convergence of the finite-difference Laplacian on a smooth control field."""
    def exact(x, y, z):
        c_xx, c_xy, c_yy, c_zz = group.laplacian_coeffs(z)
        f = _control_field(x, y, z)
        f_xy = -np.cos(x) * np.sin(y) * np.exp(z / 2)
        return -c_xx * f + c_xy * f_xy - c_yy * f + c_zz * f / 4

    points = rng.uniform(-1.0, 1.0, (3, 50))
    ratio = fd_convergence_ratio(_control_field, exact, points, group, 2e-2)
    return CheckResult.at_most(f'fd.convergence_order[a={group.a:g}]', abs(ratio - 4.0), 0.5)


def identity_suite(seed: int = DEFAULTS.seed,
                   group_params=GROUP_PARAMS,
                   eigenvalue: float = BOTTOM_OF_SPECTRUM,
                   weight_exponent: float = 0.5,
                   eigenfunction: Optional[RadialEigenfunction] = None,
                   samples: int = 1000,
                   grid: str = DEFAULTS.grid) -> SuiteReport:
    """Run every identity at seeded random points and collect the results.

    Args:
        seed: Seed of the sampling generator.
        group_params: Values of a for the group and metric identities.
        eigenvalue: λ of the radial profile; anything but ¼ must make the construction checks fail.
        weight_exponent: κ of the weight e^{κ s}; anything but ½ must make the weight checks fail.
        eigenfunction: A solved profile to reuse; it is solved afresh when missing or when its
            eigenvalue differs from ``eigenvalue``.
        samples: Random points per group parameter.
        grid: Grid for the positivity and nonconstancy checks.

    Returns:
        A :class:`SuiteReport`; failures are entries, never exceptions.
    """
    rng = np.random.default_rng(seed)
    report = SuiteReport(seed)
    for a in dict.fromkeys(float(a) for a in group_params):
        group = SolGroup(a)
        report.checks.extend(group_checks(group, rng, samples))
        report.checks.extend(christoffel_checks(group, rng, max(1, samples // 5)))
        report.checks.append(convergence_check(group, rng))
        if a == 0:
            report.checks.extend(orbit_checks(group, rng, 100))

    report.checks.extend(halfplane_checks(rng, 500, weight_exponent))

    if eigenfunction is None or eigenfunction.eigenvalue != eigenvalue:
        eigenfunction = RadialEigenfunction.solve(eigenvalue=eigenvalue)
    report.checks.extend(eigenfunction_checks(eigenfunction))
    hf = HarmonicFunction(eigenfunction, BASE_POINT, weight_exponent=weight_exponent)
    report.checks.extend(construction_checks(hf, rng, 500, GridSpec.parse(grid)))

    for check in report.failures:
        logger.warning('identity check %s failed: %.3e %s %.1e', check.name, check.measured, check.comparison, check.bound)
    logger.info('identity suite with seed %d: %d checks, %d failed', seed, len(report.checks), len(report.failures))
    return report
