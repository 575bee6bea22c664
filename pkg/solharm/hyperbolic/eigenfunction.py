"""The positive radial solution of Δv + λv = 0 on H² with v(o) = 1.

For a function of the distance r to o the Laplacian of H² is Δv = v'' + coth(r) v', because the
geodesic circle of radius r has length 2π sinh r. At λ = ¼, the bottom of the spectrum, the solution is
the Legendre function P_{-1/2}(cosh r). It is positive and decreasing, and decays like r·e^{-r/2}.

Near r = 0 the coth singularity is avoided with the hypergeometric series

    v = Σ c_k (-t)^k,  t = sinh²(r/2),  c₀ = 1,  c_{k+1} = c_k (k² + k + λ) / (k + 1)²,

so v = 1 - λr²/4 + O(r⁴). Past ``series_radius`` an eighth-order Runge-Kutta solve with dense output
takes over.
"""

from __future__ import annotations

import logging

import numpy as np
from scipy.integrate import solve_ivp

from solharm.config import DEFAULTS
from solharm.hyperbolic.halfplane import OutOfDomainError

logger = logging.getLogger(__name__)

BOTTOM_OF_SPECTRUM = 0.25
SERIES_TERMS = 8


def series(r, eigenvalue: float = BOTTOM_OF_SPECTRUM, terms: int = SERIES_TERMS):
    """Value and r-derivative of the power series of v. Accurate for small r only."""
    r = np.asarray(r, dtype=float)
    t = np.sinh(r / 2) ** 2
    value = np.ones_like(r)
    d_value_dt = np.zeros_like(r)
    coefficient = 1.0
    power = np.ones_like(r)
    for k in range(terms):
        coefficient *= (k * k + k + eigenvalue) / (k + 1) ** 2
        d_value_dt -= (k + 1) * coefficient * power
        power = power * -t
        value += coefficient * power
    return value, d_value_dt * np.sinh(r) / 2


class RadialEigenfunction:
    """Dense-output representation of v and v' on [0, r_max].

    Built once with :meth:`solve`; immutable afterwards.

    Attributes:
        r_max: Right end of the solved interval.
        eigenvalue: λ in Δv + λv = 0.
        series_radius: Below this radius values come from the power series.
        rtol: Relative tolerance the ODE was solved to.
    """

    def __init__(self, solution, r_max: float, eigenvalue: float, series_radius: float, rtol: float) -> None:
        self._solution = solution
        self.r_max = r_max
        self.eigenvalue = eigenvalue
        self.series_radius = series_radius
        self.rtol = rtol

    def __repr__(self) -> str:
        return f'{self.__class__.__name__}(r_max={self.r_max}, eigenvalue={self.eigenvalue}, rtol={self.rtol})'

    @classmethod
    def solve(cls,
              r_max: float = DEFAULTS.r_max,
              eigenvalue: float = BOTTOM_OF_SPECTRUM,
              rtol: float = DEFAULTS.rtol,
              atol: float = DEFAULTS.atol,
              series_radius: float = DEFAULTS.series_radius) -> RadialEigenfunction:
        """Integrate v'' = -coth(r) v' - λv from the series start out to ``r_max``.

        Raises:
            ValueError: ``r_max`` does not exceed ``series_radius`` or a tolerance is not positive.
            RuntimeError: The integrator failed.
        """
        if not r_max > series_radius > 0:
            raise ValueError(f'need r_max > series_radius > 0, got r_max={r_max}, series_radius={series_radius}')
        if rtol <= 0 or atol <= 0:
            raise ValueError(f'tolerances must be positive, got rtol={rtol}, atol={atol}')

        def rhs(r, state):
            value, derivative = state
            return [derivative, -derivative / np.tanh(r) - eigenvalue * value]

        start_value, start_derivative = series(series_radius, eigenvalue)
        solution = solve_ivp(rhs, (series_radius, r_max), [float(start_value), float(start_derivative)],
                             method='DOP853', rtol=rtol, atol=atol, dense_output=True)
        if not solution.success:
            raise RuntimeError(f'radial eigenfunction solve failed: {solution.message}')
        logger.info('radial eigenfunction solved on [0, %g] for lambda=%g in %d steps',
                    r_max, eigenvalue, solution.t.size - 1)
        return cls(solution.sol, r_max, eigenvalue, series_radius, rtol)

    def _check_range(self, r: np.ndarray) -> None:
        if r.size and (np.any(~np.isfinite(r)) or r.min() < 0 or r.max() > self.r_max):
            raise OutOfDomainError(f'radius must lie in [0, {self.r_max}], got [{r.min()}, {r.max()}]')

    def evaluate(self, r):
        """Return (v(r), v'(r)); scalars for a scalar radius, arrays otherwise.

        Raises:
            OutOfDomainError: A radius lies outside [0, r_max].
        """
        radii = np.asarray(r, dtype=float)
        flat = radii.reshape(-1)
        self._check_range(flat)
        value = np.empty_like(flat)
        derivative = np.empty_like(flat)
        near = flat < self.series_radius
        value[near], derivative[near] = series(flat[near], self.eigenvalue)
        derivative[flat == 0] = 0.0
        if np.any(~near):
            value[~near], derivative[~near] = self._solution(flat[~near])
        if radii.ndim == 0:
            return float(value[0]), float(derivative[0])
        return value.reshape(radii.shape), derivative.reshape(radii.shape)

    def __call__(self, r):
        return self.evaluate(r)[0]

    def second_derivative(self, r, value, derivative):
        """v'' taken from the equation itself, -coth(r) v' - λv, with the limit -λv/2 at r = 0."""
        r = np.asarray(r, dtype=float)
        with np.errstate(divide='ignore', invalid='ignore'):
            second = -derivative / np.tanh(r) - self.eigenvalue * value
        second = np.where(r == 0, -self.eigenvalue * np.asarray(value) / 2, second)
        return float(second) if second.ndim == 0 else second

    def residual(self, radii=None, delta: float = 1e-3) -> float:
        """Largest residual of the first-order system along the dense output.

        Derivatives of v and v' are taken by the five-point central difference of the dense output and
        compared with v' and with -coth(r) v' - λv.
        """
        if radii is None:
            radii = np.linspace(self.series_radius + 2 * delta, self.r_max - 2 * delta, 2001)
        radii = np.asarray(radii, dtype=float)
        shifted = [self.evaluate(radii + k * delta) for k in (-2, -1, 1, 2)]
        values, derivatives = self.evaluate(radii)

        def central(index):
            m2, m1, p1, p2 = (s[index] for s in shifted)
            return (m2 - 8 * m1 + 8 * p1 - p2) / (12 * delta)

        first = np.abs(central(0) - derivatives)
        second = np.abs(central(1) + derivatives / np.tanh(radii) + self.eigenvalue * values)
        return float(max(first.max(), second.max()))

    def table(self, r_max: float, points: int) -> np.ndarray:
        """Rows (r, v, v') on an equispaced grid of [0, r_max].

        Raises:
            ValueError: ``points`` < 2 or ``r_max`` is not positive.
            OutOfDomainError: ``r_max`` exceeds the solved interval.
        """
        if points < 2:
            raise ValueError(f'need at least 2 points, got {points}')
        if not r_max > 0:
            raise ValueError(f'r_max must be positive, got {r_max}')
        radii = np.linspace(0.0, r_max, points)
        values, derivatives = self.evaluate(radii)
        return np.column_stack([radii, values, derivatives])
