"""The concrete fields of the construction u = v·w.

The naming follows the geometry: the Busemann function s of the horocycles h = const, the weight
w = e^{κ s}, the radial field v(d(·, o)) and their product.
"""

from __future__ import annotations

import math

import numpy as np

from solharm.config import DEFAULTS
from solharm.hyperbolic.base_fields import H2Field, H2Jet
from solharm.hyperbolic.eigenfunction import RadialEigenfunction
from solharm.hyperbolic.halfplane import (
    BASE_POINT,
    HPoint,
    NotDifferentiableError,
    busemann_s,
    distance_from,
)


class BusemannFunction(H2Field):
    """s(ξ, h) = log(h_H / h), the signed distance to the horocycle through height h_H.

    Attributes:
        horocycle_height: Height h_H of the reference horocycle; s = 0 there.
    """

    def __init__(self, horocycle_height: float = 1.0) -> None:
        if horocycle_height <= 0:
            raise ValueError(f'horocycle height must be positive, got {horocycle_height}')
        self.horocycle_height = horocycle_height

    def __repr__(self) -> str:
        return f'{self.__class__.__name__}(horocycle_height={self.horocycle_height})'

    def __call__(self, p: HPoint) -> float:
        return busemann_s(p, self.horocycle_height)

    def jet(self, p: HPoint) -> H2Jet:
        return H2Jet(self(p),
                     np.array([0.0, -1.0 / p.h]),
                     np.array([[0.0, 0.0], [0.0, 1.0 / p.h ** 2]]))


class HorocycleWeight(H2Field):
    """w = e^{κ s} = (h_H / h)^κ. At κ = ½ it satisfies Δw = ¾w and J(w) = ½w.

    Attributes:
        exponent: κ.
        horocycle_height: Height of the reference horocycle, where w = 1.
    """

    def __init__(self, exponent: float = 0.5, horocycle_height: float = 1.0) -> None:
        self.busemann = BusemannFunction(horocycle_height)
        self.exponent = exponent

    def __repr__(self) -> str:
        return f'{self.__class__.__name__}(exponent={self.exponent}, ' \
               f'horocycle_height={self.busemann.horocycle_height})'

    def __call__(self, p: HPoint) -> float:
        return math.exp(self.exponent * self.busemann(p))

    def jet(self, p: HPoint) -> H2Jet:
        k = self.exponent
        value = self(p)
        return H2Jet(value,
                     np.array([0.0, -k * value / p.h]),
                     np.array([[0.0, 0.0], [0.0, k * (k + 1) * value / p.h ** 2]]))


class RadialField(H2Field):
    """v(d(p, o)) for a radial eigenfunction v and a base point o.

    The jet uses the closed-form partials of C = cosh r = 1 + ((ξ-ξ₀)² + (h-h₀)²)/(2 h h₀):
    r_i = C_i / sinh r and r_ij = (C_ij - cosh r · r_i r_j) / sinh r. The second derivative of v comes from
    the equation, so the jet is singular only at o itself.

    Attributes:
        eigenfunction: The radial profile v.
        base: The point o where v = 1.
        exclusion_radius: Jets are refused closer than this to o.
    """

    def __init__(self,
                 eigenfunction: RadialEigenfunction,
                 base: HPoint = BASE_POINT,
                 exclusion_radius: float = DEFAULTS.exclusion_radius) -> None:
        self.eigenfunction = eigenfunction
        self.base = base
        self.exclusion_radius = exclusion_radius

    def __repr__(self) -> str:
        return f'{self.__class__.__name__}({self.eigenfunction!r}, base={self.base!r})'

    def radius(self, p: HPoint) -> float:
        return float(distance_from(self.base, p.xi, p.h))

    def __call__(self, p: HPoint) -> float:
        return self.eigenfunction(self.radius(p))

    def jet(self, p: HPoint) -> H2Jet:
        r = self.radius(p)
        if r < self.exclusion_radius:
            raise NotDifferentiableError(f'distance to the base point is not differentiable at r = {r:.3g}')
        xi0, h0 = self.base.xi, self.base.h
        dxi = p.xi - xi0
        h = p.h
        cosh_r, sinh_r = math.cosh(r), math.sinh(r)
        c_grad = np.array([dxi / (h * h0), (h * h - h0 * h0 - dxi * dxi) / (2 * h0 * h * h)])
        c_hess = np.array([[1 / (h * h0), -dxi / (h * h * h0)],
                           [-dxi / (h * h * h0), (h0 * h0 + dxi * dxi) / (h0 * h ** 3)]])
        r_grad = c_grad / sinh_r
        r_hess = (c_hess - cosh_r * np.outer(r_grad, r_grad)) / sinh_r
        value, derivative = self.eigenfunction.evaluate(r)
        second = self.eigenfunction.second_derivative(r, value, derivative)
        return H2Jet(value,
                     derivative * r_grad,
                     second * np.outer(r_grad, r_grad) + derivative * r_hess)


class ProductField(H2Field):
    """The pointwise product of two fields, differentiated by the Leibniz rule."""

    def __init__(self, first: H2Field, second: H2Field) -> None:
        self.first = first
        self.second = second

    def __repr__(self) -> str:
        return f'{self.__class__.__name__}({self.first!r}, {self.second!r})'

    def __call__(self, p: HPoint) -> float:
        return self.first(p) * self.second(p)

    def jet(self, p: HPoint) -> H2Jet:
        f, g = self.first.jet(p), self.second.jet(p)
        cross = np.outer(f.gradient, g.gradient)
        return H2Jet(f.value * g.value,
                     f.value * g.gradient + g.value * f.gradient,
                     f.value * g.hessian + g.value * f.hessian + cross + cross.T)

