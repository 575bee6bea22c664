"""The positive nonconstant harmonic function ũ on Sol₃.

On the half-plane u = v·w, where v is the radial λ = ¼ eigenfunction about o and w = e^{s/2} is the
horocycle weight. Then Δw = ¾w, J(w) = ½w and Δv = -¼v, so

    Δu = vΔw + wΔv + 2⟨∇v, ∇w⟩ = ½vw + wJ(v) = J(u),

that is L(u) = Δu - J(u) = 0. The lift ũ(x, y, z) = u(y, e^{-z}) is therefore harmonic for the a = 0
metric, and since it does not depend on x every term of the a > 0 Laplacian carrying an x-derivative
vanishes, so it is harmonic for every a ≥ 0.

In Sol coordinates with o = (ξ₀, e^{-z₀}) the radius is explicit,

    cosh r = cosh(z - z₀) + ½(y - ξ₀)² e^{z + z₀},

which is what :meth:`HarmonicFunction.derivatives` differentiates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from solharm.config import DEFAULTS
from solharm.hyperbolic import (
    BASE_POINT,
    HorocycleWeight,
    HPoint,
    NotDifferentiableError,
    OutOfDomainError,
    ProductField,
    RadialEigenfunction,
    RadialField,
    distance_from,
    to_halfplane,
)
from solharm.liegroup import Point, SolGroup


@dataclass(frozen=True)
class SolJet:
    """Value, gradient and Hessian of a function on Sol₃ in (x, y, z) coordinates."""
    value: float
    gradient: np.ndarray
    hessian: np.ndarray

    @property
    def u_xx(self) -> float:
        return self.hessian[0, 0]

    @property
    def u_xy(self) -> float:
        return self.hessian[0, 1]

    @property
    def u_yy(self) -> float:
        return self.hessian[1, 1]

    @property
    def u_zz(self) -> float:
        return self.hessian[2, 2]

    def laplacian(self, group: SolGroup, z: float) -> float:
        c_xx, c_xy, c_yy, c_zz = group.laplacian_coeffs(z)
        return float(c_xx * self.u_xx + c_xy * self.u_xy + c_yy * self.u_yy + c_zz * self.u_zz)


class HarmonicFunction:
    """ũ = (v·w)∘π, immutable once built.

    Attributes:
        eigenfunction: Radial profile v.
        base: Base point o of v in the half-plane.
        horocycle_height: Height of the horocycle where s = 0 and w = 1.
        weight_exponent: κ in w = e^{κ s}; only κ = ½ gives a harmonic function.
        exclusion_radius: Derivatives are refused this close to o.
    """

    def __init__(self,
                 eigenfunction: Optional[RadialEigenfunction] = None,
                 base: HPoint = BASE_POINT,
                 horocycle_height: float = 1.0,
                 weight_exponent: float = 0.5,
                 exclusion_radius: float = DEFAULTS.exclusion_radius) -> None:
        if horocycle_height <= 0:
            raise ValueError(f'horocycle height must be positive, got {horocycle_height}')
        self.eigenfunction = eigenfunction if eigenfunction is not None else RadialEigenfunction.solve()
        self.base = base
        self.horocycle_height = horocycle_height
        self.weight_exponent = weight_exponent
        self.exclusion_radius = exclusion_radius
        self.h2_field = ProductField(RadialField(self.eigenfunction, base, exclusion_radius),
                                     HorocycleWeight(weight_exponent, horocycle_height))

    def __repr__(self) -> str:
        return f'{self.__class__.__name__}({self.eigenfunction!r}, base={self.base!r}, ' \
               f'horocycle_height={self.horocycle_height}, weight_exponent={self.weight_exponent})'

    @property
    def r_max(self) -> float:
        return self.eigenfunction.r_max

    def u_h2(self, p: HPoint) -> float:
        """u(p) = v(d(p, o))·e^{κ s(p)}.

        Raises:
            OutOfDomainError: d(p, o) > r_max.
        """
        return self.h2_field(p)

    def lift_u(self, p: Point) -> float:
        return self.u_h2(to_halfplane(p))

    def radius(self, y, z):
        """d(π(x, y, z), o), broadcasting over arrays."""
        return distance_from(self.base, y, np.exp(-np.asarray(z, dtype=float)))

    def weight(self, z):
        return np.exp(self.weight_exponent * (np.asarray(z, dtype=float) + math.log(self.horocycle_height)))

    def __call__(self, x, y, z):
        """Vectorized ũ; x only fixes the broadcast shape."""
        x, y, z = np.broadcast_arrays(*(np.asarray(c, dtype=float) for c in (x, y, z)))
        return self.eigenfunction(self.radius(y, z)) * self.weight(z)

    def derivatives(self, y, z):
        """ũ and its y, z partials up to second order, broadcasting over arrays.

        Returns:
            A tuple (u, u_y, u_z, u_yy, u_yz, u_zz).

        Raises:
            NotDifferentiableError: A point lies within ``exclusion_radius`` of o.
            OutOfDomainError: A radius exceeds r_max.
        """
        y, z = np.broadcast_arrays(np.asarray(y, dtype=float), np.asarray(z, dtype=float))
        r = self.radius(y, z)
        if r.size and r.min() < self.exclusion_radius:
            raise NotDifferentiableError(f'distance to the base point is not differentiable at r = {r.min():.3g}')
        z0 = -math.log(self.base.h)
        dy = y - self.base.xi
        zeta = z - z0
        stretch = np.exp(z + z0)
        q = 0.5 * dy * dy * stretch
        c_y, c_z = dy * stretch, np.sinh(zeta) + q
        c_yy, c_yz, c_zz = stretch, dy * stretch, np.cosh(zeta) + q

        sinh_r, cosh_r = np.sinh(r), np.cosh(r)
        r_y, r_z = c_y / sinh_r, c_z / sinh_r
        r_yy = (c_yy - cosh_r * r_y * r_y) / sinh_r
        r_yz = (c_yz - cosh_r * r_y * r_z) / sinh_r
        r_zz = (c_zz - cosh_r * r_z * r_z) / sinh_r

        v, dv = self.eigenfunction.evaluate(r)
        ddv = self.eigenfunction.second_derivative(r, v, dv)
        f_y, f_z = dv * r_y, dv * r_z
        f_yy = ddv * r_y * r_y + dv * r_yy
        f_yz = ddv * r_y * r_z + dv * r_yz
        f_zz = ddv * r_z * r_z + dv * r_zz

        k = self.weight_exponent
        w = self.weight(z)
        return (v * w,
                f_y * w,
                (f_z + k * v) * w,
                f_yy * w,
                (f_yz + k * f_y) * w,
                (f_zz + 2 * k * f_z + k * k * v) * w)

    def lift_u_derivatives(self, p: Point) -> SolJet:
        """Analytic jet of ũ at p. Every x-derivative is exactly zero."""
        u, u_y, u_z, u_yy, u_yz, u_zz = (float(d) for d in self.derivatives(p.y, p.z))
        hessian = np.array([[0.0, 0.0, 0.0],
                            [0.0, u_yy, u_yz],
                            [0.0, u_yz, u_zz]])
        return SolJet(u, np.array([0.0, u_y, u_z]), hessian)

    def radius_bound(self, centre: Point, rho: float) -> float:
        """Upper bound of d(π(q), o) over the coordinate ball of radius ``rho`` about ``centre``.

        Moving vertically by at most ρ and then along y at the new height, where the y-speed is e^z,
        reaches every point of the ball.
        """
        return float(self.radius(centre.y, centre.z)) + rho * (1.0 + math.exp(centre.z + rho))

    def check_ball(self, centre: Point, rho: float) -> None:
        """Raises:
            OutOfDomainError: The coordinate ball may leave the evaluation domain.
        """
        bound = self.radius_bound(centre, rho)
        if bound > self.r_max:
            raise OutOfDomainError(f'a ball of radius {rho} about {centre} reaches r = {bound:.3g} > r_max = {self.r_max}')
