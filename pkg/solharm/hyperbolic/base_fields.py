from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from solharm.hyperbolic.halfplane import H, XI, HPoint, horocycle_flow


@dataclass(frozen=True)
class H2Jet:
    """Value, coordinate gradient and coordinate Hessian of a function at a point of the half-plane.

    Attributes:
        value: u(p).
        gradient: (u_ξ, u_h).
        hessian: Second partials in (ξ, h), symmetric 2×2.
    """
    value: float
    gradient: np.ndarray
    hessian: np.ndarray

    def laplacian(self, p: HPoint) -> float:
        """Δu = h²(u_ξξ + u_hh); the conformal metric contributes no first-order terms in dimension two."""
        return p.h ** 2 * (self.hessian[XI, XI] + self.hessian[H, H])

    def gradient_norm_sq(self, p: HPoint) -> float:
        return p.h ** 2 * float(self.gradient @ self.gradient)

    def along_flow(self, p: HPoint) -> float:
        """J(u) = ⟨∇u, J⟩ = du(J)."""
        return float(self.gradient @ horocycle_flow(p))

    def drift(self, p: HPoint) -> float:
        """L(u) = Δu - ⟨∇u, J⟩."""
        return self.laplacian(p) - self.along_flow(p)


class H2Field(ABC):
    """The Abstract Base Class for scalar functions on the half-plane.

    Subclasses give values and exact jets; every geometric quantity (Laplacian, drift, |∇u|²) is derived
    here from the jet, so a subclass only has to get its calculus right once.
    """

    def __repr__(self) -> str:
        return f'{self.__class__.__name__}()'

    @abstractmethod
    def __call__(self, p: HPoint) -> float:
        """The value u(p)."""

    @abstractmethod
    def jet(self, p: HPoint) -> H2Jet:
        """Value, gradient and Hessian of u at p in half-plane coordinates."""

    def laplacian(self, p: HPoint) -> float:
        return self.jet(p).laplacian(p)

    def drift(self, p: HPoint) -> float:
        return self.jet(p).drift(p)


def fd_jet(function, p: HPoint, step: float = 1e-4) -> H2Jet:
    """Central-difference jet of a plain function of an :class:`HPoint`.

    The step is ``step·h`` in both coordinates, so it scales with the metric.
    """
    d = step * p.h

    def at(dxi, dh):
        return function(HPoint(p.xi + dxi * d, p.h + dh * d))

    centre = at(0, 0)
    gradient = np.array([(at(1, 0) - at(-1, 0)) / (2 * d), (at(0, 1) - at(0, -1)) / (2 * d)])
    mixed = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4 * d * d)
    hessian = np.array([[(at(1, 0) - 2 * centre + at(-1, 0)) / (d * d), mixed],
                        [mixed, (at(0, 1) - 2 * centre + at(0, -1)) / (d * d)]])
    return H2Jet(centre, gradient, hessian)


def drift_L(u, p: HPoint, step: float = 1e-4) -> float:
    """L(u) = Δu - ⟨∇u, J⟩ at p.

    Args:
        u: An :class:`H2Field`, whose exact jet is used, or any callable of an :class:`HPoint`, which is
            differentiated by central differences.
        p: Evaluation point.
        step: Relative difference step for plain callables.
    """
    field = u if isinstance(u, H2Field) else SampledField(u, step)
    return field.drift(p)


class SampledField(H2Field):
    """A plain function of an :class:`HPoint` whose jet is taken by central differences.

    Attributes:
        function: The wrapped callable.
        step: Relative difference step.
    """

    def __init__(self, function, step: float = 1e-4) -> None:
        self.function = function
        self.step = step

    def __repr__(self) -> str:
        return f'{self.__class__.__name__}({self.function!r}, step={self.step})'

    def __call__(self, p: HPoint) -> float:
        return self.function(p)

    def jet(self, p: HPoint) -> H2Jet:
        return fd_jet(self.function, p, self.step)
