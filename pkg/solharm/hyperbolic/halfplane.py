"""The upper half-plane model of H², (R²₊, (dξ² + dh²)/h²), and its link to the Sol₃ slice x = 0.

The slice M = {(0, y, z)} carries e^{2z}dy² + dz², and (0, y, z) ↦ (y, e^{-z}) is an isometry onto the
half-plane. The fibres of π(x, y, z) = (0, y, z) are the orbits of x-translations. Their projected mean
curvature J = ∂z becomes the vertical field (0, -h), the unit gradient of s = -log h. The level sets
of s are the horocycles h = const centred at the boundary point ∞; the flow lines of J are the
vertical geodesics, all issuing from ∞ and running down towards h → 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from solharm.liegroup import Point, christoffel_symbols

XI, H = 0, 1


class OutOfDomainError(ValueError):
    """A radius or a region lies outside the domain an evaluation supports."""


class NotDifferentiableError(ValueError):
    """A derivative was requested where the radial chart is singular."""


@dataclass(frozen=True)
class HPoint:
    """A point (ξ, h) of the half-plane, h > 0."""
    xi: float
    h: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.xi) or not math.isfinite(self.h):
            raise ValueError(f'half-plane coordinates must be finite, got {self!r}')
        if self.h <= 0:
            raise ValueError(f'half-plane height must be positive, got h = {self.h}')


BASE_POINT = HPoint(0.0, 1.0)


def to_halfplane(p: Point) -> HPoint:
    """π followed by the slice isometry: (x, y, z) ↦ (y, e^{-z}). x is ignored."""
    return HPoint(p.y, math.exp(-p.z))


def distance_from(base: HPoint, xi, h):
    """Hyperbolic distance from ``base`` to (ξ, h), broadcasting over arrays.

    Uses d = 2 asinh(|Δ| / (2√(h h₀))), the cancellation-free form of cosh d = 1 + |Δ|²/(2 h h₀).
    """
    xi = np.asarray(xi, dtype=float)
    h = np.asarray(h, dtype=float)
    chord = np.hypot(xi - base.xi, h - base.h)
    return 2.0 * np.arcsinh(chord / (2.0 * np.sqrt(h * base.h)))


def h2_distance(p: HPoint, q: HPoint) -> float:
    return float(distance_from(p, q.xi, q.h))


def busemann_s(p: HPoint, horocycle_height: float = 1.0) -> float:
    """Signed distance to the horocycle h = ``horocycle_height``, positive on the side h → 0.

    In Sol coordinates s = z when the horocycle passes through the image of the origin.

    Raises:
        ValueError: Nonpositive horocycle height.
    """
    if horocycle_height <= 0:
        raise ValueError(f'horocycle height must be positive, got {horocycle_height}')
    return math.log(horocycle_height / p.h)


def metric(p: HPoint) -> np.ndarray:
    return np.eye(2) / p.h ** 2


def inverse_metric(p: HPoint) -> np.ndarray:
    return np.eye(2) * p.h ** 2


def christoffel(p: HPoint) -> np.ndarray:
    derivatives = np.zeros((2, 2, 2))
    derivatives[H] = -2.0 * np.eye(2) / p.h ** 3
    return christoffel_symbols(inverse_metric(p), derivatives)


def horocycle_flow(p: HPoint) -> np.ndarray:
    """J = ∇s = (0, -h)."""
    return np.array([0.0, -p.h])


def j_flow_acceleration(p: HPoint) -> np.ndarray:
    """∇_J J. Zero because the flow lines of J are the vertical geodesics ending at h = 0."""
    j = horocycle_flow(p)
    j_derivatives = np.array([[0.0, 0.0], [0.0, -1.0]])
    return j_derivatives @ j + np.einsum('kij,i,j->k', christoffel(p), j, j)
