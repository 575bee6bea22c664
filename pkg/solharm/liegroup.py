"""The metric Lie group R² ⋊_A R with A = [[1, a], [0, -1]], a ≥ 0.

Coordinates are (x, y, z) and the group law is

    (p₁, z₁) ∗ (p₂, z₂) = (p₁ + e^{A z₁} p₂, z₁ + z₂).

The canonical left-invariant metric makes (∂x, ∂y, ∂z) orthonormal at the origin. Its left-invariant
orthonormal frame has E₁, E₂ equal to the columns of e^{A z} written in (∂x, ∂y), and E₃ = ∂z, so the
coordinate metric is B^{-T} B^{-1} on the (x, y) block with B = e^{A z}.

Why the Laplacian has no first-order terms:
    In coordinates Δu = |g|^{-1/2} ∂ᵢ(|g|^{1/2} g^{ij} ∂ⱼu).

    * det g = det(e^{-A z})² = e^{-2 z tr A} = 1, hence |g|^{1/2} ≡ 1.
    * g^{ij} depends on z alone and g^{zj} = δ_{zj}, hence ∂ᵢ g^{ij} = ∂_z g^{zj} = 0.

    What remains is Δu = g^{ij} ∂ᵢ∂ⱼu, that is

        Δu = (e^{2z} + p(z)²) u_xx + 2 p(z) e^{-z} u_xy + e^{-2z} u_yy + u_zz,

    with p(z) = a·sinh z, the (1, 2) entry of e^{A z}. A² = I gives e^{A z} = cosh z·I + sinh z·A.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Iterator
from dataclasses import dataclass

import numpy as np

X, Y, Z = 0, 1, 2


@dataclass(frozen=True)
class Point:
    """A point of R² ⋊_A R in global coordinates."""
    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        if not all(math.isfinite(c) for c in (self.x, self.y, self.z)):
            raise ValueError(f'coordinates must be finite, got {self!r}')

    def __iter__(self) -> Iterator[float]:
        yield self.x
        yield self.y
        yield self.z

    @classmethod
    def from_iterable(cls, values: Iterable[float]) -> Point:
        x, y, z = (float(v) for v in values)
        return cls(x, y, z)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)


ORIGIN = Point(0.0, 0.0, 0.0)


def christoffel_symbols(metric_inverse: np.ndarray, metric_derivatives: np.ndarray) -> np.ndarray:
    """Christoffel symbols of the second kind from a metric and its first derivatives.

    Args:
        metric_inverse: g^{kl}, shape (n, n).
        metric_derivatives: ∂_l g_ij stored at ``[l, i, j]``, shape (n, n, n).

    Returns:
        Γ^k_ij stored at ``[k, i, j]``, symmetric in (i, j).
    """
    dg = np.asarray(metric_derivatives, dtype=float)
    lowered = 0.5 * (np.einsum('ijl->lij', dg) + np.einsum('jil->lij', dg) - dg)
    return np.einsum('kl,lij->kij', np.asarray(metric_inverse, dtype=float), lowered)


@dataclass(frozen=True)
class SolGroup:
    """R² ⋊_A R with A = [[1, a], [0, -1]] and its canonical left-invariant metric.

    Up to homothety every left-invariant metric on Sol₃ is one of these. ``a = 0`` is the Thurston
    geometry ds² = e^{-2z}dx² + e^{2z}dy² + dz².

    Attributes:
        a: Shear parameter, a ≥ 0.
    """
    a: float = 0.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.a) or self.a < 0:
            raise ValueError(f'shear parameter a must satisfy a >= 0, got {self.a}')

    @property
    def identity(self) -> Point:
        return ORIGIN

    @property
    def matrix(self) -> np.ndarray:
        """The trace-free generator A."""
        return np.array([[1.0, self.a], [0.0, -1.0]])

    def shear(self, z):
        """p(z) = a·sinh z, the off-diagonal entry of e^{A z}. Broadcasts over arrays."""
        return self.a * np.sinh(z)

    def exp_az(self, z: float) -> np.ndarray:
        """e^{A z} in closed form, (e^z, a·sinh z; 0, e^{-z})."""
        return np.array([[math.exp(z), self.a * math.sinh(z)], [0.0, math.exp(-z)]])

    def multiply(self, p: Point, q: Point) -> Point:
        b = self.exp_az(p.z)
        return Point(p.x + b[0, 0] * q.x + b[0, 1] * q.y,
                     p.y + b[1, 0] * q.x + b[1, 1] * q.y,
                     p.z + q.z)

    def inverse(self, p: Point) -> Point:
        """-e^{-A z}(x, y) in the plane, -z vertically."""
        c = self.exp_az(-p.z)
        return Point(-(c[0, 0] * p.x + c[0, 1] * p.y),
                     -(c[1, 0] * p.x + c[1, 1] * p.y),
                     -p.z)

    def left_translation_jacobian(self, g: Point) -> np.ndarray:
        """The differential of p ↦ g ∗ p. It is constant in p."""
        jacobian = np.eye(3)
        jacobian[:2, :2] = self.exp_az(g.z)
        return jacobian

    def frame_at(self, p: Point) -> np.ndarray:
        """The left-invariant orthonormal frame; column i is E_{i+1} in the coordinate basis."""
        frame = np.eye(3)
        frame[:2, :2] = self.exp_az(p.z)
        return frame

    def frame_derivative(self, p: Point) -> np.ndarray:
        """∂z of the frame columns. The frame depends on z only, and ∂z e^{A z} = A e^{A z}."""
        derivative = np.zeros((3, 3))
        derivative[:2, :2] = self.matrix @ self.exp_az(p.z)
        return derivative

    def metric_at(self, p: Point) -> np.ndarray:
        c = self.exp_az(-p.z)
        metric = np.eye(3)
        metric[:2, :2] = c.T @ c
        return metric

    def inverse_metric_at(self, p: Point) -> np.ndarray:
        b = self.exp_az(p.z)
        inverse = np.eye(3)
        inverse[:2, :2] = b @ b.T
        return inverse

    def metric_derivatives(self, p: Point) -> np.ndarray:
        """∂_l g_ij at ``[l, i, j]``. Only l = z is nonzero: ∂z(CᵀC) = -Cᵀ(A + Aᵀ)C with C = e^{-A z}."""
        c = self.exp_az(-p.z)
        a = self.matrix
        derivatives = np.zeros((3, 3, 3))
        derivatives[Z, :2, :2] = -(c.T @ (a + a.T) @ c)
        return derivatives

    def christoffel_at(self, p: Point) -> np.ndarray:
        """Γ^k_ij at ``[k, i, j]`` from the closed-form z-derivatives of the metric."""
        return christoffel_symbols(self.inverse_metric_at(p), self.metric_derivatives(p))

    def covariant_derivative(self, p: Point, vector: np.ndarray, field: np.ndarray,
                             field_derivatives: np.ndarray) -> np.ndarray:
        """(∇_X Y)^k = X^i ∂_i Y^k + Γ^k_ij X^i Y^j.

        Args:
            p: Base point.
            vector: X at p.
            field: Y at p.
            field_derivatives: ∂_i Y^k stored at ``[k, i]``.
        """
        gamma = self.christoffel_at(p)
        return field_derivatives @ vector + np.einsum('kij,i,j->k', gamma, vector, field)

    def orbit_mean_curvature(self, p: Point) -> np.ndarray:
        """Mean curvature vector of the orbit of x-translations through p, (∇_{E₁}E₁)^⊥.

        The orbits are the x-lines with unit tangent E₁ = e^z ∂x, so the result is ∂z everywhere.

        Raises:
            ValueError: a ≠ 0.
        """
        if self.a != 0:
            raise ValueError(f'the orbit mean curvature is defined for a = 0 only, got a = {self.a}')
        e1 = self.frame_at(p)[:, 0]
        e1_derivatives = np.zeros((3, 3))
        e1_derivatives[:, Z] = self.frame_derivative(p)[:, 0]
        acceleration = self.covariant_derivative(p, e1, e1, e1_derivatives)
        tangential = acceleration @ self.metric_at(p) @ e1
        return acceleration - tangential * e1

    def laplacian_coeffs(self, z):
        """Second-order coefficients (c_xx, c_xy, c_yy, c_zz) of Δ; Δu = c_xx u_xx + c_xy u_xy + c_yy u_yy + c_zz u_zz.

        Broadcasts over arrays of z.
        """
        z = np.asarray(z, dtype=float)
        p = self.shear(z)
        return (np.exp(2 * z) + p * p,
                2 * p * np.exp(-z),
                np.exp(-2 * z),
                np.ones_like(z))

    def submersion_defect(self, p: Point) -> float:
        """Largest deviation from π(x, y, z) = (0, y, z) being a Riemannian submersion onto the slice.

        Zero when ∂x is orthogonal to ∂y, ∂z and the metric on span{∂y, ∂z} is e^{2z}dy² + dz²;
        this holds for a = 0.
        """
        g = self.metric_at(p)
        slice_yy = math.exp(2 * p.z)
        return max(abs(g[X, Y]) / math.sqrt(g[X, X] * g[Y, Y]),
                   abs(g[X, Z]),
                   abs(g[Y, Y] - slice_yy) / slice_yy,
                   abs(g[Y, Z]),
                   abs(g[Z, Z] - 1.0))
