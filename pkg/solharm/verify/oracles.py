"""Reference computations kept independent of the closed forms they check."""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad
from scipy.linalg import expm
from scipy.special import ellipkm1

from solharm.hyperbolic import HPoint
from solharm.liegroup import SolGroup


def exp_az_oracle(group: SolGroup, z: float) -> np.ndarray:
    """e^{A z} by scaling and squaring with Padé approximation, blind to A² = I."""
    return expm(group.matrix * z)


def legendre_quadrature(r: float) -> float:
    """P_{-1/2}(cosh r) = (1/π) ∫₀^π (cosh r + sinh r cos θ)^{-1/2} dθ by adaptive quadrature.

    The base is written e^{-r} + 2 sinh r cos²(θ/2) so it keeps full precision near θ = π, where the
    integrand peaks on a scale of e^{-r}. Breakpoints approach π geometrically down to that scale.
    """
    if r < 0:
        raise ValueError(f'radius must be nonnegative, got {r}')
    sinh_r, decay = math.sinh(r), math.exp(-r)

    def integrand(theta):
        return (decay + 2 * sinh_r * math.cos(theta / 2) ** 2) ** -0.5

    points = None
    if r > 1:
        gaps = np.geomspace(1.0, max(decay, 1e-12), num=max(2, int(r)))
        points = [math.pi - g for g in gaps if 0 < math.pi - g < math.pi]
    value, _ = quad(integrand, 0.0, math.pi, points=points, limit=500, epsabs=1e-14, epsrel=1e-13)
    return value / math.pi


def legendre_closed_form(r: float) -> float:
    """P_{-1/2}(cosh r) = (2/π) e^{-r/2} K(1 - e^{-2r}), with K evaluated through ellipkm1(e^{-2r})."""
    return 2 / math.pi * math.exp(-r / 2) * float(ellipkm1(math.exp(-2 * r)))


def geodesic_arc_length(p: HPoint, q: HPoint) -> float:
    """Length of the half-plane geodesic from p to q, integrating the line element numerically.

    Vertical geodesics are parametrized by h, the others by the angle on their semicircle, where
    |dγ|/h = dθ / sin θ.
    """
    if p.xi == q.xi:
        value, _ = quad(lambda h: 1.0 / h, min(p.h, q.h), max(p.h, q.h), epsabs=1e-14, epsrel=1e-13)
        return value
    centre = ((p.xi ** 2 + p.h ** 2) - (q.xi ** 2 + q.h ** 2)) / (2 * (p.xi - q.xi))
    start, end = sorted(math.atan2(point.h, point.xi - centre) for point in (p, q))
    value, _ = quad(lambda theta: 1.0 / math.sin(theta), start, end, epsabs=1e-14, epsrel=1e-13)
    return value


def fd_christoffel(metric, coords, step: float = 1e-4) -> np.ndarray:
    """Γ^k_ij at ``[k, i, j]`` from central differences of a coordinate metric.

    Args:
        metric: Callable mapping a coordinate array to the metric matrix there.
        coords: Evaluation point.
        step: Difference step.
    """
    coords = np.asarray(coords, dtype=float)
    n = coords.size
    g = metric(coords)
    g_inverse = np.linalg.inv(g)
    dg = np.empty((n, n, n))
    for axis in range(n):
        offset = np.zeros(n)
        offset[axis] = step
        dg[axis] = (metric(coords + offset) - metric(coords - offset)) / (2 * step)
    gamma = np.zeros((n, n, n))
    for k in range(n):
        for i in range(n):
            for j in range(n):
                gamma[k, i, j] = 0.5 * sum(g_inverse[k, l] * (dg[i, j, l] + dg[j, i, l] - dg[l, i, j])
                                           for l in range(n))
    return gamma
