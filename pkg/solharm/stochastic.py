"""Brownian motion on R² ⋊_A R in global coordinates.

The generator of Brownian motion is ½Δ, and Δ = g^{ij}∂ᵢ∂ⱼ has no first-order part for this family of
metrics, so the Euler-Maruyama scheme has no drift term:

    X_{k+1} = X_k + √dt · σ(z_k) ξ_k,    σσᵀ = g^{-1},

where σ is the left-invariant orthonormal frame, upper triangular with e^{A z} in its (x, y) block.

Every path index owns an independent Philox stream spawned from the master seed, and paths are
simulated in blocks of fixed size, so an ensemble is a function of (seed, configuration, n) alone and
does not depend on the number of worker threads.

Balls are coordinate balls. Geodesic distance on Sol₃ has no closed form and both the transience
statistics and the stopped martingale only need some exhausting family of compact sets.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
from scipy.stats import chi

from solharm.config import DEFAULTS, max_workers
from solharm.harmonic import HarmonicFunction
from solharm.liegroup import ORIGIN, Z, Point, SolGroup

logger = logging.getLogger(__name__)

NOISE_CHUNK = 1024


def path_generator(seed: int, index: int) -> np.random.Generator:
    """The random stream of path ``index``: Philox keyed by the master seed and the path index."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))


def bm_increments(z, noise, dt: float, group: SolGroup, euclidean: bool = False) -> np.ndarray:
    """Euler-Maruyama increments √dt·σ(z)ξ for a batch of points.

    Args:
        z: Heights, shape (m,).
        noise: Standard Gaussians, shape (m, 3).
        dt: Time step.
        group: Selects the metric.
        euclidean: Use σ = I instead, the flat control.
    """
    noise = np.asarray(noise, dtype=float)
    scale = math.sqrt(dt)
    if euclidean:
        return scale * noise
    z = np.asarray(z, dtype=float)
    return scale * np.column_stack([np.exp(z) * noise[:, 0] + group.shear(z) * noise[:, 1],
                                    np.exp(-z) * noise[:, 1],
                                    noise[:, 2]])


def bm_step(p: Point, dt: float, noise, group: SolGroup) -> Point:
    """One driftless Euler-Maruyama step from p. Zero noise leaves p unchanged."""
    increment = bm_increments(np.array([p.z]), np.reshape(noise, (1, 3)), dt, group)[0]
    return Point.from_iterable(p.as_array() + increment)


@dataclass(frozen=True)
class PathConfig:
    """Parameters of a path ensemble.

    Attributes:
        start: Starting point of every path.
        T: Horizon; the number of steps is T/dt rounded to the nearest integer.
        dt: Time step.
        seed: Master seed.
        group: Selects the metric.
        euclidean: Run flat Brownian motion instead, as a control.
        record_interval: Spacing of recorded snapshots; None records the start and the end only.
        block_size: Paths simulated together.
    """
    start: Point = ORIGIN
    T: float = 1.0
    dt: float = DEFAULTS.dt_transience
    seed: int = DEFAULTS.seed
    group: SolGroup = field(default_factory=SolGroup)
    euclidean: bool = False
    record_interval: Optional[float] = None
    block_size: int = DEFAULTS.block_size

    def __post_init__(self) -> None:
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ValueError(f'time step must be positive, got dt = {self.dt}')
        if not (math.isfinite(self.T) and self.T >= self.dt):
            raise ValueError(f'horizon must satisfy T >= dt, got T = {self.T}, dt = {self.dt}')
        if self.seed < 0:
            raise ValueError(f'seed must be nonnegative, got {self.seed}')
        if self.record_interval is not None and not self.record_interval > 0:
            raise ValueError(f'record interval must be positive, got {self.record_interval}')
        if self.block_size < 1:
            raise ValueError(f'block size must be positive, got {self.block_size}')

    @property
    def steps(self) -> int:
        return max(1, int(round(self.T / self.dt)))

    def record_steps(self) -> list:
        """Step indices of the recorded snapshots, always including 0 and the last step."""
        steps = self.steps
        every = steps if self.record_interval is None else max(1, int(round(self.record_interval / self.dt)))
        recorded = list(range(0, steps + 1, every))
        if recorded[-1] != steps:
            recorded.append(steps)
        return recorded


@dataclass
class PathEnsemble:
    """Recorded snapshots and running statistics of n paths.

    Attributes:
        config: The configuration the paths were sampled with.
        times: Snapshot times, shape (m,).
        positions: Snapshots, shape (n, m, 3).
        max_norm: Largest coordinate norm each path reached, shape (n,).
        last_inside: Last step time each path was inside the unit ball, 0 if never after the start.
    """
    config: PathConfig
    times: np.ndarray
    positions: np.ndarray
    max_norm: np.ndarray
    last_inside: np.ndarray

    @property
    def n(self) -> int:
        return self.positions.shape[0]

    def rows(self):
        """(path_id, t, x, y, z) for every recorded snapshot, path by path."""
        for path_id, path in enumerate(self.positions):
            for t, (x, y, z) in zip(self.times, path):
                yield path_id, float(t), float(x), float(y), float(z)


def _standard_error(samples: np.ndarray) -> float:
    if samples.size < 2:
        return 0.0
    return float(np.std(samples, ddof=1) / math.sqrt(samples.size))


def _run_blocks(simulate, n: int, block_size: int) -> list:
    blocks = [range(start, min(start + block_size, n)) for start in range(0, n, block_size)]
    workers = min(max_workers(), len(blocks))
    if workers <= 1:
        return [simulate(block) for block in blocks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(simulate, blocks))


def _noise_chunks(generators: list, steps: int):
    """Per-step noise of shape (paths, 3), drawn from each path's own stream in chunks."""
    done = 0
    while done < steps:
        count = min(NOISE_CHUNK, steps - done)
        chunk = np.stack([g.standard_normal((count, 3)) for g in generators], axis=1)
        yield from chunk
        done += count


def _simulate_block(cfg: PathConfig, indices: range):
    recorded = set(cfg.record_steps())
    position = np.tile(cfg.start.as_array(), (len(indices), 1))
    max_norm = np.linalg.norm(position, axis=1)
    last_inside = np.zeros(len(indices))
    snapshots = [position.copy()]
    generators = [path_generator(cfg.seed, index) for index in indices]
    for step, noise in enumerate(_noise_chunks(generators, cfg.steps), start=1):
        position = position + bm_increments(position[:, Z], noise, cfg.dt, cfg.group, cfg.euclidean)
        norm = np.sqrt(np.einsum('ij,ij->i', position, position))
        np.maximum(max_norm, norm, out=max_norm)
        last_inside[norm < 1.0] = step * cfg.dt
        if step in recorded:
            snapshots.append(position.copy())
    logger.debug('simulated paths %d..%d', indices.start, indices.stop - 1)
    return np.stack(snapshots, axis=1), max_norm, last_inside


def sample_paths(cfg: PathConfig, n: int) -> PathEnsemble:
    """Simulate n independent paths.

    Raises:
        ValueError: n < 1.
    """
    if n < 1:
        raise ValueError(f'need at least one path, got n = {n}')
    logger.info('sampling %d paths: T=%g, dt=%g, seed=%d, a=%g%s', n, cfg.T, cfg.dt, cfg.seed, cfg.group.a,
                ', euclidean control' if cfg.euclidean else '')
    blocks = _run_blocks(lambda indices: _simulate_block(cfg, indices), n, cfg.block_size)
    positions, max_norm, last_inside = (np.concatenate(parts) for parts in zip(*blocks))
    times = np.array(cfg.record_steps(), dtype=float) * cfg.dt
    return PathEnsemble(cfg, times, positions, max_norm, last_inside)


@dataclass(frozen=True)
class TransienceReport:
    """Escape and return statistics of an ensemble; every standard error is the sample std over √n.

    Attributes:
        paths: Number of paths.
        radius: R of the escape ball.
        time: Horizon the statistics refer to.
        escape_fraction: Fraction whose coordinate norm reached R.
        escape_se: Its standard error.
        inside_fraction: Fraction inside the unit ball at the horizon.
        inside_se: Its standard error.
        mean_last_exit: Mean last time inside the unit ball.
        last_exit_se: Its standard error.
    """
    paths: int
    radius: float
    time: float
    escape_fraction: float
    escape_se: float
    inside_fraction: float
    inside_se: float
    mean_last_exit: float
    last_exit_se: float

    def to_dict(self) -> dict:
        return asdict(self)


def inside_fraction_at(ensemble: PathEnsemble, t: float):
    """Fraction of paths inside the coordinate unit ball at the snapshot nearest to t.

    Returns:
        (snapshot time, fraction, standard error).
    """
    index = int(np.argmin(np.abs(ensemble.times - t)))
    inside = (np.linalg.norm(ensemble.positions[:, index, :], axis=1) < 1.0).astype(float)
    return float(ensemble.times[index]), float(inside.mean()), _standard_error(inside)


def transience_stats(ensemble: PathEnsemble, radius: float = 10.0) -> TransienceReport:
    """Escape fraction from the coordinate ball of radius R and return statistics for the unit ball.

    Raises:
        ValueError: Empty ensemble or nonpositive radius.
    """
    if ensemble.n < 1:
        raise ValueError('transience statistics need a nonempty ensemble')
    if not radius > 0:
        raise ValueError(f'escape radius must be positive, got {radius}')
    escaped = (ensemble.max_norm >= radius).astype(float)
    time, inside, inside_se = inside_fraction_at(ensemble, ensemble.times[-1])
    return TransienceReport(paths=ensemble.n,
                            radius=radius,
                            time=time,
                            escape_fraction=float(escaped.mean()),
                            escape_se=_standard_error(escaped),
                            inside_fraction=inside,
                            inside_se=inside_se,
                            mean_last_exit=float(ensemble.last_inside.mean()),
                            last_exit_se=_standard_error(ensemble.last_inside))


def flat_inside_probability(t: float, radius: float = 1.0) -> float:
    """P(|W_t| < radius) for standard Brownian motion in R³ started at the origin; |W_t|/√t is χ₃."""
    return float(chi(3).cdf(radius / math.sqrt(t)))


@dataclass(frozen=True)
class MartingaleReport:
    """Comparison of E f(X_τ) with f(X₀) for paths stopped on leaving a coordinate ball.

    Attributes:
        paths: Number of paths.
        rho: Stopping radius.
        dt: Time step.
        start_value: f(X₀).
        mean_stopped: Mean of f(X_τ).
        difference: mean_stopped - start_value.
        standard_error: Standard error of the difference.
        bias_allowance: Allowance for the O(dt) discretization bias.
        z_score: |difference| over the standard error.
        exited_fraction: Fraction of paths that left the ball before the horizon.
        passed: |difference| ≤ 3·standard_error + bias_allowance.
    """
    paths: int
    rho: float
    dt: float
    start_value: float
    mean_stopped: float
    difference: float
    standard_error: float
    bias_allowance: float
    z_score: float
    exited_fraction: float
    passed: bool

    def to_dict(self) -> dict:
        return asdict(self)


def _stopped_block(f, cfg: PathConfig, rho: float, indices: range):
    start = cfg.start.as_array()
    position = np.tile(start, (len(indices), 1))
    active = np.ones(len(indices), dtype=bool)
    generators = [path_generator(cfg.seed, index) for index in indices]
    for noise in _noise_chunks(generators, cfg.steps):
        active &= np.linalg.norm(position - start, axis=1) < rho
        if not active.any():
            break
        step = bm_increments(position[active, Z], noise[active], cfg.dt, cfg.group, cfg.euclidean)
        position[active] += step
    else:
        active &= np.linalg.norm(position - start, axis=1) < rho
    values = np.asarray(f(position[:, 0], position[:, 1], position[:, 2]), dtype=float)
    return values, ~active


def martingale_check(f, cfg: PathConfig, n: int, rho: float, bias_factor: float = 10.0) -> MartingaleReport:
    """Run n paths until they leave the coordinate ball of radius rho about the start, or until T.

    Args:
        f: Vectorized function of (x, y, z); a :class:`HarmonicFunction` is checked against its domain first.
        cfg: Path configuration; ``cfg.start`` is the centre of the ball.
        n: Number of paths.
        rho: Stopping radius, ρ ≥ 0. At ρ = 0 every path stops at once.
        bias_factor: The bias allowance is ``bias_factor·dt``.

    Raises:
        ValueError: n < 1 or ρ < 0.
        OutOfDomainError: The ball leaves the domain of the harmonic function.
    """
    if n < 1:
        raise ValueError(f'need at least one path, got n = {n}')
    if not rho >= 0:
        raise ValueError(f'stopping radius must be nonnegative, got {rho}')
    if isinstance(f, HarmonicFunction):
        f.check_ball(cfg.start, rho)
    start_value = float(f(cfg.start.x, cfg.start.y, cfg.start.z))
    blocks = _run_blocks(lambda indices: _stopped_block(f, cfg, rho, indices), n, cfg.block_size)
    values, exited = (np.concatenate(parts) for parts in zip(*blocks))
    differences = values - start_value
    difference = float(differences.mean())
    standard_error = _standard_error(differences)
    allowance = bias_factor * cfg.dt
    z_score = abs(difference) / standard_error if standard_error > 0 else (0.0 if difference == 0 else math.inf)
    report = MartingaleReport(paths=n,
                              rho=rho,
                              dt=cfg.dt,
                              start_value=start_value,
                              mean_stopped=float(values.mean()),
                              difference=difference,
                              standard_error=standard_error,
                              bias_allowance=allowance,
                              z_score=z_score,
                              exited_fraction=float(exited.mean()),
                              passed=bool(abs(difference) <= 3 * standard_error + allowance))
    logger.info('martingale check over %d paths at rho=%g: difference %.3g, z=%.2f', n, rho, difference, z_score)
    return report
