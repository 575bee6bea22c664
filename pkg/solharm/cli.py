"""Command-line front end: ``solharm verify | eigenfunction | bm | grid``.

Exit codes: 0 when every check passes, 1 when a check fails, 2 for an invalid configuration.
Reports go to ``--out`` or stdout; log lines go to stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from contextlib import contextmanager
from dataclasses import dataclass, fields
from typing import Optional

import numpy as np

from solharm import __version__
from solharm.config import DEFAULTS, configure_logging, max_workers
from solharm.harmonic import HarmonicFunction
from solharm.hyperbolic import RadialEigenfunction
from solharm.liegroup import ORIGIN, SolGroup
from solharm.stochastic import (
    PathConfig,
    flat_inside_probability,
    inside_fraction_at,
    martingale_check,
    sample_paths,
    transience_stats,
)
from solharm.verify import CheckResult, GridSpec, channel_agreement, identity_suite, legendre_quadrature, residual_grid
from solharm.verify.suite import GROUP_PARAMS

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
FORMATS = {'verify': ('json', 'text', 'csv'),
           'eigenfunction': ('csv', 'json'),
           'bm': ('json', 'text'),
           'grid': ('csv', 'json')}
ORACLE_TOLERANCE = 1e-8


@dataclass(frozen=True)
class CliConfig:
    """Validated command-line configuration.

    Raises:
        ValueError: A value violates its bound; the message names the flag.
    """
    command: str
    a: float = 0.0
    h: float = DEFAULTS.fd_step
    grid: str = DEFAULTS.grid
    seed: int = DEFAULTS.seed
    rmax: float = 10.0
    points: int = 1001
    paths: int = 2000
    T: float = 50.0
    dt: float = DEFAULTS.dt_transience
    radius: float = 10.0
    euclidean: bool = False
    martingale: bool = False
    rho: float = 1.0
    martingale_paths: int = 5000
    martingale_dt: float = DEFAULTS.dt_martingale
    martingale_T: float = 10.0
    dump_paths: Optional[str] = None
    out: Optional[str] = None
    format: Optional[str] = None
    verbose: int = 0

    def __post_init__(self) -> None:
        if self.command not in FORMATS:
            raise ValueError(f'unknown command {self.command!r}')
        if not (math.isfinite(self.a) and self.a >= 0):
            raise ValueError(f'--a must be >= 0, got {self.a}')
        if not self.h > 0:
            raise ValueError(f'--h must be > 0, got {self.h}')
        GridSpec.parse(self.grid)
        if self.seed < 0:
            raise ValueError(f'--seed must be >= 0, got {self.seed}')
        if not (math.isfinite(self.rmax) and self.rmax > 0):
            raise ValueError(f'--rmax must be > 0, got {self.rmax}')
        if self.points < 2:
            raise ValueError(f'--points must be >= 2, got {self.points}')
        if self.paths < 1 or self.martingale_paths < 1:
            raise ValueError(f'path counts must be >= 1, got --paths {self.paths}, '
                             f'--martingale-paths {self.martingale_paths}')
        for name, dt, horizon in (('', self.dt, self.T), ('martingale-', self.martingale_dt, self.martingale_T)):
            if not dt > 0:
                raise ValueError(f'--{name}dt must be > 0, got {dt}')
            if not horizon >= dt:
                raise ValueError(f'--{name}T must be >= --{name}dt, got {horizon}')
        if not self.radius > 0:
            raise ValueError(f'--radius must be > 0, got {self.radius}')
        if not self.rho >= 0:
            raise ValueError(f'--rho must be >= 0, got {self.rho}')
        if self.format is not None and self.format not in FORMATS[self.command]:
            raise ValueError(f'--format for {self.command} must be one of {", ".join(FORMATS[self.command])}, '
                             f'got {self.format!r}')

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> CliConfig:
        names = {f.name for f in fields(cls)}
        return cls(**{key: value for key, value in vars(args).items() if key in names and value is not None})

    @property
    def output_format(self) -> str:
        return self.format or FORMATS[self.command][0]


@contextmanager
def _output(path: Optional[str]):
    if path is None:
        yield sys.stdout
    else:
        with open(path, 'w', newline='') as stream:
            yield stream


def _write_json(payload: dict, path: Optional[str]) -> None:
    with _output(path) as stream:
        json.dump({'schema_version': SCHEMA_VERSION, **payload}, stream, indent=2, sort_keys=True)
        stream.write('\n')


def _write_csv(header: list, rows, path: Optional[str]) -> None:
    with _output(path) as stream:
        writer = csv.writer(stream, lineterminator='\n')
        writer.writerow(header)
        writer.writerows(rows)


def _write_text(text: str, path: Optional[str]) -> None:
    with _output(path) as stream:
        stream.write(text + '\n')


def cmd_verify(cfg: CliConfig) -> int:
    """Identity suite plus the Laplacian residual grid at the configured a."""
    group = SolGroup(cfg.a)
    eigenfunction = RadialEigenfunction.solve()
    suite = identity_suite(seed=cfg.seed, group_params=GROUP_PARAMS + (cfg.a,), eigenfunction=eigenfunction,
                           grid=cfg.grid)
    hf = HarmonicFunction(eigenfunction)
    spec = GridSpec.parse(cfg.grid)
    analytic, fd = residual_grid(hf, spec, group, cfg.h, seed=cfg.seed)
    checks = [CheckResult.at_most(f'residual.analytic[a={cfg.a:g}]', analytic.max_rel, DEFAULTS.analytic_tolerance),
              CheckResult.at_most(f'residual.finite_difference[a={cfg.a:g}]', fd.max_rel, DEFAULTS.fd_tolerance),
              CheckResult.at_most(f'residual.channel_agreement[a={cfg.a:g}]',
                                  channel_agreement(hf, spec, group, cfg.h), DEFAULTS.fd_tolerance)]
    if cfg.a != 0:
        baseline, _ = residual_grid(hf, spec, SolGroup(0.0), cfg.h, seed=cfg.seed)
        checks.append(CheckResult.at_most(f'residual.analytic_matches_a0[a={cfg.a:g}]',
                                          abs(analytic.max_abs - baseline.max_abs), 0.0))
    suite.checks.extend(checks)

    if cfg.output_format == 'json':
        _write_json({'command': 'verify', 'a': cfg.a, 'seed': cfg.seed, 'passed': suite.passed,
                     'suite': suite.to_dict(), 'residuals': [analytic.to_dict(), fd.to_dict()]}, cfg.out)
    elif cfg.output_format == 'csv':
        _write_csv(['name', 'measured', 'comparison', 'bound', 'passed'],
                   ([c.name, c.measured, c.comparison, c.bound, c.passed] for c in suite.checks), cfg.out)
    else:
        lines = [suite.to_text()]
        for report in (analytic, fd):
            lines.append(f'{report.channel}: max_abs={report.max_abs:.3e} max_rel={report.max_rel:.3e} '
                         f'mean_abs={report.mean_abs:.3e} worst={report.worst_point} points={report.grid_size}')
        _write_text('\n'.join(lines), cfg.out)
    return 0 if suite.passed else 1


def cmd_eigenfunction(cfg: CliConfig) -> int:
    """The (r, v, v') table on [0, rmax] with the quadrature oracle and its deviation."""
    eigenfunction = RadialEigenfunction.solve(r_max=max(DEFAULTS.r_max, cfg.rmax))
    table = eigenfunction.table(cfg.rmax, cfg.points)
    oracle = np.array([legendre_quadrature(r) for r in table[:, 0]])
    deviation = np.abs(table[:, 1] - oracle)
    worst = float(deviation.max())
    print(f'max oracle deviation: {worst:.3e}', file=sys.stderr)
    if worst > ORACLE_TOLERANCE:
        logger.warning('oracle deviation %.3e exceeds %.0e', worst, ORACLE_TOLERANCE)
    rows = np.column_stack([table, oracle, deviation])
    header = ['r', 'v', 'dv', 'oracle', 'deviation']
    if cfg.output_format == 'json':
        _write_json({'command': 'eigenfunction', 'max_deviation': worst,
                     'rows': [dict(zip(header, map(float, row))) for row in rows]}, cfg.out)
    else:
        _write_csv(header, ([float(value) for value in row] for row in rows), cfg.out)
    return 0


def cmd_bm(cfg: CliConfig) -> int:
    """Transience statistics of an ensemble and, with ``--martingale``, the stopped martingale check."""
    group = SolGroup(cfg.a)
    path_cfg = PathConfig(ORIGIN, cfg.T, cfg.dt, cfg.seed, group, cfg.euclidean, record_interval=cfg.T / 10)
    ensemble = sample_paths(path_cfg, cfg.paths)
    transience = transience_stats(ensemble, cfg.radius)
    inside = []
    for fraction_of_T in (0.2, 0.5, 1.0):
        time, fraction, error = inside_fraction_at(ensemble, fraction_of_T * cfg.T)
        row = {'time': time, 'fraction': fraction, 'se': error}
        if cfg.euclidean:
            row['flat_probability'] = flat_inside_probability(time)
        inside.append(row)
    payload = {'command': 'bm', 'a': cfg.a, 'seed': cfg.seed, 'paths': cfg.paths, 'T': cfg.T, 'dt': cfg.dt,
               'euclidean': cfg.euclidean, 'transience': transience.to_dict(), 'inside_fractions': inside}

    passed = True
    if cfg.martingale:
        martingale_cfg = PathConfig(ORIGIN, cfg.martingale_T, cfg.martingale_dt, cfg.seed, group)
        report = martingale_check(HarmonicFunction(), martingale_cfg, cfg.martingale_paths, cfg.rho)
        payload['martingale'] = report.to_dict()
        passed = report.passed

    if cfg.dump_paths is not None:
        _write_csv(['path_id', 't', 'x', 'y', 'z'], ensemble.rows(), cfg.dump_paths)
    if cfg.output_format == 'json':
        _write_json(payload, cfg.out)
    else:
        lines = [f'{cfg.paths} paths, T={cfg.T:g}, dt={cfg.dt:g}, a={cfg.a:g}, seed={cfg.seed}',
                 f'escape fraction from R={transience.radius:g}: {transience.escape_fraction:.4f} '
                 f'± {transience.escape_se:.4f}',
                 f'mean last exit from the unit ball: {transience.mean_last_exit:.4f} ± {transience.last_exit_se:.4f}']
        lines += [f'inside the unit ball at t={row["time"]:g}: {row["fraction"]:.4f} ± {row["se"]:.4f}'
                  for row in inside]
        if cfg.martingale:
            m = payload['martingale']
            lines.append(f'martingale at rho={m["rho"]:g}: difference {m["difference"]:.3e} '
                         f'± {m["standard_error"]:.3e} ({"pass" if m["passed"] else "FAIL"})')
        _write_text('\n'.join(lines), cfg.out)
    return 0 if passed else 1


def cmd_grid(cfg: CliConfig) -> int:
    """Values of ũ on a grid, one row per point."""
    spec = GridSpec.parse(cfg.grid)
    x, y, z = spec.points()
    u = HarmonicFunction()(x, y, z)
    rows = ([float(a), float(b), float(c), float(d)] for a, b, c, d in zip(x, y, z, u))
    if cfg.output_format == 'json':
        _write_json({'command': 'grid', 'grid': spec.describe(),
                     'rows': [dict(zip('xyzu', row)) for row in rows]}, cfg.out)
    else:
        _write_csv(['x', 'y', 'z', 'u'], rows, cfg.out)
    return 0


COMMANDS = {'verify': cmd_verify, 'eigenfunction': cmd_eigenfunction, 'bm': cmd_bm, 'grid': cmd_grid}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='solharm', description=__doc__.splitlines()[0])
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--out', help='write the report here instead of stdout')
    common.add_argument('--format', help='output format')
    common.add_argument('--seed', type=int, help=f'master seed (default {DEFAULTS.seed})')
    common.add_argument('-v', '--verbose', action='count', default=0, help='-v for INFO, -vv for DEBUG')
    subparsers = parser.add_subparsers(dest='command', required=True)

    verify = subparsers.add_parser('verify', parents=[common], help='identity suite and Laplacian residuals')
    verify.add_argument('--a', type=float, help='shear parameter a >= 0 (default 0)')
    verify.add_argument('--h', type=float, help=f'finite-difference step (default {DEFAULTS.fd_step})')
    verify.add_argument('--grid', help=f'x0:x1:nx,y0:y1:ny,z0:z1:nz (default {DEFAULTS.grid})')

    eigenfunction = subparsers.add_parser('eigenfunction', parents=[common], help='radial eigenfunction table')
    eigenfunction.add_argument('--rmax', type=float, help='largest radius (default 10)')
    eigenfunction.add_argument('--points', type=int, help='rows (default 1001)')

    bm = subparsers.add_parser('bm', parents=[common], help='Brownian motion statistics')
    bm.add_argument('--a', type=float, help='shear parameter a >= 0 (default 0)')
    bm.add_argument('--paths', type=int, help='number of paths (default 2000)')
    bm.add_argument('--T', type=float, help='horizon (default 50)')
    bm.add_argument('--dt', type=float, help=f'time step (default {DEFAULTS.dt_transience})')
    bm.add_argument('--radius', type=float, help='escape radius R (default 10)')
    bm.add_argument('--euclidean', action='store_true', default=None, help='flat Brownian motion control')
    bm.add_argument('--martingale', action='store_true', default=None, help='also run the martingale check')
    bm.add_argument('--rho', type=float, help='martingale stopping radius (default 1)')
    bm.add_argument('--martingale-paths', type=int, help='martingale paths (default 5000)')
    bm.add_argument('--martingale-dt', type=float, help=f'martingale time step (default {DEFAULTS.dt_martingale})')
    bm.add_argument('--martingale-T', type=float, help='martingale horizon (default 10)')
    bm.add_argument('--dump-paths', help='write path_id,t,x,y,z snapshots to this CSV file')

    grid = subparsers.add_parser('grid', parents=[common], help='export ũ on a grid')
    grid.add_argument('--grid', help=f'x0:x1:nx,y0:y1:ny,z0:z1:nz (default {DEFAULTS.grid})')
    return parser


def _attach_grid(argv: list) -> list:
    """Rewrite ``--grid VALUE`` as ``--grid=VALUE``; argparse would read a value such as ``-2:2:21,...`` as a flag."""
    joined, tokens = [], iter(argv)
    for token in tokens:
        if token == '--grid':
            value = next(tokens, None)
            joined.append(token if value is None else f'--grid={value}')
        else:
            joined.append(token)
    return joined


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_attach_grid(argv))
    configure_logging(args.verbose)
    try:
        cfg = CliConfig.from_args(args)
        max_workers()
    except ValueError as error:
        print(f'solharm: error: {error}', file=sys.stderr)
        return 2
    try:
        return COMMANDS[cfg.command](cfg)
    except ValueError as error:
        print(f'solharm {cfg.command}: error: {error}', file=sys.stderr)
        return 2
