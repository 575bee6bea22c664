from solharm.verify.grid import (
    ANALYTIC,
    FINITE_DIFFERENCE,
    GridSpec,
    ResidualReport,
    analytic_laplacian,
    channel_agreement,
    fd_convergence_ratio,
    fd_hessian,
    fd_laplacian_sol,
    fd_residuals,
    residual_grid,
)
from solharm.verify.oracles import (
    exp_az_oracle,
    fd_christoffel,
    geodesic_arc_length,
    legendre_closed_form,
    legendre_quadrature,
)
from solharm.verify.suite import CheckResult, SuiteReport, identity_suite
