from solharm.hyperbolic.base_fields import H2Field, H2Jet, SampledField, drift_L, fd_jet
from solharm.hyperbolic.eigenfunction import BOTTOM_OF_SPECTRUM, RadialEigenfunction
from solharm.hyperbolic.fields import (
    BusemannFunction,
    HorocycleWeight,
    ProductField,
    RadialField,
)
from solharm.hyperbolic.halfplane import (
    BASE_POINT,
    HPoint,
    NotDifferentiableError,
    OutOfDomainError,
    busemann_s,
    distance_from,
    h2_distance,
    horocycle_flow,
    j_flow_acceleration,
    to_halfplane,
)
