"""Discrete exterior calculus with 2x2 complex matrix coefficients on a
periodic two-dimensional grid, discrete Yang-Mills residual operators, the
explicit 2x2 matrix formulation, and a residual-minimizing solver."""

from .algebra import (
    E1,
    E2,
    E3,
    IDENTITY2,
    SU2_MEMBERSHIP_TOL,
    ZERO2,
    Su2Coords,
    coords_from_su2,
    mat2c,
    su2_deviation,
    su2_from_coords,
    trace_pairing,
)
from .cochain import (
    DiscreteForm,
    TorusGrid,
    ZeroForm,
    deserialize,
    make_form,
    pairing,
    serialize,
    shift_form,
    total_over_cells,
)
from .errors import (
    ConfigError,
    DegreeMismatch,
    DegreeOverflow,
    GridMismatch,
    NotInSu2,
    ParseError,
    YmtError,
)
from .exterior_calc import (
    boundary_pairing,
    cup,
    d,
    delta,
    delta_via_star,
    inner,
    laplacian,
    norm_sq,
    star,
    star_inv,
)
from .yang_mills import (
    Connection,
    Curvature,
    curvature,
    curvature_via_operators,
    d_A,
    delta_A,
    laplacian_A,
    residual_delta,
    residual_dstar,
    residual_via_operators,
)

__version__ = "0.1.0"
