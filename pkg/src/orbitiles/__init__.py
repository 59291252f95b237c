"""Orbit-space classification, reflection tilings, geodesic censuses and Betti bounds
for cohomogeneity-two actions with nonnegatively curved orbit spaces."""

__version__ = "0.1.0"

from .classification import (
    BoundaryAngle,
    ConeAngle,
    CurvatureClass,
    OrbitSpaceCase,
    TilingDescriptor,
    admissible_boundary_angles,
    angle_sum_test,
    average_angle_argument,
    enumerate_flat_cases,
    enumerate_positive_cases,
    get_case,
)
from .errors import (
    DomainError,
    NoTilingError,
    NonClosingError,
    NonGenericError,
    NotSphericalError,
    OrbitilesError,
    UndefinedFitError,
)
from .geodesics import IndexParams, MarkedConfiguration, genericity_check, plane_geodesics, run_census, sphere_geodesics
from .morse_bounds import BettiBoundReport, check_linear_bound, check_quadratic_bound, fit_growth_degree, index_histogram
from .pipeline import run_pipeline
from .planar_tiling import build_rings, fundamental_rhombus, point_orbit_in_rings
from .spherical_tiling import double, generate_tiling, reflect, total_area, triangle_from_angles
