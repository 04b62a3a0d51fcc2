"""Eikonal Hamilton-Jacobi equations on metric networks.

Solve Dirichlet problems through the distance representation formula,
query the Hamiltonian-induced distance, and numerically certify viscosity
sub/supersolution conditions, including the asymmetric junction conditions.
"""

from . import errors
from .dirichlet import (
    Anchor,
    BoundaryData,
    boundary_data,
    check_compatibility,
    maximal_solution,
    solve,
    strictness_data,
)
from .hamiltonian import (
    ConstantProfile,
    EdgeHamiltonian,
    LinearProfile,
    NetworkHamiltonian,
    ProbeGrid,
    SampledProfile,
    VertexProfile,
    certify,
    custom_hamiltonian,
    legendre,
    p_minus,
    p_plus,
    power_eikonal,
    quadratic_eikonal,
    vertex_profile,
)
from .metric import (
    DiscretizedNetwork,
    DistanceField,
    MetricGraph,
    ValueField,
    discretize,
    oracle_s,
    s_distance,
    s_point_query,
)
from .netfile import Problem, dump_problem, load_problem, parse_point, parse_problem
from .network import (
    Edge,
    IncidenceMatrix,
    Network,
    PointOnNetwork,
    Vertex,
    build_network,
    incident_edges,
    path_distance,
)
from .verify import (
    CheckReport,
    SlopeProfile,
    closure_probe,
    comparison_probe,
    maximality_probe,
    slope_profile,
    stability_probe,
    sub_check,
    super_check,
)

__version__ = "0.1.0"

__all__ = [
    "Anchor",
    "BoundaryData",
    "CheckReport",
    "ConstantProfile",
    "DiscretizedNetwork",
    "DistanceField",
    "Edge",
    "EdgeHamiltonian",
    "IncidenceMatrix",
    "LinearProfile",
    "MetricGraph",
    "Network",
    "NetworkHamiltonian",
    "PointOnNetwork",
    "ProbeGrid",
    "Problem",
    "SampledProfile",
    "SlopeProfile",
    "ValueField",
    "Vertex",
    "VertexProfile",
    "boundary_data",
    "build_network",
    "certify",
    "check_compatibility",
    "closure_probe",
    "comparison_probe",
    "custom_hamiltonian",
    "discretize",
    "dump_problem",
    "errors",
    "incident_edges",
    "legendre",
    "load_problem",
    "maximal_solution",
    "maximality_probe",
    "oracle_s",
    "p_minus",
    "p_plus",
    "parse_point",
    "parse_problem",
    "path_distance",
    "power_eikonal",
    "quadratic_eikonal",
    "s_distance",
    "s_point_query",
    "slope_profile",
    "solve",
    "stability_probe",
    "strictness_data",
    "sub_check",
    "super_check",
    "vertex_profile",
]
