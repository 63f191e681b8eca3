"""Angle distortion of spherical triangles under side-length transforms.

Modules
-------
spherical_trig
    Triangle solvers, chart coordinates and a 3D embedding oracle.
distortion
    Side-distortion families and the angle-distortion functional ``D``.
projection
    Central projection onto the circumcircle plane and its angle bounds.
surface
    Triangle complexes, cone angles, Gauss-Bonnet and the cone density.
certify
    Deterministic grid-and-refine scans of ``D`` and the ``k`` search.
cli
    The ``sphere-distort`` command.
"""

from .distortion import (
    DistortionFamily,
    angle_distortion,
    chd_family,
    f_inf,
    f_k,
    f_k_star,
    g_1,
    g_1_star,
    g_inf,
    g_k,
    transform,
)
from .errors import (
    BudgetExhausted,
    DegenerateTriangleError,
    DomainError,
    FixtureSyntaxError,
    GluingError,
    InvariantError,
)
from .spherical_trig import (
    B0,
    R0,
    EuclideanTriangle,
    SphericalTriangle,
    TriangleParams,
    chd,
    chd_inv,
)

__version__ = "0.1.0"

__all__ = [
    "B0", "R0", "chd", "chd_inv",
    "SphericalTriangle", "EuclideanTriangle", "TriangleParams",
    "DistortionFamily", "angle_distortion", "transform",
    "chd_family", "f_inf", "f_k", "f_k_star", "g_1", "g_1_star", "g_inf", "g_k",
    "DomainError", "DegenerateTriangleError", "InvariantError", "GluingError",
    "FixtureSyntaxError", "BudgetExhausted",
]
