"""Curvature of almost Hermitian 4-manifolds: Levi-Civita and canonical Hermitian
connections, block decompositions, holomorphic sectional curvature, Chern-Weil
integrals and exact algebraic oracles."""

from .errors import (
    ArityError,
    AxiomViolationError,
    ConstraintViolationError,
    CurvlabError,
    DegenerateMetricError,
    ExpressionSyntaxError,
    FieldDomainError,
    ModelFormatError,
    PreconditionError,
    UnknownIdentifierError,
)
from .expr import parse_field
from .geometry import PointStructure, build_point_structure
from .models import ManifoldModel, builtin_model, load_user_model
from .connections import curvature_data, hermitian_curvature, riemann_curvature
from .decomposition import decompose_riemann, hermitian_block_entries, ricci_forms
from .hsc import constancy_test, hsc
from .chern_weil import constant_hsc_identities, cw_density, index_report, integrate_closed

__version__ = "0.1.0"
