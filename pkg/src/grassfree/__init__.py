"""Exact slopes, tangent lattices and freeness for rational points on Grassmannians."""

from .lattice import CanonicalForm, Lattice, LatticeError
from .slopes import (
    MinimaProfile,
    SlopeTable,
    min_covol_sublattice,
    mu,
    mu_max,
    mu_min,
    short_vectors,
    slope_table,
    successive_minima,
)
from .grassmann import (
    FreenessReport,
    GrassmannPoint,
    TangentData,
    enumerate_points,
    freeness,
    lemma_m1_check,
    normalized_tangent_stats,
    phi_tilde,
    point_from_basis,
    tangent,
    unfree_family,
    unfree_through_flag,
)

__version__ = "0.1.0"
