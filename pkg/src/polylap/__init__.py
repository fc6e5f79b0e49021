"""Dirichlet poly-Laplace operators on lattice subgraphs: spectra and eigenvalue bounds."""

from .bounds import (
    compare_orders,
    lower_bound_mean,
    unit_ball_volume,
    upper_bound_mean,
    upper_bound_next,
    verify_bounds,
)
from .eigen import EigensolverError, Spectrum, eigen_sym, partial_sums, rayleigh_ritz_check
from .lattice import (
    AmbientGraph,
    IntegerLattice,
    LatticeDomain,
    boundary_layers,
    count_paths,
    cycle_graph,
    edge_counts,
    graph_distance,
    make_ball,
    make_box,
    parse_domain,
)
from .operator import assemble, boundary_measure, coeff_axy, quadratic_form

__version__ = "0.1.0"
