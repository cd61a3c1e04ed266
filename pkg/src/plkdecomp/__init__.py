"""Decomposition analysis of power-law kinetic reaction networks."""

from .decomposition import Decomposition, make_decomposition, profile
from .equilibria import apply_main_theorem, certify_block_plp, corollary_check, find_equilibrium_numeric, parametrize_equilibria
from .independence import coordinate_graph, finest_independent, independent_wr_cf
from .io import load_fixture, parse_crn, render_crn
from .kinetic_complexes import induced_decomposition, kinetic_network
from .kinetics import classify_nodes, classify_system
from .network import Network, build_network, from_edges, summarize
from .search import SearchLimits, verify_wr_cf, wr_cf_search, wr_cf_single

__version__ = "0.1.0"
