"""Distributed vertex-cut detection in a simulated CONGEST network.

Modules: ``graph`` (graphs, generators, edge lists), ``oracle`` (exact
sequential connectivity), ``sim`` (synchronous round engine), ``primitives``
(BFS tree, election, aggregation, phase runtime), ``distributed`` (the cut
algorithms) and ``bench``/``cli`` (corpus runs and the command line).
"""

from .distributed import find_cut_baseline_gather, find_vertex_cut, kappa_one_cut, run_with_verification
from .graph import GenSpec, Graph, generate, parse_edge_list, emit_edge_list, stats
from .oracle import has_cut_at_most, verify_cut, vertex_connectivity
from .sim import SimConfig, run_sync
from .verdict import CutResult

__all__ = [
    "CutResult", "GenSpec", "Graph", "SimConfig", "emit_edge_list", "find_cut_baseline_gather", "find_vertex_cut",
    "generate", "has_cut_at_most", "kappa_one_cut", "parse_edge_list", "run_sync", "run_with_verification", "stats",
    "verify_cut", "vertex_connectivity",
]
