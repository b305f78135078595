"""Navigable small-world graphs grown by destination sampling."""

__version__ = "0.1.0"

from .lattice import Kind, Topology, base_neighbors, distance  # noqa: E402
from .graph import (  # noqa: E402
    DistanceDistribution,
    ShortcutGraph,
    empty_graph,
    sample_from_distribution,
    sample_kleinberg,
)
from .routing import WalkRecord, greedy_step, greedy_walk  # noqa: E402
from .rewire import RewireParams, destination_sample_step, evolve  # noqa: E402
from .analytic import (  # noqa: E402
    HittingVector,
    balance_map,
    harmonic_distribution,
    hitting_from_links,
    solve_balanced,
    tau,
)

__all__ = [
    "Kind",
    "Topology",
    "base_neighbors",
    "distance",
    "DistanceDistribution",
    "ShortcutGraph",
    "empty_graph",
    "sample_from_distribution",
    "sample_kleinberg",
    "WalkRecord",
    "greedy_step",
    "greedy_walk",
    "RewireParams",
    "destination_sample_step",
    "evolve",
    "HittingVector",
    "balance_map",
    "harmonic_distribution",
    "hitting_from_links",
    "solve_balanced",
    "tau",
]
