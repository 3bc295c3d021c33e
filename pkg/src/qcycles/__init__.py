"""Unidirectional quorum-based protection cycle planning."""

from .direction import (DirectionAssignment, PairCoverage, assign_forward, assign_random,
                        expand_paired, greedy_directions, greedy_update_cycle_direction,
                        initial_cycle_direction, missing_pairs, ordered_pairs)
from .faultsim import (FaultReport, compensated_pairs, fault_coverage, pairs_under_fault,
                       sweep_single_faults)
from .quorum import (QuorumBase, QuorumSet, difference_multiplicity, find_min_redundant_base,
                     pair_count, rotate_quorum, sizing_estimate, total_pair_count,
                     verify_redundancy)
from .routing import BACKWARD, FORWARD, CycleRoute, Direction, links_used, route_all, route_cycle
from .topology import (NodeMapping, Topology, apply_mapping, generate_mappings, has_bridge,
                       load_topology, serialize_topology, shipped_topology)

__version__ = "0.1.0"
