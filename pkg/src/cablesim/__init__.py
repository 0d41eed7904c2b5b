"""Multiplex percolation over submarine cables, countries, routing, and nodes.

The package simulates how removing submarine capacity cascades through
country connectivity, inter-network routing, and a peer-to-peer node
census, with an optional relay-backed overlay layer on top. Monte Carlo
drivers estimate disconnection curves and critical removal fractions;
everything is deterministic for a given master seed.
"""

__version__ = "0.1.0"

from .attacks import RemovalPlan, apply_plan, removal_plan
from .cascade import CascadeConfig, CascadeOutcome, run_cascade
from .fixture import FixtureSpec, generate_fixture, write_bundle
from .graph import PhysicalGraph, build_physical_graph, edge_betweenness
from .model import (AsnGraph, CascadeScope, NodeSnapshot, P2PNode, RelayTable,
                    TorRelay, cascade_scope, make_asn_graph)
from .montecarlo import (CurveConfig, PcEstimate, PercolationCurve,
                         estimate_pc, percolation_curve)
from .tor import TorScenario, apportion_tor_scenario, assign_tor_scenario

__all__ = [
    "AsnGraph", "CascadeConfig", "CascadeOutcome", "CascadeScope",
    "CurveConfig", "FixtureSpec", "NodeSnapshot", "P2PNode", "PcEstimate",
    "PercolationCurve", "PhysicalGraph", "RelayTable", "RemovalPlan",
    "TorRelay", "TorScenario", "__version__", "apply_plan",
    "apportion_tor_scenario", "assign_tor_scenario", "build_physical_graph",
    "cascade_scope", "edge_betweenness", "estimate_pc", "generate_fixture",
    "make_asn_graph", "percolation_curve", "removal_plan", "run_cascade",
    "write_bundle",
]
