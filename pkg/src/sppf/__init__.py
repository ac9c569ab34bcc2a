"""Architecture-aware synthesis of Pauli exponentials into V, S, CNOT and Rz circuits."""

from .circuit import Circuit, Gate, ParseError, cnot_count, cnot_depth
from .mapper import ConnectivityTree, QubitMapping, build_mapping
from .pauli import (
    PauliExponential,
    PauliGadget,
    commute_through_gadget,
    mutually_commuting,
    parse_exponential,
)
from .synth import Stats, gadget_distance, prune_tree, synthesize, synthesize_full
from .tableau import CliffordTableau
from .topology import CouplingGraph, TopologyError, builtin, load_topology

__all__ = [
    "Circuit",
    "CliffordTableau",
    "ConnectivityTree",
    "CouplingGraph",
    "Gate",
    "ParseError",
    "PauliExponential",
    "PauliGadget",
    "QubitMapping",
    "Stats",
    "TopologyError",
    "build_mapping",
    "builtin",
    "cnot_count",
    "cnot_depth",
    "commute_through_gadget",
    "gadget_distance",
    "load_topology",
    "mutually_commuting",
    "parse_exponential",
    "prune_tree",
    "synthesize",
    "synthesize_full",
]
