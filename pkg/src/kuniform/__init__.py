"""Stabilizer-circuit toolkit: k-uniformity verification, circuit
generation and search for encoded k-uniform states, and noisy
preparation-scheme comparison."""

from .pauli import PauliString, BinarySymplecticMatrix
from .circuit import Circuit, Gate, CircuitError, circuit, parse, serialize
from .tableau import StabilizerTableau, apply_gate, simulate
from .uniformity import UniformityReport, independent_count, kappa_ratio, verify
from .codes import CodeSpec, CodeError, build_code, encoded_state, prep_circuit
from .generators import (
    GeneratorError,
    HybridAssembly,
    assemble_hybrid,
    gen_approx_kuniform,
    gen_bell_bridge,
    gen_color_kuniform,
    gen_ghz,
    gen_surface_kuniform,
)
from .noise import (
    FidelityEstimate,
    NoiseError,
    NoiseModel,
    NoiseSimulator,
    compare_schemes,
    reference_target,
    simulator_for,
)
from .search import SearchConfig, SearchError, SearchResult, replay, run_search

__all__ = [
    "PauliString",
    "BinarySymplecticMatrix",
    "Circuit",
    "Gate",
    "CircuitError",
    "circuit",
    "parse",
    "serialize",
    "StabilizerTableau",
    "apply_gate",
    "simulate",
    "UniformityReport",
    "independent_count",
    "kappa_ratio",
    "verify",
    "CodeSpec",
    "CodeError",
    "build_code",
    "encoded_state",
    "prep_circuit",
    "GeneratorError",
    "HybridAssembly",
    "assemble_hybrid",
    "gen_approx_kuniform",
    "gen_bell_bridge",
    "gen_color_kuniform",
    "gen_ghz",
    "gen_surface_kuniform",
    "FidelityEstimate",
    "NoiseError",
    "NoiseModel",
    "NoiseSimulator",
    "compare_schemes",
    "reference_target",
    "simulator_for",
    "SearchConfig",
    "SearchError",
    "SearchResult",
    "replay",
    "run_search",
]
