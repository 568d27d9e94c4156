"""Finite automata lifted to permutation unitaries, information classes,
and the Bell/CHSH and GHZ toy models built on them."""

__version__ = "0.1.0"

from .automaton import (
    CycleDecomposition,
    StateSpace,
    Trajectory,
    UpdateRule,
    cycle_decomposition,
    evolve,
    evolve_all,
    is_invertible,
    load_rule,
    parse_rule,
    step,
    trajectory,
)
from .errors import (
    ConsistencyError,
    InputError,
    InvertibilityError,
    NormalizationError,
    OntomatonError,
    QuadratureError,
    RuleFileError,
    SizeError,
)
from .hilbert import (
    HamiltonianSpectrum,
    PermutationUnitary,
    QuantumState,
    born_probabilities,
    check_ontology_conservation,
    evolve_state,
    extract_hamiltonian,
    lift_to_unitary,
    truncate_spectrum,
)
from .infoclass import (
    InfoClassPartition,
    class_unitary,
    compute_info_classes,
    entropy_profile,
    quotient_dynamics,
)
