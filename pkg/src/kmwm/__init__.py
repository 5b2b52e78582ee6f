"""Approximate maximum-likelihood decoding by enumerating the K lightest matchings."""

from .codes import CodeSpec, hexagonal_shape, rotated_surface_code
from .gkp import (SurfaceGkpCode, coset_probability, decode_surface_gkp_correlated,
                  decode_surface_gkp_separable, standard_form_generator)
from .graph import DecodingGraph, build_model_graph, build_six_qubit_fixture
from .harness import CodeChoice, NoiseModel, compute_metrics, run_trials, write_results
from .matching import MatchingSolution, mwc, mwm, shortest_path
from .qubit_decoder import ClassTally, decode_graphlike, pauli_to_gkp_params
from .tree import MatchingEnumerator, enumerate_mwms

__all__ = [
    "ClassTally", "CodeChoice", "CodeSpec", "DecodingGraph", "MatchingEnumerator",
    "MatchingSolution", "NoiseModel", "SurfaceGkpCode", "build_model_graph",
    "build_six_qubit_fixture", "compute_metrics", "coset_probability", "decode_graphlike",
    "decode_surface_gkp_correlated", "decode_surface_gkp_separable", "enumerate_mwms",
    "hexagonal_shape", "mwc", "mwm", "pauli_to_gkp_params", "rotated_surface_code",
    "run_trials", "shortest_path", "standard_form_generator", "write_results",
]
