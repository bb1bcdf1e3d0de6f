"""Matching distance and coherent matching distance for bifiltered simplicial complexes."""

from .complex import Bifiltration, SimplicialComplex, build_complex, face_closure, validate_sphere_assumption
from .persistence import Cornerpoint, PersistenceDiagram, multiplicity_oracle, oracle_diagram, pbn_oracle, reduce
from .foliation import Region, default_region, detect_singular_pairs, slice_diagram, slice_function
from .matching import DIAG, Matching, bottleneck, bottleneck_distance, enumerate_matchings
from .transport import ParameterPath, TransportConfig, loop_permutation, transport_matching, transport_point, vineyard
from .coherent import CoherentConfig, DistanceEstimate, estimate_cdmatch, estimate_dmatch, gamma_infinity

__version__ = "0.1.0"

__all__ = [
    "Bifiltration", "SimplicialComplex", "build_complex", "face_closure", "validate_sphere_assumption",
    "Cornerpoint", "PersistenceDiagram", "multiplicity_oracle", "oracle_diagram", "pbn_oracle", "reduce",
    "Region", "default_region", "detect_singular_pairs", "slice_diagram", "slice_function",
    "DIAG", "Matching", "bottleneck", "bottleneck_distance", "enumerate_matchings",
    "ParameterPath", "TransportConfig", "loop_permutation", "transport_matching", "transport_point", "vineyard",
    "CoherentConfig", "DistanceEstimate", "estimate_cdmatch", "estimate_dmatch", "gamma_infinity",
]
