"""Polyhedral-cone tools for (path-complete) positivity of switched linear systems."""

__version__ = "0.1.0"

from .automaton import Automaton, admissible, arbitrary_switching, random_walk, simple_cycles, validate
from .cone import (
    Inclusion,
    PolyhedralCone,
    contains,
    contains_interior,
    from_facets,
    from_generators,
    hull_union,
    image,
    includes,
    meets_hyperplane,
)
from .hilbert import (
    contraction_ratio,
    distance,
    oscillation,
    projective_diameter,
    ratio_bounds,
    rho_for_gamma,
)
from .linalg import InvariantSplitting, dominant_eigenpair, matrix_product
from .search import (
    SearchConfig,
    SearchOutcome,
    SearchStatus,
    basic_test,
    find_contracting_cone,
    inflate_point,
    orient,
    scale_to_hyperplane,
    seed_cone,
)
from .sim import TrajectoryPair, cycle_attractor_check, simulate_pair
from .verify import (
    CyclePF,
    PositivityCertificate,
    SwitchedSystem,
    Verdict,
    check_path_positive,
    check_positive,
    cycle_pf,
)
