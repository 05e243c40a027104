"""Exact computations with lifts of the natural representation of SL_n over
finite local rings: ring arithmetic, transvection calculus, finite matrix
groups, deformation counts and normalisation of lifts to induced form."""

__version__ = "0.1.0"

from .errors import AlgebraError
from .localring import (
    Ideal,
    RingElt,
    RingHom,
    RingSpec,
    find_homs,
    hensel_lift,
    make_ring,
    parse_ring,
    quotient_by_m_power,
    teichmueller,
)
from .matrix import (
    Mat,
    TransvectionWord,
    decompose_transvections,
    minus_identity_power_test,
    t,
    verify_relations,
)
from .groups import FiniteGroup, Presentation, builtin_group, enumerate_group, parse_presentation
from .defo import (
    GeneratorLift,
    Lift,
    adjoint_invariants,
    classify_strict,
    diamond_check,
    enumerate_lifts,
    extract_hom,
    h1_dimension,
    rigidify,
    twist_decompose,
    verify_exceptional_lift,
)
from .normalize import induced_lift, normalize_lift
