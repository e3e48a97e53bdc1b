"""
planarcalc — planar non-commutative functional calculus.

Truncated series in non-commuting letters, the moment ↔ free cumulant
transform, the effective action (Legendre transform of the cumulants) and its
tree expansion:

    from planarcalc import effective_action, make_series

    k = make_series([((1, 1), 1), ((1, 1, 1), 2)], 1, 5, variable="y")
    action = effective_action(k)
    print(action.series)

Exact rational arithmetic by default; float64 for sampled data.
"""

from .cumulants import cumulants_from_moments, moments_from_cumulants, semicircle_moments
from .effective_action import EffectiveAction, effective_action
from .exceptions import DocumentError, PlanarCalcError, PreconditionError
from .products import bullet, bullet_inverse, prec, prelie, succ
from .reports import IdentityReport
from .sampling import SampleSpec, sample_moments
from .series import Alphabet, Field, Series, compose, invert_field, make_series
from .trees import AdmissibleTree, enumerate_admissible, feynman_evaluate, tree_expansion

__version__ = "0.1.0"
__all__ = [
    "Alphabet",
    "Series",
    "Field",
    "make_series",
    "compose",
    "invert_field",
    "bullet",
    "bullet_inverse",
    "prec",
    "succ",
    "prelie",
    "cumulants_from_moments",
    "moments_from_cumulants",
    "semicircle_moments",
    "EffectiveAction",
    "effective_action",
    "AdmissibleTree",
    "enumerate_admissible",
    "feynman_evaluate",
    "tree_expansion",
    "SampleSpec",
    "sample_moments",
    "IdentityReport",
    "PlanarCalcError",
    "DocumentError",
    "PreconditionError",
]
