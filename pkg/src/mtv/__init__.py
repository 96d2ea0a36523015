"""Multiple T-values, Hoffman t-values and (alternating) multiple zeta values.

Indices use the increasing-m convention: ``T(k1, ..., kr)`` sums over
``m1 < ... < mr`` with ``mr`` carrying ``kr``, so an index is admissible when
its last entry is at least 2.
"""
from .indices import (
    LinearCombo,
    NotAdmissibleError,
    SignedIndex,
    dual,
    enumerate_admissible,
    format_index,
    make_signed,
    parse_index,
    shuffle,
    shuffle_indices,
    stuffle,
)
from .series_eval import BigReal, chen_evaluate, gamma, hyp2f1_at_minus1
from .values import T_value, altZ_value, genfun_lhs, genfun_rhs, t_value, zeta_value
from .lindep import (
    dims_union_intersection,
    find_integer_relation,
    lll_reduce,
    relation_lattice_rank,
)

__version__ = "0.1.0"
