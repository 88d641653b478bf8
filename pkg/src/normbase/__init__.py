"""normbase: exact discrepancy kernels and digit expansions with
prescribed normality behavior across bases.

The package splits into small layers: ``numerics`` (exact rational/adic
arithmetic and certified scaled indices), ``discrepancy`` (exact extreme /
star / family / block kernels and checkable perturbation bounds),
``expsums`` (Weyl sums, frequency thresholds, candidate surveys),
``counting`` (good-block counting and restricted alphabets), ``basechange``
(adic refinement geometry), ``construct`` (the three stage machines),
``analyze``/``runio`` (traces and file formats), and ``cli``.
"""

from .numerics import (
    AdicRational,
    DigitBlock,
    Interval,
    adic_value,
    fractional_orbit,
    minimal_representative,
    mult_dependent,
    scaled_index,
)
from .discrepancy import (
    avoidance_bound,
    block_discrepancy,
    chain_bound,
    equipartition,
    extreme_discrepancy,
    family_discrepancy,
    partition_bound,
    perturbation_bound,
    simple_discrepancy,
    star_discrepancy,
    transfer_length_bound,
)
from .expsums import (
    ApproxReal,
    LevequeParams,
    SchmidtConfig,
    candidate_survey,
    cosine_constant,
    exp_sum_A,
    leveque_bound,
    leveque_parameters,
    majority_length_bound,
    schmidt_p,
    weyl_power,
)
from .counting import (
    RestrictedAlphabet,
    base4_defect_survey,
    base4_defect_threshold,
    block_count_threshold,
    expand_block,
    good_block_count,
    restricted_alphabet_params,
    restricted_alphabet_survey,
)
from .basechange import AdicInterval, adic_subinterval, nested_refinement, nested_refinement_offset, padding
from .construct import (
    ConstructedReal,
    PredicateOracle,
    Schedule,
    StageState,
    ell_budget,
    g_log2,
    run_denial,
    run_selective,
    run_slow_base,
)

__version__ = "0.1.0"
