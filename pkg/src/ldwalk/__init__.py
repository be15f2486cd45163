"""Large deviations of empirical measures for inhomogeneous walks on compactified Z."""

__version__ = "0.1.0"

from .state_space import (  # noqa: F401
    MINUS_INF,
    PLUS_INF,
    TransitionProfile,
    comparison_slack,
    dist,
    epsilon_star,
    p_star,
    r_zbar,
    step_prob,
    tail_gap,
    varphi,
)
from .measures import (  # noqa: F401
    MeasureZbar,
    SignedMeasureZbar,
    compose,
    decompose,
    empirical_measure,
    in_ball,
    kr_distance,
    kr_norm,
    occupation_counts,
    r_mu0,
    restricted_empirical,
)
from .rates import (  # noqa: F401
    RateValue,
    cgf,
    composite_rate,
    composite_rate_closed,
    composite_rate_variational,
    contraction_rate,
    cramer,
    cramer_at_zero,
    cramer_inf,
    dv_rate_kernel_form,
    dv_rate_variational,
    segment_profile,
)
from .trajectories import (  # noqa: F401
    CutSequence,
    alpha_bar,
    build_typical,
    connector_chi,
    connector_xi,
    cut_sequence,
    encode_cuts,
    is_excursion_word,
    is_meander_word,
    path_log_prob,
    path_prob,
    reconstruct,
    region,
    region_subwords,
    sample_typical_components,
    stitch,
    typical_times,
    up_down_counts,
    validate_word,
)
