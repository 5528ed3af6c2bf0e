"""Fast box probabilities for discrete random variables by domain truncation.

Each dimension's summation range is cut where Chernoff-type tail bounds show
the discarded mass is small, and the total discarded mass is kept below a
user-chosen ``eta``. The result is a bracket ``P' <= P <= P' + eta``.
"""
from .distributions import (
    BinomialCount,
    BoxQuery,
    CountInterval,
    Dimension,
    PoissonSum,
    full_sum_oracle,
    interval_mass,
    log_pmf,
    make_query,
    mean_avg_scale,
    per_term_cgf,
)
from .engine import ProbBracket, box_probability, verify_against_oracle, work_estimate
from .errors import ConsistencyError, DomainError, ResourceError, UnsupportedMethodError
from .tail_bounds import (
    Side,
    generic_C,
    hoeffding_C,
    massart_M,
    massart_tail,
    poisson_C,
)
from .truncation import (
    Method,
    TailBudget,
    TruncationResult,
    allocate_budget,
    binomial_truncation_closed_form,
    find_truncation_point,
    massart_quantile,
    truncate_box,
)

__version__ = "0.1.0"
