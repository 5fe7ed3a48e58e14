"""Exact and asymptotic mixing distances for colored top-m-to-random shuffles.

The package computes, for the shuffle on p-colored permutations of n cards
that resamples the cards labeled 1..m:

* exact k-step distances to uniform (total variation, separation,
  L-infinity, chi-squared in exact rational arithmetic; relative entropy
  and L^q as floats), via the occupancy-mixture reduction;
* the limit profiles of those distances in the cutoff window
  k = floor((n/m)(log n + c));
* a brute-force enumeration oracle and Monte Carlo simulators that certify
  every formula at desk scale.
"""

from .distances import (
    DistanceReport,
    LikelihoodProfile,
    MixtureSpec,
    chi2_exact,
    distance_report,
    kl_exact,
    likelihood_profile,
    linfty_exact,
    lq_exact,
    ratio_functional,
    sep_exact,
    stat_level_mass,
    tv_exact,
)
from .group import (
    BudgetExceededError,
    ColoredPermutation,
    GroupParams,
    enumerate_group,
    has_ordered_tail,
    identity,
    increment_support_size,
    inverse,
    multiply,
    ordered_tail,
    sample_increment,
    tail_event_size,
)
from .occupancy import (
    OccupancyWeights,
    SamplingParams,
    ball_occupancy_law,
    empty_factorial_moment,
    gen_stirling2,
    poisson_pmf,
    sample_occupancy,
    stirling2,
    subset_occupancy_law,
)
from .profiles import (
    DoublyExpReport,
    ProfilePoint,
    SeriesControl,
    SeriesTruncationError,
    chi2_profile,
    crossing_index,
    crossing_index_closed_form,
    doubly_exp_check,
    kl_profile,
    linfty_profile,
    lq_profile,
    sep_mixing_time,
    sep_profile,
    tv_profile,
    tv_profile_series,
    window_time,
)

__version__ = "0.1.0"
