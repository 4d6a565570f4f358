"""Brownian-motion molecular timing channel: samplers, likelihoods and MI estimators."""

from ._core import (
    ApproxModel,
    ChannelParams,
    ContractViolation,
    DiscreteConfig,
    MIEstimate,
    NumericError,
    ObservedArrivals,
    Rng,
    SizeError,
    apply_labeling,
    arrival_prob_interval,
    build_approx_model,
    cdf,
    credit_arrivals,
    example2_csv,
    example3_csv,
    indistinguishable_density,
    invert_sort,
    labeled_density,
    likelihood_window,
    marginal_likelihood,
    mi_lower_bound_discrete,
    mi_pair,
    mi_single_particle,
    observe,
    pair_density,
    pdf,
    permanent,
    sample,
    sequence_likelihood,
    simulate,
    simulate_discrete,
)

__all__ = [name for name in dir() if not name.startswith("_")]
