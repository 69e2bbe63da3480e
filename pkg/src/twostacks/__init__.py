"""Enumeration and asymptotics of permutations sortable by two stacks in series.

The package has three layers:

    machine / automata   the sorting machine, brute-force oracles, and the
                         forbidden-factor pruning automata
    enumerator           exact counting: pruned DFS, shards, parallel runs,
                         binomial transforms
    approximant/analysis series extension with differential approximants and
                         ratio-method estimation of the growth rate mu and
                         exponent g

See the `demos/` scripts for a walkthrough, or use the `twostacks` CLI.
"""

from importlib import resources

from .analysis import (AsymptoticModel, RatioRow, RatioSequence, ReferenceSeries,
                       amplitude_estimate, asymptotic_summary, combined_ratios,
                       extrapolate_linear, gradient_estimator, lambda_estimator,
                       linear_intercepts, normalised_coefficients, quotient_ratios,
                       ratios, series_with_ratio_tail)
from .approximant import (DAConfig, DifferentialApproximant, default_configs,
                          fit_da, predict_coefficients, predict_ensemble,
                          predict_ratios_ensemble)
from .automata import (Dfa, EffectSignature, build_avoiding_dfa, build_gamma,
                       contains_forbidden_factor, effect_signature,
                       find_forbidden_words, intersect, is_catalan_word,
                       pruning_automaton)
from .enumerator import (ShardSpec, achievable_set, binomial_transform,
                         count_achievable, count_increment_avoiding,
                         count_with_start_sequence, enumerate_parallel,
                         enumerate_series, explored_prefix_count,
                         inverse_binomial_transform)
from .errors import (DegenerateWindow, EnsembleTooSmall, FixtureUnknown, GammaPole,
                     IllegalMove, IndexMismatch, InvalidAlphabet, RecurrenceBreakdown,
                     ResourceLimit, SeriesFormatError, SingularFit, TwoStacksError)
from .machine import (LAMBDA, MU, RHO, Letter, MachineState, achievable_brute,
                      apply_letter, is_operation_sequence, parse_word, run_sequence,
                      sortable_brute, word_str)
from .series import (EstimateRow, EstimateTable, Series, read_estimates, read_series,
                     sci, write_estimates, write_series)

__version__ = "0.1.0"


def reference_counts() -> Series:
    """The exact counts of sortable permutations shipped with the package
    (indices 0..19)."""
    path = resources.files("twostacks").joinpath("data/two_stacks_series.txt")
    with resources.as_file(path) as p:
        return read_series(p, name="two-stacks-in-series")
