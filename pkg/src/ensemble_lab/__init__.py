"""Exact finite probability spaces, ensemble operators and Martin-Löf test checks."""

from .errors import EnsembleLabError
from .prob import (
    BINARY,
    Alphabet,
    FiniteProbabilitySpace,
    RandomVariable,
    conditional_space,
    event_prob,
    events_independent,
    induced_space,
    make_space,
    product_space,
    rvs_independent,
    space_from_pairs,
    string_prob,
    uniform_space,
)
from .streams import FinitePrefix, SymbolStream, pseudo_ensemble, pseudo_ensemble_prefix

__version__ = "0.1.0"

__all__ = [
    "BINARY",
    "Alphabet",
    "EnsembleLabError",
    "FinitePrefix",
    "FiniteProbabilitySpace",
    "RandomVariable",
    "SymbolStream",
    "conditional_space",
    "event_prob",
    "events_independent",
    "induced_space",
    "make_space",
    "product_space",
    "pseudo_ensemble",
    "pseudo_ensemble_prefix",
    "rvs_independent",
    "space_from_pairs",
    "string_prob",
    "uniform_space",
]
