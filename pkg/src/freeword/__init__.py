"""Maximal free-energy random words, typicality and test generation for weighted regular languages."""

__version__ = "0.1.0"

from .automata import (
    CLUB,
    DIAMOND,
    HEART,
    RESERVED,
    SPADE,
    WeightedDfa,
    compile_regex,
    compile_text,
    minimize,
    parse_regex,
    structure_flags,
    validate,
)
from .construction import AugmentedDfa, SplitGraph, add_diamond, augment, make_aperiodic, plain, split
from .errors import FreewordError
from .modelfree import DetectionReport, SequenceSet, detect, lz78_entropy, mean_weight
from .oracle import enumerate_words, rate_estimate, weighted_counts
from .sampling import SamplerConfig, sample_prefix_closed_typical, sample_walk, sample_word, sample_words, split_on_separators
from .spectral import GurevichChain, ProbabilisticDfa, build, parry_chain, perron_eigenpair, project_to_dfa
from .typicality import evaluate_suite, is_typical, typical_cluster, walk_rate

__all__ = [name for name in dir() if not name.startswith("_")]
