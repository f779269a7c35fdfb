"""Sparse random linear network coding as an eavesdropping countermeasure.

The package models a source broadcasting a K-packet generation to a
legitimate receiver over erasure channels while an eavesdropper both listens
and jams the acknowledgment path.  Sparse coding vectors (each coefficient
zero with probability p) trade a little delivery speed for a large drop in
the eavesdropper's chance of ever reaching full rank.

Layers, bottom up:

* `gf` / `coding`: finite-field tables, the biased coefficient law, online
  Gaussian elimination, payload encode/decode.
* `rank`: innovation and full-rank probabilities of sparse matrices, with
  exact classic-RLNC forms at p = 1/q and exhaustive-enumeration oracles.
* `chain`: the labeled absorbing Markov chain giving the intercept
  probability, plus the binomial delivery formula.
* `sim`: Monte Carlo simulation of the whole protocol.
* `optimize`: delivery-constrained sparsity choice and gain curves.
* `cli`: the `srlnc` command.
"""

from .errors import ConfigError, NotDecodableError, NumericalIntegrityError
from .gf import GF, get_field
from .coding import (
    CodeParams,
    DecoderState,
    decode_payloads,
    encode_payload,
    sample_coding_matrix,
    sample_coding_vector,
)
from .rank import (
    RankTables,
    classic_full_rank_prob,
    classic_innovation_prob,
    exact_full_rank_prob,
    exact_innovation_prob,
    full_rank_prob,
    rho,
)
from .chain import (
    ChainMetrics,
    ChainState,
    ChannelParams,
    TransitionMatrix,
    build_chain,
    chain_delivery_probability,
    chain_metrics,
    delivery_probability,
    initial_label,
    intercept_labels,
    intercept_probability,
    label_of,
    n_states,
    state_of,
)
from .sim import SimConfig, SimStats, TrialOutcome, estimate, run_trial
from .optimize import GainPoint, ImConfig, ImSolution, intercept_gain, solve_im

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "NotDecodableError", "NumericalIntegrityError",
    "GF", "get_field",
    "CodeParams", "DecoderState", "decode_payloads", "encode_payload",
    "sample_coding_matrix", "sample_coding_vector",
    "RankTables", "classic_full_rank_prob", "classic_innovation_prob",
    "exact_full_rank_prob", "exact_innovation_prob", "full_rank_prob", "rho",
    "ChainMetrics", "ChainState", "ChannelParams", "TransitionMatrix",
    "build_chain", "chain_delivery_probability", "chain_metrics",
    "delivery_probability", "initial_label", "intercept_labels",
    "intercept_probability", "label_of", "n_states", "state_of",
    "SimConfig", "SimStats", "TrialOutcome", "estimate", "run_trial",
    "GainPoint", "ImConfig", "ImSolution", "intercept_gain", "solve_im",
    "__version__",
]
