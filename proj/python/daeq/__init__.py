"""Threshold-encrypted federated averaging with ternary gradients."""

import json

from ._daeq import (
    DaeqError,
    GroupParams,
    KeySet,
    __version__,
    aggregate,
    decode,
    decrypt_aggregate,
    encode,
    encrypt,
    generate_params,
    keygen,
    lagrange_coefficient,
    parse_params,
    partial_decrypt,
    selftest,
    ternarize,
    toy_params,
)
from ._daeq import run_experiment as _run_experiment


def run_experiment(config=None, overrides=()):
    """Run an experiment from a config dict or JSON string.

    Returns (rounds, summary) where rounds is a list of per-round metric dicts.
    """
    if isinstance(config, dict):
        config = json.dumps(config)
    rounds, summary, _ = _run_experiment(config or "", list(overrides))
    return rounds, json.loads(summary)


def threshold_decrypt(keys, ciphertext, subset, mode="auto"):
    """Decrypt an aggregate with the key shares of `subset`; returns T * plaintext."""
    subset = sorted(subset)
    partials = {i: partial_decrypt(keys, ciphertext, i, subset) for i in subset}
    return decrypt_aggregate(keys.params, ciphertext, partials, keys.threshold, mode)


__all__ = [
    "DaeqError",
    "GroupParams",
    "KeySet",
    "__version__",
    "aggregate",
    "decode",
    "decrypt_aggregate",
    "encode",
    "encrypt",
    "generate_params",
    "keygen",
    "lagrange_coefficient",
    "parse_params",
    "partial_decrypt",
    "run_experiment",
    "selftest",
    "ternarize",
    "threshold_decrypt",
    "toy_params",
]
