import itertools
import random

import pytest

import daeq


def test_toy_group_threshold_decryption():
    params = daeq.toy_params()
    keys = daeq.keygen(params, n=4, threshold=3, seed="py-toy")
    assert keys.qual == [1, 2, 3, 4]
    assert pow(params.g, sum(keys.shares[i] * daeq.lagrange_coefficient(params, i, [1, 2, 3]) for i in [1, 2, 3]) % params.q, params.p) == keys.h
    cts = [daeq.encrypt(params, m, keys.h, seed=f"m{i}") for i, m in enumerate([1, 0, 2])]
    agg = daeq.aggregate(params, cts)
    for subset in itertools.combinations([1, 2, 3, 4], 3):
        assert daeq.threshold_decrypt(keys, agg, subset) == 3 * 3


def test_keygen_with_adversaries():
    params = daeq.toy_params()
    keys = daeq.keygen(params, n=5, threshold=3, seed="py-adv", adversaries=[(2, "bad_share"), (4, "fake_A0")])
    assert 2 not in keys.qual
    assert keys.reconstructed == [4]


def test_larger_group_round_trip():
    params = daeq.generate_params(64, 256, "py-smoke")
    params.validate()
    assert daeq.parse_params(params.serialize()).p == params.p
    keys = daeq.keygen(params, n=5, threshold=3)
    rng = random.Random(7)
    msgs = [rng.randrange(500) for _ in range(5)]
    agg = daeq.aggregate(params, [daeq.encrypt(params, m, keys.h, seed=str(i)) for i, m in enumerate(msgs)])
    assert daeq.threshold_decrypt(keys, agg, [1, 3, 5], mode="bruteforce") == 3 * sum(msgs)


def test_codec_and_ternarize():
    params = daeq.generate_params(64, 256, "py-smoke")
    for x in [0.5, -0.25, 3.14159]:
        assert abs(daeq.decode(params, daeq.encode(params, x, 10), 10) - x) <= 2 ** -11
    assert daeq.encode(params, -0.25, 10) == params.q - 256
    s, dirs = daeq.ternarize([0.3, -0.1, 0.0], seed="t")
    assert s == pytest.approx(0.3)
    assert dirs[0] in (0, 1) and dirs[1] in (-1, 0) and dirs[2] == 0


def test_run_experiment_is_deterministic():
    overrides = ["rounds=3", "clients.N=4"]
    rounds_a, summary_a = daeq.run_experiment(overrides=overrides)
    rounds_b, summary_b = daeq.run_experiment(overrides=overrides)
    assert len(rounds_a) == 3
    assert rounds_a == rounds_b
    assert rounds_a[0]["enc_ciphertexts"] == 8
    assert summary_a == summary_b


def test_errors_and_selftest():
    with pytest.raises(daeq.DaeqError):
        daeq.run_experiment({"encoding": {"bits": 16}})
    assert all(passed for _, passed, _ in daeq.selftest())
