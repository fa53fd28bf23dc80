import itertools
import json
import math
from collections import Counter

import numpy as np
import pytest

from noisystorage.bounds import RobustParams, StorageModel
from noisystorage.codes import hamming_7_4, qid_code, repetition_code
from noisystorage.protocols import (
    StoreAllBob,
    WorstCaseReportingBob,
    block_correct,
    block_syndromes,
    estimate_leakage,
    honest_index_sets,
    qid_kappa,
    run_qid,
    run_robust_rot,
    run_rot,
)


def robust_params(n=512, delta=0.02, ph_noclick=0.0, pd_noclick=0.0,
                  ph_err=0.0, p1_sent=1.0, ell=8, r=0.2):
    return RobustParams(n=n, delta=delta, storage=StorageModel(r=r),
                        p1_sent=p1_sent, ph_noclick=ph_noclick,
                        pd_noclick=pd_noclick, ph_err=ph_err, ell=ell)


# --- plain oblivious transfer ---------------------------------------------------


def test_rot_forced_all_match():
    n = 12
    t = run_rot(n, ell=4, c=0, rng=5, force_theta_hat=None)
    forced = t.theta.copy()
    t = run_rot(n, ell=4, c=0, rng=5, force_theta_hat=forced)
    assert t.i0.tolist() == list(range(n))
    assert t.i1.size == 0
    assert np.array_equal(t.y, t.s0)
    assert not t.i_c_empty


def test_rot_honest_output_matches_chosen_string():
    failures = 0
    empties = 0
    for seed in range(2000):
        c = seed % 2
        t = run_rot(16, ell=4, c=c, rng=seed)
        target = t.s0 if c == 0 else t.s1
        if not np.array_equal(t.y, target):
            failures += 1
        empties += t.i_c_empty
    assert failures == 0
    assert empties <= 2  # expectation 2000 * 2^-16 = 0.03


def test_rot_outputs_are_hashes_of_disjoint_substrings():
    t = run_rot(10, ell=3, c=1, rng=11)
    assert set(t.i0.tolist()).isdisjoint(t.i1.tolist())
    assert sorted(t.i0.tolist() + t.i1.tolist()) == list(range(10))
    from noisystorage.hashing import hash_apply
    assert np.array_equal(t.s0, hash_apply(t.f0, t.x[t.i0]))
    assert np.array_equal(t.s1, hash_apply(t.f1, t.x[t.i1]))


def test_rot_transcript_json_deterministic():
    a = run_rot(8, ell=2, c=0, rng=42).to_json()
    b = run_rot(8, ell=2, c=0, rng=42).to_json()
    assert a == b
    data = json.loads(a)
    assert set(data) >= {"x", "theta", "theta_hat", "x_hat", "i0", "i1",
                         "f0", "f1", "s0", "s1", "y", "c"}


def test_rot_index_message_distribution_independent_of_choice():
    # exhaustive over the receiver's bases: the (set_0, set_1) message has
    # exactly the same multiset of values for either choice bit
    for n in (3, 6, 8):
        theta = np.zeros(n, dtype=np.uint8)  # irrelevant fixed value
        messages = {0: Counter(), 1: Counter()}
        for hat in itertools.product((0, 1), repeat=n):
            hat = np.array(hat, dtype=np.uint8)
            for c in (0, 1):
                i0, i1 = honest_index_sets(theta, hat, c)
                messages[c][(tuple(i0), tuple(i1))] += 1
        assert messages[0] == messages[1]


def test_rot_same_seed_different_choice_swaps_sets_only():
    t0 = run_rot(16, ell=4, c=0, rng=77)
    t1 = run_rot(16, ell=4, c=1, rng=77)
    assert np.array_equal(t0.x, t1.x)
    assert np.array_equal(t0.theta, t1.theta)
    assert np.array_equal(t0.theta_hat, t1.theta_hat)
    assert np.array_equal(t0.i0, t1.i1)
    assert np.array_equal(t0.i1, t1.i0)


def test_rot_adversary_runs_and_partitions():
    t = run_rot(12, ell=3, c=0, bob=StoreAllBob(0.5), rng=13)
    assert t.y is None and t.theta_hat is None
    assert sorted(t.i0.tolist() + t.i1.tolist()) == list(range(12))
    assert t.adversary["guesses"].shape == (12,)


def test_rot_validates_lengths():
    with pytest.raises(ValueError):
        run_rot(4, ell=5, c=0, rng=1)


# --- robust oblivious transfer ----------------------------------------------


def test_robust_noiseless_reduces_to_plain_behavior():
    code = repetition_code(3)
    for seed in range(100):
        t = run_robust_rot(robust_params(n=512), code, c=seed % 2, rng=seed)
        assert not t.abort
        assert t.s_remain.size == 512
        target = t.s0 if t.c == 0 else t.s1
        assert np.array_equal(t.y, target)
        assert t.decode_ok


def test_robust_honest_abort_rate_within_target():
    code = repetition_code(3)
    eps = 0.05
    aborts = 0
    trials = 400
    for seed in range(trials):
        t = run_robust_rot(robust_params(n=512, ph_noclick=0.3), code, c=0,
                           rng=seed, eps_target=eps)
        aborts += t.abort
    # abort probability is at most eps by the concentration bound
    assert aborts / trials <= eps + 3 * math.sqrt(eps * (1 - eps) / trials)


def test_robust_zeta_default():
    t = run_robust_rot(robust_params(n=512, ph_noclick=0.3),
                       repetition_code(3), c=0, rng=0, eps_target=0.01)
    assert t.zeta == pytest.approx(math.sqrt(math.log(2 / 0.01) / (2 * 512)))


def test_robust_decoding_beats_binomial_tail_oracle():
    # smoke version of the acceptance run: 200 trials at 1% bit errors
    code = repetition_code(3)
    p = 0.01
    p_block = 3 * p ** 2 * (1 - p) + p ** 3
    worst_blocks = math.ceil(512 / 3)
    oracle = 1.0 - (1.0 - p_block) ** worst_blocks
    failures = 0
    trials = 200
    for seed in range(trials):
        t = run_robust_rot(robust_params(n=512, ph_err=p), code, c=1, rng=seed)
        assert not t.abort
        failures += not t.decode_ok
    assert failures / trials <= oracle + 3 * math.sqrt(oracle / trials)


def test_robust_decode_failure_shows_in_output():
    # with bit-error rates beyond the code's power, decoding mostly fails
    # and the receiver's hash output drifts off the sender's string
    code = repetition_code(3)
    bad = 0
    mismatched = 0
    for seed in range(50):
        t = run_robust_rot(robust_params(n=513, ph_err=0.25), code, c=0,
                           rng=seed)
        if not t.decode_ok:
            bad += 1
            mismatched += not np.array_equal(t.y, t.s0)
    assert bad > 25
    assert mismatched > bad // 2  # residual agreement is only hash collision


def test_robust_worst_case_reporting_passes_check():
    # dropping exactly (ph - pd) n single-photon rounds keeps the count
    # inside the accepted window (up to fluctuations), more trips it
    params = robust_params(n=4096, delta=0.002, ph_noclick=0.3,
                           pd_noclick=0.05, p1_sent=0.9)
    ok = 0
    for seed in range(40):
        t = run_robust_rot(params, repetition_code(3), c=0,
                           bob=WorstCaseReportingBob(), rng=seed,
                           eps_target=0.001)
        ok += not t.abort
    assert ok >= 35


def test_robust_over_reporting_aborts_deterministically():
    params = robust_params(n=4096, delta=0.002, ph_noclick=0.3,
                           pd_noclick=0.05, p1_sent=0.9)
    for seed in range(20):
        t = run_robust_rot(params, repetition_code(3), c=0,
                           bob=WorstCaseReportingBob(extra_fraction=0.4),
                           rng=seed, eps_target=0.001)
        assert t.abort


def test_robust_click_messages_independent_of_choice():
    params = robust_params(n=256, ph_noclick=0.2)
    t0 = run_robust_rot(params, repetition_code(3), c=0, rng=31)
    t1 = run_robust_rot(params, repetition_code(3), c=1, rng=31)
    assert np.array_equal(t0.click_mask, t1.click_mask)
    assert np.array_equal(t0.s_remain, t1.s_remain)
    assert np.array_equal(t0.i0, t1.i1)


def test_block_syndrome_roundtrip():
    code = hamming_7_4()
    rng = np.random.default_rng(151)
    word = rng.integers(0, 2, 20, dtype=np.uint8)
    syn = block_syndromes(code, word)
    assert syn.size == 3 * math.ceil(20 / 7)
    noisy = word.copy()
    noisy[3] ^= 1
    noisy[9] ^= 1  # one error per block at most
    assert np.array_equal(block_correct(code, noisy, syn), word)


# --- password identification ---------------------------------------------------


def test_qid_equal_passwords_always_accept():
    qc = qid_code(16, 8)
    for seed in range(300):
        w = seed % 16 + 1
        t = run_qid(w, w, qc, ell=8, rng=seed)
        assert t.accept


def test_qid_differing_passwords_rarely_accept():
    qc = qid_code(16, 8)
    rng = np.random.default_rng(157)
    trials = 3000
    accepts = 0
    for seed in range(trials):
        w_a, w_b = rng.choice(16, size=2, replace=False) + 1
        t = run_qid(int(w_a), int(w_b), qc, ell=8, rng=seed)
        accepts += t.accept
    p = 2.0 ** -8
    assert accepts / trials <= p + 3 * math.sqrt(p * (1 - p) / trials)


def test_qid_kappa_uniform_and_independent_of_password():
    # exhaustive: over all receiver bases, kappa hits every value exactly
    # once, for every password
    qc = qid_code(4, 6)
    n = qc.code.n
    for w in range(1, 5):
        seen = Counter()
        for hat in itertools.product((0, 1), repeat=n):
            kappa = qid_kappa(qc, w, np.array(hat, dtype=np.uint8))
            seen[tuple(kappa.tolist())] += 1
        assert len(seen) == 2 ** n
        assert set(seen.values()) == {1}


def test_qid_accept_condition_matches_definition():
    qc = qid_code(16, 8)
    t = run_qid(3, 3, qc, ell=4, rng=9)
    from noisystorage.hashing import hash_apply
    check = hash_apply(t.f, t.x_hat[t.i_w_bob]) ^ hash_apply(
        t.g, qc.password_bits(t.w_bob))
    assert t.accept == bool(np.array_equal(t.z, check))
    assert np.array_equal(t.kappa, qid_kappa(qc, t.w_bob, t.theta_hat))


def test_qid_transcript_json():
    qc = qid_code(16, 8)
    a = run_qid(2, 5, qc, ell=8, rng=123).to_json()
    b = run_qid(2, 5, qc, ell=8, rng=123).to_json()
    assert a == b
    data = json.loads(a)
    assert data["w_alice"] == 2 and data["w_bob"] == 5
    assert set(data) >= {"x", "theta", "theta_hat", "x_hat", "kappa", "z",
                         "accept"}


def test_qid_rejects_bad_passwords():
    qc = qid_code(16, 8)
    with pytest.raises(ValueError):
        run_qid(0, 3, qc, ell=4, rng=1)
    with pytest.raises(ValueError):
        run_qid(3, 17, qc, ell=4, rng=1)


# --- leakage estimation -----------------------------------------------------


def test_leakage_perfect_storage_learns_everything():
    report = estimate_leakage(n=8, ell=1, r=1.0, trials=60, rng=163)
    assert report["per_bit_guess_rate"] == 1.0
    assert report["helstrom_rate"] == 1.0
    # no guarantee regime: bounds saturate rather than lie
    assert report["pa_bound"] == 1.0
    assert report["empirical_nonuniformity"] <= 1.0


def test_leakage_useless_storage_learns_nothing():
    report = estimate_leakage(n=12, ell=2, r=0.0, trials=400, rng=167)
    sigma = math.sqrt(0.25 / report["bit_samples"])
    assert abs(report["per_bit_guess_rate"] - 0.5) < 4 * sigma
    assert report["empirical_nonuniformity"] <= report["pa_bound"]


def test_leakage_intermediate_rate_matches_discrimination_value():
    report = estimate_leakage(n=16, ell=1, r=0.3, trials=500, rng=173)
    sigma = math.sqrt(0.25 / report["bit_samples"])
    assert abs(report["per_bit_guess_rate"] - 0.65) < 4 * sigma
    assert report["alpha"] == pytest.approx(16 * math.log2(2 / 1.3))
    assert report["empirical_nonuniformity"] <= report["pa_bound"]
    assert report["empirical_nonuniformity"] <= report["statement_bound"]


def test_leakage_size_cap():
    with pytest.raises(ValueError):
        estimate_leakage(n=30, ell=2, r=0.5, trials=10, rng=1)
