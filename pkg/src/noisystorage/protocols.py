"""Executable two-party protocol state machines.

Three runners: plain randomized oblivious transfer, its loss/error-robust
variant, and password-based identification, plus a Monte-Carlo estimator
for what an individually storing adversary actually learns.

The enforced waiting time is a phase boundary in the runner, not wall
clock: an adversarial receiver hands the runner the qubits it wants to
keep, the runner pushes every kept qubit through the storage channel,
and only the noised states (plus the adversary's own classical notes and
the later public messages) reach the post-wait callbacks.  Honest
parties never store quantum states across the boundary at all: a
measurement in a matching basis reproduces the encoded bit, a mismatched
one yields a uniform bit, which is how the honest path is sampled.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from . import qsim
from .bounds import ot_epsilon
from .codes import syndrome, syndrome_budget_ok, syndrome_decode
from .hashing import ToeplitzHash, hash_apply, hash_apply_many, random_hash

LEAKAGE_MAX_N = 24


def make_rng(rng):
    """Counter-based generator; integers are seeds, generators pass through."""
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.Generator(np.random.Philox(rng))


def bit_string(arr):
    return "".join("01"[int(b)] for b in arr)


def basis_string(arr):
    return "".join("+x"[int(b)] for b in arr)


def _hash_json(h):
    if h is None:
        return None
    return {"n": h.n, "ell": h.ell, "seed": h.seed_hex(),
            "offset": h.offset_hex()}


def honest_index_sets(theta, theta_hat, c):
    """The two index sets an honest receiver reports, choice-side first.

    Matching positions go to the chosen set, the rest to the other; the
    pair (set_0, set_1) is what crosses the wire.
    """
    theta = np.asarray(theta)
    theta_hat = np.asarray(theta_hat)
    match = np.nonzero(theta == theta_hat)[0]
    differ = np.nonzero(theta != theta_hat)[0]
    if c == 0:
        return match, differ
    return differ, match


# --- adversary interface ------------------------------------------------------


class AdversaryStrategy:
    """Dishonest receiver driven through the runner's phase boundary.

    ``receive``         sees the transmitted qubits, measures what it
                        wants immediately, and returns (classical notes,
                        qubits to store).
    ``storage_r``       retention of the per-qubit depolarizing storage
                        the runner applies to every stored qubit.
    ``after_reveal``    gets only the noised qubits, its own notes and
                        the revealed bases; must return the index-set
                        message (set_0, set_1) plus a record dict.
    ``after_hashes``    sees the hash functions; may record guesses.
    """

    role = "bob"
    storage_r = 0.0

    def receive(self, states, rng):
        raise NotImplementedError

    def after_reveal(self, noisy_states, notes, theta, rng):
        raise NotImplementedError

    def after_hashes(self, f0, f1, record, rng):
        return record


class StoreAllBob(AdversaryStrategy):
    """Individual storage attack: keep every qubit, measure after reveal.

    Once the bases are public, each stored (noised) qubit is measured in
    the revealed basis, which is the optimal two-state discrimination for
    depolarized conjugate-coded states.
    """

    def __init__(self, storage_r):
        self.storage_r = float(storage_r)

    def receive(self, states, rng):
        return None, list(states)

    def after_reveal(self, noisy_states, notes, theta, rng):
        guesses = np.array(
            [qsim.measure(rho, int(t), rng)
             for rho, t in zip(noisy_states, theta)], dtype=np.uint8)
        n = len(noisy_states)
        perm = rng.permutation(n)
        set_0 = np.sort(perm[:n // 2])
        set_1 = np.sort(perm[n // 2:])
        return set_0, set_1, {"guesses": guesses}


# --- plain oblivious transfer ---------------------------------------------------


@dataclass
class RotTranscript:
    n: int
    ell: int
    c: int
    x: np.ndarray
    theta: np.ndarray
    theta_hat: np.ndarray | None
    x_hat: np.ndarray | None
    i0: np.ndarray
    i1: np.ndarray
    f0: ToeplitzHash
    f1: ToeplitzHash
    s0: np.ndarray
    s1: np.ndarray
    y: np.ndarray | None
    i_c_empty: bool = False
    adversary: dict | None = None

    def to_json(self):
        return json.dumps({
            "n": self.n, "ell": self.ell, "c": self.c,
            "x": bit_string(self.x),
            "theta": basis_string(self.theta),
            "theta_hat": None if self.theta_hat is None
            else basis_string(self.theta_hat),
            "x_hat": None if self.x_hat is None else bit_string(self.x_hat),
            "i0": [int(i) for i in self.i0],
            "i1": [int(i) for i in self.i1],
            "f0": _hash_json(self.f0), "f1": _hash_json(self.f1),
            "s0": bit_string(self.s0), "s1": bit_string(self.s1),
            "y": None if self.y is None else bit_string(self.y),
            "i_c_empty": self.i_c_empty,
        })


def run_rot(n, ell, c, bob=None, rng=None, force_theta_hat=None):
    """One run of randomized oblivious transfer over n rounds.

    ``bob=None`` plays the honest receiver with choice bit ``c``;
    otherwise ``bob`` is an :class:`AdversaryStrategy`.  With honest
    parties the receiver's output equals the chosen string; when its
    chosen index set comes out empty (probability 2^-n) both sides hash
    the zero-padded empty string, and the event is flagged.
    ``force_theta_hat`` pins the receiver's bases for exact tests.
    """
    if not 1 <= ell <= n:
        raise ValueError("need 1 <= ell <= n")
    rng = make_rng(rng)
    x = rng.integers(0, 2, n, dtype=np.uint8)
    theta = rng.integers(0, 2, n, dtype=np.uint8)

    adversary_record = None
    theta_hat = None
    x_hat = None
    if bob is None:
        if force_theta_hat is not None:
            theta_hat = np.asarray(force_theta_hat, dtype=np.uint8)
        else:
            theta_hat = rng.integers(0, 2, n, dtype=np.uint8)
        # matched bases reproduce the bit, mismatched ones are uniform
        x_hat = np.where(theta == theta_hat, x,
                         rng.integers(0, 2, n, dtype=np.uint8)).astype(np.uint8)
        # -- waiting time --
        i0, i1 = honest_index_sets(theta, theta_hat, c)
    else:
        states = [qsim.bb84_prepare(int(b), int(t)) for b, t in zip(x, theta)]
        notes, stored = bob.receive(states, rng)
        # -- waiting time: everything kept goes through storage --
        noisy = [qsim.depolarize(s, bob.storage_r) for s in stored]
        i0, i1, adversary_record = bob.after_reveal(noisy, notes, theta, rng)

    i0 = np.asarray(i0, dtype=np.int64)
    i1 = np.asarray(i1, dtype=np.int64)
    combined = np.sort(np.concatenate([i0, i1]))
    if not np.array_equal(combined, np.arange(n)):
        raise ValueError("index sets must partition the rounds")

    f0 = random_hash(n, ell, rng)
    f1 = random_hash(n, ell, rng)
    s0 = hash_apply(f0, x[i0])
    s1 = hash_apply(f1, x[i1])

    y = None
    i_c_empty = False
    if bob is None:
        i_c = i0 if c == 0 else i1
        f_c = f0 if c == 0 else f1
        y = hash_apply(f_c, x_hat[i_c])
        i_c_empty = i_c.size == 0
    elif adversary_record is not None:
        adversary_record = bob.after_hashes(f0, f1, adversary_record, rng)

    return RotTranscript(n=n, ell=ell, c=c, x=x, theta=theta,
                         theta_hat=theta_hat, x_hat=x_hat, i0=i0, i1=i1,
                         f0=f0, f1=f1, s0=s0, s1=s1, y=y,
                         i_c_empty=i_c_empty, adversary=adversary_record)


# --- robust oblivious transfer ---------------------------------------------------


@dataclass
class RobustTranscript:
    n: int
    ell: int
    c: int
    params: dict
    zeta: float
    x: np.ndarray
    theta: np.ndarray
    theta_hat: np.ndarray | None
    click_mask: np.ndarray
    s_remain: np.ndarray
    abort: bool
    x_hat: np.ndarray | None = None
    i0: np.ndarray | None = None
    i1: np.ndarray | None = None
    f0: ToeplitzHash | None = None
    f1: ToeplitzHash | None = None
    syn0: np.ndarray | None = None
    syn1: np.ndarray | None = None
    s0: np.ndarray | None = None
    s1: np.ndarray | None = None
    corrected: np.ndarray | None = None
    y: np.ndarray | None = None
    decode_ok: bool | None = None
    budget_ok: bool | None = None
    adversary: dict | None = None

    def to_json(self):
        def bits(a):
            return None if a is None else bit_string(a)

        return json.dumps({
            "n": self.n, "ell": self.ell, "c": self.c,
            "params": self.params, "zeta": self.zeta,
            "x": bit_string(self.x), "theta": basis_string(self.theta),
            "theta_hat": None if self.theta_hat is None
            else basis_string(self.theta_hat),
            "click_mask": bit_string(self.click_mask),
            "s_remain": [int(i) for i in self.s_remain],
            "abort": self.abort,
            "x_hat": bits(self.x_hat),
            "i0": None if self.i0 is None else [int(i) for i in self.i0],
            "i1": None if self.i1 is None else [int(i) for i in self.i1],
            "f0": _hash_json(self.f0), "f1": _hash_json(self.f1),
            "syn0": bits(self.syn0), "syn1": bits(self.syn1),
            "s0": bits(self.s0), "s1": bits(self.s1),
            "corrected": bits(self.corrected), "y": bits(self.y),
            "decode_ok": self.decode_ok, "budget_ok": self.budget_ok,
        })


def block_syndromes(code, bits):
    """Concatenated per-block syndromes of a string padded to whole blocks."""
    bits = np.asarray(bits, dtype=np.uint8)
    blocks = math.ceil(bits.size / code.n) if bits.size else 0
    padded = np.zeros(blocks * code.n, dtype=np.uint8)
    padded[:bits.size] = bits
    out = [syndrome(code, padded[b * code.n:(b + 1) * code.n])
           for b in range(blocks)]
    return np.concatenate(out) if out else np.zeros(0, dtype=np.uint8)


def block_correct(code, bits, syndromes):
    """Blockwise coset-leader correction towards the syndromes' string."""
    bits = np.asarray(bits, dtype=np.uint8)
    blocks = math.ceil(bits.size / code.n) if bits.size else 0
    padded = np.zeros(blocks * code.n, dtype=np.uint8)
    padded[:bits.size] = bits
    red = code.n - code.k
    out = padded.copy()
    for b in range(blocks):
        target = syndromes[b * red:(b + 1) * red]
        out[b * code.n:(b + 1) * code.n] = syndrome_decode(
            code, padded[b * code.n:(b + 1) * code.n], target)
    return out[:bits.size]


class RobustReportingStrategy:
    """Hook for a dishonest receiver's erasure reporting in the robust runner."""

    def reported_clicks(self, single_mask, click_mask, params, rng):
        raise NotImplementedError


class WorstCaseReportingBob(RobustReportingStrategy):
    """Reports the maximal credible number of single-photon rounds missing.

    On top of its genuine no-click rounds it drops
    (ph_noclick - pd_noclick) * n single-photon rounds, exactly the
    worst case the length bound charges for; anything more trips the
    round-count check deterministically.
    """

    def __init__(self, extra_fraction=None):
        self.extra_fraction = extra_fraction

    def reported_clicks(self, single_mask, click_mask, params, rng):
        extra = self.extra_fraction
        if extra is None:
            extra = params.ph_noclick - params.pd_noclick
        budget = int(round(extra * len(click_mask)))
        reported = click_mask.copy()
        candidates = np.nonzero(single_mask & click_mask)[0]
        drop = candidates[:budget]
        reported[drop] = False
        return reported


def run_robust_rot(params, code, c, bob=None, rng=None, eps_target=1e-3,
                   zeta=None):
    """One run of the loss/error-tolerant oblivious transfer.

    Honest receiver: clicks are lost independently with probability
    ph_noclick, surviving matched-basis bits flip with probability
    ph_err.  The sender aborts when the reported click count leaves
    [(1 - p - zeta) n, (1 - p + zeta) n]; the default
    zeta = sqrt(ln(2/eps_target) / (2n)) keeps the honest abort
    probability at most eps_target.  Error correction is blockwise
    syndrome decoding with the given code.

    ``bob`` may be a :class:`RobustReportingStrategy` to control the
    erasure-report message of a dishonest receiver (the run then stops
    after the sender's messages, with no receiver output).
    """
    n = int(params.n)
    if n != params.n:
        raise ValueError("simulation needs an integer round count")
    if params.ell is None:
        raise ValueError("simulation needs the string length ell set")
    rng = make_rng(rng)
    if zeta is None:
        zeta = math.sqrt(math.log(2.0 / eps_target) / (2.0 * n))

    x = rng.integers(0, 2, n, dtype=np.uint8)
    theta = rng.integers(0, 2, n, dtype=np.uint8)
    theta_hat = rng.integers(0, 2, n, dtype=np.uint8)
    single_mask = rng.random(n) < params.p1_sent

    if bob is None:
        click_mask = rng.random(n) >= params.ph_noclick
        reported = click_mask
    else:
        click_mask = rng.random(n) >= params.pd_noclick
        reported = bob.reported_clicks(single_mask, click_mask, params, rng)

    s_remain = np.nonzero(reported)[0]
    m = s_remain.size
    p = params.ph_noclick
    lo = (1.0 - p - zeta) * n
    hi = (1.0 - p + zeta) * n
    abort = not lo <= m <= hi

    base = dict(p1_sent=params.p1_sent, ph_noclick=params.ph_noclick,
                pd_noclick=params.pd_noclick, ph_err=params.ph_err)
    transcript = RobustTranscript(
        n=n, ell=int(params.ell), c=c, params=base, zeta=zeta, x=x,
        theta=theta, theta_hat=theta_hat, click_mask=reported.astype(np.uint8),
        s_remain=s_remain, abort=abort)
    if abort:
        return transcript

    # -- waiting time --
    theta_rem = theta[s_remain]
    x_rem = x[s_remain]
    ell = transcript.ell
    f0 = random_hash(n, ell, rng)
    f1 = random_hash(n, ell, rng)

    if bob is not None:
        # sender messages only; a dishonest receiver's decoding is its own.
        # Non-single-photon rounds leak their bit outright (the receiver is
        # assumed able to split off a photon without touching the basis).
        multi = np.nonzero(~single_mask[s_remain])[0]
        transcript.adversary = {
            "multi_rounds": [int(i) for i in multi],
            "free_bits": bit_string(x_rem[multi]),
        }
        i_perm = rng.permutation(m)
        i0 = np.sort(i_perm[:m // 2])
        i1 = np.sort(i_perm[m // 2:])
    else:
        hat_rem = theta_hat[s_remain]
        flips = rng.random(m) < params.ph_err
        meas = np.where(theta_rem == hat_rem, x_rem,
                        rng.integers(0, 2, m, dtype=np.uint8))
        meas = (meas ^ flips.astype(np.uint8)).astype(np.uint8)
        i0, i1 = honest_index_sets(theta_rem, hat_rem, c)
        transcript.x_hat = meas

    syn0 = block_syndromes(code, x_rem[i0])
    syn1 = block_syndromes(code, x_rem[i1])
    s0 = hash_apply(f0, x_rem[i0])
    s1 = hash_apply(f1, x_rem[i1])

    transcript.i0, transcript.i1 = i0, i1
    transcript.f0, transcript.f1 = f0, f1
    transcript.syn0, transcript.syn1 = syn0, syn1
    transcript.s0, transcript.s1 = s0, s1
    transcript.budget_ok = syndrome_budget_ok(code, params.ph_err)

    if bob is None:
        i_c = i0 if c == 0 else i1
        syn_c = syn0 if c == 0 else syn1
        f_c = f0 if c == 0 else f1
        corrected = block_correct(code, transcript.x_hat[i_c], syn_c)
        transcript.corrected = corrected
        transcript.y = hash_apply(f_c, corrected)
        transcript.decode_ok = bool(np.array_equal(corrected, x_rem[i_c]))
    return transcript


# --- password identification -------------------------------------------------


@dataclass
class QidTranscript:
    w_alice: int
    w_bob: int
    ell: int
    x: np.ndarray
    theta: np.ndarray
    theta_hat: np.ndarray
    x_hat: np.ndarray
    kappa: np.ndarray
    i_w_alice: np.ndarray
    i_w_bob: np.ndarray
    f: ToeplitzHash
    g: ToeplitzHash
    z: np.ndarray
    accept: bool

    def to_json(self):
        return json.dumps({
            "w_alice": self.w_alice, "w_bob": self.w_bob, "ell": self.ell,
            "x": bit_string(self.x), "theta": basis_string(self.theta),
            "theta_hat": basis_string(self.theta_hat),
            "x_hat": bit_string(self.x_hat),
            "kappa": basis_string(self.kappa),
            "i_w_alice": [int(i) for i in self.i_w_alice],
            "i_w_bob": [int(i) for i in self.i_w_bob],
            "f": _hash_json(self.f), "g": _hash_json(self.g),
            "z": bit_string(self.z), "accept": self.accept,
        })


def qid_kappa(qcode, w_bob, theta_hat):
    """The server's first message: its codeword XOR its measurement bases."""
    return (qcode.password_bases(w_bob) ^ np.asarray(theta_hat,
                                                     dtype=np.uint8))


def run_qid(w_alice, w_bob, qcode, ell, rng=None, force_theta_hat=None):
    """One noiseless honest run of the password identification protocol.

    Matching passwords always accept; differing passwords accept only on
    a hash collision.  Both hash families carry a fresh random offset so
    that outputs of correlated inputs stay jointly uniform.
    """
    code = qcode.code
    n = code.n
    if not 1 <= ell <= n:
        raise ValueError("need 1 <= ell <= n")
    rng = make_rng(rng)
    x = rng.integers(0, 2, n, dtype=np.uint8)
    theta = rng.integers(0, 2, n, dtype=np.uint8)
    if force_theta_hat is not None:
        theta_hat = np.asarray(force_theta_hat, dtype=np.uint8)
    else:
        theta_hat = rng.integers(0, 2, n, dtype=np.uint8)
    x_hat = np.where(theta == theta_hat, x,
                     rng.integers(0, 2, n, dtype=np.uint8)).astype(np.uint8)

    # -- waiting time --
    kappa = qid_kappa(qcode, w_bob, theta_hat)
    shifted_alice = qcode.password_bases(w_alice) ^ kappa
    shifted_bob = qcode.password_bases(w_bob) ^ kappa
    i_w_alice = np.nonzero(theta == shifted_alice)[0]
    i_w_bob = np.nonzero(theta == shifted_bob)[0]

    f = random_hash(n, ell, rng, affine=True)
    g_inputs = max(code.k, ell)
    g = random_hash(g_inputs, ell, rng, affine=True)

    z = hash_apply(f, x[i_w_alice]) ^ hash_apply(g, qcode.password_bits(w_alice))
    check = hash_apply(f, x_hat[i_w_bob]) ^ hash_apply(
        g, qcode.password_bits(w_bob))
    accept = bool(np.array_equal(z, check))
    return QidTranscript(w_alice=w_alice, w_bob=w_bob, ell=ell, x=x,
                         theta=theta, theta_hat=theta_hat, x_hat=x_hat,
                         kappa=kappa, i_w_alice=i_w_alice, i_w_bob=i_w_bob,
                         f=f, g=g, z=z, accept=accept)


# --- individual-attack leakage estimation ---------------------------------------


def _enumeration_bits(width):
    if width == 0:
        return np.zeros((1, 0), dtype=np.uint8)
    vals = np.arange(2 ** width)
    return ((vals[:, None] >> np.arange(width - 1, -1, -1)[None, :]) & 1
            ).astype(np.uint8)


def estimate_leakage(n, ell, r, trials, rng=None, delta=0.01):
    """What an individually storing receiver learns, against the guarantees.

    Runs ``trials`` transfers against :class:`StoreAllBob` with per-qubit
    depolarizing retention ``r``.  Reports the empirical per-bit guess
    rate (oracle: the optimal-discrimination value (1+r)/2) and the
    empirical non-uniformity of the provably hidden string given the
    other string and the selector bit, computed exactly per run from the
    receiver's product posterior and averaged.  Two one-sided guarantees
    accompany it: the protocol-level statement error min(1, 2 eps(delta, n))
    and the hash-smoothing bound
    2^(-((alpha/2 - 1 - ell) - ell)/2 - 1) at alpha = n log2(2/(1+r)).
    """
    if n > LEAKAGE_MAX_N:
        raise ValueError("exact post-processing limited to n <= %d"
                         % LEAKAGE_MAX_N)
    if trials < 1:
        raise ValueError("need at least one trial")
    rng = make_rng(rng)
    helstrom_rate = qsim.stored_bit_guess_probability(r)
    p_post = helstrom_rate  # posterior of the true bit matching the guess
    alpha = -n * math.log2(p_post) if p_post < 1.0 else 0.0
    log_p = math.log2(p_post) if p_post > 0.0 else -math.inf
    log_q = math.log2(1.0 - p_post) if p_post < 1.0 else -math.inf

    enum = {}
    bit_hits = 0
    bit_total = 0
    nonuni_sum = 0.0
    for _ in range(trials):
        t = run_rot(n, ell, c=0, bob=StoreAllBob(r), rng=rng.spawn(1)[0])
        guesses = t.adversary["guesses"]
        bit_hits += int((guesses == t.x).sum())
        bit_total += n

        parts = []
        for idx, f in ((t.i0, t.f0), (t.i1, t.f1)):
            width = idx.size
            if width not in enum:
                enum[width] = _enumeration_bits(width)
            bits = enum[width]
            agree = (bits == guesses[idx][np.newaxis, :]).sum(axis=1)
            if 0.0 < p_post < 1.0:
                weights = 2.0 ** (agree * log_p + (width - agree) * log_q)
            else:  # perfect storage: posterior concentrated on the guess
                weights = (agree == width).astype(float)
            codes = hash_apply_many(f, bits) @ (1 << np.arange(ell - 1, -1, -1))
            parts.append((agree, weights, codes))

        (agree0, w0, codes0), (agree1, w1, codes1) = parts
        # selector: 0 when the first substring's posterior is strictly
        # below 2^(-alpha/2); that substring is then the provably hidden
        # one.  The comparison p^a (1-p)^(w-a) >= p^(n/2) is evaluated as
        # (2a - n) log p + 2(w - a) log(1-p) >= 0 so that a true tie
        # (a = w = n/2) is exactly zero in floating point.
        width0 = t.i0.size
        if 0.0 < p_post < 1.0:
            margin = (2 * agree0 - n) * log_p + 2 * (width0 - agree0) * log_q
            selector = (margin >= 0.0).astype(np.int64)
        else:
            selector = (agree0 == width0).astype(np.int64)
        grouped0 = np.zeros((2 ** ell, 2))
        np.add.at(grouped0, (codes0, selector), w0)
        grouped1 = np.bincount(codes1, weights=w1, minlength=2 ** ell)
        # joint tables indexed (known string, hidden string) per selector
        joint0 = grouped1[:, np.newaxis] * grouped0[:, 0][np.newaxis, :]
        joint1 = grouped0[:, 1][:, np.newaxis] * grouped1[np.newaxis, :]
        total = joint0.sum() + joint1.sum()
        uniform0 = joint0.sum(axis=1, keepdims=True) / 2 ** ell
        uniform1 = joint1.sum(axis=1, keepdims=True) / 2 ** ell
        nonuni = 0.5 * (np.abs(joint0 - uniform0).sum()
                        + np.abs(joint1 - uniform1).sum()) / total
        nonuni_sum += nonuni

    statement_bound = min(1.0, 2.0 * ot_epsilon(delta, n))
    pa_exponent = -0.5 * ((alpha / 2.0 - 1.0 - ell) - ell) - 1.0
    pa_bound = min(1.0, 2.0 ** pa_exponent)
    return {
        "n": n, "ell": ell, "r": r, "trials": trials, "delta": delta,
        "bit_samples": bit_total,
        "per_bit_guess_rate": bit_hits / bit_total,
        "helstrom_rate": helstrom_rate,
        "alpha": alpha,
        "empirical_nonuniformity": nonuni_sum / trials,
        "pa_bound": pa_bound,
        "statement_bound": statement_bound,
    }
