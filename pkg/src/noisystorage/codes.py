"""Binary linear codes: encoding, syndromes, exact distances, decoding.

Desk-scale codes only: minimum distances are certified by brute force
(dimension capped at 20) and syndrome decoding uses an exact coset-leader
table (redundancy capped at 24 bits).  The catalog covers repetition,
Hamming [7,4], its extended [8,4] variant, and deterministic random
codes, which is enough to drive the protocol machinery at test scale.
"""

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import gf2
from .bounds import binary_entropy, inv_binary_entropy
from .hashing import bits_to_hex, hex_to_bits

MIN_DISTANCE_MAX_K = 20
COSET_TABLE_MAX_REDUNDANCY = 24


@dataclass
class LinearCode:
    """An [n, k] code given by a full-rank generator matrix."""

    generator: np.ndarray
    parity: np.ndarray = None
    _min_distance: int = field(default=None, repr=False)
    _coset_leaders: dict = field(default=None, repr=False)

    def __post_init__(self):
        g = gf2.as_bits(self.generator)
        if g.ndim != 2:
            raise ValueError("generator must be a k x n bit matrix")
        if not gf2.row_independent(g):
            raise ValueError("generator rows must be linearly independent")
        self.generator = g
        if self.parity is None:
            self.parity = gf2.nullspace(g)
        else:
            self.parity = gf2.as_bits(self.parity)
        if self.parity.shape != (self.n - self.k, self.n):
            raise ValueError("parity matrix must be (n-k) x n")
        if gf2.matmul(self.parity, g.T).any():
            raise ValueError("parity rows must annihilate the generator")

    @property
    def n(self):
        return self.generator.shape[1]

    @property
    def k(self):
        return self.generator.shape[0]

    @property
    def min_distance(self):
        if self._min_distance is None:
            self._min_distance = min_distance(self)
        return self._min_distance

    def to_json(self):
        return json.dumps({
            "n": self.n, "k": self.k,
            "generator": [bits_to_hex(row) for row in self.generator],
        })

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        rows = [hex_to_bits(row, data["n"]) for row in data["generator"]]
        return cls(generator=np.array(rows, dtype=np.uint8))


def encode(code, message):
    """message (k bits) -> codeword (n bits), over GF(2)."""
    message = gf2.as_bits(message)
    if message.shape != (code.k,):
        raise ValueError("message must have exactly k = %d bits" % code.k)
    return gf2.matmul(message[np.newaxis, :], code.generator)[0].astype(np.uint8)


def syndrome(code, word):
    """parity @ word; zero exactly for codewords."""
    word = gf2.as_bits(word)
    if word.shape != (code.n,):
        raise ValueError("word must have exactly n = %d bits" % code.n)
    return gf2.matmul(code.parity, word[:, np.newaxis])[:, 0].astype(np.uint8)


def min_distance(code):
    """Exact minimum weight over all nonzero codewords (k <= 20)."""
    if code.k > MIN_DISTANCE_MAX_K:
        raise ValueError("brute-force distance limited to k <= %d"
                         % MIN_DISTANCE_MAX_K)
    best = code.n
    g = code.generator.astype(np.int64)
    chunk = 1 << 14
    for start in range(1, 2 ** code.k, chunk):
        msgs = np.arange(start, min(start + chunk, 2 ** code.k))
        bits = (msgs[:, None] >> np.arange(code.k - 1, -1, -1)[None, :]) & 1
        words = (bits @ g) % 2
        best = min(best, int(words.sum(axis=1).min()))
    return best


def _syndrome_codes(code, patterns):
    """Integer syndrome of each row of a bit-pattern matrix."""
    syn = (patterns.astype(np.int64) @ code.parity.T.astype(np.int64)) % 2
    return syn @ (1 << np.arange(code.n - code.k - 1, -1, -1))


def coset_leaders(code):
    """Map from syndrome (as integer) to its minimum-weight error pattern.

    Ties within a weight go to the lexicographically smallest pattern,
    i.e. the numerically smallest when the bits are read as a binary
    number.
    """
    if code._coset_leaders is not None:
        return code._coset_leaders
    redundancy = code.n - code.k
    if redundancy > COSET_TABLE_MAX_REDUNDANCY:
        raise ValueError("coset table limited to n - k <= %d"
                         % COSET_TABLE_MAX_REDUNDANCY)
    table = {}
    wanted = 1 << redundancy
    for weight in range(code.n + 1):
        if len(table) == wanted:
            break
        positions = list(itertools.combinations(range(code.n), weight))
        patterns = np.zeros((len(positions), code.n), dtype=np.uint8)
        for i, pos in enumerate(positions):
            patterns[i, list(pos)] = 1
        values = patterns @ (1 << np.arange(code.n - 1, -1, -1))
        order = np.argsort(values, kind="stable")
        codes_int = _syndrome_codes(code, patterns)
        for i in order:
            s = int(codes_int[i])
            if s not in table:
                table[s] = patterns[i].copy()
    code._coset_leaders = table
    return table


def syndrome_decode(code, received, syndrome_target):
    """Closest word to ``received`` whose syndrome equals the target.

    Coset-leader correction: any error of weight up to (d-1)/2 from a
    word with the target syndrome is undone; heavier errors may
    miscorrect, as for any code.
    """
    received = gf2.as_bits(received)
    if received.shape != (code.n,):
        raise ValueError("received word must have n = %d bits" % code.n)
    target = gf2.as_bits(syndrome_target)
    if target.shape != (code.n - code.k,):
        raise ValueError("syndrome must have n - k = %d bits"
                         % (code.n - code.k))
    diff = syndrome(code, received) ^ target
    key = int(diff @ (1 << np.arange(code.n - code.k - 1, -1, -1)))
    leader = coset_leaders(code)[key]
    return (received ^ leader).astype(np.uint8)


# --- catalog -----------------------------------------------------------------


def repetition_code(n):
    if n < 1:
        raise ValueError("repetition length must be >= 1")
    return LinearCode(generator=np.ones((1, n), dtype=np.uint8))


def hamming_7_4():
    p = np.array([[1, 1, 0], [1, 0, 1], [0, 1, 1], [1, 1, 1]], dtype=np.uint8)
    return LinearCode(generator=np.concatenate([np.eye(4, dtype=np.uint8), p],
                                               axis=1))


def extended_hamming_8_4():
    base = hamming_7_4().generator
    overall = base.sum(axis=1, keepdims=True) % 2
    return LinearCode(generator=np.concatenate([base, overall], axis=1).astype(
        np.uint8))


def identity_code(n):
    return LinearCode(generator=np.eye(n, dtype=np.uint8))


def random_code(n, k, seed=0, tries=200):
    """Best-of random generator matrices, distance certified exactly."""
    if k > n:
        raise ValueError("need k <= n")
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(tries):
        g = rng.integers(0, 2, (k, n), dtype=np.uint8)
        if gf2.rank(g) != k:
            continue
        cand = LinearCode(generator=g)
        if best is None or cand.min_distance > best.min_distance:
            best = cand
    if best is None:
        raise RuntimeError("no full-rank generator found")
    return best


# --- password encoding --------------------------------------------------------


@dataclass
class QidCode:
    """A code whose codewords, read over {+, x}, index the password set.

    Passwords are 1-based: w in {1..m} maps to the binary expansion of
    w - 1, encoded and then interpreted as a basis string with + for 0
    and x for 1.
    """

    code: LinearCode
    m: int

    def password_bits(self, w):
        if not 1 <= w <= self.m:
            raise ValueError("password must lie in 1..%d" % self.m)
        v = w - 1
        return np.array([(v >> (self.code.k - 1 - i)) & 1
                         for i in range(self.code.k)], dtype=np.uint8)

    def password_bases(self, w):
        """Codeword of password w as a 0/1 basis mask (0 = +, 1 = x)."""
        return encode(self.code, self.password_bits(w))

    def basis_string(self, w):
        return "".join("+x"[b] for b in self.password_bases(w))


def qid_code(m, n, min_d=None):
    """A deterministic [n, ceil(log2 m)] code for an m-password set.

    Reports the exact minimum distance.  When ``min_d`` is requested and
    unreachable by the construction, the achievable distance is part of
    the error.
    """
    if m < 2:
        raise ValueError("need at least 2 passwords")
    k = math.ceil(math.log2(m))
    if k > n:
        raise ValueError("n = %d too short for %d passwords" % (n, m))
    if k == 1:
        code = repetition_code(n)
    elif (n, k) == (7, 4):
        code = hamming_7_4()
    elif (n, k) == (8, 4):
        code = extended_hamming_8_4()
    elif n == k:
        code = identity_code(n)
    else:
        code = random_code(n, k, seed=(m * 1009 + n))
    if min_d is not None and code.min_distance < min_d:
        raise ValueError("requested distance %d not met: achievable distance "
                         "is %d at n = %d" % (min_d, code.min_distance, n))
    return QidCode(code=code, m=m)


def gv_parameters(n, m):
    """Achievable relative and absolute distance for m codewords at length n.

    mu = h^-1(1 - log2(m)/n); asymptotically good codes reach distance
    arbitrarily close to mu * n.
    """
    if math.log2(m) >= n:
        raise ValueError("log2(m) must be smaller than n")
    mu = inv_binary_entropy(1.0 - math.log2(m) / n)
    return mu, mu * n


def syndrome_budget_ok(code, p_err, factor=1.2):
    """Whether the code's redundancy fits the error-correction budget.

    Correcting a bit-error rate ``p_err`` on a block of ``n`` bits is
    budgeted at ``factor * h(p_err) * n`` syndrome bits.
    """
    return code.n - code.k <= factor * binary_entropy(p_err) * code.n
