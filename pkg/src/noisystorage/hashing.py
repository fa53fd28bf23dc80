"""Two-universal hashing over GF(2) via seeded Toeplitz matrices.

A seed of ``n + ell - 1`` bits defines the diagonals of an ``ell x n``
matrix ``T`` with ``T[i, j] = seed[ell - 1 + j - i]``; hashing is the
matrix-vector product over GF(2).  Inputs shorter than ``n`` bits are
zero-padded on the right.  An optional ``ell``-bit offset turns the family
into an affine one, which is strongly two-universal (needed where hash
values of correlated inputs must look jointly fresh).
"""

from dataclasses import dataclass, field

import numpy as np

from . import gf2
from .entropy import min_entropy

# exhaustive-regime caps for collision_bound
COLLISION_MAX_N = 8
COLLISION_MAX_ELL = 4


@dataclass(frozen=True)
class ToeplitzHash:
    n: int
    ell: int
    seed: tuple
    offset: tuple | None = None
    matrix: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not 1 <= self.ell <= self.n:
            raise ValueError("need 1 <= ell <= n")
        seed = gf2.as_bits(self.seed)
        if seed.shape != (self.n + self.ell - 1,):
            raise ValueError("seed must have exactly n + ell - 1 bits")
        object.__setattr__(self, "seed", tuple(int(b) for b in seed))
        if self.offset is not None:
            off = gf2.as_bits(self.offset)
            if off.shape != (self.ell,):
                raise ValueError("offset must have exactly ell bits")
            object.__setattr__(self, "offset", tuple(int(b) for b in off))
        rows = np.arange(self.ell)[:, None]
        cols = np.arange(self.n)[None, :]
        object.__setattr__(
            self, "matrix", seed[self.ell - 1 + cols - rows].astype(np.uint8))

    def seed_hex(self):
        """Seed as hex, most-significant bit = first diagonal element."""
        return bits_to_hex(self.seed)

    def offset_hex(self):
        return None if self.offset is None else bits_to_hex(self.offset)

    @classmethod
    def from_hex(cls, n, ell, seed_hex, offset_hex=None):
        seed = hex_to_bits(seed_hex, n + ell - 1)
        offset = (None if offset_hex is None
                  else tuple(int(b) for b in hex_to_bits(offset_hex, ell)))
        return cls(n=n, ell=ell, seed=tuple(int(b) for b in seed), offset=offset)


def bits_to_hex(bits):
    bits = gf2.as_bits(bits)
    value = 0
    for b in bits:
        value = (value << 1) | int(b)
    width = (len(bits) + 3) // 4
    return format(value, "0%dx" % width)


def hex_to_bits(text, length):
    value = int(text, 16)
    bits = [(value >> (length - 1 - i)) & 1 for i in range(length)]
    return np.array(bits, dtype=np.uint8)


def random_hash(n, ell, rng, affine=False):
    """Draw a uniformly random hash from the family."""
    seed = rng.integers(0, 2, size=n + ell - 1, dtype=np.uint8)
    offset = rng.integers(0, 2, size=ell, dtype=np.uint8) if affine else None
    return ToeplitzHash(n=n, ell=ell, seed=tuple(seed),
                        offset=None if offset is None else tuple(offset))


def _padded(x, n):
    x = gf2.as_bits(x)
    if x.ndim != 1:
        raise ValueError("input must be a 1-D bit string")
    if x.size > n:
        raise ValueError("input longer than the hash input size %d" % n)
    if x.size < n:
        x = np.concatenate([x, np.zeros(n - x.size, dtype=np.uint8)])
    return x


def hash_apply(h, x):
    """Hash a bit string of length <= n down to ell bits."""
    x = _padded(x, h.n)
    out = (h.matrix.astype(np.int64) @ x.astype(np.int64)) % 2
    if h.offset is not None:
        out ^= np.asarray(h.offset, dtype=np.int64)
    return out.astype(np.uint8)


def hash_apply_many(h, xs):
    """Hash every row of an (N, <=n) bit matrix at once."""
    xs = gf2.as_bits(xs)
    if xs.ndim != 2:
        raise ValueError("expected a 2-D bit matrix")
    if xs.shape[1] > h.n:
        raise ValueError("inputs longer than the hash input size")
    if xs.shape[1] < h.n:
        pad = np.zeros((xs.shape[0], h.n - xs.shape[1]), dtype=np.uint8)
        xs = np.concatenate([xs, pad], axis=1)
    out = (xs.astype(np.int64) @ h.matrix.T.astype(np.int64)) % 2
    if h.offset is not None:
        out ^= np.asarray(h.offset, dtype=np.int64)[np.newaxis, :]
    return out.astype(np.uint8)


def _difference_map(n, ell, diff):
    """Matrix A with A @ seed = T_seed @ diff, over all seeds."""
    length = n + ell - 1
    a = np.zeros((ell, length), dtype=np.uint8)
    for i in range(ell):
        for j in range(n):
            if diff[j]:
                a[i, ell - 1 + j - i] ^= 1
    return a


def collision_bound(n, ell):
    """Exact worst-case pair collision probability over the seed space.

    By linearity a pair (x, y) collides exactly when the matrix kills
    x XOR y, so the worst pair is the nonzero difference whose seed-to-
    output map has the lowest rank; the count of colliding seeds is read
    off that rank.  The result never exceeds 2^-ell.
    """
    if n > COLLISION_MAX_N or ell > COLLISION_MAX_ELL:
        raise ValueError("exhaustive regime is n <= %d, ell <= %d"
                         % (COLLISION_MAX_N, COLLISION_MAX_ELL))
    if not 1 <= ell <= n:
        raise ValueError("need 1 <= ell <= n")
    worst = 0.0
    for d_int in range(1, 2 ** n):
        diff = [(d_int >> (n - 1 - j)) & 1 for j in range(n)]
        a = _difference_map(n, ell, diff)
        worst = max(worst, 2.0 ** (-gf2.rank(a)))
    return worst


def pa_distance(dist, ell, sample_count, rng, x_register=None):
    """Empirical privacy-amplification distance against its guarantee.

    ``x_register`` (default: the first register) must have a power-of-two
    alphabet; all other registers are classical side information.  For
    ``sample_count`` uniformly drawn hashes the exact non-uniformity of
    the hash output given the side information is computed and averaged,
    and returned together with the guarantee
    2^(-(H_min(X | side) - ell)/2 - 1).
    """
    if sample_count < 1:
        raise ValueError("need at least one sample")
    names = dist.names
    x_register = x_register or names[0]
    side = [nm for nm in names if nm != x_register]
    size = dist.size_of(x_register)
    n_bits = int(size).bit_length() - 1
    if 2 ** n_bits != size:
        raise ValueError("register %r needs a power-of-two alphabet"
                         % x_register)
    if not 1 <= ell <= n_bits:
        raise ValueError("need 1 <= ell <= input bits")

    table = dist.grouped([x_register], side)  # (2^n_bits, |side|)
    xs = np.array([[(x >> (n_bits - 1 - b)) & 1 for b in range(n_bits)]
                   for x in range(size)], dtype=np.uint8)
    n_side = table.shape[1]
    side_mass = table.sum(axis=0)

    total = 0.0
    for _ in range(sample_count):
        h = random_hash(n_bits, ell, rng)
        outs = hash_apply_many(h, xs)
        weights = np.zeros((2 ** ell, n_side))
        out_codes = outs @ (1 << np.arange(ell - 1, -1, -1))
        for code in range(2 ** ell):
            weights[code] = table[out_codes == code].sum(axis=0)
        total += 0.5 * np.abs(
            weights - side_mass[np.newaxis, :] / 2 ** ell).sum()
    empirical = total / sample_count

    h_min = min_entropy(dist, x_register, side)
    bound = 2.0 ** (-0.5 * (h_min - ell) - 1.0)
    return empirical, bound
