"""Exact classical min-entropy primitives.

Everything here treats side information as classical registers of a
:class:`~noisystorage.distributions.JointDistribution`.  Guessing
probability, (smooth) min-entropy, non-uniformity, and the two randomized
index-selection constructions that split joint min-entropy between
substrings are all computed exactly in double precision; entropies are in
bits (log base 2).
"""

import itertools
from dataclasses import dataclass

import numpy as np

from .distributions import JointDistribution, SubDistribution

# exhaustive-search caps for the channel-decoding oracle
PSUCC_MAX_SYMBOLS = 8
PSUCC_MAX_BITS = 3


def _names(arg):
    if arg is None:
        return []
    if isinstance(arg, str):
        return [arg]
    return list(arg)


def guessing_probability(dist, target, given=()):
    """Best probability of guessing ``target`` from the ``given`` registers.

    Classically this is sum_y max_x P(x, y): for every value y of the side
    information the guesser names the most likely x.  Registers outside
    ``target`` and ``given`` are marginalized out.
    """
    table = dist.grouped(_names(target), _names(given))
    return float(table.max(axis=0).sum())


def _column_table(dist, target, given):
    return dist.grouped(_names(target), _names(given))


def _smoothed_columns(table, eps):
    """Optimally remove up to ``eps`` mass to minimize the sum of column maxima.

    Returns (per-column ceilings, objective value).  Lowering a column's
    maximum by dt costs k*dt where k entries currently sit at the maximum,
    so the cheapest moves are taken first: all segments where a single
    entry is cut, then two-way ties, and so on.  The result equals the
    linear-program optimum over all dominated tables with deficit <= eps.
    """
    n_rows, n_cols = table.shape
    sorted_cols = np.sort(table, axis=0)[::-1, :]  # descending per column
    ceilings = sorted_cols[0, :].copy()
    segments = []  # (unit cost, column, gain capacity)
    for j in range(n_cols):
        col = sorted_cols[:, j]
        for tier in range(n_rows):
            nxt = col[tier + 1] if tier + 1 < n_rows else 0.0
            width = float(col[tier] - nxt)
            if width > 0.0:
                segments.append((tier + 1, j, width))
    segments.sort(key=lambda s: (s[0], s[1]))
    budget = float(eps)
    for cost, j, width in segments:
        if budget <= 0.0:
            break
        gain = min(width, budget / cost)
        ceilings[j] -= gain
        budget -= gain * cost
    return ceilings, float(ceilings.sum())


def min_entropy(dist, target, given=(), eps=0.0):
    """(Smooth) min-entropy of ``target`` given the ``given`` registers, in bits.

    With ``eps == 0`` this is -log2 of the guessing probability.  With
    ``eps > 0`` the table may first be smoothed: up to ``eps`` probability
    mass is removed (entrywise, never below zero) so as to minimize the
    resulting guessing weight, and -log2 of that optimum is returned.
    """
    if not 0.0 <= eps < 1.0:
        raise ValueError("eps must satisfy 0 <= eps < 1")
    table = _column_table(dist, target, given)
    if eps == 0.0:
        return -float(np.log2(table.max(axis=0).sum()))
    if eps >= table.sum():
        raise ValueError("eps must be smaller than the total mass")
    _, value = _smoothed_columns(table, eps)
    return -float(np.log2(value))


def smooth_sub_distribution(dist, target, given=(), eps=0.0):
    """Materialize the optimally smoothed table behind :func:`min_entropy`.

    Returns a :class:`SubDistribution` over the (target, given) marginal:
    entries above the per-column ceiling are cut down to it, removing at
    most ``eps`` total mass.
    """
    if not 0.0 <= eps < 1.0:
        raise ValueError("eps must satisfy 0 <= eps < 1")
    target = _names(target)
    given = _names(given)
    sub = dist.marginal(target + given)
    t_size = int(np.prod([sub.size_of(n) for n in target]))
    table = sub.probs.reshape(t_size, -1)
    ceilings, _ = _smoothed_columns(table, eps)
    q = np.minimum(table, ceilings[np.newaxis, :])
    return SubDistribution(
        registers=list(sub.registers),
        probs=q.reshape(sub.probs.shape),
        mass=float(q.sum()),
    )


def nonuniformity(dist, target, given=()):
    """Statistical distance of ``target`` from uniform-and-independent.

    d(X|Y) = 1/2 sum_y P(y) sum_x |P(x|y) - 1/|X||, computed as
    1/2 sum_{x,y} |P(x,y) - P(y)/|X||.  Zero exactly when ``target`` is
    uniform and independent of the conditioning registers.
    """
    table = _column_table(dist, target, given)
    n_x = table.shape[0]
    col_mass = table.sum(axis=0)
    return float(0.5 * np.abs(table - col_mass[np.newaxis, :] / n_x).sum())


@dataclass
class SplitResult:
    """Outcome of a randomized index-selection split.

    ``augmented`` carries the input table extended with the new selection
    register; ``achieved`` is the exact min-entropy of the selected
    substring given the selection register and the side information.
    """

    augmented: JointDistribution
    alpha: float
    achieved: float


def _conditional_given(dist, part, given):
    """P(part | given) as an array shaped (part size, joint given size)."""
    table = dist.grouped([part], given)
    col = table.sum(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        cond = np.where(col > 0.0, table / col[np.newaxis, :], 0.0)
    return cond


def split_binary(dist, alpha, x0="X0", x1="X1", given=(), d_name="D"):
    """Augment (X0, X1; Z) with a bit D so that X_D stays hard to guess.

    D is a deterministic function of (X0, Z): it is 0 exactly when
    P(X0|Z) < 2^(-alpha/2) (strict; ties select D = 1).  Whenever the
    joint table satisfies H_min(X0 X1 | Z) >= alpha, the reported
    ``achieved`` = H_min(X_D | D Z) is at least alpha/2 - 1.
    """
    given = _names(given)
    expected = {x0, x1, *given}
    if set(dist.names) != expected or len(expected) != 2 + len(given):
        raise ValueError("distribution must consist of exactly the two halves "
                         "and the side-information registers")
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")

    threshold = 2.0 ** (-alpha / 2.0)
    cond0 = _conditional_given(dist, x0, given)  # (|X0|, |Z|)
    d_of = (cond0 >= threshold).astype(np.uint8)  # 0 iff P(x0|z) < threshold

    # broadcast D over the full table's cells: index d_of by (x0, flat z)
    idx = np.indices(dist.sizes)
    given_axes = dist.axes(given)
    z_flat = np.zeros(dist.sizes, dtype=np.int64)
    for a in given_axes:
        z_flat = z_flat * dist.sizes[a] + idx[a]
    d_cells = d_of[idx[dist.axis(x0)], z_flat]

    augmented = dist.with_register(d_name, 2, d_cells)

    # p_guess(X_D | D Z) = sum_z [max_x0 P(x0, D=0, z) + max_x1 P(x1, D=1, z)]
    p = 0.0
    for part, d_val in ((x0, 0), (x1, 1)):
        masked = np.where(d_cells == d_val, dist.probs, 0.0)
        table = _masked_grouped(dist, masked, [part], given)
        p += table.max(axis=0).sum()
    achieved = -float(np.log2(p))
    return SplitResult(augmented=augmented, alpha=float(alpha), achieved=achieved)


def _masked_grouped(dist, masked, target, given):
    """Like JointDistribution.grouped but on a mass-deficient table."""
    target_axes = dist.axes(target)
    given_axes = dist.axes(given)
    drop = tuple(i for i in range(len(dist.registers))
                 if i not in target_axes and i not in given_axes)
    arr = masked.sum(axis=drop) if drop else masked
    surviving = [i for i in range(len(dist.registers)) if i not in drop]
    perm = [surviving.index(a) for a in target_axes + given_axes]
    arr = np.transpose(arr, perm)
    t_size = int(np.prod([dist.sizes[a] for a in target_axes])) if target_axes else 1
    return arr.reshape(t_size, -1)


def split_multi(dist, alpha, parts, given=(), v_name="V"):
    """Augment (X1..Xm; Z) with a first-large-index register V.

    V picks the first index j whose substring has conditional probability
    at least 2^(-alpha/2) given Z (checking j = 1..m-1), and is m when no
    such index exists.  ``achieved`` is the exact min-entropy of X_W given
    (V, W, Z) conditioned on V != W, for W uniform over {1..m} and
    independent of everything else.  When every pair satisfies
    H_min(X_i X_j | Z) >= alpha this is at least alpha/2 - log2(m) - 1.

    V's register values are 0-based: value v stands for index v+1.
    """
    parts = _names(parts)
    given = _names(given)
    m = len(parts)
    if m < 2:
        raise ValueError("need at least two substrings to split")
    expected = {*parts, *given}
    if set(dist.names) != expected or len(expected) != m + len(given):
        raise ValueError("distribution must consist of exactly the substrings "
                         "and the side-information registers")
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")

    threshold = 2.0 ** (-alpha / 2.0)
    idx = np.indices(dist.sizes)
    given_axes = dist.axes(given)
    z_flat = np.zeros(dist.sizes, dtype=np.int64)
    for a in given_axes:
        z_flat = z_flat * dist.sizes[a] + idx[a]

    large = []
    for part in parts:
        cond = _conditional_given(dist, part, given)
        large.append(cond[idx[dist.axis(part)], z_flat] >= threshold)

    v_cells = np.full(dist.sizes, m - 1, dtype=np.int64)
    taken = np.zeros(dist.sizes, dtype=bool)
    for j in range(m - 1):  # the last index is the fallback, never tested
        hit = large[j] & ~taken
        v_cells[hit] = j
        taken |= hit

    augmented = dist.with_register(v_name, m, v_cells)

    # p_guess(X_W | V W Z, V != W), W uniform:
    #   (1/(m-1)) sum_z sum_j sum_{i != j} max_xi P(Xi=xi, V=j, Z=z)
    total = 0.0
    for j in range(m):
        masked = np.where(v_cells == j, dist.probs, 0.0)
        for i in range(m):
            if i == j:
                continue
            table = _masked_grouped(dist, masked, [parts[i]], given)
            total += table.max(axis=0).sum()
    p = total / (m - 1)
    achieved = -float(np.log2(p)) if p > 0 else float("inf")
    return SplitResult(augmented=augmented, alpha=float(alpha), achieved=achieved)


def psucc_classical(channel, k):
    """Exact best probability of sending k uniform bits through a channel.

    ``channel[o, x]`` is the probability of output o on input x (columns
    are probability vectors).  Maximizes average decoding success over all
    encodings of the 2^k messages into inputs, with maximum-likelihood
    decoding.  Messages sharing an input are never advantageous, so the
    search reduces to input subsets of size min(2^k, #inputs); every
    subset is scored exactly.

    Only instances small enough for exhaustive search are accepted
    (inputs, outputs <= 8 and k <= 3).
    """
    channel = np.asarray(channel, dtype=float)
    if channel.ndim != 2:
        raise ValueError("channel must be a 2-D stochastic matrix")
    n_out, n_in = channel.shape
    if np.any(channel < 0) or np.any(np.abs(channel.sum(axis=0) - 1.0) > 1e-9):
        raise ValueError("channel columns must be probability vectors")
    if n_in > PSUCC_MAX_SYMBOLS or n_out > PSUCC_MAX_SYMBOLS:
        raise ValueError("channel larger than the %d-symbol exhaustive cap"
                         % PSUCC_MAX_SYMBOLS)
    k = int(k)
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k > PSUCC_MAX_BITS:
        raise ValueError("k larger than the %d-bit exhaustive cap" % PSUCC_MAX_BITS)

    n_msgs = 2 ** k
    support = min(n_msgs, n_in)
    best = 0.0
    for subset in itertools.combinations(range(n_in), support):
        score = channel[:, subset].max(axis=1).sum()
        if score > best:
            best = score
    return float(best / n_msgs)
