"""Labeled finite joint probability tables.

A :class:`JointDistribution` is a table over named registers with finite
alphabets.  All entropy, splitting and privacy-amplification computations
operate on these tables.  Alphabets are index sets ``{0, ..., size-1}``.
"""

import json
from dataclasses import dataclass

import numpy as np

NORMALIZATION_TOL = 1e-12
MAX_CELLS = 2 ** 16


class JointDistribution:
    """Joint probability table over an ordered list of named registers.

    Parameters
    ----------
    registers : sequence of (name, size) pairs
        Register names must be unique, sizes >= 1.
    probs : array-like
        Nonnegative table of shape ``tuple(sizes)`` (or flat row-major),
        summing to 1 within ``1e-12``.
    """

    def __init__(self, registers, probs):
        regs = [(str(name), int(size)) for name, size in registers]
        names = [name for name, _ in regs]
        if len(set(names)) != len(names):
            raise ValueError("register names must be unique")
        if any(size < 1 for _, size in regs):
            raise ValueError("register sizes must be >= 1")
        shape = tuple(size for _, size in regs)
        cells = int(np.prod(shape)) if shape else 1
        if cells > MAX_CELLS:
            raise ValueError(
                "table has %d cells, exceeding the %d-cell cap" % (cells, MAX_CELLS))
        arr = np.asarray(probs, dtype=float).reshape(shape)
        if np.any(arr < -NORMALIZATION_TOL):
            raise ValueError("probabilities must be nonnegative")
        arr = np.clip(arr, 0.0, None)
        total = float(arr.sum())
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ValueError("probabilities sum to %r, expected 1 within 1e-12" % total)
        self.registers = regs
        self.probs = arr

    @property
    def names(self):
        return [name for name, _ in self.registers]

    @property
    def sizes(self):
        return tuple(size for _, size in self.registers)

    def axis(self, name):
        for i, (reg, _) in enumerate(self.registers):
            if reg == name:
                return i
        raise KeyError("unknown register %r" % name)

    def axes(self, names):
        return [self.axis(n) for n in names]

    def size_of(self, name):
        return self.registers[self.axis(name)][1]

    def marginal(self, keep):
        """Marginal distribution over the registers in ``keep`` (order kept)."""
        keep = list(keep)
        keep_axes = self.axes(keep)
        drop = tuple(i for i in range(len(self.registers)) if i not in keep_axes)
        arr = self.probs.sum(axis=drop) if drop else self.probs
        # reorder surviving axes to the requested order
        surviving = [i for i in range(len(self.registers)) if i not in drop]
        perm = [surviving.index(a) for a in keep_axes]
        arr = np.transpose(arr, perm)
        regs = [self.registers[a] for a in keep_axes]
        return JointDistribution(regs, arr)

    def grouped(self, target, given):
        """Table reshaped to (|target alphabet|, |given alphabet|).

        Registers outside ``target`` and ``given`` are marginalized out.
        Row index enumerates the joint target alphabet, column index the
        joint given alphabet, both row-major in the listed order.
        """
        target = list(target)
        given = list(given)
        if set(target) & set(given):
            raise ValueError("target and given registers must be disjoint")
        sub = self.marginal(target + given)
        t_size = int(np.prod([sub.size_of(n) for n in target])) if target else 1
        g_size = int(np.prod([sub.size_of(n) for n in given])) if given else 1
        return sub.probs.reshape(t_size, g_size)

    def with_register(self, name, size, values):
        """Append a register whose value is a deterministic function of the cell.

        ``values`` is an integer array of shape ``self.probs.shape`` giving the
        new register's value in each cell.
        """
        if name in self.names:
            raise ValueError("register %r already present" % name)
        values = np.asarray(values)
        if values.shape != self.probs.shape:
            raise ValueError("values must match the table shape")
        if values.min() < 0 or values.max() >= size:
            raise ValueError("values out of range for size %d" % size)
        arr = np.zeros(self.probs.shape + (size,), dtype=float)
        idx = np.indices(self.probs.shape)
        arr[tuple(idx) + (values,)] = self.probs
        return JointDistribution(self.registers + [(name, size)], arr)

    def to_json(self):
        return json.dumps({
            "registers": [{"name": n, "size": s} for n, s in self.registers],
            "probs": self.probs.reshape(-1).tolist(),
        })

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        regs = [(r["name"], r["size"]) for r in data["registers"]]
        return cls(regs, data["probs"])

    def __repr__(self):
        regs = ", ".join("%s:%d" % (n, s) for n, s in self.registers)
        return "JointDistribution(%s)" % regs


@dataclass
class SubDistribution:
    """A table dominated entrywise by a parent distribution.

    Produced by smoothing: at most ``deficit`` total mass has been removed
    from the parent, so ``mass = 1 - deficit_spent``.
    """

    registers: list
    probs: np.ndarray
    mass: float

    def validate_against(self, parent, tol=1e-9):
        if self.probs.shape != parent.probs.shape:
            raise ValueError("shape mismatch with parent")
        if np.any(self.probs < -tol) or np.any(self.probs > parent.probs + tol):
            raise ValueError("sub-distribution not dominated by parent")
        if abs(self.probs.sum() - self.mass) > tol:
            raise ValueError("mass does not match table sum")
