"""Minimal single-qubit density-matrix simulator.

Covers exactly what the protocol simulations need: conjugate-basis state
preparation, Born-rule measurement, depolarizing noise, and optimal
two-state discrimination.  States are 2x2 complex numpy arrays; basis
values are 0 (computational, "+") or 1 (Hadamard, "x").
"""

import numpy as np

HERMITICITY_TOL = 1e-12

_SQRT_HALF = 1.0 / np.sqrt(2.0)
_BASIS_VECTORS = {
    0: (np.array([1.0, 0.0], dtype=complex),
        np.array([0.0, 1.0], dtype=complex)),
    1: (np.array([_SQRT_HALF, _SQRT_HALF], dtype=complex),
        np.array([_SQRT_HALF, -_SQRT_HALF], dtype=complex)),
}

IDENTITY = np.eye(2, dtype=complex)


def _basis_index(basis):
    if basis in (0, 1):
        return int(basis)
    if basis in ("+", 0.0):
        return 0
    if basis in ("x", "X", "×", 1.0):
        return 1
    raise ValueError("basis must be 0/'+' or 1/'x'")


def bb84_prepare(bit, basis):
    """Projector of the conjugate-coding state |bit> in the given basis."""
    if bit not in (0, 1):
        raise ValueError("bit must be 0 or 1")
    v = _BASIS_VECTORS[_basis_index(basis)][bit]
    return np.outer(v, v.conj())


def validate_state(rho, tol=HERMITICITY_TOL):
    """Check Hermiticity, unit trace and positivity; returns the state."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise ValueError("expected a 2x2 matrix")
    if np.abs(rho - rho.conj().T).max() > tol:
        raise ValueError("state is not Hermitian within tolerance")
    if abs(np.trace(rho).real - 1.0) > tol or abs(np.trace(rho).imag) > tol:
        raise ValueError("state trace must be 1")
    if np.linalg.eigvalsh(rho).min() < -tol:
        raise ValueError("state has a negative eigenvalue")
    return rho


def born_probability(state, basis, outcome):
    """Probability of the given measurement outcome in the given basis."""
    v = _BASIS_VECTORS[_basis_index(basis)][outcome]
    p = (v.conj() @ state @ v).real
    return min(1.0, max(0.0, float(p)))


def measure(state, basis, rng):
    """Sample a measurement outcome with Born probabilities."""
    p1 = born_probability(state, basis, 1)
    return int(rng.random() < p1)


def depolarize(state, r):
    """Keep the state with probability r, else output the maximally mixed one."""
    if not 0.0 <= r <= 1.0:
        raise ValueError("retention r must lie in [0, 1]")
    state = np.asarray(state, dtype=complex)
    out = r * state + (1.0 - r) * 0.5 * IDENTITY
    return 0.5 * (out + out.conj().T)  # re-symmetrize double-precision drift


def helstrom(rho0, rho1, p0=0.5):
    """Best success probability of telling rho0 (prior p0) from rho1.

    1/2 (1 + || p0 rho0 - (1-p0) rho1 ||_1), achieved by measuring the
    sign of the weighted difference.
    """
    if not 0.0 <= p0 <= 1.0:
        raise ValueError("prior must lie in [0, 1]")
    diff = p0 * np.asarray(rho0, dtype=complex) \
        - (1.0 - p0) * np.asarray(rho1, dtype=complex)
    trace_norm = float(np.abs(np.linalg.eigvalsh(0.5 * (diff + diff.conj().T))).sum())
    return 0.5 * (1.0 + trace_norm)


def stored_bit_guess_probability(r, basis=0):
    """Success of the best measurement on a depolarized conjugate-coded bit.

    The adversary stored the qubit (unknown bit, known-later basis); the
    channel shrank it by r.  Equal priors give (1 + r)/2 via the optimal
    discrimination of the two post-channel states.
    """
    rho0 = depolarize(bb84_prepare(0, basis), r)
    rho1 = depolarize(bb84_prepare(1, basis), r)
    return helstrom(rho0, rho1, 0.5)
