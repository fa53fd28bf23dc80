import numpy as np
import pytest

from noisystorage.distributions import JointDistribution, SubDistribution


def uniform(registers):
    sizes = [s for _, s in registers]
    n = int(np.prod(sizes))
    return JointDistribution(registers, np.full(n, 1.0 / n))


def test_valid_table_roundtrip():
    d = JointDistribution([("X", 2), ("Y", 3)], [0.1, 0.2, 0.3, 0.1, 0.2, 0.1])
    assert d.sizes == (2, 3)
    again = JointDistribution.from_json(d.to_json())
    assert again.registers == d.registers
    np.testing.assert_allclose(again.probs, d.probs)


def test_rejects_bad_tables():
    with pytest.raises(ValueError):
        JointDistribution([("X", 2)], [0.7, 0.2])  # sums to 0.9
    with pytest.raises(ValueError):
        JointDistribution([("X", 2)], [1.2, -0.2])
    with pytest.raises(ValueError):
        JointDistribution([("X", 2), ("X", 2)], [0.25] * 4)
    with pytest.raises(ValueError):
        JointDistribution([("X", 2 ** 9), ("Y", 2 ** 9)], np.zeros(2 ** 18))


def test_unknown_register():
    d = uniform([("X", 2), ("Y", 2)])
    with pytest.raises(KeyError):
        d.axis("Z")


def test_marginal_orders_registers():
    probs = np.arange(1, 7, dtype=float)
    probs /= probs.sum()
    d = JointDistribution([("X", 2), ("Y", 3)], probs)
    m = d.marginal(["Y"])
    np.testing.assert_allclose(m.probs, d.probs.sum(axis=0))
    swapped = d.marginal(["Y", "X"])
    np.testing.assert_allclose(swapped.probs, d.probs.T)


def test_grouped_rejects_overlap():
    d = uniform([("X", 2), ("Y", 2)])
    with pytest.raises(ValueError):
        d.grouped(["X"], ["X"])


def test_with_register_is_deterministic_extension():
    d = uniform([("X", 2), ("Y", 2)])
    values = np.array([[0, 1], [1, 0]])
    e = d.with_register("P", 2, values)
    assert e.names == ["X", "Y", "P"]
    # mass lands only on the prescribed parity value
    for x in range(2):
        for y in range(2):
            assert e.probs[x, y, values[x, y]] == pytest.approx(0.25)
            assert e.probs[x, y, 1 - values[x, y]] == 0.0
    # marginal over the original registers is unchanged
    np.testing.assert_allclose(e.marginal(["X", "Y"]).probs, d.probs)


def test_sub_distribution_validation():
    d = uniform([("X", 4)])
    q = SubDistribution(list(d.registers), d.probs * 0.5, mass=0.5)
    q.validate_against(d)
    bad = SubDistribution(list(d.registers), d.probs * 2.0, mass=2.0)
    with pytest.raises(ValueError):
        bad.validate_against(d)
