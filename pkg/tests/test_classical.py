import math

import numpy as np
import pytest

import qmc
from qmc.classical import ClassicalJoint
from qmc.linalg import rng_from
from qmc.verify import markov_chain_from_conditionals


def chain_x_y_z():
    # X uniform bit, Y = X, Z = Y.
    t = np.zeros((2, 2, 2))
    t[0, 0, 0] = 0.5
    t[1, 1, 1] = 0.5
    return ClassicalJoint(t)


def common_bit():
    # X = Z uniform bit, Y constant.
    t = np.zeros((2, 1, 2))
    t[0, 0, 0] = 0.5
    t[1, 0, 1] = 0.5
    return ClassicalJoint(t)


def brute_force_cmi(p: ClassicalJoint) -> float:
    """Direct triple sum over outcomes; the oracle the fast path is checked against."""
    t = p.table
    nx, ny, nz = t.shape
    p_y = t.sum(axis=(0, 2))
    p_xy = t.sum(axis=2)
    p_yz = t.sum(axis=0)
    total = 0.0
    for x in range(nx):
        for y in range(ny):
            for z in range(nz):
                if t[x, y, z] <= 0:
                    continue
                joint_cond = t[x, y, z] / p_y[y]
                total += t[x, y, z] * math.log2(
                    joint_cond / ((p_xy[x, y] / p_y[y]) * (p_yz[y, z] / p_y[y]))
                )
    return total


def test_cmi_markov_chain_is_zero():
    assert abs(qmc.classical_cmi(chain_x_y_z())) < 1e-12


def test_cmi_common_bit_is_one():
    p = common_bit()
    assert abs(brute_force_cmi(p) - 1.0) < 1e-12
    assert abs(qmc.classical_cmi(p) - 1.0) < 1e-12


def test_cmi_independent_product():
    t = np.full((2, 2, 2), 1.0 / 8.0)
    assert abs(qmc.classical_cmi(ClassicalJoint(t))) < 1e-12


def test_cmi_matches_brute_force(rng):
    for _ in range(25):
        p = qmc.random_joint((3, 2, 3), rng)
        assert abs(qmc.classical_cmi(p) - brute_force_cmi(p)) < 1e-12


def test_closest_markov_fixes_markov_input():
    p = chain_x_y_z()
    q = qmc.closest_markov(p)
    assert np.max(np.abs(q.table - p.table)) < 1e-15


def test_closest_markov_common_bit():
    q = qmc.closest_markov(common_bit())
    assert np.allclose(q.table.reshape(2, 2), np.full((2, 2), 0.25))
    d = qmc.classical_relative_entropy(common_bit(), q)
    assert abs(d.value - 1.0) < 1e-12


@pytest.mark.parametrize("shape", [(2, 2, 2), (3, 3, 3)])
def test_projection_distance_equals_cmi(shape, rng):
    for _ in range(100):
        p = qmc.random_joint(shape, rng)
        q = qmc.closest_markov(p)
        assert qmc.is_markov(q, tol=1e-12)
        d = qmc.classical_relative_entropy(p, q)
        assert d.finite
        assert abs(d.value - qmc.classical_cmi(p)) < 1e-10


def test_projection_idempotent(rng):
    p = qmc.random_joint((2, 3, 2), rng)
    q = qmc.closest_markov(p)
    q2 = qmc.closest_markov(q)
    assert np.max(np.abs(q.table - q2.table)) < 1e-14


def test_relative_entropy_self_and_disjoint():
    p = common_bit()
    assert qmc.classical_relative_entropy(p, p).value == 0.0
    t = np.zeros((2, 1, 2))
    t[0, 0, 1] = 0.5
    t[1, 0, 0] = 0.5
    rep = qmc.classical_relative_entropy(p, ClassicalJoint(t))
    assert not rep.finite
    assert rep.support_defect > 0.9


def test_relative_entropy_alphabet_mismatch():
    with pytest.raises(ValueError, match="alphabet"):
        qmc.classical_relative_entropy(common_bit(), chain_x_y_z())


def test_projection_beats_sampled_markov_chains(rng):
    for _ in range(3):
        p = qmc.random_joint((2, 2, 2), rng)
        best = qmc.classical_relative_entropy(p, qmc.closest_markov(p)).value
        for _ in range(1000):
            q = markov_chain_from_conditionals(
                rng.dirichlet(np.ones(2)),
                rng.dirichlet(np.ones(2), size=2),
                rng.dirichlet(np.ones(2), size=2),
            )
            d = qmc.classical_relative_entropy(p, q)
            if d.finite:
                assert d.value >= best - 1e-12


def test_joint_validation():
    with pytest.raises(ValueError, match="negative"):
        ClassicalJoint(np.array([[[0.6, 0.5]], [[-0.1, 0.0]]]))
    with pytest.raises(ValueError, match="sums"):
        ClassicalJoint(np.full((2, 2, 2), 1.0))
