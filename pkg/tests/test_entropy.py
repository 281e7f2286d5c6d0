import math

import numpy as np
import pytest

import qmc
from qmc.entropy import EntropyReport
from qmc.linalg import rng_from
from conftest import ket

H2_QUARTER = 0.8112781244591328  # binary entropy of 1/4
BELL = np.outer(ket(1, 0, 0, 1), ket(1, 0, 0, 1).conj())


# ---------------------------------------------------------------------------
# von Neumann entropy


@pytest.mark.parametrize("d", [2, 3, 7])
def test_entropy_maximally_mixed(d):
    assert abs(qmc.von_neumann_entropy(np.eye(d) / d) - math.log2(d)) < 1e-12


def test_entropy_pure_state():
    v = ket(1, 1j, 0.5)
    assert qmc.von_neumann_entropy(np.outer(v, v.conj())) < 1e-12


def test_entropy_of_psi_half_marginal():
    st = qmc.psi_x(0.5).tripartite()
    rho_a = qmc.partial_trace(st.matrix, st.dims, (0,))
    assert abs(qmc.von_neumann_entropy(rho_a) - H2_QUARTER) < 1e-12


def test_entropy_range_and_unitary_invariance(rng):
    for _ in range(20):
        d = int(rng.integers(2, 7))
        rho = qmc.random_density(d, int(rng.integers(1, d + 1)), rng)
        s = qmc.von_neumann_entropy(rho)
        assert -1e-12 <= s <= math.log2(d) + 1e-9
        u = qmc.random_haar_isometry(d, d, rng)
        assert abs(qmc.von_neumann_entropy(u @ rho @ u.conj().T) - s) < 1e-10


def test_entropy_rejects_invalid():
    with pytest.raises(ValueError):
        qmc.von_neumann_entropy(np.eye(3))


# ---------------------------------------------------------------------------
# relative entropy


def test_relent_self_is_zero(rng):
    rho = qmc.random_density(5, 3, rng)
    rep = qmc.quantum_relative_entropy(rho, rho)
    assert rep.finite
    assert abs(rep.value) < 1e-10


def test_relent_pure_vs_mixed():
    rep = qmc.quantum_relative_entropy(np.diag([1.0, 0.0]), np.eye(2) / 2)
    assert rep.finite
    assert abs(rep.value - 1.0) < 1e-12


def test_relent_equals_mutual_information(rng):
    for _ in range(10):
        rho = qmc.random_density(4, 4, rng)
        marg_a = qmc.partial_trace(rho, (2, 2), (0,))
        marg_b = qmc.partial_trace(rho, (2, 2), (1,))
        rep = qmc.quantum_relative_entropy(rho, np.kron(marg_a, marg_b))
        assert abs(rep.value - qmc.mutual_information(rho, (2, 2), (0,))) < 1e-9


def test_relent_support_sentinel():
    rep = qmc.quantum_relative_entropy(np.diag([1.0, 0.0]), np.diag([0.0, 1.0]))
    assert not rep.finite
    assert rep.value == math.inf
    assert rep.support_defect > 0.9


def test_relent_zero_iff_equal(rng):
    rho = qmc.random_density(3, 3, rng)
    sigma = qmc.random_density(3, 3, rng)
    rep = qmc.quantum_relative_entropy(rho, sigma)
    assert rep.value > 1e-4  # random pairs are far apart
    assert isinstance(rep, EntropyReport)


def test_relent_shape_mismatch():
    with pytest.raises(ValueError, match="shape"):
        qmc.quantum_relative_entropy(np.eye(2) / 2, np.eye(3) / 3)


# ---------------------------------------------------------------------------
# mutual information / conditional entropy


def test_mutual_information_product(rng):
    a = qmc.random_density(2, 2, rng)
    b = qmc.random_density(3, 3, rng)
    assert abs(qmc.mutual_information(np.kron(a, b), (2, 3), (0,))) < 1e-10


def test_bell_pair_values():
    assert abs(qmc.mutual_information(BELL, (2, 2), (0,)) - 2.0) < 1e-10
    assert abs(qmc.conditional_entropy(BELL, (2, 2), (0,), (1,)) + 1.0) < 1e-10


def test_mutual_information_nonnegative(rng):
    for _ in range(100):
        rho = qmc.random_density(4, int(rng.integers(1, 5)), rng)
        assert qmc.mutual_information(rho, (2, 2), (0,)) >= -1e-9


def test_mutual_information_rejects_bad_cut():
    with pytest.raises(ValueError):
        qmc.mutual_information(np.eye(4) / 4, (2, 2), (0, 1))
    with pytest.raises(ValueError):
        qmc.conditional_entropy(np.eye(4) / 4, (2, 2), (0,), (0,))


# ---------------------------------------------------------------------------
# conditional mutual information


def test_cmi_zero_on_markov_states(rng):
    from qmc.verify import _random_markov_state

    for shape in (((2, 2),), ((1, 1), (1, 1))):
        st = qmc.assemble(_random_markov_state(rng, shape))
        assert abs(qmc.conditional_mutual_information(st)) < 1e-9


def test_cmi_zeta2():
    st = qmc.zeta_d(2).tripartite()
    assert abs(qmc.conditional_mutual_information(st) - (1.0 + math.log2(2.0 / 3.0))) < 1e-9


def test_cmi_psi_at_symmetric_point():
    st = qmc.psi_x(1.0 / math.sqrt(2.0)).tripartite()
    assert abs(qmc.conditional_mutual_information(st) - 1.0) < 1e-9


def test_cmi_strong_subadditivity(rng):
    for _ in range(100):
        st = qmc.random_tripartite((2, 2, 2), int(rng.integers(1, 9)), rng)
        assert qmc.conditional_mutual_information(st) >= -1e-9


def test_cmi_additive_over_tensor_products(rng):
    s1 = qmc.random_tripartite((2, 2, 2), 3, rng)
    s2 = qmc.random_tripartite((2, 2, 2), 5, rng)
    prod = np.kron(s1.matrix, s2.matrix)
    regrouped = qmc.permute_subsystems(prod, (2, 2, 2, 2, 2, 2), (0, 3, 1, 4, 2, 5))
    joint = qmc.TripartiteState(regrouped, (4, 4, 4))
    lhs = qmc.conditional_mutual_information(joint)
    rhs = qmc.conditional_mutual_information(s1) + qmc.conditional_mutual_information(s2)
    assert abs(lhs - rhs) < 1e-9


# ---------------------------------------------------------------------------
# continuity bounds


def test_bound_formulas():
    eps, d = 0.1, 4
    assert abs(qmc.fannes_bound(eps, d) - (-eps * math.log2(eps) + eps * 2.0)) < 1e-15
    expected = -2 * eps * math.log2(eps) - 2 * 0.9 * math.log2(0.9) + 4 * eps * 2.0
    assert abs(qmc.alicki_fannes_bound(eps, d) - expected) < 1e-15


def test_bound_domains():
    with pytest.raises(ValueError):
        qmc.fannes_bound(0.5, 2)  # above 1/e
    with pytest.raises(ValueError):
        qmc.fannes_bound(0.0, 2)
    with pytest.raises(ValueError):
        qmc.alicki_fannes_bound(1.5, 2)
    qmc.alicki_fannes_bound(1.0, 2)  # boundary is allowed


def test_fannes_respected(rng):
    for _ in range(100):
        d = int(rng.integers(2, 6))
        rho = qmc.random_density(d, d, rng)
        other = qmc.random_density(d, d, rng)
        t = float(rng.uniform(0, 0.08))
        sigma = (1 - t) * rho + t * other
        eps = qmc.trace_norm(rho - sigma)
        if not 0.0 < eps <= 1.0 / math.e:
            continue
        gap = abs(qmc.von_neumann_entropy(rho) - qmc.von_neumann_entropy(sigma))
        assert gap <= qmc.fannes_bound(eps, d) + 1e-12


def test_pinsker_floor(rng):
    rho = qmc.random_density(4, 4, rng)
    assert qmc.pinsker_floor(rho, rho) == 0.0
    for _ in range(100):
        sigma = qmc.random_density(4, 4, rng)
        rep = qmc.quantum_relative_entropy(rho, sigma)
        assert qmc.pinsker_floor(rho, sigma) <= rep.value + 1e-10


# ---------------------------------------------------------------------------
# nearest pure state


def test_nearest_pure_on_pure_input():
    v = ket(0.3, 0.9, 0.1j)
    ps, dist = qmc.nearest_pure(np.outer(v, v.conj()))
    assert dist < 1e-9
    assert abs(abs(np.vdot(ps.vector, v)) - 1.0) < 1e-9


def test_nearest_pure_reads_spectrum():
    ps, dist = qmc.nearest_pure(np.diag([0.9, 0.1]))
    assert abs(dist - 0.2) < 1e-12
    assert abs(abs(ps.vector[0]) - 1.0) < 1e-12


def test_nearest_pure_within_twice_entropy(rng):
    for _ in range(100):
        d = int(rng.integers(2, 6))
        pure = qmc.random_density(d, 1, rng)
        noise = qmc.random_density(d, d, rng)
        t = float(rng.uniform(0, 0.1))
        rho = (1 - t) * pure + t * noise
        rho = 0.5 * (rho + rho.conj().T)
        s = qmc.von_neumann_entropy(rho)
        if s > 0.5:
            continue
        _, dist = qmc.nearest_pure(rho)
        assert dist <= 2.0 * s + 1e-10
