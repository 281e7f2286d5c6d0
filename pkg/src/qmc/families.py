"""Parametric families of tripartite states with closed-form reference values.

Each generator returns a :class:`FamilyPoint` bundling the state with the
entropies and distance bounds known analytically for it, so tests and scans
can compare numerics against exact targets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .entropy import conditional_entropy as _qcond
from .linalg import PureState, TripartiteState, random_density, rng_from
from .markov import Decomposition, povm_decomposition, relent_via_formula


def binary_entropy(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability out of range: {p}")
    h = 0.0
    if 0.0 < p:
        h -= p * math.log2(p)
    if p < 1.0:
        h -= (1.0 - p) * math.log2(1.0 - p)
    return h


@dataclass(frozen=True)
class FamilyPoint:
    """A family member with its analytically known quantities.

    ``closed_forms`` holds whichever of S_A, S_B, cmi, delta_lower,
    delta_upper the family provides in closed form; recomputing them from
    ``state`` with the entropy module reproduces them to ~1e-12.
    """

    state: PureState | TripartiteState
    closed_forms: dict[str, float]
    parameters: dict

    def tripartite(self) -> TripartiteState:
        if isinstance(self.state, TripartiteState):
            return self.state
        return self.state.to_tripartite()


def psi_x(x: float) -> FamilyPoint:
    """Three-qubit family (|phi_x, 0, phi_x> + |phi_-x, 1, phi_-x>)/sqrt(2)
    with phi_x = sqrt(1-x^2)|0> + x|1>.

    The AC marginal is supported on the symmetric subspace, which pins the
    Markov distance between S_A and 2 S_A while I(A:C|B) = 2 S_A - S_B can be
    made arbitrarily smaller as x -> 0.
    """
    if not 0.0 < x < 1.0:
        raise ValueError(f"x must lie in (0, 1), got {x}")
    y = math.sqrt(1.0 - x * x)
    phi_p = np.array([y, x], dtype=complex)
    phi_m = np.array([y, -x], dtype=complex)
    vec = np.zeros((2, 2, 2), dtype=complex)
    vec[:, 0, :] = np.outer(phi_p, phi_p) / math.sqrt(2.0)
    vec[:, 1, :] = np.outer(phi_m, phi_m) / math.sqrt(2.0)
    state = PureState(vec.reshape(-1), (2, 2, 2))
    s_a = binary_entropy(x * x)
    y4x4 = y**4 + x**4
    two_x2y2 = 2.0 * x * x * y * y
    s_b = -(y4x4 * math.log2(y4x4)) - two_x2y2 * math.log2(two_x2y2)
    cmi = 2.0 * s_a - s_b
    forms = {
        "S_A": s_a,
        "S_B": s_b,
        "cmi": cmi,
        "delta_lower": s_a,
        "delta_upper": 2.0 * s_a,
    }
    return FamilyPoint(state, forms, {"x": x})


def symmetric_subspace_basis(d: int) -> list[np.ndarray]:
    """Ordered orthonormal basis of the symmetric subspace of C^d (x) C^d:
    |ii> ascending, then (|ij> + |ji>)/sqrt(2) in lexicographic order."""
    basis = []
    for i in range(d):
        m = np.zeros((d, d), dtype=complex)
        m[i, i] = 1.0
        basis.append(m)
    for i in range(d):
        for j in range(i + 1, d):
            m = np.zeros((d, d), dtype=complex)
            m[i, j] = m[j, i] = 1.0 / math.sqrt(2.0)
            basis.append(m)
    return basis


def zeta_d(d: int, dim_budget: int = 4096) -> FamilyPoint:
    """Purification of the maximally mixed state on the symmetric subspace of
    A (x) C, with B the purifying system of dimension d(d+1)/2.

    I(A:C|B) = 1 + log2(d/(d+1)) stays below one bit for every d, while the
    Markov distance is at least log2(d): the gap grows without bound.
    """
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")
    m = d * (d + 1) // 2
    if d * m * d > dim_budget:
        raise ValueError(f"total dimension {d * m * d} exceeds budget {dim_budget}")
    vec = np.zeros((d, m, d), dtype=complex)
    for k, s in enumerate(symmetric_subspace_basis(d)):
        vec[:, k, :] = s / math.sqrt(m)
    state = PureState(vec.reshape(-1), (d, m, d))
    forms = {
        "S_A": math.log2(d),
        "S_B": math.log2(m),
        "cmi": 1.0 + math.log2(d / (d + 1.0)),
        "delta_lower": math.log2(d),
        "delta_upper": 2.0 * math.log2(d),
    }
    return FamilyPoint(state, forms, {"d": d})


def cq_ensemble(probs, pure_states, dims=None) -> FamilyPoint:
    """Classical-quantum family sum_j p_j |j><j|_A (x) |psi_j><psi_j|_B (x) |j><j|_C.

    A and C are perfectly correlated classical copies of the ensemble label;
    all quantum structure sits in the B states.
    """
    p = np.asarray(probs, dtype=float).reshape(-1)
    if p.size < 1 or p.min() < -1e-12 or abs(p.sum() - 1.0) > 1e-10:
        raise ValueError("probs must be a probability distribution")
    p = np.clip(p, 0.0, None)
    states = [np.asarray(v, dtype=complex).reshape(-1) for v in pure_states]
    if len(states) != p.size:
        raise ValueError(f"{p.size} probabilities but {len(states)} states")
    d_b = states[0].size
    for i, v in enumerate(states):
        if v.size != d_b:
            raise ValueError(f"state {i} has dimension {v.size}, expected {d_b}")
        n = np.linalg.norm(v)
        if abs(n - 1.0) > 1e-10:
            raise ValueError(f"state {i} is not normalized: |psi| = {n:.12g}")
    k = p.size
    if dims is not None:
        dims = tuple(int(x) for x in dims)
        if dims != (k, d_b, k):
            raise ValueError(f"dims {dims} incompatible with {k} labels on B of dimension {d_b}")
    mat = np.zeros((k, d_b, k, k, d_b, k), dtype=complex)
    for j, (pj, v) in enumerate(zip(p, states)):
        mat[j, :, j, j, :, j] = pj * np.outer(v, v.conj())
    side = k * d_b * k
    state = TripartiteState(mat.reshape(side, side), (k, d_b, k))
    h_p = float(-(p[p > 0] @ np.log2(p[p > 0])))
    forms = {"S_A": h_p}
    return FamilyPoint(state, forms, {"probs": tuple(p.tolist()), "dim_b": d_b})


def cq_information_distance(point: FamilyPoint, povm) -> tuple[float, float]:
    """Distance to the Markov state induced by measuring B, two ways.

    Returns ``(via_blocks, via_entropies)``: the closed-form block distance
    for the measurement's decomposition, and S(A|K) + S(K|A) evaluated on the
    classical joint P(j, k) = p_j <psi_j| M_k |psi_j>.  The two agree for
    classical-quantum states.
    """
    state = point.tripartite()
    dec: Decomposition = povm_decomposition(povm)
    via_blocks = relent_via_formula(state, dec)

    p = np.asarray(point.parameters["probs"], dtype=float)
    k = p.size
    d_b = state.dims[1]
    rho_b_blocks = state.matrix.reshape(k, d_b, k, k, d_b, k)
    joint = np.zeros((k, len(povm)))
    for j in range(k):
        psi_block = rho_b_blocks[j, :, j, j, :, j]
        for m_idx, m in enumerate(povm):
            joint[j, m_idx] = np.trace(psi_block @ np.asarray(m)).real
    joint = np.clip(joint, 0.0, None)
    joint /= joint.sum()
    pj = joint.sum(axis=1)
    pk = joint.sum(axis=0)
    mask = joint > 0
    h_joint = float(-(joint[mask] * np.log2(joint[mask])).sum())
    h_j = float(-(pj[pj > 0] @ np.log2(pj[pj > 0])))
    h_k = float(-(pk[pk > 0] @ np.log2(pk[pk > 0])))
    via_entropies = (h_joint - h_k) + (h_joint - h_j)
    return via_blocks, via_entropies


def random_tripartite(dims, rank: int, seed) -> TripartiteState:
    """Ginibre-induced random state on the given tripartite dimensions."""
    dims = tuple(int(d) for d in dims)
    if len(dims) != 3:
        raise ValueError(f"need three dimensions, got {dims}")
    side = int(np.prod(dims))
    return TripartiteState(random_density(side, rank, seed), dims)


def random_pure_tripartite(dims, seed) -> PureState:
    """Haar-random pure state on the given tripartite dimensions."""
    dims = tuple(int(d) for d in dims)
    rng = rng_from(seed)
    side = int(np.prod(dims))
    v = rng.standard_normal(side) + 1j * rng.standard_normal(side)
    return PureState(v / np.linalg.norm(v), dims)
