import math
import os

import numpy as np
import pytest

import qmc
from qmc.linalg import rng_from
from qmc.optimize import (
    OptConfig,
    hermitian_from_params,
    isometry_from_params,
    nelder_mead,
    partition_candidates,
)
from qmc.verify import _random_markov_state
from conftest import ket

H2_QUARTER = 0.8112781244591328


# ---------------------------------------------------------------------------
# Nelder-Mead engine


def test_nelder_mead_quadratic():
    target = np.array([1.0, -2.0, 0.5])
    f = lambda x: float(((x - target) ** 2).sum())
    x, fx, iters, converged, hist = nelder_mead(f, np.zeros(3), 0.5, 2000, 1e-12)
    assert converged
    assert fx < 1e-10
    assert np.max(np.abs(x - target)) < 1e-4
    assert np.all(np.diff(hist) <= 0.0 + 1e-18)


def test_nelder_mead_respects_max_iters():
    f = lambda x: float((x**2).sum())
    _, _, iters, converged, _ = nelder_mead(f, np.ones(4), 0.5, 7, 1e-30)
    assert iters == 7
    assert not converged


# ---------------------------------------------------------------------------
# isometry chart


def test_hermitian_packing(rng):
    theta = rng.standard_normal(16)
    h = hermitian_from_params(theta, 4)
    assert np.max(np.abs(h - h.conj().T)) == 0.0
    assert np.allclose(np.diag(h).real, theta[:4])


@pytest.mark.parametrize("n,cols", [(2, 2), (4, 2), (9, 3)])
def test_chart_always_isometric(n, cols, rng):
    base = np.eye(n, cols, dtype=complex)
    for _ in range(5):
        theta = rng.standard_normal(n * n)
        w = isometry_from_params(theta, base)
        assert np.max(np.abs(w.conj().T @ w - np.eye(cols))) < 1e-10


def test_chart_identity_at_origin():
    base = qmc.random_haar_isometry(2, 4, 3)
    w = isometry_from_params(np.zeros(16), base)
    assert np.max(np.abs(w - base)) < 1e-12


# ---------------------------------------------------------------------------
# OptConfig


def test_config_validation():
    with pytest.raises(ValueError):
        OptConfig(restarts=0)
    with pytest.raises(ValueError):
        OptConfig(tol=0.0)
    with pytest.raises(ValueError):
        OptConfig(shape_mode="magic")
    with pytest.raises(ValueError):
        OptConfig(simplex_scale=-1.0)


# ---------------------------------------------------------------------------
# minimize_delta


def test_markov_states_reach_zero(rng):
    shapes = [((2, 2),), ((1, 1), (1, 1)), ((2, 1), (1, 2))]
    cfg = OptConfig(restarts=2, max_iters=300, seed=7)
    for shape in shapes:
        st = qmc.assemble(_random_markov_state(rng, shape))
        res = qmc.minimize_delta(st, cfg)
        assert res.value <= 1e-6
        assert res.lower_bound <= 1e-8


def test_psi_sandwich_and_feasibility():
    fp = qmc.psi_x(0.5)
    st = fp.tripartite()
    res = qmc.minimize_delta(st, OptConfig(restarts=2, max_iters=800, seed=0))
    assert fp.closed_forms["delta_lower"] - 1e-3 <= res.value <= fp.closed_forms["delta_upper"] + 1e-3
    # the reported decomposition reproduces the reported value
    assert abs(qmc.relent_via_formula(st, res.decomposition) - res.value) < 1e-8
    assert res.value >= res.lower_bound - 1e-6


def test_deterministic_given_seed():
    st = qmc.random_tripartite((2, 2, 2), 5, 3)
    cfg = OptConfig(restarts=2, max_iters=250, seed=11)
    r1 = qmc.minimize_delta(st, cfg)
    r2 = qmc.minimize_delta(st, cfg)
    assert r1.value == r2.value
    assert r1.trace == r2.trace
    assert np.array_equal(r1.decomposition.isometry, r2.decomposition.isometry)


def test_threaded_matches_serial():
    st = qmc.random_tripartite((2, 2, 2), 5, 3)
    cfg = OptConfig(restarts=3, max_iters=150, seed=11)
    old = os.environ.get("QMC_THREADS")
    try:
        os.environ["QMC_THREADS"] = "1"
        serial = qmc.minimize_delta(st, cfg)
        os.environ["QMC_THREADS"] = "3"
        threaded = qmc.minimize_delta(st, cfg)
    finally:
        if old is None:
            os.environ.pop("QMC_THREADS", None)
        else:
            os.environ["QMC_THREADS"] = old
    assert serial.value == threaded.value
    assert serial.trace == threaded.trace


def test_trace_shape_and_convergence_flag():
    st = qmc.random_tripartite((2, 2, 2), 4, 0)
    res = qmc.minimize_delta(st, OptConfig(restarts=2, max_iters=200, seed=0))
    assert res.converged
    ids = [rid for rid, _, _ in res.trace]
    assert ids == list(range(len(ids)))
    for _, val, iters in res.trace:
        assert val >= res.value - 1e-12
        assert iters <= 200


def test_dimension_cap_enforced():
    st = qmc.random_tripartite((2, 5, 2), 3, 1)
    with pytest.raises(ValueError, match="dimension cap"):
        qmc.minimize_delta(st, OptConfig(shape_mode="full"))
    # trivial mode fits: block space is 25 <= 256
    res = qmc.minimize_delta(st, OptConfig(shape_mode="trivial", restarts=1, max_iters=5, seed=0))
    assert res.value >= res.lower_bound - 1e-6


def test_full_mode_on_qubit_b():
    st = qmc.psi_x(0.5).tripartite()
    res = qmc.minimize_delta(st, OptConfig(shape_mode="full", restarts=1, max_iters=100, seed=0))
    assert res.decomposition.summands == ((2, 2),) * 4
    assert res.value >= res.lower_bound - 1e-6


# ---------------------------------------------------------------------------
# minimize_ep


def test_ep_pure_product():
    v = np.kron(ket(1, 1), ket(1, 0))
    res = qmc.minimize_ep(np.outer(v, v.conj()), (2, 2), OptConfig(seed=0))
    assert res.value < 1e-9
    assert res.converged


def test_ep_bell_state():
    v = ket(1, 0, 0, 1)
    res = qmc.minimize_ep(np.outer(v, v.conj()), (2, 2), OptConfig(seed=0))
    assert abs(res.value - 1.0) < 1e-9
    assert res.lower_bound <= res.value + 1e-9


def test_ep_symmetric_projector():
    swap = np.zeros((4, 4))
    swap[0, 0] = swap[3, 3] = 1.0
    swap[1, 2] = swap[2, 1] = 1.0
    res = qmc.minimize_ep((np.eye(4) + swap) / 6, (2, 2), OptConfig(restarts=3, max_iters=2000, seed=0))
    assert abs(res.value - 1.0) < 1e-3


def test_ep_rejects_mismatched_dims():
    with pytest.raises(ValueError, match="side"):
        qmc.minimize_ep(np.eye(4) / 4, (2, 3), OptConfig(seed=0))


# ---------------------------------------------------------------------------
# pure_delta


def test_pure_delta_product_state():
    psi = qmc.PureState(np.kron(ket(1, 1), np.kron(ket(1, 0), ket(0, 1))), (2, 2, 2))
    res = qmc.pure_delta(psi, OptConfig(restarts=2, max_iters=300, seed=0))
    assert res.value < 1e-6


def test_pure_delta_agrees_with_minimize_delta():
    fp = qmc.psi_x(0.5)
    cfg = OptConfig(restarts=2, max_iters=800, seed=0)
    res_p = qmc.pure_delta(fp.state, cfg)
    res_d = qmc.minimize_delta(fp.tripartite(), cfg)
    assert abs(res_p.value - res_d.value) < 2e-3
    # reconstructed decomposition reproduces the pure-route value
    assert abs(qmc.relent_via_formula(fp.tripartite(), res_p.decomposition) - res_p.value) < 1e-8


def test_pure_delta_rejects_mixed_input():
    st = qmc.random_tripartite((2, 2, 2), 4, 0)
    with pytest.raises(ValueError, match="pure"):
        qmc.pure_delta(st, OptConfig(seed=0))


def test_pure_delta_accepts_pure_density():
    st = qmc.psi_x(0.3).tripartite()
    res = qmc.pure_delta(st, OptConfig(restarts=1, max_iters=200, seed=0))
    assert res.value >= res.lower_bound - 1e-6


def test_partition_candidates_qubit():
    parts = partition_candidates(2)
    assert (2,) in parts
    assert (1, 1) in parts
    assert all(sum(p) >= 2 for p in parts)
    assert all(max(p) <= 2 for p in parts)


# ---------------------------------------------------------------------------
# certified_gap


def test_certified_gap_markov(rng):
    st = qmc.assemble(_random_markov_state(rng, ((2, 2),)))
    lo, hi = qmc.certified_gap(st, OptConfig(restarts=2, max_iters=300, seed=0))
    assert abs(lo) < 1e-8
    assert hi < 1e-6


def test_certified_gap_zeta2():
    st = qmc.zeta_d(2).tripartite()
    lo, hi = qmc.certified_gap(st, OptConfig(restarts=2, max_iters=800, seed=0))
    assert abs(lo - 0.4150374992788437) < 1e-9
    assert hi >= 0.999
    assert lo <= hi + 1e-6
