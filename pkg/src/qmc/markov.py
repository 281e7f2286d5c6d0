"""Quantum Markov chain structure on tripartite systems.

A state mu_ABC has I(A:C|B) = 0 exactly when B decomposes into a direct sum of
tensor products, B = (+)_j bL_j (x) bR_j, with

    mu = (+)_j  q_j  sigma^(j)_{A bL_j} (x) chi^(j)_{bR_j C}.

:class:`Decomposition` carries such a block structure as a shape list plus an
isometry W embedding the original B into the decomposed space (possibly larger
than B, which only enlarges the family of Markov states available).  For a
fixed decomposition the closest Markov state to rho in relative entropy is
obtained by pinching rho into the blocks and tensor-factoring each block into
its two marginals; the distance has the closed form

    D = -S(rho) + H(q) + sum_j q_j [ S(sigma^(j)) + S(chi^(j)) ].

Weights below ``WEIGHT_TOL`` are dropped from all entropy sums (0 log 0 = 0).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend
from .entropy import (
    _clamp_spectrum,
    _entropy_matrix,
    entropy_from_eigs,
    mutual_information,
    quantum_relative_entropy,
)
from .linalg import (
    TOL_HERM,
    TOL_PSD,
    TripartiteState,
    _conjugate_axis,
    check_density,
    check_isometry,
    random_haar_isometry,
    rng_from,
)

WEIGHT_TOL = 1e-12
POVM_SUM_TOL = 1e-9


@dataclass(frozen=True)
class Decomposition:
    """Direct-sum-of-tensor-products shape for B, with its embedding isometry.

    ``summands`` lists the block shapes (dim bL_j, dim bR_j); ``isometry`` maps
    the original B (dimension = number of columns) into the stacked block
    space (dimension = sum of dL_j * dR_j).  Block j occupies the contiguous
    index range starting at offset sum_{i<j} dL_i * dR_i.

    Searching over all decompositions with at most d_B^2 blocks of side at
    most d_B each is sufficient to reach the global minimum distance, which is
    why those caps are enforced here.
    """

    summands: tuple[tuple[int, int], ...]
    isometry: np.ndarray

    def __post_init__(self):
        summands = tuple((int(l), int(r)) for l, r in self.summands)
        if not summands:
            raise ValueError("decomposition needs at least one summand")
        w = check_isometry(self.isometry, "decomposition isometry")
        d_b = w.shape[1]
        total = sum(l * r for l, r in summands)
        if w.shape[0] != total:
            raise ValueError(
                f"isometry has {w.shape[0]} rows but summands {summands} span {total}"
            )
        if total < d_b:
            raise ValueError(f"block space {total} cannot embed B of dimension {d_b}")
        if len(summands) > d_b * d_b:
            raise ValueError(f"{len(summands)} summands exceeds the cap {d_b * d_b}")
        for l, r in summands:
            if l < 1 or r < 1:
                raise ValueError(f"summand dims must be positive, got ({l}, {r})")
            if l > d_b or r > d_b:
                raise ValueError(f"summand ({l}, {r}) exceeds the per-factor cap {d_b}")
        w = np.array(w)
        w.setflags(write=False)
        object.__setattr__(self, "summands", summands)
        object.__setattr__(self, "isometry", w)

    @property
    def dim_b(self) -> int:
        return self.isometry.shape[1]

    @property
    def total_dim(self) -> int:
        return self.isometry.shape[0]

    @property
    def block_dims(self) -> tuple[int, ...]:
        return tuple(l * r for l, r in self.summands)

    @property
    def offsets(self) -> tuple[int, ...]:
        offs = []
        acc = 0
        for n in self.block_dims:
            offs.append(acc)
            acc += n
        return tuple(offs)


def trivial_decomposition(d_b: int) -> Decomposition:
    """Single block bL = B, bR = C^1 (no dephasing, no splitting)."""
    return Decomposition(((d_b, 1),), np.eye(d_b, dtype=complex))


@dataclass(frozen=True)
class MarkovState:
    """Weights and per-block tensor factors of a quantum Markov chain state.

    ``left[j]`` lives on A (x) bL_j and ``right[j]`` on bR_j (x) C, with block
    shapes taken from ``decomposition``.
    """

    weights: np.ndarray
    left: tuple[np.ndarray, ...]
    right: tuple[np.ndarray, ...]
    decomposition: Decomposition

    def __post_init__(self):
        q = np.asarray(self.weights, dtype=float).reshape(-1)
        k = len(self.decomposition.summands)
        if q.size != k or len(self.left) != k or len(self.right) != k:
            raise ValueError(
                f"expected {k} weights and components, got {q.size}/{len(self.left)}/{len(self.right)}"
            )
        if q.min(initial=0.0) < -WEIGHT_TOL:
            raise ValueError(f"negative weight {q.min():.3e}")
        q = np.clip(q, 0.0, None)
        if abs(q.sum() - 1.0) > 1e-10:
            raise ValueError(f"weights sum to {q.sum():.12g}, expected 1")
        left = tuple(check_density(m, f"left component {j}") for j, m in enumerate(self.left))
        right = tuple(check_density(m, f"right component {j}") for j, m in enumerate(self.right))
        d_a = self._factor_dim(left, [l for l, _ in self.decomposition.summands], "left")
        d_c = self._factor_dim(right, [r for _, r in self.decomposition.summands], "right")
        q.setflags(write=False)
        object.__setattr__(self, "weights", q)
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)
        object.__setattr__(self, "_dim_a", d_a)
        object.__setattr__(self, "_dim_c", d_c)

    @staticmethod
    def _factor_dim(mats, block_factors, what):
        outer = None
        for m, f in zip(mats, block_factors):
            side = m.shape[0]
            if side % f:
                raise ValueError(f"{what} component side {side} not divisible by factor {f}")
            d = side // f
            if outer is None:
                outer = d
            elif outer != d:
                raise ValueError(f"{what} components disagree on the outer dimension")
        return outer

    @property
    def dim_a(self) -> int:
        return self._dim_a  # type: ignore[attr-defined]

    @property
    def dim_c(self) -> int:
        return self._dim_c  # type: ignore[attr-defined]


def assemble(m: MarkovState) -> TripartiteState:
    """Lay out (+)_j q_j sigma^(j) (x) chi^(j) block-diagonally on A, B-hat, C."""
    dec = m.decomposition
    d_a, d_c = m.dim_a, m.dim_c
    n = dec.total_dim
    out = np.zeros((d_a, n, d_c, d_a, n, d_c), dtype=complex)
    for j, ((dl, dr), off) in enumerate(zip(dec.summands, dec.offsets)):
        nj = dl * dr
        if m.weights[j] <= 0.0:
            continue
        sig = m.left[j].reshape(d_a, dl, d_a, dl)
        chi = m.right[j].reshape(dr, d_c, dr, d_c)
        block = np.einsum("albm,rcsd->alrcbmsd", sig, chi).reshape(d_a, nj, d_c, d_a, nj, d_c)
        out[:, off : off + nj, :, :, off : off + nj, :] = m.weights[j] * block
    side = d_a * n * d_c
    return TripartiteState(out.reshape(side, side), (d_a, n, d_c))


def embed_state(rho: TripartiteState, d: Decomposition) -> TripartiteState:
    """Carry rho into the decomposed space by conjugating B with the isometry."""
    if d.dim_b != rho.dims[1]:
        raise ValueError(f"decomposition is for d_B = {d.dim_b}, state has d_B = {rho.dims[1]}")
    mat, dims = _conjugate_axis(rho.matrix, rho.dims, d.isometry, 1)
    return TripartiteState(mat, dims)  # type: ignore[arg-type]


def pinch_blocks(m: np.ndarray, dims: tuple[int, int, int], block_dims) -> np.ndarray:
    """Zero every middle-register matrix element connecting different blocks."""
    d_a, n, d_c = dims
    t = np.asarray(m, dtype=complex).reshape(d_a, n, d_c, d_a, n, d_c)
    out = np.zeros_like(t)
    off = 0
    for nj in block_dims:
        sl = slice(off, off + nj)
        out[:, sl, :, :, sl, :] = t[:, sl, :, :, sl, :]
        off += nj
    if off != n:
        raise ValueError(f"block dims sum to {off}, middle register has dimension {n}")
    side = d_a * n * d_c
    return out.reshape(side, side)


def _extract_block(rho6: np.ndarray, wj: np.ndarray):
    """Unnormalized block (1 (x) W_j (x) 1) rho (1 (x) W_j^dag (x) 1) and its weight."""
    t = np.tensordot(wj, rho6, axes=(1, 1))            # (p, a, c, a', n, c')
    t = np.tensordot(t, wj.conj(), axes=(4, 1))        # (p, a, c, a', c', q)
    t = t.transpose(1, 0, 2, 3, 5, 4)                  # (a, p, c, a', q, c')
    d_a, nj, d_c = t.shape[:3]
    side = d_a * nj * d_c
    q = float(np.trace(t.reshape(side, side)).real)
    return t, q


def _block_marginals(t: np.ndarray, dl: int, dr: int):
    """Reduced matrices of a block tensor on (A, bL) and on (bR, C)."""
    d_a, nj, d_c = t.shape[:3]
    t8 = t.reshape(d_a, dl, dr, d_c, d_a, dl, dr, d_c)
    sig = np.trace(np.trace(t8, axis1=3, axis2=7), axis1=2, axis2=5)
    chi = np.trace(np.trace(t8, axis1=0, axis2=4), axis1=0, axis2=3)
    return sig.reshape(d_a * dl, d_a * dl), chi.reshape(dr * d_c, dr * d_c)


def summand_arrays(summands):
    """Shape list as the flat int arrays the compiled kernel takes."""
    dls = np.array([l for l, _ in summands], dtype=np.int64)
    drs = np.array([r for _, r in summands], dtype=np.int64)
    offs = np.zeros(len(summands), dtype=np.int64)
    acc = 0
    for i, (l, r) in enumerate(summands):
        offs[i] = acc
        acc += l * r
    return dls, drs, offs


def kernel_layout(rho6: np.ndarray) -> np.ndarray:
    """State tensor rearranged to the (d_B, K d_B) layout of the hot kernel."""
    d_b = rho6.shape[1]
    return np.ascontiguousarray(rho6.transpose(1, 0, 2, 3, 5, 4)).reshape(d_b, -1)


def _relent_core_numpy(rho6: np.ndarray, summands, w: np.ndarray, s_rho: float) -> float:
    val = -s_rho
    off = 0
    for dl, dr in summands:
        nj = dl * dr
        t, q = _extract_block(rho6, w[off : off + nj])
        off += nj
        if q <= WEIGHT_TOL:
            continue
        sig, chi = _block_marginals(t, dl, dr)
        s_sig = entropy_from_eigs(_clamp_spectrum(backend.eigvalsh(sig / q)))
        s_chi = entropy_from_eigs(_clamp_spectrum(backend.eigvalsh(chi / q)))
        val += q * (s_sig + s_chi) - q * np.log2(q)
    return float(val)


def relent_core(rho6: np.ndarray, summands, w: np.ndarray, s_rho: float) -> float:
    """Distance formula -S(rho) + H(q) + sum_j q_j (S(sigma_j) + S(chi_j)).

    ``rho6`` is the state reshaped to (dA, dB, dC, dA, dB, dC); no validation
    happens here -- this is the optimizer's objective.  Dispatches to the
    compiled kernel when the numba backend is active.
    """
    if backend.active_backend() == "numba":
        from . import _kernels

        dls, drs, offs = summand_arrays(summands)
        return float(
            _kernels.relent_eval(
                kernel_layout(rho6),
                rho6.shape[0],
                rho6.shape[2],
                dls,
                drs,
                offs,
                np.array(w, dtype=np.complex128, order="C"),
                s_rho,
            )
        )
    return _relent_core_numpy(rho6, summands, w, s_rho)


def project_omega_delta(rho: TripartiteState, d: Decomposition):
    """Block weights q_j and normalized pinched blocks omega^(j).

    Returns ``(q, blocks)``; ``blocks[j]`` is a density matrix on
    A (x) bL_j (x) bR_j (x) C (subsystem dims (d_A, dL_j, dR_j, d_C)), or
    ``None`` for blocks whose weight fell below ``WEIGHT_TOL``.
    """
    if d.dim_b != rho.dims[1]:
        raise ValueError(f"decomposition is for d_B = {d.dim_b}, state has d_B = {rho.dims[1]}")
    d_a, d_b, d_c = rho.dims
    rho6 = rho.matrix.reshape(d_a, d_b, d_c, d_a, d_b, d_c)
    weights = []
    blocks = []
    for (dl, dr), off in zip(d.summands, d.offsets):
        nj = dl * dr
        t, q = _extract_block(rho6, d.isometry[off : off + nj])
        weights.append(q)
        if q <= WEIGHT_TOL:
            blocks.append(None)
        else:
            side = d_a * nj * d_c
            blocks.append(t.reshape(side, side) / q)
    return np.asarray(weights), blocks


def optimal_markov_for_decomposition(rho: TripartiteState, d: Decomposition) -> MarkovState:
    """The closest Markov state with block structure ``d``: weights q_j and
    the per-block tensor factors sigma^(j), chi^(j)."""
    d_a, _, d_c = rho.dims
    q, blocks = project_omega_delta(rho, d)
    left = []
    right = []
    for (dl, dr), blk in zip(d.summands, blocks):
        if blk is None:
            left.append(np.eye(d_a * dl, dtype=complex) / (d_a * dl))
            right.append(np.eye(dr * d_c, dtype=complex) / (dr * d_c))
            continue
        t = blk.reshape(d_a, dl * dr, d_c, d_a, dl * dr, d_c)
        sig, chi = _block_marginals(t, dl, dr)
        left.append(0.5 * (sig + sig.conj().T))
        right.append(0.5 * (chi + chi.conj().T))
    return MarkovState(q, tuple(left), tuple(right), d)


def relent_via_formula(rho: TripartiteState, d: Decomposition) -> float:
    """D(rho || closest Markov state with structure d), by the closed form."""
    if d.dim_b != rho.dims[1]:
        raise ValueError(f"decomposition is for d_B = {d.dim_b}, state has d_B = {rho.dims[1]}")
    d_a, d_b, d_c = rho.dims
    rho6 = rho.matrix.reshape(d_a, d_b, d_c, d_a, d_b, d_c)
    return relent_core(rho6, d.summands, d.isometry, _entropy_matrix(rho.matrix))


def relent_direct(rho: TripartiteState, d: Decomposition) -> float:
    """Same distance, evaluated as a literal relative entropy between the
    embedded state and the assembled Markov state (independent route)."""
    emb = embed_state(rho, d)
    omega = assemble(optimal_markov_for_decomposition(rho, d))
    return quantum_relative_entropy(emb.matrix, omega.matrix).value


def relent_compact(rho: TripartiteState, d: Decomposition) -> float:
    """Same distance again, via -S(rho) + S(J) + S(A bL | J) + S(bR C | J) on
    the explicit block-register state (third independent route)."""
    d_a, _, d_c = rho.dims
    q, blocks = project_omega_delta(rho, d)
    k = len(d.summands)
    dl_max = max(l for l, _ in d.summands)
    dr_max = max(r for _, r in d.summands)
    dims = (k, d_a, dl_max, dr_max, d_c)
    side = int(np.prod(dims))
    omega = np.zeros((side, side), dtype=complex)
    omega_t = omega.reshape(dims + dims)
    for j, ((dl, dr), blk) in enumerate(zip(d.summands, blocks)):
        if blk is None:
            continue
        b = blk.reshape(d_a, dl, dr, d_c, d_a, dl, dr, d_c)
        omega_t[j, :, :dl, :dr, :, j, :, :dl, :dr, :] += q[j] * b
    from .entropy import conditional_entropy, _subsystem_entropy

    s_j = _subsystem_entropy(omega, dims, (0,))
    s_al_j = conditional_entropy(omega, dims, (1, 2), (0,))
    s_rc_j = conditional_entropy(omega, dims, (3, 4), (0,))
    return -_entropy_matrix(rho.matrix) + s_j + s_al_j + s_rc_j


def two_relents_identity(rho: TripartiteState, d: Decomposition):
    """Split the distance into dephasing cost plus in-block correlations.

    Returns ``(lhs, term1, term2)`` with
    lhs   = D(rho || omega[delta, tau])   (closest Markov state, directly),
    term1 = D(rho || omega[delta])        (pinched state, directly),
    term2 = sum_j q_j I(A bL_j : bR_j C)  (per-block mutual information);
    lhs = term1 + term2.
    """
    emb = embed_state(rho, d)
    omega_dt = assemble(optimal_markov_for_decomposition(rho, d))
    lhs = quantum_relative_entropy(emb.matrix, omega_dt.matrix).value
    pinched = pinch_blocks(emb.matrix, emb.dims, d.block_dims)
    term1 = quantum_relative_entropy(emb.matrix, pinched).value
    q, blocks = project_omega_delta(rho, d)
    d_a, _, d_c = rho.dims
    term2 = 0.0
    for (dl, dr), qj, blk in zip(d.summands, q, blocks):
        if blk is None:
            continue
        term2 += qj * mutual_information(blk, (d_a, dl, dr, d_c), (0, 1))
    return lhs, term1, float(term2)


def povm_decomposition(elements) -> Decomposition:
    """Decomposition realizing a POVM measurement on B.

    Stacks sqrt(M_k) row-blocks into an isometry B -> (+)_k B, one (d_B, 1)
    summand per outcome, so pinching into the blocks is exactly the
    measurement followed by recording the outcome.
    """
    mats = [np.asarray(m, dtype=complex) for m in elements]
    if not mats:
        raise ValueError("need at least one POVM element")
    d_b = mats[0].shape[0]
    total = np.zeros((d_b, d_b), dtype=complex)
    roots = []
    for i, m in enumerate(mats):
        if m.shape != (d_b, d_b):
            raise ValueError(f"POVM element {i} has shape {m.shape}, expected ({d_b}, {d_b})")
        if np.max(np.abs(m - m.conj().T)) > TOL_HERM:
            raise ValueError(f"POVM element {i} is not Hermitian")
        w, v = backend.eigh(m)
        if w[-1] < -TOL_PSD:
            raise ValueError(f"POVM element {i} has negative eigenvalue {w[-1]:.3e}")
        roots.append((v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T)
        total += m
    if np.max(np.abs(total - np.eye(d_b))) > POVM_SUM_TOL:
        raise ValueError("POVM elements do not sum to the identity")
    w_stack = np.vstack(roots)
    return Decomposition(((d_b, 1),) * len(mats), w_stack)


def shape_candidates(d_b: int, dim_cap: int | None = None) -> list[tuple[tuple[int, int], ...]]:
    """Block-shape lists explored by the enumerate search mode.

    All canonical multisets of (dL, dR) pairs with dL, dR <= d_B and total
    dimension between d_B and d_B + 2, plus the single maximal tensor block
    (d_B, d_B).  Ordered by total dimension, then block count.  Any feasible
    decomposition yields a valid upper bound on the Markov distance, so the
    budget trades search breadth for time, not correctness.
    """
    if d_b < 1:
        raise ValueError(f"d_B must be positive, got {d_b}")
    budget = d_b + 2
    if dim_cap is not None:
        budget = min(budget, dim_cap)
    if budget < d_b:
        raise ValueError(f"dimension cap {dim_cap} below d_B = {d_b}")
    pairs = sorted(
        ((l, r) for l in range(1, d_b + 1) for r in range(1, d_b + 1)),
        key=lambda p: (-(p[0] * p[1]), -p[0], -p[1]),
    )
    found: list[tuple[tuple[int, int], ...]] = []

    def extend(prefix, start, total):
        if total >= d_b:
            found.append(tuple(prefix))
        for i in range(start, len(pairs)):
            l, r = pairs[i]
            nt = total + l * r
            if nt > budget:
                continue
            prefix.append(pairs[i])
            extend(prefix, i, nt)
            prefix.pop()

    extend([], 0, 0)
    found.sort(key=lambda s: (sum(l * r for l, r in s), len(s), s))
    maximal = ((d_b, d_b),)
    if maximal not in found and (dim_cap is None or d_b * d_b <= dim_cap):
        found.append(maximal)
    return found


def random_decomposition(d_b: int, seed, shape=None) -> Decomposition:
    """Haar-random decomposition; the shape is drawn from the candidate list
    unless given explicitly."""
    rng = rng_from(seed)
    if shape is None:
        options = shape_candidates(d_b)
        shape = options[int(rng.integers(len(options)))]
    total = sum(l * r for l, r in shape)
    w = random_haar_isometry(d_b, total, rng)
    return Decomposition(tuple(shape), w)
