"""Dense complex linear algebra on multipartite systems.

Conventions used throughout the package:

* Composite indices are row-major Kronecker products, leftmost subsystem most
  significant; subsystem order for tripartite states is fixed as A, B, C.
* Subsystem indices are 0-based.
* All randomness derives from a single integer seed; independent streams are
  split with ``SeedSequence`` spawn keys so parallel and serial runs agree.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend

TOL_HERM = 1e-9
TOL_TRACE = 1e-9
TOL_PSD = 1e-9
TOL_ISOMETRY = 1e-9
TOL_PURE_NORM = 1e-10
RANK_TOL = 1e-12


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a)
    a.setflags(write=False)
    return a


def rng_from(seed, key: tuple[int, ...] = ()) -> np.random.Generator:
    """Generator for ``seed``; ``key`` selects an independent substream.

    Accepts an existing Generator (returned as-is, key ignored) so helpers
    can be composed without reseeding.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=key))


def check_density(m: np.ndarray, what: str = "matrix") -> np.ndarray:
    """Validate a density matrix (Hermitian, unit trace, PSD); return as complex."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{what} is not a square matrix: shape {a.shape}")
    herm_defect = np.max(np.abs(a - a.conj().T)) if a.size else 0.0
    if herm_defect > TOL_HERM:
        raise ValueError(f"{what} is not Hermitian: max |M - M^dag| = {herm_defect:.3e}")
    tr = a.trace()
    if abs(tr - 1.0) > TOL_TRACE:
        raise ValueError(f"{what} does not have unit trace: tr = {tr:.12g}")
    wmin = backend.eigvalsh(a)[-1]
    if wmin < -TOL_PSD:
        raise ValueError(f"{what} is not positive semidefinite: min eigenvalue {wmin:.3e}")
    return a


@dataclass(frozen=True)
class TripartiteState:
    """Density matrix on A (x) B (x) C together with the subsystem dimensions."""

    matrix: np.ndarray
    dims: tuple[int, int, int]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if len(dims) != 3 or any(d < 1 for d in dims):
            raise ValueError(f"dims must be three positive integers, got {self.dims}")
        side = dims[0] * dims[1] * dims[2]
        a = check_density(self.matrix, "state matrix")
        if a.shape != (side, side):
            raise ValueError(
                f"state matrix side {a.shape[0]} does not match dims {dims} (product {side})"
            )
        object.__setattr__(self, "matrix", _freeze(a))
        object.__setattr__(self, "dims", dims)

    @property
    def side(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class PureState:
    """Normalized state vector with its subsystem dimensions."""

    vector: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 1 for d in dims):
            raise ValueError(f"dims must be positive integers, got {self.dims}")
        v = np.asarray(self.vector, dtype=complex).reshape(-1)
        if v.size != int(np.prod(dims)):
            raise ValueError(f"vector length {v.size} does not match dims {dims}")
        norm = np.linalg.norm(v)
        if abs(norm - 1.0) > TOL_PURE_NORM:
            raise ValueError(f"vector is not normalized: |psi| = {norm:.12g}")
        object.__setattr__(self, "vector", _freeze(v))
        object.__setattr__(self, "dims", dims)

    def density(self) -> np.ndarray:
        return np.outer(self.vector, self.vector.conj())

    def to_tripartite(self) -> "TripartiteState":
        if len(self.dims) != 3:
            raise ValueError(f"need exactly three subsystems, got dims {self.dims}")
        return TripartiteState(self.density(), self.dims)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product, left factor most significant."""
    return np.kron(np.asarray(a), np.asarray(b))


def multikron(*factors: np.ndarray) -> np.ndarray:
    out = np.asarray(factors[0])
    for f in factors[1:]:
        out = np.kron(out, f)
    return out


def _check_dims(m: np.ndarray, dims) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims):
        raise ValueError(f"subsystem dimensions must be positive: {dims}")
    side = int(np.prod(dims))
    if m.ndim != 2 or m.shape != (side, side):
        raise ValueError(f"matrix shape {m.shape} does not match dims {dims}")
    return dims


def partial_trace(m: np.ndarray, dims, keep) -> np.ndarray:
    """Reduce to the subsystems in ``keep`` (0-based), preserving their order."""
    a = np.asarray(m, dtype=complex)
    dims = _check_dims(a, dims)
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValueError("keep must name at least one subsystem")
    if keep[0] < 0 or keep[-1] >= len(dims):
        raise ValueError(f"keep {keep} out of range for {len(dims)} subsystems")
    traced = [i for i in range(len(dims)) if i not in keep]
    t = a.reshape(dims + dims)
    cur = list(dims)
    for idx in sorted(traced, reverse=True):
        t = np.trace(t, axis1=idx, axis2=idx + len(cur))
        del cur[idx]
    side = int(np.prod(cur))
    return t.reshape(side, side)


def permute_subsystems(m: np.ndarray, dims, order) -> np.ndarray:
    """Reorder subsystems; ``order[i]`` is the old index placed at position i."""
    a = np.asarray(m, dtype=complex)
    dims = _check_dims(a, dims)
    order = tuple(int(i) for i in order)
    if sorted(order) != list(range(len(dims))):
        raise ValueError(f"order {order} is not a permutation of {len(dims)} subsystems")
    axes = order + tuple(i + len(dims) for i in order)
    side = a.shape[0]
    return a.reshape(dims + dims).transpose(axes).reshape(side, side)


def hermitian_eig(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and eigenvector columns of a Hermitian matrix.

    Satisfies ``h = V diag(w) V^dag`` with unitary ``V`` to ~1e-12 in
    max-entry norm for the matrix sizes used here.
    """
    a = np.asarray(h, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    defect = np.max(np.abs(a - a.conj().T))
    if defect > TOL_HERM:
        raise ValueError(f"matrix is not Hermitian: max |M - M^dag| = {defect:.3e}")
    return backend.eigh(a)


def trace_norm(m: np.ndarray) -> float:
    """Sum of singular values."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return float(np.linalg.svd(a, compute_uv=False).sum())


def purify(rho: np.ndarray) -> PureState:
    """Canonical purification from the eigendecomposition.

    The ancilla dimension is the rank of ``rho`` (eigenvalues above 1e-12);
    tracing the ancilla back out reproduces ``rho``.
    """
    a = check_density(rho, "purify input")
    d = a.shape[0]
    w, v = backend.eigh(a)
    r = max(1, int(np.count_nonzero(w > RANK_TOL)))
    amps = v[:, :r] * np.sqrt(np.clip(w[:r], 0.0, None))
    vec = amps.reshape(d * r)
    vec = vec / np.linalg.norm(vec)
    return PureState(vec, (d, r))


def _conjugate_axis(m: np.ndarray, dims: tuple[int, ...], w: np.ndarray, axis: int):
    """(1 (x) w (x) 1) m (1 (x) w^dag (x) 1) acting on subsystem ``axis``."""
    n = len(dims)
    t = m.reshape(dims + dims)
    t = np.moveaxis(np.tensordot(w, t, axes=(1, axis)), 0, axis)
    t = np.moveaxis(np.tensordot(t, w.conj(), axes=(n + axis, 1)), -1, n + axis)
    new_dims = dims[:axis] + (w.shape[0],) + dims[axis + 1 :]
    side = int(np.prod(new_dims))
    return t.reshape(side, side), new_dims


def check_isometry(w: np.ndarray, what: str = "isometry") -> np.ndarray:
    a = np.asarray(w, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"{what} must be a matrix, got shape {a.shape}")
    if a.shape[0] < a.shape[1]:
        raise ValueError(f"{what} shape {a.shape} cannot have orthonormal columns")
    defect = np.max(np.abs(a.conj().T @ a - np.eye(a.shape[1])))
    if defect > TOL_ISOMETRY:
        raise ValueError(f"{what} columns are not orthonormal: max |W^dag W - I| = {defect:.3e}")
    return a


def apply_isometry(state: TripartiteState, w: np.ndarray, subsystem: int) -> TripartiteState:
    """Conjugate one subsystem by an isometry, enlarging its dimension."""
    if subsystem not in (0, 1, 2):
        raise ValueError(f"subsystem index {subsystem} out of range")
    a = check_isometry(w)
    if a.shape[1] != state.dims[subsystem]:
        raise ValueError(
            f"isometry domain {a.shape[1]} does not match subsystem dimension "
            f"{state.dims[subsystem]}"
        )
    out, new_dims = _conjugate_axis(state.matrix, state.dims, a, subsystem)
    return TripartiteState(out, new_dims)  # type: ignore[arg-type]


def dephase(m: np.ndarray, dims, register: int) -> np.ndarray:
    """Pinch in the computational basis of one register.

    Equals sum_j (1 (x) |j><j| (x) 1) m (1 (x) |j><j| (x) 1); kills every
    block off-diagonal in that register.
    """
    a = np.asarray(m, dtype=complex)
    dims = _check_dims(a, dims)
    n = len(dims)
    if not 0 <= register < n:
        raise ValueError(f"register index {register} out of range for {n} subsystems")
    t = a.reshape(dims + dims)
    t = np.moveaxis(t, (register, n + register), (0, 1))
    out = np.zeros_like(t)
    for j in range(dims[register]):
        out[j, j] = t[j, j]
    out = np.moveaxis(out, (0, 1), (register, n + register))
    return out.reshape(a.shape)


def random_haar_isometry(from_dim: int, to_dim: int, seed) -> np.ndarray:
    """Haar-random isometry of shape (to_dim, from_dim) via QR of a Ginibre matrix."""
    if from_dim < 1 or to_dim < from_dim:
        raise ValueError(f"need 1 <= from_dim <= to_dim, got ({from_dim}, {to_dim})")
    rng = rng_from(seed)
    g = (rng.standard_normal((to_dim, from_dim)) + 1j * rng.standard_normal((to_dim, from_dim))) / np.sqrt(2)
    q, r = np.linalg.qr(g, mode="reduced")
    d = np.diagonal(r)
    ph = np.ones(d.shape, dtype=complex)
    nz = np.abs(d) > 0
    ph[nz] = d[nz] / np.abs(d[nz])
    return q * ph


def random_density(dim: int, rank: int, seed) -> np.ndarray:
    """Ginibre-induced random density matrix of the requested rank."""
    if not 1 <= rank <= dim:
        raise ValueError(f"rank must lie in [1, {dim}], got {rank}")
    rng = rng_from(seed)
    g = (rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))) / np.sqrt(2)
    rho = g @ g.conj().T
    rho /= rho.trace().real
    return 0.5 * (rho + rho.conj().T)
