"""Entropic functionals, all in bits (binary logarithms, 0 log 0 = 0).

Relative entropy reports support mismatches explicitly: when the first
argument has more than ``DEFECT_TOL`` of its mass outside the support of the
second, the result carries ``finite=False`` (and an infinite ``value``)
instead of a silently wrong finite number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import backend
from .linalg import TripartiteState, check_density, partial_trace, trace_norm, PureState

EIG_CLAMP = 1e-9      # eigenvalues in [-EIG_CLAMP, 0) are numerical-drift zeros
SUPPORT_TOL = 1e-12   # eigenvalues of sigma below this define its kernel
DEFECT_TOL = 1e-8     # rho-mass in the kernel above this makes D infinite

LN2 = math.log(2.0)


@dataclass(frozen=True)
class EntropyReport:
    """Relative-entropy result with explicit support accounting.

    ``support_defect`` is the mass of the first state outside the support of
    the second; ``finite=False`` marks the +infinity case so callers can rank
    it without arithmetic on ``value``.
    """

    value: float
    support_defect: float
    finite: bool


def _clamp_spectrum(w: np.ndarray, what: str = "matrix") -> np.ndarray:
    if w.size and w[-1] < -EIG_CLAMP:
        raise ValueError(f"{what} has eigenvalue {w[-1]:.3e} below -{EIG_CLAMP}")
    return np.clip(w, 0.0, None)


def entropy_from_eigs(w: np.ndarray) -> float:
    w = np.asarray(w, dtype=float)
    pos = w[w > 0]
    return float(-(pos @ np.log2(pos))) if pos.size else 0.0


def _entropy_matrix(m: np.ndarray) -> float:
    """Entropy of a PSD matrix; skips density validation (internal hot path)."""
    return entropy_from_eigs(_clamp_spectrum(backend.eigvalsh(m)))


def von_neumann_entropy(rho: np.ndarray) -> float:
    """S(rho) = -tr rho log2 rho."""
    a = check_density(rho, "entropy input")
    return _entropy_matrix(a)


def quantum_relative_entropy(rho: np.ndarray, sigma: np.ndarray) -> EntropyReport:
    """D(rho||sigma) = tr rho (log2 rho - log2 sigma), evaluated in sigma's eigenbasis."""
    a = check_density(rho, "relative-entropy first argument")
    b = check_density(sigma, "relative-entropy second argument")
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    mu, v = backend.eigh(b)
    mu = _clamp_spectrum(mu, "sigma")
    diag = np.einsum("ij,jk,ki->i", v.conj().T, a, v).real
    kernel = mu < SUPPORT_TOL
    defect = float(diag[kernel].sum()) if kernel.any() else 0.0
    if defect > DEFECT_TOL:
        return EntropyReport(math.inf, defect, False)
    support = ~kernel
    cross = float(diag[support] @ np.log2(mu[support]))
    value = -_entropy_matrix(a) - cross
    return EntropyReport(value, defect, True)


def _subsystem_entropy(m: np.ndarray, dims, keep) -> float:
    return _entropy_matrix(partial_trace(m, dims, keep))


def mutual_information(m: np.ndarray, dims, cut) -> float:
    """I(X:Y) = S(X) + S(Y) - S(XY) with X the subsystems in ``cut``."""
    dims = tuple(int(d) for d in dims)
    cut = sorted(set(int(i) for i in cut))
    rest = [i for i in range(len(dims)) if i not in cut]
    if not cut or not rest or cut[0] < 0 or cut[-1] >= len(dims):
        raise ValueError(f"cut {cut} must be a nonempty proper subset of {len(dims)} subsystems")
    a = check_density(m, "mutual-information input")
    return (
        _subsystem_entropy(a, dims, cut)
        + _subsystem_entropy(a, dims, rest)
        - _entropy_matrix(a)
    )


def conditional_entropy(m: np.ndarray, dims, target, condition) -> float:
    """S(target | condition) = S(target, condition) - S(condition)."""
    dims = tuple(int(d) for d in dims)
    target = sorted(set(int(i) for i in target))
    condition = sorted(set(int(i) for i in condition))
    if not target or not condition:
        raise ValueError("target and condition must both be nonempty")
    if set(target) & set(condition):
        raise ValueError(f"target {target} and condition {condition} overlap")
    for i in target + condition:
        if not 0 <= i < len(dims):
            raise ValueError(f"subsystem index {i} out of range")
    a = check_density(m, "conditional-entropy input")
    return _subsystem_entropy(a, dims, target + condition) - _subsystem_entropy(a, dims, condition)


def _cmi(m: np.ndarray, dims) -> float:
    return (
        _subsystem_entropy(m, dims, (0, 1))
        + _subsystem_entropy(m, dims, (1, 2))
        - _subsystem_entropy(m, dims, (1,))
        - _entropy_matrix(m)
    )


def conditional_mutual_information(state: TripartiteState) -> float:
    """I(A:C|B) = S(AB) + S(BC) - S(B) - S(ABC); nonnegative by strong subadditivity."""
    return _cmi(state.matrix, state.dims)


def fannes_bound(eps: float, d: int) -> float:
    """Entropy-continuity bound -eps log2 eps + eps log2 d, valid for eps <= 1/e."""
    if not 0.0 < eps <= 1.0 / math.e:
        raise ValueError(f"eps must lie in (0, 1/e], got {eps}")
    if d < 1:
        raise ValueError(f"dimension must be positive, got {d}")
    return -eps * math.log2(eps) + eps * math.log2(d)


def alicki_fannes_bound(eps: float, d: int) -> float:
    """Conditional-entropy continuity bound; depends on the conditioned system's dimension only."""
    if not 0.0 < eps <= 1.0:
        raise ValueError(f"eps must lie in (0, 1], got {eps}")
    if d < 1:
        raise ValueError(f"dimension must be positive, got {d}")
    h = -2.0 * eps * math.log2(eps)
    if eps < 1.0:
        h += -2.0 * (1.0 - eps) * math.log2(1.0 - eps)
    return h + 4.0 * eps * math.log2(d)


def pinsker_floor(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Lower bound (||rho - sigma||_1 / (2 ln 2))^2 on D(rho||sigma)."""
    a = check_density(rho, "pinsker first argument")
    b = check_density(sigma, "pinsker second argument")
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return (trace_norm(a - b) / (2.0 * LN2)) ** 2


def nearest_pure(rho: np.ndarray) -> tuple[PureState, float]:
    """Top eigenvector and its trace distance 2(1 - lambda_1) to the input."""
    a = check_density(rho, "nearest-pure input")
    w, v = backend.eigh(a)
    vec = v[:, 0]
    vec = vec / np.linalg.norm(vec)
    return PureState(vec, (a.shape[0],)), float(2.0 * (1.0 - w[0]))
