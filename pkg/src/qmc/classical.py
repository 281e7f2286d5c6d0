"""Classical three-variable joints: conditional mutual information and the
closest Markov chain.

For any joint P(x, y, z) the projection Q(x, y, z) = P(y) P(x|y) P(z|y) is the
Markov chain X - Y - Z minimizing the relative entropy from P, and the minimum
equals I(X:Z|Y) exactly.  That identity is the exact classical counterpart of
the quantum problem the rest of the package attacks numerically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .entropy import EntropyReport

SUM_TOL = 1e-12
NEG_TOL = 1e-12


@dataclass(frozen=True)
class ClassicalJoint:
    """Nonnegative table P(x, y, z) summing to one."""

    table: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.table, dtype=float)
        if t.ndim != 3:
            raise ValueError(f"table must be 3-dimensional, got shape {t.shape}")
        if t.min(initial=0.0) < -NEG_TOL:
            raise ValueError(f"table has negative entry {t.min():.3e}")
        t = np.clip(t, 0.0, None)
        total = t.sum()
        if abs(total - 1.0) > SUM_TOL:
            raise ValueError(f"table sums to {total:.15g}, expected 1")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.table.shape  # type: ignore[return-value]


def classical_cmi(p: ClassicalJoint) -> float:
    """I(X:Z|Y) = sum P(xyz) log2 [P(xyz) P(y) / (P(xy) P(yz))], with 0 log 0 = 0."""
    t = p.table
    p_y = t.sum(axis=(0, 2))
    p_xy = t.sum(axis=2)
    p_yz = t.sum(axis=0)
    mask = t > 0
    num = t * p_y[None, :, None]
    den = p_xy[:, :, None] * p_yz[None, :, :]
    val = np.sum(t[mask] * np.log2(num[mask] / den[mask]))
    return float(val)


def closest_markov(p: ClassicalJoint) -> ClassicalJoint:
    """The Markov chain Q(xyz) = P(y) P(x|y) P(z|y) = P(xy) P(yz) / P(y).

    Slices with P(y) = 0 carry no mass and stay zero.  The output satisfies
    D(P||Q) = I(X:Z|Y) and classical_cmi(Q) = 0.
    """
    t = p.table
    p_y = t.sum(axis=(0, 2))
    p_xy = t.sum(axis=2)
    p_yz = t.sum(axis=0)
    safe = np.where(p_y > 0, p_y, 1.0)
    q = p_xy[:, :, None] * p_yz[None, :, :] / safe[None, :, None]
    q[:, p_y == 0, :] = 0.0
    return ClassicalJoint(q)


def classical_relative_entropy(p: ClassicalJoint, q: ClassicalJoint) -> EntropyReport:
    """D(P||Q) = sum p log2(p/q); infinite when P has mass where Q vanishes."""
    if p.shape != q.shape:
        raise ValueError(f"alphabet mismatch: {p.shape} vs {q.shape}")
    tp, tq = p.table, q.table
    defect = float(tp[tq <= 0].sum())
    if defect > SUM_TOL:
        return EntropyReport(float("inf"), defect, False)
    mask = (tp > 0) & (tq > 0)
    val = float(np.sum(tp[mask] * np.log2(tp[mask] / tq[mask])))
    return EntropyReport(val, defect, True)


def is_markov(p: ClassicalJoint, tol: float = 1e-10) -> bool:
    return classical_cmi(p) <= tol


def random_joint(shape: tuple[int, int, int], seed) -> ClassicalJoint:
    """Dirichlet-flat random joint distribution (uniform on the simplex)."""
    from .linalg import rng_from

    rng = rng_from(seed)
    t = rng.dirichlet(np.ones(int(np.prod(shape)))).reshape(shape)
    return ClassicalJoint(t)
