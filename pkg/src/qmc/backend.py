"""Selectable eigensolver backend.

Every Hermitian eigendecomposition in the package goes through :func:`eigh`
or :func:`eigvalsh`, so these two functions are the hot kernels.  Two
implementations are available:

* ``"numba"`` -- cyclic Jacobi sweeps compiled with numba (:mod:`qmc._jacobi`).
  For the small matrices that dominate the optimizer workload (sides 2-36)
  this avoids LAPACK dispatch overhead.
* ``"numpy"`` -- ``np.linalg.eigh`` / ``eigvalsh`` (LAPACK), the pure-numpy
  fallback.

The environment variable ``QMC_BACKEND`` (``numba`` or ``numpy``) selects the
backend; without it numba is used when importable.  ``set_backend`` switches
at runtime (used by the test suite and ``benchmarks/bench_backends.py``).

Both backends return eigenvalues in descending order.  Eigenvectors may
differ between backends by phases and by basis choice inside degenerate
eigenspaces; every quantity this package derives from them is invariant
under that freedom.
"""

from __future__ import annotations

import os
import warnings

import numpy as np

BACKENDS = ("numba", "numpy")

_active: str | None = None
_kernels = None


def _load_kernels():
    global _kernels
    if _kernels is None:
        from . import _jacobi

        _kernels = _jacobi
    return _kernels


def _resolve_default() -> str:
    env = os.environ.get("QMC_BACKEND", "").strip().lower()
    if env:
        if env not in BACKENDS:
            raise ValueError(
                f"QMC_BACKEND={env!r}: expected one of {', '.join(BACKENDS)}"
            )
        if env == "numba":
            _load_kernels()
        return env
    try:
        _load_kernels()
        return "numba"
    except ImportError:
        warnings.warn("numba is not importable; using the numpy backend")
        return "numpy"


def active_backend() -> str:
    """Name of the backend currently answering eigh/eigvalsh calls."""
    global _active
    if _active is None:
        _active = _resolve_default()
    return _active


def set_backend(name: str) -> None:
    """Switch backend at runtime; ``name`` is ``"numba"`` or ``"numpy"``."""
    global _active
    if name not in BACKENDS:
        raise ValueError(f"unknown backend {name!r}; expected one of {BACKENDS}")
    if name == "numba":
        _load_kernels()
    _active = name


def _prepare(h: np.ndarray) -> np.ndarray:
    a = np.array(h, dtype=np.complex128, order="C")
    # Symmetrize away round-off drift; callers validate Hermiticity properly.
    return 0.5 * (a + a.conj().T)


def eigh(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and eigenvector columns of a Hermitian matrix."""
    a = _prepare(h)
    if active_backend() == "numpy":
        w, v = np.linalg.eigh(a)
        return w[::-1].copy(), v[:, ::-1].copy()
    d, v = _kernels.jacobi_eigh(a, True)
    order = np.argsort(-d, kind="stable")
    return d[order], v[:, order]


def eigvalsh(h: np.ndarray) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix, descending."""
    a = _prepare(h)
    if active_backend() == "numpy":
        return np.linalg.eigvalsh(a)[::-1].copy()
    d, _ = _kernels.jacobi_eigh(a, False)
    return np.sort(d)[::-1]
