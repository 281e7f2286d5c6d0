"""Numba-compiled cyclic Jacobi eigensolver for complex Hermitian matrices.

One full sweep applies a unitary rotation to every off-diagonal pair (p, q)
in row-cyclic order.  Sweeps stop once the off-diagonal Frobenius norm drops
below 1e-12 or after 100 sweeps.  Quadratic convergence makes the sweep cap a
formality for the matrix sides (< ~100) this package works with.
"""

import numpy as np
from numba import njit

OFFDIAG_THRESHOLD = 1e-12
MAX_SWEEPS = 100


@njit(cache=True, nogil=True)
def jacobi_eigh(a, want_vectors):
    """Diagonalize a Hermitian matrix in place.

    ``a`` must be a C-contiguous complex128 copy the caller can spare; it is
    destroyed.  Returns ``(eigenvalues, vectors)`` in no particular order;
    ``vectors`` is the identity when ``want_vectors`` is false.
    """
    n = a.shape[0]
    d = np.empty(n, np.float64)
    v = np.eye(n, dtype=np.complex128)
    if n == 1:
        d[0] = a[0, 0].real
        return d, v
    for _ in range(MAX_SWEEPS):
        off2 = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off2 += abs(a[p, q]) ** 2
        if np.sqrt(2.0 * off2) <= OFFDIAG_THRESHOLD:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r == 0.0:
                    continue
                phase = apq / r
                app = a[p, p].real
                aqq = a[q, q].real
                # Rotation angle from cot(2*theta) = (app - aqq) / (2 r),
                # taking the smaller root for stability.
                u = (app - aqq) / (2.0 * r)
                if u >= 0.0:
                    t = 1.0 / (u + np.sqrt(1.0 + u * u))
                else:
                    t = -1.0 / (-u + np.sqrt(1.0 + u * u))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                h = t * r
                a[p, p] = app + h
                a[q, q] = aqq - h
                a[p, q] = 0.0
                a[q, p] = 0.0
                pc = np.conj(phase)
                for k in range(n):
                    if k == p or k == q:
                        continue
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp + s * pc * akq
                    a[k, q] = -s * phase * akp + c * akq
                    a[p, k] = np.conj(a[k, p])
                    a[q, k] = np.conj(a[k, q])
                if want_vectors:
                    for k in range(n):
                        vkp = v[k, p]
                        vkq = v[k, q]
                        v[k, p] = c * vkp + s * pc * vkq
                        v[k, q] = -s * phase * vkp + c * vkq
    for i in range(n):
        d[i] = a[i, i].real
    return d, v
