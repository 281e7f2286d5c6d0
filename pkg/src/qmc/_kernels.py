"""Numba-compiled hot path for the block-distance objective.

The optimizer evaluates the closed-form distance
-S(rho) + H(q) + sum_j q_j (S(sigma_j) + S(chi_j)) hundreds of thousands of
times on matrices of side 2..36; at that size numpy's per-call dispatch
dominates.  This module fuses the whole evaluation (isometry chart, block
extraction, marginals, Jacobi eigenvalues, entropies) into jitted code.
The pure-numpy equivalents live in :mod:`qmc.markov` and
:mod:`qmc.optimize`; agreement between the two paths is asserted in the test
suite.

Layout contract: ``m1`` is the state tensor (a, m, c, a', n, c') transposed
to (m, a, c, a', c', n) and flattened to shape (d_B, K * d_B) with
K = (d_A d_C)^2, so a block's conjugation is two small matrix products.
"""

import numpy as np
from numba import njit

from ._jacobi import jacobi_eigh

EIG_CLAMP = 1e-9
WEIGHT_TOL = 1e-12


@njit(cache=True, nogil=True)
def entropy_psd(mat):
    """Entropy in bits of a PSD matrix (destroys its argument)."""
    d, _ = jacobi_eigh(mat, False)
    s = 0.0
    for x in d:
        if x > 0.0:
            s -= x * np.log2(x)
        elif x < -EIG_CLAMP:
            raise ValueError("matrix has an eigenvalue below the PSD tolerance")
    return s


@njit(cache=True, nogil=True)
def isometry_cols(theta, base):
    """W(theta) = exp(i H(theta)) @ base, H Hermitian from packed parameters."""
    n = base.shape[0]
    if n == 1:
        return np.exp(1j * theta[0]) * base
    h = np.zeros((n, n), np.complex128)
    for i in range(n):
        h[i, i] = theta[i]
    m = n * (n - 1) // 2
    k = 0
    for i in range(n):
        for j in range(i + 1, n):
            re = theta[n + k]
            im = theta[n + m + k]
            h[i, j] = complex(re, im)
            h[j, i] = complex(re, -im)
            k += 1
    d, v = jacobi_eigh(h, True)
    u = np.dot(v * np.exp(1j * d), np.ascontiguousarray(v.conj().T))
    return np.dot(u, base)


@njit(cache=True, nogil=True)
def relent_eval(m1, d_a, d_c, dls, drs, offs, w, s_rho):
    """Closed-form block distance for isometry ``w`` (see module docstring)."""
    d_b = w.shape[1]
    kk = d_a * d_a * d_c * d_c
    val = -s_rho
    for j in range(dls.size):
        dl = dls[j]
        dr = drs[j]
        off = offs[j]
        nj = dl * dr
        wj = np.ascontiguousarray(w[off : off + nj])
        x = np.dot(wj, m1).reshape(nj * kk, d_b)
        t = np.dot(x, np.ascontiguousarray(wj.conj().T))
        q = 0.0
        for p in range(nj):
            for a in range(d_a):
                for c in range(d_c):
                    k = ((a * d_c + c) * d_a + a) * d_c + c
                    q += t[p * kk + k, p].real
        if q <= WEIGHT_TOL:
            continue
        sig = np.zeros((d_a * dl, d_a * dl), np.complex128)
        for a in range(d_a):
            for l in range(dl):
                for a2 in range(d_a):
                    for l2 in range(dl):
                        s = 0.0j
                        for r in range(dr):
                            for c in range(d_c):
                                k = ((a * d_c + c) * d_a + a2) * d_c + c
                                s += t[(l * dr + r) * kk + k, l2 * dr + r]
                        sig[a * dl + l, a2 * dl + l2] = s / q
        chi = np.zeros((dr * d_c, dr * d_c), np.complex128)
        for r in range(dr):
            for c in range(d_c):
                for r2 in range(dr):
                    for c2 in range(d_c):
                        s = 0.0j
                        for a in range(d_a):
                            for l in range(dl):
                                k = ((a * d_c + c) * d_a + a) * d_c + c2
                                s += t[(l * dr + r) * kk + k, l * dr + r2]
                        chi[r * d_c + c, r2 * d_c + c2] = s / q
        val += q * (entropy_psd(sig) + entropy_psd(chi)) - q * np.log2(q)
    return val


@njit(cache=True, nogil=True)
def delta_eval(theta, base, m1, d_a, d_c, dls, drs, offs, s_rho):
    """Fused chart + objective: the optimizer's innermost call."""
    w = isometry_cols(theta, base)
    return relent_eval(m1, d_a, d_c, dls, drs, offs, w, s_rho)


@njit(cache=True, nogil=True)
def ep_eval(theta, base, phi3, d_a, d_c, r):
    """S(AE) after splitting the purifier with the charted isometry."""
    w = isometry_cols(theta, base)  # (r*r, r)
    psi = np.zeros((d_a, d_c, r, r), np.complex128)
    for a in range(d_a):
        for c in range(d_c):
            for e in range(r):
                for f in range(r):
                    s = 0.0j
                    for b in range(r):
                        s += phi3[a, c, b] * w[e * r + f, b]
                    psi[a, c, e, f] = s
    rho_ae = np.zeros((d_a * r, d_a * r), np.complex128)
    for a in range(d_a):
        for e in range(r):
            for b in range(d_a):
                for g in range(r):
                    s = 0.0j
                    for c in range(d_c):
                        for f in range(r):
                            s += psi[a, c, e, f] * np.conj(psi[b, c, g, f])
                    rho_ae[a * r + e, b * r + g] = s
    return entropy_psd(rho_ae)
