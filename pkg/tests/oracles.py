"""Independent reference implementations used only by the tests.

These stay deliberately separate from the package internals so the tests
cross-check two different computational routes.
"""

import numpy as np


def expm_series(M, terms=30):
    """Matrix exponential by scaling-and-squaring with a truncated
    Taylor series; brute force, no eigendecomposition."""
    M = np.asarray(M, dtype=complex)
    norm = float(np.max(np.abs(M))) if M.size else 0.0
    s = max(0, int(np.ceil(np.log2(norm))) + 1) if norm > 0 else 0
    A = M / (2**s)
    out = np.eye(M.shape[0], dtype=complex)
    term = np.eye(M.shape[0], dtype=complex)
    for k in range(1, terms + 1):
        term = term @ A / k
        out = out + term
    for _ in range(s):
        out = out @ out
    return out


def random_hermitian(gen, dim, scale=1.0):
    X = gen.normal(size=(dim, dim)) + 1j * gen.normal(size=(dim, dim))
    return scale * (X + X.conj().T) / 2


def char_poly_coefficients(M):
    """(A, B, C) with det(xI - M) = x^3 + A x^2 + B x + C for a 3x3."""
    tr = np.trace(M).real
    tr2 = np.trace(M @ M).real
    det = np.linalg.det(M).real
    A = -tr
    B = (tr * tr - tr2) / 2
    C = -det
    return A, B, C


def subspace_distance(u, v):
    """sin of the principal angle between two unit vectors, computed as
    the projection residual so tiny angles stay resolvable."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    return float(np.linalg.norm(u - v * np.vdot(v, u)))
