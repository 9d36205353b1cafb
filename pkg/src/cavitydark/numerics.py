"""Dense complex linear algebra used by the cavity simulator.

All Hamiltonians are stored divided by hbar, i.e. as matrices of angular
frequencies, so time evolution is exp(-i H t) with dimensionless t.
Everything here is a pure function of its inputs; arrays are never
mutated in place.
"""

from dataclasses import dataclass

import numpy as np

HERMITICITY_RTOL = 1e-12
DEGENERACY_RTOL = 1e-9  # eigenvalue gap below this (times max|M|) is one cluster


class NonHermitianError(ValueError):
    """Input matrix fails the Hermiticity tolerance."""


class ComplexRootsError(ValueError):
    """Cubic has a complex-conjugate root pair (not a Hermitian spectrum)."""


def max_abs(M):
    """Largest entry magnitude, 0.0 for an empty matrix."""
    M = np.asarray(M)
    return float(np.max(np.abs(M))) if M.size else 0.0


def hermiticity_residual(M):
    """max |M - M^dagger| entrywise."""
    M = np.asarray(M, dtype=complex)
    return float(np.max(np.abs(M - M.conj().T))) if M.size else 0.0


def require_hermitian(M, rtol=HERMITICITY_RTOL):
    """Return M as a complex array, raising NonHermitianError if it is not
    Hermitian within rtol * max|M|."""
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    res = hermiticity_residual(M)
    bound = rtol * max(max_abs(M), 1e-300)
    if res > bound:
        raise NonHermitianError(
            f"matrix is not Hermitian: max |M - M^H| = {res:.3e} "
            f"exceeds {bound:.3e} (rtol={rtol:g})"
        )
    return M


def fix_phase(v):
    """Rotate the global phase so the largest-magnitude component is real
    and positive.  Deterministic: ties break on the lowest index."""
    v = np.asarray(v, dtype=complex)
    k = int(np.argmax(np.abs(v)))
    a = v[k]
    if abs(a) == 0.0:
        return v.copy()
    return v * (a.conjugate() / abs(a))


def normalize(v):
    v = np.asarray(v, dtype=complex)
    n = float(np.linalg.norm(v))
    if n == 0.0:
        raise ValueError("cannot normalize the zero vector")
    return v / n


def subspace_distance(u, v):
    """sin of the principal angle between two unit vectors, via the
    projection residual (stays resolvable for tiny angles)."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    return float(np.linalg.norm(u - v * np.vdot(v, u)))


@dataclass(frozen=True)
class Spectrum:
    """Eigendecomposition of a Hermitian matrix.

    eigenvalues are real and ascending; eigenvectors are the matching
    orthonormal columns, phase-fixed via fix_phase.  Within a degenerate
    cluster (gap < DEGENERACY_RTOL * max|M|) individual directions are
    unspecified; compare subspace projectors instead.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self):
        return self.eigenvalues.shape[0]

    def projector(self, indices):
        """Projector onto the span of the selected eigenvectors."""
        V = self.eigenvectors[:, list(indices)]
        return V @ V.conj().T

    def clusters(self, scale):
        """Index groups of eigenvalues closer than DEGENERACY_RTOL * scale."""
        gap = DEGENERACY_RTOL * max(scale, 1e-300)
        groups, current = [], [0]
        for i in range(1, self.dim):
            if self.eigenvalues[i] - self.eigenvalues[i - 1] < gap:
                current.append(i)
            else:
                groups.append(current)
                current = [i]
        groups.append(current)
        return groups


def herm_eig(M, rtol=HERMITICITY_RTOL):
    """Eigendecomposition of a Hermitian matrix via LAPACK, with the
    package phase convention applied to every column."""
    M = require_hermitian(M, rtol=rtol)
    w, V = np.linalg.eigh(M)
    V = np.column_stack([fix_phase(V[:, k]) for k in range(V.shape[1])])
    return Spectrum(eigenvalues=w, eigenvectors=V)


def evolve(spec, psi0, t):
    """Apply exp(-i H t) to psi0 through the spectral decomposition of H."""
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (spec.dim,):
        raise ValueError(
            f"state dimension {psi0.shape} does not match spectrum dim {spec.dim}"
        )
    if not np.isfinite(t):
        raise ValueError("evolution time must be finite")
    phases = np.exp(-1j * spec.eigenvalues * t)
    V = spec.eigenvectors
    return V @ (phases * (V.conj().T @ psi0))


def _cubic_value(x, A, B, C):
    return ((x + A) * x + B) * x + C


def cubic_roots(A, B, C):
    """All-real roots of x^3 + A x^2 + B x + C, ascending.

    Uses the trigonometric solution of the depressed cubic, then Newton
    polish in extended precision; clustered eigenvalues of 3x3 Hermitian
    blocks stay accurate this way.  A genuinely complex root pair raises
    ComplexRootsError.
    """
    for name, val in (("A", A), ("B", B), ("C", C)):
        if not np.isfinite(val):
            raise ValueError(f"coefficient {name} must be finite, got {val!r}")
    Al, Bl, Cl = np.longdouble(A), np.longdouble(B), np.longdouble(C)
    shift = Al / 3
    p = Bl - Al * shift
    q = (2 * shift * shift - Bl) * shift + Cl
    q2 = (q / 2) ** 2
    p3 = (p / 3) ** 3
    disc = q2 + p3
    # rounding can push a multiple-root discriminant slightly positive
    fuzz = 64 * np.finfo(np.longdouble).eps * max(q2, abs(p3), np.longdouble(1e-300))
    if disc > fuzz:
        raise ComplexRootsError(
            f"discriminant {float(disc):.3e} > 0: cubic has complex roots "
            "(coefficients are not from a Hermitian characteristic polynomial)"
        )
    if p >= 0:
        # disc <= fuzz forces p and q both ~ 0: a (near-)triple root
        t0 = np.cbrt(-q)
        ts = np.array([t0, t0, t0], dtype=np.longdouble)
    else:
        m = 2 * np.sqrt(-p / 3)
        arg = np.clip(3 * q / (p * m), -1.0, 1.0)
        theta = np.arccos(arg) / 3
        k = np.arange(3, dtype=np.longdouble)
        ts = m * np.cos(theta - 2 * np.pi * k / 3)
    roots = ts - shift
    for _ in range(2):  # Newton polish against the monic cubic
        f = ((roots + Al) * roots + Bl) * roots + Cl
        df = (3 * roots + 2 * Al) * roots + Bl
        ok = np.abs(df) > 0
        roots = np.where(ok, roots - f / np.where(ok, df, 1), roots)
    out = np.sort(roots.astype(float))
    bound = 1e-8 * max(1.0, abs(C))
    worst = max(abs(_cubic_value(r, A, B, C)) for r in out)
    if worst > bound:
        raise ArithmeticError(
            f"cubic root residual {worst:.3e} exceeds {bound:.3e}"
        )
    return float(out[0]), float(out[1]), float(out[2])


def null_space(M, tol):
    """Orthonormal basis of {v : ||Mv|| <= tol * max|M| * ||v||}.

    Returns a (possibly empty) list of phase-fixed vectors.  The zero
    matrix yields the full standard-dimension basis.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    n = M.shape[1]
    scale = max_abs(M)
    if scale == 0.0:
        return [fix_phase(e) for e in np.eye(n, dtype=complex)]
    _, s, Vh = np.linalg.svd(M)
    rank = int(np.sum(s > tol * scale))
    return [fix_phase(Vh[i].conj()) for i in range(rank, n)]


@dataclass(frozen=True)
class RandomSource:
    """Seeded randomness contract: same seed, same sample sequence.

    Thin wrapper around numpy's PCG64 so every stochastic routine takes
    an explicit, reproducible source and parallel work can use spawned
    child sources.
    """

    seed: int
    algorithm: str = "pcg64"

    def __post_init__(self):
        if self.algorithm != "pcg64":
            raise ValueError(f"unsupported RNG algorithm {self.algorithm!r}")
        if not (0 <= int(self.seed) < 2**64):
            raise ValueError("seed must fit in an unsigned 64-bit integer")

    def generator(self):
        return np.random.Generator(np.random.PCG64(self.seed))

    def spawn(self, n):
        """n derived sources, deterministic in (seed, n)."""
        children = np.random.SeedSequence(self.seed).spawn(n)
        return [
            RandomSource(seed=int(c.generate_state(1, np.uint64)[0]))
            for c in children
        ]
