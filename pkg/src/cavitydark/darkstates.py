"""Analytic spectra of the one-excitation block and dark-state machinery.

A two-atom state is dark when destructive interference blocks both photon
emission and photon absorption.  For equal atomic frequencies the block

    [[omega_a, 0, g1], [0, omega_a, g2], [g1, g2, omega_c]]

has the dark eigenvector (-g2, g1, 0)/sqrt(g1^2+g2^2) with eigenvalue
omega_a, plus two polaritons at (omega_c + omega_a -/+ S)/2 with
S = sqrt(4 g1^2 + 4 g2^2 + d^2), d = omega_c - omega_a.  Detuning the
atoms from each other (a static-field level shift) removes the dark
eigenvector entirely, which is what the preparation protocol exploits.
"""

from dataclasses import dataclass

import numpy as np

from . import model as _model
from . import numerics as _num

# route to the equal-frequency branch below this relative frequency split
DEGENERATE_SPLIT_RTOL = 1e-9
# formula eigenvectors worse than this residual fall back to the numeric path
_FORMULA_RESIDUAL_RTOL = 1e-9

BRANCH_DEGENERATE = "degenerate"
BRANCH_DEGENERATE_CLUSTER = "degenerate-cluster"
BRANCH_SHIFTED = "shifted"
BRANCH_SHIFTED_FALLBACK = "shifted-fallback"


class DegenerateFrequenciesError(ValueError):
    """Shifted-branch formulas are singular for equal atomic frequencies."""


@dataclass(frozen=True)
class AnalyticSpectrum:
    """Closed-form eigensystem of the 3x3 one-excitation block.

    eigenvectors holds normalized, phase-fixed columns.  raw_eigenvectors
    keeps the unnormalized textbook form (third component 1 where the
    formula applies, the bare dark vector in the first degenerate column)
    for direct comparison against the closed formulas.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    branch: str
    raw_eigenvectors: np.ndarray

    def block_matrix(self):
        """Reassembled sum_k lambda_k |v_k><v_k|."""
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.conj().T


def dark_state_degenerate(g1, g2):
    """The interference-protected two-atom state (-g2, g1)/norm over
    (|10>, |01>).  Undefined when both couplings vanish (every state
    decouples then)."""
    norm = float(np.hypot(g1, g2))
    if norm == 0.0:
        raise ValueError("dark state undefined for g1 = g2 = 0")
    return np.array([-g2, g1], dtype=complex) / norm


def with_photon_amplitude(atomic, amplitude=0.0):
    """Extend an n-component atomic block vector with a photon amplitude."""
    atomic = np.asarray(atomic, dtype=complex)
    return np.concatenate([atomic, [amplitude]])


def analytic_spectrum_degenerate(omega_c, omega_a, g1, g2):
    """Closed-form eigensystem for equal atomic frequencies.

    Column order follows the physics: dark state first (eigenvalue
    omega_a; it carries one atomic excitation and no photon), then the
    lower and upper polaritons.  Note the dark eigenvalue equals omega_c
    only at zero detuning.
    """
    d = omega_c - omega_a
    gsq = g1 * g1 + g2 * g2
    if gsq == 0.0:
        # decoupled: bare atomic levels plus the bare photon
        values = np.array([omega_a, omega_a, omega_c])
        vectors = np.eye(3, dtype=complex)
        branch = BRANCH_DEGENERATE_CLUSTER if d == 0.0 else BRANCH_DEGENERATE
        return AnalyticSpectrum(values, vectors, branch, vectors.copy())

    S = float(np.sqrt(4 * gsq + d * d))
    values = np.array(
        [omega_a, 0.5 * (omega_c + omega_a - S), 0.5 * (omega_c + omega_a + S)]
    )
    # S > |d| whenever any coupling is nonzero, so both denominators are safe
    raw = np.column_stack(
        [
            np.array([-g2, g1, 0.0]),
            np.array([-2 * g1 / (S - d), -2 * g2 / (S - d), 1.0]),
            np.array([2 * g1 / (S + d), 2 * g2 / (S + d), 1.0]),
        ]
    ).astype(complex)
    vectors = np.column_stack(
        [_num.fix_phase(_num.normalize(raw[:, k])) for k in range(3)]
    )
    return AnalyticSpectrum(values, vectors, BRANCH_DEGENERATE, raw)


def shifted_cubic_coefficients(omega_c, omega_a1, omega_a2, g1, g2):
    """(A, B, C) of the characteristic polynomial x^3 + A x^2 + B x + C."""
    A = -(omega_c + omega_a1 + omega_a2)
    B = omega_c * omega_a1 + omega_c * omega_a2 + omega_a1 * omega_a2 - g1 * g1 - g2 * g2
    C = g1 * g1 * omega_a2 + g2 * g2 * omega_a1 - omega_c * omega_a1 * omega_a2
    return A, B, C


def analytic_spectrum_shifted(omega_c, omega_a1, omega_a2, g1, g2):
    """Closed-form eigensystem for split atomic frequencies.

    Eigenvalues are the ascending real roots of the characteristic cubic.
    Eigenvectors come from the resolvent form

        ( (alpha - omega_c)/g1 - g2^2 / (g1 (alpha - omega_a2)),
          g2 / (alpha - omega_a2),
          1 )

    per root alpha.  Where that expression is singular (g1 = 0, or a root
    hitting omega_a2) or numerically degraded, the numeric eigenvector is
    substituted and the branch tag says so.
    """
    scale = max(abs(omega_c), abs(omega_a1), abs(omega_a2), abs(g1), abs(g2), 1e-300)
    if abs(omega_a1 - omega_a2) <= DEGENERATE_SPLIT_RTOL * scale:
        raise DegenerateFrequenciesError(
            "atomic frequencies are equal within tolerance; "
            "use analytic_spectrum_degenerate"
        )
    A, B, C = shifted_cubic_coefficients(omega_c, omega_a1, omega_a2, g1, g2)
    roots = np.array(_num.cubic_roots(A, B, C))

    H = _model.single_excitation_block(
        _model.CavityModel(
            omega_c=omega_c,
            atoms=(
                _model.AtomParams(omega=omega_a1, g=g1),
                _model.AtomParams(omega=omega_a2, g=g2),
            ),
        )
    )
    hscale = _num.max_abs(H)
    numeric = None
    raw = np.zeros((3, 3), dtype=complex)
    vectors = np.zeros((3, 3), dtype=complex)
    fallback = False
    for k, alpha in enumerate(roots):
        denom = alpha - omega_a2
        candidate = None
        if g1 != 0.0 and denom != 0.0:
            v = np.array(
                [
                    (alpha - omega_c) / g1 - g2 * g2 / (g1 * denom),
                    g2 / denom,
                    1.0,
                ],
                dtype=complex,
            )
            residual = np.linalg.norm(H @ v - alpha * v)
            if residual <= _FORMULA_RESIDUAL_RTOL * hscale * np.linalg.norm(v):
                candidate = v
        if candidate is None:
            fallback = True
            if numeric is None:
                numeric = _num.herm_eig(H)
            vec = numeric.eigenvectors[:, k]  # roots and eigh share ascending order
            candidate = vec if abs(vec[2]) < 1e-12 else vec / vec[2]
        raw[:, k] = candidate
        vectors[:, k] = _num.fix_phase(_num.normalize(candidate))

    branch = BRANCH_SHIFTED_FALLBACK if fallback else BRANCH_SHIFTED
    return AnalyticSpectrum(roots, vectors, branch, raw)


def analytic_spectrum(omega_c, omega_a1, omega_a2, g1, g2):
    """Dispatch on the frequency split, mirroring the applicability rule
    of the two closed forms."""
    scale = max(abs(omega_c), abs(omega_a1), abs(omega_a2), abs(g1), abs(g2), 1e-300)
    if abs(omega_a1 - omega_a2) <= DEGENERATE_SPLIT_RTOL * scale:
        return analytic_spectrum_degenerate(omega_c, omega_a1, g1, g2)
    return analytic_spectrum_shifted(omega_c, omega_a1, omega_a2, g1, g2)


def singlet_ensemble(n, pair_couplings=None):
    """Tensor product of per-pair dark states over n atoms (n even).

    With no couplings given every pair is the plain singlet
    (|01> - |10>)/sqrt(2); otherwise pair j uses its (g_a, g_b) to build
    (-g_b |10> + g_a |01>)/norm.  Atoms pair up consecutively:
    (1,2), (3,4), ...
    """
    if n < 2 or n % 2 != 0:
        raise ValueError(f"need an even number of atoms >= 2, got {n}")
    pairs = n // 2
    if pair_couplings is None:
        pair_couplings = [(1.0, 1.0)] * pairs
    if len(pair_couplings) != pairs:
        raise ValueError(f"expected {pairs} coupling pairs, got {len(pair_couplings)}")
    state = np.array([1.0], dtype=complex)
    for ga, gb in pair_couplings:
        dark = dark_state_degenerate(ga, gb)  # (-gb, ga)/norm over (|10>, |01>)
        pair = np.array([0.0, dark[1], dark[0], 0.0], dtype=complex)
        state = np.kron(state, pair)
    return state


@dataclass(frozen=True)
class DarknessReport:
    """Operational darkness test result.

    emit_residual is the norm of sum_i g_i sigma_i^- acting on the atomic
    content; absorb_residual the same for the raising channel (always
    computed, but only gates the verdict in the full subspace, since a
    one-excitation block has no absorption target).  photon_support is
    the probability weight outside the zero-photon sector.
    """

    is_dark: bool
    emit_residual: float
    absorb_residual: float
    photon_support: float
    subspace: str


SUBSPACE_SINGLE = "single_excitation"
SUBSPACE_FULL = "full"


def _lower_all(psi, couplings):
    """sum_i g_i sigma_i^- on a 2^n atomic vector."""
    n = len(couplings)
    out = np.zeros_like(psi)
    for i, g in enumerate(couplings):
        bit = 1 << (n - 1 - i)
        src = np.nonzero([(b & bit) != 0 for b in range(len(psi))])[0]
        out[src - bit] += g * psi[src]
    return out


def _raise_all(psi, couplings):
    n = len(couplings)
    out = np.zeros_like(psi)
    for i, g in enumerate(couplings):
        bit = 1 << (n - 1 - i)
        src = np.nonzero([(b & bit) == 0 for b in range(len(psi))])[0]
        out[src + bit] += g * psi[src]
    return out


def _atomic_excitation(psi):
    weights = np.array([bin(b).count("1") for b in range(len(psi))])
    return float(np.sum(np.abs(psi) ** 2 * weights))


def is_dark(model, psi, subspace=SUBSPACE_FULL, tol=1e-10):
    """Decide darkness of a state relative to the chosen subspace.

    single_excitation expects the (n+1)-component block vector and
    requires both the emission amplitude and the photon support below
    tol.  full expects a 2^n atomic-sector vector and additionally
    requires the absorption channel to vanish.  States without atomic
    excitation are never dark (there is nothing stored to protect).
    """
    psi = np.asarray(psi, dtype=complex)
    gs = model.couplings()
    n = model.n_atoms
    if subspace == SUBSPACE_SINGLE:
        if psi.shape != (n + 1,):
            raise ValueError(f"expected a {n + 1}-component block vector, got {psi.shape}")
        atomic = psi[:n]
        photon_support = float(abs(psi[n]) ** 2)
        emit = float(abs(np.dot(gs, atomic)))
        # raising amplitudes land on two-excitation pair states
        absorb_sq = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                absorb_sq += abs(gs[i] * atomic[j] + gs[j] * atomic[i]) ** 2
        absorb = float(np.sqrt(absorb_sq))
        dark = emit <= tol and photon_support <= tol
        return DarknessReport(dark, emit, absorb, photon_support, subspace)
    if subspace == SUBSPACE_FULL:
        if psi.shape != (2**n,):
            raise ValueError(f"expected a {2**n}-component atomic vector, got {psi.shape}")
        emit = float(np.linalg.norm(_lower_all(psi, gs)))
        absorb = float(np.linalg.norm(_raise_all(psi, gs)))
        excitation = _atomic_excitation(psi)
        dark = emit <= tol and absorb <= tol and excitation > tol
        return DarknessReport(dark, emit, absorb, 0.0, subspace)
    raise ValueError(f"unknown subspace {subspace!r}")


def _dark_filter_single(model, vectors, tol):
    return [v for v in vectors if is_dark(model, v, SUBSPACE_SINGLE, tol).is_dark]


def find_dark_states(model, subspace=SUBSPACE_SINGLE, tol=1e-10):
    """All eigenvectors of the relevant Hamiltonian that test dark.

    Degenerate clusters are searched as subspaces: the bright channels
    (photon support and emission, plus absorption in the full model) are
    stacked into one linear map on the cluster basis and its null space
    gives the dark combinations, so darkness hiding inside an arbitrary
    eigenvector rotation is still found.  Returns phase-fixed vectors;
    empty when nothing qualifies (any nonzero frequency split between
    the atoms guarantees that in the one-excitation block).
    """
    n = model.n_atoms
    gs = model.couplings()
    if subspace == SUBSPACE_SINGLE:
        H = _model.single_excitation_block(model)
        spec = _num.herm_eig(H)
        out = []
        for cluster in spec.clusters(_num.max_abs(H)):
            V = spec.eigenvectors[:, cluster]
            if len(cluster) == 1:
                out.extend(_dark_filter_single(model, [V[:, 0]], tol))
                continue
            channels = np.vstack([np.append(gs, 0.0), np.eye(n + 1)[n]]) @ V
            for w in _num.null_space(channels, tol=max(tol, 1e-12)):
                candidate = _num.fix_phase(_num.normalize(V @ w))
                if is_dark(model, candidate, SUBSPACE_SINGLE, tol).is_dark:
                    out.append(candidate)
        return out

    if subspace == SUBSPACE_FULL:
        H = _model.build_full_hamiltonian(model)
        spec = _num.herm_eig(H)
        dim_atomic = 2**n
        out = []
        for cluster in spec.clusters(_num.max_abs(H)):
            V = spec.eigenvectors[:, cluster]
            candidates = []
            if len(cluster) == 1:
                candidates = [V[:, 0]]
            else:
                # stack photon projector plus both atomic channels on the
                # zero-photon content
                proj_rows = V[dim_atomic:, :]
                emit_rows = np.column_stack(
                    [_lower_all(V[:dim_atomic, k], gs) for k in range(V.shape[1])]
                )
                absorb_rows = np.column_stack(
                    [_raise_all(V[:dim_atomic, k], gs) for k in range(V.shape[1])]
                )
                channels = np.vstack([proj_rows, emit_rows, absorb_rows])
                candidates = [V @ w for w in _num.null_space(channels, tol=max(tol, 1e-12))]
            for cand in candidates:
                cand = _num.fix_phase(_num.normalize(cand))
                atomic = cand[:dim_atomic]
                support = 1.0 - float(np.linalg.norm(atomic) ** 2)
                if support > tol:
                    continue
                report = is_dark(model, _num.normalize(atomic), SUBSPACE_FULL, tol)
                if report.is_dark:
                    out.append(cand)
        return out

    raise ValueError(f"unknown subspace {subspace!r}")
