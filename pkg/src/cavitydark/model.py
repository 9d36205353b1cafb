"""Cavity-plus-atoms Hamiltonian builders.

A CavityModel is one quantized mode with angular frequency omega_c and n
two-level atoms with transition frequencies omega_i and real nonnegative
couplings g_i.  The full Hamiltonian lives on the Fock(cutoff) x (C^2)^n
product basis, ordered lexicographically with the photon number as the
major index and atom 1 as the most significant atomic bit.  Restricted to
one excitation under the rotating-wave approximation it collapses to the
(n+1) x (n+1) block

    [[omega_1          g_1      ]
     [        ...      ...      ]
     [             omega_n  g_n ]
     [ g_1    ...  g_n  omega_c ]]

in the basis (atom i excited, photon), which is the workhorse of the
dark-state analysis and of the shift-jump protocol.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

C_LIGHT = 299792458.0  # m/s
HBAR = 1.054571817e-34  # J s
EPSILON_0 = 8.8541878128e-12  # F/m

MAX_ATOMS = 12
MAX_DIM = 65536


@dataclass(frozen=True)
class AtomParams:
    """One two-level atom: transition frequency, coupling, optional
    position along the cavity axis (meters, only used to derive g)."""

    omega: float
    g: float
    position: float | None = None

    def __post_init__(self):
        if not (self.omega > 0):
            raise ValueError(f"atom frequency must be positive, got {self.omega}")
        if not (self.g >= 0):
            raise ValueError(f"coupling must be nonnegative, got {self.g}")


@dataclass(frozen=True)
class CavityModel:
    omega_c: float
    atoms: tuple
    photon_cutoff: int = 1
    rwa: bool = True

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        if not (self.omega_c > 0):
            raise ValueError("cavity frequency must be positive")
        if self.photon_cutoff < 1:
            raise ValueError("photon cutoff must be at least 1")
        if len(self.atoms) < 1:
            raise ValueError("model needs at least one atom")

    @property
    def n_atoms(self):
        return len(self.atoms)

    @property
    def dim(self):
        return (self.photon_cutoff + 1) * 2**self.n_atoms

    def omegas(self):
        return np.array([a.omega for a in self.atoms])

    def couplings(self):
        return np.array([a.g for a in self.atoms])

    def detunings(self):
        """d_i = omega_c - omega_i for every atom."""
        return self.omega_c - self.omegas()

    def validity_report(self):
        """Per-atom (detuning/omega_c, g/omega_c) ratios.

        The model is not rejected on large values; the rotating-wave and
        near-resonance assumptions just degrade, so callers can print
        this as a diagnostic.
        """
        return [
            {
                "atom": i + 1,
                "detuning": float(d),
                "detuning_ratio": float(d / self.omega_c),
                "coupling_ratio": float(a.g / self.omega_c),
            }
            for i, (a, d) in enumerate(zip(self.atoms, self.detunings()))
        ]


@dataclass(frozen=True)
class BasisLabel:
    """|photon_number> x |atomic_bits>, bit i of the string = atom i excited."""

    photon_number: int
    atomic_bits: str

    @property
    def excitation(self):
        return self.photon_number + self.atomic_bits.count("1")


def basis_labels(model):
    """All basis labels in matrix order (photon major, atom 1 the most
    significant bit)."""
    n = model.n_atoms
    return [
        BasisLabel(p, format(b, f"0{n}b"))
        for p in range(model.photon_cutoff + 1)
        for b in range(2**n)
    ]


def basis_index(label, model):
    n = model.n_atoms
    if len(label.atomic_bits) != n:
        raise ValueError("atomic bit string length does not match atom count")
    if not (0 <= label.photon_number <= model.photon_cutoff):
        raise ValueError("photon number outside cutoff")
    return label.photon_number * 2**n + int(label.atomic_bits, 2)


def _check_scale(model):
    if model.n_atoms > MAX_ATOMS or model.dim > MAX_DIM:
        raise ValueError(
            f"model too large: n={model.n_atoms}, dim={model.dim} "
            f"(limits {MAX_ATOMS} atoms, dim {MAX_DIM})"
        )


def _atom_operator(op, i, n):
    """Lift a single-atom 2x2 operator to the n-atom product space."""
    out = np.eye(1)
    for j in range(n):
        out = np.kron(out, op if j == i else np.eye(2))
    return out


SIGMA_MINUS = np.array([[0.0, 1.0], [0.0, 0.0]])  # |0><1|
SIGMA_PLUS = SIGMA_MINUS.T
NUMBER_2LVL = np.array([[0.0, 0.0], [0.0, 1.0]])


def build_full_hamiltonian(model):
    """Model Hamiltonian (divided by hbar) on the full truncated basis.

    With rwa=True the interaction is sum_i g_i (a^+ sigma_i^- + a sigma_i^+);
    with rwa=False the full sum_i g_i (sigma_i^+ + sigma_i^-)(a^+ + a).
    Construction is exactly symmetric, so the result is Hermitian to the
    last bit for real couplings.
    """
    _check_scale(model)
    n = model.n_atoms
    nmax = model.photon_cutoff
    a = np.diag(np.sqrt(np.arange(1.0, nmax + 1)), k=1)
    ad = a.T
    eye_p = np.eye(nmax + 1)
    eye_a = np.eye(2**n)

    # diagonal assembled entrywise to keep block extraction bit-exact
    H = np.kron(np.diag(np.arange(nmax + 1) * model.omega_c), eye_a)
    for i, atom in enumerate(model.atoms):
        H += atom.omega * np.kron(eye_p, _atom_operator(NUMBER_2LVL, i, n))

    if model.rwa:
        X = np.zeros_like(H)
        for i, atom in enumerate(model.atoms):
            X += atom.g * np.kron(ad, _atom_operator(SIGMA_MINUS, i, n))
        H += X + X.T
    else:
        field = ad + a
        for i, atom in enumerate(model.atoms):
            H += atom.g * np.kron(field, _atom_operator(SIGMA_MINUS + SIGMA_PLUS, i, n))
    return H.astype(complex)


def single_excitation_indices(model):
    """Full-basis indices of (atom 1 excited, ..., atom n excited, photon)."""
    n = model.n_atoms
    return [2 ** (n - 1 - i) for i in range(n)] + [2**n]


def single_excitation_block(model):
    """Restriction of the RWA Hamiltonian to the one-excitation subspace,
    basis ordered (atom 1 excited, ..., atom n excited, one photon)."""
    if not model.rwa:
        raise ValueError("block structure invalid without RWA")
    n = model.n_atoms
    H = np.zeros((n + 1, n + 1))
    for i, atom in enumerate(model.atoms):
        H[i, i] = atom.omega
        H[i, n] = atom.g
        H[n, i] = atom.g
    H[n, n] = model.omega_c
    return H.astype(complex)


def excitation_number_operator(model):
    """N = a^+ a + sum_i sigma_i^+ sigma_i^- on the full basis."""
    n = model.n_atoms
    nmax = model.photon_cutoff
    N = np.kron(np.diag(np.arange(nmax + 1, dtype=float)), np.eye(2**n))
    for i in range(n):
        N += np.kron(np.eye(nmax + 1), _atom_operator(NUMBER_2LVL, i, n))
    return N.astype(complex)


def apply_zs_shift(model, atom_index, ds, dg):
    """New model with (omega, g) -> (omega + ds, g + dg) for one atom.

    This is the static-field level shift applied before the jump; the
    input model is left untouched.
    """
    if not (0 <= atom_index < model.n_atoms):
        raise IndexError(f"atom index {atom_index} out of range")
    atom = model.atoms[atom_index]
    if atom.g + dg < 0:
        raise ValueError("shifted coupling would be negative")
    shifted = replace(atom, omega=atom.omega + ds, g=atom.g + dg)
    atoms = list(model.atoms)
    atoms[atom_index] = shifted
    return replace(model, atoms=tuple(atoms))


def half_wavelength(omega_c):
    """Cavity length L = pi c / omega_c (half the mode wavelength)."""
    return math.pi * C_LIGHT / omega_c


def coupling_from_position(x, L, omega_c, dipole_moment, volume):
    """Dimensionless coupling g/omega_c for an atom at position x.

    The mode field is E(x) = E0 sin(omega_c x / c) with
    E0 = sqrt(hbar omega_c / (2 eps0 V)); the coupling is the dipole
    matrix element times the local field over hbar.  Inputs are SI; the
    result is divided by omega_c so the rest of the package stays
    unit-free.
    """
    if not (0 <= x <= L):
        raise ValueError(f"position {x} outside the cavity [0, {L}]")
    if volume <= 0:
        raise ValueError("mode volume must be positive")
    e0 = math.sqrt(HBAR * omega_c / (2 * EPSILON_0 * volume))
    return dipole_moment * e0 * math.sin(omega_c * x / C_LIGHT) / (HBAR * omega_c)


class ModelFormatError(ValueError):
    """Model description file is malformed; carries the 1-based line number."""

    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


_GLOBAL_KEYS = {"omega_c", "rwa", "photon_cutoff", "dipole", "volume"}
_ATOM_KEYS = {"omega", "g", "x"}


def parse_model(text):
    """Parse the plain-text key/value model description.

    Grammar (one `key = value` pair per line, '#' starts a comment):

        omega_c       = <float>          required
        rwa           = true|false       default true
        photon_cutoff = <int >= 1>       default 1
        dipole        = <float>          only with positional atoms
        volume        = <float>          only with positional atoms
        atom.<i>.omega = <float>         i = 1..n, contiguous
        atom.<i>.g     = <float>         coupling, or instead:
        atom.<i>.x     = <float>         position in meters (needs dipole,
                                         volume and an SI omega_c)

    Atoms specified by position get their coupling from the mode profile
    and the whole model is returned nondimensionalized (omega_c = 1).
    Unknown or duplicate keys and unparsable numbers are reported with
    their line number.
    """
    globals_ = {}
    atoms = {}
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ModelFormatError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key in seen:
            raise ModelFormatError(f"duplicate key {key!r}", lineno)
        seen.add(key)
        if key.startswith("atom."):
            parts = key.split(".")
            if len(parts) != 3 or parts[2] not in _ATOM_KEYS:
                raise ModelFormatError(f"unknown key {key!r}", lineno)
            try:
                idx = int(parts[1])
            except ValueError:
                raise ModelFormatError(f"bad atom index in {key!r}", lineno) from None
            if idx < 1:
                raise ModelFormatError(f"atom indices are 1-based, got {idx}", lineno)
            atoms.setdefault(idx, {})[parts[2]] = (value, lineno)
        elif key in _GLOBAL_KEYS:
            globals_[key] = (value, lineno)
        else:
            raise ModelFormatError(f"unknown key {key!r}", lineno)

    def as_float(name, value, lineno):
        try:
            out = float(value)
        except ValueError:
            raise ModelFormatError(f"{name}: not a number: {value!r}", lineno) from None
        if not math.isfinite(out):
            raise ModelFormatError(f"{name}: value must be finite", lineno)
        return out

    if "omega_c" not in globals_:
        raise ModelFormatError("missing required key 'omega_c'")
    omega_c = as_float("omega_c", *globals_["omega_c"])

    rwa = True
    if "rwa" in globals_:
        value, lineno = globals_["rwa"]
        if value.lower() not in ("true", "false"):
            raise ModelFormatError(f"rwa: expected true or false, got {value!r}", lineno)
        rwa = value.lower() == "true"

    cutoff = 1
    if "photon_cutoff" in globals_:
        value, lineno = globals_["photon_cutoff"]
        try:
            cutoff = int(value)
        except ValueError:
            raise ModelFormatError(f"photon_cutoff: not an integer: {value!r}", lineno) from None

    dipole = volume = None
    if "dipole" in globals_:
        dipole = as_float("dipole", *globals_["dipole"])
    if "volume" in globals_:
        volume = as_float("volume", *globals_["volume"])

    if not atoms:
        raise ModelFormatError("model has no atoms")
    indices = sorted(atoms)
    if indices != list(range(1, len(indices) + 1)):
        raise ModelFormatError(f"atom indices must be contiguous from 1, got {indices}")

    positional = any("x" in entry for entry in atoms.values())
    params = []
    for i in indices:
        entry = atoms[i]
        if "omega" not in entry:
            raise ModelFormatError(f"atom {i} is missing 'omega'")
        omega = as_float(f"atom.{i}.omega", *entry["omega"])
        if ("g" in entry) == ("x" in entry):
            lineno = next(iter(entry.values()))[1]
            raise ModelFormatError(
                f"atom {i} needs exactly one of 'g' or 'x'", lineno
            )
        if "g" in entry:
            g = as_float(f"atom.{i}.g", *entry["g"])
            params.append(AtomParams(omega=omega, g=g, position=None))
        else:
            x_val, lineno = entry["x"]
            x = as_float(f"atom.{i}.x", x_val, lineno)
            if dipole is None or volume is None:
                raise ModelFormatError(
                    f"atom {i} uses 'x' but 'dipole'/'volume' are not set", lineno
                )
            L = half_wavelength(omega_c)
            if not (0 <= x <= L):
                raise ModelFormatError(
                    f"atom {i}: position {x} outside the cavity [0, {L:.6g}]", lineno
                )
            g = coupling_from_position(x, L, omega_c, dipole, volume)
            params.append(AtomParams(omega=omega, g=g, position=x))

    if positional:
        # couplings from the field profile are already in units of omega_c
        params = [
            replace(a, omega=a.omega / omega_c, g=a.g) for a in params
        ]
        omega_c = 1.0

    return CavityModel(omega_c=omega_c, atoms=tuple(params), photon_cutoff=cutoff, rwa=rwa)


def load_model(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_model(fh.read())
