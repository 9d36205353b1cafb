import math

import numpy as np
import pytest

from cavitydark.model import (
    AtomParams,
    BasisLabel,
    CavityModel,
    HBAR,
    EPSILON_0,
    ModelFormatError,
    apply_zs_shift,
    basis_index,
    basis_labels,
    build_full_hamiltonian,
    coupling_from_position,
    excitation_number_operator,
    half_wavelength,
    parse_model,
    single_excitation_block,
    single_excitation_indices,
)


def two_atom_model(w1=1.0, w2=1.0, g1=0.01, g2=0.005, wc=1.0, cutoff=1, rwa=True):
    return CavityModel(
        omega_c=wc,
        atoms=(AtomParams(omega=w1, g=g1), AtomParams(omega=w2, g=g2)),
        photon_cutoff=cutoff,
        rwa=rwa,
    )


def random_model(gen, n_atoms=None, cutoff=None, rwa=True):
    n = n_atoms if n_atoms is not None else int(gen.integers(1, 5))
    cut = cutoff if cutoff is not None else int(gen.integers(1, 4))
    atoms = tuple(
        AtomParams(omega=float(gen.uniform(0.95, 1.05)), g=float(gen.uniform(0, 0.05)))
        for _ in range(n)
    )
    return CavityModel(omega_c=1.0, atoms=atoms, photon_cutoff=cut, rwa=rwa)


def test_basis_ordering_photon_major():
    m = two_atom_model(cutoff=2)
    labels = basis_labels(m)
    assert len(labels) == m.dim == 3 * 4
    assert labels[0] == BasisLabel(0, "00")
    assert labels[1] == BasisLabel(0, "01")
    assert labels[2] == BasisLabel(0, "10")
    assert labels[4] == BasisLabel(1, "00")
    for i, lab in enumerate(labels):
        assert basis_index(lab, m) == i


def test_full_hamiltonian_decoupled_diagonal():
    wa, wc = 0.98, 1.0
    m = CavityModel(omega_c=wc, atoms=(AtomParams(omega=wa, g=0.0),), photon_cutoff=1)
    H = build_full_hamiltonian(m)
    assert np.array_equal(H, np.diag([0.0, wa, wc, wc + wa]).astype(complex))


def test_full_hamiltonian_matches_one_excitation_block_exactly():
    m = two_atom_model(w1=1.01, w2=1.0, g1=0.013, g2=0.007, wc=1.02)
    H = build_full_hamiltonian(m)
    idx = single_excitation_indices(m)
    block = single_excitation_block(m)
    assert np.array_equal(H[np.ix_(idx, idx)], block)


def test_counter_rotating_difference():
    # dropping the rotating-wave approximation adds exactly the
    # energy-non-conserving terms with weight g
    wa, wc, g = 1.0, 1.0, 0.02
    atoms = (AtomParams(omega=wa, g=g),)
    H_rwa = build_full_hamiltonian(CavityModel(wc, atoms, rwa=True))
    H_full = build_full_hamiltonian(CavityModel(wc, atoms, rwa=False))
    D = H_full - H_rwa
    # basis (|0,0>, |0,1>, |1,0>, |1,1>): the extra terms connect
    # |0,0> <-> |1,1> only
    expected = np.zeros((4, 4), dtype=complex)
    expected[3, 0] = expected[0, 3] = g
    assert np.array_equal(D, expected)


def test_single_excitation_block_two_atoms():
    m = two_atom_model(w1=1.01, w2=0.99, g1=0.02, g2=0.01, wc=1.0)
    H = single_excitation_block(m)
    assert np.array_equal(
        H,
        np.array(
            [[1.01, 0, 0.02], [0, 0.99, 0.01], [0.02, 0.01, 1.0]], dtype=complex
        ),
    )


def test_single_excitation_block_one_atom():
    m = CavityModel(omega_c=1.0, atoms=(AtomParams(omega=0.99, g=0.015),))
    assert np.array_equal(
        single_excitation_block(m),
        np.array([[0.99, 0.015], [0.015, 1.0]], dtype=complex),
    )


def test_single_excitation_block_requires_rwa():
    m = two_atom_model(rwa=False)
    with pytest.raises(ValueError, match="without RWA"):
        single_excitation_block(m)


def test_block_consistency_random_models():
    gen = np.random.default_rng(23)
    for _ in range(25):
        m = random_model(gen)
        H = build_full_hamiltonian(m)
        idx = single_excitation_indices(m)
        assert np.array_equal(H[np.ix_(idx, idx)], single_excitation_block(m))


def test_hermiticity_of_built_matrices():
    gen = np.random.default_rng(29)
    for rwa in (True, False):
        for _ in range(10):
            m = random_model(gen, rwa=rwa)
            H = build_full_hamiltonian(m)
            res = np.max(np.abs(H - H.conj().T))
            assert res <= 1e-14 * max(np.max(np.abs(H)), 1.0)


def test_excitation_conservation_under_rwa():
    gen = np.random.default_rng(31)
    for _ in range(15):
        m = random_model(gen, rwa=True)
        H = build_full_hamiltonian(m)
        N = excitation_number_operator(m)
        assert np.max(np.abs(H @ N - N @ H)) <= 1e-12


def test_excitation_nonconservation_without_rwa():
    gen = np.random.default_rng(37)
    for _ in range(10):
        m = random_model(gen, rwa=False)
        if all(a.g == 0 for a in m.atoms):
            continue
        H = build_full_hamiltonian(m)
        N = excitation_number_operator(m)
        assert np.max(np.abs(H @ N - N @ H)) > 0


def test_dimension_guard():
    atoms = tuple(AtomParams(omega=1.0, g=0.0) for _ in range(13))
    with pytest.raises(ValueError, match="too large"):
        build_full_hamiltonian(CavityModel(1.0, atoms))


def test_apply_zs_shift_examples():
    m = two_atom_model(w1=1.0, w2=1.0, g1=0.01, g2=0.005)
    assert apply_zs_shift(m, 0, 0.0, 0.0) == m
    shifted = apply_zs_shift(m, 0, 0.003, 0.001)
    assert shifted.atoms[0].omega == pytest.approx(1.003, abs=1e-15)
    assert shifted.atoms[0].g == pytest.approx(0.011, abs=1e-15)
    assert shifted.atoms[1] == m.atoms[1]
    assert m.atoms[0].omega == 1.0  # input untouched
    # involution, exact when parameters and shifts are dyadic
    m2 = two_atom_model(w1=1.0, w2=1.0, g1=0.25, g2=0.125)
    assert apply_zs_shift(apply_zs_shift(m2, 0, 0.25, 0.125), 0, -0.25, -0.125) == m2


def test_apply_zs_shift_index_error():
    with pytest.raises(IndexError):
        apply_zs_shift(two_atom_model(), 2, 0.1, 0.0)


def test_coupling_from_position_profile():
    omega_c = 2 * math.pi * 5e14
    L = half_wavelength(omega_c)
    dipole, volume = 1e-29, 1e-15
    gmax = dipole * math.sqrt(HBAR * omega_c / (2 * EPSILON_0 * volume)) / (HBAR * omega_c)
    assert coupling_from_position(0.0, L, omega_c, dipole, volume) == 0.0
    mid = coupling_from_position(L / 2, L, omega_c, dipole, volume)
    assert mid == pytest.approx(gmax, rel=1e-12)
    quarter = coupling_from_position(L / 4, L, omega_c, dipole, volume)
    assert quarter == pytest.approx(gmax / math.sqrt(2), rel=1e-12)
    assert mid >= quarter > 0


def test_coupling_from_position_range_check():
    omega_c = 2 * math.pi * 5e14
    L = half_wavelength(omega_c)
    with pytest.raises(ValueError, match="outside"):
        coupling_from_position(-0.1 * L, L, omega_c, 1e-29, 1e-15)
    with pytest.raises(ValueError, match="outside"):
        coupling_from_position(1.1 * L, L, omega_c, 1e-29, 1e-15)


def test_validity_report():
    m = two_atom_model(w1=0.98, w2=1.0, g1=0.02, g2=0.01, wc=1.0)
    rep = m.validity_report()
    assert rep[0]["detuning"] == pytest.approx(0.02)
    assert rep[0]["coupling_ratio"] == pytest.approx(0.02)
    assert rep[1]["detuning"] == pytest.approx(0.0)


GOOD_MODEL = """
# two atoms, explicit couplings
omega_c = 1.0
rwa = true
photon_cutoff = 1
atom.1.omega = 1.0
atom.1.g = 0.01
atom.2.omega = 1.0
atom.2.g = 0.005
"""


def test_parse_model_explicit_couplings():
    m = parse_model(GOOD_MODEL)
    assert m.omega_c == 1.0
    assert m.rwa is True
    assert m.photon_cutoff == 1
    assert m.atoms == (AtomParams(1.0, 0.01), AtomParams(1.0, 0.005))


def test_parse_model_unknown_key_named_with_line():
    with pytest.raises(ModelFormatError, match="unknown key 'omega_q'") as exc:
        parse_model("omega_c = 1.0\nomega_q = 2.0\natom.1.omega=1\natom.1.g=0\n")
    assert exc.value.line == 2


def test_parse_model_positional_coupling_nondimensionalized():
    omega_c = 2 * math.pi * 5e14
    L = half_wavelength(omega_c)
    text = f"""
omega_c = {omega_c}
dipole = 1e-29
volume = 1e-15
atom.1.omega = {omega_c}
atom.1.x = {L / 2}
atom.2.omega = {omega_c}
atom.2.x = {L / 4}
"""
    m = parse_model(text)
    assert m.omega_c == 1.0
    assert m.atoms[0].omega == pytest.approx(1.0)
    assert m.atoms[0].g == pytest.approx(m.atoms[1].g * math.sqrt(2), rel=1e-12)


@pytest.mark.parametrize(
    "text,fragment,line",
    [
        ("omega_c = 1.0\natom.1.omega = fast\natom.1.g = 0\n", "not a number", 2),
        ("omega_c = 1.0\nomega_c = 2.0\natom.1.omega=1\natom.1.g=0\n", "duplicate", 2),
        ("omega_c = 1.0\natom.2.omega = 1\natom.2.g = 0\n", "contiguous", None),
        ("atom.1.omega = 1\natom.1.g = 0\n", "omega_c", None),
        (
            "omega_c = 1.0\natom.1.omega = 1\natom.1.g = 0\natom.1.x = 1e-7\n",
            "exactly one of",
            None,
        ),
        ("omega_c = 1.0\natom.1.omega = 1\natom.1.x = 1e-7\n", "dipole", 3),
        ("omega_c = 1.0\nrwa = maybe\natom.1.omega=1\natom.1.g=0\n", "true or false", 2),
        ("omega_c = 1.0\njust words\n", "key = value", 2),
        ("omega_c = 1.0\n", "no atoms", None),
    ],
)
def test_parse_model_errors(text, fragment, line):
    with pytest.raises(ModelFormatError, match=fragment) as exc:
        parse_model(text)
    if line is not None:
        assert exc.value.line == line


def test_atom_params_validation():
    with pytest.raises(ValueError):
        AtomParams(omega=-1.0, g=0.0)
    with pytest.raises(ValueError):
        AtomParams(omega=1.0, g=-0.1)
