import numpy as np
import pytest

from cavitydark.darkstates import (
    BRANCH_DEGENERATE,
    BRANCH_SHIFTED,
    DegenerateFrequenciesError,
    SUBSPACE_FULL,
    SUBSPACE_SINGLE,
    analytic_spectrum,
    analytic_spectrum_degenerate,
    analytic_spectrum_shifted,
    dark_state_degenerate,
    find_dark_states,
    is_dark,
    shifted_cubic_coefficients,
    singlet_ensemble,
    with_photon_amplitude,
)
from cavitydark.model import AtomParams, CavityModel, single_excitation_block
from cavitydark.numerics import evolve, herm_eig, max_abs

from oracles import subspace_distance


def block_model(w1=1.0, w2=1.0, g1=0.01, g2=0.005, wc=1.0, cutoff=1):
    return CavityModel(
        omega_c=wc,
        atoms=(AtomParams(omega=w1, g=g1), AtomParams(omega=w2, g=g2)),
        photon_cutoff=cutoff,
    )


def embed_two_atom_single_excitation(vec2):
    """(c_10, c_01) block amplitudes into the 4-dim atomic sector."""
    out = np.zeros(4, dtype=complex)
    out[2] = vec2[0]  # |10>
    out[1] = vec2[1]  # |01>
    return out


def match_to_numeric(analytic, numeric_spec):
    """Pair analytic columns with numeric ones by eigenvalue, then report
    the worst (value error, subspace distance)."""
    order = np.argsort(analytic.eigenvalues)
    dv, dvec = 0.0, 0.0
    for pos, k in enumerate(order):
        dv = max(dv, abs(analytic.eigenvalues[k] - numeric_spec.eigenvalues[pos]))
        dvec = max(
            dvec,
            subspace_distance(
                analytic.eigenvectors[:, k], numeric_spec.eigenvectors[:, pos]
            ),
        )
    return dv, dvec


def test_dark_state_equal_couplings_is_singlet():
    assert np.allclose(
        dark_state_degenerate(1.0, 1.0), np.array([-1, 1]) / np.sqrt(2)
    )


def test_dark_state_unequal_couplings():
    assert np.allclose(dark_state_degenerate(1.0, 2.0), np.array([-2, 1]) / np.sqrt(5))


def test_dark_state_decoupled_second_atom():
    assert np.allclose(dark_state_degenerate(1.0, 0.0), [0.0, 1.0])


def test_dark_state_undefined_for_zero_couplings():
    with pytest.raises(ValueError, match="undefined"):
        dark_state_degenerate(0.0, 0.0)


def test_degenerate_spectrum_resonant_equal_couplings():
    # d = 0, g1 = g2 = g: S = 2 sqrt(2) g, polaritons at omega_c -/+ sqrt(2) g
    wc, g = 1.0, 0.007
    sp = analytic_spectrum_degenerate(wc, wc, g, g)
    assert np.allclose(
        np.sort(sp.eigenvalues), [wc - np.sqrt(2) * g, wc, wc + np.sqrt(2) * g]
    )
    numeric = herm_eig(single_excitation_block(block_model(wc, wc, g, g)))
    dv, dvec = match_to_numeric(sp, numeric)
    assert dv < 1e-12 and dvec < 1e-10


def test_degenerate_spectrum_decoupled():
    sp = analytic_spectrum_degenerate(1.0, 0.97, 0.0, 0.0)
    assert np.allclose(np.sort(sp.eigenvalues), [0.97, 0.97, 1.0])


def test_degenerate_spectrum_generic_matches_numeric():
    sp = analytic_spectrum_degenerate(1.0, 0.99, 0.01, 0.005)
    numeric = herm_eig(single_excitation_block(block_model(0.99, 0.99, 0.01, 0.005)))
    dv, dvec = match_to_numeric(sp, numeric)
    assert dv < 1e-10 and dvec < 1e-9
    assert sp.branch == BRANCH_DEGENERATE


def test_degenerate_spectrum_dark_column_first():
    sp = analytic_spectrum_degenerate(1.0, 0.99, 0.01, 0.005)
    dark = with_photon_amplitude(dark_state_degenerate(0.01, 0.005))
    overlap = abs(np.vdot(sp.eigenvectors[:, 0], dark))
    assert abs(overlap - 1.0) < 1e-14
    assert sp.eigenvectors[2, 0] == 0.0  # no photon amplitude


def test_degenerate_dark_eigenvalue_is_atomic_frequency():
    # the dark eigenvector is purely atomic, so its energy is omega_a;
    # it coincides with omega_c only on resonance
    wc, wa, g1, g2 = 1.0, 0.99, 0.01, 0.005
    H = single_excitation_block(block_model(wa, wa, g1, g2, wc))
    dark = with_photon_amplitude(dark_state_degenerate(g1, g2))
    assert np.linalg.norm(H @ dark - wa * dark) <= 1e-12
    sp = analytic_spectrum_degenerate(wc, wa, g1, g2)
    assert sp.eigenvalues[0] == wa


def test_shifted_spectrum_decoupled_cubic_factors():
    sp = analytic_spectrum_shifted(1.02, 1.01, 1.0, 0.0, 0.0)
    assert np.allclose(sp.eigenvalues, [1.0, 1.01, 1.02], atol=1e-10)


def test_shifted_spectrum_generic_matches_numeric():
    sp = analytic_spectrum_shifted(1.0, 1.01, 1.0, 0.01, 0.005)
    numeric = herm_eig(single_excitation_block(block_model(1.01, 1.0, 0.01, 0.005)))
    dv, dvec = match_to_numeric(sp, numeric)
    assert dv < 1e-9 and dvec < 1e-9
    assert sp.branch == BRANCH_SHIFTED


def test_shifted_raw_vectors_are_eigenvectors():
    wc, w1, w2, g1, g2 = 1.0, 1.013, 0.994, 0.02, 0.011
    sp = analytic_spectrum_shifted(wc, w1, w2, g1, g2)
    H = single_excitation_block(block_model(w1, w2, g1, g2, wc))
    for k in range(3):
        v = sp.raw_eigenvectors[:, k]
        assert v[2] == 1.0  # resolvent form carries photon amplitude one
        res = np.linalg.norm(H @ v - sp.eigenvalues[k] * v)
        assert res <= 1e-8 * max_abs(H)


def test_shifted_spectrum_rejects_equal_frequencies():
    with pytest.raises(DegenerateFrequenciesError, match="degenerate"):
        analytic_spectrum_shifted(1.0, 1.0, 1.0, 0.01, 0.005)


def test_shifted_spectrum_has_no_dark_vector():
    # with a frequency split and both couplings on, every eigenvector
    # carries photon amplitude
    sp = analytic_spectrum_shifted(1.0, 1.002, 1.0, 0.01, 0.005)
    assert np.all(np.abs(sp.eigenvectors[2, :]) > 1e-6)


def test_dispatcher_routes_by_frequency_split():
    assert analytic_spectrum(1.0, 1.0, 1.0, 0.01, 0.005).branch.startswith("degenerate")
    assert analytic_spectrum(1.0, 1.01, 1.0, 0.01, 0.005).branch.startswith("shifted")
    # splits below the routing tolerance go degenerate too
    assert analytic_spectrum(1.0, 1.0 + 1e-12, 1.0, 0.01, 0.005).branch.startswith(
        "degenerate"
    )


def test_vieta_relations():
    gen = np.random.default_rng(41)
    for _ in range(200):
        wc = 1.0
        w1, w2 = gen.uniform(0.95, 1.05, size=2)
        if abs(w1 - w2) < 1e-6:
            continue
        g1, g2 = gen.uniform(0.001, 0.05, size=2)
        A, B, C = shifted_cubic_coefficients(wc, w1, w2, g1, g2)
        b = analytic_spectrum_shifted(wc, w1, w2, g1, g2).eigenvalues
        assert np.isclose(b.sum(), -A, rtol=1e-9)
        assert np.isclose(b[0] * b[1] + b[0] * b[2] + b[1] * b[2], B, rtol=1e-9)
        assert np.isclose(np.prod(b), -C, rtol=1e-9)


def test_analytic_numeric_equivalence_sample():
    # lighter version of the acceptance sweep, both branches
    gen = np.random.default_rng(43)
    for _ in range(200):
        wc = 1.0
        g1, g2 = gen.uniform(0.0005, 0.05, size=2)
        if gen.random() < 0.5:
            wa = wc - gen.uniform(-0.05, 0.05)
            sp = analytic_spectrum_degenerate(wc, wa, g1, g2)
            numeric = herm_eig(single_excitation_block(block_model(wa, wa, g1, g2, wc)))
        else:
            w1, w2 = wc - gen.uniform(-0.05, 0.05, size=2)
            if abs(w1 - w2) < 1e-7:
                continue
            sp = analytic_spectrum_shifted(wc, w1, w2, g1, g2)
            numeric = herm_eig(single_excitation_block(block_model(w1, w2, g1, g2, wc)))
        dv, dvec = match_to_numeric(sp, numeric)
        assert dv <= 1e-8
        assert dvec <= 1e-7


def test_singlet_pair():
    state = singlet_ensemble(2)
    expected = np.zeros(4)
    expected[1] = 1 / np.sqrt(2)  # |01>
    expected[2] = -1 / np.sqrt(2)  # |10>
    assert np.allclose(state, expected)


def test_singlet_two_pairs_sign_pattern():
    state = singlet_ensemble(4)
    assert abs(np.linalg.norm(state) - 1.0) < 1e-12
    nz = {i: state[i].real for i in np.nonzero(np.abs(state) > 1e-12)[0]}
    # |0101>, |0110>, |1001>, |1010> with signs (+, -, -, +)
    assert nz == pytest.approx({5: 0.5, 6: -0.5, 9: -0.5, 10: 0.5})


def test_singlet_rejects_odd_count():
    with pytest.raises(ValueError, match="even"):
        singlet_ensemble(3)


def test_singlet_with_pair_couplings():
    state = singlet_ensemble(2, pair_couplings=[(1.0, 2.0)])
    assert state[1] == pytest.approx(1 / np.sqrt(5))  # g_a / norm on |01>
    assert state[2] == pytest.approx(-2 / np.sqrt(5))  # -g_b / norm on |10>


def test_is_dark_singlet_full_model():
    m = block_model(g1=0.01, g2=0.01)
    report = is_dark(m, singlet_ensemble(2), SUBSPACE_FULL, tol=1e-10)
    assert report.is_dark
    assert report.emit_residual == pytest.approx(0.0, abs=1e-15)
    assert report.absorb_residual == pytest.approx(0.0, abs=1e-15)


def test_is_dark_unequal_couplings_subspace_split():
    g1, g2 = 0.01, 0.005
    m = block_model(g1=g1, g2=g2)
    vec2 = dark_state_degenerate(g1, g2)
    block_vec = with_photon_amplitude(vec2)
    rep_single = is_dark(m, block_vec, SUBSPACE_SINGLE, tol=1e-10)
    assert rep_single.is_dark
    assert rep_single.emit_residual <= 1e-15
    rep_full = is_dark(m, embed_two_atom_single_excitation(vec2), SUBSPACE_FULL, tol=1e-10)
    assert not rep_full.is_dark
    expected_absorb = abs(g1**2 - g2**2) / np.hypot(g1, g2)
    assert rep_full.absorb_residual == pytest.approx(expected_absorb, rel=1e-12)


def test_is_dark_ground_state_excluded():
    m = block_model()
    ground = np.zeros(4, dtype=complex)
    ground[0] = 1.0
    assert not is_dark(m, ground, SUBSPACE_FULL, tol=1e-10).is_dark


def test_is_dark_dimension_mismatch():
    with pytest.raises(ValueError, match="component"):
        is_dark(block_model(), np.zeros(5), SUBSPACE_SINGLE)


def test_find_dark_states_unshifted_single():
    m = block_model(g1=0.01, g2=0.005)
    states = find_dark_states(m, SUBSPACE_SINGLE, tol=1e-8)
    assert len(states) == 1
    expected = with_photon_amplitude(dark_state_degenerate(0.01, 0.005))
    assert abs(abs(np.vdot(states[0], expected)) - 1.0) < 1e-10


def test_find_dark_states_empty_under_frequency_shift():
    m = block_model(w1=1.004, w2=1.0, g1=0.01, g2=0.005)
    assert find_dark_states(m, SUBSPACE_SINGLE, tol=1e-6) == []


def test_find_dark_states_full_model_contains_singlet():
    m = block_model(g1=0.008, g2=0.008, cutoff=1)
    states = find_dark_states(m, SUBSPACE_FULL, tol=1e-8)
    target = np.zeros(8, dtype=complex)
    target[:4] = singlet_ensemble(2)  # zero-photon block first
    assert any(abs(abs(np.vdot(s, target)) - 1.0) < 1e-8 for s in states)


def test_find_dark_states_four_atoms_pairwise_couplings():
    # pairwise-equal couplings that differ between pairs still protect
    # the product of pair singlets
    ga, gb = 0.01, 0.004
    m = CavityModel(
        omega_c=1.0,
        atoms=tuple(AtomParams(omega=1.0, g=g) for g in (ga, ga, gb, gb)),
        photon_cutoff=1,
    )
    psi = singlet_ensemble(4)
    assert is_dark(m, psi, SUBSPACE_FULL, tol=1e-12).is_dark
    states = find_dark_states(m, SUBSPACE_FULL, tol=1e-8)
    target = np.zeros(32, dtype=complex)
    target[:16] = psi
    assert any(abs(np.vdot(s, target)) > 1 - 1e-8 for s in states)


def test_darkness_invariant_under_evolution():
    g1, g2 = 0.01, 0.005
    m = block_model(g1=g1, g2=g2)
    spec = herm_eig(single_excitation_block(m))
    psi = with_photon_amplitude(dark_state_degenerate(g1, g2))
    for t in (1.0, 10.0, 100.0):
        evolved = evolve(spec, psi, t)
        assert is_dark(m, evolved, SUBSPACE_SINGLE, tol=1e-10).is_dark
