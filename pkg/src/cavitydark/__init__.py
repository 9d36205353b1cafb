"""Dark states of two-level atoms in a single-mode cavity.

Numerical and closed-form spectra of the coupled atom-photon system,
operational dark-state detection, and a Monte-Carlo simulation of the
shift-jump preparation protocol with its parameter sweeps.
"""

from .darkstates import (
    AnalyticSpectrum,
    DarknessReport,
    analytic_spectrum,
    analytic_spectrum_degenerate,
    analytic_spectrum_shifted,
    dark_state_degenerate,
    find_dark_states,
    is_dark,
    singlet_ensemble,
    with_photon_amplitude,
)
from .model import (
    AtomParams,
    BasisLabel,
    CavityModel,
    ModelFormatError,
    apply_zs_shift,
    basis_index,
    basis_labels,
    build_full_hamiltonian,
    coupling_from_position,
    half_wavelength,
    load_model,
    parse_model,
    single_excitation_block,
    single_excitation_indices,
)
from .numerics import (
    ComplexRootsError,
    NonHermitianError,
    RandomSource,
    Spectrum,
    cubic_roots,
    evolve,
    herm_eig,
    null_space,
)
from .protocol import (
    CycleRecord,
    SweepResult,
    TrialRecord,
    ZSJumpConfig,
    dark_amplitude,
    mean_yield,
    pds_curve,
    pds_max,
    run_trials,
    simulate_cycles,
    success_after_k,
    sweep,
)

__version__ = "0.1.0"
