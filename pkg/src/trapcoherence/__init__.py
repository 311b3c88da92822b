"""Coherence of a single optically trapped atom in power-law traps.

The package diagonalizes trap Hamiltonians of the form V(x) = lambda*x^(2l)
in a harmonic-oscillator basis, computes noise-driven phonon jumping rates
and differential-energy-shift dephasing, and models the crossed
Laguerre-Gaussian bottle-beam traps that realize harmonic (l=1) and quartic
(l=2) confinement.
"""

__version__ = "0.1.0"

from .basis import (
    BasisSpec,
    OperatorMatrix,
    TrapSpectrum,
    diagonalize,
    hamiltonian,
    momentum_squared_matrix,
    operator_power,
    position_matrix,
    trap_spectrum,
)
from .beams import (
    BBTConfig,
    LGBeam,
    TrapCharacterization,
    barrier_height_ratio,
    bbt_potential,
    bbt_potential_grid,
    characterize_bbt,
    equivalent_trap,
    extract_power_law,
    lg_intensity,
)
from .decoherence import (
    CS133_MASS_KG,
    CS_CLOCK_ETA_780NM,
    CoherenceModel,
    DESParams,
    PowerLawTrap,
    aux_frequency,
    coherence,
    frequency_ratio,
    one_over_e_time,
    rate_parametric,
    rate_pointing,
    t2_star,
    thermal_phonon_number,
    threshold_ratio,
    total_rate_3d,
    var_des,
    var_des_signed,
)
from .noise import (
    FRACTIONAL_DEPTH,
    POINTING,
    NoiseSpectrum,
    evaluate,
    load_tabulated_csv,
    lorentzian,
    one_over_f,
    rin_to_fractional_depth,
    tabulated,
    white,
)
from .profilefit import FitResult, IntensityCut, fit_lg_cut, initial_guess, lg_cut_model
from .transitions import TransitionTable, transition_table, weighted_sum
