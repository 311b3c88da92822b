"""Phonon jumping rates, differential-energy-shift dephasing and coherence.

Two noise channels heat the atom out of its phonon state: fractional
trap-depth fluctuations (parametric channel) and trap-position fluctuations
(pointing channel).  Together with the thermal spread of the differential
energy shift (DES) between the qubit states they fix the coherence envelope

    C(t) = exp(-(var_des * t)^2 / 2 - R * t)

whose 1/e time is the reported coherence time.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import hbar, k as k_B

from .basis import BasisSpec, TrapSpectrum, operator_power, position_matrix
from .noise import FRACTIONAL_DEPTH, POINTING, NoiseSpectrum
from .transitions import TransitionTable, transition_table, weighted_sum

__all__ = [
    "CS133_MASS_KG",
    "CS_CLOCK_ETA_780NM",
    "PowerLawTrap",
    "DESParams",
    "CoherenceModel",
    "aux_frequency",
    "frequency_ratio",
    "rate_parametric",
    "rate_pointing",
    "rate_parametric_from_table",
    "rate_pointing_from_table",
    "threshold_ratio",
    "total_rate_3d",
    "var_des",
    "var_des_signed",
    "t2_star",
    "coherence",
    "one_over_e_time",
    "thermal_phonon_number",
]

#: Cs-133 atomic mass (CODATA), kg.
CS133_MASS_KG = 2.20694650e-25

#: Hyperfine factor for the Cs clock transition in a 780 nm trap
#: (9.2 GHz splitting over the effective detuning).  A preset only;
#: run configs state eta explicitly.
CS_CLOCK_ETA_780NM = 2.8e-4


@dataclass(frozen=True)
class PowerLawTrap:
    """One axis of a trap V(x) = lambda * x**(2l), lambda = v_c / a**(2l).

    v_c is the characteristic potential (J), a the characteristic size (m)
    and mass the atom mass (kg).
    """

    l: int
    v_c: float
    a: float
    mass: float

    def __post_init__(self):
        if self.l < 1:
            raise ValueError("trap order l must be >= 1")
        if self.v_c <= 0 or self.a <= 0 or self.mass <= 0:
            raise ValueError("v_c, a and mass must all be positive")

    @property
    def lam(self) -> float:
        """Power-law coefficient lambda = v_c / a**(2l) (J / m^(2l))."""
        return self.v_c / self.a ** (2 * self.l)


@dataclass(frozen=True)
class DESParams:
    """Inputs of the differential-energy-shift variance.

    eta is the dimensionless hyperfine factor, v0_at_atom the trap potential
    at the atom position (J, zero in a well-aligned blue-detuned trap),
    rel_power_var the dimensionless relative power variance Var(P)/Pbar and
    temperature the atom temperature (K).
    """

    eta: float
    v0_at_atom: float
    rel_power_var: float
    temperature: float

    def __post_init__(self):
        if self.eta <= 0:
            raise ValueError("eta must be positive")
        if self.rel_power_var < 0:
            raise ValueError("rel_power_var must be >= 0")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")


@dataclass(frozen=True)
class CoherenceModel:
    """Envelope parameters: DES spread (rad/s) and total jump rate (1/s)."""

    var_des: float
    r_total: float

    def __post_init__(self):
        if self.var_des < 0 or self.r_total < 0:
            raise ValueError("var_des and r_total must be >= 0")


def aux_frequency(trap: PowerLawTrap) -> float:
    """Auxiliary harmonic frequency (rad/s) defining the dimensionless basis.

    omega = (4 v_c / hbar)^(1/(l+1)) * (hbar / (2 M a^2))^(l/(l+1));
    for l = 1 this reduces to sqrt(2 v_c / (M a^2)).
    """
    l = trap.l
    return (4.0 * trap.v_c / hbar) ** (1.0 / (l + 1)) * (
        hbar / (2.0 * trap.mass * trap.a**2)
    ) ** (l / (l + 1.0))


def frequency_ratio(mass: float, a: float, v0: float) -> float:
    """Quartic-to-harmonic frequency ratio (hbar^2 / (8 M a^2 V0))^(1/6).

    This is aux_frequency(l=2) / aux_frequency(l=1) at equal characteristic
    potential v0 and size a.
    """
    if mass <= 0 or a <= 0 or v0 <= 0:
        raise ValueError("mass, a and v0 must be positive")
    return (hbar**2 / (8.0 * mass * a**2 * v0)) ** (1.0 / 6.0)


def _table(spec: TrapSpectrum, k: int, n: int) -> TransitionTable:
    basis = BasisSpec(spec.dim, guard_band=k)
    xk = operator_power(position_matrix(basis), k, basis)
    return transition_table(spec, xk, n)


def rate_parametric_from_table(
    table: TransitionTable, omega_aux: float, s_lambda: NoiseSpectrum
) -> float:
    """Parametric-channel rate (pi omega^2 / 16) * Sum S_lambda(w_mn)|<m|X^2l|n>|^2."""
    if s_lambda.flavor != FRACTIONAL_DEPTH:
        raise ValueError("parametric rate needs a fractional_depth spectrum")
    return math.pi * omega_aux**2 / 16.0 * weighted_sum(table, s_lambda, omega_aux)


def rate_pointing_from_table(
    table: TransitionTable,
    omega_aux: float,
    mass: float,
    l: int,
    s_x: NoiseSpectrum,
) -> float:
    """Pointing-channel rate (pi M omega^3 / 2 hbar) l^2 Sum S_x(w_mn)|<m|X^(2l-1)|n>|^2."""
    if s_x.flavor != POINTING:
        raise ValueError("pointing rate needs a pointing spectrum")
    prefactor = math.pi * mass * omega_aux**3 / (2.0 * hbar)
    return prefactor * l**2 * weighted_sum(table, s_x, omega_aux)


def rate_parametric(
    spec: TrapSpectrum, omega_aux: float, s_lambda: NoiseSpectrum, n: int = 0
) -> float:
    """Phonon jump rate (1/s) out of state n driven by trap-depth noise."""
    return rate_parametric_from_table(_table(spec, 2 * spec.l, n), omega_aux, s_lambda)


def rate_pointing(
    spec: TrapSpectrum, omega_aux: float, mass: float, s_x: NoiseSpectrum, n: int = 0
) -> float:
    """Phonon jump rate (1/s) out of state n driven by pointing noise."""
    table = _table(spec, 2 * spec.l - 1, n)
    return rate_pointing_from_table(table, omega_aux, mass, spec.l, s_x)


def threshold_ratio(sum_l2: float, sum_l1: float, power: int) -> float:
    """Frequency ratio below which the higher-order trap has the lower rate.

    For white noise the rates scale as omega^power times the matrix-element
    sum (power 2 for the parametric channel, 3 for pointing), so the
    crossover sits at (sum_l1 / sum_l2)^(1/power).
    """
    if sum_l1 <= 0 or sum_l2 <= 0:
        raise ValueError("matrix-element sums must be positive")
    if power not in (2, 3):
        raise ValueError("power must be 2 (parametric) or 3 (pointing)")
    return (sum_l1 / sum_l2) ** (1.0 / power)


def total_rate_3d(per_axis_rates) -> float:
    """Total jump rate: plain sum of (R_parametric, R_pointing) over axes."""
    total = 0.0
    for r_lam, r_x in per_axis_rates:
        if r_lam < 0 or r_x < 0:
            raise ValueError("rates must be >= 0")
        total += r_lam + r_x
    return total


def var_des_signed(p: DESParams, l: int) -> float:
    """Signed DES spread (rad/s): eta*(Var(P)/Pbar)*(-V0 + k_B T/(l+1))/hbar.

    The two terms can cancel at v0_at_atom = k_B*T/(l+1); only the magnitude
    enters the coherence envelope.
    """
    if l < 1:
        raise ValueError("trap order l must be >= 1")
    return (
        p.eta
        * p.rel_power_var
        * (-p.v0_at_atom + k_B * p.temperature / (l + 1.0))
        / hbar
    )


def var_des(p: DESParams, l: int) -> float:
    """Magnitude of the DES spread (rad/s), as used by the envelope."""
    return abs(var_des_signed(p, l))


def t2_star(eta: float, temperature: float) -> float:
    """Inhomogeneous (Ramsey) dephasing time: 0.97 * 2 hbar / (eta k_B T)."""
    if eta <= 0 or temperature <= 0:
        raise ValueError("eta and temperature must be positive")
    return 0.97 * 2.0 * hbar / (eta * k_B * temperature)


def coherence(model: CoherenceModel, t):
    """Coherence envelope C(t) = exp(-(var_des*t)^2/2 - R*t), in (0, 1]."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be >= 0")
    out = np.exp(-0.5 * (model.var_des * t) ** 2 - model.r_total * t)
    return float(out) if out.ndim == 0 else out


def one_over_e_time(model: CoherenceModel) -> float:
    """Time at which the envelope reaches 1/e.

    Solves (var^2/2) t^2 + R t = 1 in the cancellation-free form
    t = 2 / (R + sqrt(R^2 + 2 var^2)), which covers both limits
    (t = 1/R for a pure exponential, t = sqrt(2)/var for a pure Gaussian).
    """
    v, r = model.var_des, model.r_total
    if v == 0.0 and r == 0.0:
        return math.inf
    return 2.0 / (r + math.sqrt(r**2 + 2.0 * v**2))


def thermal_phonon_number(temperature: float, omega: float) -> float:
    """Mean phonon number via the classical relation k_B T = <n> hbar omega."""
    if temperature < 0:
        raise ValueError("temperature must be >= 0")
    if omega <= 0:
        raise ValueError("omega must be positive")
    return k_B * temperature / (hbar * omega)
