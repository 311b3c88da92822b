"""Assembles library pieces into the computations behind the CLI commands.

Every function here is deterministic: given the same RunConfig it produces
the same numbers, and the dimensionless transition tables are built once
per trap order and reused across axes (only the auxiliary frequency
differs between axes).
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import hbar

from .basis import (
    BasisSpec,
    TrapSpectrum,
    operator_power,
    position_matrix,
    trap_spectrum,
)
from .config import RunConfig, config_hash
from .decoherence import (
    CoherenceModel,
    aux_frequency,
    coherence,
    frequency_ratio,
    one_over_e_time,
    rate_parametric_from_table,
    rate_pointing_from_table,
    total_rate_3d,
    var_des,
)
from .report import ResultRecord
from .transitions import transition_table

__all__ = [
    "AxisRates",
    "RatesResult",
    "spectrum_record",
    "compute_rates",
    "rates_record",
    "coherence_record",
    "compare_records",
]


@dataclass(frozen=True)
class AxisRates:
    name: str
    omega: float
    r_parametric: float
    r_pointing: float


@dataclass(frozen=True)
class RatesResult:
    spectrum: TrapSpectrum
    sum_even: float       # Sum_{m!=0} |<m|X^(2l)|0>|^2
    l2_sum_odd: float     # l^2 Sum_{m!=0} |<m|X^(2l-1)|0>|^2
    axes: tuple
    total: float


def _spectrum(cfg: RunConfig) -> TrapSpectrum:
    return trap_spectrum(cfg.l, BasisSpec(cfg.n_basis, cfg.guard_band), tol=cfg.tol)


def _tables(cfg: RunConfig, spec: TrapSpectrum, n: int = 0):
    tables = {}
    for k in (2 * cfg.l, 2 * cfg.l - 1):
        basis = BasisSpec(spec.dim, guard_band=k)
        xk = operator_power(position_matrix(basis), k, basis)
        tables[k] = transition_table(spec, xk, n)
    return tables


def spectrum_record(cfg: RunConfig) -> ResultRecord:
    """Eigenvalue table: dimensionless levels plus per-axis energies (J)."""
    spec = _spectrum(cfg)
    omegas = [(axis.name, aux_frequency(axis.trap)) for axis in cfg.axes]
    columns = ["k", "epsilon", "converged"] + [f"E_{name}_J" for name, _ in omegas]
    rows = []
    for k in range(spec.dim):
        row = [k, float(spec.epsilon[k]), k < spec.converged_count]
        row += [0.25 * hbar * om * float(spec.epsilon[k]) for _, om in omegas]
        rows.append(row)
    data = {
        "l": cfg.l,
        "n_basis": cfg.n_basis,
        "converged_count": spec.converged_count,
        "omega_rad_s": {name: om for name, om in omegas},
        "table": {"columns": columns, "rows": rows},
    }
    return ResultRecord.create(cfg.canonical, data, config_hash(cfg))


def compute_rates(cfg: RunConfig, n: int = 0) -> RatesResult:
    """Per-axis phonon jump rates for the configured trap and noise."""
    cfg.require_noise()
    spec = _spectrum(cfg)
    tables = _tables(cfg, spec, n)
    even, odd = tables[2 * cfg.l], tables[2 * cfg.l - 1]
    axes = []
    for axis in cfg.axes:
        omega = aux_frequency(axis.trap)
        r_lam = rate_parametric_from_table(even, omega, cfg.intensity_noise)
        r_x = rate_pointing_from_table(odd, omega, cfg.mass_kg, cfg.l, cfg.pointing_noise)
        axes.append(AxisRates(axis.name, omega, r_lam, r_x))
    total = total_rate_3d([(a.r_parametric, a.r_pointing) for a in axes])
    return RatesResult(
        spectrum=spec,
        sum_even=even.total,
        l2_sum_odd=cfg.l**2 * odd.total,
        axes=tuple(axes),
        total=total,
    )


def rates_record(cfg: RunConfig, n: int = 0) -> ResultRecord:
    res = compute_rates(cfg, n)
    rows = [
        [a.name, a.omega, a.r_parametric, a.r_pointing] for a in res.axes
    ]
    data = {
        "l": cfg.l,
        "from_state": n,
        "sum_x_2l": res.sum_even,
        "l2_sum_x_2l_minus_1": res.l2_sum_odd,
        "total_rate_1_s": res.total,
        "table": {
            "columns": ["axis", "omega_rad_s", "R_lambda_1_s", "R_x_1_s"],
            "rows": rows,
        },
    }
    return ResultRecord.create(cfg.canonical, data, config_hash(cfg))


def _coherence_model(cfg: RunConfig) -> tuple:
    cfg.require_des()
    rates = compute_rates(cfg)
    v = var_des(cfg.des, cfg.l)
    model = CoherenceModel(var_des=v, r_total=rates.total)
    return model, rates


def coherence_record(cfg: RunConfig, t_max: float, n_points: int) -> ResultRecord:
    """C(t) samples plus the envelope parameters and 1/e time."""
    if t_max <= 0:
        raise ValueError(f"t_max must be positive, got {t_max}")
    if n_points < 2:
        raise ValueError(f"n_points must be >= 2, got {n_points}")
    model, rates = _coherence_model(cfg)
    ts = np.linspace(0.0, t_max, n_points)
    cs = coherence(model, ts)
    data = {
        "var_des_rad_s": model.var_des,
        "total_rate_1_s": model.r_total,
        "t_1e_s": one_over_e_time(model),
        "table": {
            "columns": ["t_s", "C"],
            "rows": [[float(t), float(c)] for t, c in zip(ts, cs)],
        },
    }
    return ResultRecord.create(cfg.canonical, data, config_hash(cfg))


def _radial_size(cfg: RunConfig) -> float:
    # axis list is (x, y, z); y is the radial direction unaffected by theta
    names = [a.name for a in cfg.axes]
    axis = cfg.axes[names.index("y")] if "y" in names else cfg.axes[0]
    return axis.trap.a


def compare_records(cfg_a: RunConfig, cfg_b: RunConfig) -> ResultRecord:
    """Side-by-side rates, DES spread and predicted 1/e coherence times.

    When the two traps have different orders, the closed-form frequency
    ratio (hbar^2 / (8 M a^2 V0))^(1/6) is evaluated with a = radial size of
    the higher-order trap and V0 = characteristic potential of the
    lower-order trap; the record spells out that assumption.
    """
    model_a, rates_a = _coherence_model(cfg_a)
    model_b, rates_b = _coherence_model(cfg_b)

    def side(model, rates, cfg):
        return {
            "l": cfg.l,
            "omega_rad_s": {a.name: a.omega for a in rates.axes},
            "sum_x_2l": rates.sum_even,
            "l2_sum_x_2l_minus_1": rates.l2_sum_odd,
            "R_parametric_1_s": sum(a.r_parametric for a in rates.axes),
            "R_pointing_1_s": sum(a.r_pointing for a in rates.axes),
            "total_rate_1_s": rates.total,
            "var_des_rad_s": model.var_des,
            "t_1e_s": one_over_e_time(model),
        }

    a_side, b_side = side(model_a, rates_a, cfg_a), side(model_b, rates_b, cfg_b)

    if cfg_a.l == cfg_b.l:
        ratio = None
        assumption = "equal trap orders: no closed-form ratio instance"
    else:
        low, high = (cfg_a, cfg_b) if cfg_a.l < cfg_b.l else (cfg_b, cfg_a)
        a_rad = _radial_size(high)
        v0 = low.axes[0].trap.v_c
        ratio = frequency_ratio(high.mass_kg, a_rad, v0)
        assumption = (
            f"a = radial size of the l={high.l} trap ({a_rad:.6e} m), "
            f"V0 = characteristic potential of the l={low.l} trap ({v0:.6e} J)"
        )

    def winner(x, y):
        if math.isclose(x, y, rel_tol=1e-12, abs_tol=0.0) or (x == y):
            return "tie"
        return "A" if x < y else "B"

    channels = {
        "parametric": winner(a_side["R_parametric_1_s"], b_side["R_parametric_1_s"]),
        "pointing": winner(a_side["R_pointing_1_s"], b_side["R_pointing_1_s"]),
        "des": winner(a_side["var_des_rad_s"], b_side["var_des_rad_s"]),
        "overall": winner(-a_side["t_1e_s"], -b_side["t_1e_s"]),
    }

    scalar_keys = [
        "l", "sum_x_2l", "l2_sum_x_2l_minus_1", "R_parametric_1_s",
        "R_pointing_1_s", "total_rate_1_s", "var_des_rad_s", "t_1e_s",
    ]
    rows = [[key, a_side[key], b_side[key]] for key in scalar_keys]
    for name in sorted(set(a_side["omega_rad_s"]) | set(b_side["omega_rad_s"])):
        rows.append([
            f"omega_{name}_rad_s",
            a_side["omega_rad_s"].get(name, ""),
            b_side["omega_rad_s"].get(name, ""),
        ])

    data = {
        "a": a_side,
        "b": b_side,
        "frequency_ratio_instance": ratio,
        "frequency_ratio_assumption": assumption,
        "winners": channels,
        "table": {"columns": ["quantity", "A", "B"], "rows": rows},
    }
    inputs = {"a": cfg_a.canonical, "b": cfg_b.canonical}
    joint_hash = config_hash(cfg_a) + ":" + config_hash(cfg_b)
    return ResultRecord.create(inputs, data, joint_hash)
