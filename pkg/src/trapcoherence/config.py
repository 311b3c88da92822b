"""Run configuration: YAML schema, validation and canonicalization.

Configs are a key/value tree with units spelled out in the key names
(mass_kg, waist_m, theta_rad or theta_deg, v_c_J or v_c_kB_mK, ...) because
trap specs in the lab mix mK, uK, um and degrees; explicit suffixes prevent
silent unit errors.  Unknown keys are rejected outright.

`canonical_dict` normalizes a parsed config (degrees to radians, k_B*mK to
joules, RIN to a white level, tabulated spectra to their loaded tables) so
that the provenance hash changes exactly when a semantic field changes.
"""

import hashlib
import json
import math
import os
from dataclasses import dataclass

import yaml
from scipy.constants import k as k_B

from . import noise as noise_models
from .beams import BBTConfig, LGBeam, characterize_bbt
from .decoherence import DESParams, PowerLawTrap
from .errors import ConfigError

__all__ = [
    "AxisModel",
    "RunConfig",
    "load_config",
    "parse_config",
    "config_hash",
]

_AXIS_NAMES = ("x", "y", "z")


@dataclass(frozen=True)
class AxisModel:
    """One trap axis ready for computation."""

    name: str
    trap: PowerLawTrap


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration.

    canonical holds the normalized key/value tree used for hashing and for
    the inputs echo in result records.
    """

    mass_kg: float
    eta: float
    axes: tuple
    l: int
    intensity_noise: noise_models.NoiseSpectrum | None
    pointing_noise: noise_models.NoiseSpectrum | None
    n_basis: int
    guard_band: int
    tol: float
    des: DESParams | None
    bbt: BBTConfig | None
    canonical: dict

    def require_noise(self):
        if self.intensity_noise is None or self.pointing_noise is None:
            raise ConfigError("this command needs a 'noise' section with both "
                              "'intensity' and 'pointing' spectra")

    def require_des(self):
        if self.des is None:
            raise ConfigError("this command needs a 'des' section")


def _fail(path: str, message: str):
    raise ConfigError(f"{path}: {message}")


def _check_mapping(node, path: str) -> dict:
    if not isinstance(node, dict):
        _fail(path, f"expected a mapping, got {type(node).__name__}")
    return node


def _reject_unknown(node: dict, allowed, path: str):
    for key in node:
        if key not in allowed:
            _fail(f"{path}.{key}", "unknown key")


def _get_number(node: dict, key: str, path: str, *, positive=False, nonneg=False):
    if key not in node:
        _fail(path, f"missing key {key!r}")
    value = node[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(f"{path}.{key}", f"expected a number, got {value!r}")
    value = float(value)
    if positive and value <= 0:
        _fail(f"{path}.{key}", f"must be > 0, got {value}")
    if nonneg and value < 0:
        _fail(f"{path}.{key}", f"must be >= 0, got {value}")
    return value


def _get_int(node: dict, key: str, path: str, *, minimum=None):
    if key not in node:
        _fail(path, f"missing key {key!r}")
    value = node[key]
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(f"{path}.{key}", f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        _fail(f"{path}.{key}", f"must be >= {minimum}, got {value}")
    return value


def _energy(node: dict, base: str, path: str) -> float:
    """Energy given either directly in joules or as k_B times mK."""
    j_key, mk_key = f"{base}_J", f"{base}_kB_mK"
    has_j, has_mk = j_key in node, mk_key in node
    if has_j == has_mk:
        _fail(path, f"exactly one of {j_key!r} or {mk_key!r} is required")
    if has_j:
        return _get_number(node, j_key, path)
    return k_B * 1e-3 * _get_number(node, mk_key, path)


def _angle(node: dict, base: str, path: str) -> float:
    """Angle given as <base>_rad or <base>_deg (converted once, here)."""
    rad_key, deg_key = f"{base}_rad", f"{base}_deg"
    has_rad, has_deg = rad_key in node, deg_key in node
    if has_rad == has_deg:
        _fail(path, f"exactly one of {rad_key!r} or {deg_key!r} is required")
    if has_rad:
        return _get_number(node, rad_key, path)
    return math.radians(_get_number(node, deg_key, path))


def _parse_spectrum(node, path: str, flavor: str, base_dir: str):
    node = _check_mapping(node, path)
    if "kind" not in node:
        _fail(path, "missing key 'kind'")
    kind = node["kind"]
    level_key = "level_per_Hz" if flavor == noise_models.FRACTIONAL_DEPTH else "level_m2_per_Hz"
    if kind == "white":
        _reject_unknown(node, {"kind", level_key}, path)
        level = _get_number(node, level_key, path, nonneg=True)
        spectrum = noise_models.white(level, flavor)
        canonical = {"kind": "white", "level": level}
    elif kind == "rin":
        if flavor != noise_models.FRACTIONAL_DEPTH:
            _fail(path, "RIN specs apply to intensity noise only")
        _reject_unknown(node, {"kind", "rin_dB_per_Hz"}, path)
        rin = _get_number(node, "rin_dB_per_Hz", path)
        spectrum = noise_models.rin_to_fractional_depth(rin)
        canonical = {"kind": "white", "level": spectrum.level}
    elif kind == "lorentzian":
        _reject_unknown(node, {"kind", level_key, "width_rad_s", "center_rad_s"}, path)
        level = _get_number(node, level_key, path, nonneg=True)
        width = _get_number(node, "width_rad_s", path, positive=True)
        center = _get_number(node, "center_rad_s", path, nonneg=True) if "center_rad_s" in node else 0.0
        spectrum = noise_models.lorentzian(level, width, center, flavor)
        canonical = {"kind": "lorentzian", "level": level, "width_rad_s": width,
                     "center_rad_s": center}
    elif kind == "one_over_f":
        _reject_unknown(node, {"kind", level_key, "omega_ref_rad_s"}, path)
        level = _get_number(node, level_key, path, nonneg=True)
        omega_ref = _get_number(node, "omega_ref_rad_s", path, positive=True)
        spectrum = noise_models.one_over_f(level, omega_ref, flavor)
        canonical = {"kind": "one_over_f", "level": level, "omega_ref_rad_s": omega_ref}
    elif kind == "tabulated":
        _reject_unknown(node, {"kind", "csv_path"}, path)
        if "csv_path" not in node:
            _fail(path, "missing key 'csv_path'")
        csv_path = node["csv_path"]
        if not os.path.isabs(csv_path):
            csv_path = os.path.join(base_dir, csv_path)
        try:
            spectrum = noise_models.load_tabulated_csv(csv_path, flavor)
        except OSError as exc:
            _fail(f"{path}.csv_path", f"cannot read {csv_path!r}: {exc}")
        except ValueError as exc:
            _fail(f"{path}.csv_path", str(exc))
        canonical = {"kind": "tabulated", "table": spectrum.table.tolist()}
    else:
        _fail(f"{path}.kind", f"unknown spectrum kind {kind!r}")
    return spectrum, canonical


def _parse_trap(node, path: str, mass: float):
    node = _check_mapping(node, path)
    if "kind" not in node:
        _fail(path, "missing key 'kind'")
    kind = node["kind"]
    if kind == "power_law":
        _reject_unknown(node, {"kind", "l", "v_c_J", "v_c_kB_mK", "sizes_m"}, path)
        l = _get_int(node, "l", path, minimum=1)
        v_c = _energy(node, "v_c", path)
        if v_c <= 0:
            _fail(path, "characteristic potential must be > 0")
        sizes = node.get("sizes_m")
        if not isinstance(sizes, list) or not 1 <= len(sizes) <= 3:
            _fail(f"{path}.sizes_m", "expected a list of 1 to 3 sizes in meters")
        for a in sizes:
            if isinstance(a, bool) or not isinstance(a, (int, float)) or a <= 0:
                _fail(f"{path}.sizes_m", f"sizes must be positive numbers, got {a!r}")
        sizes = [float(a) for a in sizes]
        axes = tuple(
            AxisModel(name, PowerLawTrap(l=l, v_c=v_c, a=a, mass=mass))
            for name, a in zip(_AXIS_NAMES, sizes)
        )
        canonical = {"kind": "power_law", "l": l, "v_c_J": v_c, "sizes_m": sizes}
        return axes, l, None, canonical
    if kind == "bbt":
        _reject_unknown(
            node,
            {"kind", "oam", "waist_m", "power_W", "wavelength_m",
             "theta_rad", "theta_deg", "alpha_eff_J_m2_per_W"},
            path,
        )
        oam = _get_int(node, "oam", path, minimum=1)
        if oam not in (1, 2):
            _fail(f"{path}.oam", f"must be 1 or 2, got {oam}")
        waist = _get_number(node, "waist_m", path, positive=True)
        power = _get_number(node, "power_W", path, positive=True)
        wavelength = _get_number(node, "wavelength_m", path, positive=True)
        theta = _angle(node, "theta", path)
        alpha_eff = _get_number(node, "alpha_eff_J_m2_per_W", path, positive=True)
        try:
            bbt = BBTConfig(
                beam=LGBeam(oam=oam, w0=waist, power=power, wavelength=wavelength),
                half_angle_theta=theta,
                alpha_eff=alpha_eff,
            )
        except ValueError as exc:
            _fail(path, str(exc))
        char = characterize_bbt(bbt)
        axes = tuple(
            AxisModel(name, PowerLawTrap(l=char.l, v_c=char.v0, a=a, mass=mass))
            for name, a in zip(_AXIS_NAMES, char.sizes)
        )
        canonical = {
            "kind": "bbt", "oam": oam, "waist_m": waist, "power_W": power,
            "wavelength_m": wavelength, "theta_rad": theta,
            "alpha_eff_J_m2_per_W": alpha_eff,
        }
        return axes, char.l, bbt, canonical
    _fail(f"{path}.kind", f"must be 'power_law' or 'bbt', got {kind!r}")


def parse_config(tree: dict, base_dir: str = ".") -> RunConfig:
    """Validate a parsed YAML tree and build the run configuration."""
    tree = _check_mapping(tree, "config")
    _reject_unknown(tree, {"atom", "trap", "noise", "compute", "des"}, "config")
    for section in ("atom", "trap"):
        if section not in tree:
            _fail("config", f"missing section {section!r}")

    atom = _check_mapping(tree["atom"], "atom")
    _reject_unknown(atom, {"mass_kg", "eta"}, "atom")
    mass = _get_number(atom, "mass_kg", "atom", positive=True)
    eta = _get_number(atom, "eta", "atom", positive=True)

    axes, l, bbt, trap_canonical = _parse_trap(tree["trap"], "trap", mass)

    intensity = pointing = None
    noise_canonical = None
    if "noise" in tree:
        noise_node = _check_mapping(tree["noise"], "noise")
        _reject_unknown(noise_node, {"intensity", "pointing"}, "noise")
        noise_canonical = {}
        if "intensity" in noise_node:
            intensity, canon = _parse_spectrum(
                noise_node["intensity"], "noise.intensity",
                noise_models.FRACTIONAL_DEPTH, base_dir,
            )
            noise_canonical["intensity"] = canon
        if "pointing" in noise_node:
            pointing, canon = _parse_spectrum(
                noise_node["pointing"], "noise.pointing",
                noise_models.POINTING, base_dir,
            )
            noise_canonical["pointing"] = canon

    n_basis, guard_band, tol = 80, 8, 1e-8
    if "compute" in tree:
        compute = _check_mapping(tree["compute"], "compute")
        _reject_unknown(compute, {"n_basis", "guard_band", "tol"}, "compute")
        if "n_basis" in compute:
            n_basis = _get_int(compute, "n_basis", "compute", minimum=2)
        if "guard_band" in compute:
            guard_band = _get_int(compute, "guard_band", "compute", minimum=0)
        if "tol" in compute:
            tol = _get_number(compute, "tol", "compute", positive=True)
    if n_basis < 2 * l + 2:
        _fail("compute.n_basis", f"must be >= {2 * l + 2} for trap order l={l}")
    if guard_band < 2 * l:
        _fail("compute.guard_band", f"must be >= {2 * l} for trap order l={l}")

    des = None
    des_canonical = None
    if "des" in tree:
        des_node = _check_mapping(tree["des"], "des")
        _reject_unknown(
            des_node,
            {"rel_power_var", "v0_at_atom_J", "v0_at_atom_kB_mK", "temperature_K"},
            "des",
        )
        rel_power_var = _get_number(des_node, "rel_power_var", "des", nonneg=True)
        v0_at_atom = _energy(des_node, "v0_at_atom", "des") if (
            "v0_at_atom_J" in des_node or "v0_at_atom_kB_mK" in des_node
        ) else 0.0
        temperature = _get_number(des_node, "temperature_K", "des", nonneg=True)
        des = DESParams(
            eta=eta, v0_at_atom=v0_at_atom,
            rel_power_var=rel_power_var, temperature=temperature,
        )
        des_canonical = {
            "rel_power_var": rel_power_var,
            "v0_at_atom_J": v0_at_atom,
            "temperature_K": temperature,
        }

    canonical = {
        "atom": {"mass_kg": mass, "eta": eta},
        "trap": trap_canonical,
        "compute": {"n_basis": n_basis, "guard_band": guard_band, "tol": tol},
    }
    if noise_canonical is not None:
        canonical["noise"] = noise_canonical
    if des_canonical is not None:
        canonical["des"] = des_canonical

    return RunConfig(
        mass_kg=mass,
        eta=eta,
        axes=axes,
        l=l,
        intensity_noise=intensity,
        pointing_noise=pointing,
        n_basis=n_basis,
        guard_band=guard_band,
        tol=tol,
        des=des,
        bbt=bbt,
        canonical=canonical,
    )


def load_config(path) -> RunConfig:
    """Read and validate a YAML run configuration file."""
    try:
        with open(path) as fh:
            tree = yaml.safe_load(fh)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from exc
    if tree is None:
        raise ConfigError(f"{path}: empty config")
    return parse_config(tree, base_dir=os.path.dirname(os.path.abspath(path)))


def config_hash(cfg: RunConfig) -> str:
    """SHA-256 over the canonical config; stable under formatting changes."""
    payload = json.dumps(cfg.canonical, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()
