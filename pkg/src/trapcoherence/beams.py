"""Laguerre-Gaussian beams and crossed-beam bottle traps.

Two identical hollow LG beams crossing at +/- theta (about the y axis, in
the x-z plane, orthogonal polarizations so intensities add) form a
blue-detuned bottle trap with a dark focus.  Near the center the potential
is a power law per axis, V = V0 * (x/a)^(2l), with the characteristic sizes

    l=1 (LG01):  {w0/(2 cos t), w0/2, w0/(2 sin t)}
    l=2 (LG02):  {w0/(sqrt2 cos t), w0/sqrt2, w0/(sqrt2 sin t)}

The intensity profile is normalized so the radial power integral equals the
beam power; V0 below is the exact leading-coefficient scale of the crossed
pair under that normalization.
"""

import csv
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.constants import k as k_B
from scipy.optimize import minimize_scalar
from scipy.special import eval_genlaguerre

from .errors import ConvergenceError, ScanRangeWarning

__all__ = [
    "LGBeam",
    "BBTConfig",
    "TrapCharacterization",
    "lg_intensity",
    "barrier_height_ratio",
    "characterize_bbt",
    "bbt_potential",
    "bbt_potential_grid",
    "extract_power_law",
    "equivalent_trap",
    "write_axis_scan_csv",
]

_AXES = ("x", "y", "z")


@dataclass(frozen=True)
class LGBeam:
    """Hollow Laguerre-Gaussian mode LG_p^oam focused to waist w0."""

    oam: int
    w0: float
    power: float
    wavelength: float
    p: int = 0

    def __post_init__(self):
        if self.oam < 1:
            raise ValueError("oam must be >= 1 (dark-core beams only)")
        if self.p < 0:
            raise ValueError("radial index p must be >= 0")
        if self.w0 <= 0 or self.wavelength <= 0:
            raise ValueError("w0 and wavelength must be positive")
        if self.power < 0:
            raise ValueError("power must be >= 0")

    @property
    def rayleigh_range(self) -> float:
        return math.pi * self.w0**2 / self.wavelength

    def width(self, z):
        """Beam radius w(z) = w0 sqrt(1 + (z/z_R)^2)."""
        return self.w0 * np.sqrt(1.0 + (np.asarray(z, float) / self.rayleigh_range) ** 2)


@dataclass(frozen=True)
class BBTConfig:
    """Two identical crossed LG beams forming a bottle trap.

    half_angle_theta is the half crossing angle (rad, 0 < theta < pi/4);
    alpha_eff converts intensity to potential, V = alpha_eff * I
    (J per W/m^2, positive for a blue-detuned, repulsive trap).
    """

    beam: LGBeam
    half_angle_theta: float
    alpha_eff: float

    def __post_init__(self):
        if not 0.0 < self.half_angle_theta < math.pi / 4:
            raise ValueError("half_angle_theta must lie in (0, pi/4)")
        if self.alpha_eff <= 0:
            raise ValueError("alpha_eff must be positive for a repulsive trap")


@dataclass(frozen=True)
class TrapCharacterization:
    """Characteristic potential V0 (J) and per-axis sizes (m) of a trap."""

    v0: float
    sizes: tuple
    l: int

    def __post_init__(self):
        if self.v0 <= 0:
            raise ValueError("v0 must be positive")
        if len(self.sizes) != 3 or any(a <= 0 for a in self.sizes):
            raise ValueError("sizes must be three positive lengths")
        object.__setattr__(self, "sizes", tuple(float(a) for a in self.sizes))


def lg_intensity(beam: LGBeam, r, z=0.0):
    """Intensity (W/m^2) at radius r from the axis and distance z from focus.

    I(r, z) = (2 P p!) / (pi (l+p)! w^2) * u^l e^-u * L_p^l(u)^2 with
    u = 2 r^2 / w(z)^2, normalized so the radial integral over any
    transverse plane returns the total power P.  Dark on axis for oam >= 1.
    """
    r = np.asarray(r, dtype=float)
    w = beam.width(z)
    u = 2.0 * r**2 / w**2
    norm = (
        2.0
        * beam.power
        * math.factorial(beam.p)
        / (math.pi * math.factorial(beam.oam + beam.p) * w**2)
    )
    lag = eval_genlaguerre(beam.p, beam.oam, u)
    out = norm * u**beam.oam * np.exp(-u) * lag**2
    return float(out) if out.ndim == 0 else out


def barrier_height_ratio(beam_a: LGBeam, beam_b: LGBeam) -> float:
    """Ratio of the peak intensities of two beams at equal power and waist.

    Located by bracketed 1-D maximization over the radial coordinate at the
    focal plane (for p = 0 the peak sits at u = oam, i.e. r = w0 sqrt(oam/2)).
    """
    if not math.isclose(beam_a.power, beam_b.power, rel_tol=1e-12):
        raise ValueError("beams must have equal power")
    if not math.isclose(beam_a.w0, beam_b.w0, rel_tol=1e-12):
        raise ValueError("beams must have equal waist")

    def peak(beam: LGBeam) -> float:
        res = minimize_scalar(
            lambda r: -lg_intensity(beam, r),
            bounds=(0.0, 4.0 * beam.w0),
            method="bounded",
            options={"xatol": 1e-12 * beam.w0},
        )
        if not res.success:
            raise ConvergenceError(f"intensity maximization failed: {res.message}")
        return -res.fun

    return peak(beam_a) / peak(beam_b)


def characterize_bbt(cfg: BBTConfig) -> TrapCharacterization:
    """Characteristic potential, sizes and power-law order of the trap.

    V0 = 2 alpha_eff P / (pi w0^2) is the leading-coefficient scale of the
    crossed pair (each beam carrying power P): the small-signal expansion
    along every axis is exactly V0 * (x / a_axis)^(2l) with the sizes below.
    """
    beam, theta = cfg.beam, cfg.half_angle_theta
    if beam.oam not in (1, 2):
        raise ValueError(f"unsupported oam {beam.oam}: bottle traps need 1 or 2")
    if beam.power <= 0:
        raise ValueError("beam power must be positive")
    v0 = 2.0 * cfg.alpha_eff * beam.power / (math.pi * beam.w0**2)
    half = 2.0 if beam.oam == 1 else math.sqrt(2.0)
    a_y = beam.w0 / half
    sizes = (a_y / math.cos(theta), a_y, a_y / math.sin(theta))
    return TrapCharacterization(v0=v0, sizes=sizes, l=beam.oam)


def bbt_potential(cfg: BBTConfig, x, y, z):
    """Trap potential (J) at lab coordinates, broadcast over the inputs.

    The beams propagate at +/- theta from the z axis in the x-z plane;
    orthogonal polarizations mean the intensities add without interference.
    """
    x, y, z = np.broadcast_arrays(
        np.asarray(x, float), np.asarray(y, float), np.asarray(z, float)
    )
    theta = cfg.half_angle_theta
    sin_t, cos_t = math.sin(theta), math.cos(theta)
    total = np.zeros_like(x)
    for sign in (+1.0, -1.0):
        z_beam = sign * sin_t * x + cos_t * z
        x_beam = cos_t * x - sign * sin_t * z
        r_beam = np.sqrt(x_beam**2 + y**2)
        total = total + lg_intensity(cfg.beam, r_beam, z_beam)
    out = cfg.alpha_eff * total
    return float(out) if out.ndim == 0 else out


def bbt_potential_grid(cfg: BBTConfig, axis: str, samples) -> np.ndarray:
    """Potential samples (J) along one coordinate axis through the center.

    Samples beyond the trap bound on that axis are evaluated anyway but
    flagged with a ScanRangeWarning, since the power-law picture stops
    being meaningful there.
    """
    if axis not in _AXES:
        raise ValueError(f"axis must be one of {_AXES}, got {axis!r}")
    samples = np.asarray(samples, dtype=float)
    char = characterize_bbt(cfg)
    bound = char.sizes[_AXES.index(axis)]
    if np.any(np.abs(samples) > bound):
        warnings.warn(
            f"scan exceeds the {axis}-axis trap bound {bound:.3e} m",
            ScanRangeWarning,
            stacklevel=2,
        )
    coords = {name: np.zeros_like(samples) for name in _AXES}
    coords[axis] = samples
    return bbt_potential(cfg, coords["x"], coords["y"], coords["z"])


def extract_power_law(positions, values, l: int, include_next_order: bool = False):
    """Least-squares fit of V(x) = lam * x^(2l) (+ optional next even power).

    Parameters
    ----------
    positions, values : array_like
        At least 7 samples, symmetric about 0.
    l : int
        Power-law order to fit.
    include_next_order : bool
        Also fit a x^(2l+2) term; only lam is returned either way.

    Returns
    -------
    (lam, rel_residual) : tuple of float
        Coefficient and the rms residual relative to the largest sample
        magnitude.
    """
    x = np.asarray(positions, dtype=float)
    v = np.asarray(values, dtype=float)
    if x.shape != v.shape or x.ndim != 1:
        raise ValueError("positions and values must be 1-D and equal length")
    if x.size < 7:
        raise ValueError(f"need >= 7 samples, got {x.size}")
    xs = np.sort(x)
    if not np.allclose(xs + xs[::-1], 0.0, atol=1e-9 * max(1.0, np.abs(xs).max())):
        raise ValueError("samples must be symmetric about 0")
    cols = [x ** (2 * l)]
    if include_next_order:
        cols.append(x ** (2 * l + 2))
    design = np.column_stack(cols)
    coef, _, rank, _ = np.linalg.lstsq(design, v, rcond=None)
    if rank < design.shape[1]:
        raise ValueError("rank-deficient fit: samples do not constrain the power law")
    resid = design @ coef - v
    scale = float(np.abs(v).max())
    rel = float(np.sqrt(np.mean(resid**2)) / scale) if scale > 0 else 0.0
    return float(coef[0]), rel


def equivalent_trap(char: TrapCharacterization, scale: float) -> TrapCharacterization:
    """Reparametrize a harmonic characterization at a rescaled potential.

    (V0, a) and (V0*scale, a*sqrt(scale)) describe the same physical trap:
    the curvature lambda = V0/a^2 is preserved exactly.  Doubling the
    potential inflates the quoted sizes by sqrt(2), which is how a
    half-depth trap is compared against a quartic one at full depth.
    Only meaningful for l = 1, where the potential is a pure quadratic.
    """
    if scale <= 0:
        raise ValueError("scale must be positive")
    if char.l != 1:
        raise ValueError("potential rescaling equivalence holds only for l = 1")
    sizes = tuple(a * math.sqrt(scale) for a in char.sizes)
    return TrapCharacterization(v0=char.v0 * scale, sizes=sizes, l=1)


def write_axis_scan_csv(path, samples, potential_j) -> None:
    """Emit an axis scan as CSV with axis, potential_J, potential_kB_mK columns."""
    samples = np.asarray(samples, dtype=float)
    potential_j = np.asarray(potential_j, dtype=float)
    if samples.shape != potential_j.shape:
        raise ValueError("samples and potentials must have equal shape")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["axis_m", "potential_J", "potential_kB_mK"])
        for xi, vi in zip(samples, potential_j):
            writer.writerow(
                [f"{xi:.17g}", f"{vi:.17g}", f"{vi / k_B * 1e3:.17g}"]
            )
