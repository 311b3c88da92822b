"""One-sided power spectral densities of trap noise.

Two flavors are distinguished: fractional trap-depth fluctuations
(dimensionless^2 per Hz, i.e. 1/Hz) and pointing fluctuations (m^2/Hz).
The spectral argument is an angular frequency in rad/s throughout; the CLI
flags this convention wherever spectra cross the boundary.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import SpectrumDomainError

__all__ = [
    "FRACTIONAL_DEPTH",
    "POINTING",
    "NoiseSpectrum",
    "white",
    "lorentzian",
    "one_over_f",
    "tabulated",
    "evaluate",
    "rin_to_fractional_depth",
    "load_tabulated_csv",
]

FRACTIONAL_DEPTH = "fractional_depth"
POINTING = "pointing"
_FLAVORS = (FRACTIONAL_DEPTH, POINTING)
_KINDS = ("white", "lorentzian", "one_over_f", "tabulated")


@dataclass(frozen=True)
class NoiseSpectrum:
    """One-sided PSD model; construct via the factory functions below.

    level carries the PSD units (1/Hz for fractional depth, m^2/Hz for
    pointing); width, center and omega_ref are angular frequencies (rad/s).
    Tabulated spectra hold a strictly omega-sorted (omega, S) table.
    """

    kind: str
    flavor: str
    level: float = 0.0
    width: float = 0.0
    center: float = 0.0
    omega_ref: float = 0.0
    table: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown spectrum kind {self.kind!r}")
        if self.flavor not in _FLAVORS:
            raise ValueError(f"unknown spectrum flavor {self.flavor!r}")
        if self.level < 0:
            raise ValueError("spectrum level must be >= 0")
        if self.table is not None:
            table = np.asarray(self.table, dtype=float)
            if table.ndim != 2 or table.shape[1] != 2 or table.shape[0] < 2:
                raise ValueError("table must have shape (N>=2, 2)")
            if np.any(np.diff(table[:, 0]) <= 0):
                raise ValueError("table must be strictly sorted by omega")
            if np.any(table[:, 1] < 0):
                raise ValueError("table PSD values must be >= 0")
            table.setflags(write=False)
            object.__setattr__(self, "table", table)

    def __call__(self, omega: float) -> float:
        return evaluate(self, omega)


def white(level: float, flavor: str = FRACTIONAL_DEPTH) -> NoiseSpectrum:
    """Flat spectrum S(omega) = level."""
    return NoiseSpectrum(kind="white", flavor=flavor, level=level)


def lorentzian(
    level: float, width: float, center: float = 0.0, flavor: str = FRACTIONAL_DEPTH
) -> NoiseSpectrum:
    """S(omega) = level * width^2 / (width^2 + (omega - center)^2)."""
    if width <= 0:
        raise ValueError("lorentzian width must be positive")
    return NoiseSpectrum(
        kind="lorentzian", flavor=flavor, level=level, width=width, center=center
    )


def one_over_f(
    level: float, omega_ref: float, flavor: str = FRACTIONAL_DEPTH
) -> NoiseSpectrum:
    """S(omega) = level * omega_ref / omega; undefined at omega = 0."""
    if omega_ref <= 0:
        raise ValueError("omega_ref must be positive")
    return NoiseSpectrum(
        kind="one_over_f", flavor=flavor, level=level, omega_ref=omega_ref
    )


def tabulated(table, flavor: str = FRACTIONAL_DEPTH) -> NoiseSpectrum:
    """Spectrum interpolated from a sorted (omega, S) table.

    Interpolation is linear in (log omega, log S), appropriate for lab
    spectra spanning decades; segments touching an S = 0 knot fall back to
    linear interpolation.  Knots are reproduced exactly.
    """
    return NoiseSpectrum(kind="tabulated", flavor=flavor, table=np.asarray(table, float))


def evaluate(s: NoiseSpectrum, omega: float) -> float:
    """PSD value at angular frequency omega (rad/s)."""
    if omega < 0:
        raise ValueError(f"omega must be >= 0, got {omega}")
    if s.kind == "white":
        return s.level
    if s.kind == "lorentzian":
        return s.level * s.width**2 / (s.width**2 + (omega - s.center) ** 2)
    if s.kind == "one_over_f":
        if omega == 0:
            raise SpectrumDomainError("1/f spectrum is undefined at omega = 0", omega=0.0)
        return s.level * s.omega_ref / omega
    # tabulated
    grid, vals = s.table[:, 0], s.table[:, 1]
    if omega < grid[0] or omega > grid[-1]:
        raise SpectrumDomainError(
            f"omega = {omega:.6e} rad/s outside tabulated range "
            f"[{grid[0]:.6e}, {grid[-1]:.6e}]",
            omega=omega,
        )
    i = int(np.searchsorted(grid, omega))
    if grid[min(i, len(grid) - 1)] == omega:
        return float(vals[min(i, len(grid) - 1)])
    x0, x1 = grid[i - 1], grid[i]
    y0, y1 = vals[i - 1], vals[i]
    if y0 > 0.0 and y1 > 0.0 and x0 > 0.0:
        t = (math.log(omega) - math.log(x0)) / (math.log(x1) - math.log(x0))
        return math.exp((1 - t) * math.log(y0) + t * math.log(y1))
    t = (omega - x0) / (x1 - x0)
    return float((1 - t) * y0 + t * y1)


def rin_to_fractional_depth(rin_db_per_hz: float) -> NoiseSpectrum:
    """White fractional-depth spectrum from a relative intensity noise spec.

    Trap depth is proportional to optical power, so the fractional-depth PSD
    equals the fractional-power PSD: level = 10**(RIN/10) in 1/Hz.
    """
    if not math.isfinite(rin_db_per_hz):
        raise ValueError("RIN must be finite")
    return white(10.0 ** (rin_db_per_hz / 10.0), flavor=FRACTIONAL_DEPTH)


def load_tabulated_csv(path, flavor: str = FRACTIONAL_DEPTH) -> NoiseSpectrum:
    """Load a tabulated spectrum from a 2-column CSV.

    The header names the frequency unit: a first column called
    ``omega_rad_s`` is used as-is, ``freq_Hz`` is converted via
    omega = 2*pi*f.  The second column is the PSD value.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if len(header) < 2:
            raise ValueError(f"{path}: expected 2-column CSV with header")
        unit = header[0].strip().lower()
        if unit == "omega_rad_s":
            scale = 1.0
        elif unit == "freq_hz":
            scale = 2.0 * math.pi
        else:
            raise ValueError(
                f"{path}: first column must be 'omega_rad_s' or 'freq_Hz', got {header[0]!r}"
            )
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or row[0].lstrip().startswith("#"):
                continue
            try:
                rows.append((scale * float(row[0]), float(row[1])))
            except (ValueError, IndexError) as exc:
                raise ValueError(f"{path}:{lineno}: bad row {row!r}") from exc
    return tabulated(np.array(rows), flavor=flavor)
