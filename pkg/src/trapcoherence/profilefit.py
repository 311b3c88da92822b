"""Fits of measured 1-D intensity cuts to the hollow-beam profile.

A cut through a dark-core LG0l beam shows two lobes; the model is

    I(x) = amplitude * u^l * exp(-u) + background,  u = 2 (x-center)^2 / w^2

fitted by nonlinear least squares over (w, amplitude, center, background).
A background offset is included even though the ideal mode has none:
camera cuts carry dark offsets (it defaults to 0 and is freely fitted).
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .errors import ConvergenceError, InsufficientStructureError

__all__ = ["IntensityCut", "FitResult", "initial_guess", "fit_lg_cut", "lg_cut_model"]


@dataclass(frozen=True)
class IntensityCut:
    """1-D intensity samples along a line through the beam center.

    positions are in meters (convert camera pixels upstream), values in any
    linear intensity unit; sigma, when given, holds per-sample uncertainties
    used as least-squares weights.
    """

    positions: np.ndarray
    values: np.ndarray
    sigma: np.ndarray | None = None

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        val = np.asarray(self.values, dtype=float)
        if pos.ndim != 1 or pos.shape != val.shape:
            raise ValueError("positions and values must be 1-D and equal length")
        if pos.size < 8:
            raise ValueError(f"need >= 8 samples, got {pos.size}")
        if np.any(np.diff(pos) <= 0):
            raise ValueError("positions must be strictly increasing")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "values", val)
        if self.sigma is not None:
            sig = np.asarray(self.sigma, dtype=float)
            if sig.shape != pos.shape or np.any(sig <= 0):
                raise ValueError("sigma must match positions and be positive")
            object.__setattr__(self, "sigma", sig)


@dataclass(frozen=True)
class FitResult:
    """Fitted waist (m), amplitude, center (m), background and diagnostics."""

    w: float
    amplitude: float
    center: float
    background: float
    rms_residual: float = 0.0
    covariance: np.ndarray | None = None

    def __post_init__(self):
        if self.w <= 0:
            raise ValueError("fitted waist must be positive")
        if self.rms_residual < 0:
            raise ValueError("rms_residual must be >= 0")

    @property
    def params(self) -> np.ndarray:
        return np.array([self.w, self.amplitude, self.center, self.background])

    def uncertainty(self, index: int) -> float:
        """1-sigma uncertainty of parameter `index` (order as in params)."""
        if self.covariance is None:
            return math.nan
        return math.sqrt(max(self.covariance[index, index], 0.0))


def lg_cut_model(x, w, amplitude, center, background, oam: int):
    """Model intensity along the cut for the given parameters."""
    u = 2.0 * (np.asarray(x, float) - center) ** 2 / w**2
    return amplitude * u**oam * np.exp(-u) + background


def _local_maxima(values: np.ndarray) -> np.ndarray:
    v = values
    idx = np.nonzero((v[1:-1] > v[:-2]) & (v[1:-1] >= v[2:]))[0] + 1
    return idx


def initial_guess(data: IntensityCut, oam: int) -> FitResult:
    """Starting point from the double-lobe geometry.

    The lobes of u^l e^-u sit at u = l, i.e. at distance w sqrt(l/2) from
    center, so w = lobe_separation / sqrt(2 l).  Center is the midpoint of
    the dominant lobe on each side of the intensity centroid, amplitude
    follows from the lobe height via the analytic maximum l^l e^-l, and the
    background starts at the minimum value.
    """
    if oam < 1:
        raise ValueError("oam must be >= 1")
    x, v = data.positions, data.values
    if np.ptp(v) == 0.0:
        raise InsufficientStructureError("constant data: no beam structure to fit")
    maxima = _local_maxima(v)
    if maxima.size < 2:
        raise InsufficientStructureError(
            "insufficient structure: need a lobe on each side of the core"
        )
    weights = v - v.min()
    centroid = float(np.dot(x, weights) / weights.sum())
    left = maxima[x[maxima] < centroid]
    right = maxima[x[maxima] >= centroid]
    if left.size == 0 or right.size == 0:
        raise InsufficientStructureError(
            "insufficient structure: need a lobe on each side of the core"
        )
    i_left = left[np.argmax(v[left])]
    i_right = right[np.argmax(v[right])]
    separation = x[i_right] - x[i_left]
    if separation <= 0:
        raise InsufficientStructureError("degenerate lobe positions")
    w = separation / math.sqrt(2.0 * oam)
    background = float(v.min())
    peak = 0.5 * (v[i_left] + v[i_right]) - background
    amplitude = peak / (oam**oam * math.exp(-oam))
    center = float(0.5 * (x[i_left] + x[i_right]))
    return FitResult(w=w, amplitude=amplitude, center=center, background=background)


def _jacobian(params, x, sigma, oam):
    w, amplitude, center, _ = params
    dx = x - center
    u = 2.0 * dx**2 / w**2
    eu = np.exp(-u)
    # d(model)/du = A e^-u u^(l-1) (l - u); u^(l-1) is 1 at u=0 for l=1
    ul_1 = u ** (oam - 1) if oam > 1 else np.ones_like(u)
    dm_du = amplitude * eu * ul_1 * (oam - u)
    cols = np.empty((x.size, 4))
    cols[:, 0] = dm_du * (-2.0 * u / w)
    cols[:, 1] = u**oam * eu
    cols[:, 2] = dm_du * (-4.0 * dx / w**2)
    cols[:, 3] = 1.0
    return cols / sigma[:, None]


def fit_lg_cut(data: IntensityCut, oam: int, init: FitResult | None = None) -> FitResult:
    """Nonlinear least-squares fit of a hollow-beam cut.

    Parameters
    ----------
    data : IntensityCut
        The cut must span at least one intensity lobe on each side of the
        dark core; flat or single-peaked data raises
        InsufficientStructureError.
    oam : int
        Beam order (1 or 2 in practice; any >= 1 accepted).
    init : FitResult, optional
        Starting parameters; derived with `initial_guess` when omitted.

    Returns
    -------
    FitResult
        With the parameter covariance estimated from the final Jacobian and
        the rms residual relative to the fitted lobe height.
    """
    if init is None:
        init = initial_guess(data, oam)
    x, v = data.positions, data.values
    sigma = data.sigma if data.sigma is not None else np.ones_like(v)

    def residuals(params):
        w, amplitude, center, background = params
        return (lg_cut_model(x, w, amplitude, center, background, oam) - v) / sigma

    scale = np.array([init.w, max(abs(init.amplitude), 1e-300), np.ptp(x), 1.0])
    result = least_squares(
        residuals,
        init.params,
        jac=lambda p: _jacobian(p, x, sigma, oam),
        method="lm",
        xtol=1e-12,
        ftol=1e-12,
        gtol=1e-12,
        x_scale=np.abs(scale),
        max_nfev=2000,
    )
    if result.status <= 0:
        raise ConvergenceError(f"profile fit did not converge: {result.message}")
    w, amplitude, center, background = result.x
    w = abs(w)  # the model is even in w

    dof = max(x.size - 4, 1)
    s_sq = 2.0 * result.cost / dof
    jtj = result.jac.T @ result.jac
    try:
        covariance = np.linalg.inv(jtj) * s_sq
    except np.linalg.LinAlgError:
        covariance = np.linalg.pinv(jtj) * s_sq

    peak_height = abs(amplitude) * oam**oam * math.exp(-oam)
    if peak_height == 0.0:
        raise InsufficientStructureError("fit collapsed to zero amplitude")
    model = lg_cut_model(x, w, amplitude, center, background, oam)
    rms = float(np.sqrt(np.mean((model - v) ** 2)) / peak_height)
    return FitResult(
        w=w,
        amplitude=amplitude,
        center=center,
        background=background,
        rms_residual=rms,
        covariance=covariance,
    )
