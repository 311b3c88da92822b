"""Transition frequencies and matrix-element sums between trap eigenstates.

The heating-rate formulas need sums of |<m|X^k|n>|^2 over final states m,
optionally weighted by a noise spectrum evaluated at each transition
frequency.  Dimensionful transition frequencies carry the factor omega/4
because energies are E = (hbar*omega/4)*eps.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .basis import BasisSpec, OperatorMatrix, TrapSpectrum, operator_power, position_matrix
from .errors import ClosureWarning, UnconvergedStateError
from .noise import NoiseSpectrum, evaluate

__all__ = ["TransitionTable", "transition_table", "weighted_sum"]

#: Relative closure-sum-rule defect beyond which a warning is emitted.
CLOSURE_TOL = 1e-6


@dataclass(frozen=True)
class TransitionTable:
    """Transitions |n> -> |m != n> under the operator X^k.

    element_sq[m] = |<m|X^k|n>|^2 and omega_dimless[m] = eps_m - eps_n;
    the dimensionful transition frequency is (omega/4) * omega_dimless.

    Entries run over every final state in the basis: by completeness their
    total equals the exact ||X^k|n>||^2 up to the closure defect, even where
    individual high eigenvalues are not converged, and the quoted sums are
    then stable against the basis size.  The initial state n must be
    converged.
    """

    from_state: int
    k: int
    m_indices: np.ndarray
    omega_dimless: np.ndarray
    element_sq: np.ndarray
    diag_element_sq: float
    closure_defect_rel: float
    converged_count: int

    def __post_init__(self):
        for name in ("m_indices", "omega_dimless", "element_sq"):
            arr = np.asarray(getattr(self, name))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def total(self) -> float:
        """Plain sum over final states, Sum_{m != n} |<m|X^k|n>|^2."""
        return float(self.element_sq.sum())


def transition_table(
    spec: TrapSpectrum,
    xk: OperatorMatrix,
    n: int = 0,
    closure_tol: float = CLOSURE_TOL,
) -> TransitionTable:
    """Matrix-element table for transitions out of eigenstate n.

    Parameters
    ----------
    spec : TrapSpectrum
        Diagonalized trap; n must index a converged state.
    xk : OperatorMatrix
        X^k restricted to the same basis block (from `operator_power`, so
        every entry is exact).
    n : int
        Initial state index.

    The closure sum rule Sum_all_m |<m|X^k|n>|^2 = <n|X^(2k)|n> is checked
    against an exact X^(2k) built with its own guard band; violations beyond
    `closure_tol` (relative) emit a ClosureWarning, which signals that the
    basis is too small for this state and power.
    """
    if n < 0 or n >= spec.converged_count:
        raise UnconvergedStateError(
            f"state {n} is not converged (converged_count={spec.converged_count})"
        )
    dim = spec.dim
    if xk.dim != dim:
        raise ValueError(f"operator dim {xk.dim} does not match spectrum dim {dim}")
    k = xk.bandwidth

    v_n = spec.vectors[:, n]
    w = xk.entries @ v_n
    amplitudes = spec.vectors.T @ w
    all_sq = amplitudes**2

    # exact closure reference <n|X^(2k)|n>
    ref_basis = BasisSpec(dim, guard_band=2 * k)
    x2k = operator_power(position_matrix(ref_basis), 2 * k, ref_basis)
    ref = float(v_n @ x2k.entries @ v_n)
    defect = abs(float(all_sq.sum()) - ref) / ref
    if defect > closure_tol:
        warnings.warn(
            f"closure sum rule violated for state {n}, k={k}: relative defect "
            f"{defect:.3e} (basis too small)",
            ClosureWarning,
            stacklevel=2,
        )

    m = np.arange(dim)
    m = m[m != n]
    return TransitionTable(
        from_state=n,
        k=k,
        m_indices=m,
        omega_dimless=spec.epsilon[m] - spec.epsilon[n],
        element_sq=all_sq[m],
        diag_element_sq=float(all_sq[n]),
        closure_defect_rel=defect,
        converged_count=spec.converged_count,
    )


def weighted_sum(table: TransitionTable, s: NoiseSpectrum, omega_aux: float) -> float:
    """Sum_{m != n} S(omega_mn) * |<m|X^k|n>|^2 with omega_mn in rad/s.

    omega_mn = (omega_aux/4) * (eps_m - eps_n); the spectrum is one-sided,
    so it is evaluated at |omega_mn|.  For a white spectrum this reduces to
    level * table.total.  Transitions with an exactly zero matrix element
    (selection rules) are skipped without querying the spectrum, so domain
    errors only surface for transitions that actually contribute.
    """
    if omega_aux <= 0:
        raise ValueError(f"omega_aux must be positive, got {omega_aux}")
    total = 0.0
    for d, sq in zip(table.omega_dimless, table.element_sq):
        if sq == 0.0:
            continue
        total += evaluate(s, 0.25 * omega_aux * abs(d)) * sq
    return total
