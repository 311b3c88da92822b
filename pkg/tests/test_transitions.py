import pytest

from trapcoherence.basis import BasisSpec, operator_power, position_matrix, trap_spectrum
from trapcoherence.errors import ClosureWarning, SpectrumDomainError, UnconvergedStateError
from trapcoherence.noise import tabulated, white
from trapcoherence.transitions import transition_table, weighted_sum

# converged quartic sums, frozen from runs at n_basis 60/80/120 (stable to
# nine digits); the two-digit versions 5.83 and 8.48 are the published ones
QUARTIC_SUM_X4 = 5.832363392
QUARTIC_L2_SUM_X3 = 8.485200891


def make_table(spec, k, n=0):
    basis = BasisSpec(spec.dim, guard_band=k)
    xk = operator_power(position_matrix(basis), k, basis)
    return transition_table(spec, xk, n)


class TestHarmonicSums:
    def test_x2_sum_is_two(self, harmonic_spectrum):
        assert make_table(harmonic_spectrum, 2).total == pytest.approx(2.0, abs=1e-10)

    def test_x_sum_is_one_single_entry(self, harmonic_spectrum):
        table = make_table(harmonic_spectrum, 1)
        assert table.total == pytest.approx(1.0, abs=1e-10)
        nonzero = table.m_indices[table.element_sq > 0]
        assert list(nonzero) == [1]

    def test_selection_rules(self, harmonic_spectrum):
        # X couples n to n+-1 only; X^2 couples n to n, n+-2 only
        t1 = make_table(harmonic_spectrum, 1, n=3)
        connected = set(t1.m_indices[t1.element_sq > 1e-20])
        assert connected == {2, 4}
        t2 = make_table(harmonic_spectrum, 2, n=3)
        connected = set(t2.m_indices[t2.element_sq > 1e-20])
        assert connected == {1, 5}


class TestQuarticSums:
    def test_published_values(self, quartic_spectrum):
        table4 = make_table(quartic_spectrum, 4)
        table3 = make_table(quartic_spectrum, 3)
        assert table4.total == pytest.approx(5.83, rel=0.01)
        assert 4 * table3.total == pytest.approx(8.48, rel=0.01)
        # full-precision regression
        assert table4.total == pytest.approx(QUARTIC_SUM_X4, rel=1e-6)
        assert 4 * table3.total == pytest.approx(QUARTIC_L2_SUM_X3, rel=1e-6)

    def test_basis_size_stability(self):
        totals = {}
        for nb in (60, 120):
            spec = trap_spectrum(2, BasisSpec(nb, 8))
            totals[nb] = (make_table(spec, 4).total, 4 * make_table(spec, 3).total)
        for a, b in zip(totals[60], totals[120]):
            assert abs(a - b) / b < 1e-3


class TestClosure:
    def test_sum_rule_all_converged_states(self, quartic_spectrum):
        for n in range(quartic_spectrum.converged_count):
            for k in (1, 2, 3, 4):
                table = make_table(quartic_spectrum, k, n=n)
                assert table.closure_defect_rel < 1e-6, (n, k)

    def test_warns_when_violated(self, quartic_spectrum):
        basis = BasisSpec(quartic_spectrum.dim, guard_band=4)
        x4 = operator_power(position_matrix(basis), 4, basis)
        with pytest.warns(ClosureWarning):
            transition_table(quartic_spectrum, x4, 0, closure_tol=1e-16)

    def test_parity_selection(self, quartic_spectrum):
        parity = quartic_spectrum.parity
        even_k = make_table(quartic_spectrum, 2, n=0)
        for m, sq in zip(even_k.m_indices, even_k.element_sq):
            if parity[m] != parity[0]:
                assert sq < 1e-20
        odd_k = make_table(quartic_spectrum, 3, n=0)
        for m, sq in zip(odd_k.m_indices, odd_k.element_sq):
            if parity[m] == parity[0]:
                assert sq < 1e-20


class TestPreconditions:
    def test_rejects_unconverged_state(self, quartic_spectrum):
        with pytest.raises(UnconvergedStateError):
            make_table(quartic_spectrum, 2, n=quartic_spectrum.dim - 1)

    def test_rejects_dim_mismatch(self, quartic_spectrum):
        basis = BasisSpec(16, 4)
        x2 = operator_power(position_matrix(basis), 2, basis)
        with pytest.raises(ValueError, match="dim"):
            transition_table(quartic_spectrum, x2, 0)


class TestWeightedSum:
    def test_white_reduces_to_plain_sum(self, harmonic_spectrum):
        table = make_table(harmonic_spectrum, 2)
        assert weighted_sum(table, white(1.0), 1e5) == pytest.approx(
            table.total, rel=1e-12
        )

    def test_zero_spectrum(self, harmonic_spectrum):
        table = make_table(harmonic_spectrum, 2)
        assert weighted_sum(table, white(0.0), 1e5) == 0.0

    def test_selective_tabulated_weight(self, harmonic_spectrum):
        # the only X transition out of the harmonic ground state sits at
        # omega_10 = omega_aux; a table covering just that line picks it alone
        table = make_table(harmonic_spectrum, 1)
        omega_aux = 2.0e5
        s = tabulated([[0.9 * omega_aux, 4.0e-12], [1.1 * omega_aux, 4.0e-12]])
        expected = 4.0e-12 * table.element_sq[table.m_indices == 1][0]
        assert weighted_sum(table, s, omega_aux) == pytest.approx(expected, rel=1e-12)

    def test_out_of_range_surfaces_offending_frequency(self, quartic_spectrum):
        table = make_table(quartic_spectrum, 4)
        s = tabulated([[1.0, 1e-12], [10.0, 1e-12]])
        with pytest.raises(SpectrumDomainError) as err:
            weighted_sum(table, s, 1e5)
        assert err.value.omega is not None

    def test_rejects_nonpositive_omega(self, harmonic_spectrum):
        table = make_table(harmonic_spectrum, 2)
        with pytest.raises(ValueError):
            weighted_sum(table, white(1.0), 0.0)
