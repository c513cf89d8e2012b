import io

import numpy as np
import pytest

from vanqver import fermion, pauli
from vanqver.fermion import (ClusterAmplitudes, FermionOperator, IntegralSet,
                             SpinOrbitalMap, build_initial_hamiltonian,
                             build_mp_hamiltonian, build_navigator,
                             excitation_indices, jordan_wigner,
                             number_operators, parse_fcidump,
                             reference_determinant_index, reference_state)


def ladder_matrix(index, n, create):
    """Independent occupation-basis oracle for a_p / a_p^dagger.

    Qubit 0 is the most significant bit; the fermionic sign counts occupied
    modes with indices below p.
    """
    dim = 1 << n
    m = np.zeros((dim, dim), dtype=complex)
    bit = 1 << (n - 1 - index)
    for b in range(dim):
        occupied = bool(b & bit)
        if create == occupied:
            continue
        target = b | bit if create else b & ~bit
        preceding = bin(b >> (n - index)).count("1")
        m[target, b] = (-1.0) ** preceding
    return m


def fermion_matrix(op: FermionOperator, n: int) -> np.ndarray:
    dim = 1 << n
    total = np.zeros((dim, dim), dtype=complex)
    for coeff, ops in op.terms:
        m = np.eye(dim, dtype=complex)
        for index, create in ops:
            m = m @ ladder_matrix(index, n, create)
        total += coeff * m
    return total


def random_integrals(m, n_electrons, seed=0):
    rng = np.random.default_rng(seed)
    h = rng.normal(size=(m, m))
    h = 0.5 * (h + h.T)
    eri = rng.normal(size=(m, m, m, m))
    # Symmetrize to the full 8-fold group of real orbitals.
    for perm in ((1, 0, 2, 3), (0, 1, 3, 2), (2, 3, 0, 1)):
        eri = 0.5 * (eri + eri.transpose(perm))
    for perm in ((1, 0, 2, 3), (0, 1, 3, 2), (2, 3, 0, 1)):
        eri = 0.5 * (eri + eri.transpose(perm))
    return IntegralSet(m, n_electrons, h, eri, e_nuclear=0.3)


class TestSpinOrbitalMap:
    def test_closed_shell_blocked_layout(self):
        smap = SpinOrbitalMap.closed_shell(2, 2)
        assert smap.occupied == (0, 2)
        assert smap.virtual == (1, 3)
        assert smap.n_spin_orbitals == 4

    def test_partition_enforced(self):
        with pytest.raises(ValueError):
            SpinOrbitalMap(2, (0, 1), (1, 2, 3))

    def test_spins(self):
        smap = SpinOrbitalMap.closed_shell(3, 4)
        assert [smap.spin_of(p) for p in range(6)] == [0, 0, 0, 1, 1, 1]
        assert smap.spatial_of(4) == 1


class TestJordanWigner:
    def test_number_operator_identity(self):
        op = FermionOperator.from_terms([(1.0, ((0, True), (0, False)))])
        h = jordan_wigner(op, 1)
        assert h.coefficient(pauli.PauliString.from_letters("I")) == 0.5
        assert h.coefficient(pauli.PauliString.from_letters("Z")) == -0.5

    def test_hopping_term(self):
        op = FermionOperator.from_terms([(1.0, ((1, True), (0, False))),
                                         (1.0, ((0, True), (1, False)))])
        h = jordan_wigner(op, 2)
        assert h.coefficient(pauli.PauliString.from_letters("XX")) == 0.5
        assert h.coefficient(pauli.PauliString.from_letters("YY")) == 0.5
        assert len(h) == 2
        assert np.allclose(pauli.to_matrix(h), fermion_matrix(op, 2))

    def test_canonical_anticommutator(self):
        op = FermionOperator.from_terms([(1.0, ((0, False), (0, True))),
                                         (1.0, ((0, True), (0, False)))])
        h = jordan_wigner(op, 1)
        assert h == pauli.PauliSum.identity(1)

    def test_index_out_of_range(self):
        op = FermionOperator.from_terms([(1.0, ((3, True),))])
        with pytest.raises(ValueError):
            jordan_wigner(op, 2)

    def test_anticommutation_relations(self):
        rng = np.random.default_rng(11)
        n = 4
        eye = np.eye(1 << n)
        for _ in range(20):
            p, q = rng.integers(0, n, size=2)
            a_p = pauli.to_matrix(jordan_wigner(
                FermionOperator.from_terms([(1.0, ((int(p), False),))]), n))
            a_q_dag = pauli.to_matrix(jordan_wigner(
                FermionOperator.from_terms([(1.0, ((int(q), True),))]), n))
            a_q = pauli.to_matrix(jordan_wigner(
                FermionOperator.from_terms([(1.0, ((int(q), False),))]), n))
            anti = a_p @ a_q_dag + a_q_dag @ a_p
            expected = eye if p == q else 0 * eye
            assert np.max(np.abs(anti - expected)) <= 1e-12
            assert np.max(np.abs(a_p @ a_q + a_q @ a_p)) <= 1e-12

    def test_matches_matrix_oracle_on_random_products(self):
        rng = np.random.default_rng(5)
        n = 3
        for _ in range(10):
            k = rng.integers(1, 4)
            ops = tuple((int(rng.integers(0, n)), bool(rng.integers(0, 2)))
                        for _ in range(k))
            op = FermionOperator.from_terms([(1.0, ops)])
            assert np.allclose(pauli.to_matrix(jordan_wigner(op, n)),
                               fermion_matrix(op, n), atol=1e-12)


class TestNumberOperators:
    def test_two_spin_orbitals(self):
        smap = SpinOrbitalMap.closed_shell(1, 2)
        n_tot, n_up, n_down = number_operators(smap)
        ident = pauli.PauliString.identity(2)
        assert n_tot.coefficient(ident) == 1.0
        assert n_tot.coefficient(pauli.PauliString.from_ops(2, {0: "Z"})) == -0.5
        assert n_tot.coefficient(pauli.PauliString.from_ops(2, {1: "Z"})) == -0.5
        assert n_up + n_down == n_tot

    def test_reference_count(self):
        smap = SpinOrbitalMap.closed_shell(2, 2)
        n_tot, n_up, n_down = number_operators(smap)
        psi = reference_state(smap)
        assert pytest.approx(2.0) == pauli_expect(n_tot, psi)
        assert pytest.approx(1.0) == pauli_expect(n_up, psi)
        assert pytest.approx(1.0) == pauli_expect(n_down, psi)


def pauli_expect(h, psi):
    return float(np.real(np.conj(psi) @ (pauli.to_matrix(h) @ psi)))


class TestReferenceDeterminant:
    def test_h2_layout(self):
        smap = SpinOrbitalMap.closed_shell(2, 2)
        # occupied spin-orbitals 0 and 2 -> |1010>
        assert reference_determinant_index(smap) == 0b1010


class TestInitialHamiltonian:
    def test_ground_state_is_reference(self):
        smap = SpinOrbitalMap.closed_shell(2, 2)
        eta = np.array([1.0, -1.0, 1.0, -1.0])
        h = build_initial_hamiltonian(eta, smap)
        diag = h.diagonal()
        assert int(np.argmin(diag)) == reference_determinant_index(smap)

    def test_sign_violation_rejected(self):
        smap = SpinOrbitalMap.closed_shell(2, 2)
        with pytest.raises(ValueError):
            build_initial_hamiltonian(np.array([-1.0, -1.0, 1.0, 1.0]), smap)

    def test_zero_entry_rejected(self):
        smap = SpinOrbitalMap.closed_shell(2, 2)
        with pytest.raises(ValueError):
            build_initial_hamiltonian(np.array([1.0, 0.0, 1.0, -1.0]), smap)


class TestMpHamiltonian:
    def test_single_orbital(self):
        ints = IntegralSet(1, 1, np.array([[1.0]]), np.zeros((1, 1, 1, 1)), 0.0)
        smap = SpinOrbitalMap(1, occupied=(0,), virtual=(1,))
        h = build_mp_hamiltonian(ints, smap)
        # f = (1, 1) over the two spin-orbitals of the single spatial orbital.
        assert h.coefficient(pauli.PauliString.identity(2)) == 1.0
        assert h.coefficient(pauli.PauliString.from_ops(2, {0: "Z"})) == -0.5
        assert h.coefficient(pauli.PauliString.from_ops(2, {1: "Z"})) == -0.5

    def test_structure_is_z_only(self):
        ints = random_integrals(3, 4, seed=2)
        smap = SpinOrbitalMap.closed_shell(3, 4)
        h = build_mp_hamiltonian(ints, smap)
        assert h.is_diagonal
        assert all(s.weight <= 1 for s in h.terms)

    def test_ground_state_is_reference(self):
        ints = random_integrals(3, 2, seed=9)
        smap = SpinOrbitalMap.closed_shell(3, 2)
        h = build_mp_hamiltonian(ints, smap)
        # The Fock diagonal of these random integrals may not be aufbau-ordered,
        # so check against the determinant the coefficients actually select.
        diag = h.diagonal()
        f = fermion.fock_diagonal(ints, smap)
        best = 0
        for p in range(smap.n_spin_orbitals):
            if f[p] < 0:
                best |= 1 << (smap.n_spin_orbitals - 1 - p)
        assert int(np.argmin(diag)) == best


class TestMpAgainstFixture:
    def test_ground_eigenvalue_is_not_the_hf_energy(self):
        # The Fock-diagonal Hamiltonian orders determinants correctly but its
        # eigenvalues are orbital-energy sums, not total energies.
        from vanqver.fixtures import load_fixture
        fx = load_fixture("h2")
        h_mp = build_mp_hamiltonian(fx.integrals, fx.smap)
        ground = float(np.min(h_mp.diagonal()))
        assert abs(ground - fx.hf_energy) > 1e-3


class TestNavigator:
    def test_zero_amplitudes_empty(self):
        smap = SpinOrbitalMap.closed_shell(2, 2)
        theta = ClusterAmplitudes.zeros(smap)
        assert len(build_navigator(theta, smap)) == 0

    def test_single_amplitude_matches_matrix_oracle(self):
        smap = SpinOrbitalMap.closed_shell(2, 2)
        theta0 = ClusterAmplitudes.zeros(smap)
        # First single is (0, 1): occupied up -> virtual up.
        assert theta0.singles[0] == (0, 1)
        t = 0.37
        values = theta0.values.copy()
        values[0] = t
        h = build_navigator(theta0.with_values(values), smap)
        a = fermion_matrix(FermionOperator.from_terms(
            [(1.0, ((0, True), (1, False)))]), 4)
        assert np.allclose(pauli.to_matrix(h), t * (a + a.conj().T), atol=1e-12)

    def test_commutes_with_number_operators(self):
        smap = SpinOrbitalMap.closed_shell(2, 2)
        theta0 = ClusterAmplitudes.zeros(smap)
        rng = np.random.default_rng(4)
        theta = theta0.with_values(rng.normal(size=len(theta0)))
        h = pauli.to_matrix(build_navigator(theta, smap))
        for op in number_operators(smap):
            m = pauli.to_matrix(op)
            assert np.max(np.abs(h @ m - m @ h)) <= 1e-10

    def test_spin_conserving_index_sets(self):
        smap = SpinOrbitalMap.closed_shell(2, 2)
        singles, doubles = excitation_indices(smap)
        assert singles == [(0, 1), (2, 3)]
        assert doubles == [(0, 2, 1, 3)]

    def test_amplitude_outside_partition_rejected(self):
        smap = SpinOrbitalMap.closed_shell(2, 2)
        with pytest.raises(ValueError):
            ClusterAmplitudes(smap, ((1, 0),), (), np.array([0.1]))

    def test_hermitian(self):
        smap = SpinOrbitalMap.closed_shell(3, 2)
        theta0 = ClusterAmplitudes.zeros(smap)
        rng = np.random.default_rng(8)
        h = build_navigator(theta0.with_values(rng.normal(size=len(theta0))), smap)
        assert h.is_hermitian()


class TestParseFcidump:
    HEADER = " &FCI NORB=2,NELEC=2,MS2=0,\n  ORBSYM=1,1,\n  ISYM=1,\n &END\n"

    def test_scalar_only(self):
        ints = parse_fcidump(io.StringIO(self.HEADER + " 0.7 0 0 0 0\n"))
        assert ints.e_nuclear == 0.7
        assert not ints.h_pq.any()
        assert not ints.h_pqrs.any()
        assert ints.n_spatial_orbitals == 2
        assert ints.n_electrons == 2

    def test_symmetry_filled(self):
        text = self.HEADER + " 0.5 1 1 2 2\n 0.25 2 1 0 0\n 0.7 0 0 0 0\n"
        ints = parse_fcidump(text)
        assert ints.h_pqrs[0, 0, 1, 1] == 0.5
        assert ints.h_pqrs[1, 1, 0, 0] == 0.5
        assert ints.h_pq[0, 1] == 0.25
        assert ints.h_pq[1, 0] == 0.25

    def test_missing_header(self):
        with pytest.raises(ValueError):
            parse_fcidump(" 0.7 0 0 0 0\n")

    def test_index_out_of_range(self):
        with pytest.raises(ValueError):
            parse_fcidump(self.HEADER + " 0.5 3 1 0 0\n")

    def test_conflicting_symmetry_rejected(self):
        text = self.HEADER + " 0.5 1 2 0 0\n 0.9 2 1 0 0\n"
        with pytest.raises(ValueError):
            parse_fcidump(text)

    def test_fortran_exponent(self):
        ints = parse_fcidump(self.HEADER + " 7.0D-1 0 0 0 0\n")
        assert ints.e_nuclear == pytest.approx(0.7)


class TestFinalHamiltonian:
    def test_scalar_only_gives_identity(self):
        ints = IntegralSet(1, 1, np.zeros((1, 1)), np.zeros((1, 1, 1, 1)), 0.7)
        smap = SpinOrbitalMap(1, occupied=(0,), virtual=(1,))
        h = fermion.build_final_hamiltonian(ints, smap)
        assert h == pauli.PauliSum.identity(2, 0.7)

    def test_hermitian_and_number_conserving(self):
        ints = random_integrals(2, 2, seed=13)
        smap = SpinOrbitalMap.closed_shell(2, 2)
        h = fermion.build_final_hamiltonian(ints, smap)
        assert h.is_hermitian()
        hm = pauli.to_matrix(h)
        for op in number_operators(smap):
            m = pauli.to_matrix(op)
            assert np.max(np.abs(hm @ m - m @ hm)) <= 1e-10

    def test_matches_fermionic_matrix_oracle(self):
        # Independent route: build the same spin-orbital operator with dense
        # ladder matrices and compare the full 16x16 realizations.
        ints = random_integrals(2, 2, seed=21)
        smap = SpinOrbitalMap.closed_shell(2, 2)
        h = fermion.build_final_hamiltonian(ints, smap)
        terms = list(fermion._spin_orbital_one_body(ints, smap))
        terms.extend(fermion._spin_orbital_two_body(ints, smap))
        oracle = fermion_matrix(FermionOperator.from_terms(terms), 4)
        oracle += ints.e_nuclear * np.eye(16)
        assert np.max(np.abs(pauli.to_matrix(h) - oracle)) <= 1e-10
