"""Basis indexing, ladder operator algebra, and dimension counting."""

import numpy as np
import pytest

from fermibos.fock import (
    DIMENSION_CAP,
    FockBasis,
    StateVector,
    boson_ladder,
    build_basis,
    jordan_wigner_chain,
    ladder_operators,
    manymode_dimension,
    parity_operator,
)


def anticommutator(x, y):
    return x @ y + y @ x


class TestFockBasis:
    def test_index_roundtrip(self):
        basis = build_basis(5)
        for nb in (0, 1):
            for nd in (0, 1):
                for n in range(6):
                    i = basis.index(nb, nd, n)
                    assert basis.unindex(i) == (nb, nd, n)

    def test_dimension(self):
        assert build_basis(8).dimension == 36
        assert build_basis(0).dimension == 4

    def test_index_validation(self):
        basis = build_basis(3)
        with pytest.raises(ValueError):
            basis.index(2, 0, 0)
        with pytest.raises(ValueError):
            basis.index(0, 0, 4)
        with pytest.raises(ValueError):
            basis.unindex(16)

    def test_dimension_cap(self):
        with pytest.raises(ValueError):
            build_basis(DIMENSION_CAP)

    def test_sector_mask_and_boson_numbers(self):
        basis = build_basis(2)
        mask = basis.sector_mask(1, 0)
        assert mask.sum() == 3
        assert np.array_equal(np.nonzero(mask)[0], [6, 7, 8])
        assert np.array_equal(basis.boson_numbers(), np.tile([0.0, 1.0, 2.0], 4))

    def test_top_level_mask(self):
        basis = build_basis(2)
        top = np.nonzero(basis.top_level_mask())[0]
        assert np.array_equal(top, [2, 5, 8, 11])


class TestStateVector:
    def test_rejects_unnormalized(self):
        basis = build_basis(1)
        with pytest.raises(ValueError):
            StateVector(basis, np.ones(basis.dimension))

    def test_accepts_basis_state(self):
        basis = build_basis(1)
        sv = StateVector(basis, basis.state(1, 0, 0))
        assert sv.norm == pytest.approx(1.0)


class TestLadderOperators:
    def test_fermionic_anticommutation(self):
        ops = ladder_operators(build_basis(2))
        eye = np.eye(12)
        assert np.allclose(anticommutator(ops.b_in, ops.b_in_dag), eye)
        assert np.allclose(anticommutator(ops.d_in, ops.d_in_dag), eye)
        assert np.allclose(anticommutator(ops.b_in, ops.d_in), 0.0)
        assert np.allclose(anticommutator(ops.b_in, ops.d_in_dag), 0.0)
        assert np.allclose(ops.b_in @ ops.b_in, 0.0)
        assert np.allclose(ops.d_in @ ops.d_in, 0.0)

    def test_pair_creation_sign_convention(self):
        # The two-qubit mapping puts the minus sign on the pair state:
        # b^dag d^dag |0,0,n> = -|1,1,n> and d^dag |0,0,n> = -|0,1,n>.
        basis = build_basis(1)
        ops = ladder_operators(basis)
        vac = basis.state(0, 0, 0)
        assert np.allclose(ops.b_in_dag @ ops.d_in_dag @ vac, -basis.state(1, 1, 0))
        assert np.allclose(ops.d_in_dag @ vac, -basis.state(0, 1, 0))
        assert np.allclose(ops.b_in_dag @ vac, basis.state(1, 0, 0))

    def test_boson_commutator_defect_only_at_top(self):
        nlev = 6
        a = boson_ladder(nlev)
        comm = a @ a.conj().T - a.conj().T @ a
        expected = np.eye(nlev)
        expected[-1, -1] = -(nlev - 1)  # truncation defect
        assert np.allclose(comm, expected)

    def test_number_operator_diagonal(self):
        basis = build_basis(4)
        ops = ladder_operators(basis)
        num = np.real(np.diag(ops.a_dag @ ops.a))
        assert np.allclose(num, basis.boson_numbers())


class TestParity:
    def test_diagonal_pattern(self):
        basis = build_basis(1)
        p = parity_operator(basis)
        assert np.allclose(np.diag(p), [1, 1, -1, -1, -1, -1, 1, 1])

    def test_anticommutes_with_single_fermion_operators(self):
        basis = build_basis(2)
        ops = ladder_operators(basis)
        p = parity_operator(basis)
        for op in (ops.b_in, ops.b_in_dag, ops.d_in, ops.d_in_dag):
            assert np.allclose(p @ op + op @ p, 0.0)


class TestManymodeDimension:
    def test_ten_modes_five_phonons(self):
        dim = manymode_dimension(10, 5)
        assert dim == 10**10
        assert isinstance(dim, int)

    def test_exact_beyond_float_precision(self):
        # 2^100 cannot be represented exactly as consecutive floats
        assert manymode_dimension(100, 1) == 2**100

    def test_validation(self):
        with pytest.raises(ValueError):
            manymode_dimension(0, 5)
        with pytest.raises(ValueError):
            manymode_dimension(3, 0)


class TestJordanWignerChain:
    def test_anticommutation_three_modes(self):
        ops = jordan_wigner_chain(3)
        eye = np.eye(8)
        for i, ci in enumerate(ops):
            for j, cj in enumerate(ops):
                assert np.allclose(anticommutator(ci, cj), 0.0)
                expected = eye if i == j else 0.0
                assert np.allclose(anticommutator(ci, cj.conj().T), expected)

    def test_two_modes_match_pair_operators(self):
        b, d = jordan_wigner_chain(2)
        ops = ladder_operators(build_basis(0))
        assert np.allclose(np.kron(b.conj().T, np.eye(1)), ops.b_in_dag)
        assert np.allclose(np.kron(d.conj().T, np.eye(1)), ops.d_in_dag)

    def test_needs_at_least_one_mode(self):
        with pytest.raises(ValueError):
            jordan_wigner_chain(0)
