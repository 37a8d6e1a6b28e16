import numpy as np
import pytest

from sectorlab import _linalg as la
from sectorlab.algebra import full_matrix_algebra, generate_algebra, commutant
from sectorlab.groups import (
    FiniteGroup,
    average,
    builtin_group,
    cyclic_group,
    cyclic_rep_from_unitary,
    fixed_point_algebra,
    intertwiner_space,
    isotypic_decomposition,
    quaternion_group,
    regular_rep,
    rep_from_matrices,
    symmetric_group,
    tensor_power_rep,
    trivial_rep,
)

from conftest import SX, SZ, I2, kron_all


def z2_rep():
    return cyclic_rep_from_unitary(SZ, 2)


class TestFiniteGroup:
    @pytest.mark.parametrize("group", [
        cyclic_group(1), cyclic_group(2), cyclic_group(7),
        symmetric_group(3), quaternion_group(),
    ])
    def test_group_laws(self, group):
        group.validate()

    def test_bad_table_rejected(self):
        with pytest.raises(ValueError):
            FiniteGroup(np.array([[0, 1], [0, 1]])).validate()

    def test_conjugacy_class_counts(self):
        assert len(cyclic_group(5).conjugacy_classes()) == 5
        assert len(symmetric_group(3).conjugacy_classes()) == 3
        assert len(quaternion_group().conjugacy_classes()) == 5

    def test_builtin_lookup(self):
        assert builtin_group("cyclic:3").order == 3
        assert builtin_group("symmetric:3").order == 6
        assert builtin_group("quaternion:8").order == 8
        with pytest.raises(ValueError):
            builtin_group("lie:su2")


class TestRepresentations:
    def test_validation_catches_non_homomorphism(self):
        bad = rep_from_matrices(cyclic_group(2), [I2, np.diag([1, 1j])])
        with pytest.raises(ValueError):
            bad.validate()

    def test_regular_rep_is_valid(self):
        regular_rep(symmetric_group(3)).validate()

    def test_tensor_power(self):
        rep = tensor_power_rep(z2_rep(), 3)
        rep.validate()
        assert rep.dim == 8
        assert np.allclose(rep.matrices[1], kron_all(SZ, SZ, SZ))


class TestAverage:
    def test_identity_is_fixed(self):
        assert np.allclose(average(I2, z2_rep()), I2)

    def test_sx_averages_to_zero(self):
        # (sx + sz sx sz) / 2 = 0
        assert np.allclose(average(SX, z2_rep()), 0.0)

    def test_invariant_untouched(self):
        assert np.allclose(average(SZ, z2_rep()), SZ)

    def test_conditional_expectation_properties(self, rng):
        rep = tensor_power_rep(z2_rep(), 2)
        for _ in range(100):
            f = la.random_hermitian(rng, 4)
            mf = average(f, rep)
            # idempotent
            assert np.linalg.norm(average(mf, rep) - mf) <= 1e-9
            # positive
            sq = f @ f.conj().T
            assert np.linalg.eigvalsh(average(sq, rep)).min() >= -1e-10
            # bimodule over invariants
            a = average(la.random_hermitian(rng, 4), rep)
            b = average(la.random_hermitian(rng, 4), rep)
            res = average(a @ f @ b, rep) - a @ mf @ b
            assert np.linalg.norm(res) <= 1e-9

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            average(np.eye(3), z2_rep())


class TestFixedPointAlgebra:
    def test_trivial_group_fixes_everything(self):
        f = full_matrix_algebra(2)
        fixed = fixed_point_algebra(f, trivial_rep(cyclic_group(1), 2))
        assert fixed.dim == 4

    def test_z2_on_m2_gives_diagonal(self):
        fixed = fixed_point_algebra(full_matrix_algebra(2), z2_rep())
        assert fixed.dim == 2
        for b in fixed.basis:
            assert np.linalg.norm(b - np.diag(np.diag(b))) <= 1e-12

    def test_two_site_even_algebra(self):
        rep = tensor_power_rep(z2_rep(), 2)
        fixed = fixed_point_algebra(full_matrix_algebra(4), rep)
        assert fixed.dim == 8
        fixed.validate()
        # nullspace oracle: {A : U A U* = A} for U = sz x sz
        u = kron_all(SZ, SZ)
        system = np.kron(u, u.conj()) - np.eye(16)
        null = la.nullspace(system)
        assert null.shape[0] == 8

    def test_range_of_average_equals_fixed_points(self, rng):
        rep = tensor_power_rep(z2_rep(), 2)
        fixed = fixed_point_algebra(full_matrix_algebra(4), rep)
        for _ in range(10):
            m = average(la.random_hermitian(rng, 4), rep)
            assert la.span_residual(fixed.basis, m) <= 1e-9

    def test_commutant_of_fixed_points_is_group_algebra(self):
        rep = tensor_power_rep(z2_rep(), 2)
        fixed = fixed_point_algebra(full_matrix_algebra(4), rep)
        comm = commutant(fixed)
        group_alg = generate_algebra(list(rep.matrices))
        assert comm.dim == group_alg.dim
        assert la.same_span(comm.basis, group_alg.basis, 1e-8)


class TestIsotypicDecomposition:
    def test_trivial_group_single_label(self):
        dec = isotypic_decomposition(trivial_rep(cyclic_group(1), 2))
        assert dec.labels == ("gamma0",)
        assert dec.mult_dims == (2,)
        assert dec.irrep_dims == (1,)

    def test_z2_diagonal_rep(self):
        dec = isotypic_decomposition(z2_rep())
        assert dec.n_sectors == 2
        assert dec.mult_dims == (1, 1)
        assert dec.irrep_dims == (1, 1)
        # canonical order: trivial irrep first
        chars = dec.characters()
        assert np.allclose(chars[0], [1, 1])
        assert np.allclose(chars[1], [1, -1])

    def test_z2_chain_eigenspace_oracle(self):
        rep = tensor_power_rep(z2_rep(), 2)
        dec = isotypic_decomposition(rep)
        assert dec.mult_dims == (2, 2)
        assert dec.irrep_dims == (1, 1)
        evals = np.linalg.eigvalsh(kron_all(SZ, SZ).real)
        assert sorted(np.sum(evals == v) for v in (-1, 1)) == [2, 2]
        assert dec.reconstruction_residual(rep) <= 1e-8

    def test_s3_regular_rep(self):
        rep = regular_rep(symmetric_group(3))
        dec = isotypic_decomposition(rep)
        assert dec.irrep_dims == (1, 1, 2)
        assert dec.mult_dims == (1, 1, 2)
        assert dec.reconstruction_residual(rep) <= 1e-8
        assert sum(m * v for m, v in zip(dec.mult_dims, dec.irrep_dims)) == 6

    def test_quaternion_regular_rep(self):
        rep = regular_rep(quaternion_group())
        dec = isotypic_decomposition(rep)
        assert sorted(dec.irrep_dims) == [1, 1, 1, 1, 2]
        assert dec.reconstruction_residual(rep) <= 1e-8

    def test_projections_partition_unity(self):
        rep = tensor_power_rep(z2_rep(), 3)
        dec = isotypic_decomposition(rep)
        assert np.allclose(dec.projections.sum(axis=0), np.eye(8), atol=1e-10)
        w = dec.unitary
        assert np.linalg.norm(w @ la.dagger(w) - np.eye(8)) <= 1e-10

    def test_inequivalent_blocks_have_no_intertwiners(self):
        rep = regular_rep(symmetric_group(3))
        dec = isotypic_decomposition(rep)
        g = dec.group
        for i in range(dec.n_sectors):
            for j in range(dec.n_sectors):
                r1 = rep_from_matrices(g, dec.irreps[i])
                r2 = rep_from_matrices(g, dec.irreps[j])
                dim = len(intertwiner_space(r1, r2))
                assert dim == (1 if i == j else 0)


class TestIntertwiners:
    def test_schur_scalar_for_irreducible(self):
        sign = rep_from_matrices(cyclic_group(2), [np.eye(1), -np.eye(1)])
        space = intertwiner_space(sign, sign)
        assert len(space) == 1

    def test_disjoint_reps_empty(self):
        triv = trivial_rep(cyclic_group(2))
        sign = rep_from_matrices(cyclic_group(2), [np.eye(1), -np.eye(1)])
        assert intertwiner_space(triv, sign) == []

    def test_regular_rep_self_intertwiners(self):
        reg = regular_rep(cyclic_group(2))
        space = intertwiner_space(reg, reg)
        assert len(space) == 2
        for s in space:
            for g in range(2):
                assert np.linalg.norm(
                    s @ reg.matrices[g] - reg.matrices[g] @ s) <= 1e-10

    def test_group_mismatch_rejected(self):
        with pytest.raises(ValueError):
            intertwiner_space(trivial_rep(cyclic_group(2)),
                              trivial_rep(cyclic_group(3)))
