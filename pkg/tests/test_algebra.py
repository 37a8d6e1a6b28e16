import numpy as np
import pytest

from sectorlab import _linalg as la
from sectorlab.algebra import (
    CentralProjectionError,
    DimensionCapError,
    OperatorAlgebra,
    State,
    center,
    commutant,
    full_matrix_algebra,
    generate_algebra,
    minimal_central_projections,
    scalar_algebra,
    state_distance_mod,
    vector_state,
)

from conftest import SX, SZ, I2, kron_all


def closure_dim_bruteforce(generators, include_unit=True):
    """Independent oracle: iterate products, measure span rank by SVD."""
    if not generators:
        return 1 if include_unit else 0
    d = generators[0].shape[0]
    mats = [np.asarray(g, dtype=complex) for g in generators]
    mats += [m.conj().T for m in mats]
    if include_unit:
        mats.append(np.eye(d, dtype=complex))

    def rank(ms):
        stack = np.array([m.reshape(-1) for m in ms])
        s = np.linalg.svd(stack, compute_uv=False)
        return int(np.sum(s > 1e-9 * s[0]))

    r = rank(mats)
    while True:
        prods = [a @ b for a in mats for b in mats]
        mats = mats + prods
        r2 = rank(mats)
        if r2 == r:
            return r
        r = r2
        # keep the list bounded: an SVD basis spans the same space
        stack = np.array([m.reshape(-1) for m in mats])
        _, s, vh = np.linalg.svd(stack, full_matrices=False)
        keep = vh[: int(np.sum(s > 1e-9 * s[0]))]
        mats = [row.reshape(d, d) for row in keep]


def commutant_entrywise(basis, d):
    """Independent oracle: defining equations on matrix units, no kron."""
    rows = []
    for b in basis:
        for i in range(d):
            for j in range(d):
                row = np.zeros(d * d, dtype=complex)
                for k in range(d):
                    row[i * d + k] += b[k, j]
                    row[k * d + j] -= b[i, k]
                rows.append(row)
    _, s, vh = np.linalg.svd(np.array(rows))
    rank = int(np.sum(s > 1e-9 * max(s[0], 1.0)))
    return vh[rank:].conj()


class TestGenerateAlgebra:
    def test_empty_generators_give_scalars(self):
        alg = generate_algebra([], include_unit=True)
        assert alg.dim == 1
        assert alg.contains(np.eye(1))

    def test_paulis_generate_full_m2(self):
        expected = closure_dim_bruteforce([SX, SZ])
        alg = generate_algebra([SX, SZ])
        assert expected == 4
        assert alg.dim == expected
        alg.validate()

    def test_diagonal_generator(self):
        expected = closure_dim_bruteforce([np.diag([1.0, -1.0]).astype(complex)])
        alg = generate_algebra([np.diag([1.0, -1.0]).astype(complex)])
        assert alg.dim == expected == 2

    def test_zz_span(self):
        zz = kron_all(SZ, SZ)
        assert generate_algebra([zz]).dim == closure_dim_bruteforce([zz]) == 2

    def test_rejects_nonsquare(self):
        with pytest.raises(ValueError):
            generate_algebra([np.ones((2, 3))])

    def test_rejects_mixed_dimensions(self):
        with pytest.raises(ValueError):
            generate_algebra([SX, np.eye(3)])

    def test_dimension_cap(self):
        with pytest.raises(DimensionCapError):
            generate_algebra([np.eye(300)], dimension_cap=256)


class TestCommutant:
    def test_full_algebra_has_scalar_commutant(self):
        assert commutant(full_matrix_algebra(2)).dim == 1

    def test_scalars_have_full_commutant(self):
        assert commutant(scalar_algebra(2)).dim == 4

    def test_zz_commutant_dimension(self):
        alg = generate_algebra([kron_all(SZ, SZ)])
        assert commutant(alg).dim == 8

    @pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
    def test_matches_entrywise_oracle(self, d, rng):
        h = la.random_hermitian(rng, d)
        p = np.diag((np.arange(d) < d // 2).astype(complex))
        alg = generate_algebra([h @ p + p @ h])
        comm = commutant(alg)
        oracle_rows = commutant_entrywise(alg.basis, d)
        assert comm.dim == oracle_rows.shape[0]
        oracle = la.rows_to_mats(oracle_rows, d)
        assert la.same_span(comm.basis, la.orthonormalize_mats(oracle), 1e-8)

    def test_double_commutant_property(self, rng):
        for d, n_gens in [(2, 1), (3, 2), (4, 1), (4, 2)]:
            gens = [la.random_hermitian(rng, d) for _ in range(n_gens)]
            alg = generate_algebra(gens)
            double = commutant(commutant(alg))
            assert double.dim == alg.dim
            for b in double.basis:
                assert la.span_residual(alg.basis, b) <= 1e-8


class TestCenter:
    def test_center_of_full_algebra(self):
        assert center(full_matrix_algebra(2)).dim == 1

    def test_block_diagonal_center(self):
        # M2 + M3 embedded block-diagonally in d=5
        b2 = np.array([[1, 2], [3, 5]], dtype=complex)
        b3 = np.array([[1, 2, 0], [0, 3, 4], [5, 0, 6]], dtype=complex)
        gens = []
        for blk, off in ((b2, 0), (b3, 2)):
            g = np.zeros((5, 5), dtype=complex)
            g[off:off + blk.shape[0], off:off + blk.shape[0]] = blk
            gens.append(g)
        alg = generate_algebra(gens)
        assert alg.dim == 4 + 9
        assert center(alg).dim == 2

    def test_center_counts_sectors(self):
        comm = commutant(generate_algebra([kron_all(SZ, SZ)]))
        assert center(comm).dim == 2

    def test_center_is_commutative_and_unital(self):
        comm = commutant(generate_algebra([kron_all(SZ, SZ)]))
        z = center(comm)
        for a in z.basis:
            for b in z.basis:
                assert np.linalg.norm(a @ b - b @ a) <= 1e-12
        assert z.contains(np.eye(4))


class TestMinimalCentralProjections:
    def test_full_matrix_algebra(self):
        projs = minimal_central_projections(full_matrix_algebra(3))
        assert len(projs) == 1
        assert np.allclose(projs[0], np.eye(3))

    def test_diagonal_algebra(self):
        alg = generate_algebra([np.diag([1.0, -1.0]).astype(complex)])
        projs = minimal_central_projections(alg)
        assert len(projs) == 2
        assert np.allclose(projs[0], np.diag([1.0, 0.0]))
        assert np.allclose(projs[1], np.diag([0.0, 1.0]))

    def test_zz_eigenspace_projections(self):
        comm = commutant(generate_algebra([kron_all(SZ, SZ)]))
        projs = minimal_central_projections(comm)
        assert len(projs) == 2
        # eigenspace oracle: span{|00>,|11>} and span{|01>,|10>}
        even = np.zeros((4, 4)); even[0, 0] = even[3, 3] = 1
        odd = np.eye(4) - even
        assert any(np.allclose(p, even, atol=1e-9) for p in projs)
        assert any(np.allclose(p, odd, atol=1e-9) for p in projs)

    def test_ambiguous_gap_exhausts_retries(self):
        # a generator whose spectrum splits inside the ambiguity band
        # (between 1e-12 and the 1e-8 grouping gap) cannot be resolved
        near = np.diag([1.0, 1.0 + 3e-10]).astype(complex)
        alg = generate_algebra([near])
        with pytest.raises(CentralProjectionError):
            minimal_central_projections(alg)

    def test_partition_of_unity(self, rng):
        h = la.random_hermitian(rng, 4)
        alg = generate_algebra([h @ h])
        projs = minimal_central_projections(alg)
        total = sum(projs)
        assert np.allclose(total, np.eye(4), atol=1e-10)
        for i, p in enumerate(projs):
            assert np.linalg.norm(p - p.conj().T) <= 1e-10
            for j, q in enumerate(projs):
                target = p if i == j else np.zeros_like(p)
                assert np.linalg.norm(p @ q - target) <= 1e-10


class TestStates:
    def test_state_validation(self):
        State(np.eye(2) / 2).validate()
        with pytest.raises(ValueError):
            State(np.diag([2.0, -1.0])).validate()
        with pytest.raises(ValueError):
            State(np.diag([0.7, 0.7])).validate()

    def test_distance_zero_on_equal_states(self):
        s = vector_state([1, 0])
        assert state_distance_mod(s, s, full_matrix_algebra(2)) == 0.0

    def test_distance_zero_modulo_scalars(self):
        s0, s1 = vector_state([1, 0]), vector_state([0, 1])
        assert state_distance_mod(s0, s1, scalar_algebra(2)) <= 1e-15

    def test_distance_on_diagonal_algebra(self):
        s0, s1 = vector_state([1, 0]), vector_state([0, 1])
        diag = generate_algebra([SZ])
        # brute-force maximum over the 2 orthonormal basis elements
        expected = max(
            abs(np.trace((s0.density - s1.density) @ b)) for b in diag.basis
        )
        assert expected > 0
        assert state_distance_mod(s0, s1, diag) == pytest.approx(expected)

    def test_pseudo_metric_properties(self, rng):
        sub = generate_algebra([SZ])
        states = []
        for _ in range(3):
            h = la.random_hermitian(rng, 2)
            rho = h @ h.conj().T
            states.append(State(rho / np.trace(rho).real))
        a, b, c = states
        dab = state_distance_mod(a, b, sub)
        dba = state_distance_mod(b, a, sub)
        assert dab == pytest.approx(dba, abs=1e-12)
        assert dab <= state_distance_mod(a, c, sub) + state_distance_mod(c, b, sub) + 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            state_distance_mod(vector_state([1, 0]), vector_state([1, 0, 0]),
                               scalar_algebra(2))
