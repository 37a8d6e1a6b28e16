import numpy as np
import pytest

from sectorlab import _linalg as la
from sectorlab.algebra import State, full_matrix_algebra, vector_state
from sectorlab.channels import (
    ClassicalQuantumChannel,
    ClassifyingSpace,
    ProbabilityWeight,
    apply_cq,
    design_matrix,
    evaluation_matrix,
    forward_data,
    invert_cq,
    point_mass,
    separation_check,
    uniform_weight,
    verify_positive_unital,
)

from conftest import SZ, I2


@pytest.fixture
def two_point_channel():
    space = ClassifyingSpace(("up", "down"))
    return ClassicalQuantumChannel(
        space, (vector_state([1, 0], "up"), vector_state([0, 1], "down"))
    )


def gibbs_channel(betas):
    """Diagonal qubit Gibbs fibres; closed-form tanh oracle applies."""
    fibres = []
    for b in betas:
        p = np.exp(-b) / (np.exp(-b) + np.exp(b))
        fibres.append(State(np.diag([p, 1 - p]), label=f"b={b}"))
    space = ClassifyingSpace(tuple((b,) for b in betas), coord_names=("beta",))
    return ClassicalQuantumChannel(space, tuple(fibres))


class TestSpacesAndWeights:
    def test_duplicate_labels_rejected(self):
        with pytest.raises(ValueError):
            ClassifyingSpace(("a", "a"))

    def test_weight_validation(self):
        space = ClassifyingSpace(("a", "b"))
        with pytest.raises(ValueError):
            ProbabilityWeight(space, np.array([0.7, 0.7]))
        with pytest.raises(ValueError):
            ProbabilityWeight(space, np.array([1.5, -0.5]))

    def test_moments(self):
        space = ClassifyingSpace(((0.5,), (2.0,)), coord_names=("beta",))
        w = ProbabilityWeight(space, np.array([0.5, 0.5]))
        mean, var = w.moments()["beta"]
        assert mean == pytest.approx(1.25)
        assert var == pytest.approx(0.5625)


class TestApplyCq:
    def test_point_mass_returns_fibre(self, two_point_channel):
        ch = two_point_channel
        st = apply_cq(ch, point_mass(ch.space, "down"))
        assert np.allclose(st.density, ch.fibre_states[1].density)

    def test_uniform_mixture_is_maximally_mixed(self, two_point_channel):
        st = apply_cq(two_point_channel, uniform_weight(two_point_channel.space))
        assert np.allclose(st.density, I2 / 2)

    def test_gibbs_mixture_closed_form(self):
        ch = gibbs_channel([0.5, 2.0])
        w = ProbabilityWeight(ch.space, np.array([0.3, 0.7]))
        st = apply_cq(ch, w)
        expected = 0.3 * (-np.tanh(0.5)) + 0.7 * (-np.tanh(2.0))
        assert np.trace(st.density @ SZ).real == pytest.approx(expected, abs=1e-14)

    def test_affine(self, rng, two_point_channel):
        ch = two_point_channel
        for _ in range(20):
            w1 = rng.dirichlet([1, 1])
            w2 = rng.dirichlet([1, 1])
            t = rng.uniform()
            mix = apply_cq(ch, ProbabilityWeight(ch.space, t * w1 + (1 - t) * w2))
            direct = (
                t * apply_cq(ch, ProbabilityWeight(ch.space, w1)).density
                + (1 - t) * apply_cq(ch, ProbabilityWeight(ch.space, w2)).density
            )
            assert np.abs(mix.density - direct).max() <= 1e-12

    def test_space_mismatch(self, two_point_channel):
        other = ProbabilityWeight(ClassifyingSpace(("x", "y")), np.array([1.0, 0.0]))
        with pytest.raises(ValueError):
            apply_cq(two_point_channel, other)


class TestVerifyPositiveUnital:
    def test_state_evaluation_map_passes(self, two_point_channel):
        alg = full_matrix_algebra(2)
        m = evaluation_matrix(two_point_channel.densities(), alg)
        report = verify_positive_unital(m, alg)
        assert report.passed
        assert report.unitality_residual <= 1e-12
        assert report.positivity_margin >= -1e-12

    def test_traceless_functional_fails_unitality(self):
        alg = full_matrix_algebra(2)
        m = evaluation_matrix([SZ], alg)
        report = verify_positive_unital(m, alg)
        assert not report.passed
        assert report.unitality_residual == pytest.approx(1.0)

    def test_gibbs_grid_channel_passes(self):
        ch = gibbs_channel(np.linspace(0.1, 2.0, 11))
        alg = full_matrix_algebra(2)
        report = verify_positive_unital(evaluation_matrix(ch.densities(), alg), alg)
        assert report.passed


class TestSeparation:
    def test_distinct_pure_fibres_separate(self, two_point_channel):
        rep = separation_check(two_point_channel, [SZ])
        assert rep.passed and rep.rank == 2

    def test_identical_fibres_fail(self):
        space = ClassifyingSpace(("a", "b"))
        ch = ClassicalQuantumChannel(
            space, (vector_state([1, 0]), vector_state([1, 0]))
        )
        rep = separation_check(ch, [SZ])
        assert not rep.passed and rep.rank == 1

    def test_insufficient_probes_on_grid(self):
        # qubit Gibbs states span an affine line: 11 labels can never separate
        ch = gibbs_channel(np.linspace(0.1, 2.0, 11))
        probes = [SZ, SZ @ SZ, np.diag([1.0, 0.0])]
        rep = separation_check(ch, probes)
        assert not rep.passed
        assert rep.rank < 11


class TestInvertCq:
    def test_round_trip_recovery(self, rng):
        # twelve-level system with geometric gaps: well-separated design
        energies = np.concatenate([[0.0], 2.0 ** np.arange(11)])
        betas = 4.0 / 2.0 ** np.arange(11)
        fibres = []
        for b in betas:
            w = np.exp(-b * energies)
            fibres.append(State(np.diag(w / w.sum()), label=f"b={b}"))
        space = ClassifyingSpace(tuple((b,) for b in betas), coord_names=("beta",))
        ch = ClassicalQuantumChannel(space, tuple(fibres))
        probes = [np.diag((np.arange(12) == k).astype(complex)) for k in range(12)]
        assert separation_check(ch, probes).passed
        for _ in range(5):
            w0 = ProbabilityWeight(space, rng.dirichlet(np.ones(11)))
            result = invert_cq(ch, probes, forward_data(ch, probes, w0))
            assert result.weight.l1_distance(w0) <= 1e-6
            assert result.residual <= 1e-10
            assert result.kkt_residual <= 1e-10
            assert result.unique

    def test_identity_probe_non_unique(self, two_point_channel):
        result = invert_cq(two_point_channel, [I2], np.array([1.0]))
        assert result.residual <= 1e-12
        assert not result.unique
        assert result.nullspace_dim == 1
        # minimum-norm tie-break lands on the uniform weight
        assert np.allclose(result.weight.weights, [0.5, 0.5])

    def test_infeasible_data_reports_residual(self, two_point_channel):
        result = invert_cq(two_point_channel, [SZ], np.array([-2.0]))
        assert result.residual >= 1.0 - 1e-12
        assert result.weight.weights.min() >= 0.0

    def test_constraints_hold_exactly(self, rng, two_point_channel):
        for _ in range(10):
            data = rng.uniform(-2, 2, size=1)
            result = invert_cq(two_point_channel, [SZ], data)
            w = result.weight.weights
            assert w.min() >= 0.0
            assert w.sum() == pytest.approx(1.0, abs=1e-14)

    def test_empty_probes_rejected(self, two_point_channel):
        with pytest.raises(ValueError):
            invert_cq(two_point_channel, [], np.array([]))

    def test_design_matrix_values(self, two_point_channel):
        m = design_matrix(two_point_channel, [SZ])
        assert np.allclose(m, [[1.0, -1.0]])
