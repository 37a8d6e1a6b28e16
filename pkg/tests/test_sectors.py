import numpy as np
import pytest

from sectorlab import _linalg as la
from sectorlab.algebra import (
    State,
    center,
    full_matrix_algebra,
    generate_algebra,
    vector_state,
)
from sectorlab.channels import ProbabilityWeight, apply_cq
from sectorlab.groups import cyclic_group, cyclic_rep_from_unitary, tensor_power_rep, trivial_rep
from sectorlab.models import z2_chain_sector_model
from sectorlab.sectors import (
    ChargedMultiplet,
    charging_channel,
    charge_space,
    decompose_sectors,
    estimate_charge,
    find_charged_unitaries,
    identity_multiplet,
    induce_charged_state,
    k_map,
    sector_energies,
    vacuum_label,
)

from conftest import SX, SZ, I2, kron_all


@pytest.fixture(scope="module")
def chain2():
    return z2_chain_sector_model(2)


class TestDecomposeSectors:
    def test_trivial_group_single_sector(self):
        f = full_matrix_algebra(2)
        dec = decompose_sectors(f, trivial_rep(cyclic_group(1), 2))
        assert dec.n_sectors == 1
        assert dec.mult_dims == (2,)

    def test_z2_on_qubit(self):
        rep = cyclic_rep_from_unitary(SZ, 2)
        dec = decompose_sectors(full_matrix_algebra(2), rep)
        assert dec.n_sectors == 2
        assert dec.mult_dims == (1, 1)
        # observable algebra is diagonal: its centre is everything
        obs = dec.observable_algebra()
        assert obs.dim == 2
        assert center(obs).dim == 2

    def test_z2_chain(self, chain2):
        dec = chain2["decomposition"]
        assert dec.mult_dims == (2, 2)
        assert dec.irrep_dims == (1, 1)
        assert dec.field_algebra_full

    def test_non_full_field_flagged(self):
        rep = cyclic_rep_from_unitary(SZ, 2)
        small = generate_algebra([SZ])
        dec = decompose_sectors(small, rep)
        assert not dec.field_algebra_full

    def test_centre_identity(self, chain2):
        # centre of the observable algebra = span of the projections,
        # dimension = number of labels
        dec = chain2["decomposition"]
        obs = dec.observable_algebra()
        z = center(obs)
        assert z.dim == dec.n_sectors
        for p in dec.projections:
            assert la.span_residual(z.basis, p) <= 1e-9


class TestKMap:
    def test_unit_maps_to_ones(self, chain2):
        vals = k_map(np.eye(4, dtype=complex), chain2["vacuum"],
                     chain2["charge_morphisms"])
        assert np.allclose(vals, 1.0)

    def test_central_projection_indicator(self, chain2):
        dec = chain2["decomposition"]
        vals = k_map(dec.projections[1], chain2["vacuum"],
                     chain2["charge_morphisms"])
        # identity morphism keeps the vacuum in sector 0; the flip carries
        # it into sector 1
        assert np.allclose(vals, [0.0, 1.0], atol=1e-12)

    def test_invariant_sz_signs(self, chain2):
        a = kron_all(SZ, I2)
        vals = k_map(a, chain2["vacuum"], chain2["charge_morphisms"],
                     obs_algebra=chain2["decomposition"].observable_algebra())
        assert np.allclose(vals, [1.0, -1.0])

    def test_algebra_preservation_enforced(self, chain2):
        obs = chain2["decomposition"].observable_algebra()
        hadamard = (SX + SZ) / np.sqrt(2)
        bad = ChargedMultiplet("bad", (kron_all(hadamard, I2),))
        with pytest.raises(ValueError):
            k_map(np.eye(4), chain2["vacuum"],
                  [chain2["charge_morphisms"][0], bad], obs_algebra=obs)

    def test_positivity(self, chain2, rng):
        for _ in range(25):
            a = la.random_hermitian(rng, 4)
            vals = k_map(a.conj().T @ a, chain2["vacuum"],
                         chain2["charge_morphisms"])
            assert vals.real.min() >= -1e-10


class TestChargingChannel:
    def test_point_mass_at_vacuum(self, chain2):
        ch = charging_channel(chain2["decomposition"], chain2["vacuum"],
                              chain2["charge_morphisms"])
        w = ProbabilityWeight(ch.space, np.array([1.0, 0.0]))
        assert np.allclose(apply_cq(ch, w).density,
                           chain2["vacuum"].density)

    def test_half_half_mixture(self, chain2):
        ch = charging_channel(chain2["decomposition"], chain2["vacuum"],
                              chain2["charge_morphisms"])
        st = apply_cq(ch, ProbabilityWeight(ch.space, np.array([0.5, 0.5])))
        expected = np.zeros((4, 4), dtype=complex)
        expected[0, 0] = 0.5   # |00><00|
        expected[2, 2] = 0.5   # |10><10|
        assert np.allclose(st.density, expected)

    def test_duality_with_k_map(self, chain2, rng):
        dec = chain2["decomposition"]
        ch = charging_channel(dec, chain2["vacuum"], chain2["charge_morphisms"])
        obs = dec.observable_algebra()
        for _ in range(100):
            w = rng.dirichlet([1, 1])
            coeff = rng.standard_normal(obs.dim)
            a = np.tensordot(coeff, obs.basis, axes=(0, 0))
            lhs = np.trace(apply_cq(ch, ProbabilityWeight(ch.space, w)).density @ a)
            rhs = w @ k_map(a, chain2["vacuum"], chain2["charge_morphisms"])
            assert abs(lhs - rhs) <= 1e-12

    def test_label_order_enforced(self, chain2):
        wrong = list(reversed(chain2["charge_morphisms"]))
        with pytest.raises(ValueError):
            charging_channel(chain2["decomposition"], chain2["vacuum"], wrong)

    def test_sector_supported_fibres(self, chain2):
        dec = chain2["decomposition"]
        ch = charging_channel(dec, chain2["vacuum"], chain2["charge_morphisms"])
        for fibre, p in zip(ch.fibre_states, dec.projections):
            assert np.trace(fibre.density @ p).real == pytest.approx(1.0, abs=1e-10)
        # disjointness
        for i, fibre in enumerate(ch.fibre_states):
            for j, p in enumerate(dec.projections):
                if i != j:
                    assert abs(np.trace(fibre.density @ p)) <= 1e-10


class TestEstimateCharge:
    def test_vacuum_point_mass(self, chain2):
        nu = estimate_charge(chain2["vacuum"], chain2["decomposition"])
        assert np.allclose(nu.weights, [1.0, 0.0])
        assert vacuum_label(chain2["decomposition"], chain2["vacuum"]) == "gamma0"

    def test_round_trip(self, chain2, rng):
        dec = chain2["decomposition"]
        ch = charging_channel(dec, chain2["vacuum"], chain2["charge_morphisms"])
        for _ in range(20):
            w = rng.dirichlet([1, 1])
            nu = estimate_charge(apply_cq(ch, ProbabilityWeight(ch.space, w)), dec)
            assert np.abs(nu.weights - w).max() <= 1e-10

    def test_maximally_mixed(self, chain2):
        mixed = State(np.eye(4) / 4, "mixed")
        nu = estimate_charge(mixed, chain2["decomposition"])
        assert np.allclose(nu.weights, [0.5, 0.5])

    def test_vacuum_label_requires_support(self, chain2):
        mixed = State(np.eye(4) / 4, "mixed")
        with pytest.raises(ValueError):
            vacuum_label(chain2["decomposition"], mixed)


class TestInducedChargedState:
    def test_point_mass_returns_vacuum_vector(self, chain2):
        dec = chain2["decomposition"]
        net = chain2["net"]
        nu = ProbabilityWeight(charge_space(dec), np.array([1.0, 0.0]))
        mults = {m.label: m for m in chain2["charge_morphisms"]}
        report = induce_charged_state(
            nu, mults, np.array([1, 0, 0, 0]), net.global_rep,
            dec.observable_algebra())
        assert np.allclose(report.psi, [1, 0, 0, 0])
        assert report.max_deviation <= 1e-12

    def test_half_half_superposition(self, chain2):
        dec = chain2["decomposition"]
        net = chain2["net"]
        nu = ProbabilityWeight(charge_space(dec), np.array([0.5, 0.5]))
        mults = {m.label: m for m in chain2["charge_morphisms"]}
        report = induce_charged_state(
            nu, mults, np.array([1, 0, 0, 0]), net.global_rep,
            dec.observable_algebra())
        expected = np.zeros(4); expected[0] = expected[2] = 1 / np.sqrt(2)
        assert np.allclose(report.psi, expected)
        assert report.max_deviation <= 1e-8
        assert report.norm_deviation <= 1e-10

    def test_missing_multiplet_rejected(self, chain2):
        dec = chain2["decomposition"]
        nu = ProbabilityWeight(charge_space(dec), np.array([0.5, 0.5]))
        mults = {dec.labels[0]: identity_multiplet(dec.labels[0], 4)}
        with pytest.raises(ValueError):
            induce_charged_state(nu, mults, np.array([1, 0, 0, 0]),
                                 chain2["net"].global_rep,
                                 dec.observable_algebra())

    def test_implementing_relation_enforced(self, chain2):
        dec = chain2["decomposition"]
        nu = ProbabilityWeight(charge_space(dec), np.array([0.0, 1.0]))
        # site-1 projectors sum to a unital multiplet but pinch off-diagonal
        # observables, so psi A != rho(A) psi on the even basis
        p0 = kron_all(np.diag([1.0, 0.0]).astype(complex), I2)
        p1 = kron_all(np.diag([0.0, 1.0]).astype(complex), I2)
        bad = {dec.labels[1]: ChargedMultiplet(dec.labels[1], (p0, p1))}
        with pytest.raises(ValueError):
            induce_charged_state(nu, bad, np.array([1, 0, 0, 0]),
                                 chain2["net"].global_rep,
                                 dec.observable_algebra())


class TestMultiplets:
    def test_unitary_multiplet_is_full(self):
        m = ChargedMultiplet("u", (kron_all(SX, I2),))
        assert not m.is_partial()

    def test_partial_multiplet_flagged(self):
        iso = np.zeros((4, 4), dtype=complex)
        iso[0, 0] = 1.0
        m = ChargedMultiplet("p", (iso,))
        assert m.is_partial()

    def test_sector_energies(self, chain2):
        h = -kron_all(SZ, SZ)
        energies = sector_energies(chain2["decomposition"], h)
        assert energies["gamma0"] == pytest.approx(-1.0)
        assert energies["gamma1"] == pytest.approx(1.0)

    def test_automatic_charged_search(self, chain2):
        dec = chain2["decomposition"]
        found = find_charged_unitaries(
            dec, chain2["vacuum"],
            [kron_all(SZ, I2), kron_all(SX, I2), kron_all(I2, SX)])
        assert set(found) == set(dec.labels)
        assert not found["gamma1"].is_partial()
