"""Superselection sectors, the charging channel, and charge estimation.

A finite symmetry acting on a full matrix algebra splits the space into
charge blocks H_gamma (x) V_gamma.  Charge-carrying morphisms (given as
conjugation multiplets in the field algebra) turn classical weights over
the labels into states via the charging channel; central projections read
the charge distribution back off any state.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping, Sequence

import numpy as np

from . import _linalg as la
from .algebra import OperatorAlgebra, State
from .channels import (
    ClassicalQuantumChannel,
    ClassifyingSpace,
    ProbabilityWeight,
)
from .config import DEFAULT_TOL, Tolerances
from .groups import SectorDecomposition, UnitaryRep, average, isotypic_decomposition

#: a charge distribution is a probability weight over sector labels
ChargeDistribution = ProbabilityWeight


def charge_space(decomp: SectorDecomposition) -> ClassifyingSpace:
    return ClassifyingSpace(decomp.labels)


def decompose_sectors(
    f_alg: OperatorAlgebra,
    rep: UnitaryRep,
    tol: Tolerances | None = None,
    seed: int = 0,
) -> SectorDecomposition:
    """Sector decomposition of a symmetry acting on a field algebra.

    The observable algebra is the fixed-point algebra of the action; for a
    full field algebra its blocks are exactly the isotypic components of
    the implementing representation.  A non-full field algebra still gets
    the decomposition relative to the representation's commutant, with the
    ``field_algebra_full`` flag cleared.
    """
    if rep.dim != f_alg.ambient_dim:
        raise ValueError("representation and field algebra dimensions differ")
    dec = isotypic_decomposition(rep, tol, seed)
    full = f_alg.dim == f_alg.ambient_dim ** 2
    return replace(dec, field_algebra_full=full)


@dataclass(frozen=True)
class ChargedMultiplet:
    """A multiplet psi_1..psi_m in the field algebra implementing a morphism.

    The action is A -> sum_i psi_i A psi_i*.  A full multiplet satisfies
    the Cuntz-type relations sum psi_i psi_i* = 1 and psi_i* psi_j =
    delta_ij; multiplets that only implement the morphism are flagged
    ``partial`` by :meth:`isometry_defect`.
    """

    label: str
    matrices: tuple[np.ndarray, ...]
    region: frozenset | None = None

    def __post_init__(self):
        mats = tuple(la.as_complex_matrix(m) for m in self.matrices)
        if not mats:
            raise ValueError("multiplet needs at least one matrix")
        object.__setattr__(self, "matrices", mats)

    @property
    def dim(self) -> int:
        return self.matrices[0].shape[0]

    def apply(self, a: np.ndarray) -> np.ndarray:
        """The morphism action sum_i psi_i A psi_i*."""
        out = np.zeros_like(self.matrices[0])
        for psi in self.matrices:
            out += psi @ a @ la.dagger(psi)
        return out

    def pullback_density(self, rho: np.ndarray) -> np.ndarray:
        """Density of omega o morphism for omega with density rho."""
        out = np.zeros_like(self.matrices[0])
        for psi in self.matrices:
            out += la.dagger(psi) @ rho @ psi
        return out

    def isometry_defect(self) -> tuple[float, float]:
        """(completeness, orthogonality) defects of the Cuntz relations."""
        d = self.dim
        eye = np.eye(d)
        total = sum(psi @ la.dagger(psi) for psi in self.matrices)
        completeness = float(np.linalg.norm(total - eye))
        ortho = 0.0
        for i, a in enumerate(self.matrices):
            for j, b in enumerate(self.matrices):
                target = eye if i == j else 0.0
                ortho = max(ortho, float(np.linalg.norm(la.dagger(a) @ b - target)))
        return completeness, ortho

    def is_partial(self, tol: float = 1e-10) -> bool:
        c, o = self.isometry_defect()
        return max(c, o) > tol


def identity_multiplet(label: str, dim: int) -> ChargedMultiplet:
    return ChargedMultiplet(label, (np.eye(dim, dtype=complex),))


def algebra_preservation_defect(
    morphism: ChargedMultiplet, alg: OperatorAlgebra
) -> float:
    """max residual of morphism(B) against span(alg) over the basis."""
    worst = 0.0
    for b in alg.basis:
        worst = max(worst, la.span_residual(alg.basis, morphism.apply(b)))
    return worst


def k_map(
    a: np.ndarray,
    vacuum: State,
    morphisms: Sequence[ChargedMultiplet],
    obs_algebra: OperatorAlgebra | None = None,
    tol: float | None = None,
) -> np.ndarray:
    """The classifying map: label gamma -> omega_0(rho_gamma(A)).

    Unital and positive by construction (each omega_0 o rho_gamma is a
    state).  When ``obs_algebra`` is supplied, every morphism is checked
    to preserve it on the basis.
    """
    a = la.as_complex_matrix(a)
    t = DEFAULT_TOL.rank if tol is None else tol
    if obs_algebra is not None:
        for m in morphisms:
            defect = algebra_preservation_defect(m, obs_algebra)
            if defect > t:
                raise ValueError(
                    f"morphism {m.label!r} leaves the observable algebra "
                    f"(defect {defect:.3e})"
                )
    return np.array([
        np.trace(vacuum.density @ m.apply(a)) for m in morphisms
    ])


def charging_channel(
    decomp: SectorDecomposition,
    vacuum: State,
    morphisms: Sequence[ChargedMultiplet],
) -> ClassicalQuantumChannel:
    """The c->q channel nu -> sum_gamma nu_gamma (omega_0 o rho_gamma).

    Fibre densities are the pullbacks of the vacuum through each morphism;
    morphisms must be supplied in the decomposition's label order.
    """
    if tuple(m.label for m in morphisms) != decomp.labels:
        raise ValueError(
            "morphism labels must match the sector labels in order: "
            f"{[m.label for m in morphisms]} vs {list(decomp.labels)}"
        )
    fibres = tuple(
        State(m.pullback_density(vacuum.density), label=f"charged:{m.label}")
        for m in morphisms
    )
    return ClassicalQuantumChannel(charge_space(decomp), fibres)


def estimate_charge(
    omega: State, decomp: SectorDecomposition
) -> ChargeDistribution:
    """Charge distribution nu_gamma = tr(rho P_gamma) from the projections."""
    vals = np.einsum("kij,ji->k", decomp.projections, omega.density).real
    vals = np.clip(vals, 0.0, None)
    return ProbabilityWeight(charge_space(decomp), vals / vals.sum())


def vacuum_label(
    decomp: SectorDecomposition, omega0: State, tol: float = 1e-10
) -> str:
    """The sector carrying the designated vacuum; requires full support."""
    nu = estimate_charge(omega0, decomp)
    idx = int(np.argmax(nu.weights))
    if abs(nu.weights[idx] - 1.0) > tol:
        raise ValueError(
            f"vacuum state is not supported in a single sector: {nu.weights}"
        )
    return decomp.labels[idx]


@dataclass(frozen=True)
class InducedStateReport:
    """Verification record for the charged vector Psi."""

    psi: np.ndarray
    max_deviation: float
    norm_deviation: float
    n_checked: int


def induce_charged_state(
    nu: ChargeDistribution,
    multiplets: Mapping[str, ChargedMultiplet],
    omega0_vector: np.ndarray,
    rep: UnitaryRep,
    obs_algebra: OperatorAlgebra,
    tol_implement: float = 1e-9,
) -> InducedStateReport:
    """Build Psi = sum_gamma sum_i sqrt(nu_gamma) psi_i* Omega_0 and verify it.

    Precondition: each multiplet implements its morphism on the observable
    basis, psi_i A = (sum_j psi_j A psi_j*) psi_i.  The returned report
    verifies, over a matrix-unit basis of the field algebra, that the
    charged mixture agrees with the vector state on group averages:
    |sum_gamma nu_gamma omega_0(rho_gamma(m(F))) - <Psi|m(F) Psi>|.
    """
    omega0_vector = np.asarray(omega0_vector, dtype=complex).reshape(-1)
    d = omega0_vector.shape[0]
    if abs(np.linalg.norm(omega0_vector) - 1.0) > 1e-10:
        raise ValueError("vacuum vector must be normalized")
    active = [
        (lab, w) for lab, w in zip(nu.space.labels, nu.weights) if w > 0
    ]
    for lab, _ in active:
        if lab not in multiplets:
            raise ValueError(f"no multiplet supplied for charged label {lab!r}")
    for lab, _ in active:
        mult = multiplets[lab]
        for idx, b in enumerate(obs_algebra.basis):
            image = mult.apply(b)
            for psi in mult.matrices:
                dev = np.linalg.norm(psi @ b - image @ psi)
                if dev > tol_implement:
                    raise ValueError(
                        f"multiplet {lab!r} violates the implementing relation "
                        f"on observable-basis element {idx} (deviation {dev:.3e})"
                    )
    psi_vec = np.zeros(d, dtype=complex)
    for lab, w in active:
        for m in multiplets[lab].matrices:
            psi_vec += np.sqrt(w) * (la.dagger(m) @ omega0_vector)
    rho0 = np.outer(omega0_vector, omega0_vector.conj())
    mixture = np.zeros((d, d), dtype=complex)
    for lab, w in active:
        mixture += w * multiplets[lab].pullback_density(rho0)
    worst = 0.0
    checked = 0
    for a in range(d):
        for b in range(d):
            unit = np.zeros((d, d), dtype=complex)
            unit[a, b] = 1.0
            mf = average(unit, rep)
            lhs = np.trace(mixture @ mf)
            rhs = psi_vec.conj() @ (mf @ psi_vec)
            worst = max(worst, abs(lhs - rhs))
            checked += 1
    return InducedStateReport(
        psi=psi_vec,
        max_deviation=float(worst),
        norm_deviation=float(abs(np.linalg.norm(psi_vec) - 1.0)),
        n_checked=checked,
    )


def sector_energies(
    decomp: SectorDecomposition, hamiltonian: np.ndarray
) -> dict[str, float]:
    """Report: minimum of a supplied Hamiltonian's spectrum in each sector.

    Purely descriptive output (the relation between energy and charge is
    not a claim this package makes).
    """
    h = la.as_complex_matrix(hamiltonian)
    out = {}
    w = decomp.unitary
    for label, sl in zip(decomp.labels, decomp.block_slices()):
        cols = w[:, sl]
        restricted = la.dagger(cols) @ h @ cols
        out[label] = float(np.linalg.eigvalsh(restricted).min())
    return out


def find_charged_unitaries(
    decomp: SectorDecomposition,
    vacuum: State,
    candidates: Sequence[np.ndarray],
    tol: float = 1e-10,
) -> dict[str, ChargedMultiplet]:
    """Scan a generating set for unitaries carrying the vacuum into each sector.

    Only the abelian case is automated: a single unitary u is assigned to
    label gamma when omega_0 o Ad(u) is supported entirely in that sector.
    Candidates are scanned in order; the first hit per label wins.  Labels
    without a hit are simply absent from the result.
    """
    d = decomp.ambient_dim
    out: dict[str, ChargedMultiplet] = {}
    vac = vacuum_label(decomp, vacuum, tol=1e-8)
    out[vac] = identity_multiplet(vac, d)
    for cand in candidates:
        u = la.as_complex_matrix(cand)
        if np.linalg.norm(la.dagger(u) @ u - np.eye(d)) > 1e-10 * d:
            continue
        mult = ChargedMultiplet("candidate", (u,))
        nu = estimate_charge(
            State(mult.pullback_density(vacuum.density)), decomp
        )
        idx = int(np.argmax(nu.weights))
        if abs(nu.weights[idx] - 1.0) <= tol and decomp.labels[idx] not in out:
            lab = decomp.labels[idx]
            out[lab] = ChargedMultiplet(lab, (u,))
    return out
