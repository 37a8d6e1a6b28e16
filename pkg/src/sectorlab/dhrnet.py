"""Toy lattice nets, the locality selection criterion, and localized morphisms.

Sites of a finite chain carry a common on-site dimension and a symmetry
action; regions are site subsets, region algebras are tensor factors
(fields) or their invariant parts (observables).  Isotony and locality
hold by construction and are asserted by tests, not assumed silently.
The "causal complement" of a region is its set complement.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _linalg as la
from .algebra import (
    OperatorAlgebra,
    State,
    commutant,
    full_matrix_algebra,
    scalar_algebra,
    state_distance_mod,
)
from .config import DIMENSION_CAP
from .groups import UnitaryRep, fixed_point_algebra, tensor_power_rep
from .sectors import ChargedMultiplet


@dataclass(frozen=True)
class LatticeNet:
    """A chain of ``n_sites`` sites with a per-site symmetry action."""

    n_sites: int
    onsite_rep: UnitaryRep

    def __post_init__(self):
        if self.n_sites < 1:
            raise ValueError("need at least one site")
        if self.onsite_dim ** self.n_sites > DIMENSION_CAP:
            raise ValueError(
                f"total dimension {self.onsite_dim ** self.n_sites} exceeds "
                f"the cap {DIMENSION_CAP}"
            )

    @property
    def onsite_dim(self) -> int:
        return self.onsite_rep.dim

    @property
    def total_dim(self) -> int:
        return self.onsite_dim ** self.n_sites

    @property
    def sites(self) -> tuple[int, ...]:
        return tuple(range(self.n_sites))

    @cached_property
    def global_rep(self) -> UnitaryRep:
        return tensor_power_rep(self.onsite_rep, self.n_sites)

    @cached_property
    def _observable_algebra(self) -> OperatorAlgebra:
        return fixed_point_algebra(full_matrix_algebra(self.total_dim),
                                   self.global_rep)

    def observable_algebra(self) -> OperatorAlgebra:
        """Global invariant algebra (the full chain's observables)."""
        return self._observable_algebra

    def field_algebra(self) -> OperatorAlgebra:
        return full_matrix_algebra(self.total_dim)


def normalize_region(net: LatticeNet, region) -> tuple[int, ...]:
    sites = tuple(sorted(set(int(s) for s in region)))
    if any(s < 0 or s >= net.n_sites for s in sites):
        raise ValueError(f"region {sites} not within the chain's sites")
    return sites


def complement_sites(net: LatticeNet, region) -> tuple[int, ...]:
    region = set(normalize_region(net, region))
    return tuple(s for s in net.sites if s not in region)


def embed_factor_operator(net: LatticeNet, region, m: np.ndarray) -> np.ndarray:
    """Embed an operator on the region's tensor factor, identity outside."""
    sites = normalize_region(net, region)
    d0 = net.onsite_dim
    m = la.as_complex_matrix(m)
    if m.shape[0] != d0 ** len(sites):
        raise ValueError("operator dimension does not match the region factor")
    rest = [s for s in net.sites if s not in sites]
    full = np.kron(m, np.eye(d0 ** len(rest), dtype=complex))
    n = net.n_sites
    perm = list(np.argsort(list(sites) + rest))
    tensor = full.reshape([d0] * (2 * n))
    tensor = tensor.transpose(perm + [p + n for p in perm])
    return np.ascontiguousarray(tensor.reshape(net.total_dim, net.total_dim))


def region_algebra(
    net: LatticeNet, region, observable: bool = False
) -> OperatorAlgebra:
    """Local algebra of a site set: full factor, or its invariant part.

    The field version carries a two-element generating set (a shift and a
    generic diagonal on the factor) so commutants stay cheap.  The empty
    region gives the scalars.
    """
    sites = normalize_region(net, region)
    d = net.total_dim
    if not sites:
        return scalar_algebra(d)
    k = net.onsite_dim ** len(sites)
    rest_dim = d // k
    factor = full_matrix_algebra(k)
    if observable:
        local_rep = tensor_power_rep(net.onsite_rep, len(sites))
        factor = fixed_point_algebra(factor, local_rep)
        gens = None
    else:
        gens = tuple(embed_factor_operator(net, sites, g) for g in factor.generators)
    basis = np.array([
        embed_factor_operator(net, sites, b) / np.sqrt(rest_dim)
        for b in factor.basis
    ])
    return OperatorAlgebra(d, basis, contains_unit=True, generators=gens)


def enumerate_regions(
    net: LatticeNet, all_subsets: bool = False
) -> list[tuple[int, ...]]:
    """Candidate localization regions: proper subsets of the chain.

    Default: the empty region and every contiguous interval shorter than
    the chain (the lattice stand-in for bounded double cones).  With
    ``all_subsets`` every proper subset is enumerated (chains up to 8
    sites).
    """
    n = net.n_sites
    if all_subsets:
        if n > 8:
            raise ValueError("all-subsets enumeration is capped at 8 sites")
        out = []
        for r in range(n):
            out.extend(tuple(c) for c in itertools.combinations(range(n), r))
        return out
    regions: list[tuple[int, ...]] = [()]
    for length in range(1, n):
        for start in range(n - length + 1):
            regions.append(tuple(range(start, start + length)))
    return regions


@dataclass(frozen=True)
class DhrReport:
    passes: bool
    witness_regions: tuple[tuple[int, ...], ...]
    distances: tuple[tuple[tuple[int, ...], float], ...]
    tol: float


def dhr_check(
    omega: State,
    omega0: State,
    net: LatticeNet,
    tol: float = 1e-8,
    all_subsets: bool = False,
) -> DhrReport:
    """Locality criterion: does omega match the vacuum outside some region?

    For every candidate region O the states are compared on the observable
    algebra of the complement; O is a witness when the distance falls
    within ``tol``.  The criterion passes when at least one witness exists.
    """
    if omega.dim != net.total_dim or omega0.dim != net.total_dim:
        raise ValueError("states must live on the net's total space")
    distances = []
    witnesses = []
    for region in enumerate_regions(net, all_subsets):
        comp = complement_sites(net, region)
        alg = region_algebra(net, comp, observable=True)
        dist = state_distance_mod(omega, omega0, alg)
        distances.append((region, dist))
        if dist <= tol:
            witnesses.append(region)
    witnesses.sort(key=lambda r: (len(r), r))
    return DhrReport(
        passes=bool(witnesses),
        witness_regions=tuple(witnesses),
        distances=tuple(distances),
        tol=tol,
    )


# ---------------------------------------------------------------------------
# localized morphisms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LocalizedMorphism:
    """An endomorphism A -> sum_i psi_i A psi_i* with region-supported psi."""

    net: LatticeNet
    region: tuple[int, ...]
    multiplet: ChargedMultiplet

    @property
    def label(self) -> str:
        return self.multiplet.label

    def apply_raw(self, a: np.ndarray) -> np.ndarray:
        """The action without the observable-membership precondition."""
        return self.multiplet.apply(a)

    def validate(self, tol: float = 1e-9) -> None:
        """Check unitality, localization, and that observables map to observables."""
        d = self.net.total_dim
        total = sum(p @ la.dagger(p) for p in self.multiplet.matrices)
        if np.linalg.norm(total - np.eye(d)) > tol * d:
            raise ValueError("multiplet is not unital (sum psi psi* != 1)")
        comp = complement_sites(self.net, self.region)
        comp_alg = region_algebra(self.net, comp, observable=False)
        for b in comp_alg.basis:
            if np.linalg.norm(self.apply_raw(b) - b) > tol:
                raise ValueError("morphism does not act trivially on the complement")
        obs = self.net.observable_algebra()
        images = [self.apply_raw(b) for b in obs.basis]
        for img in images:
            if la.span_residual(obs.basis, img) > tol:
                raise ValueError("morphism image leaves the observable algebra")
        for i, bi in enumerate(obs.basis):
            for j, bj in enumerate(obs.basis):
                res = self.apply_raw(bi @ bj) - images[i] @ images[j]
                if np.linalg.norm(res) > tol:
                    raise ValueError(
                        f"morphism is not multiplicative on basis pair ({i},{j})"
                    )


def localized_morphism(
    net: LatticeNet, region, factor_matrices, label: str
) -> LocalizedMorphism:
    """Build a morphism from matrices given on the region's tensor factor."""
    sites = normalize_region(net, region)
    mats = tuple(
        embed_factor_operator(net, sites, la.as_complex_matrix(m))
        for m in factor_matrices
    )
    return LocalizedMorphism(
        net, sites, ChargedMultiplet(label, mats, region=frozenset(sites))
    )


def identity_morphism(net: LatticeNet, label: str = "identity") -> LocalizedMorphism:
    mult = ChargedMultiplet(label, (np.eye(net.total_dim, dtype=complex),),
                            region=frozenset())
    return LocalizedMorphism(net, (), mult)


def apply_morphism(
    morph: LocalizedMorphism, a: np.ndarray, tol: float = 1e-9
) -> np.ndarray:
    """Apply the morphism to an observable; rejects non-observables."""
    a = la.as_complex_matrix(a)
    obs = morph.net.observable_algebra()
    res = la.span_residual(obs.basis, a)
    if res > tol * max(1.0, la.hs_norm(a)):
        raise ValueError(
            f"operator is outside the observable algebra (residual {res:.3e})"
        )
    return morph.apply_raw(a)


def selected_state(morph: LocalizedMorphism, omega0: State) -> State:
    """The state omega_0 o morphism, as a density on the ambient space."""
    rho = morph.multiplet.pullback_density(omega0.density)
    return State(rho, label=f"W({morph.label})")


def compose_morphisms(
    m1: LocalizedMorphism, m2: LocalizedMorphism, label: str | None = None
) -> LocalizedMorphism:
    """Composition (doubling as the monoidal product of the category)."""
    if m1.net is not m2.net and m1.net != m2.net:
        raise ValueError("morphisms live on different nets")
    mats = tuple(
        a @ b for a in m1.multiplet.matrices for b in m2.multiplet.matrices
    )
    region = tuple(sorted(set(m1.region) | set(m2.region)))
    lab = label if label is not None else f"{m1.label}*{m2.label}"
    return LocalizedMorphism(
        m1.net, region, ChargedMultiplet(lab, mats, region=frozenset(region))
    )


def solve_intertwiners(
    rho: LocalizedMorphism,
    sigma: LocalizedMorphism,
    tol_rank: float | None = None,
) -> list[np.ndarray]:
    """Basis of {T observable : T rho(A) = sigma(A) T on the whole algebra}.

    An empty result means the morphisms are disjoint (no common sector
    content); the returned basis is orthonormal under the trace inner
    product.  Composition closure (rho->sigma times sigma->tau lands in
    rho->tau) is a property the test suite asserts.
    """
    net = rho.net
    obs = net.observable_algebra()
    rho_imgs = np.array([rho.apply_raw(b) for b in obs.basis])
    sig_imgs = np.array([sigma.apply_raw(b) for b in obs.basis])
    cols = []
    for bk in obs.basis:
        cols.append(np.concatenate([
            (bk @ r - s @ bk).ravel() for r, s in zip(rho_imgs, sig_imgs)
        ]))
    system = np.array(cols).T
    null_rows = la.nullspace(system, tol_rank)
    return [np.tensordot(c, obs.basis, axes=(0, 0)) for c in null_rows]


@dataclass(frozen=True)
class HaagReport:
    region: tuple[int, ...]
    observable: bool
    lhs_dim: int
    rhs_dim: int
    defect: int
    passes: bool


def haag_duality_check(
    net: LatticeNet, region, observable: bool = False
) -> HaagReport:
    """Compare A(O')' against A(O)'' for a region of the net.

    The defect dim LHS - dim RHS vanishes exactly on the field net; on the
    observable net a positive defect is the signature of superselection
    structure.  The double commutant is computed literally for total
    dimension <= 16; above that the span of A(O) is used directly (its
    bicommutant equals its span, the finite-dimensional density theorem
    the algebra tests verify independently).
    """
    sites = normalize_region(net, region)
    comp = complement_sites(net, sites)
    lhs = commutant(region_algebra(net, comp, observable=observable))
    inner = region_algebra(net, sites, observable=observable)
    if net.total_dim <= 16:
        rhs = commutant(commutant(inner))
    else:
        rhs = inner
    defect = lhs.dim - rhs.dim
    return HaagReport(
        region=sites,
        observable=observable,
        lhs_dim=lhs.dim,
        rhs_dim=rhs.dim,
        defect=defect,
        passes=defect == 0,
    )


# ---------------------------------------------------------------------------
# inverse search: from a selected state back to a localized morphism
# ---------------------------------------------------------------------------


def default_onsite_candidates(d0: int) -> list[tuple[str, np.ndarray]]:
    """Weyl shift/phase candidates generating charges on a d0-level site."""
    shift = np.roll(np.eye(d0, dtype=complex), 1, axis=0)
    phase = np.diag(np.exp(2j * np.pi * np.arange(d0) / d0))
    cands = [("X", shift), ("Z", phase)]
    if d0 > 1:
        cands.append(("XZ", shift @ phase))
    return cands


@dataclass(frozen=True)
class InversionSearchReport:
    found: bool
    morphism: LocalizedMorphism | None
    region: tuple[int, ...] | None
    distance: float
    n_tried: int


def invert_selected_state(
    omega: State,
    omega0: State,
    net: LatticeNet,
    candidates: list[tuple[str, np.ndarray]] | None = None,
    tol: float = 1e-8,
) -> InversionSearchReport:
    """Search for a localized morphism rho with omega = omega_0 o rho.

    Scans tensor products of candidate on-site unitaries over every
    interval, keeping only assignments that normalize the observable
    algebra.  A hit must reproduce omega on the full observable basis.
    Heuristic by design: a miss is not a proof that no morphism exists.
    """
    cands = candidates if candidates is not None else default_onsite_candidates(
        net.onsite_dim
    )
    obs = net.observable_algebra()
    target = np.einsum("kij,ji->k", obs.basis, omega.density)
    tried = 0
    best = np.inf
    for region in enumerate_regions(net):
        if not region:
            dist = float(np.max(np.abs(
                target - np.einsum("kij,ji->k", obs.basis, omega0.density)
            )))
            best = min(best, dist)
            tried += 1
            if dist <= tol:
                return InversionSearchReport(True, identity_morphism(net),
                                             (), dist, tried)
            continue
        for combo in itertools.product(cands, repeat=len(region)):
            tried += 1
            u = combo[0][1]
            for _, nxt in combo[1:]:
                u = np.kron(u, nxt)
            name = "".join(n for n, _ in combo)
            morph = localized_morphism(net, region, [u], f"{name}@{region}")
            images = [morph.apply_raw(b) for b in obs.basis]
            if any(la.span_residual(obs.basis, img) > 1e-9 for img in images):
                continue
            rho = morph.multiplet.pullback_density(omega0.density)
            dist = float(np.max(np.abs(
                target - np.einsum("kij,ji->k", obs.basis, rho)
            )))
            best = min(best, dist)
            if dist <= tol:
                return InversionSearchReport(True, morph, region, dist, tried)
    return InversionSearchReport(False, None, None, best, tried)
