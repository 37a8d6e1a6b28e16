"""Gibbs reference states, thermal functions, and the thermality criterion.

Equilibrium at finite dimension means the Gibbs state exp(-beta(H - mu N))/Z;
the KMS identity holds exactly and is exposed as a checkable residual.  A
grid of (beta, mu) points plays the classifying space of thermodynamic
pure phases; the induced channel and its constrained inverse implement the
thermal interpretation of states, level by level along a hierarchy of
probe sets.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import _linalg as la
from .algebra import State
from .channels import (
    ClassicalQuantumChannel,
    ClassifyingSpace,
    InversionResult,
    invert_cq,
)
from .config import rng_from_seed


@dataclass(frozen=True)
class HamiltonianSystem:
    """Energy operator, optionally with a commuting particle number."""

    hamiltonian: np.ndarray
    number: np.ndarray | None = None

    def __post_init__(self):
        h = la.as_complex_matrix(self.hamiltonian)
        object.__setattr__(self, "hamiltonian", h)
        if np.linalg.norm(h - la.dagger(h)) > 1e-10 * max(1.0, la.hs_norm(h)):
            raise ValueError("Hamiltonian must be Hermitian")
        if self.number is not None:
            n = la.as_complex_matrix(self.number)
            object.__setattr__(self, "number", n)
            if np.linalg.norm(n - la.dagger(n)) > 1e-10 * max(1.0, la.hs_norm(n)):
                raise ValueError("number operator must be Hermitian")
            if np.linalg.norm(h @ n - n @ h) > 1e-10 * max(1.0, la.hs_norm(h)):
                raise ValueError("number operator must commute with H")

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]

    def effective_hamiltonian(self, mu: float | None) -> np.ndarray:
        if mu is None:
            return self.hamiltonian
        if self.number is None:
            raise ValueError("chemical potential given but no number operator")
        return self.hamiltonian - mu * self.number


@dataclass(frozen=True)
class ThermalGrid:
    """Finite list of (beta, mu) points; mu is None on mu-free grids."""

    points: tuple

    def __post_init__(self):
        pts = []
        for p in self.points:
            beta, mu = (p if len(p) == 2 else (p[0], None)) if isinstance(
                p, (tuple, list)
            ) else (float(p), None)
            beta = float(beta)
            if beta <= 0:
                raise ValueError(f"inverse temperature must be positive, got {beta}")
            pts.append((beta, None if mu is None else float(mu)))
        if len(set(pts)) != len(pts):
            raise ValueError("grid points must be distinct")
        has_mu = [p[1] is not None for p in pts]
        if any(has_mu) and not all(has_mu):
            raise ValueError("either every grid point carries mu or none does")
        object.__setattr__(self, "points", tuple(pts))

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def has_mu(self) -> bool:
        return bool(self.points) and self.points[0][1] is not None

    def to_space(self) -> ClassifyingSpace:
        if self.has_mu:
            return ClassifyingSpace(self.points, coord_names=("beta", "mu"))
        return ClassifyingSpace(
            tuple((b,) for b, _ in self.points), coord_names=("beta",)
        )


def beta_grid(betas: Sequence[float]) -> ThermalGrid:
    return ThermalGrid(tuple((float(b), None) for b in betas))


def gibbs_state(
    sys: HamiltonianSystem, beta: float, mu: float | None = None
) -> State:
    """exp(-beta (H - mu N)) / Z, overflow-guarded by a spectral shift."""
    if beta <= 0:
        raise ValueError(f"inverse temperature must be positive, got {beta}")
    h = sys.effective_hamiltonian(mu)
    evals, vecs = np.linalg.eigh(h)
    w = np.exp(-beta * (evals - evals.min()))
    w /= w.sum()
    label = f"gibbs(beta={beta:g}" + ("" if mu is None else f",mu={mu:g}") + ")"
    return State((vecs * w) @ la.dagger(vecs), label=label)


def log_partition(sys: HamiltonianSystem, beta: float, mu: float | None = None) -> float:
    """ln Z with the same spectral shift as gibbs_state."""
    evals = np.linalg.eigvalsh(sys.effective_hamiltonian(mu))
    shift = evals.min()
    return float(np.log(np.exp(-beta * (evals - shift)).sum()) - beta * shift)


def kms_residual(
    sys: HamiltonianSystem,
    beta: float,
    mu: float | None = None,
    n_samples: int = 20,
    seed: int = 0,
) -> float:
    """max |tr(rho A B) - tr(rho B e^{-bH'} A e^{bH'})| over random A, B.

    Zero (to rounding) for the Gibbs state: the finite-dimensional KMS
    condition characterizing equilibrium.
    """
    h = sys.effective_hamiltonian(mu)
    evals, vecs = np.linalg.eigh(h)
    rho = gibbs_state(sys, beta, mu).density
    shifted = evals - evals.min()
    em = (vecs * np.exp(-beta * shifted)) @ la.dagger(vecs)
    ep = (vecs * np.exp(beta * shifted)) @ la.dagger(vecs)
    rng = rng_from_seed(seed)
    d = sys.dim
    worst = 0.0
    for _ in range(n_samples):
        a = la.random_hermitian(rng, d)
        b = la.random_hermitian(rng, d)
        a /= max(1.0, np.linalg.norm(a, 2))
        b /= max(1.0, np.linalg.norm(b, 2))
        lhs = np.trace(rho @ a @ b)
        rhs = np.trace(rho @ b @ (em @ a @ ep))
        worst = max(worst, abs(lhs - rhs))
    return float(worst)


def thermal_function(
    sys: HamiltonianSystem, grid: ThermalGrid, a: np.ndarray
) -> np.ndarray:
    """The classical function (beta, mu) -> omega_{beta,mu}(A) over the grid.

    Real-valued for Hermitian A.
    """
    a = la.as_complex_matrix(a)
    vals = np.array([
        np.trace(gibbs_state(sys, b, m).density @ a) for b, m in grid.points
    ])
    if np.linalg.norm(a - la.dagger(a)) <= 1e-12 * max(1.0, la.hs_norm(a)):
        return vals.real
    return vals


def build_thermal_channel(
    sys: HamiltonianSystem, grid: ThermalGrid
) -> ClassicalQuantumChannel:
    """The c->q channel whose fibres are the grid's Gibbs states."""
    fibres = tuple(gibbs_state(sys, b, m) for b, m in grid.points)
    return ClassicalQuantumChannel(grid.to_space(), fibres)


def entropy_density(
    sys: HamiltonianSystem, grid: ThermalGrid
) -> np.ndarray:
    """Derived report quantity s = beta (u' - f') from the Gibbs data.

    u' and f' are the internal energy and free energy of the effective
    Hamiltonian H - mu N.  This is the von Neumann entropy of the Gibbs
    state; it is a derived report, not a value of any single thermal
    function (no probe has it as its expectation).
    """
    out = []
    for beta, mu in grid.points:
        h = sys.effective_hamiltonian(mu)
        rho = gibbs_state(sys, beta, mu).density
        u = float(np.trace(rho @ h).real)
        f = -log_partition(sys, beta, mu) / beta
        out.append(beta * (u - f))
    return np.array(out)


# ---------------------------------------------------------------------------
# probe hierarchies and the thermality criterion
# ---------------------------------------------------------------------------

#: a probe set is a sequence of (name, Hermitian matrix) pairs
ProbeSet = Sequence[tuple[str, np.ndarray]]


@dataclass(frozen=True)
class ObservableHierarchy:
    """Nested, named probe sets S_1 <= S_2 <= ... ordered coarse to fine."""

    levels: tuple  # of (level_name, ProbeSet)

    def __post_init__(self):
        norm = tuple(
            (str(name), tuple((str(pn), la.as_complex_matrix(pm)) for pn, pm in probes))
            for name, probes in self.levels
        )
        object.__setattr__(self, "levels", norm)

    @property
    def n_levels(self) -> int:
        return len(self.levels)

    def validate_nesting(self, tol: float = 1e-9) -> None:
        """Span inclusion of consecutive levels."""
        for (n1, p1), (n2, p2) in zip(self.levels, self.levels[1:]):
            if not p2:
                raise ValueError(f"level {n2!r} is empty but follows {n1!r}")
            span = la.orthonormalize_mats(np.array([m for _, m in p2]))
            for pname, m in p1:
                if la.span_residual(span, m) > tol * max(1.0, la.hs_norm(m)):
                    raise ValueError(
                        f"probe {pname!r} of level {n1!r} not within level {n2!r}"
                    )


@dataclass(frozen=True)
class ThermalVerdict:
    """Outcome of the thermality check at one probe level."""

    level: str
    accepted: bool
    weight_estimate: object  # ProbabilityWeight
    residual: float
    tolerance: float
    unique: bool
    nullspace_dim: int
    moments: dict


def s_thermal_check(
    measured: Mapping[str, float],
    level: ProbeSet,
    channel: ClassicalQuantumChannel,
    tol: float = 1e-8,
    level_name: str = "",
) -> ThermalVerdict:
    """Test whether the measured expectations look thermal at this level.

    Accepts iff some grid weight reproduces every probe value in the level
    to within ``tol`` (inversion residual); the witness weight is returned
    as the conditional thermal interpretation of the measured state.
    """
    names = [str(n) for n, _ in level]
    missing = [n for n in names if n not in measured]
    if missing:
        raise KeyError(f"probes without measured values: {missing}")
    probes = [m for _, m in level]
    data = np.array([float(measured[n]) for n in names])
    result: InversionResult = invert_cq(channel, probes, data, tol=tol)
    return ThermalVerdict(
        level=level_name,
        accepted=result.residual <= tol,
        weight_estimate=result.weight,
        residual=result.residual,
        tolerance=tol,
        unique=result.unique,
        nullspace_dim=result.nullspace_dim,
        moments=result.weight.moments(),
    )


@dataclass(frozen=True)
class HierarchyReport:
    verdicts: tuple[ThermalVerdict, ...]
    max_accepted_level: str | None
    residual_monotone: bool


def hierarchy_report(
    measured: Mapping[str, float],
    hierarchy: ObservableHierarchy,
    channel: ClassicalQuantumChannel,
    tol: float = 1e-8,
) -> HierarchyReport:
    """Run the thermality check at every level of the hierarchy.

    Residuals are non-decreasing with the level (larger probe sets can
    only fit worse); the report records the finest accepted level, or
    None when even the coarsest fails (or the hierarchy is empty).
    """
    verdicts = []
    for name, probes in hierarchy.levels:
        verdicts.append(
            s_thermal_check(measured, probes, channel, tol=tol, level_name=name)
        )
    residuals = [v.residual for v in verdicts]
    monotone = all(
        r1 <= r2 + 1e-12 for r1, r2 in zip(residuals, residuals[1:])
    )
    accepted = [v.level for v in verdicts if v.accepted]
    return HierarchyReport(
        verdicts=tuple(verdicts),
        max_accepted_level=accepted[-1] if accepted else None,
        residual_monotone=monotone,
    )
