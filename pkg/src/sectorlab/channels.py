"""Classical<->quantum channels over a finite classifying space.

A c->q channel assigns a quantum state to every point of a finite label
set and extends affinely to probability weights.  The q->c direction is a
constrained moment problem: recover the weight from finitely many probe
expectations, solved as least squares on the probability simplex.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _linalg as la
from .algebra import OperatorAlgebra, State
from .config import rng_from_seed


@dataclass(frozen=True)
class ClassifyingSpace:
    """Ordered finite label set; labels are tuples of coordinates or strings."""

    labels: tuple
    coord_names: tuple[str, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("classifying-space labels must be distinct")

    @property
    def size(self) -> int:
        return len(self.labels)

    def index(self, label) -> int:
        return self.labels.index(label)


@dataclass(frozen=True)
class ProbabilityWeight:
    """A nonnegative normalized weight vector over a classifying space."""

    space: ClassifyingSpace
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "weights", w)
        if w.shape != (self.space.size,):
            raise ValueError("weight vector length must match the label count")
        if w.min() < -1e-12:
            raise ValueError(f"negative weight {w.min():.3e}")
        if abs(w.sum() - 1.0) > 1e-10:
            raise ValueError(f"weights sum to {w.sum()!r}, not 1")

    def l1_distance(self, other: "ProbabilityWeight") -> float:
        return float(np.abs(self.weights - other.weights).sum())

    def moments(self) -> dict[str, tuple[float, float]]:
        """Mean and variance of each named coordinate under the weight."""
        if self.space.coord_names is None:
            return {}
        out = {}
        for k, name in enumerate(self.space.coord_names):
            xs = np.array([lab[k] for lab in self.space.labels], dtype=float)
            mean = float(self.weights @ xs)
            out[name] = (mean, float(self.weights @ (xs - mean) ** 2))
        return out


def point_mass(space: ClassifyingSpace, label) -> ProbabilityWeight:
    w = np.zeros(space.size)
    w[space.index(label)] = 1.0
    return ProbabilityWeight(space, w)


def uniform_weight(space: ClassifyingSpace) -> ProbabilityWeight:
    return ProbabilityWeight(space, np.full(space.size, 1.0 / space.size))


@dataclass(frozen=True)
class ClassicalQuantumChannel:
    """A c->q channel: one fibre state per label of the classifying space."""

    space: ClassifyingSpace
    fibre_states: tuple[State, ...]

    def __post_init__(self):
        object.__setattr__(self, "fibre_states", tuple(self.fibre_states))
        if len(self.fibre_states) != self.space.size:
            raise ValueError("need exactly one fibre state per label")
        dims = {s.dim for s in self.fibre_states}
        if len(dims) != 1:
            raise ValueError("fibre states must share one dimension")

    @property
    def dim(self) -> int:
        return self.fibre_states[0].dim

    def densities(self) -> np.ndarray:
        return np.array([s.density for s in self.fibre_states])


def apply_cq(channel: ClassicalQuantumChannel, rho: ProbabilityWeight) -> State:
    """The dual channel on weights: the mixture sum_i rho_i * fibre_i."""
    if rho.space.labels != channel.space.labels:
        raise ValueError("weight and channel live on different classifying spaces")
    density = np.tensordot(rho.weights, channel.densities(), axes=(0, 0))
    return State(density, label="cq-mixture")


def evaluation_matrix(kernels, alg: OperatorAlgebra) -> np.ndarray:
    """Value table map[i, j] = tr(kernel_i basis_j) of a functional family.

    With the fibre densities as kernels this is the channel's map on the
    algebra basis (value of the classical function at each label).
    """
    ks = np.asarray(list(kernels), dtype=complex)
    return np.einsum("kij,aji->ka", ks, alg.basis)


@dataclass(frozen=True)
class PositiveUnitalReport:
    unitality_residual: float
    positivity_margin: float
    imag_leakage: float
    n_samples: int
    passed: bool


def verify_positive_unital(
    map_matrix: np.ndarray,
    alg: OperatorAlgebra,
    n_samples: int = 50,
    seed: int = 0,
    tol: float = 1e-9,
) -> PositiveUnitalReport:
    """Check unitality and positivity of a map given on the algebra basis.

    The codomain is commutative, so complete positivity reduces to entrywise
    positivity on elements A*A; positivity is sampled with seeded random
    algebra elements.  Failures are reported, never raised.
    """
    m = np.asarray(map_matrix)
    if m.shape[1] != alg.dim:
        raise ValueError("map matrix columns must match the algebra dimension")
    d = alg.ambient_dim
    unit_coeff = la.span_coefficients(alg.basis, np.eye(d, dtype=complex))
    image_of_unit = m @ unit_coeff
    unitality = float(np.max(np.abs(image_of_unit - 1.0)))
    rng = rng_from_seed(seed)
    margin = np.inf
    leak = 0.0
    for _ in range(n_samples):
        coeff = rng.standard_normal(alg.dim) + 1j * rng.standard_normal(alg.dim)
        a = np.tensordot(coeff, alg.basis, axes=(0, 0))
        sq = la.dagger(a) @ a
        sq /= max(1.0, la.hs_norm(sq))
        vals = m @ la.span_coefficients(alg.basis, sq)
        margin = min(margin, float(np.min(vals.real)))
        leak = max(leak, float(np.max(np.abs(vals.imag))))
    passed = unitality <= tol and margin >= -tol
    return PositiveUnitalReport(unitality, margin, leak, n_samples, passed)


# ---------------------------------------------------------------------------
# the moment problem: least squares on the probability simplex
# ---------------------------------------------------------------------------


def design_matrix(channel: ClassicalQuantumChannel, probes) -> np.ndarray:
    """M[j, i] = tr(probe_j fibre_i); real parts (probes are Hermitian)."""
    ps = np.asarray(list(probes), dtype=complex)
    m = np.einsum("pij,kji->pk", ps, channel.densities())
    return np.ascontiguousarray(m.real)


def forward_data(
    channel: ClassicalQuantumChannel, probes, rho: ProbabilityWeight
) -> np.ndarray:
    """Probe expectations of the mixed state apply_cq(channel, rho)."""
    return design_matrix(channel, probes) @ rho.weights


@dataclass(frozen=True)
class SeparationReport:
    passed: bool
    rank: int
    sigma_min: float
    n_labels: int


def separation_check(
    channel: ClassicalQuantumChannel, probes
) -> SeparationReport:
    """Rank test of the design matrix augmented with the normalization row.

    Full column rank means the probe family discriminates every weight on
    the grid, so the moment problem has a unique solution.
    """
    m = design_matrix(channel, probes)
    aug = np.vstack([m, np.ones(m.shape[1])])
    svals = np.linalg.svd(aug, compute_uv=False)
    cutoff = max(aug.shape) * np.finfo(float).eps * (svals[0] if svals.size else 0.0)
    rank = int(np.sum(svals > cutoff))
    sigma_min = float(svals[-1]) if svals.size else 0.0
    return SeparationReport(rank == channel.space.size, rank, sigma_min,
                            channel.space.size)


@dataclass(frozen=True)
class InversionResult:
    weight: ProbabilityWeight
    residual: float
    kkt_residual: float
    converged: bool
    iterations: int
    unique: bool
    rank: int
    sigma_min: float
    nullspace_dim: int


class _SolverState:
    """Active-set least squares over {x >= 0, sum x = 1}.

    Equality-constrained subproblems are solved through their KKT system
    with a minimum-norm least-squares solve, which doubles as the
    documented tie-break on rank-deficient (non-unique) problems.
    """

    def __init__(self, m: np.ndarray, b: np.ndarray):
        self.m = m
        self.b = b
        self.n = m.shape[1]
        self.gram = m.T @ m
        self.mtb = m.T @ b

    def solve_on(self, passive: np.ndarray) -> np.ndarray:
        cols = np.nonzero(passive)[0]
        k = cols.size
        kkt = np.zeros((k + 1, k + 1))
        kkt[:k, :k] = self.gram[np.ix_(cols, cols)]
        kkt[:k, k] = 1.0
        kkt[k, :k] = 1.0
        rhs = np.concatenate([self.mtb[cols], [1.0]])
        sol, *_ = np.linalg.lstsq(kkt, rhs, rcond=None)
        z = np.zeros(self.n)
        z[cols] = sol[:k]
        return z

    def kkt_residual(self, x: np.ndarray, passive: np.ndarray) -> float:
        g = self.gram @ x - self.mtb
        lam = -float(np.mean(g[passive])) if passive.any() else 0.0
        res = max(abs(x.sum() - 1.0), max(0.0, -float(x.min())))
        if passive.any():
            res = max(res, float(np.max(np.abs(g[passive] + lam))))
        if (~passive).any():
            res = max(res, max(0.0, -float(np.min(g[~passive] + lam))))
        return res


def _solve_simplex_lstsq(m: np.ndarray, b: np.ndarray, max_iter: int):
    st = _SolverState(m, b)
    n = st.n
    scale = max(1.0, float(np.abs(st.gram).max()), float(np.abs(st.mtb).max()))
    feas_tol = 1e-13
    dual_tol = 1e-12 * scale
    x = np.full(n, 1.0 / n)
    passive = np.ones(n, dtype=bool)
    iters = 0
    converged = True
    while True:
        # inner loop: feasible optimum on the passive set
        while True:
            iters += 1
            if iters > max_iter:
                converged = False
                break
            z = st.solve_on(passive)
            if z[passive].min() >= -feas_tol:
                x = np.where(passive, z, 0.0)
                break
            viol = passive & (z < -feas_tol)
            denom = x[viol] - z[viol]
            alphas = np.where(denom > 0, x[viol] / denom, np.inf)
            alpha = min(1.0, float(np.min(alphas)))
            x = x + alpha * (z - x)
            drop = passive & (x <= feas_tol)
            if drop.sum() >= passive.sum():
                drop[np.argmax(x)] = False
            passive &= ~drop
            x = np.where(passive, x, 0.0)
        if not converged:
            break
        g = st.gram @ x - st.mtb
        lam = -float(np.mean(g[passive])) if passive.any() else 0.0
        active = ~passive
        if not active.any():
            break
        duals = g[active] + lam
        if duals.min() >= -dual_tol:
            break
        j = np.nonzero(active)[0][int(np.argmin(duals))]
        passive[j] = True
    kkt = st.kkt_residual(x, passive)
    return x, kkt, converged, iters


def invert_cq(
    channel: ClassicalQuantumChannel,
    probes,
    data: np.ndarray,
    tol: float = 1e-6,
    max_iter: int = 100_000,
) -> InversionResult:
    """Recover a probability weight from probe expectations.

    Minimizes ||M rho - data||_2 over the probability simplex with a
    deterministic active-set scheme (KKT residual <= 1e-10 on solvable
    problems, iteration cap ``max_iter`` with an explicit converged flag).
    Inconsistent data shows up as a positive residual, never an exception.
    Non-uniqueness (rank-deficient augmented design) is flagged together
    with the nullspace dimension; the reported solution is then the
    minimum-norm tie-break.
    """
    probes = list(probes)
    if not probes:
        raise ValueError("at least one probe is required")
    data = np.asarray(data, dtype=float).reshape(-1)
    if data.shape[0] != len(probes):
        raise ValueError("data length must match the probe count")
    m = design_matrix(channel, probes)
    x, kkt, converged, iters = _solve_simplex_lstsq(m, data, max_iter)
    # final projection: exact constraint satisfaction
    x = np.clip(x, 0.0, None)
    x /= x.sum()
    sep = separation_check(channel, probes)
    residual = float(np.linalg.norm(m @ x - data))
    weight = ProbabilityWeight(channel.space, x)
    return InversionResult(
        weight=weight,
        residual=residual,
        kkt_residual=kkt,
        converged=converged,
        iterations=iters,
        unique=sep.passed,
        rank=sep.rank,
        sigma_min=sep.sigma_min,
        nullspace_dim=channel.space.size - sep.rank,
    )
