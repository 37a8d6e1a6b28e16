"""Finite-dimensional matrix *-algebras, commutants, centres, and states.

An :class:`OperatorAlgebra` is a unital *-closed subspace of d x d complex
matrices, stored as a stack of basis matrices orthonormal under the trace
inner product.  All operations are pure functions of their inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _linalg as la
from .config import DEFAULT_TOL, DIMENSION_CAP, Tolerances, rng_from_seed


class DimensionCapError(ValueError):
    """Ambient dimension exceeds the dense-matrix feasibility cap."""


class CentralProjectionError(RuntimeError):
    """Eigenvalue grouping stayed ambiguous after the retry budget."""


@dataclass(frozen=True)
class OperatorAlgebra:
    """A *-closed subspace of B(C^d) with an orthonormal basis stack.

    ``basis`` has shape (k, d, d); slices are orthonormal under
    <A, B> = tr(A* B).  ``generators`` optionally records a small subset
    whose generated algebra equals the span; commutant computations use it
    to avoid stacking every basis element.
    """

    ambient_dim: int
    basis: np.ndarray
    contains_unit: bool = True
    generators: tuple[np.ndarray, ...] | None = None

    @property
    def dim(self) -> int:
        return int(self.basis.shape[0])

    def contains(self, m: np.ndarray, tol: float | None = None) -> bool:
        t = DEFAULT_TOL.rank if tol is None else tol
        return la.span_contains(self.basis, np.asarray(m, dtype=complex), t)

    def project(self, m: np.ndarray) -> np.ndarray:
        """Trace-orthogonal projection onto the span of the algebra."""
        return la.project_onto_span(self.basis, np.asarray(m, dtype=complex))

    def validate(self, tol: Tolerances | None = None) -> None:
        """Check orthonormality, *-closure, product closure, and the unit.

        Product closure is O(k^2) matrix products; intended for tests and
        input validation, not for hot paths.
        """
        t = tol or DEFAULT_TOL
        k, d = self.dim, self.ambient_dim
        if self.basis.shape != (k, d, d):
            raise ValueError("basis stack shape does not match ambient_dim")
        gram = la.mats_to_rows(self.basis) @ la.mats_to_rows(self.basis).conj().T
        if not np.allclose(gram, np.eye(k), atol=1e-10):
            raise ValueError("basis is not orthonormal to 1e-10")
        for b in self.basis:
            if la.span_residual(self.basis, la.dagger(b)) > 1e-9:
                raise ValueError("basis not closed under adjoint")
        for b1 in self.basis:
            for b2 in self.basis:
                if la.span_residual(self.basis, b1 @ b2) > 1e-9:
                    raise ValueError("basis not closed under multiplication")
        if self.contains_unit:
            if la.span_residual(self.basis, np.eye(d, dtype=complex)) > 1e-10 * d:
                raise ValueError("unit not contained in span")
        if self.generators is not None:
            for g in self.generators:
                if not self.contains(g, t.rank):
                    raise ValueError("declared generator outside the span")


@dataclass(frozen=True)
class State:
    """A density matrix inducing a positive normalized functional."""

    density: np.ndarray
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "density", la.as_complex_matrix(self.density))

    @property
    def dim(self) -> int:
        return self.density.shape[0]

    def expect(self, a: np.ndarray) -> complex:
        return complex(np.trace(self.density @ a))

    def validate(self, tol: float | None = None) -> None:
        t = DEFAULT_TOL.state if tol is None else tol
        rho = self.density
        if np.linalg.norm(rho - la.dagger(rho)) > t * max(1.0, la.hs_norm(rho)):
            raise ValueError(f"density not Hermitian ({self.label!r})")
        evals = np.linalg.eigvalsh((rho + la.dagger(rho)) / 2)
        if evals.min() < -t:
            raise ValueError(f"density not positive semidefinite ({self.label!r})")
        if abs(np.trace(rho).real - 1.0) > t:
            raise ValueError(f"density trace != 1 ({self.label!r})")


def vector_state(vec: np.ndarray, label: str = "") -> State:
    v = np.asarray(vec, dtype=complex).reshape(-1)
    v = v / np.linalg.norm(v)
    return State(np.outer(v, v.conj()), label=label)


def full_matrix_algebra(d: int) -> OperatorAlgebra:
    """B(C^d) with the matrix-unit basis (orthonormal as given).

    Records a two-element generating set (cyclic shift and a generic
    diagonal), which keeps commutant computations cheap.
    """
    if d > DIMENSION_CAP:
        raise DimensionCapError(f"ambient dimension {d} exceeds cap {DIMENSION_CAP}")
    basis = np.zeros((d * d, d, d), dtype=complex)
    for a in range(d):
        for b in range(d):
            basis[a * d + b, a, b] = 1.0
    shift = np.roll(np.eye(d, dtype=complex), 1, axis=0)
    diag = np.diag(np.arange(1, d + 1, dtype=complex))
    gens = (shift, diag) if d > 1 else (np.eye(1, dtype=complex),)
    return OperatorAlgebra(d, basis, contains_unit=True, generators=gens)


def scalar_algebra(d: int) -> OperatorAlgebra:
    basis = np.eye(d, dtype=complex)[None, :, :] / np.sqrt(d)
    return OperatorAlgebra(d, basis, contains_unit=True,
                           generators=(np.eye(d, dtype=complex),))


def algebra_from_span(
    mats, contains_unit: bool | None = None, tol_rank: float | None = None,
    generators: tuple[np.ndarray, ...] | None = None,
) -> OperatorAlgebra:
    """Wrap an (already *-and product-closed) span as an OperatorAlgebra."""
    stack = np.asarray(list(mats), dtype=complex)
    d = stack.shape[-1]
    basis = la.orthonormalize_mats(stack, tol_rank)
    if contains_unit is None:
        contains_unit = la.span_residual(basis, np.eye(d, dtype=complex)) <= 1e-10 * d
    return OperatorAlgebra(d, basis, contains_unit=contains_unit, generators=generators)


def generate_algebra(
    generators, include_unit: bool = True, tol_rank: float | None = None,
    dimension_cap: int = DIMENSION_CAP,
) -> OperatorAlgebra:
    """Smallest unital *-closed subalgebra containing the generators.

    Closure is computed by iterating products of basis pairs and adjoints
    until the dimension stabilizes, orthonormalizing after every round.
    """
    gens = [la.as_complex_matrix(g) for g in generators]
    if gens:
        d = gens[0].shape[0]
        for g in gens:
            if g.shape != (d, d):
                raise ValueError("generators must be square with equal dimension")
    else:
        d = 1
        include_unit = True
    if d > dimension_cap:
        raise DimensionCapError(f"ambient dimension {d} exceeds cap {dimension_cap}")

    seed = list(gens)
    if include_unit:
        seed.append(np.eye(d, dtype=complex))
    seed += [la.dagger(g) for g in gens]
    basis = la.orthonormalize_mats(np.array(seed), tol_rank)
    while True:
        candidates = [basis]
        candidates.append(la.dagger(basis))
        prods = np.einsum("aij,bjk->abik", basis, basis).reshape(-1, d, d)
        candidates.append(prods)
        new_basis = la.orthonormalize_mats(np.concatenate(candidates), tol_rank)
        if new_basis.shape[0] == basis.shape[0]:
            basis = new_basis
            break
        basis = new_basis
    return OperatorAlgebra(
        d, basis, contains_unit=include_unit,
        generators=tuple(gens) if gens else (np.eye(d, dtype=complex),),
    )


def _commutant_basis(mats, d: int, tol_rank: float | None) -> np.ndarray:
    """Joint nullspace of X -> [X, M] over the given matrices (row-major vec).

    Small systems are stacked and SVD'd directly.  Larger ones go through
    the Hermitian form Q = sum_i L_i* L_i of the commutator maps L_i,
    assembled with batched tensor contractions; the nullspace is then the
    bottom eigenspace of Q (eigenvalues are squared singular values, so the
    relative cut sits at 1e-12).
    """
    mats = np.asarray(list(mats), dtype=complex)
    k = mats.shape[0]
    eye = np.eye(d, dtype=complex)
    if k * d * d <= 1024:
        blocks = [np.kron(m, eye) - np.kron(eye, m.T) for m in mats]
        null_rows = la.nullspace(np.concatenate(blocks, axis=0), tol_rank)
        return la.orthonormalize_mats(la.rows_to_mats(null_rows, d), tol_rank)
    md = la.dagger(mats)
    mdm = np.einsum("kij,kjl->il", md, mats)
    mmd = np.einsum("kij,kjl->il", mats, md)
    q = np.einsum("ac,bd->abcd", mdm, eye)
    q += np.einsum("ac,bd->abcd", eye, mmd.T)
    q -= np.einsum("kac,kbd->abcd", md, mats.transpose(0, 2, 1))
    q -= np.einsum("kac,kbd->abcd", mats, mats.conj())
    q = q.reshape(d * d, d * d)
    evals, evecs = np.linalg.eigh((q + la.dagger(q)) / 2)
    cut = max(float(evals[-1]), 1.0) * 1e-12
    null_rows = evecs[:, evals <= cut].T
    return la.orthonormalize_mats(la.rows_to_mats(null_rows, d), tol_rank)


def commutant(alg: OperatorAlgebra, tol_rank: float | None = None) -> OperatorAlgebra:
    """The relative commutant {X : XB = BX for all B in alg} inside B(C^d).

    Uses the algebra's recorded generating set when available (augmented
    with adjoints: the commutant of a self-adjoint set equals the
    commutant of the *-algebra it generates).
    """
    d = alg.ambient_dim
    if alg.generators is not None:
        mats = list(alg.generators) + [la.dagger(g) for g in alg.generators]
    else:
        mats = alg.basis
    basis = _commutant_basis(mats, d, tol_rank)
    return OperatorAlgebra(d, basis, contains_unit=True)


def center(alg: OperatorAlgebra, tol_rank: float | None = None) -> OperatorAlgebra:
    """Centre alg' inter alg, via trace-orthogonal projection onto alg.

    For a unital *-subalgebra the trace projection is a conditional
    expectation, so projecting the commutant basis into alg lands exactly
    on the centre.
    """
    comm = commutant(alg, tol_rank)
    projected = np.array([alg.project(c) for c in comm.basis])
    basis = la.orthonormalize_mats(projected, tol_rank)
    return OperatorAlgebra(alg.ambient_dim, basis, contains_unit=True)


def minimal_central_projections(
    alg: OperatorAlgebra,
    tol: Tolerances | None = None,
    seed: int = 0,
    max_retries: int = 5,
) -> list[np.ndarray]:
    """Spectral resolution of the centre into minimal orthogonal projections.

    A seeded pseudo-random Hermitian element of the centre is diagonalized
    and its eigenspaces grouped at the gap threshold; generically the
    grouping separates every minimal projection.  Ambiguous spectra are
    retried with a fresh seed up to ``max_retries`` times.

    Projections are canonically ordered by descending rank, then by
    lexicographically largest real diagonal.
    """
    t = tol or DEFAULT_TOL
    z = center(alg, t.rank)
    d = alg.ambient_dim
    if z.dim == 0:
        raise ValueError("algebra has an empty centre basis; not unital?")
    last_err: Exception | None = None
    for attempt in range(max_retries):
        rng = rng_from_seed(seed + attempt)
        coeff = rng.standard_normal(z.dim) + 1j * rng.standard_normal(z.dim)
        h = np.tensordot(coeff, z.basis, axes=(0, 0))
        h = (h + la.dagger(h)) / 2
        evals, evecs = np.linalg.eigh(h)
        try:
            groups = la.group_eigenvalues(evals, t.gap)
        except la.EigenvalueGapError as err:
            last_err = err
            continue
        projs = []
        for g in groups:
            v = evecs[:, g]
            projs.append(v @ la.dagger(v))
        # sanity: each projection must itself lie in the centre
        if any(la.span_residual(z.basis, p) > 1e-7 * max(1.0, la.hs_norm(p))
               for p in projs):
            last_err = CentralProjectionError("eigenprojection left the centre")
            continue
        def sort_key(p: np.ndarray):
            rank = int(round(np.trace(p).real))
            diag = tuple(np.round(np.diag(p).real, 9))
            return (-rank, tuple(-x for x in diag))
        projs.sort(key=sort_key)
        return projs
    raise CentralProjectionError(
        f"could not resolve the centre after {max_retries} seeds: {last_err}"
    )


def state_distance_mod(
    omega1: State, omega2: State, sub: OperatorAlgebra
) -> float:
    """max_B |omega1(B) - omega2(B)| over the orthonormal basis of ``sub``.

    Zero exactly when the two states agree on the subalgebra; a pseudo-metric
    on states for fixed ``sub``.
    """
    if omega1.dim != omega2.dim or omega1.dim != sub.ambient_dim:
        raise ValueError("states and subalgebra must share the ambient dimension")
    diff = omega1.density - omega2.density
    vals = np.einsum("kij,ji->k", sub.basis, diff)
    return float(np.max(np.abs(vals))) if vals.size else 0.0
