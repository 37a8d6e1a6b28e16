"""Finite groups, unitary representations, averaging, and isotypic structure.

Groups are explicit multiplication tables; Haar measure is uniform.  The
isotypic decomposition returns the data of the sector picture: labels, a
multiplicity space and an irrep space per label, and the change-of-basis
unitary realizing U(g) = direct sum of 1_H (x) gamma(g) blocks.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import _linalg as la
from .algebra import OperatorAlgebra
from .config import DEFAULT_TOL, Tolerances, rng_from_seed


@dataclass(frozen=True)
class FiniteGroup:
    """A finite group given by its multiplication table of element indices."""

    table: np.ndarray
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "table", np.asarray(self.table, dtype=int))

    @property
    def order(self) -> int:
        return self.table.shape[0]

    @property
    def identity(self) -> int:
        n = self.order
        for e in range(n):
            if np.array_equal(self.table[e], np.arange(n)) and np.array_equal(
                self.table[:, e], np.arange(n)
            ):
                return e
        raise ValueError("multiplication table has no identity element")

    @property
    def inverses(self) -> np.ndarray:
        e = self.identity
        inv = np.full(self.order, -1, dtype=int)
        rows, cols = np.nonzero(self.table == e)
        inv[rows] = cols
        if np.any(inv < 0):
            raise ValueError("multiplication table has non-invertible elements")
        return inv

    def validate(self, rng_seed: int = 0) -> None:
        """Check group laws; associativity fully for order <= 64, sampled above."""
        n = self.order
        if self.table.shape != (n, n) or self.table.min() < 0 or self.table.max() >= n:
            raise ValueError("table must be n x n with entries in range(n)")
        e = self.identity
        inv = self.inverses
        if not np.all(self.table[np.arange(n), inv] == e):
            raise ValueError("inverse law fails")
        t = self.table
        if n <= 64:
            lhs = t[t, :]
            rhs = t[:, t].transpose(1, 2, 0)
            if not np.array_equal(lhs, rhs.transpose(2, 0, 1)):
                # fall back to the direct check for a readable error
                for a, b, c in itertools.product(range(n), repeat=3):
                    if t[t[a, b], c] != t[a, t[b, c]]:
                        raise ValueError(f"associativity fails at ({a},{b},{c})")
        else:
            rng = rng_from_seed(rng_seed)
            for a, b, c in rng.integers(0, n, size=(2000, 3)):
                if t[t[a, b], c] != t[a, t[b, c]]:
                    raise ValueError(f"associativity fails at ({a},{b},{c})")

    def conjugacy_classes(self) -> list[np.ndarray]:
        """Conjugacy classes as index arrays, ordered by smallest member."""
        n = self.order
        inv = self.inverses
        seen = np.zeros(n, dtype=bool)
        classes = []
        for g in range(n):
            if seen[g]:
                continue
            orbit = {int(self.table[self.table[h, g], inv[h]]) for h in range(n)}
            cls = np.array(sorted(orbit))
            seen[cls] = True
            classes.append(cls)
        return classes


def cyclic_group(n: int) -> FiniteGroup:
    idx = np.arange(n)
    return FiniteGroup((idx[:, None] + idx[None, :]) % n, name=f"cyclic:{n}")


def symmetric_group(n: int) -> FiniteGroup:
    """S_n as a table over lexicographically sorted permutation tuples."""
    if n > 5:
        raise ValueError("symmetric_group is intended for small n (<= 5)")
    perms = sorted(itertools.permutations(range(n)))
    index = {p: i for i, p in enumerate(perms)}
    m = len(perms)
    table = np.zeros((m, m), dtype=int)
    for i, p in enumerate(perms):
        for j, q in enumerate(perms):
            table[i, j] = index[tuple(p[q[k]] for k in range(n))]
    return FiniteGroup(table, name=f"symmetric:{n}")


def quaternion_group() -> FiniteGroup:
    """Q8 = {+-1, +-i, +-j, +-k}, built from the 2x2 unit-quaternion matrices."""
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]], dtype=complex)
    sz = np.array([[1, 0], [0, -1]], dtype=complex)
    units = [np.eye(2, dtype=complex), 1j * sx, 1j * sy, 1j * sz]
    elements = [s * u for u in units for s in (1, -1)]
    m = len(elements)
    table = np.zeros((m, m), dtype=int)
    for i, a in enumerate(elements):
        for j, b in enumerate(elements):
            prod = a @ b
            matches = [k for k, c in enumerate(elements) if np.allclose(prod, c)]
            table[i, j] = matches[0]
    return FiniteGroup(table, name="quaternion:8")


BUILTIN_GROUPS = {
    "cyclic": cyclic_group,
    "symmetric": symmetric_group,
    "quaternion": lambda n=8: quaternion_group(),
}


def builtin_group(spec: str) -> FiniteGroup:
    """Resolve a name like ``cyclic:2``, ``symmetric:3`` or ``quaternion:8``."""
    name, _, arg = spec.partition(":")
    if name not in BUILTIN_GROUPS:
        raise ValueError(f"unknown built-in group {spec!r}")
    if name == "quaternion":
        if arg and int(arg) != 8:
            raise ValueError("only quaternion:8 is available")
        return quaternion_group()
    if not arg:
        raise ValueError(f"built-in group {name!r} needs an order, e.g. {name}:2")
    return BUILTIN_GROUPS[name](int(arg))


@dataclass(frozen=True)
class UnitaryRep:
    """A unitary representation: one d x d matrix per group element."""

    group: FiniteGroup
    matrices: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "matrices", np.asarray(self.matrices, dtype=complex)
        )

    @property
    def dim(self) -> int:
        return int(self.matrices.shape[-1])

    def validate(self, tol: float = 1e-10) -> None:
        n = self.group.order
        if self.matrices.shape != (n, self.dim, self.dim):
            raise ValueError("need one matrix per group element")
        eye = np.eye(self.dim)
        for g in range(n):
            u = self.matrices[g]
            if np.linalg.norm(la.dagger(u) @ u - eye) > tol * self.dim:
                raise ValueError(f"matrix for element {g} is not unitary")
        t = self.group.table
        for g in range(n):
            for h in range(n):
                res = self.matrices[g] @ self.matrices[h] - self.matrices[t[g, h]]
                if np.linalg.norm(res) > tol * self.dim:
                    raise ValueError(f"not a homomorphism at ({g},{h})")

    def conjugate(self, g: int, f: np.ndarray) -> np.ndarray:
        """The action tau_g(F) = U(g) F U(g)*."""
        u = self.matrices[g]
        return u @ f @ la.dagger(u)


def trivial_rep(group: FiniteGroup, dim: int = 1) -> UnitaryRep:
    mats = np.broadcast_to(np.eye(dim, dtype=complex), (group.order, dim, dim))
    return UnitaryRep(group, np.array(mats))


def rep_from_matrices(group: FiniteGroup, matrices) -> UnitaryRep:
    return UnitaryRep(group, np.asarray(list(matrices), dtype=complex))


def regular_rep(group: FiniteGroup) -> UnitaryRep:
    """Left regular representation: U(g) e_h = e_{gh}."""
    n = group.order
    mats = np.zeros((n, n, n), dtype=complex)
    for g in range(n):
        mats[g, group.table[g], np.arange(n)] = 1.0
    return UnitaryRep(group, mats)


def cyclic_rep_from_unitary(u: np.ndarray, n: int) -> UnitaryRep:
    """Representation of cyclic:n generated by a unitary with u^n = 1."""
    u = la.as_complex_matrix(u)
    d = u.shape[0]
    if np.linalg.norm(np.linalg.matrix_power(u, n) - np.eye(d)) > 1e-10 * d:
        raise ValueError(f"generator does not satisfy u^{n} = 1")
    mats = np.array([np.linalg.matrix_power(u, k) for k in range(n)])
    return UnitaryRep(cyclic_group(n), mats)


def tensor_power_rep(rep: UnitaryRep, sites: int) -> UnitaryRep:
    """Site-wise action on a chain: g acts by U(g) on every tensor factor."""
    mats = rep.matrices
    for _ in range(sites - 1):
        mats = np.array([np.kron(a, b) for a, b in zip(mats, rep.matrices)])
    return UnitaryRep(rep.group, mats)


# ---------------------------------------------------------------------------
# conditional expectation and fixed points
# ---------------------------------------------------------------------------


def average(f: np.ndarray, rep: UnitaryRep) -> np.ndarray:
    """Group average m(F) = (1/|G|) sum_g U(g) F U(g)*.

    The projection of B(C^d) onto the commutant of the representation;
    restricted to an invariant algebra it is the conditional expectation
    onto the fixed points.
    """
    f = la.as_complex_matrix(f)
    if f.shape[0] != rep.dim:
        raise ValueError("dimension mismatch between F and the representation")
    u = rep.matrices
    return np.einsum("gij,jk,glk->il", u, f, u.conj()) / rep.group.order


def average_stack(fs: np.ndarray, rep: UnitaryRep) -> np.ndarray:
    u = rep.matrices
    return np.einsum("gij,ajk,glk->ail", u, fs, u.conj()) / rep.group.order


def fixed_point_algebra(
    f_alg: OperatorAlgebra, rep: UnitaryRep, tol_rank: float | None = None
) -> OperatorAlgebra:
    """The invariant subalgebra {A in F : tau_g(A) = A for all g}.

    Computed as the range of the averaging projection restricted to F,
    re-orthonormalized.
    """
    if rep.dim != f_alg.ambient_dim:
        raise ValueError("representation dimension must match the ambient algebra")
    averaged = average_stack(f_alg.basis, rep)
    basis = la.orthonormalize_mats(averaged, tol_rank)
    return OperatorAlgebra(f_alg.ambient_dim, basis,
                           contains_unit=f_alg.contains_unit)


def intertwiner_space(
    rep1: UnitaryRep, rep2: UnitaryRep, tol_rank: float | None = None
) -> list[np.ndarray]:
    """Basis of {S : S U1(g) = U2(g) S}; empty means disjoint representations."""
    if rep1.group.order != rep2.group.order or not np.array_equal(
        rep1.group.table, rep2.group.table
    ):
        raise ValueError("representations must share the group")
    d1, d2 = rep1.dim, rep2.dim
    blocks = [
        np.kron(np.eye(d2), rep1.matrices[g].T) - np.kron(rep2.matrices[g], np.eye(d1))
        for g in range(rep1.group.order)
    ]
    null_rows = la.nullspace(np.concatenate(blocks, axis=0), tol_rank)
    return [row.reshape(d2, d1) for row in null_rows]


# ---------------------------------------------------------------------------
# isotypic decomposition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SectorDecomposition:
    """Sector data of a representation: H_gamma (x) V_gamma blocks.

    ``unitary`` W satisfies W* U(g) W = direct_sum over labels of
    1_{mult} (x) irrep(g), with blocks in label order.  ``projections``
    are the minimal central projections P_gamma in the original basis.
    """

    group: FiniteGroup
    ambient_dim: int
    labels: tuple[str, ...]
    mult_dims: tuple[int, ...]
    irrep_dims: tuple[int, ...]
    unitary: np.ndarray
    projections: np.ndarray
    irreps: tuple[np.ndarray, ...]
    field_algebra_full: bool = True

    @property
    def n_sectors(self) -> int:
        return len(self.labels)

    def block_slices(self) -> list[slice]:
        out, start = [], 0
        for m, dv in zip(self.mult_dims, self.irrep_dims):
            out.append(slice(start, start + m * dv))
            start += m * dv
        return out

    def characters(self) -> np.ndarray:
        """Character table slice: chi[label, g] = tr irrep_label(g)."""
        return np.array([[np.trace(u) for u in irr] for irr in self.irreps])

    def block_rep_matrix(self, g: int) -> np.ndarray:
        """The direct sum over labels of 1_mult (x) irrep(g)."""
        blocks = [
            np.kron(np.eye(m), irr[g])
            for m, irr in zip(self.mult_dims, self.irreps)
        ]
        d = self.ambient_dim
        out = np.zeros((d, d), dtype=complex)
        for sl, b in zip(self.block_slices(), blocks):
            out[sl, sl] = b
        return out

    def reconstruction_residual(self, rep: UnitaryRep) -> float:
        """max_g || U(g) - W (direct sum 1 (x) irrep(g)) W* ||_F."""
        w = self.unitary
        res = 0.0
        for g in range(self.group.order):
            rebuilt = w @ self.block_rep_matrix(g) @ la.dagger(w)
            res = max(res, float(np.linalg.norm(rep.matrices[g] - rebuilt)))
        return res

    def observable_block_residual(self, a: np.ndarray) -> float:
        """Distance of W* a W from the repeated-block form X_gamma (x) 1_V.

        Zero exactly for elements of the commutant of the representation.
        """
        conj = la.dagger(self.unitary) @ a @ self.unitary
        res = 0.0
        slices = self.block_slices()
        for sl, m, dv in zip(slices, self.mult_dims, self.irrep_dims):
            block = conj[sl, sl]
            t = block.reshape(m, dv, m, dv)
            x = np.einsum("ikjk->ij", t) / dv
            res = max(res, float(np.linalg.norm(t - np.einsum(
                "ij,kl->ikjl", x, np.eye(dv)))))
        for i, si in enumerate(slices):
            for j, sj in enumerate(slices):
                if i != j:
                    res = max(res, float(np.linalg.norm(conj[si, sj])))
        return res

    def observable_algebra(self) -> OperatorAlgebra:
        """The commutant of the representation, built block by block.

        Basis elements are W (E_ab^{H} (x) 1_V) W* (normalized); dimension
        is the sum of mult_dim^2 over labels.
        """
        d = self.ambient_dim
        mats = []
        for sl, m, dv in zip(self.block_slices(), self.mult_dims, self.irrep_dims):
            for a in range(m):
                for b in range(m):
                    blk = np.zeros((d, d), dtype=complex)
                    unit = np.zeros((m, m))
                    unit[a, b] = 1.0
                    blk[sl, sl] = np.kron(unit, np.eye(dv)) / np.sqrt(dv)
                    mats.append(self.unitary @ blk @ la.dagger(self.unitary))
        return OperatorAlgebra(d, np.array(mats), contains_unit=True)


class IsotypicError(RuntimeError):
    """Decomposition failed to resolve after the retry budget."""


def _split_isotypic_block(
    rep: UnitaryRep, block_basis: np.ndarray, tol: Tolerances,
    rng: np.random.Generator,
):
    """Factor one isotypic block into multiplicity x irrep structure.

    Returns (columns, irrep_matrices, mult_dim, irrep_dim) where ``columns``
    is d x (mult*irrep) with W-ordering (multiplicity index outer).
    """
    r = block_basis.shape[1]
    n = rep.group.order
    u_restricted = np.einsum(
        "pi,gpq,qj->gij", block_basis.conj(), rep.matrices, block_basis
    )
    # generic Hermitian element of the block commutant
    k = la.random_hermitian(rng, r)
    k = np.einsum("gij,jk,glk->il", u_restricted, k, u_restricted.conj()) / n
    k = (k + la.dagger(k)) / 2
    evals, evecs = np.linalg.eigh(k)
    groups = la.group_eigenvalues(evals, tol.gap)
    sizes = {len(g) for g in groups}
    if len(sizes) != 1:
        raise la.EigenvalueGapError(
            f"unequal eigenspace sizes {sorted(len(g) for g in groups)} "
            "in an isotypic block"
        )
    irrep_dim = sizes.pop()
    mult = len(groups)
    if mult * irrep_dim != r:
        raise la.EigenvalueGapError("block size mismatch after grouping")

    copies = [evecs[:, g] for g in groups]
    gamma = np.einsum("pi,gpq,qj->gij", copies[0].conj(), u_restricted, copies[0])
    columns = [copies[0]]
    for v in copies[1:]:
        gamma_j = np.einsum("pi,gpq,qj->gij", v.conj(), u_restricted, v)
        blocks = [
            np.kron(np.eye(irrep_dim), gamma[g].T) -
            np.kron(gamma_j[g], np.eye(irrep_dim))
            for g in range(n)
        ]
        null_rows = la.nullspace(np.concatenate(blocks, axis=0), tol.rank)
        if null_rows.shape[0] != 1:
            raise la.EigenvalueGapError(
                f"intertwiner space within a block has dimension "
                f"{null_rows.shape[0]}, expected 1"
            )
        t = null_rows[0].reshape(irrep_dim, irrep_dim)
        t *= np.sqrt(irrep_dim) / np.linalg.norm(t)
        # canonical phase: largest entry real positive
        pivot = np.unravel_index(np.argmax(np.abs(t)), t.shape)
        t *= np.exp(-1j * np.angle(t[pivot]))
        columns.append(v @ t)
    cols = np.concatenate(columns, axis=1)
    return block_basis @ cols, gamma, mult, irrep_dim


def _character_sort_key(irrep: np.ndarray):
    chars = [np.trace(u) for u in irrep]
    return tuple(
        (-round(float(c.real), 9), -round(float(c.imag), 9)) for c in chars
    )


def isotypic_decomposition(
    rep: UnitaryRep,
    tol: Tolerances | None = None,
    seed: int = 0,
    max_retries: int = 5,
) -> SectorDecomposition:
    """Decompose a representation into isotypic blocks H_gamma (x) V_gamma.

    Central projections come from a seeded random Hermitian element of the
    span of conjugacy-class sums (the centre of the group image); each
    block is then split by a generic element of its commutant.  Labels are
    canonical: sorted by irrep dimension ascending, then by character
    values in descending lexicographic order (the trivial irrep sorts
    first among one-dimensional labels).
    """
    t = tol or DEFAULT_TOL
    d = rep.dim
    n = rep.group.order
    class_sums = np.array(
        [rep.matrices[cls].sum(axis=0) for cls in rep.group.conjugacy_classes()]
    )
    center_basis = la.orthonormalize_mats(class_sums, t.rank)
    last_err: Exception | None = None
    for attempt in range(max_retries):
        rng = rng_from_seed(seed + attempt)
        coeff = rng.standard_normal(center_basis.shape[0])
        h = np.tensordot(coeff, center_basis, axes=(0, 0))
        h = (h + la.dagger(h)) / 2
        evals, evecs = np.linalg.eigh(h)
        try:
            groups = la.group_eigenvalues(evals, t.gap)
            blocks = []
            for g in groups:
                basis = evecs[:, g]
                blocks.append(_split_isotypic_block(rep, basis, t, rng))
        except la.EigenvalueGapError as err:
            last_err = err
            continue
        order = sorted(
            range(len(blocks)),
            key=lambda i: (blocks[i][3], _character_sort_key(blocks[i][1])),
        )
        w = np.concatenate([blocks[i][0] for i in order], axis=1)
        projections = np.array([
            blocks[i][0] @ la.dagger(blocks[i][0]) for i in order
        ])
        return SectorDecomposition(
            group=rep.group,
            ambient_dim=d,
            labels=tuple(f"gamma{k}" for k in range(len(order))),
            mult_dims=tuple(blocks[i][2] for i in order),
            irrep_dims=tuple(blocks[i][3] for i in order),
            unitary=w,
            projections=projections,
            irreps=tuple(blocks[i][1] for i in order),
        )
    raise IsotypicError(
        f"isotypic decomposition unresolved after {max_retries} seeds: {last_err}"
    )
