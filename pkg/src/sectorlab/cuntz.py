"""Exact word arithmetic in the algebra of d isometries.

Elements are finite combinations of normal-form words: a creation string
followed by an annihilation string, psi_mu psi_nu*.  Multiplication
contracts by prefix matching (psi_i* psi_j = delta_ij); the completeness
relation sum_i psi_i psi_i* = 1 is applied as a one-directional
simplification that collapses a literal full sum with equal coefficients
into its parent word.  This keeps normal forms unique without general
rewriting machinery; it is a convention of the representation, not a
canonical form for the underlying algebra element.

Coefficients stay exact complex rationals as long as every input is
rational; any float input switches the polynomial to floating mode.
A truncated Fock representation (sparse matrices over index strings of
bounded length) serves as the independent oracle for the rewriting rules.
"""

from __future__ import annotations

import numbers
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp

from . import _linalg as la


@dataclass(frozen=True)
class QRat:
    """A complex number with exact rational real and imaginary parts."""

    re: Fraction
    im: Fraction

    @staticmethod
    def of(value) -> "QRat":
        if isinstance(value, QRat):
            return value
        if isinstance(value, (int, Fraction, numbers.Integral)):
            return QRat(Fraction(int(value) if isinstance(value, numbers.Integral)
                                 else value), Fraction(0))
        raise TypeError(f"not exactly representable: {value!r}")

    def __add__(self, other: "QRat") -> "QRat":
        return QRat(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "QRat") -> "QRat":
        return QRat(self.re - other.re, self.im - other.im)

    def __mul__(self, other: "QRat") -> "QRat":
        return QRat(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __neg__(self) -> "QRat":
        return QRat(-self.re, -self.im)

    def conjugate(self) -> "QRat":
        return QRat(self.re, -self.im)

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __str__(self) -> str:
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}i"
        sign = "+" if self.im >= 0 else "-"
        return f"({self.re}{sign}{abs(self.im)}i)"


QRAT_ONE = QRat(Fraction(1), Fraction(0))


class CuntzWord(NamedTuple):
    """Normal-form word psi_mu psi_nu*; letters are 1..d."""

    mu: tuple[int, ...]
    nu: tuple[int, ...]

    def sort_key(self):
        return (len(self.mu), self.mu, len(self.nu), self.nu)

    def adjoint(self) -> "CuntzWord":
        return CuntzWord(self.nu, self.mu)

    def max_length(self) -> int:
        return max(len(self.mu), len(self.nu))


UNIT_WORD = CuntzWord((), ())


def _word_product(w1: CuntzWord, w2: CuntzWord) -> CuntzWord | None:
    """psi_mu1 psi_nu1* . psi_mu2 psi_nu2*; None when the overlap mismatches."""
    k = min(len(w1.nu), len(w2.mu))
    if w1.nu[:k] != w2.mu[:k]:
        return None
    if len(w1.nu) <= len(w2.mu):
        return CuntzWord(w1.mu + w2.mu[len(w1.nu):], w2.nu)
    return CuntzWord(w1.mu, w2.nu + w1.nu[len(w2.mu):])


def _is_exact_scalar(c) -> bool:
    return isinstance(c, (Fraction, QRat, numbers.Integral))


def _contract_full_sums(d: int, terms: dict) -> dict:
    """Collapse every literal complete sum psi_{mu i} psi_{nu i}* with equal
    coefficients into its parent word, repeatedly to a fixpoint.

    Groups never overlap (the parent of a word is unique), so the result
    is independent of scan order.
    """
    letters = set(range(1, d + 1))
    while True:
        families: dict[CuntzWord, list[CuntzWord]] = {}
        for w in terms:
            if w.mu and w.nu and w.mu[-1] == w.nu[-1]:
                parent = CuntzWord(w.mu[:-1], w.nu[:-1])
                families.setdefault(parent, []).append(w)
        applied = False
        for parent, kids in families.items():
            if len(kids) != d:
                continue
            if {w.mu[-1] for w in kids} != letters:
                continue
            coeffs = [terms[w] for w in kids]
            if any(c != coeffs[0] for c in coeffs[1:]):
                continue
            for w in kids:
                del terms[w]
            if parent in terms:
                merged = terms[parent] + coeffs[0]
                if merged:
                    terms[parent] = merged
                else:
                    del terms[parent]
            else:
                terms[parent] = coeffs[0]
            applied = True
        if not applied:
            return terms


@dataclass(frozen=True, eq=False)
class CuntzPolynomial:
    """Finite combination of normal-form words with dimension d.

    ``exact`` records whether coefficients are exact complex rationals
    (QRat) or floating complex numbers.  Instances are immutable; all
    arithmetic returns new polynomials in normal form.
    """

    d: int
    terms: dict
    exact: bool

    @staticmethod
    def build(d: int, raw_terms: dict) -> "CuntzPolynomial":
        """Normalize a word -> coefficient mapping into a polynomial."""
        if d < 1:
            raise ValueError("dimension must be at least 1")
        exact = all(_is_exact_scalar(c) for c in raw_terms.values())
        terms: dict[CuntzWord, object] = {}
        for w, c in raw_terms.items():
            word = w if isinstance(w, CuntzWord) else CuntzWord(tuple(w[0]), tuple(w[1]))
            for letter in word.mu + word.nu:
                if not 1 <= letter <= d:
                    raise ValueError(f"letter {letter} outside 1..{d}")
            coeff = QRat.of(c) if exact else complex(c)
            if word in terms:
                coeff = terms[word] + coeff
            if coeff:
                terms[word] = coeff
            elif word in terms:
                del terms[word]
        return CuntzPolynomial(d, _contract_full_sums(d, terms), exact)

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(d: int) -> "CuntzPolynomial":
        return CuntzPolynomial(d, {}, True)

    @staticmethod
    def unit(d: int) -> "CuntzPolynomial":
        return CuntzPolynomial(d, {UNIT_WORD: QRAT_ONE}, True)

    @staticmethod
    def generator(d: int, i: int) -> "CuntzPolynomial":
        """The isometry psi_i."""
        if not 1 <= i <= d:
            raise ValueError(f"generator index {i} outside 1..{d}")
        return CuntzPolynomial(d, {CuntzWord((i,), ()): QRAT_ONE}, True)

    @staticmethod
    def word(d: int, mu, nu, coeff=1) -> "CuntzPolynomial":
        return CuntzPolynomial.build(d, {CuntzWord(tuple(mu), tuple(nu)): coeff})

    # -- structure ---------------------------------------------------------

    @property
    def n_terms(self) -> int:
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def max_word_length(self) -> int:
        return max((w.max_length() for w in self.terms), default=0)

    def sorted_terms(self) -> list[tuple[CuntzWord, object]]:
        return sorted(self.terms.items(), key=lambda kv: kv[0].sort_key())

    def coefficient(self, mu, nu):
        return self.terms.get(CuntzWord(tuple(mu), tuple(nu)), 0)

    def __eq__(self, other) -> bool:
        """Exact equality of coefficient maps (same mode, same terms)."""
        if not isinstance(other, CuntzPolynomial):
            return NotImplemented
        if self.d != other.d or set(self.terms) != set(other.terms):
            return False
        for w, c in self.terms.items():
            if self.exact == other.exact:
                if c != other.terms[w]:
                    return False
            elif complex(c) != complex(other.terms[w]):
                return False
        return True

    # -- arithmetic ---------------------------------------------------------

    def _coerced_terms(self, exact: bool) -> dict:
        if exact or not self.exact:
            return dict(self.terms)
        return {w: complex(c) for w, c in self.terms.items()}

    def __add__(self, other: "CuntzPolynomial") -> "CuntzPolynomial":
        if self.d != other.d:
            raise ValueError("polynomials have different dimensions")
        exact = self.exact and other.exact
        out = self._coerced_terms(exact)
        for w, c in other._coerced_terms(exact).items():
            merged = out[w] + c if w in out else c
            if merged:
                out[w] = merged
            elif w in out:
                del out[w]
        return CuntzPolynomial(self.d, _contract_full_sums(self.d, out), exact)

    def __neg__(self) -> "CuntzPolynomial":
        return CuntzPolynomial(self.d, {w: -c for w, c in self.terms.items()},
                               self.exact)

    def __sub__(self, other: "CuntzPolynomial") -> "CuntzPolynomial":
        return self + (-other)

    def scale(self, scalar) -> "CuntzPolynomial":
        if not self.terms:
            return self
        exact = self.exact and _is_exact_scalar(scalar)
        if exact:
            s = QRat.of(scalar)
            terms = {w: c * s for w, c in self.terms.items()}
        else:
            s = complex(scalar)
            terms = {w: complex(c) * s for w, c in self.terms.items()}
        terms = {w: c for w, c in terms.items() if c}
        return CuntzPolynomial(self.d, terms, exact)

    def __mul__(self, other):
        if isinstance(other, CuntzPolynomial):
            return multiply(self, other)
        return self.scale(other)

    def __rmul__(self, scalar):
        return self.scale(scalar)

    def adjoint(self) -> "CuntzPolynomial":
        terms = {
            w.adjoint(): (c.conjugate() if self.exact else complex(c).conjugate())
            for w, c in self.terms.items()
        }
        return CuntzPolynomial(self.d, _contract_full_sums(self.d, terms),
                               self.exact)

    def __str__(self) -> str:
        return format_polynomial(self)


def multiply(p: CuntzPolynomial, q: CuntzPolynomial) -> CuntzPolynomial:
    """Product in normal form: prefix contraction term by term."""
    if p.d != q.d:
        raise ValueError("polynomials have different dimensions")
    exact = p.exact and q.exact
    pt = p._coerced_terms(exact)
    qt = q._coerced_terms(exact)
    out: dict[CuntzWord, object] = {}
    for w1, c1 in pt.items():
        for w2, c2 in qt.items():
            w = _word_product(w1, w2)
            if w is None:
                continue
            c = c1 * c2
            if w in out:
                merged = out[w] + c
                if merged:
                    out[w] = merged
                else:
                    del out[w]
            elif c:
                out[w] = c
    return CuntzPolynomial(p.d, _contract_full_sums(p.d, out), exact)


def canonical_endomorphism(p: CuntzPolynomial) -> CuntzPolynomial:
    """sigma(C) = sum_i psi_i C psi_i*; unital and multiplicative."""
    out = CuntzPolynomial.zero(p.d)
    for i in range(1, p.d + 1):
        gen = CuntzPolynomial.generator(p.d, i)
        out = out + multiply(multiply(gen, p), gen.adjoint())
    return out


def _matrix_is_exact(g: np.ndarray) -> bool:
    return g.dtype.kind in "iu" or g.dtype == object


def gauge_act(g: np.ndarray, p: CuntzPolynomial) -> CuntzPolynomial:
    """The gauge automorphism psi_i -> sum_j g_ji psi_j, extended to words.

    ``g`` must be unitary.  Exact coefficients survive only for integer or
    object (Fraction) matrices; floating matrices switch the result to
    floating mode.
    """
    g = np.asarray(g)
    if g.shape != (p.d, p.d):
        raise ValueError("gauge matrix must be d x d")
    gc = np.asarray(g, dtype=complex)
    if np.linalg.norm(la.dagger(gc) @ gc - np.eye(p.d)) > 1e-10 * p.d:
        raise ValueError("gauge matrix is not unitary")
    exact = p.exact and _matrix_is_exact(g)

    def entry(j: int, i: int):
        v = g[j - 1, i - 1]
        return QRat.of(v) if exact else complex(v)

    def conj_entry(j: int, i: int):
        e = entry(j, i)
        return e.conjugate() if exact else e.conjugate()

    out: dict[CuntzWord, object] = {}
    letters = range(1, p.d + 1)
    for w, c in (p.terms if exact else p._coerced_terms(False)).items():
        base = QRat.of(c) if exact else complex(c)
        images: list[tuple[tuple[int, ...], tuple[int, ...], object]] = [
            ((), (), base)
        ]
        for letter in w.mu:
            images = [
                (mu + (j,), nu, coeff * entry(j, letter))
                for mu, nu, coeff in images
                for j in letters
                if entry(j, letter)
            ]
        for letter in w.nu:
            images = [
                (mu, nu + (j,), coeff * conj_entry(j, letter))
                for mu, nu, coeff in images
                for j in letters
                if conj_entry(j, letter)
            ]
        for mu, nu, coeff in images:
            word = CuntzWord(mu, nu)
            if word in out:
                merged = out[word] + coeff
                if merged:
                    out[word] = merged
                else:
                    del out[word]
            elif coeff:
                out[word] = coeff
    return CuntzPolynomial(p.d, _contract_full_sums(p.d, out), exact)


def gauge_defect(g: np.ndarray, p: CuntzPolynomial) -> float:
    """max coefficient deviation between p and its gauge image."""
    q = gauge_act(g, p)
    words = set(p.terms) | set(q.terms)
    worst = 0.0
    for w in words:
        a = complex(p.terms[w]) if w in p.terms else 0.0
        b = complex(q.terms[w]) if w in q.terms else 0.0
        worst = max(worst, abs(a - b))
    return worst


# ---------------------------------------------------------------------------
# truncated Fock representation (the oracle)
# ---------------------------------------------------------------------------


def fock_dimension(d: int, level: int) -> int:
    """Number of index strings of length <= level."""
    if d == 1:
        return level + 1
    return (d ** (level + 1) - 1) // (d - 1)


def _string_offsets(d: int, level: int) -> np.ndarray:
    return np.array([fock_dimension(d, l) for l in range(-1, level + 1)]) \
        if False else np.concatenate(
            [[0], np.cumsum([d ** l for l in range(level + 1)])]
    )


def _string_index(d: int, offsets: np.ndarray, s: tuple[int, ...]) -> int:
    idx = 0
    for letter in s:
        idx = idx * d + (letter - 1)
    return int(offsets[len(s)] + idx)


def fock_matrix(p: CuntzPolynomial, level: int) -> sp.csr_matrix:
    """Matrix of ``p`` on index strings of length <= level (sparse CSR).

    Generators act by prepending a letter (annihilating strings already at
    the top length: the truncation edge) and their adjoints by stripping a
    matching first letter.  As matrix products, psi_i* psi_j = delta_ij
    holds on strings below the top level and sum_i psi_i psi_i* equals
    1 - |empty><empty| (the Fock vacuum is the bottom edge).  Oracle
    comparisons therefore restrict to the safe columns, where word-level
    normal forms and matrix products agree exactly; see
    :func:`fock_product_defect`.
    """
    if level < p.max_word_length():
        raise ValueError(
            f"truncation level {level} below the longest word "
            f"({p.max_word_length()})"
        )
    d = p.d
    offsets = _string_offsets(d, level)
    n = int(offsets[-1])
    rows_list, cols_list, vals_list = [], [], []
    for w, c in p.terms.items():
        cval = complex(c)
        mu_idx = 0
        for letter in w.mu:
            mu_idx = mu_idx * d + (letter - 1)
        nu_idx = 0
        for letter in w.nu:
            nu_idx = nu_idx * d + (letter - 1)
        for t in range(level - w.max_length() + 1):
            span = d ** t
            tails = np.arange(span)
            rows_list.append(offsets[len(w.mu) + t] + mu_idx * span + tails)
            cols_list.append(offsets[len(w.nu) + t] + nu_idx * span + tails)
            vals_list.append(np.full(span, cval))
    if not rows_list:
        return sp.csr_matrix((n, n), dtype=complex)
    rows = np.concatenate(rows_list)
    cols = np.concatenate(cols_list)
    vals = np.concatenate(vals_list)
    return sp.csr_matrix((vals, (rows, cols)), shape=(n, n), dtype=complex)


_TAILS_CACHE: dict[int, np.ndarray] = {}


def _tails(span: int) -> np.ndarray:
    """Read-only arange cache shared by the index-map fast path."""
    cached = _TAILS_CACHE.get(span)
    if cached is None:
        cached = np.arange(span, dtype=np.int64)
        cached.setflags(write=False)
        _TAILS_CACHE[span] = cached
    return cached


def _word_index_map(
    d: int, offsets: np.ndarray, level: int, w: CuntzWord
) -> tuple[np.ndarray, np.ndarray]:
    """Columns and rows of the 0/1 Fock matrix of a single word."""
    mu_idx = 0
    for letter in w.mu:
        mu_idx = mu_idx * d + (letter - 1)
    nu_idx = 0
    for letter in w.nu:
        nu_idx = nu_idx * d + (letter - 1)
    cols_list, rows_list = [], []
    for t in range(level - w.max_length() + 1):
        tails = _tails(d ** t)
        cols_list.append(offsets[len(w.nu) + t] + nu_idx * d ** t + tails)
        rows_list.append(offsets[len(w.mu) + t] + mu_idx * d ** t + tails)
    if not cols_list:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    return np.concatenate(cols_list), np.concatenate(rows_list)


def _is_plain_word(p: CuntzPolynomial) -> bool:
    if p.n_terms != 1:
        return False
    c = next(iter(p.terms.values()))
    return complex(c) == 1.0


def _word_product_defect(
    p: CuntzPolynomial, q: CuntzPolynomial, level: int, n_safe: int
) -> float:
    """Fast path: compose the 0/1 partial maps of two single words."""
    d = p.d
    offsets = _string_offsets(d, level)
    n = int(offsets[-1])
    cq, rq = _word_index_map(d, offsets, level, next(iter(q.terms)))
    cp, rp = _word_index_map(d, offsets, level, next(iter(p.terms)))
    through_p = np.full(n, -1, dtype=np.int32)
    through_p[cp] = rp
    composed = np.full(n_safe, -1, dtype=np.int32)
    inside = cq < n_safe
    composed[cq[inside]] = through_p[rq[inside]]
    expected = np.full(n_safe, -1, dtype=np.int32)
    prod = multiply(p, q)
    if not prod.is_zero():
        cr, rr = _word_index_map(d, offsets, level, next(iter(prod.terms)))
        inside = cr < n_safe
        expected[cr[inside]] = rr[inside]
    return 0.0 if np.array_equal(composed, expected) else 1.0


def fock_product_defect(
    p: CuntzPolynomial, q: CuntzPolynomial, level: int
) -> tuple[float, int]:
    """Compare fock(p) fock(q) with fock(p q) on the safe subspace.

    Safe columns are index strings of length <= level - len(p) - len(q)
    (word lengths measured by the longer of the two index strings); on
    them the truncation never interferes and the defect is zero up to
    coefficient rounding.  Returns (max absolute deviation, #safe columns).

    Single words with unit coefficient are composed as 0/1 index maps,
    which is the same truncated action without the sparse-matrix overhead;
    anything else goes through explicit sparse products.
    """
    if p.d != q.d:
        raise ValueError("polynomials have different dimensions")
    safe_len = level - p.max_word_length() - q.max_word_length()
    if safe_len < 0:
        return 0.0, 0
    n_safe = fock_dimension(p.d, safe_len)
    if _is_plain_word(p) and _is_plain_word(q):
        return _word_product_defect(p, q, level, n_safe), n_safe
    prod = multiply(p, q)
    lhs = fock_matrix(p, level) @ fock_matrix(q, level)
    rhs = fock_matrix(prod, level)
    diff = (lhs - rhs).tocoo()
    if diff.nnz == 0:
        return 0.0, n_safe
    mask = diff.col < n_safe
    if not mask.any():
        return 0.0, n_safe
    return float(np.abs(diff.data[mask]).max()), n_safe


# ---------------------------------------------------------------------------
# text form and the tiny expression grammar
# ---------------------------------------------------------------------------


def _format_coeff(c, exact: bool) -> str:
    if exact:
        return str(c)
    z = complex(c)
    if z.imag == 0:
        return f"{z.real:.17g}"
    if z.real == 0:
        return f"{z.imag:.17g}i"
    sign = "+" if z.imag >= 0 else "-"
    return f"({z.real:.17g}{sign}{abs(z.imag):.17g}i)"


def _format_word(w: CuntzWord) -> str:
    parts = [f"s{i}" for i in w.mu]
    parts += [f"s{i}*" for i in reversed(w.nu)]
    return " ".join(parts) if parts else "1"

def _coeff_is_one(c, exact: bool) -> bool:
    return (c == QRAT_ONE) if exact else (complex(c) == 1.0)


def format_polynomial(p: CuntzPolynomial) -> str:
    """Canonical text: terms in length-lex order, adjoints as trailing *."""
    if p.is_zero():
        return "0"
    chunks = []
    for w, c in p.sorted_terms():
        word = _format_word(w)
        if _coeff_is_one(c, p.exact):
            chunks.append(word)
        elif word == "1":
            chunks.append(_format_coeff(c, p.exact))
        else:
            chunks.append(f"{_format_coeff(c, p.exact)} {word}")
    return " + ".join(chunks)


class ExpressionError(ValueError):
    """Malformed generator expression."""


def _tokenize(text: str) -> list[str]:
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "+-()":
            tokens.append(ch)
            i += 1
        elif ch == "s" and i + 1 < len(text) and text[i + 1].isdigit():
            j = i + 1
            while j < len(text) and text[j].isdigit():
                j += 1
            if j < len(text) and text[j] == "*":
                tokens.append(text[i:j + 1])
                i = j + 1
            else:
                tokens.append(text[i:j])
                i = j
        elif ch.isdigit() or ch == ".":
            j = i
            while j < len(text) and (text[j].isdigit() or text[j] in "./"):
                j += 1
            if j < len(text) and text[j] in "ij":
                tokens.append(text[i:j + 1])
                i = j + 1
            else:
                tokens.append(text[i:j])
                i = j
        elif ch in "ij":
            tokens.append("1" + ch)
            i += 1
        else:
            raise ExpressionError(f"unexpected character {ch!r} at position {i}")
    return tokens


def _parse_scalar(tok: str):
    imag = tok[-1] in "ij"
    body = tok[:-1] if imag else tok
    if "/" in body:
        value = Fraction(body)
    elif "." in body:
        value = float(body)
    else:
        value = int(body)
    if not imag:
        return value
    if isinstance(value, float):
        return complex(0.0, value)
    return QRat(Fraction(0), Fraction(value))


class _Parser:
    def __init__(self, tokens: list[str], d: int):
        self.tokens = tokens
        self.pos = 0
        self.d = d

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self) -> str:
        tok = self.peek()
        if tok is None:
            raise ExpressionError("unexpected end of expression")
        self.pos += 1
        return tok

    def parse_expression(self) -> CuntzPolynomial:
        acc = self.parse_term()
        while self.peek() in ("+", "-"):
            op = self.next()
            term = self.parse_term()
            acc = acc + (term if op == "+" else -term)
        return acc

    def parse_term(self) -> CuntzPolynomial:
        sign = 1
        while self.peek() in ("+", "-"):
            if self.next() == "-":
                sign = -sign
        factors = []
        while True:
            tok = self.peek()
            if tok is None or tok in ("+", "-", ")"):
                break
            factors.append(self.parse_factor())
        if not factors:
            raise ExpressionError("empty term")
        acc = factors[0]
        for f in factors[1:]:
            acc = acc * f
        return acc.scale(sign) if sign < 0 else acc

    def parse_factor(self) -> CuntzPolynomial:
        tok = self.next()
        if tok == "(":
            inner = self.parse_expression()
            if self.next() != ")":
                raise ExpressionError("unbalanced parentheses")
            return inner
        if tok.startswith("s"):
            star = tok.endswith("*")
            idx = int(tok[1:-1] if star else tok[1:])
            if not 1 <= idx <= self.d:
                raise ExpressionError(
                    f"generator s{idx} outside dimension {self.d}"
                )
            gen = CuntzPolynomial.generator(self.d, idx)
            return gen.adjoint() if star else gen
        try:
            scalar = _parse_scalar(tok)
        except (ValueError, ZeroDivisionError) as err:
            raise ExpressionError(f"bad scalar {tok!r}: {err}") from err
        return CuntzPolynomial.unit(self.d).scale(scalar)


def parse_expression(text: str, d: int) -> CuntzPolynomial:
    """Parse the CLI grammar: sK and sK* tokens, +, -, scalars, parentheses.

    Juxtaposition multiplies; ``2/3`` is an exact rational, ``0.5`` a
    float, a trailing ``i``/``j`` makes a scalar imaginary.
    """
    parser = _Parser(_tokenize(text), d)
    result = parser.parse_expression()
    if parser.peek() is not None:
        raise ExpressionError(f"trailing input at token {parser.peek()!r}")
    return result
