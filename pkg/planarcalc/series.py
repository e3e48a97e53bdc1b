"""
Truncated non-commutative formal power series.

A ``Series`` is a sparse map from words (tuples of letter indices in
``1..n``) to scalars, cut off at ``max_degree``. Scalars are either exact
``fractions.Fraction`` values ("rational") or Python floats ("float64"); a
series commits to one kind. A ``Field`` is an n-tuple of series over the
same alphabet.

Usage:
    alphabet = Alphabet(2)
    f = make_series([((1, 2), Fraction(1, 2)), ((), 1)], alphabet, max_degree=3)
    g = differential_field(f)
"""

from __future__ import annotations

import itertools
import logging
import math
from collections import defaultdict
from collections.abc import Callable, Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

import numpy as np
import sympy

from planarcalc.exceptions import (
    AlphabetMismatchError,
    ConstantTermError,
    InvalidWordError,
    PreconditionError,
    ScalarKindError,
    SingularLinearPartError,
)

logger = logging.getLogger(__name__)

Word = tuple[int, ...]
Scalar = Fraction | float

RATIONAL = "rational"
FLOAT64 = "float64"
SCALAR_KINDS = (RATIONAL, FLOAT64)

VARIABLES = ("x", "y", "phi")

# Float linear parts with a larger condition number count as singular.
FLOAT_CONDITION_LIMIT = 1e12


# ── scalars ────────────────────────────────────────────────────────────────


def zero_scalar(kind: str) -> Scalar:
    return Fraction(0) if kind == RATIONAL else 0.0


def one_scalar(kind: str) -> Scalar:
    return Fraction(1) if kind == RATIONAL else 1.0


def coerce_scalar(value: object, kind: str) -> Scalar:
    """Convert ``value`` to the scalar kind, refusing silent rational/float mixing."""
    if isinstance(value, bool):
        raise ScalarKindError(f"booleans are not scalars: {value!r}")
    if kind == RATIONAL:
        if isinstance(value, Fraction):
            return value
        if isinstance(value, (int, np.integer)):
            return Fraction(int(value))
        if isinstance(value, sympy.Rational):
            return Fraction(int(value.p), int(value.q))
        raise ScalarKindError(f"cannot use {type(value).__name__} {value!r} as a rational scalar")
    if kind == FLOAT64:
        if isinstance(value, Fraction):
            raise ScalarKindError(f"rational {value} mixed into a float64 series")
        if isinstance(value, (int, float, np.integer, np.floating)):
            return float(value)
        raise ScalarKindError(f"cannot use {type(value).__name__} {value!r} as a float64 scalar")
    raise ScalarKindError(f"unknown scalar kind {kind!r}; expected one of {SCALAR_KINDS}")


def infer_kind(values: Iterable[object]) -> str:
    kinds = set()
    for value in values:
        if isinstance(value, (float, np.floating)):
            kinds.add(FLOAT64)
        elif isinstance(value, (Fraction, sympy.Rational)):
            kinds.add(RATIONAL)
    if len(kinds) > 1:
        raise ScalarKindError("entries mix rational and float64 scalars")
    return kinds.pop() if kinds else RATIONAL


def scalars_close(a: Scalar, b: Scalar, tolerance: float | None) -> bool:
    """Exact equality when ``tolerance`` is None, otherwise a relative/absolute check."""
    if tolerance is None:
        return a == b
    return math.isclose(float(a), float(b), rel_tol=tolerance, abs_tol=tolerance)


# ── alphabet and words ─────────────────────────────────────────────────────


@dataclass(frozen=True)
class Alphabet:
    """The letters x₁..xₙ."""

    size: int

    def __post_init__(self) -> None:
        if not isinstance(self.size, int) or self.size < 1:
            raise PreconditionError(f"alphabet size must be a positive integer, got {self.size!r}")

    @property
    def letters(self) -> range:
        return range(1, self.size + 1)

    def words(self, degree: int) -> Iterator[Word]:
        """All words of exactly ``degree`` letters, in lexicographic order."""
        return itertools.product(self.letters, repeat=degree)

    def words_up_to(self, degree: int) -> Iterator[Word]:
        for d in range(degree + 1):
            yield from self.words(d)

    def check_letter(self, letter: int) -> int:
        if isinstance(letter, bool) or not isinstance(letter, (int, np.integer)):
            raise InvalidWordError(f"letter {letter!r} is not an integer")
        if not 1 <= letter <= self.size:
            raise InvalidWordError(f"letter {letter} outside alphabet 1..{self.size}")
        return int(letter)

    def check_word(self, word: Sequence[int], max_degree: int | None = None) -> Word:
        checked = tuple(self.check_letter(letter) for letter in word)
        if max_degree is not None and len(checked) > max_degree:
            raise InvalidWordError(f"word {list(checked)} exceeds max_degree {max_degree}")
        return checked


def word_sort_key(word: Word) -> tuple[int, Word]:
    return (len(word), word)


def format_word(word: Word, symbol: str = "x") -> str:
    if not word:
        return "1"
    return "".join(f"{symbol}{letter}" for letter in word)


# ── series ─────────────────────────────────────────────────────────────────


@dataclass(frozen=True, eq=False)
class Series:
    """
    A truncated series ``Σ f_w x_w`` with every stored word of degree ≤ max_degree.

    Zero coefficients are never stored. ``variable`` is a display tag ("x",
    "y" or "phi") and does not take part in equality.
    """

    alphabet: Alphabet
    max_degree: int
    coeffs: Mapping[Word, Scalar]
    scalar: str = RATIONAL
    variable: str = "x"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Series):
            return NotImplemented
        return (
            self.alphabet == other.alphabet
            and self.max_degree == other.max_degree
            and self.scalar == other.scalar
            and dict(self.coeffs) == dict(other.coeffs)
        )

    def __hash__(self) -> int:
        return hash((self.alphabet, self.max_degree, self.scalar, frozenset(self.coeffs.items())))

    # operators delegate to the module functions
    def __add__(self, other: Series) -> Series:
        return add(self, other)

    def __sub__(self, other: Series) -> Series:
        return add(self, negate(other))

    def __neg__(self) -> Series:
        return negate(self)

    def __mul__(self, other: object) -> Series:
        if isinstance(other, Series):
            return cauchy_product(self, other)
        return scale(other, self)  # type: ignore[arg-type]

    def __rmul__(self, other: object) -> Series:
        return scale(other, self)  # type: ignore[arg-type]

    def __getitem__(self, word: Sequence[int]) -> Scalar:
        return coefficient(self, word)

    def __iter__(self) -> Iterator[tuple[Word, Scalar]]:
        return iter(self.items())

    def __len__(self) -> int:
        return len(self.coeffs)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def items(self) -> list[tuple[Word, Scalar]]:
        """Stored terms sorted by (degree, lexicographic word)."""
        return sorted(self.coeffs.items(), key=lambda item: word_sort_key(item[0]))

    @property
    def constant_term(self) -> Scalar:
        return self.coeffs.get((), zero_scalar(self.scalar))

    @property
    def degree(self) -> int:
        """Highest stored degree, -1 for the zero series."""
        return max((len(w) for w in self.coeffs), default=-1)

    def homogeneous(self, degree: int) -> dict[Word, Scalar]:
        return {w: c for w, c in self.coeffs.items() if len(w) == degree}

    def retag(self, variable: str) -> Series:
        if variable not in VARIABLES:
            raise PreconditionError(f"unknown variable tag {variable!r}")
        return Series(self.alphabet, self.max_degree, self.coeffs, self.scalar, variable)

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        symbol = "φ" if self.variable == "phi" else self.variable
        parts = []
        for word, value in self.items():
            if not word:
                parts.append(str(value))
            elif value == 1:
                parts.append(format_word(word, symbol))
            else:
                parts.append(f"{value}·{format_word(word, symbol)}")
        return " + ".join(parts) + f" + O({self.max_degree + 1})"


def from_terms(
    alphabet: Alphabet,
    max_degree: int,
    terms: Mapping[Word, Scalar],
    scalar: str,
    variable: str = "x",
) -> Series:
    """Trusted constructor: drops zeros and overflow words, skips validation."""
    trimmed = {w: c for w, c in terms.items() if c != 0 and len(w) <= max_degree}
    return Series(alphabet, max_degree, trimmed, scalar, variable)


def make_series(
    entries: Iterable[tuple[Sequence[int], object]] | Mapping[Sequence[int], object],
    alphabet: Alphabet | int,
    max_degree: int,
    scalar: str | None = None,
    variable: str = "x",
) -> Series:
    """
    Build a canonical series from ``(word, value)`` pairs.

    Duplicate words are summed and zero results dropped. Integers are read in
    whichever scalar kind the series commits to; mixing rationals with floats
    raises ``ScalarKindError``.
    """
    if isinstance(alphabet, int):
        alphabet = Alphabet(alphabet)
    if isinstance(max_degree, bool) or not isinstance(max_degree, int) or max_degree < 0:
        raise PreconditionError(f"max_degree must be a non-negative integer, got {max_degree!r}")
    if variable not in VARIABLES:
        raise PreconditionError(f"unknown variable tag {variable!r}")
    pairs = list(entries.items() if isinstance(entries, Mapping) else entries)
    kind = scalar if scalar is not None else infer_kind(value for _, value in pairs)
    if kind not in SCALAR_KINDS:
        raise ScalarKindError(f"unknown scalar kind {kind!r}; expected one of {SCALAR_KINDS}")

    terms: dict[Word, Scalar] = defaultdict(lambda: zero_scalar(kind))
    for word, value in pairs:
        checked = alphabet.check_word(word, max_degree)
        terms[checked] += coerce_scalar(value, kind)
    return from_terms(alphabet, max_degree, terms, kind, variable)


def zero(
    alphabet: Alphabet, max_degree: int, scalar: str = RATIONAL, variable: str = "x"
) -> Series:
    return Series(alphabet, max_degree, {}, scalar, variable)


def constant(
    value: object,
    alphabet: Alphabet,
    max_degree: int,
    scalar: str = RATIONAL,
    variable: str = "x",
) -> Series:
    return make_series([((), value)], alphabet, max_degree, scalar, variable)


def one(alphabet: Alphabet, max_degree: int, scalar: str = RATIONAL, variable: str = "x") -> Series:
    return constant(1, alphabet, max_degree, scalar, variable)


def letter(
    i: int,
    alphabet: Alphabet,
    max_degree: int,
    scalar: str = RATIONAL,
    variable: str = "x",
) -> Series:
    return make_series([((i,), 1)], alphabet, max_degree, scalar, variable)


def coefficient(f: Series, word: Sequence[int]) -> Scalar:
    checked = f.alphabet.check_word(word)
    return f.coeffs.get(checked, zero_scalar(f.scalar))


def _check_compatible(*series: Series) -> str:
    first = series[0]
    for other in series[1:]:
        if other.alphabet != first.alphabet:
            raise AlphabetMismatchError(
                f"alphabet sizes differ: {first.alphabet.size} vs {other.alphabet.size}"
            )
        if other.scalar != first.scalar:
            raise ScalarKindError(f"cannot combine {first.scalar} and {other.scalar} series")
    return first.scalar


def add(f: Series, g: Series) -> Series:
    kind = _check_compatible(f, g)
    max_degree = min(f.max_degree, g.max_degree)
    terms: dict[Word, Scalar] = dict(f.coeffs)
    for word, value in g.coeffs.items():
        terms[word] = terms.get(word, zero_scalar(kind)) + value
    return from_terms(f.alphabet, max_degree, terms, kind, f.variable)


def sum_series(items: Iterable[Series], like: Series) -> Series:
    """Sum of ``items``; ``like`` supplies alphabet, degree and kind for the empty sum."""
    return reduce(add, items, zero(like.alphabet, like.max_degree, like.scalar, like.variable))


def scale(c: object, f: Series) -> Series:
    factor = coerce_scalar(c, f.scalar)
    if factor == 0:
        return zero(f.alphabet, f.max_degree, f.scalar, f.variable)
    return from_terms(
        f.alphabet, f.max_degree, {w: factor * v for w, v in f.coeffs.items()}, f.scalar, f.variable
    )


def negate(f: Series) -> Series:
    negated = {w: -v for w, v in f.coeffs.items()}
    return Series(f.alphabet, f.max_degree, negated, f.scalar, f.variable)


def truncate(f: Series, max_degree: int) -> Series:
    """Drop every term above ``max_degree`` (which may not exceed the known precision)."""
    if max_degree > f.max_degree:
        raise PreconditionError(
            f"cannot truncate a degree-{f.max_degree} series to higher degree {max_degree}"
        )
    return from_terms(f.alphabet, max_degree, f.coeffs, f.scalar, f.variable)


def _product_terms(
    left: Mapping[Word, Scalar], right: Mapping[Word, Scalar], max_degree: int
) -> dict[Word, Scalar]:
    by_degree: dict[int, list[tuple[Word, Scalar]]] = defaultdict(list)
    for word, value in right.items():
        by_degree[len(word)].append((word, value))
    degrees = sorted(by_degree)
    out: dict[Word, Scalar] = {}
    for u, a in left.items():
        room = max_degree - len(u)
        for d in degrees:
            if d > room:
                break
            for v, b in by_degree[d]:
                w = u + v
                out[w] = out[w] + a * b if w in out else a * b
    return out


def cauchy_product(f: Series, g: Series) -> Series:
    """(fg)_w = Σ over splits w = uv of f_u g_v, truncated to the smaller degree."""
    kind = _check_compatible(f, g)
    max_degree = min(f.max_degree, g.max_degree)
    return from_terms(
        f.alphabet, max_degree, _product_terms(f.coeffs, g.coeffs, max_degree), kind, g.variable
    )


def product_of(factors: Sequence[Series]) -> Series:
    return reduce(cauchy_product, factors)


def prefix_letter(i: int, f: Series) -> Series:
    """xᵢ·f; a left letter factor raises the known precision by one degree."""
    i = f.alphabet.check_letter(i)
    return Series(
        f.alphabet,
        f.max_degree + 1,
        {(i,) + w: v for w, v in f.coeffs.items()},
        f.scalar,
        f.variable,
    )


# ── derivatives ────────────────────────────────────────────────────────────


def left_derivative(f: Series, i: int) -> Series:
    """Planar derivative ∂/∂xᵢ: keep the monomials starting with xᵢ and strip that letter."""
    i = f.alphabet.check_letter(i)
    terms = {w[1:]: v for w, v in f.coeffs.items() if w and w[0] == i}
    return Series(f.alphabet, max(f.max_degree - 1, 0), terms, f.scalar, f.variable)


def iterated_derivative(f: Series, word: Sequence[int]) -> Series:
    """f(x)_{x_{i₁},…,x_{i_k}}: differentiate by i₁ first, then i₂, and so on."""
    return reduce(left_derivative, f.alphabet.check_word(word), f)


def evaluate_at_zero(f: Series) -> Scalar:
    return f.constant_term


# ── membership predicates ──────────────────────────────────────────────────


def in_g1(f: Series) -> bool:
    return f.constant_term == 1


def in_g0(f: Series) -> bool:
    return () not in f.coeffs


def in_gc(f: Series) -> bool:
    return in_g0(f) and all(f.coeffs.get((i,)) == 1 for i in f.alphabet.letters)


def is_finite(f: Series) -> bool:
    """True when the stored window shows the tail has vanished."""
    return f.degree < f.max_degree


# ── fields ─────────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class Field:
    """An n-tuple of series (f₁, …, fₙ) over the same n-letter alphabet."""

    components: tuple[Series, ...]

    def __post_init__(self) -> None:
        components = tuple(self.components)
        object.__setattr__(self, "components", components)
        if not components:
            raise PreconditionError("a field needs at least one component")
        first = components[0]
        _check_compatible(*components)
        if len(components) != first.alphabet.size:
            raise AlphabetMismatchError(
                f"field has {len(components)} components over a "
                f"{first.alphabet.size}-letter alphabet"
            )
        if any(c.max_degree != first.max_degree for c in components):
            raise PreconditionError("field components must share max_degree")

    def __getitem__(self, i: int) -> Series:
        """Component for letter ``i`` (1-based)."""
        return self.components[self.alphabet.check_letter(i) - 1]

    def __iter__(self) -> Iterator[Series]:
        return iter(self.components)

    def __len__(self) -> int:
        return len(self.components)

    @property
    def alphabet(self) -> Alphabet:
        return self.components[0].alphabet

    @property
    def max_degree(self) -> int:
        return self.components[0].max_degree

    @property
    def scalar(self) -> str:
        return self.components[0].scalar

    @property
    def variable(self) -> str:
        return self.components[0].variable

    def map(self, fn: Callable[[Series], Series]) -> Field:
        return Field(tuple(fn(c) for c in self.components))


def identity_field(
    alphabet: Alphabet, max_degree: int, scalar: str = RATIONAL, variable: str = "x"
) -> Field:
    return Field(tuple(letter(i, alphabet, max_degree, scalar, variable) for i in alphabet.letters))


def differential_field(f: Series) -> Field:
    """(∂₁f, …, ∂ₙf)."""
    return Field(tuple(left_derivative(f, i) for i in f.alphabet.letters))


def integral_field(f: Series) -> Field:
    """(x₁f, …, xₙf) at the precision of ``f``."""
    return Field(tuple(truncate(prefix_letter(i, f), f.max_degree) for i in f.alphabet.letters))


def linear_part(g: Field) -> list[list[Scalar]]:
    """Λᵢⱼ = coefficient of xⱼ in gᵢ."""
    kind = g.scalar
    return [[c.coeffs.get((j,), zero_scalar(kind)) for j in g.alphabet.letters] for c in g]


def apply_matrix(matrix: Sequence[Sequence[Scalar]], g: Field) -> Field:
    """Component i becomes Σⱼ matrix[i][j]·gⱼ."""
    return Field(
        tuple(
            sum_series(
                (scale(entry, gj) for entry, gj in zip(row, g) if entry != 0), g.components[0]
            )
            for row in matrix
        )
    )


def invert_matrix(matrix: Sequence[Sequence[Scalar]], kind: str) -> list[list[Scalar]]:
    """
    Inverse of a square scalar matrix.

    Rational matrices are inverted exactly with sympy; float matrices with
    numpy after a condition-number check against FLOAT_CONDITION_LIMIT.
    """
    n = len(matrix)
    if kind == RATIONAL:
        exact = sympy.Matrix(
            n, n, lambda i, j: sympy.Rational(matrix[i][j].numerator, matrix[i][j].denominator)
        )
        if exact.rank() < n:
            raise SingularLinearPartError(f"matrix has rank {exact.rank()} < {n}")
        inverse = exact.inv()
        return [
            [Fraction(int(inverse[i, j].p), int(inverse[i, j].q)) for j in range(n)]
            for i in range(n)
        ]

    array = np.array(matrix, dtype=np.float64)
    condition = np.linalg.cond(array)
    if not np.isfinite(condition) or condition > FLOAT_CONDITION_LIMIT:
        raise SingularLinearPartError(f"matrix condition number {condition:.3g} exceeds limit")
    return [[float(v) for v in row] for row in np.linalg.inv(array)]


# ── composition ────────────────────────────────────────────────────────────


def _compose_terms(
    terms: Mapping[Word, Scalar],
    g: Field,
    budget: int,
    graded: bool,
) -> dict[Word, Scalar]:
    # Horner scheme on the first letter: f = f₀ + Σᵢ xᵢ·(∂ᵢf).
    out: dict[Word, Scalar] = {}
    if () in terms:
        out[()] = terms[()]
    if graded and budget == 0:
        return out
    tails: dict[int, dict[Word, Scalar]] = defaultdict(dict)
    for word, value in terms.items():
        if word and (not graded or len(word) <= budget):
            tails[word[0]][word[1:]] = value
    inner_budget = budget - 1 if graded else budget
    for i in sorted(tails):
        inner = _compose_terms(tails[i], g, inner_budget, graded)
        for word, value in _product_terms(g[i].coeffs, inner, budget).items():
            out[word] = out[word] + value if word in out else value
    return out


def compose(f: Series, g: Field) -> Series:
    """
    f∘g: substitute gᵢ for xᵢ in f.

    The components of ``g`` must be constant-free unless ``f`` is a finite
    functional (see ``is_finite``).
    """
    kind = _check_compatible(f, g.components[0])
    if f.alphabet != g.alphabet:
        raise AlphabetMismatchError("series and field use different alphabets")
    max_degree = min(f.max_degree, g.max_degree)
    graded = all(in_g0(c) for c in g)
    if not graded and not is_finite(f):
        raise ConstantTermError(
            "field components carry constant terms and the series is not a finite functional"
        )
    terms = _compose_terms(f.coeffs, g, max_degree, graded)
    return from_terms(f.alphabet, max_degree, terms, kind, g.variable)


def compose_field(f: Field, g: Field) -> Field:
    """Component-wise composition (f₁∘g, …, fₙ∘g)."""
    return f.map(lambda component: compose(component, g))


def _nonlinear_part(f: Series) -> Series:
    return from_terms(
        f.alphabet,
        f.max_degree,
        {w: v for w, v in f.coeffs.items() if len(w) >= 2},
        f.scalar,
        f.variable,
    )


def invert_field(g: Field, variable: str | None = None) -> Field:
    """
    Compositional inverse Ψ with g∘Ψ = Ψ∘g = identity letters to degree D.

    Solved by the graded fixed-point iteration Ψ ← Λ⁻¹(x − h∘Ψ), where Λ is
    the linear part of g and h its part of degree ≥ 2.
    """
    for i, component in enumerate(g, start=1):
        if not in_g0(component):
            raise ConstantTermError(f"component {i} has a nonzero constant term")
    inverse = invert_matrix(linear_part(g), g.scalar)
    variable = variable or g.variable
    letters = identity_field(g.alphabet, g.max_degree, g.scalar, variable)
    higher = g.map(_nonlinear_part)

    psi = apply_matrix(inverse, letters)
    for step in range(g.max_degree):
        residual = Field(tuple(x - h for x, h in zip(letters, compose_field(higher, psi))))
        updated = apply_matrix(inverse, residual)
        if updated == psi:
            logger.debug("invert_field stabilised after %d passes", step + 1)
            break
        psi = updated
    return psi.map(lambda c: c.retag(variable))


def fields_equal(f: Field, g: Field, tolerance: float | None = None) -> bool:
    return len(f) == len(g) and all(series_close(a, b, tolerance) for a, b in zip(f, g))


def series_close(f: Series, g: Series, tolerance: float | None = None) -> bool:
    """Equality at the common precision; exact when ``tolerance`` is None."""
    if f.alphabet != g.alphabet:
        return False
    degree = min(f.max_degree, g.max_degree)
    zero_value = zero_scalar(f.scalar)
    words = {w for w in f.coeffs if len(w) <= degree} | {w for w in g.coeffs if len(w) <= degree}
    return all(
        scalars_close(f.coeffs.get(w, zero_value), g.coeffs.get(w, zero_value), tolerance)
        for w in words
    )
