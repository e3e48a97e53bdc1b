"""
Admissible trees and the Feynman-rule expansion of cumulant derivatives.

A tree is stored as nested tuples: ``()`` is a leaf and an internal node is
the tuple of its (at least two) ordered children. The root mark 1 sits above
the top node and the leaves carry marks 2..n from left to right, so every
internal vertex has arity ≥ 3 counting its root-side edge.

The characteristic path runs from the root mark to the last leaf, always
through the last child. Evaluating a word-decorated tree multiplies, from the
far end of that path back to the root,

    K(y)_{y_a y_b}      for each path edge (a on the root side),
    L(Φ)_{φ_r φ_d…}     for each path vertex (root-side index first),

with the off-path subtrees contributing the scalars K(0) = k⁽²⁾ and
L(0) = ℓ, and an overall sign (−1)^(internal vertices). Summing over all
admissible trees with n marks reproduces K(y)_{y_{i₁}…y_{iₙ}}.
"""

from __future__ import annotations

import itertools
import logging
from collections import Counter
from collections.abc import Iterator, Mapping, Sequence
from dataclasses import dataclass
from functools import lru_cache

from planarcalc.effective_action import EffectiveAction, check_pair, is_regular
from planarcalc.exceptions import NotRegularError, PreconditionError
from planarcalc.reports import IdentityReport, combine, compare_series
from planarcalc.series import (
    Scalar,
    Series,
    Word,
    add,
    cauchy_product,
    coefficient,
    iterated_derivative,
    negate,
    one_scalar,
    product_of,
    scale,
    sum_series,
    truncate,
    zero,
    zero_scalar,
)

logger = logging.getLogger(__name__)

Structure = tuple  # () or a tuple of at least two Structures
LEAF: Structure = ()

Address = tuple[int, ...]
Endpoint = int | Address
Index = int | str

METHODS = ("contract", "expand")


# ── tree shapes ────────────────────────────────────────────────────────────


def _validate(structure: object) -> None:
    if not isinstance(structure, tuple):
        raise PreconditionError(f"tree nodes are tuples, got {type(structure).__name__}")
    if structure == LEAF:
        return
    if len(structure) < 2:
        raise PreconditionError("internal vertices need at least two children")
    for child in structure:
        _validate(child)


def _leaf_count(structure: Structure) -> int:
    return 1 if structure == LEAF else sum(_leaf_count(c) for c in structure)


def _internal_nodes(
    structure: Structure, address: Address = ()
) -> Iterator[tuple[Address, Structure]]:
    if structure == LEAF:
        return
    yield address, structure
    for k, child in enumerate(structure):
        yield from _internal_nodes(child, address + (k,))


@dataclass(frozen=True, order=True)
class AdmissibleTree:
    """A planar tree with root mark 1 and leaf marks 2..n."""

    structure: Structure

    def __post_init__(self) -> None:
        _validate(self.structure)

    @property
    def leaf_count(self) -> int:
        return _leaf_count(self.structure)

    @property
    def marks(self) -> int:
        return self.leaf_count + 1

    @property
    def internal_count(self) -> int:
        return sum(1 for _ in _internal_nodes(self.structure))

    def vertex_arities(self) -> list[int]:
        """Arity of each internal vertex in preorder, counting the root-side edge."""
        return [len(node) + 1 for _, node in _internal_nodes(self.structure)]

    def to_nested(self) -> list:
        def convert(node: Structure) -> list:
            return [convert(child) for child in node]

        return convert(self.structure)

    @classmethod
    def from_nested(cls, nested: Sequence) -> AdmissibleTree:
        def convert(node: Sequence) -> Structure:
            if not isinstance(node, (list, tuple)):
                raise PreconditionError(f"tree nodes are arrays, got {node!r}")
            return tuple(convert(child) for child in node)

        return cls(convert(nested))


@dataclass(frozen=True)
class DecoratedTree:
    """An admissible tree whose marks 1..n carry the letters of ``word``."""

    tree: AdmissibleTree
    word: Word

    def __post_init__(self) -> None:
        object.__setattr__(self, "word", tuple(self.word))
        if len(self.word) != self.tree.marks:
            raise PreconditionError(
                f"word of length {len(self.word)} cannot decorate a tree "
                f"with {self.tree.marks} marks"
            )
        if any(letter_ < 1 for letter_ in self.word):
            raise PreconditionError(f"letters are numbered from 1, got {list(self.word)}")


@dataclass(frozen=True)
class CharacteristicPath:
    """Root mark 1, the internal vertices through last children, then the last leaf."""

    marks: int
    vertices: tuple[Address, ...]

    @property
    def endpoints(self) -> tuple[Endpoint, ...]:
        return (1, *self.vertices, self.marks)

    @property
    def edges(self) -> tuple[tuple[Endpoint, Endpoint], ...]:
        points = self.endpoints
        return tuple(zip(points, points[1:]))


def characteristic_path(tree: AdmissibleTree) -> CharacteristicPath:
    vertices = []
    node, address = tree.structure, ()
    while node != LEAF:
        vertices.append(address)
        address = address + (len(node) - 1,)
        node = node[-1]
    return CharacteristicPath(tree.marks, tuple(vertices))


# ── enumeration ────────────────────────────────────────────────────────────


def _grow(structure: Structure) -> list[Structure]:
    # New last leaf: subdivide the path edge above this node, or, at a path
    # vertex, append the leaf as last child or descend along the path.
    grown = [(structure, LEAF)]
    if structure != LEAF:
        grown.append(structure + (LEAF,))
        grown.extend(structure[:-1] + (child,) for child in _grow(structure[-1]))
    return grown


def extend_tree(tree: AdmissibleTree) -> list[AdmissibleTree]:
    """All trees with one more mark obtained by adding a new last leaf along the path."""
    return [AdmissibleTree(s) for s in _grow(tree.structure)]


@lru_cache(maxsize=None)
def _admissible(marks: int) -> tuple[AdmissibleTree, ...]:
    if marks == 2:
        return (AdmissibleTree(LEAF),)
    grown = {child for tree in _admissible(marks - 1) for child in extend_tree(tree)}
    return tuple(sorted(grown))


def enumerate_admissible(marks: int) -> list[AdmissibleTree]:
    """Every admissible tree with marks 1..n, in canonical order."""
    if marks < 2:
        raise PreconditionError(f"admissible trees need at least 2 marks, got {marks}")
    return list(_admissible(marks))


def _compositions(total: int, min_parts: int) -> Iterator[tuple[int, ...]]:
    for cut_count in range(min_parts - 1, total):
        for cuts in itertools.combinations(range(1, total), cut_count):
            bounds = (0, *cuts, total)
            yield tuple(b - a for a, b in zip(bounds, bounds[1:]))


@lru_cache(maxsize=None)
def _ordered_trees(leaves: int) -> tuple[Structure, ...]:
    if leaves == 1:
        return (LEAF,)
    found = []
    for parts in _compositions(leaves, 2):
        found.extend(itertools.product(*(_ordered_trees(p) for p in parts)))
    return tuple(sorted(found))


def brute_force_schroeder(leaves: int) -> list[AdmissibleTree]:
    """Ordered trees with ``leaves`` leaves and no unary vertex, built by compositions."""
    if leaves < 1:
        raise PreconditionError("a tree has at least one leaf")
    return [AdmissibleTree(s) for s in _ordered_trees(leaves)]


# ── symbolic terms ─────────────────────────────────────────────────────────


@dataclass(frozen=True)
class Factor:
    """K / L are y-series on the path; K0 / L0 their scalar values at zero."""

    kind: str
    indices: tuple[Index, ...]

    def render(self) -> str:
        return f"{self.kind}[{','.join(str(i) for i in self.indices)}]"


@dataclass(frozen=True)
class FeynmanTerm:
    sign: int
    factors: tuple[Factor, ...]
    dummies: tuple[str, ...]

    def render(self) -> str:
        body = " ".join(f.render() for f in self.factors)
        return f"-{body}" if self.sign < 0 else body


@dataclass
class _Vertex:
    root_end: str
    child_ends: list[str]
    children: list[_Vertex | int]


def _annotate(structure: Structure, marks: Iterator[int]) -> _Vertex | int:
    # Leaves become their mark numbers; dummy names are filled in afterwards.
    if structure == LEAF:
        return next(marks)
    children = [_annotate(child, marks) for child in structure]
    return _Vertex("", [""] * len(children), children)


def _name_dummies(vertex: _Vertex, names: Iterator[str]) -> None:
    vertex.root_end = next(names)
    vertex.child_ends = [next(names) for _ in vertex.children]
    for child in vertex.children:
        if isinstance(child, _Vertex):
            _name_dummies(child, names)


def _slot_count(tree: AdmissibleTree) -> int:
    return sum(tree.vertex_arities())


def _off_path_factors(end: str, child: _Vertex | int) -> list[Factor]:
    if isinstance(child, int):
        return [Factor("K0", (end, child))]
    factors = [Factor("K0", (end, child.root_end))]
    for sub_end, sub in zip(child.child_ends, child.children):
        factors.extend(_off_path_factors(sub_end, sub))
    factors.append(Factor("L0", (child.root_end, *child.child_ends)))
    return factors


def feynman_term(tree: AdmissibleTree, names: Sequence[str] | None = None) -> FeynmanTerm:
    """
    The symbolic term of a tree.

    Dummy variables are numbered e1, e2, … in preorder: at each vertex the
    root-side end first, then the child ends left to right. ``names`` replaces
    that numbering slot by slot.
    """
    slots = _slot_count(tree)
    if names is None:
        names = [f"e{k}" for k in range(1, slots + 1)]
    if len(names) != slots or len(set(names)) != slots:
        raise PreconditionError(f"need {slots} distinct dummy names, got {list(names)}")

    top = _annotate(tree.structure, itertools.count(2))
    if isinstance(top, int):
        return FeynmanTerm(1, (Factor("K", (1, top)),), ())
    _name_dummies(top, iter(names))

    path: list[_Vertex] = []
    node: _Vertex | int = top
    while isinstance(node, _Vertex):
        path.append(node)
        node = node.children[-1]

    factors = [Factor("K", (path[-1].child_ends[-1], node))]
    for depth in range(len(path) - 1, -1, -1):
        vertex = path[depth]
        for end, child in zip(vertex.child_ends[:-1], vertex.children[:-1]):
            factors.extend(_off_path_factors(end, child))
        factors.append(Factor("L", (vertex.root_end, *vertex.child_ends)))
        parent_end: Index = path[depth - 1].child_ends[-1] if depth else 1
        factors.append(Factor("K", (parent_end, vertex.root_end)))
    sign = -1 if tree.internal_count % 2 else 1
    return FeynmanTerm(sign, tuple(factors), tuple(names))


def render_term(tree: AdmissibleTree, word: Sequence[int] | None = None) -> str:
    """Feynman term as text, with marks replaced by the letters of ``word`` if given."""
    term = feynman_term(tree)
    if word is None:
        return term.render()
    letters = DecoratedTree(tree, tuple(word)).word
    relabelled = tuple(
        Factor(f.kind, tuple(letters[i - 1] if isinstance(i, int) else i for i in f.indices))
        for f in term.factors
    )
    return FeynmanTerm(term.sign, relabelled, term.dummies).render()


# ── evaluation ─────────────────────────────────────────────────────────────


class FeynmanRules:
    """The edge and vertex values of one (K, L) pair, memoised."""

    def __init__(self, cumulants: Series, action: EffectiveAction) -> None:
        if not is_regular(cumulants):
            raise NotRegularError("Feynman rules need a regular cumulant series")
        check_pair(cumulants, action)
        self.cumulants = cumulants.retag("y")
        self.action = action
        self.letters = list(cumulants.alphabet.letters)
        self._edges: dict[tuple[int, int], Series] = {}

    def edge(self, a: int, b: int) -> Series:
        """K(y)_{y_a y_b}."""
        if (a, b) not in self._edges:
            self._edges[a, b] = iterated_derivative(self.cumulants, (a, b))
        return self._edges[a, b]

    def edge0(self, a: int, b: int) -> Scalar:
        return coefficient(self.cumulants, (a, b))

    def vertex(self, word: Word) -> Series:
        """L(Φ)_{φ_w} in the y letters."""
        return self.action.vertex(tuple(word))

    def vertex0(self, word: Word) -> Scalar:
        return self.action.coefficient(tuple(word))

    def zero(self) -> Series:
        k = self.cumulants
        return zero(k.alphabet, k.max_degree, k.scalar, "y")


def _weights(child: _Vertex | int, word: Word, rules: FeynmanRules) -> dict[int, Scalar]:
    # W[d] = Σ_b k(d, b) X[b]: the scalar value of an off-path subtree seen
    # from the dummy letter d on its parent's side.
    kind = rules.cumulants.scalar
    if isinstance(child, int):
        return {d: rules.edge0(d, word[child - 1]) for d in rules.letters}
    inner = [_weights(sub, word, rules) for sub in child.children]
    below: dict[int, Scalar] = {}
    for b in rules.letters:
        total = zero_scalar(kind)
        for ds in itertools.product(rules.letters, repeat=len(inner)):
            weight = rules.vertex0((b, *ds))
            if weight == 0:
                continue
            for w, d in zip(inner, ds):
                weight *= w[d]
            total += weight
        below[b] = total
    return {
        d: sum((rules.edge0(d, b) * below[b] for b in rules.letters), zero_scalar(kind))
        for d in rules.letters
    }


def _contract(tree: DecoratedTree, rules: FeynmanRules) -> Series:
    word = tree.word
    top = _annotate(tree.tree.structure, itertools.count(2))
    if isinstance(top, int):
        return rules.edge(word[0], word[1])

    path: list[_Vertex] = []
    node: _Vertex | int = top
    while isinstance(node, _Vertex):
        path.append(node)
        node = node.children[-1]
    assert isinstance(node, int)

    letters = rules.letters
    row = {c: rules.edge(c, word[node - 1]) for c in letters}
    result = rules.zero()
    for depth in range(len(path) - 1, -1, -1):
        vertex = path[depth]
        weights = [_weights(child, word, rules) for child in vertex.children[:-1]]
        below: dict[int, Series] = {}
        for r in letters:
            terms = []
            for c in letters:
                if not row[c]:
                    continue
                combined = rules.zero()
                for ds in itertools.product(letters, repeat=len(weights)):
                    factor = one_scalar(rules.cumulants.scalar)
                    for w, d in zip(weights, ds):
                        factor *= w[d]
                    if factor != 0:
                        combined = add(combined, scale(factor, rules.vertex((r, *ds, c))))
                if combined:
                    terms.append(cauchy_product(row[c], combined))
            below[r] = sum_series(terms, rules.zero())
        if depth:
            row = {
                c: sum_series(
                    (cauchy_product(below[r], rules.edge(c, r)) for r in letters if below[r]),
                    rules.zero(),
                )
                for c in letters
            }
        else:
            result = sum_series(
                (cauchy_product(below[r], rules.edge(word[0], r)) for r in letters if below[r]),
                rules.zero(),
            )
    return negate(result) if tree.tree.internal_count % 2 else result


def _resolve(indices: tuple[Index, ...], word: Word, env: Mapping[str, int]) -> Word:
    return tuple(word[i - 1] if isinstance(i, int) else env[i] for i in indices)


def evaluate_term(term: FeynmanTerm, word: Word, rules: FeynmanRules) -> Series:
    """Literal sum over every assignment of letters to the dummy variables."""
    path_factors = [f for f in term.factors if f.kind in ("K", "L")]
    scalar_factors = [f for f in term.factors if f.kind in ("K0", "L0")]
    kind = rules.cumulants.scalar
    products: dict[tuple[Word, ...], Series] = {}
    total = rules.zero()
    for assignment in itertools.product(rules.letters, repeat=len(term.dummies)):
        env = dict(zip(term.dummies, assignment))
        weight = one_scalar(kind)
        for f in scalar_factors:
            indices = _resolve(f.indices, word, env)
            weight *= rules.edge0(*indices) if f.kind == "K0" else rules.vertex0(indices)
            if weight == 0:
                break
        if weight == 0:
            continue
        key = tuple(_resolve(f.indices, word, env) for f in path_factors)
        if key not in products:
            series = [
                rules.edge(*indices) if f.kind == "K" else rules.vertex(indices)
                for f, indices in zip(path_factors, key)
            ]
            products[key] = product_of(series)
        total = add(total, scale(weight, products[key]))
    return negate(total) if term.sign < 0 else total


def feynman_evaluate(
    tree: DecoratedTree,
    cumulants: Series | None = None,
    action: EffectiveAction | None = None,
    *,
    rules: FeynmanRules | None = None,
    method: str = "contract",
    names: Sequence[str] | None = None,
) -> Series:
    """
    F(T) for a word-decorated tree, as a y-series.

    ``contract`` sums the dummies one path vertex at a time; ``expand`` runs
    the literal loop over all dummy assignments of the symbolic term (whose
    dummy names may be permuted through ``names``).
    """
    if rules is None:
        if cumulants is None or action is None:
            raise PreconditionError("pass either rules or a cumulant series with its action")
        rules = FeynmanRules(cumulants, action)
    for letter_ in tree.word:
        rules.cumulants.alphabet.check_letter(letter_)
    if len(tree.word) > rules.cumulants.max_degree:
        raise PreconditionError(
            f"a word of length {len(tree.word)} is beyond max_degree "
            f"{rules.cumulants.max_degree} of the cumulant series"
        )
    if method == "contract":
        value = _contract(tree, rules)
    elif method == "expand":
        value = evaluate_term(feynman_term(tree.tree, names), tree.word, rules)
    else:
        raise PreconditionError(f"unknown method {method!r}; expected one of {METHODS}")
    # every factor is known at least to max_degree - n
    return truncate(value, rules.cumulants.max_degree - len(tree.word))


def tree_expansion(
    cumulants: Series,
    action: EffectiveAction,
    word: Sequence[int],
    *,
    method: str = "contract",
    rules: FeynmanRules | None = None,
) -> Series:
    """Σ over admissible trees decorated by ``word`` of F(T)."""
    word = cumulants.alphabet.check_word(word)
    if len(word) < 2:
        raise PreconditionError("the tree expansion starts at words of length 2")
    rules = rules or FeynmanRules(cumulants, action)
    values = [
        feynman_evaluate(DecoratedTree(tree, word), rules=rules, method=method)
        for tree in enumerate_admissible(len(word))
    ]
    return sum_series(values, values[0])


def verify_theorem(
    cumulants: Series,
    action: EffectiveAction,
    n_max: int,
    degree: int,
    *,
    method: str = "contract",
    tolerance: float | None = None,
) -> IdentityReport:
    """tree_expansion(w) = K(y)_{y_w} for all words of length 2..n_max, to ``degree``."""
    if n_max < 2:
        raise PreconditionError("n_max must be at least 2")
    if cumulants.max_degree - n_max < degree:
        raise PreconditionError(
            f"checking words of length {n_max} to degree {degree} needs "
            f"max_degree >= {n_max + degree}, got {cumulants.max_degree}"
        )
    rules = FeynmanRules(cumulants, action)
    reports = []
    for n in range(2, n_max + 1):
        for word in cumulants.alphabet.words(n):
            reports.append(
                compare_series(
                    "feynman_theorem",
                    tree_expansion(cumulants, action, word, method=method, rules=rules),
                    iterated_derivative(rules.cumulants, word),
                    tolerance=tolerance,
                    degree=degree,
                    context=f"w={list(word)}",
                )
            )
        logger.debug("feynman theorem checked for words of length %d", n)
    report = combine("feynman_theorem", reports)
    report.max_checked_degree = degree
    return report


def univariate_tree_table(max_order: int) -> dict[int, list[tuple[int, tuple[int, ...]]]]:
    """
    Signed tree counts grouped by vertex arities, for orders 3..max_order.

    An entry (c, (a₁, …, a_p)) stands for c · ℓ(a₁) k⁽²⁾ ℓ(a₂) … k⁽²⁾ ℓ(a_p) in
    the one-letter expansion of k⁽ⁿ⁾ (k⁽²⁾)⁻ⁿ.
    """
    table = {}
    for order in range(3, max_order + 1):
        counts: Counter[tuple[int, ...]] = Counter()
        for tree in enumerate_admissible(order):
            arities = tuple(sorted(tree.vertex_arities(), reverse=True))
            counts[arities] += -1 if len(arities) % 2 else 1
        table[order] = sorted(
            ((c, a) for a, c in counts.items() if c),
            key=lambda entry: (len(entry[1]), [-a for a in entry[1]]),
        )
    return table
