"""Simplicially enriched groupoids with a discrete object set.

A simplicial groupoid is exposed level by level: arrows between two objects
at a level, composition, identities, inverses, and the face and degeneracy
functors between consecutive levels. Three families are provided: constant
ones built from an explicit or free groupoid, the loop groupoid of a
simplicial set, and hom-wise Postnikov sections. Free levels are enumerated
by reduced word length and say so through a truncation flag.
"""

from __future__ import annotations

import logging
from collections import deque
from collections.abc import Callable
from collections.abc import Iterable
from collections.abc import Mapping
from collections.abc import Sequence
from dataclasses import dataclass
from dataclasses import field
from typing import Any

import networkx as nx

from .config import Budget
from .config import resolve
from .const import COMPARE_ISOMORPHIC
from .const import COMPARE_NOT_ISOMORPHIC
from .const import VERDICT_CERTIFIED
from .const import VERDICT_REFUTED
from .const import VERDICT_UNKNOWN
from .exceptions import EnumerationImpossible
from .exceptions import MalformedSpec
from .exceptions import NotFibrant
from .exceptions import SearchBudgetExceeded
from .exceptions import UnknownObject
from .formats import GROUPOID_SCHEMA
from .formats import parse_arrow
from .formats import validate_schema
from .kan import is_kan
from .pi import CompareVerdict
from .pi import EquivalenceVerdict
from .pi import GroupoidPresentation
from .pi import GroupPresentation
from .pi import HomotopyClasses
from .pi import Word
from .pi import compare_groups
from .pi import component_index
from .pi import invert
from .pi import pi1
from .pi import pi_n_classes
from .pi import reduce_word
from .pi import vertex_group
from .pi import weak_equivalence_check
from .scomplex import SimplexRef
from .scomplex import SMap
from .scomplex import SSet
from .scomplex import coproduct
from .scomplex import degenerate_vertex
from .scomplex import fiber
from .scomplex import from_simplicial_object
from .scomplex import identity_map
from .scomplex import is_isomorphism
from .scomplex import iter_homs
from .scomplex import pair_map
from .scomplex import product
from .scomplex import skeleton
from .truncate import AdjunctionCount
from .truncate import cosk
from .truncate import postnikov

_LOGGER = logging.getLogger(__name__)

_OUTSIDE = object()


@dataclass(frozen=True, order=True)
class Mor:
    """An arrow source -> target of one level; the body is a name, a word or a simplex."""

    source: str
    target: str
    body: Any

    @property
    def label(self) -> str:
        """Return the display name used for cells built from this arrow."""
        if isinstance(self.body, tuple):
            if not self.body:
                return f"1_{self.source}"
            return "*".join(n if s > 0 else f"{n}^-1" for n, s in self.body)
        return str(self.body)


class Groupoid:
    """A single groupoid level."""

    def __init__(self, name: str, objects: Iterable[str]) -> None:
        """Initialize the groupoid."""
        self.name = name
        self.objects = tuple(sorted(objects))

    def arrows(self, x: str, y: str) -> tuple[list[Mor], bool]:
        """Return the arrows x -> y and whether the list was cut off."""
        raise NotImplementedError

    def identity(self, x: str) -> Mor:
        """Return the identity of x."""
        raise NotImplementedError

    def compose(self, g: Mor, f: Mor) -> Mor:
        """Return g after f."""
        raise NotImplementedError

    def inverse(self, f: Mor) -> Mor:
        """Return the inverse of f."""
        raise NotImplementedError

    def presentation(self) -> GroupoidPresentation | None:
        """Return generators and relators when the groupoid is presented."""
        return None

    def _check_object(self, x: str) -> None:
        if x not in self.objects:
            raise UnknownObject(f"{x!r} is not an object of {self.name}")


class FiniteGroupoid(Groupoid):
    """A groupoid with finitely many named arrows and a full composition table."""

    def __init__(
        self,
        name: str,
        objects: Iterable[str],
        ends: Mapping[str, tuple[str, str]],
        identities: Mapping[str, str],
        table: Mapping[tuple[str, str], str],
    ) -> None:
        """Initialize and validate the groupoid.

        Args:
            name: Display name.
            objects: Object names.
            ends: Source and target of every arrow.
            identities: Identity arrow of every object.
            table: table[(g, h)] is g after h for every composable pair.

        Raises:
            MalformedSpec: If a groupoid law fails.
        """
        super().__init__(name, objects)
        self.ends = dict(ends)
        self.identities = dict(identities)
        self.table = dict(table)
        self._inverses: dict[str, str] = {}
        self.validate()

    def validate(self) -> None:
        """Check closure, identities, associativity and inverses."""
        names = sorted(self.ends)
        for x in self.objects:
            ident = self.identities.get(x)
            if ident is None or self.ends.get(ident) != (x, x):
                raise MalformedSpec(f"{self.name}: object {x!r} has no identity")
        for g in names:
            for h in names:
                if self.ends[h][1] != self.ends[g][0]:
                    continue
                k = self.table.get((g, h))
                if k is None or self.ends.get(k) != (self.ends[h][0], self.ends[g][1]):
                    raise MalformedSpec(f"{self.name}: {g} after {h} is missing or ill-typed")
        for f in names:
            x, y = self.ends[f]
            if self.table[(self.identities[y], f)] != f or self.table[(f, self.identities[x])] != f:
                raise MalformedSpec(f"{self.name}: identity law fails at {f!r}")
            inverse = next(
                (
                    g
                    for g in names
                    if self.ends[g] == (y, x) and self.table[(g, f)] == self.identities[x]
                ),
                None,
            )
            if inverse is None:
                raise MalformedSpec(f"{self.name}: {f!r} has no inverse")
            self._inverses[f] = inverse
        for f in names:
            for g in names:
                if self.ends[f][1] != self.ends[g][0]:
                    continue
                for h in names:
                    if self.ends[g][1] != self.ends[h][0]:
                        continue
                    left = self.table[(h, self.table[(g, f)])]
                    if left != self.table[(self.table[(h, g)], f)]:
                        raise MalformedSpec(f"{self.name}: composition is not associative")

    @classmethod
    def from_group(
        cls, name: str, elements: Sequence[str], table: Sequence[Sequence[str]]
    ) -> FiniteGroupoid:
        """Build a one-object groupoid from a multiplication table.

        Raises:
            MalformedSpec: If the table is not a group table.
        """
        if len(table) != len(elements) or any(len(row) != len(elements) for row in table):
            raise MalformedSpec(f"{name}: the group table must be square")
        products = {
            (g, h): table[i][j] for i, g in enumerate(elements) for j, h in enumerate(elements)
        }
        unit = next(
            (e for e in elements if all(products[(e, g)] == g for g in elements)), None
        )
        if unit is None:
            raise MalformedSpec(f"{name}: the group table has no identity")
        return cls(name, ["*"], {g: ("*", "*") for g in elements}, {"*": unit}, products)

    @classmethod
    def cyclic(cls, k: int) -> FiniteGroupoid:
        """Return the cyclic group of order k with elements e, g, g2, ..."""
        names = ["e"] + ["g" if m == 1 else f"g{m}" for m in range(1, k)]
        table = [[names[(i + j) % k] for j in range(k)] for i in range(k)]
        return cls.from_group(f"Z{k}", names, table)

    @classmethod
    def trivial(cls) -> FiniteGroupoid:
        """Return the trivial group."""
        return cls.from_group("1", ["e"], [["e"]])

    @classmethod
    def indiscrete(cls, objects: Sequence[str], name: str | None = None) -> FiniteGroupoid:
        """Return the groupoid with exactly one arrow between any two objects."""

        def arrow(x: str, y: str) -> str:
            return f"1_{x}" if x == y else f"{x}>{y}"

        ends = {arrow(x, y): (x, y) for x in objects for y in objects}
        table = {
            (arrow(y, z), arrow(x, y)): arrow(x, z)
            for x in objects
            for y in objects
            for z in objects
        }
        identities = {x: arrow(x, x) for x in objects}
        return cls(name or f"I{len(objects)}", objects, ends, identities, table)

    @classmethod
    def discrete(cls, objects: Sequence[str], name: str | None = None) -> FiniteGroupoid:
        """Return the groupoid with identities only."""
        ends = {f"1_{x}": (x, x) for x in objects}
        table = {(f"1_{x}", f"1_{x}"): f"1_{x}" for x in objects}
        return cls(name or f"D{len(objects)}", objects, ends, {x: f"1_{x}" for x in objects}, table)

    @classmethod
    def from_presentation(
        cls, name: str, presentation: GroupPresentation, budget: Budget | None = None
    ) -> FiniteGroupoid:
        """Build a finite group from a presentation by coset enumeration.

        Elements are named by their shortlex-first word in the generators.

        Raises:
            EnumerationImpossible: If the enumeration does not close within the coset limit.
        """
        if not presentation.generators:
            return cls.from_group(name, ["1"], [["1"]])
        group = presentation.to_fp_group()
        try:
            cosets = group.coset_enumeration([], max_cosets=resolve(budget).coset_limit)
        except ValueError as err:
            raise EnumerationImpossible(f"{name}: coset enumeration failed: {err}") from err
        if not cosets.is_complete():
            raise EnumerationImpossible(f"{name}: coset enumeration did not close")
        cosets.standardize()
        rows = cosets.table
        letters = []
        for gen, fp_gen in zip(presentation.generators, group.generators):
            letters.append(((gen, 1), cosets.A_dict[fp_gen]))
            letters.append(((gen, -1), cosets.A_dict[fp_gen**-1]))
        words: dict[int, Word] = {0: ()}
        queue = deque([0])
        while queue:
            alpha = queue.popleft()
            for letter, column in letters:
                beta = rows[alpha][column]
                if beta not in words:
                    words[beta] = words[alpha] + (letter,)
                    queue.append(beta)
        column_of = dict(letters)

        def trace(alpha: int, word: Word) -> int:
            for letter in word:
                alpha = rows[alpha][column_of[letter]]
            return alpha

        order = sorted(words)
        labels = {a: Mor("*", "*", words[a]).label if words[a] else "1" for a in order}
        elements = [labels[a] for a in order]
        table = [[labels[trace(a, words[b])] for b in order] for a in order]
        _LOGGER.debug("%s: coset enumeration found %d elements", name, len(elements))
        return cls.from_group(name, elements, table)

    def arrows(self, x: str, y: str) -> tuple[list[Mor], bool]:
        """Return the arrows x -> y; never cut off."""
        self._check_object(x)
        self._check_object(y)
        return sorted(Mor(x, y, f) for f, ends in self.ends.items() if ends == (x, y)), False

    def identity(self, x: str) -> Mor:
        """Return the identity of x."""
        self._check_object(x)
        return Mor(x, x, self.identities[x])

    def compose(self, g: Mor, f: Mor) -> Mor:
        """Return g after f."""
        return Mor(f.source, g.target, self.table[(g.body, f.body)])

    def inverse(self, f: Mor) -> Mor:
        """Return the inverse of f."""
        return Mor(f.target, f.source, self._inverses[f.body])


class FreeGroupoid(Groupoid):
    """The free groupoid on a graph, with arrows as reduced words in path order."""

    def __init__(
        self,
        name: str,
        objects: Iterable[str],
        generators: Mapping[str, tuple[str, str]],
        word_length: int,
    ) -> None:
        """Initialize the groupoid; enumeration stops at word_length letters."""
        super().__init__(name, objects)
        self.generators = dict(generators)
        self.word_length = word_length
        self._letters: list[tuple[tuple[str, int], tuple[str, str]]] = []
        for gen in sorted(self.generators):
            source, target = self.generators[gen]
            self._letters.append(((gen, 1), (source, target)))
            self._letters.append(((gen, -1), (target, source)))
        self._walks: dict[str, list[list[tuple[Word, str]]]] = {}

    def _layers(self, x: str) -> list[list[tuple[Word, str]]]:
        """Return the reduced words leaving x, grouped by length, one past the bound."""
        if x not in self._walks:
            layers: list[list[tuple[Word, str]]] = [[((), x)]]
            for _ in range(self.word_length + 1):
                layer = []
                for word, end in layers[-1]:
                    for letter, (source, target) in self._letters:
                        if source != end or (word and word[-1] == (letter[0], -letter[1])):
                            continue
                        layer.append((word + (letter,), target))
                layers.append(layer)
            self._walks[x] = layers
        return self._walks[x]

    def arrows(self, x: str, y: str) -> tuple[list[Mor], bool]:
        """Return the reduced words x -> y up to the bound and whether longer ones leave x."""
        self._check_object(x)
        self._check_object(y)
        layers = self._layers(x)
        found = [
            Mor(x, y, word)
            for layer in layers[: self.word_length + 1]
            for word, end in layer
            if end == y
        ]
        return sorted(found), bool(layers[-1])

    def identity(self, x: str) -> Mor:
        """Return the empty word at x."""
        self._check_object(x)
        return Mor(x, x, ())

    def compose(self, g: Mor, f: Mor) -> Mor:
        """Return g after f, i.e. the path f then g."""
        return Mor(f.source, g.target, reduce_word(f.body + g.body))

    def inverse(self, f: Mor) -> Mor:
        """Return the inverse word."""
        return Mor(f.target, f.source, invert(f.body))

    def presentation(self) -> GroupoidPresentation:
        """Return the generating graph with no relators."""
        return GroupoidPresentation(self.objects, dict(self.generators), ())


class SGpd:
    """A simplicial groupoid given level by level."""

    def __init__(self, name: str, objects: Iterable[str]) -> None:
        """Initialize the simplicial groupoid."""
        self.name = name
        self.objects = tuple(sorted(objects))

    def arrows(self, n: int, x: str, y: str) -> tuple[list[Mor], bool]:
        """Return the level-n arrows x -> y and whether the list was cut off."""
        raise NotImplementedError

    def identity(self, n: int, x: str) -> Mor:
        """Return the identity of x at level n."""
        raise NotImplementedError

    def compose(self, n: int, g: Mor, f: Mor) -> Mor:
        """Return g after f at level n."""
        raise NotImplementedError

    def inverse(self, n: int, f: Mor) -> Mor:
        """Return the inverse of f at level n."""
        raise NotImplementedError

    def face(self, n: int, i: int, f: Mor) -> Mor:
        """Apply the face functor d_i from level n to level n - 1."""
        raise NotImplementedError

    def degeneracy(self, n: int, j: int, f: Mor) -> Mor:
        """Apply the degeneracy functor s_j from level n to level n + 1."""
        raise NotImplementedError

    def level_presentation(self, n: int) -> GroupoidPresentation | None:
        """Return the generators of level n when it is free."""
        return None

    def check_object(self, x: str) -> None:
        """Raise UnknownObject unless x is an object."""
        if x not in self.objects:
            raise UnknownObject(f"{x!r} is not an object of {self.name}")

    def truncated_below(self, levels: int) -> bool:
        """Return True if some arrow list of a level below levels is cut off."""
        return any(
            self.arrows(n, x, y)[1]
            for n in range(levels)
            for x in self.objects
            for y in self.objects
        )


class ConstantSGpd(SGpd):
    """The constant simplicial groupoid on a groupoid."""

    def __init__(self, groupoid: Groupoid) -> None:
        """Initialize from a single groupoid."""
        super().__init__(groupoid.name, groupoid.objects)
        self.groupoid = groupoid

    def arrows(self, n: int, x: str, y: str) -> tuple[list[Mor], bool]:
        """Return the arrows of the groupoid."""
        return self.groupoid.arrows(x, y)

    def identity(self, n: int, x: str) -> Mor:
        """Return the identity of the groupoid."""
        return self.groupoid.identity(x)

    def compose(self, n: int, g: Mor, f: Mor) -> Mor:
        """Compose in the groupoid."""
        return self.groupoid.compose(g, f)

    def inverse(self, n: int, f: Mor) -> Mor:
        """Invert in the groupoid."""
        return self.groupoid.inverse(f)

    def face(self, n: int, i: int, f: Mor) -> Mor:
        """Return f."""
        return f

    def degeneracy(self, n: int, j: int, f: Mor) -> Mor:
        """Return f."""
        return f

    def level_presentation(self, n: int) -> GroupoidPresentation | None:
        """Return the presentation of the groupoid, if any."""
        return self.groupoid.presentation()


def _generator_word(ref: SimplexRef) -> Word:
    """Return [ref] as a word: empty for s_0-degenerate simplices."""
    if 0 in ref.degeneracies:
        return ()
    return ((str(ref), 1),)


class LoopGroupoid(SGpd):
    """The loop groupoid G(X).

    Level n is free on the (n+1)-simplices x of X with x -> [x] going from
    vertex 0 to vertex 1, and [x] = 1 for s_0-degenerate x. The face d_0[x]
    is the path [d_1 x] then [d_0 x]^-1; d_i[x] = [d_{i+1} x] for i >= 1 and
    s_j[x] = [s_{j+1} x].
    """

    def __init__(self, sset: SSet, word_length: int) -> None:
        """Initialize the loop groupoid of sset."""
        super().__init__(f"G({sset.name})", sset.nondegenerate(0))
        self.sset = sset
        self.word_length = word_length
        self._levels: dict[int, FreeGroupoid] = {}
        self._refs: dict[int, dict[str, SimplexRef]] = {}

    def generators(self, n: int) -> dict[str, SimplexRef]:
        """Return the generators of level n by name."""
        if n not in self._refs:
            self._refs[n] = {
                str(ref): ref for ref in self.sset.simplices(n + 1) if 0 not in ref.degeneracies
            }
        return self._refs[n]

    def level(self, n: int) -> FreeGroupoid:
        """Return level n as a free groupoid."""
        if n not in self._levels:
            ends = {
                name: (self.sset.vertex(ref, 0), self.sset.vertex(ref, 1))
                for name, ref in self.generators(n).items()
            }
            self._levels[n] = FreeGroupoid(
                f"{self.name}_{n}", self.objects, ends, self.word_length
            )
        return self._levels[n]

    def letter(self, ref: SimplexRef) -> Mor:
        """Return the arrow [ref] of level ref.dim - 1."""
        return Mor(self.sset.vertex(ref, 0), self.sset.vertex(ref, 1), _generator_word(ref))

    def arrows(self, n: int, x: str, y: str) -> tuple[list[Mor], bool]:
        """Return the reduced words x -> y at level n up to the word bound."""
        return self.level(n).arrows(x, y)

    def identity(self, n: int, x: str) -> Mor:
        """Return the empty word."""
        return self.level(n).identity(x)

    def compose(self, n: int, g: Mor, f: Mor) -> Mor:
        """Concatenate and reduce."""
        return self.level(n).compose(g, f)

    def inverse(self, n: int, f: Mor) -> Mor:
        """Invert the word."""
        return self.level(n).inverse(f)

    def _on_words(self, n: int, f: Mor, image: Callable[[SimplexRef], Word]) -> Word:
        refs = self.generators(n)
        word: list[tuple[str, int]] = []
        for name, sign in f.body:
            letters = image(refs[name])
            word.extend(letters if sign > 0 else invert(letters))
        return reduce_word(word)

    def face(self, n: int, i: int, f: Mor) -> Mor:
        """Apply d_i letterwise."""
        sset = self.sset

        def image(ref: SimplexRef) -> Word:
            if i == 0:
                return _generator_word(sset.face(ref, 1)) + invert(
                    _generator_word(sset.face(ref, 0))
                )
            return _generator_word(sset.face(ref, i + 1))

        return Mor(f.source, f.target, self._on_words(n, f, image))

    def degeneracy(self, n: int, j: int, f: Mor) -> Mor:
        """Apply s_j letterwise."""
        return Mor(
            f.source,
            f.target,
            self._on_words(n, f, lambda ref: _generator_word(ref.degeneracy(j + 1))),
        )

    def level_presentation(self, n: int) -> GroupoidPresentation:
        """Return the generating graph of level n."""
        return self.level(n).presentation()


def loop_groupoid(sset: SSet, budget: Budget | None = None) -> LoopGroupoid:
    """Return the loop groupoid of sset with the configured word bound."""
    return LoopGroupoid(sset, resolve(budget).word_length)


@dataclass(frozen=True)
class Realization:
    """A simplicial set built from strings of arrows, with its key tables."""

    obj: SSet
    tables: list[dict[Any, SimplexRef]]
    _keys: dict[SimplexRef, Any] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        keys = {value: key for table in self.tables for key, value in table.items()}
        object.__setattr__(self, "_keys", keys)

    def ref_of(self, n: int, key: Any) -> SimplexRef:
        """Return the simplex with a given key.

        Raises:
            EnumerationImpossible: If the key lies outside the enumerated part.
        """
        try:
            return self.tables[n][key]
        except (IndexError, KeyError) as err:
            raise EnumerationImpossible(
                f"An {n}-simplex lies outside the enumerated part of {self.obj.name}"
            ) from err

    def key_of(self, ref: SimplexRef) -> Any:
        """Return the key of a simplex."""
        return self._keys[ref]


def _string_label(n: int, key: Any) -> str:
    if n == 0:
        return str(key)
    return "[" + ",".join(m.label for m in key) + "]"


def _tolerant(
    face: Callable[[int, int, Any], Any], closed: bool
) -> Callable[[int, int, Any], Any]:
    """Map faces that leave the enumerated part to a key that is never listed."""
    if not closed:
        return face

    def wrapped(n: int, i: int, key: Any) -> Any:
        try:
            return face(n, i, key)
        except EnumerationImpossible:
            return _OUTSIDE

    return wrapped


def _strings(gpd: SGpd, levels: Sequence[int]) -> list[tuple[Mor, ...]]:
    """Return composable strings whose p-th entry lives at levels[p]."""
    partial: list[tuple[tuple[Mor, ...], str]] = [((), x) for x in gpd.objects]
    for level in levels:
        grown = []
        for prefix, x in partial:
            for y in gpd.objects:
                grown.extend((prefix + (a,), y) for a in gpd.arrows(level, x, y)[0])
        partial = grown
    return [prefix for prefix, _ in partial]


def _vertex_of(key: tuple[Mor, ...], j: int) -> str:
    return key[j - 1].target if j else key[0].source


def _wbar(gpd: SGpd, max_dim: int, budget: Budget | None = None) -> Realization:
    resolve(budget).check_dim(max_dim)
    closed = gpd.truncated_below(max_dim)

    def elements(n: int) -> list[Any]:
        if n == 0:
            return list(gpd.objects)
        return _strings(gpd, [n - p for p in range(1, n + 1)])

    def face(n: int, i: int, key: tuple[Mor, ...]) -> Any:
        if n == 1:
            return key[0].target if i == 0 else key[0].source
        if i == 0:
            return key[1:]
        if i == n:
            return tuple(gpd.face(n - p, n - p, key[p - 1]) for p in range(1, n))
        head = tuple(gpd.face(n - p, i - p, key[p - 1]) for p in range(1, i))
        merged = gpd.compose(n - i - 1, key[i], gpd.face(n - i, 0, key[i - 1]))
        return head + (merged,) + key[i + 1 :]

    def degeneracy(n: int, j: int, key: Any) -> Any:
        if n == 0:
            return (gpd.identity(0, key),)
        head = tuple(gpd.degeneracy(n - p, j - p, key[p - 1]) for p in range(1, j + 1))
        return head + (gpd.identity(n - j, _vertex_of(key, j)),) + key[j:]

    obj, tables = from_simplicial_object(
        f"W({gpd.name})",
        max_dim,
        elements,
        _tolerant(face, closed),
        degeneracy,
        _string_label,
        closed=closed,
    )
    _LOGGER.info("W(%s) has cell counts %s", gpd.name, obj.cell_counts())
    return Realization(obj, tables)


def wbar(gpd: SGpd, max_dim: int, budget: Budget | None = None) -> SSet:
    """Return the classifying space W(gpd) up to max_dim.

    An n-simplex is a composable string (h_1, ..., h_n) with h_p at level
    n - p. The face d_0 drops h_1, d_n applies d_{n-p} to every h_p and drops
    h_n, and an inner d_i merges h_i and h_{i+1} into h_{i+1} after d_0 h_i.

    Raises:
        DimBudgetExceeded: If max_dim is above the configured bound.
    """
    return _wbar(gpd, max_dim, budget).obj


def _diag(gpd: SGpd, max_dim: int, budget: Budget | None = None) -> Realization:
    resolve(budget).check_dim(max_dim)
    closed = gpd.truncated_below(max_dim + 1)

    def elements(n: int) -> list[Any]:
        if n == 0:
            return list(gpd.objects)
        return _strings(gpd, [n] * n)

    def face(n: int, i: int, key: tuple[Mor, ...]) -> Any:
        if n == 1:
            return key[0].target if i == 0 else key[0].source
        lowered = tuple(gpd.face(n, i, a) for a in key)
        if i == 0:
            return lowered[1:]
        if i == n:
            return lowered[:-1]
        return lowered[: i - 1] + (gpd.compose(n - 1, lowered[i], lowered[i - 1]),) + lowered[
            i + 1 :
        ]

    def degeneracy(n: int, j: int, key: Any) -> Any:
        if n == 0:
            return (gpd.identity(1, key),)
        raised = tuple(gpd.degeneracy(n, j, a) for a in key)
        return raised[:j] + (gpd.identity(n + 1, _vertex_of(key, j)),) + raised[j:]

    obj, tables = from_simplicial_object(
        f"dB({gpd.name})",
        max_dim,
        elements,
        _tolerant(face, closed),
        degeneracy,
        _string_label,
        closed=closed,
    )
    _LOGGER.info("dB(%s) has cell counts %s", gpd.name, obj.cell_counts())
    return Realization(obj, tables)


def diag_nerve(gpd: SGpd, max_dim: int, budget: Budget | None = None) -> SSet:
    """Return the diagonal of the levelwise nerve up to max_dim."""
    return _diag(gpd, max_dim, budget).obj


def nerve(groupoid: Groupoid, max_dim: int, budget: Budget | None = None) -> SSet:
    """Return the max_dim-skeleton of the nerve of a groupoid.

    An n-simplex is a string (a_1, ..., a_n) with a_i: x_{i-1} -> x_i. The
    face d_0 drops a_1, d_n drops a_n and an inner d_i composes a_i then a_{i+1}.
    """
    built = _wbar(ConstantSGpd(groupoid), max_dim, budget).obj
    return SSet(f"N({groupoid.name})", built.cells, built.faces, built.truncated)


@dataclass(frozen=True)
class SGpdMap:
    """A simplicial functor, identity-free on objects, given by its action on arrows."""

    source: SGpd
    target: SGpd
    objects: Mapping[str, str]
    on_arrows: Callable[[int, Mor], Mor]

    def __call__(self, n: int, f: Mor) -> Mor:
        """Return the image of a level-n arrow."""
        return self.on_arrows(n, f)


@dataclass(frozen=True)
class GroupoidFunctor:
    """A functor between explicit groupoids given by tables."""

    source: Groupoid
    target: Groupoid
    objects: Mapping[str, str]
    arrows: Mapping[str, str]

    def __call__(self, f: Mor) -> Mor:
        """Return the image of an arrow."""
        return Mor(self.objects[f.source], self.objects[f.target], self.arrows[f.body])

    def constant(self) -> SGpdMap:
        """Return the induced map of constant simplicial groupoids."""
        return SGpdMap(
            ConstantSGpd(self.source),
            ConstantSGpd(self.target),
            self.objects,
            lambda _n, f: self(f),
        )


def _realized_map(
    phi: SGpdMap,
    source: Realization,
    target: Realization,
    levels: Callable[[int], list[int]],
) -> SMap:
    assignment = {}
    for d, cell in source.obj.all_cells():
        key = source.key_of(SimplexRef(d, cell))
        if d == 0:
            image: Any = phi.objects[key]
        else:
            image = tuple(phi(level, h) for level, h in zip(levels(d), key))
        assignment[cell] = target.ref_of(d, image)
    return SMap(source.obj, target.obj, assignment)


def wbar_map(phi: SGpdMap, max_dim: int, budget: Budget | None = None) -> SMap:
    """Return W(phi) up to max_dim."""
    return _realized_map(
        phi,
        _wbar(phi.source, max_dim, budget),
        _wbar(phi.target, max_dim, budget),
        lambda n: [n - p for p in range(1, n + 1)],
    )


def diag_nerve_map(phi: SGpdMap, max_dim: int, budget: Budget | None = None) -> SMap:
    """Return dB(phi) up to max_dim."""
    return _realized_map(
        phi,
        _diag(phi.source, max_dim, budget),
        _diag(phi.target, max_dim, budget),
        lambda n: [n] * n,
    )


def nerve_map(functor: GroupoidFunctor, max_dim: int, budget: Budget | None = None) -> SMap:
    """Return the nerve of a functor between explicit groupoids."""
    mapped = wbar_map(functor.constant(), max_dim, budget)
    source = nerve(functor.source, max_dim, budget)
    target = nerve(functor.target, max_dim, budget)
    return SMap(source, target, mapped.assignment)


def loop_groupoid_map(f: SMap, budget: Budget | None = None) -> SGpdMap:
    """Return G(f): G(X) -> G(Y)."""
    source = loop_groupoid(f.source, budget)
    target = loop_groupoid(f.target, budget)
    objects = {v: f.assignment[v].base for v in f.source.nondegenerate(0)}

    def on_arrows(n: int, mor: Mor) -> Mor:
        word = source._on_words(n, mor, lambda ref: _generator_word(f(ref)))
        return Mor(objects[mor.source], objects[mor.target], word)

    return SGpdMap(source, target, objects, on_arrows)


@dataclass(frozen=True)
class HomSpace:
    """The simplicial set of arrows x -> y with its level tables."""

    source: str
    target: str
    sset: SSet
    truncated: bool
    tables: list[dict[Mor, SimplexRef]]
    _arrows: dict[SimplexRef, Mor] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        arrows = {value: key for table in self.tables for key, value in table.items()}
        object.__setattr__(self, "_arrows", arrows)

    def arrow_of(self, ref: SimplexRef) -> Mor:
        """Return the arrow behind a simplex."""
        return self._arrows[ref]

    def ref_of(self, f: Mor, n: int = 0) -> SimplexRef:
        """Return the n-simplex of a level-n arrow.

        Raises:
            EnumerationImpossible: If f lies outside the enumerated part.
        """
        ref = self.tables[n].get(f) if n < len(self.tables) else None
        if ref is None:
            raise EnumerationImpossible(
                f"A level-{n} arrow {f.source} -> {f.target} is not enumerated"
            )
        return ref


def hom_space(
    gpd: SGpd, x: str, y: str, max_dim: int, budget: Budget | None = None
) -> HomSpace:
    """Return the simplicial set gpd(x, y) up to max_dim.

    Raises:
        UnknownObject: If x or y is not an object.
        DimBudgetExceeded: If max_dim is above the configured bound.
    """
    gpd.check_object(x)
    gpd.check_object(y)
    resolve(budget).check_dim(max_dim)
    closed = any(gpd.arrows(n, x, y)[1] for n in range(max_dim + 1))
    obj, tables = from_simplicial_object(
        f"{gpd.name}({x},{y})",
        max_dim,
        lambda n: gpd.arrows(n, x, y)[0],
        gpd.face,
        gpd.degeneracy,
        lambda _n, f: f.label,
        closed=closed,
    )
    if closed:
        _LOGGER.warning("%s(%s,%s) is cut off at the word bound", gpd.name, x, y)
    return HomSpace(x, y, obj, closed, tables)


@dataclass(frozen=True)
class Morphisms:
    """Mor(gpd) with its source and target maps to the discrete object set."""

    obj: SSet
    objects: SSet
    source: SMap
    target: SMap
    legs: dict[tuple[str, str], SMap]
    homs: dict[tuple[str, str], HomSpace]


def morphisms(gpd: SGpd, max_dim: int, budget: Budget | None = None) -> Morphisms:
    """Return the simplicial set of all arrows with source and target maps."""
    pairs = [(x, y) for x in gpd.objects for y in gpd.objects]
    homs = {pair: hom_space(gpd, *pair, max_dim, budget) for pair in pairs}
    union, legs = coproduct(
        [homs[pair].sset for pair in pairs], f"Mor({gpd.name})", [f"{x}->{y}" for x, y in pairs]
    )
    discrete = SSet.build(f"Ob({gpd.name})", {0: list(gpd.objects)}, {})
    ends: dict[str, tuple[str, str]] = {}
    for pair, leg in zip(pairs, legs):
        for ref in leg.assignment.values():
            ends[ref.base] = pair
    source = SMap(
        union,
        discrete,
        {cell: degenerate_vertex(ends[cell][0], d) for d, cell in union.all_cells()},
    )
    target = SMap(
        union,
        discrete,
        {cell: degenerate_vertex(ends[cell][1], d) for d, cell in union.all_cells()},
    )
    return Morphisms(union, discrete, source, target, dict(zip(pairs, legs)), homs)


def morphism_pullback_check(gpd: SGpd, max_dim: int, budget: Budget | None = None) -> bool:
    """Check that every hom-space is the fibre of (source, target) over (x, y)."""
    mor = morphisms(gpd, max_dim, budget)
    square = product(mor.objects, mor.objects, max_dim, budget)
    ends = pair_map(square, mor.source, mor.target)
    for (x, y), leg in mor.legs.items():
        fibre = fiber(ends, square.pair_ref(SimplexRef(0, x), SimplexRef(0, y)).base)
        if not is_isomorphism(SMap(leg.source, fibre, leg.assignment)):
            return False
    return True


class TruncatedSGpd(SGpd):
    """Hom-wise coskeleton of a simplicial groupoid.

    Low levels reuse the composition of the original groupoid; above the
    coskeletal level an arrow is determined by its faces, and so are its
    composites and inverses.
    """

    def __init__(
        self,
        original: SGpd,
        level: int,
        max_dim: int,
        homs: Mapping[tuple[str, str], HomSpace],
        sections: Mapping[tuple[str, str], SSet],
    ) -> None:
        """Initialize from the hom-spaces and their coskeleta."""
        super().__init__(f"P{level - 1}({original.name})", original.objects)
        self.original = original
        self.level = level
        self.max_dim = max_dim
        self.homs = dict(homs)
        self.sections = dict(sections)

    def _space(self, x: str, y: str) -> SSet:
        return self.sections[(x, y)]

    def _check_level(self, n: int) -> None:
        if n > self.max_dim:
            raise EnumerationImpossible(f"{self.name} is built up to level {self.max_dim}")

    def arrows(self, n: int, x: str, y: str) -> tuple[list[Mor], bool]:
        """Return the n-simplices of the truncated hom-space."""
        self._check_level(n)
        return [Mor(x, y, ref) for ref in self._space(x, y).simplices(n)], self.homs[
            (x, y)
        ].truncated

    def identity(self, n: int, x: str) -> Mor:
        """Return the degenerate identity."""
        unit = self.homs[(x, x)].ref_of(self.original.identity(0, x))
        return Mor(x, x, degenerate_vertex(unit.base, n))

    def _lift(self, f: Mor) -> Mor:
        return self.homs[(f.source, f.target)].arrow_of(f.body)

    def _lower(self, n: int, f: Mor) -> Mor:
        return Mor(f.source, f.target, self.homs[(f.source, f.target)].ref_of(f, n))

    def _filler(self, x: str, y: str, n: int, faces: tuple[Mor, ...]) -> Mor:
        self._check_level(n)
        found = self._space(x, y).boundary_index(n).get(tuple(f.body for f in faces))
        if not found:
            raise EnumerationImpossible(f"{self.name}: a sphere in ({x},{y}) has no filler")
        return Mor(x, y, found[0])

    def compose(self, n: int, g: Mor, f: Mor) -> Mor:
        """Compose in the original groupoid or facewise above the coskeletal level."""
        if n <= self.level:
            return self._lower(n, self.original.compose(n, self._lift(g), self._lift(f)))
        faces = tuple(
            self.compose(n - 1, self.face(n, i, g), self.face(n, i, f)) for i in range(n + 1)
        )
        return self._filler(f.source, g.target, n, faces)

    def inverse(self, n: int, f: Mor) -> Mor:
        """Invert in the original groupoid or facewise."""
        if n <= self.level:
            return self._lower(n, self.original.inverse(n, self._lift(f)))
        faces = tuple(self.inverse(n - 1, self.face(n, i, f)) for i in range(n + 1))
        return self._filler(f.target, f.source, n, faces)

    def face(self, n: int, i: int, f: Mor) -> Mor:
        """Apply d_i in the hom-space."""
        return Mor(f.source, f.target, self._space(f.source, f.target).face(f.body, i))

    def degeneracy(self, n: int, j: int, f: Mor) -> Mor:
        """Apply s_j in the hom-space."""
        return Mor(f.source, f.target, f.body.degeneracy(j))


def postnikov_gpd(
    gpd: SGpd,
    n: int,
    max_dim: int,
    fibrancy_dim: int | None = None,
    budget: Budget | None = None,
) -> TruncatedSGpd:
    """Return P_n(gpd), the hom-wise cosk_{n+1}, with the same objects.

    Hom-spaces are checked Kan up to fibrancy_dim (default n + 2, capped at
    max_dim); fibrancy_dim=0 skips the check.

    Raises:
        NotFibrant: If a hom-space is not certified Kan.
        DimBudgetExceeded: If max_dim is above the configured bound.
    """
    horn_dim = min(fibrancy_dim if fibrancy_dim is not None else n + 2, max_dim)
    homs: dict[tuple[str, str], HomSpace] = {}
    sections: dict[tuple[str, str], SSet] = {}
    for x in gpd.objects:
        for y in gpd.objects:
            hom = hom_space(gpd, x, y, max_dim, budget)
            homs[(x, y)] = hom
            if not hom.sset.is_empty() and horn_dim >= 1:
                certificate = is_kan(hom.sset, horn_dim, budget)
                if not certificate.is_certified:
                    raise NotFibrant(
                        f"{hom.sset.name} is not certified Kan up to dimension {horn_dim}",
                        witness=certificate.witness,
                    )
            sections[(x, y)] = cosk(hom.sset, n + 1, max_dim, budget)[0]
    _LOGGER.info("Built P%d(%s) up to level %d", n, gpd.name, max_dim)
    return TruncatedSGpd(gpd, n + 1, max_dim, homs, sections)


def postnikov_gpd_map(phi: SGpdMap, source: TruncatedSGpd, target: TruncatedSGpd) -> SGpdMap:
    """Return P_n(phi) between the truncations of its source and target.

    Up to the coskeletal level arrows go through phi; above it they are
    determined by their faces.
    """

    def on_arrows(n: int, f: Mor) -> Mor:
        if n <= source.level:
            return target._lower(n, phi(n, source._lift(f)))
        faces = tuple(on_arrows(n - 1, source.face(n, i, f)) for i in range(n + 1))
        return target._filler(phi.objects[f.source], phi.objects[f.target], n, faces)

    return SGpdMap(source, target, phi.objects, on_arrows)


@dataclass(frozen=True)
class LoopFunctor:
    """A simplicial functor out of a loop groupoid, fixed by generator images."""

    source: LoopGroupoid
    target: SGpd
    objects: Mapping[str, str]
    images: Mapping[str, Mor]

    def on_ref(self, ref: SimplexRef) -> Mor:
        """Return the image of [ref] for a simplex that is not s_0-degenerate."""
        if not ref.degeneracies:
            return self.images[ref.base]
        rest = SimplexRef(ref.dim - 1, ref.base, ref.degeneracies[1:])
        return self.target.degeneracy(ref.dim - 2, ref.degeneracies[0] - 1, self.on_ref(rest))

    def on_simplex(self, ref: SimplexRef) -> Mor:
        """Return the image of [ref], an identity for s_0-degenerate simplices."""
        if 0 in ref.degeneracies:
            vertex = self.source.sset.vertex(ref, 0)
            return self.target.identity(ref.dim - 1, self.objects[vertex])
        return self.on_ref(ref)

    def __call__(self, n: int, f: Mor) -> Mor:
        """Return the image of a word of level n."""
        refs = self.source.generators(n)
        result = self.target.identity(n, self.objects[f.source])
        for name, sign in f.body:
            image = self.on_ref(refs[name])
            if sign < 0:
                image = self.target.inverse(n, image)
            result = self.target.compose(n, image, result)
        return result

    def key(self) -> tuple[tuple[str, Any], ...]:
        """Return a sortable identity for comparisons."""
        return tuple(sorted(self.objects.items())) + tuple(sorted(self.images.items()))


def loop_functors(
    sset: SSet, gpd: SGpd, budget: Budget | None = None
) -> list[LoopFunctor]:
    """Enumerate every simplicial functor G(sset) -> gpd.

    A functor is fixed by an object for each vertex and an arrow for each
    nondegenerate simplex, subject to compatibility with all faces.

    Raises:
        EnumerationImpossible: If a needed arrow list of gpd is cut off.
        SearchBudgetExceeded: If the node budget runs out.
    """
    source = loop_groupoid(sset, budget)
    limit = resolve(budget).search_nodes
    cells = list(sset.all_cells())
    objects: dict[str, str] = {}
    images: dict[str, Mor] = {}
    found: list[LoopFunctor] = []
    nodes = 0

    def candidates(d: int, cell: str) -> list[Any]:
        if d == 0:
            return list(gpd.objects)
        ref = SimplexRef(d, cell)
        start, end = objects[sset.vertex(ref, 0)], objects[sset.vertex(ref, 1)]
        arrows, cut = gpd.arrows(d - 1, start, end)
        if cut:
            raise EnumerationImpossible(f"Level {d - 1} of {gpd.name} is cut off")
        if d == 1:
            return arrows
        partial = LoopFunctor(source, gpd, objects, images)
        letter = source.letter(ref)
        wanted = [partial(d - 2, source.face(d - 1, i, letter)) for i in range(d)]
        return [a for a in arrows if all(gpd.face(d - 1, i, a) == w for i, w in enumerate(wanted))]

    def extend(index: int) -> None:
        nonlocal nodes
        if index == len(cells):
            found.append(LoopFunctor(source, gpd, dict(objects), dict(images)))
            return
        d, cell = cells[index]
        for candidate in candidates(d, cell):
            nodes += 1
            if nodes > limit:
                raise SearchBudgetExceeded(
                    f"Functor search G({sset.name}) -> {gpd.name} exceeded {limit} nodes",
                    nodes=nodes,
                )
            if d == 0:
                objects[cell] = candidate
            else:
                images[cell] = candidate
            extend(index + 1)
        objects.pop(cell, None)
        images.pop(cell, None)

    extend(0)
    _LOGGER.debug("Found %d functors G(%s) -> %s", len(found), sset.name, gpd.name)
    return found


def _transpose_right(phi: LoopFunctor, target: Realization) -> SMap:
    sset = phi.source.sset
    assignment = {}
    for d, cell in sset.all_cells():
        ref = SimplexRef(d, cell)
        if d == 0:
            key: Any = phi.objects[cell]
        else:
            key = tuple(
                phi.on_simplex(sset.apply(ref, tuple(range(p - 1, d + 1))))
                for p in range(1, d + 1)
            )
        assignment[cell] = target.ref_of(d, key)
    return SMap(sset, target.obj, assignment)


def _transpose_left(
    g: SMap, gpd: SGpd, realization: Realization, budget: Budget | None
) -> LoopFunctor:
    sset = g.source
    objects = {v: realization.key_of(g.assignment[v]) for v in sset.nondegenerate(0)}
    images = {
        cell: realization.key_of(g.assignment[cell])[0]
        for d, cell in sset.all_cells()
        if d > 0
    }
    return LoopFunctor(loop_groupoid(sset, budget), gpd, objects, images)


def transpose_right(phi: LoopFunctor, budget: Budget | None = None) -> SMap:
    """Return the map X -> W(gpd) adjoint to a functor G(X) -> gpd."""
    sset = phi.source.sset
    return _transpose_right(phi, _wbar(phi.target, max(sset.top_dim, 0), budget)).validate()


def transpose_left(g: SMap, gpd: SGpd, budget: Budget | None = None) -> LoopFunctor:
    """Return the functor G(X) -> gpd adjoint to a map g: X -> W(gpd)."""
    realization = _wbar(gpd, max(g.source.top_dim, 0), budget)
    if realization.obj != g.target:
        raise MalformedSpec(f"The target of the map is not W({gpd.name})")
    return _transpose_left(g, gpd, realization, budget)


def unit_map(sset: SSet, max_dim: int | None = None, budget: Budget | None = None) -> SMap:
    """Return the unit X -> W(G(X)), x -> ([x], [d_0 x], ..., [d_0^{n-1} x]).

    Raises:
        DimBudgetExceeded: If the source is above the dimension bound.
    """
    source = sset if max_dim is None or sset.top_dim <= max_dim else skeleton(sset, max_dim)
    resolve(budget).check_dim(source.top_dim)
    gpd = loop_groupoid(source, budget)
    images = {
        cell: gpd.letter(SimplexRef(d, cell)) for d, cell in source.all_cells() if d > 0
    }
    identity = LoopFunctor(gpd, gpd, {v: v for v in source.nondegenerate(0)}, images)
    # pi_1 of the target is read off its 2-simplices
    dim = min(max(source.top_dim, 2), resolve(budget).dim_bound)
    return _transpose_right(identity, _wbar(gpd, dim, budget)).validate()


def counit(gpd: SGpd, max_dim: int, budget: Budget | None = None) -> LoopFunctor:
    """Return the counit G(W(gpd)) -> gpd, [h_1, ..., h_n] -> h_1."""
    realization = _wbar(gpd, max_dim, budget)
    return _transpose_left(identity_map(realization.obj), gpd, realization, budget)


def unit_check(
    sset: SSet, max_dim: int | None = None, budget: Budget | None = None
) -> EquivalenceVerdict:
    """Test the unit X -> W(G(X)) with the low-degree equivalence check."""
    return weak_equivalence_check(unit_map(sset, max_dim, budget), max_s=1, budget=budget)


def adjunction_bijection(
    sset: SSet, gpd: SGpd, budget: Budget | None = None
) -> AdjunctionCount:
    """Enumerate both sides of Hom(G(X), H) = Hom(X, W(H)) and check the transposes.

    Raises:
        EnumerationImpossible: If a needed level of gpd is cut off.
        SearchBudgetExceeded: If either enumeration runs out of nodes.
    """
    functors = loop_functors(sset, gpd, budget)
    realization = _wbar(gpd, max(sset.top_dim, 0), budget)
    maps = list(iter_homs(sset, realization.obj, budget=budget))
    right_keys = {tuple(sorted(g.assignment.items())) for g in maps}
    transposed = {
        tuple(sorted(_transpose_right(phi, realization).assignment.items())) for phi in functors
    }
    round_trip = all(
        _transpose_left(_transpose_right(phi, realization), gpd, realization, budget).key()
        == phi.key()
        for phi in functors
    ) and all(
        _transpose_right(_transpose_left(g, gpd, realization, budget), realization).assignment
        == g.assignment
        for g in maps
    )
    bijective = round_trip and transposed == right_keys and len(functors) == len(maps)
    _LOGGER.info(
        "Hom(G(%s), %s) has %d elements, Hom(%s, W) has %d",
        sset.name,
        gpd.name,
        len(functors),
        sset.name,
        len(maps),
    )
    return AdjunctionCount(len(functors), len(maps), bijective)


def hom_group(gpd: SGpd, x: str, budget: Budget | None = None) -> GroupPresentation:
    """Return pi_0 of gpd(x, x) as a presented group.

    Finite hom-spaces give a multiplication-table presentation on their
    components. Free levels give the vertex group of level 0 modulo
    d_1 a = d_0 a for every generator a of level 1.

    Raises:
        EnumerationImpossible: If the hom-space is cut off and level 0 is not free.
    """
    hom = hom_space(gpd, x, x, 1, budget)
    if not hom.truncated:
        graph = nx.Graph()
        graph.add_nodes_from(hom.sset.simplices(0))
        for edge in hom.sset.simplices(1):
            d0, d1 = hom.sset.boundary(edge)
            graph.add_edge(d0, d1)
        components = sorted(sorted(c) for c in nx.connected_components(graph))
        member = {ref: k for k, comp in enumerate(components) for ref in comp}
        table = {}
        for a, first in enumerate(components):
            for b, second in enumerate(components):
                product_ = gpd.compose(0, hom.arrow_of(first[0]), hom.arrow_of(second[0]))
                table[(a, b)] = member[hom.ref_of(product_)]
        unit = member[hom.ref_of(gpd.identity(0, x))]
        classes = HomotopyClasses(0, x, tuple(tuple(c) for c in components), unit, table)
        return classes.to_presentation()
    level0 = gpd.level_presentation(0)
    level1 = gpd.level_presentation(1)
    if level0 is None or level1 is None:
        raise EnumerationImpossible(f"{gpd.name}({x},{x}) is infinite and not presented")
    relators = []
    for name, (source, target) in sorted(level1.generators.items()):
        letter = Mor(source, target, ((name, 1),))
        word = reduce_word(gpd.face(1, 1, letter).body + invert(gpd.face(1, 0, letter).body))
        if word:
            relators.append(word)
    return vertex_group(
        GroupoidPresentation(level0.objects, level0.generators, tuple(relators)), x
    )


def shift_check(
    gpd: SGpd, x: str, s: int, budget: Budget | None = None
) -> CompareVerdict:
    """Compare pi_s of dB(gpd) at x with pi_{s-1} of gpd(x, x).

    Returns:
        Isomorphic, NotIsomorphic, or Unknown when a side cannot be computed.
    """
    gpd.check_object(x)
    try:
        if s == 1:
            left = pi1(diag_nerve(gpd, 2, budget), x)
            verdict = compare_groups(left, hom_group(gpd, x, budget), budget)
            verdict.evidence.setdefault("s", s)
            return verdict
        total = diag_nerve(gpd, s + 1, budget)
        hom = hom_space(gpd, x, x, s, budget)
        unit = hom.ref_of(gpd.identity(0, x)).base
        upper = pi_n_classes(total, x, s, budget)
        lower = pi_n_classes(hom.sset, unit, s - 1, budget)
    except (NotFibrant, EnumerationImpossible, SearchBudgetExceeded) as err:
        _LOGGER.warning("Shift check at %s, s=%d is inconclusive: %s", x, s, err)
        return CompareVerdict(VERDICT_UNKNOWN, {"s": s, "reason": str(err)})
    evidence: dict[str, Any] = {"s": s, "counts": [upper.count, lower.count]}
    if upper.count != lower.count:
        return CompareVerdict(COMPARE_NOT_ISOMORPHIC, evidence)
    if upper.count == 1:
        return CompareVerdict(COMPARE_ISOMORPHIC, evidence)
    verdict = compare_groups(upper.to_presentation(), lower.to_presentation(), budget)
    return CompareVerdict(verdict.verdict, {**evidence, **verdict.evidence})


def _compare_spaces(
    first: SSet, second: SSet, vertices: Iterable[str], top: int, budget: Budget | None
) -> EquivalenceVerdict:
    """Compare pi_0, pi_1 and pi_s counts of two spaces sharing vertex names."""
    evidence: dict[str, Any] = {}
    left_index, right_index = component_index(first), component_index(second)
    points = sorted(vertices)
    partition = {
        (left_index[a] == left_index[b], right_index[a] == right_index[b])
        for a in points
        for b in points
    }
    evidence["pi0"] = [len(set(left_index.values())), len(set(right_index.values()))]
    if any(x != y for x, y in partition) or evidence["pi0"][0] != evidence["pi0"][1]:
        return EquivalenceVerdict(VERDICT_REFUTED, {**evidence, "invariant": "pi0"})
    unknown = False
    seen: set[int] = set()
    for v in points:
        if left_index[v] in seen:
            continue
        seen.add(left_index[v])
        verdict = compare_groups(pi1(first, v), pi1(second, v), budget)
        evidence.setdefault("pi1", {})[v] = verdict.to_dict()
        if verdict.is_not_isomorphic:
            return EquivalenceVerdict(VERDICT_REFUTED, {**evidence, "invariant": "pi1"})
        unknown = unknown or not verdict.is_isomorphic
        for s in range(2, top + 1):
            try:
                counts = (
                    pi_n_classes(first, v, s, budget).count,
                    pi_n_classes(second, v, s, budget).count,
                )
            except (NotFibrant, SearchBudgetExceeded) as err:
                _LOGGER.debug("pi_%d at %s not available: %s", s, v, err)
                unknown = True
                continue
            evidence.setdefault("pi_n", {})[f"{s}:{v}"] = list(counts)
            if counts[0] != counts[1]:
                return EquivalenceVerdict(VERDICT_REFUTED, {**evidence, "invariant": f"pi{s}"})
    return EquivalenceVerdict(VERDICT_UNKNOWN if unknown else VERDICT_CERTIFIED, evidence)


def truncation_check(
    gpd: SGpd, n: int, max_dim: int, budget: Budget | None = None
) -> EquivalenceVerdict:
    """Check that dB(P_n gpd) keeps pi_s for s <= n + 1 and kills pi_{n+2}.

    Only the degrees below max_dim are examined.
    """
    truncated = postnikov_gpd(gpd, n, max_dim, budget=budget)
    original_space = diag_nerve(gpd, max_dim, budget)
    truncated_space = diag_nerve(truncated, max_dim, budget)
    top = min(n + 1, max_dim - 1)
    verdict = _compare_spaces(original_space, truncated_space, gpd.objects, top, budget)
    if verdict.is_refuted or n + 2 > max_dim - 1:
        return verdict
    evidence = dict(verdict.evidence)
    for x in gpd.objects:
        try:
            count = pi_n_classes(truncated_space, x, n + 2, budget).count
        except (NotFibrant, SearchBudgetExceeded) as err:
            _LOGGER.debug("pi_%d of the truncation not available: %s", n + 2, err)
            return EquivalenceVerdict(VERDICT_UNKNOWN, evidence)
        evidence.setdefault("killed", {})[x] = count
        if count != 1:
            return EquivalenceVerdict(VERDICT_REFUTED, {**evidence, "invariant": f"pi{n + 2}"})
    return EquivalenceVerdict(verdict.verdict, evidence)


def roundtrip_check(
    sset: SSet, n: int, max_dim: int, budget: Budget | None = None
) -> EquivalenceVerdict:
    """Compare W(P_{n-1} G(X)) with P_n(W(G(X))) through pi_0 and pi_1.

    W(G(X)) is cut off at the word bound and is rarely certified Kan. When
    its Postnikov section cannot be built, P_n(X) stands in for it, which
    requires a certified unit X -> W(G(X)) and a Kan certificate for X.
    Without both the verdict is unknown and the evidence carries the
    fibrancy witness.
    """
    source = sset if sset.top_dim <= max_dim else skeleton(sset, max_dim)
    loops = loop_groupoid(source, budget)
    # hom-spaces of a loop groupoid are simplicial groups, hence Kan
    truncated = postnikov_gpd(loops, n - 1, max_dim, fibrancy_dim=0, budget=budget)
    left = wbar(truncated, max_dim, budget)
    classifying = wbar(loops, max_dim, budget)
    fibrancy_dim = min(n + 2, max_dim)
    evidence: dict[str, Any] = {"right": f"P{n}({classifying.name})"}
    try:
        right, _ = postnikov(classifying, n, max_dim, fibrancy_dim=fibrancy_dim, budget=budget)
    except (NotFibrant, SearchBudgetExceeded) as err:
        evidence["fibrancy"] = {"subject": classifying.name, "reason": str(err)}
        if isinstance(err, NotFibrant):
            evidence["fibrancy"]["witness"] = err.witness
        unit = unit_check(source, max_dim, budget)
        evidence["unit"] = unit.to_dict()
        if not unit.is_certified:
            _LOGGER.warning("%s: unit not certified, roundtrip undecided", source.name)
            return EquivalenceVerdict(VERDICT_UNKNOWN, evidence)
        try:
            right, _ = postnikov(source, n, max_dim, fibrancy_dim=fibrancy_dim, budget=budget)
        except (NotFibrant, SearchBudgetExceeded) as inner:
            _LOGGER.warning("%s: no Kan model for P_%d, roundtrip undecided", source.name, n)
            evidence["source_fibrancy"] = str(inner)
            return EquivalenceVerdict(VERDICT_UNKNOWN, evidence)
        evidence["right"] = f"P{n}({source.name}) through the unit"
    verdict = _compare_spaces(left, right, source.nondegenerate(0), 1, budget)
    return EquivalenceVerdict(verdict.verdict, {**verdict.evidence, **evidence})


def build_groupoid(spec: Mapping[str, Any], budget: Budget | None = None) -> Groupoid:
    """Build a groupoid from its textual description.

    Raises:
        MalformedSpec: If the record is malformed or a groupoid law fails.
        EnumerationImpossible: If a presentation does not enumerate.
    """
    data = validate_schema(GROUPOID_SCHEMA, spec, "groupoid")
    name = data["name"]
    if "group" in data:
        return FiniteGroupoid.from_group(name, data["group"]["elements"], data["group"]["table"])
    if "presentation" in data:
        return FiniteGroupoid.from_presentation(
            name, GroupPresentation.from_text(data["presentation"]), budget
        )
    if "generators" in data:
        generators = {g: parse_arrow(text) for g, text in data["generators"].items()}
        return FreeGroupoid(name, data["objects"], generators, resolve(budget).word_length)
    ends = {f: parse_arrow(text) for f, text in data["arrows"].items()}
    table: dict[tuple[str, str], str] = {}
    for pair, result in data["compose"].items():
        parts = pair.split()
        if len(parts) != 2:
            raise MalformedSpec(f"Composition key {pair!r} must name two arrows")
        table[(parts[0], parts[1])] = result
    return FiniteGroupoid(name, data["objects"], ends, data["identities"], table)
