"""Finite simplicial sets and simplicial maps in Eilenberg-Zilber normal form.

A simplex of a finite simplicial set is stored as a nondegenerate base cell
together with a strictly decreasing degeneracy word. Internally the word is
turned into an order-preserving surjection, which makes every face and
degeneracy computation a composition of order-preserving maps.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Callable
from collections.abc import Hashable
from collections.abc import Iterable
from collections.abc import Iterator
from collections.abc import Mapping
from collections.abc import Sequence
from dataclasses import dataclass
from dataclasses import field
from functools import lru_cache
from typing import Any
from typing import TypeVar

from .config import Budget
from .config import resolve
from .exceptions import MalformedSpec
from .exceptions import NonInjectiveGlue
from .exceptions import NonSimplicialMap
from .exceptions import PreconditionFailed
from .exceptions import SearchBudgetExceeded
from .exceptions import SimplicialIdentityViolation
from .formats import SMAP_SCHEMA
from .formats import SSET_SCHEMA
from .formats import validate_schema

_LOGGER = logging.getLogger(__name__)

Surjection = tuple[int, ...]
Operator = tuple[int, ...]
K = TypeVar("K", bound=Hashable)


@lru_cache(maxsize=None)
def surjection_of(dim: int, word: tuple[int, ...]) -> Surjection:
    """Return the surjection [dim] -> [dim - len(word)] of a degeneracy word."""
    theta = tuple(range(dim + 1))
    for i in word:
        theta = tuple(v if v <= i else v - 1 for v in theta)
    return theta


def word_of(theta: Sequence[int]) -> tuple[int, ...]:
    """Return the normal-form degeneracy word of a surjection."""
    return tuple(j for j in reversed(range(len(theta) - 1)) if theta[j] == theta[j + 1])


def surjections(n: int, m: int) -> Iterator[Surjection]:
    """Yield every order-preserving surjection [n] -> [m] in lexicographic order."""
    for steps in itertools.combinations(range(n), m):
        theta = [0]
        for j in range(n):
            theta.append(theta[-1] + (1 if j in steps else 0))
        yield tuple(theta)


def codegeneracy(n: int, j: int) -> Surjection:
    """Return sigma_j: [n + 1] -> [n]."""
    return tuple(x if x <= j else x - 1 for x in range(n + 2))


def coface(n: int, i: int) -> Operator:
    """Return delta_i: [n - 1] -> [n] as the list of its values."""
    return tuple(k for k in range(n + 1) if k != i)


@dataclass(frozen=True, order=True)
class SimplexRef:
    """A simplex in normal form: degeneracy word applied to a nondegenerate base."""

    dim: int
    base: str
    degeneracies: tuple[int, ...] = ()

    @property
    def base_dim(self) -> int:
        """Return the dimension of the nondegenerate base."""
        return self.dim - len(self.degeneracies)

    @property
    def surjection(self) -> Surjection:
        """Return the surjection [dim] -> [base_dim] of the degeneracy word."""
        return surjection_of(self.dim, self.degeneracies)

    @property
    def is_degenerate(self) -> bool:
        """Return True if the degeneracy word is not empty."""
        return bool(self.degeneracies)

    def degenerate_by(self, theta: Sequence[int]) -> SimplexRef:
        """Pull back along a surjection theta: [p] -> [dim]."""
        psi = self.surjection
        return SimplexRef(len(theta) - 1, self.base, word_of([psi[t] for t in theta]))

    def degeneracy(self, j: int) -> SimplexRef:
        """Return s_j applied to this simplex."""
        return self.degenerate_by(codegeneracy(self.dim, j))

    def __str__(self) -> str:
        """Return the face-ref syntax, e.g. ``s[3,1] e2``."""
        if not self.degeneracies:
            return self.base
        return f"s[{','.join(map(str, self.degeneracies))}] {self.base}"


def degenerate_vertex(vertex: str, dim: int) -> SimplexRef:
    """Return the totally degenerate dim-simplex on a vertex."""
    return SimplexRef(dim, vertex, tuple(range(dim - 1, -1, -1)))


def parse_ref(text: str, dim: int) -> SimplexRef:
    """Parse the face-ref syntax ``s[3,1] e2`` (or plain ``e2``) at a given dimension.

    Args:
        text: Face reference text.
        dim: Dimension of the referenced simplex.

    Returns:
        The parsed reference.

    Raises:
        MalformedSpec: If the syntax or the degeneracy word is invalid.
    """
    text = text.strip()
    word: tuple[int, ...] = ()
    base = text
    if text.startswith("s["):
        close = text.find("]")
        if close < 0:
            raise MalformedSpec(f"Unterminated degeneracy word in {text!r}")
        try:
            word = tuple(int(part) for part in text[2:close].split(",") if part.strip())
        except ValueError as err:
            raise MalformedSpec(f"Bad degeneracy word in {text!r}") from err
        base = text[close + 1 :].strip()
    if not base:
        raise MalformedSpec(f"Missing base in {text!r}")
    if any(a <= b for a, b in zip(word, word[1:])):
        raise MalformedSpec(f"Degeneracy word of {text!r} is not strictly decreasing")
    if word and (word[0] >= dim or word[-1] < 0):
        raise MalformedSpec(f"Degeneracy index out of range in {text!r} at dimension {dim}")
    return SimplexRef(dim, base, word)


def _check_word(ref: SimplexRef) -> bool:
    word = ref.degeneracies
    if any(a <= b for a, b in zip(word, word[1:])):
        return False
    return not word or (word[0] < ref.dim and word[-1] >= 0)


@dataclass(frozen=True)
class SSet:
    """A finite simplicial set given by nondegenerate cells and their faces.

    Equality is cell-level: two values are equal when they have the same cells
    per dimension and the same face data. Names and flags do not take part.
    """

    name: str = field(compare=False)
    cells: tuple[tuple[str, ...], ...]
    faces: Mapping[str, tuple[SimplexRef, ...]]
    truncated: bool = field(default=False, compare=False)
    _dims: dict[str, int] = field(default_factory=dict, init=False, repr=False, compare=False)
    _memo: dict[Any, Any] = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        """Index cell dimensions."""
        for d, names in enumerate(self.cells):
            for cell in names:
                if cell in self._dims:
                    raise MalformedSpec(f"Cell {cell!r} listed twice in {self.name}")
                self._dims[cell] = d

    @classmethod
    def build(
        cls,
        name: str,
        cells: Mapping[int, Iterable[str]],
        faces: Mapping[str, Sequence[SimplexRef]],
        *,
        truncated: bool = False,
    ) -> SSet:
        """Create and validate a simplicial set.

        Args:
            name: Display name.
            cells: Nondegenerate cell names per dimension.
            faces: Ordered face list for every cell of positive dimension.
            truncated: Whether the value is a face-closed part of an infinite object.

        Returns:
            Validated simplicial set.
        """
        top = max((d for d, names in cells.items() if list(names)), default=-1)
        layers = tuple(tuple(sorted(cells.get(d, ()))) for d in range(top + 1))
        sset = cls(name, layers, {c: tuple(fs) for c, fs in faces.items()}, truncated)
        sset.validate()
        return sset

    @classmethod
    def empty(cls, name: str = "empty") -> SSet:
        """Return the empty simplicial set."""
        return cls(name, (), {})

    @property
    def top_dim(self) -> int:
        """Return the largest dimension with a nondegenerate cell, -1 if empty."""
        return len(self.cells) - 1

    def is_empty(self) -> bool:
        """Return True if there are no vertices."""
        return not self.cells

    def nondegenerate(self, d: int) -> tuple[str, ...]:
        """Return the nondegenerate d-cells."""
        return self.cells[d] if 0 <= d < len(self.cells) else ()

    def dim_of(self, cell: str) -> int:
        """Return the dimension of a cell."""
        try:
            return self._dims[cell]
        except KeyError as err:
            raise MalformedSpec(f"Unknown cell {cell!r} in {self.name}") from err

    def has_cell(self, cell: str) -> bool:
        """Return True if cell is a nondegenerate cell."""
        return cell in self._dims

    def ref(self, cell: str) -> SimplexRef:
        """Return the nondegenerate simplex named cell."""
        return SimplexRef(self.dim_of(cell), cell)

    def all_cells(self) -> Iterator[tuple[int, str]]:
        """Yield (dim, name) for every nondegenerate cell, dimension ascending."""
        for d, names in enumerate(self.cells):
            for cell in names:
                yield d, cell

    def cell_counts(self) -> list[int]:
        """Return the number of nondegenerate cells per dimension."""
        return [len(names) for names in self.cells]

    def total_cells(self) -> int:
        """Return the number of nondegenerate cells."""
        return len(self._dims)

    def apply(self, ref: SimplexRef, alpha: Sequence[int]) -> SimplexRef:
        """Apply the simplicial operator of an order-preserving alpha: [p] -> [dim].

        Args:
            ref: Simplex of dimension n.
            alpha: Values alpha(0) <= ... <= alpha(p) in [n].

        Returns:
            The simplex alpha^* ref in normal form.
        """
        theta = ref.surjection
        composite = [theta[a] for a in alpha]
        image = sorted(set(composite))
        position = {v: k for k, v in enumerate(image)}
        epsilon = tuple(position[v] for v in composite)
        lower = self._face_op(ref.base, tuple(image))
        return lower.degenerate_by(epsilon)

    def _face_op(self, base: str, iota: tuple[int, ...]) -> SimplexRef:
        key = (base, iota)
        cached = self._memo.get(key)
        if cached is not None:
            return cached
        m = self.dim_of(base)
        if len(iota) == m + 1:
            result = SimplexRef(m, base)
        else:
            j = next(k for k in range(m + 1) if k not in iota)
            rest = tuple(v if v < j else v - 1 for v in iota)
            result = self.apply(self.faces[base][j], rest)
        self._memo[key] = result
        return result

    def face(self, ref: SimplexRef, i: int) -> SimplexRef:
        """Return d_i of a simplex."""
        return self.apply(ref, coface(ref.dim, i))

    def boundary(self, ref: SimplexRef) -> tuple[SimplexRef, ...]:
        """Return (d_0 ref, ..., d_n ref)."""
        return tuple(self.face(ref, i) for i in range(ref.dim + 1))

    def vertex(self, ref: SimplexRef, k: int) -> str:
        """Return the name of the k-th vertex of a simplex."""
        return self.apply(ref, (k,)).base

    def simplices(self, n: int) -> list[SimplexRef]:
        """Return all n-simplices, degenerate ones included, sorted."""
        key = ("simplices", n)
        if key not in self._memo:
            found = [
                SimplexRef(n, cell, word_of(theta))
                for m in range(min(n, self.top_dim) + 1)
                for cell in self.cells[m]
                for theta in surjections(n, m)
            ]
            self._memo[key] = sorted(found)
        result: list[SimplexRef] = self._memo[key]
        return result

    def boundary_index(self, d: int) -> dict[tuple[SimplexRef, ...], list[SimplexRef]]:
        """Return the map from boundary tuples to the d-simplices having them."""
        key = ("boundary_index", d)
        if key not in self._memo:
            index: dict[tuple[SimplexRef, ...], list[SimplexRef]] = {}
            for ref in self.simplices(d):
                index.setdefault(self.boundary(ref), []).append(ref)
            self._memo[key] = index
        result: dict[tuple[SimplexRef, ...], list[SimplexRef]] = self._memo[key]
        return result

    def validate(self) -> None:
        """Check face arities, bases and the simplicial identities.

        Raises:
            MalformedSpec: On missing bases, wrong arities or bad words.
            SimplicialIdentityViolation: If d_i d_j != d_{j-1} d_i for some i < j.
        """
        for cell in self.faces:
            if cell not in self._dims:
                raise MalformedSpec(f"Faces given for unknown cell {cell!r}")
        for d, cell in self.all_cells():
            faces = self.faces.get(cell, ())
            if d == 0:
                if faces:
                    raise MalformedSpec(f"Vertex {cell!r} cannot have faces")
                continue
            if len(faces) != d + 1:
                raise MalformedSpec(f"Cell {cell!r} needs {d + 1} faces, got {len(faces)}")
            for ref in faces:
                if ref.dim != d - 1:
                    raise MalformedSpec(f"Face {ref} of {cell!r} has dimension {ref.dim}")
                if ref.base not in self._dims:
                    raise MalformedSpec(f"Face {ref} of {cell!r} has a missing base")
                if self._dims[ref.base] != ref.base_dim or not _check_word(ref):
                    raise MalformedSpec(f"Face {ref} of {cell!r} is not in normal form")
        for d, cell in self.all_cells():
            if d < 2:
                continue
            faces = self.faces[cell]
            for j in range(d + 1):
                for i in range(j):
                    if self.face(faces[j], i) != self.face(faces[i], j - 1):
                        raise SimplicialIdentityViolation(
                            f"d_{i} d_{j} != d_{j - 1} d_{i} on {cell!r}", pair=(i, j), simplex=cell
                        )

    def to_dict(self) -> dict[str, Any]:
        """Return the textual description of this simplicial set."""
        return {
            "name": self.name,
            "cells": {str(d): list(names) for d, names in enumerate(self.cells)},
            "faces": {
                cell: [str(ref) for ref in self.faces[cell]]
                for d, cell in self.all_cells()
                if d > 0
            },
        }


def build_sset(spec: Mapping[str, Any]) -> SSet:
    """Build a validated simplicial set from its textual description.

    Args:
        spec: Record with ``name``, ``cells`` and ``faces``.

    Returns:
        Validated simplicial set.

    Raises:
        MalformedSpec: If the record or a face reference is malformed.
        SimplicialIdentityViolation: If the face data breaks an identity.
    """
    data = validate_schema(SSET_SCHEMA, spec, "simplicial set")
    cells = {int(d): list(names) for d, names in data["cells"].items()}
    dims = {cell: d for d, names in cells.items() for cell in names}
    faces: dict[str, list[SimplexRef]] = {}
    for cell, refs in data["faces"].items():
        if cell not in dims:
            raise MalformedSpec(f"Faces given for unknown cell {cell!r}")
        faces[cell] = [parse_ref(text, dims[cell] - 1) for text in refs]
    for cell, d in dims.items():
        if d > 0 and cell not in faces:
            raise MalformedSpec(f"Cell {cell!r} has no faces")
    return SSet.build(data["name"], cells, faces)


def _subset_name(subset: Sequence[int], n: int) -> str:
    separator = "" if n < 10 else "-"
    return separator.join(str(v) for v in subset)


@lru_cache(maxsize=None)
def standard(n: int) -> SSet:
    """Return the standard n-simplex with cells named by their vertex sets."""
    if n < 0:
        raise PreconditionFailed("standard simplex needs n >= 0")
    cells: dict[int, list[str]] = {}
    faces: dict[str, list[SimplexRef]] = {}
    for d in range(n + 1):
        for subset in itertools.combinations(range(n + 1), d + 1):
            name = _subset_name(subset, n)
            cells.setdefault(d, []).append(name)
            if d > 0:
                faces[name] = [
                    SimplexRef(d - 1, _subset_name(subset[:i] + subset[i + 1 :], n))
                    for i in range(d + 1)
                ]
    return SSet.build(f"Delta[{n}]", cells, faces)


@lru_cache(maxsize=None)
def boundary(n: int) -> SSet:
    """Return the boundary of the standard n-simplex."""
    full = standard(n)
    top = _subset_name(range(n + 1), n)
    return restrict(full, [c for _, c in full.all_cells() if c != top], f"dDelta[{n}]")


@lru_cache(maxsize=None)
def horn(n: int, k: int) -> SSet:
    """Return the horn Lambda^n_k: the boundary without the face opposite vertex k."""
    if n < 1 or not 0 <= k <= n:
        raise PreconditionFailed(f"horn({n}, {k}) is undefined")
    outer = boundary(n)
    missing = _subset_name([v for v in range(n + 1) if v != k], n)
    return restrict(outer, [c for _, c in outer.all_cells() if c != missing], f"Lambda[{n},{k}]")


def restrict(sset: SSet, keep: Iterable[str], name: str | None = None) -> SSet:
    """Return the subcomplex spanned by a face-closed set of cells.

    Raises:
        MalformedSpec: If keep is not closed under faces.
    """
    kept = set(keep)
    cells: dict[int, list[str]] = {}
    faces: dict[str, tuple[SimplexRef, ...]] = {}
    for d, cell in sset.all_cells():
        if cell not in kept:
            continue
        cells.setdefault(d, []).append(cell)
        if d > 0:
            faces[cell] = sset.faces[cell]
            missing = [ref for ref in faces[cell] if ref.base not in kept]
            if missing:
                raise MalformedSpec(f"Subcomplex is not face-closed at {cell!r}")
    return SSet.build(name or sset.name, cells, faces, truncated=sset.truncated)


def skeleton(sset: SSet, d: int) -> SSet:
    """Return the d-skeleton."""
    return restrict(sset, [c for k, c in sset.all_cells() if k <= d], f"sk{d}({sset.name})")


def simplices(sset: SSet, n: int) -> list[SimplexRef]:
    """Return all n-simplices of sset in normal form."""
    return sset.simplices(n)


@dataclass(frozen=True)
class SMap:
    """A simplicial map given on nondegenerate source cells."""

    source: SSet
    target: SSet
    assignment: Mapping[str, SimplexRef]

    def __call__(self, ref: SimplexRef) -> SimplexRef:
        """Return the image of any simplex of the source."""
        return self.assignment[ref.base].degenerate_by(ref.surjection)

    def validate(self) -> SMap:
        """Check dimensions, target bases and compatibility with faces.

        Returns:
            The map itself.

        Raises:
            MalformedSpec: If an assignment is missing or ill-typed.
            NonSimplicialMap: If a face square does not commute.
        """
        for d, cell in self.source.all_cells():
            image = self.assignment.get(cell)
            if image is None:
                raise MalformedSpec(f"No image for {cell!r}")
            if image.dim != d or not self.target.has_cell(image.base):
                raise MalformedSpec(f"Image {image} of {cell!r} is ill-typed")
            if self.target.dim_of(image.base) != image.base_dim or not _check_word(image):
                raise MalformedSpec(f"Image {image} of {cell!r} is not in normal form")
        for d, cell in self.source.all_cells():
            if d == 0:
                continue
            image = self.assignment[cell]
            for i, ref in enumerate(self.source.faces[cell]):
                if self(ref) != self.target.face(image, i):
                    raise NonSimplicialMap(f"Face {i} of {cell!r} does not commute", cell=cell)
        return self

    def to_dict(self) -> dict[str, Any]:
        """Return the textual description of the assignment."""
        return {cell: str(ref) for cell, ref in sorted(self.assignment.items())}


def build_smap(spec: Mapping[str, Any], source: SSet, target: SSet) -> SMap:
    """Build a validated map from a record with an ``assignment`` field.

    Args:
        spec: Record with ``source``, ``target`` and ``assignment``.
        source: Resolved source simplicial set.
        target: Resolved target simplicial set.

    Returns:
        Validated simplicial map.
    """
    data = validate_schema(SMAP_SCHEMA, spec, "simplicial map")
    assignment = {
        cell: parse_ref(text, source.dim_of(cell)) for cell, text in data["assignment"].items()
    }
    return SMap(source, target, assignment).validate()


def identity_map(sset: SSet) -> SMap:
    """Return the identity of sset."""
    return SMap(sset, sset, {cell: SimplexRef(d, cell) for d, cell in sset.all_cells()})


def inclusion(sub: SSet, sset: SSet) -> SMap:
    """Return the inclusion of a subcomplex sharing cell names."""
    return SMap(sub, sset, {cell: SimplexRef(d, cell) for d, cell in sub.all_cells()}).validate()


def terminal_map(sset: SSet) -> SMap:
    """Return the unique map to the standard 0-simplex."""
    return constant_map(sset, standard(0), "0")


def constant_map(sset: SSet, target: SSet, vertex: str) -> SMap:
    """Return the map collapsing sset onto one vertex of target."""
    return SMap(sset, target, {cell: degenerate_vertex(vertex, d) for d, cell in sset.all_cells()})


def compose(g: SMap, f: SMap) -> SMap:
    """Return g after f."""
    return SMap(f.source, g.target, {cell: g(ref) for cell, ref in f.assignment.items()})


def is_injective(f: SMap) -> bool:
    """Return True if f sends nondegenerate cells to distinct nondegenerate cells."""
    images = list(f.assignment.values())
    return all(not ref.is_degenerate for ref in images) and len({r.base for r in images}) == len(
        images
    )


def is_isomorphism(f: SMap) -> bool:
    """Return True if f is a bijection on nondegenerate cells."""
    return is_injective(f) and len(f.assignment) == f.target.total_cells()


def standard_map(alpha: Sequence[int], n: int) -> SMap:
    """Return the map Delta^m -> Delta^n induced by an order-preserving alpha: [m] -> [n]."""
    m = len(alpha) - 1
    source = standard(m)
    assignment: dict[str, SimplexRef] = {}
    for d, cell in source.all_cells():
        subset = [int(v) for v in (cell.split("-") if m >= 10 else cell)]
        values = [alpha[v] for v in subset]
        image = sorted(set(values))
        position = {v: k for k, v in enumerate(image)}
        theta = [position[v] for v in values]
        assignment[cell] = SimplexRef(d, _subset_name(image, n), word_of(theta))
    return SMap(source, standard(n), assignment)


def coproduct(
    parts: Sequence[SSet], name: str, tags: Sequence[str] | None = None
) -> tuple[SSet, list[SMap]]:
    """Return the disjoint union of parts with its inclusions.

    Cells of part k are renamed ``<tag>:<cell>`` where the tag defaults to k.
    """
    labels = list(tags) if tags is not None else [str(k) for k in range(len(parts))]
    cells: dict[int, list[str]] = {}
    faces: dict[str, list[SimplexRef]] = {}
    renames: list[dict[str, str]] = []
    for tag, part in zip(labels, parts):
        rename = {cell: f"{tag}:{cell}" for _, cell in part.all_cells()}
        renames.append(rename)
        for d, cell in part.all_cells():
            cells.setdefault(d, []).append(rename[cell])
            if d > 0:
                faces[rename[cell]] = [
                    SimplexRef(r.dim, rename[r.base], r.degeneracies) for r in part.faces[cell]
                ]
    union = SSet.build(name, cells, faces)
    legs = [
        SMap(part, union, {cell: SimplexRef(d, rename[cell]) for d, cell in part.all_cells()})
        for part, rename in zip(parts, renames)
    ]
    return union, legs


def disjoint_union(x: SSet, y: SSet) -> SSet:
    """Return the disjoint union of x and y."""
    union, _ = coproduct([x, y], f"{x.name}+{y.name}")
    return union


@dataclass(frozen=True)
class Pushout:
    """A pushout object with its two structure maps."""

    obj: SSet
    left: SMap
    right: SMap


def pushout(f: SMap, g: SMap, name: str | None = None) -> Pushout:
    """Glue the targets of f: A -> X and g: A -> Y along A.

    Args:
        f: First leg.
        g: Second leg, with the same source as f.
        name: Name of the result.

    Returns:
        The pushout with structure maps X -> P (left) and Y -> P (right).

    Raises:
        MalformedSpec: If the legs have different sources.
        NonInjectiveGlue: If neither leg is a monomorphism.
    """
    if f.source != g.source:
        raise MalformedSpec("Pushout legs must share their source")
    if is_injective(f):
        mono, other, swapped = f, g, False
    elif is_injective(g):
        mono, other, swapped = g, f, True
    else:
        raise NonInjectiveGlue("Pushout needs a leg that is injective on nondegenerate cells")
    glued, kept = mono.target, other.target
    preimage = {ref.base: cell for cell, ref in mono.assignment.items()}
    used = {cell for _, cell in kept.all_cells()}
    rename: dict[str, str] = {}
    for _, cell in glued.all_cells():
        if cell in preimage:
            continue
        fresh = cell
        while fresh in used:
            fresh += "'"
        used.add(fresh)
        rename[cell] = fresh

    def translate(ref: SimplexRef) -> SimplexRef:
        if ref.base in preimage:
            return other.assignment[preimage[ref.base]].degenerate_by(ref.surjection)
        return SimplexRef(ref.dim, rename[ref.base], ref.degeneracies)

    cells: dict[int, list[str]] = {}
    faces: dict[str, list[SimplexRef]] = {}
    for d, cell in kept.all_cells():
        cells.setdefault(d, []).append(cell)
        if d > 0:
            faces[cell] = list(kept.faces[cell])
    for d, cell in glued.all_cells():
        if cell in rename:
            cells.setdefault(d, []).append(rename[cell])
            if d > 0:
                faces[rename[cell]] = [translate(r) for r in glued.faces[cell]]
    obj = SSet.build(name or f"{glued.name}+_{mono.source.name}{kept.name}", cells, faces)
    glued_leg = SMap(glued, obj, {c: translate(SimplexRef(d, c)) for d, c in glued.all_cells()})
    kept_leg = SMap(kept, obj, {c: SimplexRef(d, c) for d, c in kept.all_cells()})
    _LOGGER.debug("Pushout %s has cell counts %s", obj.name, obj.cell_counts())
    if swapped:
        return Pushout(obj, kept_leg, glued_leg)
    return Pushout(obj, glued_leg, kept_leg)


def _pair_normal(u: SimplexRef, v: SimplexRef) -> tuple[SimplexRef, SimplexRef, Surjection]:
    """Split a pair of n-simplices into a nondegenerate pair and a common surjection."""
    tu, tv = u.surjection, v.surjection
    rho = [0]
    for j in range(u.dim):
        shared = tu[j] == tu[j + 1] and tv[j] == tv[j + 1]
        rho.append(rho[-1] + (0 if shared else 1))
    r = rho[-1]
    lu = [0] * (r + 1)
    lv = [0] * (r + 1)
    for x in range(u.dim + 1):
        lu[rho[x]] = tu[x]
        lv[rho[x]] = tv[x]
    return SimplexRef(r, u.base, word_of(lu)), SimplexRef(r, v.base, word_of(lv)), tuple(rho)


@dataclass(frozen=True)
class Product:
    """A (fibre) product truncated at a dimension, with its projections."""

    obj: SSet
    first: SMap
    second: SMap
    pairs: Mapping[str, tuple[SimplexRef, SimplexRef]]

    def pair_ref(self, u: SimplexRef, v: SimplexRef) -> SimplexRef:
        """Return the simplex of the product with components u and v.

        Raises:
            MalformedSpec: If the pair is not a simplex of this product.
        """
        lu, lv, rho = _pair_normal(u, v)
        name = _pair_name(lu, lv)
        if not self.obj.has_cell(name):
            raise MalformedSpec(f"({u}, {v}) is not a simplex of {self.obj.name}")
        return SimplexRef(len(rho) - 1, name, word_of(rho))


def _pair_name(u: SimplexRef, v: SimplexRef) -> str:
    return f"({u},{v})"


def _fibre_product(
    x: SSet,
    y: SSet,
    max_dim: int,
    name: str,
    partners: Callable[[int, SimplexRef], Iterable[SimplexRef]],
) -> Product:
    cells: dict[int, list[str]] = {}
    faces: dict[str, list[SimplexRef]] = {}
    pairs: dict[str, tuple[SimplexRef, SimplexRef]] = {}
    for n in range(max_dim + 1):
        for u in x.simplices(n):
            tu = u.surjection
            for v in partners(n, u):
                tv = v.surjection
                if any(tu[j] == tu[j + 1] and tv[j] == tv[j + 1] for j in range(n)):
                    continue
                cell = _pair_name(u, v)
                cells.setdefault(n, []).append(cell)
                pairs[cell] = (u, v)
                if n == 0:
                    continue
                refs = []
                for i in range(n + 1):
                    lu, lv, rho = _pair_normal(x.face(u, i), y.face(v, i))
                    refs.append(SimplexRef(n - 1, _pair_name(lu, lv), word_of(rho)))
                faces[cell] = refs
    obj = SSet.build(name, cells, faces)
    first = SMap(obj, x, {cell: pair[0] for cell, pair in pairs.items()})
    second = SMap(obj, y, {cell: pair[1] for cell, pair in pairs.items()})
    _LOGGER.debug("Built %s with cell counts %s", name, obj.cell_counts())
    return Product(obj, first, second, pairs)


def product(x: SSet, y: SSet, max_dim: int, budget: Budget | None = None) -> Product:
    """Return x times y up to max_dim with both projections.

    Raises:
        DimBudgetExceeded: If max_dim is above the configured bound.
    """
    resolve(budget).check_dim(max_dim)
    return _fibre_product(x, y, max_dim, f"{x.name}x{y.name}", lambda n, _u: y.simplices(n))


def pullback(f: SMap, g: SMap, max_dim: int, budget: Budget | None = None) -> Product:
    """Return the strict fibre product of f: X -> Z and g: Y -> Z up to max_dim.

    Raises:
        MalformedSpec: If f and g have different targets.
        DimBudgetExceeded: If max_dim is above the configured bound.
    """
    resolve(budget).check_dim(max_dim)
    if f.target != g.target:
        raise MalformedSpec("Pullback legs must share their target")
    y = g.source
    over: dict[int, dict[SimplexRef, list[SimplexRef]]] = {}

    def partners(n: int, u: SimplexRef) -> list[SimplexRef]:
        if n not in over:
            table: dict[SimplexRef, list[SimplexRef]] = {}
            for v in y.simplices(n):
                table.setdefault(g(v), []).append(v)
            over[n] = table
        return over[n].get(f(u), [])

    return _fibre_product(f.source, y, max_dim, f"{f.source.name}x_{y.name}", partners)


def pair_map(target: Product, first: SMap, second: SMap) -> SMap:
    """Return the map into a product induced by two maps with a common source."""
    return SMap(
        first.source,
        target.obj,
        {
            cell: target.pair_ref(first(SimplexRef(d, cell)), second(SimplexRef(d, cell)))
            for d, cell in first.source.all_cells()
        },
    )


def product_map(f: SMap, g: SMap, source: Product, target: Product) -> SMap:
    """Return f x g between two products."""
    return SMap(
        source.obj,
        target.obj,
        {cell: target.pair_ref(f(u), g(v)) for cell, (u, v) in source.pairs.items()},
    )


def fiber(f: SMap, vertex: str) -> SSet:
    """Return the strict fibre of f over a vertex of its target."""
    keep = [
        cell
        for d, cell in f.source.all_cells()
        if f.assignment[cell] == degenerate_vertex(vertex, d)
    ]
    return restrict(f.source, keep, f"fib({f.source.name},{vertex})")


def _placement_order(sset: SSet) -> list[str]:
    """Order cells so that each is placed as soon as all its faces are."""
    pending = [cell for d, cell in sset.all_cells() if d > 0]
    placed: set[str] = set()
    order: list[str] = []
    for vertex in sset.nondegenerate(0):
        order.append(vertex)
        placed.add(vertex)
        progress = True
        while progress:
            progress = False
            for cell in pending:
                if cell not in placed and all(r.base in placed for r in sset.faces[cell]):
                    placed.add(cell)
                    order.append(cell)
                    progress = True
    return order


def iter_homs(
    source: SSet,
    target: SSet,
    *,
    fixed: Mapping[str, SimplexRef] | None = None,
    over: tuple[SMap, SMap] | None = None,
    budget: Budget | None = None,
) -> Iterator[SMap]:
    """Yield simplicial maps source -> target in lexicographic order.

    Args:
        source: Domain.
        target: Codomain.
        fixed: Prescribed images for some source cells.
        over: Pair (p, q) with p: target -> B and q: source -> B; only maps h
            with p after h equal to q are produced.
        budget: Search budget.

    Yields:
        Every matching simplicial map.

    Raises:
        SearchBudgetExceeded: If the node budget runs out.
    """
    limit = resolve(budget).search_nodes
    order = _placement_order(source)
    prescribed = dict(fixed or {})
    assignment: dict[str, SimplexRef] = {}
    nodes = 0

    def candidates(cell: str) -> list[SimplexRef]:
        d = source.dim_of(cell)
        if d == 0:
            pool = target.simplices(0)
        else:
            wanted = tuple(
                assignment[r.base].degenerate_by(r.surjection) for r in source.faces[cell]
            )
            pool = target.boundary_index(d).get(wanted, [])
        if cell in prescribed:
            pool = [prescribed[cell]] if prescribed[cell] in pool else []
        if over is not None:
            p, q = over
            want = q.assignment[cell]
            pool = [ref for ref in pool if p(ref) == want]
        return pool

    def extend(index: int) -> Iterator[SMap]:
        nonlocal nodes
        if index == len(order):
            yield SMap(source, target, dict(assignment))
            return
        cell = order[index]
        for candidate in candidates(cell):
            nodes += 1
            if nodes > limit:
                raise SearchBudgetExceeded(
                    f"Map search {source.name} -> {target.name} exceeded {limit} nodes",
                    nodes=nodes,
                )
            assignment[cell] = candidate
            yield from extend(index + 1)
        assignment.pop(cell, None)

    yield from extend(0)


def hom_enumerate(source: SSet, target: SSet, budget: Budget | None = None) -> list[SMap]:
    """Return every simplicial map source -> target in lexicographic order.

    Raises:
        SearchBudgetExceeded: If the node budget runs out.
    """
    maps = list(iter_homs(source, target, budget=budget))
    _LOGGER.debug("Found %d maps %s -> %s", len(maps), source.name, target.name)
    return maps


def from_simplicial_object(
    name: str,
    max_dim: int,
    elements: Callable[[int], Iterable[K]],
    face: Callable[[int, int, K], K],
    degeneracy: Callable[[int, int, K], K],
    label: Callable[[int, K], str],
    *,
    closed: bool = False,
) -> tuple[SSet, list[dict[K, SimplexRef]]]:
    """Build a simplicial set from enumerated simplices and structure maps.

    Degenerate elements are detected by x == s_j d_j x. With closed=True an
    element is dropped when one of its faces is not enumerated, which yields
    the largest face-closed part of the enumeration.

    Args:
        name: Name of the result.
        max_dim: Highest dimension to enumerate.
        elements: All n-simplices for a given n.
        face: face(n, i, x) is d_i of an n-simplex.
        degeneracy: degeneracy(n, j, x) is s_j of an n-simplex.
        label: Cell name for a nondegenerate n-simplex.
        closed: Drop elements with missing faces instead of failing.

    Returns:
        The simplicial set and, per dimension, the normal form of every kept element.

    Raises:
        MalformedSpec: If a face is missing and closed is False.
    """
    cells: dict[int, list[str]] = {}
    faces: dict[str, list[SimplexRef]] = {}
    tables: list[dict[K, SimplexRef]] = []
    dropped = 0
    for n in range(max_dim + 1):
        table: dict[K, SimplexRef] = {}
        for element in sorted(elements(n)):  # type: ignore[type-var]
            face_keys = [face(n, i, element) for i in range(n + 1)] if n else []
            if n and any(key not in tables[n - 1] for key in face_keys):
                if not closed:
                    raise MalformedSpec(f"A face of an {n}-simplex of {name} is not enumerated")
                dropped += 1
                continue
            ref: SimplexRef | None = None
            for j in range(n):
                if degeneracy(n - 1, j, face_keys[j]) == element:
                    ref = tables[n - 1][face_keys[j]].degeneracy(j)
                    break
            if ref is None:
                cell = label(n, element)
                cells.setdefault(n, []).append(cell)
                if n:
                    faces[cell] = [tables[n - 1][key] for key in face_keys]
                ref = SimplexRef(n, cell)
            table[element] = ref
        tables.append(table)
    if dropped:
        _LOGGER.warning("%s: dropped %d simplices with faces beyond the enumeration", name, dropped)
    return SSet.build(name, cells, faces, truncated=closed), tables
