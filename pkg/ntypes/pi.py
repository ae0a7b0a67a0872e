"""Homotopy invariants at desk scale.

Components come from the edge graph, fundamental groups from edge-path
presentations with a breadth-first spanning tree, and group comparison from a
fixed ladder of invariants computed with sympy. Verdicts are three-valued:
an inconclusive comparison is reported as unknown, never guessed.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Sequence
from dataclasses import dataclass
from dataclasses import field
from typing import Any

import networkx as nx
from sympy import Matrix
from sympy import ZZ
from sympy.combinatorics import CyclicGroup
from sympy.combinatorics import SymmetricGroup
from sympy.combinatorics.fp_groups import FpGroup
from sympy.combinatorics.fp_groups import simplify_presentation
from sympy.combinatorics.free_groups import free_group
from sympy.combinatorics.homomorphisms import group_isomorphism
from sympy.matrices.normalforms import invariant_factors

from .config import Budget
from .config import resolve
from .const import COMPARE_ISOMORPHIC
from .const import COMPARE_NOT_ISOMORPHIC
from .const import HOM_COUNT_MAX_GENERATORS
from .const import ISOMORPHISM_ORDER_LIMIT
from .const import VERDICT_CERTIFIED
from .const import VERDICT_REFUTED
from .const import VERDICT_UNKNOWN
from .exceptions import NotFibrant
from .exceptions import PreconditionFailed
from .exceptions import SearchBudgetExceeded
from .exceptions import VertexNotFound
from .formats import format_presentation_text
from .formats import parse_presentation_text
from .kan import LiftProblem
from .kan import is_fibration
from .kan import is_kan
from .kan import solve_lift
from .scomplex import SimplexRef
from .scomplex import SMap
from .scomplex import SSet
from .scomplex import degenerate_vertex
from .scomplex import fiber
from .scomplex import horn
from .scomplex import inclusion
from .scomplex import standard

_LOGGER = logging.getLogger(__name__)

Word = tuple[tuple[str, int], ...]


def reduce_word(word: Sequence[tuple[str, int]]) -> Word:
    """Cancel adjacent inverse letters."""
    stack: list[tuple[str, int]] = []
    for name, sign in word:
        if stack and stack[-1] == (name, -sign):
            stack.pop()
        else:
            stack.append((name, sign))
    return tuple(stack)


def invert(word: Sequence[tuple[str, int]]) -> Word:
    """Return the inverse word."""
    return tuple((name, -sign) for name, sign in reversed(word))


@dataclass(frozen=True)
class GroupPresentation:
    """A finite group presentation at a basepoint."""

    generators: tuple[str, ...]
    relators: tuple[Word, ...] = ()
    basepoint: str = ""

    @classmethod
    def from_text(cls, text: str, basepoint: str = "") -> GroupPresentation:
        """Parse ``gens: a b; rels: a a, a b A B;``."""
        generators, relators = parse_presentation_text(text)
        return cls(
            tuple(generators),
            tuple(w for w in (reduce_word(r) for r in relators) if w),
            basepoint,
        )

    def to_text(self) -> str:
        """Render the presentation in its text form."""
        return format_presentation_text(list(self.generators), [list(r) for r in self.relators])

    @property
    def rank(self) -> int:
        """Return the number of generators."""
        return len(self.generators)

    @property
    def is_free(self) -> bool:
        """Return True if there are no relators."""
        return not self.relators

    def to_fp_group(self) -> FpGroup:
        """Return the sympy group on renamed generators x0, x1, ..."""
        if not self.generators:
            raise PreconditionFailed("A presentation without generators has no sympy group")
        free, *gens = free_group([f"x{k}" for k in range(self.rank)])
        index = {name: k for k, name in enumerate(self.generators)}
        relators = []
        for word in self.relators:
            element = free.identity
            for name, sign in word:
                element = element * gens[index[name]] ** sign
            relators.append(element)
        return FpGroup(free, relators)

    def simplified(self) -> GroupPresentation:
        """Return an isomorphic presentation with redundant generators removed."""
        if not self.generators:
            return self
        group = self.to_fp_group()
        gens, rels = simplify_presentation(
            list(group.generators), list(group.relators), change_gens=True
        )
        names = [str(g.array_form[0][0]) for g in gens]
        relators = []
        for rel in rels:
            word = [
                (str(sym), 1 if exp > 0 else -1)
                for sym, exp in rel.array_form
                for _ in range(abs(exp))
            ]
            if word:
                relators.append(reduce_word(word))
        return GroupPresentation(tuple(names), tuple(r for r in relators if r), self.basepoint)

    def to_dict(self) -> dict[str, Any]:
        """Return the presentation as a report record."""
        return {"basepoint": self.basepoint, "presentation": self.to_text()}


@dataclass(frozen=True)
class GroupoidPresentation:
    """Objects, generating arrows and relators of a presented groupoid."""

    objects: tuple[str, ...]
    generators: dict[str, tuple[str, str]]
    relators: tuple[Word, ...]


@dataclass(frozen=True)
class CompareVerdict:
    """Outcome of a group comparison: isomorphic, not isomorphic or unknown."""

    verdict: str
    evidence: dict[str, Any] = field(default_factory=dict)

    @property
    def is_isomorphic(self) -> bool:
        """Return True if an isomorphism was certified."""
        return self.verdict == COMPARE_ISOMORPHIC

    @property
    def is_not_isomorphic(self) -> bool:
        """Return True if a separating invariant was found."""
        return self.verdict == COMPARE_NOT_ISOMORPHIC

    def to_dict(self) -> dict[str, Any]:
        """Return the verdict as a report record."""
        return {"verdict": self.verdict, "evidence": self.evidence}


@dataclass(frozen=True)
class EquivalenceVerdict:
    """Outcome of a bounded weak-equivalence test."""

    verdict: str
    evidence: dict[str, Any] = field(default_factory=dict)

    @property
    def is_certified(self) -> bool:
        """Return True if every computed invariant agrees."""
        return self.verdict == VERDICT_CERTIFIED

    @property
    def is_refuted(self) -> bool:
        """Return True if some invariant separates source and target."""
        return self.verdict == VERDICT_REFUTED

    def to_dict(self) -> dict[str, Any]:
        """Return the verdict as a report record."""
        return {"verdict": self.verdict, "evidence": self.evidence}


def _edge_graph(sset: SSet) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from(sset.nondegenerate(0))
    for cell in sset.nondegenerate(1):
        d0, d1 = sset.faces[cell]
        graph.add_edge(d1.base, d0.base)
    return graph


def pi0(sset: SSet) -> list[list[str]]:
    """Return the connected components as sorted vertex lists, sorted by least vertex."""
    return sorted(sorted(c) for c in nx.connected_components(_edge_graph(sset)))


def component_index(sset: SSet) -> dict[str, int]:
    """Map every vertex to the index of its component in pi0."""
    return {v: k for k, comp in enumerate(pi0(sset)) for v in comp}


def fundamental_groupoid(sset: SSet) -> GroupoidPresentation:
    """Return the edge-path presentation of the fundamental groupoid.

    Generators are the nondegenerate edges v0 -> v1; every nondegenerate
    2-cell gives the relator d2 d0 d1^-1 in path order, with degenerate edges
    read as identities.
    """
    generators = {}
    for cell in sset.nondegenerate(1):
        d0, d1 = sset.faces[cell]
        generators[cell] = (d1.base, d0.base)
    relators = []
    for cell in sset.nondegenerate(2):
        d0, d1, d2 = sset.faces[cell]
        word = reduce_word(_letter(d2) + _letter(d0) + invert(_letter(d1)))
        if word:
            relators.append(word)
    return GroupoidPresentation(sset.nondegenerate(0), generators, tuple(relators))


def _letter(ref: SimplexRef) -> Word:
    if ref.is_degenerate:
        return ()
    return ((ref.base, 1),)


def vertex_group(groupoid: GroupoidPresentation, vertex: str) -> GroupPresentation:
    """Return the vertex group of a presented groupoid at one of its objects.

    The spanning tree is grown breadth first from the object, visiting
    neighbours in sorted order and using the least-named generator between
    two objects. Tree generators become identities.

    Raises:
        VertexNotFound: If vertex is not an object of the groupoid.
    """
    if vertex not in groupoid.objects:
        raise VertexNotFound(f"{vertex!r} is not an object of the groupoid")
    graph = nx.Graph()
    graph.add_nodes_from(groupoid.objects)
    graph.add_edges_from(groupoid.generators.values())
    component = nx.node_connected_component(graph, vertex)
    edges = {e: ends for e, ends in groupoid.generators.items() if ends[0] in component}
    least: dict[frozenset[str], str] = {}
    for name in sorted(edges):
        source, target = edges[name]
        if source != target:
            least.setdefault(frozenset((source, target)), name)
    tree = {least[frozenset((u, v))] for u, v in nx.bfs_edges(graph, vertex, sort_neighbors=sorted)}
    relators = []
    for word in groupoid.relators:
        if word[0][0] not in edges:
            continue
        reduced = reduce_word([letter for letter in word if letter[0] not in tree])
        if reduced:
            relators.append(reduced)
    generators = tuple(sorted(e for e in edges if e not in tree))
    return GroupPresentation(generators, tuple(relators), vertex)


def pi1(sset: SSet, vertex: str) -> GroupPresentation:
    """Return the edge-path group of the component of a vertex.

    Raises:
        VertexNotFound: If vertex is not a vertex of sset.
    """
    if vertex not in sset.nondegenerate(0):
        raise VertexNotFound(f"{vertex!r} is not a vertex of {sset.name}")
    return vertex_group(fundamental_groupoid(sset), vertex)


def pi1_table(sset: SSet) -> dict[str, GroupPresentation]:
    """Return the fundamental group at every vertex."""
    return {v: pi1(sset, v) for v in sset.nondegenerate(0)}


def abelian_invariants(presentation: GroupPresentation) -> list[int]:
    """Return the abelianization as sorted invariants, 0 standing for a copy of Z."""
    rank = presentation.rank
    if not presentation.relators:
        return [0] * rank
    index = {name: k for k, name in enumerate(presentation.generators)}
    rows = []
    for word in presentation.relators:
        row = [0] * rank
        for name, sign in word:
            row[index[name]] += sign
        rows.append(row)
    factors = [abs(int(f)) for f in invariant_factors(Matrix(rows), domain=ZZ)]
    nonzero = [f for f in factors if f != 0]
    torsion = sorted(f for f in nonzero if f != 1)
    return [0] * (rank - len(nonzero)) + torsion


def _order(presentation: GroupPresentation, limit: int) -> int | None:
    """Return the group order by coset enumeration, or None when it does not close."""
    if not presentation.generators:
        return 1
    if 0 in abelian_invariants(presentation):
        return None
    try:
        table = presentation.to_fp_group().coset_enumeration([], max_cosets=limit)
    except ValueError as err:
        _LOGGER.debug("Coset enumeration stopped: %s", err)
        return None
    if not table.is_complete():
        return None
    return len(table.table)


def group_order(presentation: GroupPresentation, budget: Budget | None = None) -> int | None:
    """Return the order of a finite presented group, or None if not determined."""
    return _order(presentation.simplified(), resolve(budget).coset_limit)


def _catalog(hom_order: int) -> list[tuple[str, Any]]:
    groups: list[tuple[str, Any]] = [(f"C{k}", CyclicGroup(k)) for k in range(2, hom_order + 1)]
    groups.append(("S3", SymmetricGroup(3)))
    return groups


def hom_count(presentation: GroupPresentation, target: Any) -> int:
    """Count homomorphisms from a presented group into a permutation group."""
    elements = list(target.elements)
    identity = target.identity
    index = {name: k for k, name in enumerate(presentation.generators)}
    count = 0
    for images in itertools.product(elements, repeat=presentation.rank):
        relations = (_evaluate(word, images, index, identity) for word in presentation.relators)
        if all(value == identity for value in relations):
            count += 1
    return count


def _evaluate(word: Word, images: Sequence[Any], index: dict[str, int], identity: Any) -> Any:
    value = identity
    for name, sign in word:
        image = images[index[name]]
        value = value * (image if sign > 0 else image**-1)
    return value


def compare_groups(
    first: GroupPresentation, second: GroupPresentation, budget: Budget | None = None
) -> CompareVerdict:
    """Compare two presented groups.

    The ladder is: free ranks, abelianization, cyclic shortcut, orders by
    bounded coset enumeration, homomorphism counts into small groups, and an
    isomorphism search for small finite groups.

    Returns:
        Isomorphic with evidence, NotIsomorphic with a separating invariant,
        or Unknown.
    """
    limits = resolve(budget)
    left, right = first.simplified(), second.simplified()
    if left.is_free and right.is_free:
        if left.rank == right.rank:
            return CompareVerdict(COMPARE_ISOMORPHIC, {"reason": "free", "rank": left.rank})
        return CompareVerdict(
            COMPARE_NOT_ISOMORPHIC,
            {"invariant": "abelianization", "left": [0] * left.rank, "right": [0] * right.rank},
        )
    left_ab, right_ab = abelian_invariants(left), abelian_invariants(right)
    if left_ab != right_ab:
        return CompareVerdict(
            COMPARE_NOT_ISOMORPHIC,
            {"invariant": "abelianization", "left": left_ab, "right": right_ab},
        )
    if left.rank <= 1 and right.rank <= 1:
        return CompareVerdict(COMPARE_ISOMORPHIC, {"reason": "cyclic", "abelianization": left_ab})
    left_order = _order(left, limits.coset_limit)
    right_order = _order(right, limits.coset_limit)
    if left_order is not None and right_order is not None and left_order != right_order:
        return CompareVerdict(
            COMPARE_NOT_ISOMORPHIC,
            {"invariant": "order", "left": left_order, "right": right_order},
        )
    if max(left.rank, right.rank) <= HOM_COUNT_MAX_GENERATORS:
        for name, target in _catalog(limits.hom_order):
            counts = hom_count(left, target), hom_count(right, target)
            if counts[0] != counts[1]:
                return CompareVerdict(
                    COMPARE_NOT_ISOMORPHIC,
                    {"invariant": "hom_count", "into": name, "left": counts[0], "right": counts[1]},
                )
    if left_order is not None and left_order == right_order:
        if left_order <= ISOMORPHISM_ORDER_LIMIT:
            if group_isomorphism(left.to_fp_group(), right.to_fp_group(), isomorphism=False):
                return CompareVerdict(
                    COMPARE_ISOMORPHIC, {"reason": "isomorphism", "order": left_order}
                )
            return CompareVerdict(
                COMPARE_NOT_ISOMORPHIC, {"invariant": "isomorphism_search", "order": left_order}
            )
    _LOGGER.warning(
        "Group comparison inconclusive for %s and %s", first.to_text(), second.to_text()
    )
    return CompareVerdict(VERDICT_UNKNOWN, {"reason": "budget", "abelianization": left_ab})


@dataclass(frozen=True)
class HomotopyClasses:
    """Classes of based n-spheres with their multiplication table."""

    n: int
    basepoint: str
    classes: tuple[tuple[SimplexRef, ...], ...]
    identity: int
    table: dict[tuple[int, int], int] = field(default_factory=dict)
    pi1_order: int | None = None

    @property
    def count(self) -> int:
        """Return the number of classes."""
        return len(self.classes)

    def to_presentation(self) -> GroupPresentation:
        """Return the group presented by its multiplication table."""
        names = [f"c{k}" for k in range(self.count)]
        relators: list[Word] = [((names[self.identity], 1),)]
        for (a, b), c in sorted(self.table.items()):
            relators.append(reduce_word([(names[a], 1), (names[b], 1), (names[c], -1)]))
        return GroupPresentation(tuple(names), tuple(r for r in relators if r), self.basepoint)

    def to_dict(self) -> dict[str, Any]:
        """Return the classes as a report record."""
        return {
            "n": self.n,
            "basepoint": self.basepoint,
            "count": self.count,
            "classes": [[str(ref) for ref in c] for c in self.classes],
            "pi1_order": self.pi1_order,
        }


def _spheres(sset: SSet, vertex: str, n: int) -> list[SimplexRef]:
    if n == 0:
        return sset.simplices(0)
    base = degenerate_vertex(vertex, n - 1)
    return sset.boundary_index(n).get((base,) * (n + 1), [])


def pi_n_classes(
    sset: SSet, vertex: str, n: int, budget: Budget | None = None
) -> HomotopyClasses:
    """Return pi_n(sset, vertex) as classes of based spheres.

    Spheres are n-simplices whose faces are all the degenerate basepoint; two
    spheres are identified when an (n+1)-simplex has them as its last two
    faces and the basepoint elsewhere.

    Raises:
        VertexNotFound: If vertex is not a vertex of sset.
        NotFibrant: If sset is not certified Kan up to dimension n + 1.
    """
    if vertex not in sset.nondegenerate(0):
        raise VertexNotFound(f"{vertex!r} is not a vertex of {sset.name}")
    certificate = is_kan(sset, n + 1, budget)
    if not certificate.is_certified:
        raise NotFibrant(
            f"{sset.name} is not certified Kan up to dimension {n + 1}", witness=certificate.witness
        )
    spheres = _spheres(sset, vertex, n)
    sphere_set = set(spheres)
    graph = nx.Graph()
    graph.add_nodes_from(spheres)
    base = degenerate_vertex(vertex, n)
    for omega in sset.simplices(n + 1):
        faces = sset.boundary(omega)
        if faces[n] in sphere_set and faces[n + 1] in sphere_set and all(
            face == base for face in faces[:n]
        ):
            graph.add_edge(faces[n], faces[n + 1])
    components = sorted(sorted(c) for c in nx.connected_components(graph))
    member = {ref: k for k, comp in enumerate(components) for ref in comp}
    table: dict[tuple[int, int], int] = {}
    if n >= 1:
        for omega in sset.simplices(n + 1):
            faces = sset.boundary(omega)
            if (
                faces[n - 1] in sphere_set
                and faces[n + 1] in sphere_set
                and faces[n] in sphere_set
                and all(face == base for face in faces[: n - 1])
            ):
                table.setdefault((member[faces[n - 1]], member[faces[n + 1]]), member[faces[n]])
    identity = member.get(base if n else SimplexRef(0, vertex), 0)
    order = None
    if n == 1:
        order = group_order(pi1(sset, vertex), budget)
        if order is not None and order != len(components):
            _LOGGER.warning(
                "%s: %d loop classes but pi1 has order %d", sset.name, len(components), order
            )
    return HomotopyClasses(
        n,
        vertex,
        tuple(tuple(comp) for comp in components),
        identity,
        table,
        order,
    )


def weak_equivalence_check(
    f: SMap, max_s: int = 1, budget: Budget | None = None
) -> EquivalenceVerdict:
    """Test whether f looks like a weak equivalence in low degrees.

    Checks that f is a bijection on components, that the fundamental groups
    at a vertex of every component compare isomorphic, and, for
    2 <= s <= max_s, that pi_s class counts agree where both sides are
    certified Kan.
    """
    source_components = pi0(f.source)
    target_index = component_index(f.target)
    image = [target_index[f.assignment[comp[0]].base] for comp in source_components]
    evidence: dict[str, Any] = {
        "pi0": {"source": len(source_components), "target": len(set(target_index.values()))}
    }
    if len(set(image)) != len(image) or len(image) != len(set(target_index.values())):
        evidence["invariant"] = "pi0"
        return EquivalenceVerdict(VERDICT_REFUTED, evidence)
    unknown = False
    groups: dict[str, Any] = {}
    for comp in source_components:
        x = comp[0]
        y = f.assignment[x].base
        verdict = compare_groups(pi1(f.source, x), pi1(f.target, y), budget)
        groups[x] = verdict.to_dict()
        if verdict.is_not_isomorphic:
            evidence["pi1"] = groups
            evidence["invariant"] = "pi1"
            return EquivalenceVerdict(VERDICT_REFUTED, evidence)
        unknown = unknown or not verdict.is_isomorphic
    evidence["pi1"] = groups
    for s in range(2, max_s + 1):
        for comp in source_components:
            x = comp[0]
            try:
                counts = (
                    pi_n_classes(f.source, x, s, budget).count,
                    pi_n_classes(f.target, f.assignment[x].base, s, budget).count,
                )
            except (NotFibrant, SearchBudgetExceeded) as err:
                _LOGGER.debug("pi_%d not available at %s: %s", s, x, err)
                unknown = True
                continue
            evidence.setdefault("pi_n", {})[f"{s}:{x}"] = list(counts)
            if counts[0] != counts[1]:
                evidence["invariant"] = f"pi{s}"
                return EquivalenceVerdict(VERDICT_REFUTED, evidence)
    return EquivalenceVerdict(VERDICT_UNKNOWN if unknown else VERDICT_CERTIFIED, evidence)


@dataclass(frozen=True)
class ExactnessReport:
    """Low-degree exactness of the fibre sequence at a basepoint."""

    basepoint: str
    fiber_components: int
    boundary_image: tuple[int, ...]
    exact_at_fiber: bool
    exact_at_source: bool
    exact_at_base_pi1: bool | None

    @property
    def exact(self) -> bool:
        """Return True if every checked position is exact."""
        return self.exact_at_fiber and self.exact_at_source and self.exact_at_base_pi1 is not False

    def to_dict(self) -> dict[str, Any]:
        """Return the report as a record."""
        return {
            "basepoint": self.basepoint,
            "fiber_components": self.fiber_components,
            "boundary_image": list(self.boundary_image),
            "exact_at_fiber": self.exact_at_fiber,
            "exact_at_source": self.exact_at_source,
            "exact_at_base_pi1": self.exact_at_base_pi1,
        }


def fiber_exactness_check(
    f: SMap, vertex: str, up_to_dim: int = 2, budget: Budget | None = None
) -> ExactnessReport:
    """Check exactness of pi1 Y -> pi0 F -> pi0 X -> pi0 Y at a vertex of X.

    Raises:
        VertexNotFound: If vertex is not a vertex of the source.
        PreconditionFailed: If f is not a certified fibration between Kan objects.
    """
    source, target = f.source, f.target
    if vertex not in source.nondegenerate(0):
        raise VertexNotFound(f"{vertex!r} is not a vertex of {source.name}")
    checks = (
        is_fibration(f, up_to_dim, budget),
        is_kan(source, up_to_dim, budget),
        is_kan(target, up_to_dim, budget),
    )
    for check in checks:
        if not check.is_certified:
            raise PreconditionFailed(
                f"Exactness needs a Kan fibration; {check.subject} is {check.verdict}"
            )
    base = f.assignment[vertex].base
    fib = fiber(f, base)
    fiber_comps = pi0(fib)
    fiber_index = {v: k for k, comp in enumerate(fiber_comps) for v in comp}
    source_index = component_index(source)
    target_index = component_index(target)
    home = fiber_index[vertex]

    start = inclusion(horn(1, 0), standard(1))
    top = SMap(start.source, source, {"0": SimplexRef(0, vertex)})
    ends = {"0": SimplexRef(0, base), "1": SimplexRef(0, base)}

    def boundary_of(loop: SimplexRef) -> int:
        bottom = SMap(standard(1), target, {**ends, "01": loop})
        lift = solve_lift(LiftProblem(start, f, top, bottom), budget)
        if lift is None:
            raise PreconditionFailed(f"No lift of the loop {loop} although f is a fibration")
        return fiber_index[lift.assignment["1"].base]

    loops = _spheres(target, base, 1)
    image = {loop: boundary_of(loop) for loop in loops}
    boundary_image = tuple(sorted(set(image.values())))
    kernel_fiber = {
        k for k, comp in enumerate(fiber_comps) if source_index[comp[0]] == source_index[vertex]
    }
    hit = {source_index[v] for v in fib.nondegenerate(0)}
    over_base = {
        source_index[v]
        for v in source.nondegenerate(0)
        if target_index[f.assignment[v].base] == target_index[base]
    }
    exact_at_pi1: bool | None = None
    try:
        source_loops = pi_n_classes(source, vertex, 1, budget)
        target_loops = pi_n_classes(target, base, 1, budget)
    except (NotFibrant, SearchBudgetExceeded) as err:
        _LOGGER.debug("Skipping exactness at pi1: %s", err)
    else:
        member = {ref: k for k, comp in enumerate(target_loops.classes) for ref in comp}
        pushed = {member[f(comp[0])] for comp in source_loops.classes}
        kernel = {member[loop] for loop in loops if image[loop] == home}
        exact_at_pi1 = pushed == kernel
    return ExactnessReport(
        vertex,
        len(fiber_comps),
        boundary_image,
        set(boundary_image) == kernel_fiber,
        hit == over_base,
        exact_at_pi1,
    )
