"""Horn filling, lifting problems, Kan certificates and the subdivision/Ex pair."""

from __future__ import annotations

import itertools
import logging
from collections.abc import Mapping
from dataclasses import dataclass
from dataclasses import field
from functools import lru_cache
from typing import Any

from .config import Budget
from .config import resolve
from .const import VERDICT_CERTIFIED
from .const import VERDICT_REFUTED
from .const import VERDICT_UNKNOWN
from .exceptions import MalformedSpec
from .exceptions import PreconditionFailed
from .exceptions import SearchBudgetExceeded
from .scomplex import SimplexRef
from .scomplex import SMap
from .scomplex import SSet
from .scomplex import codegeneracy
from .scomplex import coface
from .scomplex import compose
from .scomplex import from_simplicial_object
from .scomplex import horn
from .scomplex import identity_map
from .scomplex import inclusion
from .scomplex import is_injective
from .scomplex import iter_homs
from .scomplex import parse_ref
from .scomplex import skeleton
from .scomplex import standard
from .scomplex import word_of

_LOGGER = logging.getLogger(__name__)

ExKey = tuple[tuple[str, SimplexRef], ...]


@dataclass(frozen=True)
class LiftProblem:
    """A commuting square top: A -> X, bottom: B -> Y over i: A -> B and f: X -> Y."""

    i: SMap
    f: SMap
    top: SMap
    bottom: SMap

    def validate(self) -> LiftProblem:
        """Check shapes, injectivity of i and commutativity of the square.

        Raises:
            MalformedSpec: If the maps do not form a square.
            PreconditionFailed: If i is not injective or the square does not commute.
        """
        if self.top.source != self.i.source or self.bottom.source != self.i.target:
            raise MalformedSpec("Lift problem: top and bottom must start at the ends of i")
        if self.top.target != self.f.source or self.bottom.target != self.f.target:
            raise MalformedSpec("Lift problem: top and bottom must end at the ends of f")
        if not is_injective(self.i):
            raise PreconditionFailed("Lift problem: i must be injective on nondegenerate cells")
        for d, cell in self.i.source.all_cells():
            ref = SimplexRef(d, cell)
            if self.f(self.top(ref)) != self.bottom(self.i(ref)):
                raise PreconditionFailed(f"Lift problem square does not commute at {cell!r}")
        return self


@dataclass(frozen=True)
class KanCertificate:
    """Outcome of a bounded fibrancy check."""

    subject: str
    checked_dim: int
    verdict: str
    witness: dict[str, Any] | None = None
    detail: str = ""

    @classmethod
    def certified(cls, subject: str, checked_dim: int, detail: str = "") -> KanCertificate:
        """Return a Certified verdict."""
        return cls(subject, checked_dim, VERDICT_CERTIFIED, None, detail)

    @classmethod
    def refuted(
        cls, subject: str, checked_dim: int, witness: dict[str, Any], detail: str = ""
    ) -> KanCertificate:
        """Return a Refuted verdict carrying its witness."""
        return cls(subject, checked_dim, VERDICT_REFUTED, witness, detail)

    @classmethod
    def unknown(cls, subject: str, checked_dim: int, detail: str) -> KanCertificate:
        """Return an Unknown verdict."""
        return cls(subject, checked_dim, VERDICT_UNKNOWN, None, detail)

    @property
    def is_certified(self) -> bool:
        """Return True for a Certified verdict."""
        return self.verdict == VERDICT_CERTIFIED

    @property
    def is_refuted(self) -> bool:
        """Return True for a Refuted verdict."""
        return self.verdict == VERDICT_REFUTED

    def to_dict(self) -> dict[str, Any]:
        """Return the certificate as a report record."""
        record: dict[str, Any] = {
            "subject": self.subject,
            "checked_dim": self.checked_dim,
            "verdict": self.verdict,
        }
        if self.witness is not None:
            record["witness"] = self.witness
        if self.detail:
            record["detail"] = self.detail
        return record


def solve_lift(problem: LiftProblem, budget: Budget | None = None) -> SMap | None:
    """Return the lexicographically least lift of a square, or None.

    Raises:
        SearchBudgetExceeded: If the search runs out of nodes.
    """
    fixed = {
        problem.i.assignment[cell].base: problem.top.assignment[cell]
        for _, cell in problem.i.source.all_cells()
    }
    homs = iter_homs(
        problem.i.target,
        problem.f.source,
        fixed=fixed,
        over=(problem.f, problem.bottom),
        budget=budget,
    )
    return next(homs, None)


def _horn_inclusion(n: int, k: int) -> SMap:
    return inclusion(horn(n, k), standard(n))


def _fillers(sset: SSet, horn_map: SMap, n: int, budget: Budget | None) -> SMap | None:
    fixed = dict(horn_map.assignment)
    return next(iter_homs(standard(n), sset, fixed=fixed, budget=budget), None)


def is_kan(sset: SSet, up_to_dim: int, budget: Budget | None = None) -> KanCertificate:
    """Check that every horn of dimension at most up_to_dim has a filler.

    Args:
        sset: Simplicial set to check.
        up_to_dim: Largest horn dimension.
        budget: Search budget; exhaustion yields an Unknown verdict.

    Returns:
        Certified, Refuted with an unfillable horn, or Unknown.

    Raises:
        PreconditionFailed: If up_to_dim < 1 or sset is empty.
    """
    if up_to_dim < 1:
        raise PreconditionFailed("is_kan needs up_to_dim >= 1")
    if sset.is_empty():
        raise PreconditionFailed("Horn filling needs a non-empty target")
    try:
        for n in range(1, up_to_dim + 1):
            for k in range(n + 1):
                for horn_map in iter_homs(horn(n, k), sset, budget=budget):
                    if _fillers(sset, horn_map, n, budget) is None:
                        witness = {"n": n, "k": k, "horn": horn_map.to_dict()}
                        _LOGGER.info("%s: horn Lambda[%d,%d] has no filler", sset.name, n, k)
                        return KanCertificate.refuted(sset.name, up_to_dim, witness)
    except SearchBudgetExceeded as err:
        _LOGGER.warning("%s: Kan check stopped: %s", sset.name, err)
        return KanCertificate.unknown(sset.name, up_to_dim, str(err))
    return KanCertificate.certified(sset.name, up_to_dim)


def witness_holds(sset: SSet, witness: Mapping[str, Any], budget: Budget | None = None) -> bool:
    """Re-check that a horn witness of is_kan really has no filler.

    Raises:
        MalformedSpec: If the witness does not describe a horn of sset.
    """
    n, k = int(witness["n"]), int(witness["k"])
    source = horn(n, k)
    assignment = {
        cell: parse_ref(text, source.dim_of(cell)) for cell, text in witness["horn"].items()
    }
    horn_map = SMap(source, sset, assignment).validate()
    return _fillers(sset, horn_map, n, budget) is None


def is_fibration(f: SMap, up_to_dim: int, budget: Budget | None = None) -> KanCertificate:
    """Check the right lifting property of f against horn inclusions up to up_to_dim.

    Returns:
        Certified, Refuted with the failing square, or Unknown.

    Raises:
        PreconditionFailed: If up_to_dim < 1.
    """
    if up_to_dim < 1:
        raise PreconditionFailed("is_fibration needs up_to_dim >= 1")
    subject = f"{f.source.name}->{f.target.name}"
    try:
        for n in range(1, up_to_dim + 1):
            for k in range(n + 1):
                i = _horn_inclusion(n, k)
                for bottom in iter_homs(standard(n), f.target, budget=budget):
                    restricted = compose(bottom, i)
                    for top in iter_homs(i.source, f.source, over=(f, restricted), budget=budget):
                        if solve_lift(LiftProblem(i, f, top, bottom), budget) is None:
                            witness = {
                                "n": n,
                                "k": k,
                                "top": top.to_dict(),
                                "bottom": bottom.to_dict(),
                            }
                            return KanCertificate.refuted(subject, up_to_dim, witness)
    except SearchBudgetExceeded as err:
        _LOGGER.warning("%s: fibration check stopped: %s", subject, err)
        return KanCertificate.unknown(subject, up_to_dim, str(err))
    return KanCertificate.certified(subject, up_to_dim)


def _chain_name(chain: tuple[tuple[int, ...], ...], n: int) -> str:
    separator = "" if n < 10 else "-"
    return "<".join(separator.join(str(v) for v in subset) for subset in chain)


def _chain_ref(chain: list[tuple[int, ...]], n: int) -> SimplexRef:
    """Normal form of a possibly repeating chain of subsets."""
    distinct: list[tuple[int, ...]] = []
    for subset in chain:
        if not distinct or distinct[-1] != subset:
            distinct.append(subset)
    rho = [distinct.index(subset) for subset in chain]
    return SimplexRef(len(chain) - 1, _chain_name(tuple(distinct), n), word_of(rho))


@lru_cache(maxsize=None)
def subdivided_simplex(n: int) -> SSet:
    """Return sd(Delta^n), the nerve of the poset of nonempty subsets of [n]."""
    subsets = [
        subset for size in range(1, n + 2) for subset in itertools.combinations(range(n + 1), size)
    ]
    cells: dict[int, list[str]] = {}
    faces: dict[str, list[SimplexRef]] = {}
    frontier: list[tuple[tuple[int, ...], ...]] = [(subset,) for subset in subsets]
    k = 0
    while frontier:
        for chain in frontier:
            name = _chain_name(chain, n)
            cells.setdefault(k, []).append(name)
            if k:
                faces[name] = [
                    SimplexRef(k - 1, _chain_name(chain[:i] + chain[i + 1 :], n))
                    for i in range(k + 1)
                ]
        frontier = [
            chain + (subset,)
            for chain in frontier
            for subset in subsets
            if len(subset) > len(chain[-1]) and set(chain[-1]) < set(subset)
        ]
        k += 1
    return SSet.build(f"sd(Delta[{n}])", cells, faces)


def _parse_chain(name: str, n: int) -> list[tuple[int, ...]]:
    parts = name.split("<")
    if n < 10:
        return [tuple(int(v) for v in part) for part in parts]
    return [tuple(int(v) for v in part.split("-")) for part in parts]


@lru_cache(maxsize=None)
def subdivided_map(alpha: tuple[int, ...], n: int) -> SMap:
    """Return sd of the order-preserving map alpha: [m] -> [n]."""
    m = len(alpha) - 1
    source = subdivided_simplex(m)
    assignment = {
        cell: _chain_ref(
            [tuple(sorted({alpha[v] for v in subset})) for subset in _parse_chain(cell, m)], n
        )
        for _, cell in source.all_cells()
    }
    return SMap(source, subdivided_simplex(n), assignment)


def last_vertex_map(n: int) -> SMap:
    """Return the last-vertex map sd(Delta^n) -> Delta^n."""
    source = subdivided_simplex(n)
    target = standard(n)
    top = SimplexRef(n, target.nondegenerate(n)[0])
    assignment = {
        cell: target.apply(top, [max(subset) for subset in _parse_chain(cell, n)])
        for _, cell in source.all_cells()
    }
    return SMap(source, target, assignment)


def sd(sset: SSet) -> SSet:
    """Return the barycentric subdivision of sset.

    A nondegenerate k-cell is a nondegenerate cell x together with a strict
    chain of k + 1 subsets of its vertex set ending at the full set.
    """
    cells: dict[int, list[str]] = {}
    faces: dict[str, list[SimplexRef]] = {}

    def name_of(cell: str, chain: tuple[tuple[int, ...], ...]) -> str:
        return f"{cell}/{_chain_name(chain, sset.dim_of(cell))}"

    for d, cell in sset.all_cells():
        for chain in _interior_chains(d):
            k = len(chain) - 1
            name = name_of(cell, chain)
            cells.setdefault(k, []).append(name)
            if not k:
                continue
            refs = [SimplexRef(k - 1, name_of(cell, chain[:i] + chain[i + 1 :])) for i in range(k)]
            # the last face leaves the interior of cell and lands in a face of it
            lower = sset.apply(SimplexRef(d, cell), chain[-2])
            theta = lower.surjection
            position = {v: p for p, v in enumerate(chain[-2])}
            image = [tuple(sorted({theta[position[v]] for v in s})) for s in chain[:-1]]
            last = _chain_ref(image, lower.base_dim)
            refs.append(SimplexRef(k - 1, f"{lower.base}/{last.base}", last.degeneracies))
            faces[name] = refs
    return SSet.build(f"sd({sset.name})", cells, faces)


def _interior_chains(d: int) -> list[tuple[tuple[int, ...], ...]]:
    """Strict chains of nonempty subsets of [d] ending at [d]."""
    found: list[tuple[tuple[int, ...], ...]] = []

    def grow(chain: tuple[tuple[int, ...], ...]) -> None:
        found.append(chain)
        head = chain[0]
        for size in range(1, len(head)):
            for subset in itertools.combinations(head, size):
                grow((subset,) + chain)

    grow((tuple(range(d + 1)),))
    return found


def _ex_key(assignment: Mapping[str, SimplexRef]) -> ExKey:
    return tuple(sorted(assignment.items()))


def _precompose(key: ExKey, along: SMap) -> ExKey:
    h = dict(key)
    return _ex_key(
        {
            cell: h[ref.base].degenerate_by(ref.surjection)
            for cell, ref in along.assignment.items()
        }
    )


@dataclass(frozen=True)
class ExResult:
    """Ex(X) up to a dimension with its coaugmentation and element tables."""

    obj: SSet
    coaugmentation: SMap
    tables: list[dict[ExKey, SimplexRef]] = field(repr=False)


def _ex(sset: SSet, max_dim: int, budget: Budget | None) -> ExResult:
    resolve(budget).check_dim(max_dim)
    counters: dict[int, int] = {}

    def elements(n: int) -> list[ExKey]:
        return [
            _ex_key(h.assignment)
            for h in iter_homs(subdivided_simplex(n), sset, budget=budget)
        ]

    def face(n: int, i: int, key: ExKey) -> ExKey:
        return _precompose(key, subdivided_map(coface(n, i), n))

    def degeneracy(n: int, j: int, key: ExKey) -> ExKey:
        return _precompose(key, subdivided_map(codegeneracy(n, j), n))

    def label(n: int, key: ExKey) -> str:
        if n == 0:
            return key[0][1].base
        counters[n] = counters.get(n, 0) + 1
        return f"ex{n}.{counters[n]}"

    obj, tables = from_simplicial_object(
        f"Ex({sset.name})", max_dim, elements, face, degeneracy, label
    )
    # x goes to sd(Delta^d) -> Delta^d -> X, the last-vertex map followed by x
    assignment: dict[str, SimplexRef] = {}
    for d, cell in sset.all_cells():
        x = SimplexRef(d, cell)
        composite = {
            chain: sset.apply(x, [max(subset) for subset in _parse_chain(chain, d)])
            for _, chain in subdivided_simplex(d).all_cells()
        }
        assignment[cell] = tables[d][_ex_key(composite)]
    coaugmentation = SMap(sset, obj, assignment)
    _LOGGER.debug("Ex(%s) has cell counts %s", sset.name, obj.cell_counts())
    return ExResult(obj, coaugmentation, tables)


def ex(sset: SSet, max_dim: int, budget: Budget | None = None) -> tuple[SSet, SMap]:
    """Return Ex(sset) up to max_dim with the coaugmentation into it.

    Cells of sset above max_dim are dropped first, so the coaugmentation
    starts at the max_dim-skeleton.

    Raises:
        DimBudgetExceeded: If max_dim is above the configured bound.
        SearchBudgetExceeded: If enumerating maps out of sd(Delta^n) runs out of nodes.
    """
    result = _ex(_truncate_for_ex(sset, max_dim), max_dim, budget)
    return result.obj, result.coaugmentation


def _truncate_for_ex(sset: SSet, max_dim: int) -> SSet:
    return sset if sset.top_dim <= max_dim else skeleton(sset, max_dim)


def ex_map(f: SMap, max_dim: int, budget: Budget | None = None) -> SMap:
    """Return Ex(f) between the max_dim truncations."""
    source = _ex(_truncate_for_ex(f.source, max_dim), max_dim, budget)
    target = _ex(_truncate_for_ex(f.target, max_dim), max_dim, budget)
    assignment: dict[str, SimplexRef] = {}
    for n, table in enumerate(source.tables):
        for key, ref in table.items():
            if ref.is_degenerate:
                continue
            image = _ex_key({cell: f(value) for cell, value in key})
            assignment[ref.base] = target.tables[n][image]
    return SMap(source.obj, target.obj, assignment)


def ex_iterate(
    sset: SSet, k: int, max_dim: int, budget: Budget | None = None
) -> tuple[SSet, SMap]:
    """Apply Ex k times to the max_dim-skeleton, composing the coaugmentations."""
    current = _truncate_for_ex(sset, max_dim)
    total = identity_map(current)
    for round_ in range(k):
        current, step = ex(current, max_dim, budget)
        total = compose(step, total)
        _LOGGER.debug("Ex round %d: cell counts %s", round_ + 1, current.cell_counts())
    return current, total


def ex_map_iterate(f: SMap, k: int, max_dim: int, budget: Budget | None = None) -> SMap:
    """Return Ex^k(f) between the objects ex_iterate builds from its ends."""
    source = _truncate_for_ex(f.source, max_dim)
    target = _truncate_for_ex(f.target, max_dim)
    current = SMap(source, target, {cell: f.assignment[cell] for _, cell in source.all_cells()})
    for _ in range(k):
        current = ex_map(current, max_dim, budget)
    return current
