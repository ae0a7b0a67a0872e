"""Matching sets, coskeleta, Postnikov sections and the n-fibration criteria."""

from __future__ import annotations

import logging
from collections.abc import Mapping
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

from .config import Budget
from .config import resolve
from .const import VERDICT_CERTIFIED
from .const import VERDICT_UNKNOWN
from .exceptions import MalformedSpec
from .exceptions import NotFibrant
from .exceptions import PreconditionFailed
from .exceptions import SearchBudgetExceeded
from .kan import KanCertificate
from .kan import ex_iterate
from .kan import is_fibration
from .kan import is_kan
from .pi import EquivalenceVerdict
from .pi import weak_equivalence_check
from .scomplex import SimplexRef
from .scomplex import SMap
from .scomplex import SSet
from .scomplex import boundary
from .scomplex import compose
from .scomplex import identity_map
from .scomplex import is_isomorphism
from .scomplex import iter_homs
from .scomplex import pair_map
from .scomplex import parse_ref
from .scomplex import pullback
from .scomplex import skeleton
from .scomplex import terminal_map

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class MatchingElement:
    """A compatible tuple (x_0, ..., x_s) of (s-1)-simplices, i.e. a map from the s-sphere."""

    dim: int
    faces: tuple[SimplexRef, ...]

    def vertex0(self, sset: SSet) -> str:
        """Return the image of vertex 0 of the sphere."""
        if self.dim == 1:
            return self.faces[1].base
        return sset.vertex(self.faces[1], 0)

    def to_list(self) -> list[str]:
        """Return the faces in face-ref syntax."""
        return [str(ref) for ref in self.faces]


@dataclass(frozen=True)
class Truncation:
    """An n-truncated simplicial set, stored as its n-skeleton."""

    level: int
    sset: SSet


def matching_set(sset: SSet, s: int, budget: Budget | None = None) -> list[MatchingElement]:
    """Return M_s(sset), all maps from the boundary of Delta^s, in lexicographic order.

    Raises:
        PreconditionFailed: If s < 1.
        SearchBudgetExceeded: If the enumeration runs out of nodes.
    """
    if s < 1:
        raise PreconditionFailed("Matching sets start at s = 1")
    sphere = boundary(s)
    tops = sphere.nondegenerate(s - 1)
    # the face d_i of Delta^s is the top cell missing vertex i, listed in reverse
    ordered = list(reversed(tops))
    return sorted(
        MatchingElement(s, tuple(h.assignment[cell] for cell in ordered))
        for h in iter_homs(sphere, sset, budget=budget)
    )


def matching_map(sset: SSet, s: int) -> dict[SimplexRef, MatchingElement]:
    """Return sigma -> (d_0 sigma, ..., d_s sigma) on all s-simplices."""
    return {ref: MatchingElement(s, sset.boundary(ref)) for ref in sset.simplices(s)}


def truncate_at(sset: SSet, n: int) -> Truncation:
    """Return the n-truncation of sset."""
    return Truncation(n, skeleton(sset, n))


def _sphere_name(faces: Sequence[SimplexRef]) -> str:
    return "<" + ",".join(str(ref) for ref in faces) + ">"


def right_extend(truncation: Truncation, max_dim: int, budget: Budget | None = None) -> SSet:
    """Return the coskeletal extension of a truncation up to max_dim.

    Above the truncation level every sphere not already bounding a degenerate
    simplex becomes a new nondegenerate cell named after its faces.

    Raises:
        DimBudgetExceeded: If max_dim is above the configured bound.
    """
    resolve(budget).check_dim(max_dim)
    current = truncation.sset
    cells = {d: list(names) for d, names in enumerate(current.cells)}
    faces: dict[str, list[SimplexRef]] = {c: list(fs) for c, fs in current.faces.items()}
    for d in range(truncation.level + 1, max_dim + 1):
        if current.is_empty():
            break
        filled = current.boundary_index(d)
        fresh = [
            element.faces
            for element in matching_set(current, d, budget)
            if element.faces not in filled
        ]
        for sphere in fresh:
            name = _sphere_name(sphere)
            cells.setdefault(d, []).append(name)
            faces[name] = list(sphere)
        current = SSet.build(current.name, cells, faces)
        _LOGGER.debug("cosk stage %d: %d new cells", d, len(fresh))
    return SSet.build(
        f"cosk{truncation.level}({truncation.sset.name})", cells, faces
    )


def _fill_upward(
    source: SSet, target: SSet, assignment: dict[str, SimplexRef], above: int
) -> SMap:
    """Extend a map given up to dimension above into a coskeletal target."""
    for d, cell in source.all_cells():
        if d <= above:
            continue
        wanted = tuple(
            assignment[r.base].degenerate_by(r.surjection) for r in source.faces[cell]
        )
        fillers = target.boundary_index(d).get(wanted)
        if not fillers:
            raise MalformedSpec(f"Sphere of {cell!r} has no filler in {target.name}")
        assignment[cell] = fillers[0]
    return SMap(source, target, assignment)


def _bounded(sset: SSet, max_dim: int) -> SSet:
    return sset if sset.top_dim <= max_dim else skeleton(sset, max_dim)


def cosk(
    sset: SSet, n: int, max_dim: int, budget: Budget | None = None
) -> tuple[SSet, SMap]:
    """Return cosk_n(sset) up to max_dim with the coaugmentation from the max_dim-skeleton.

    Raises:
        PreconditionFailed: If n < 0.
        DimBudgetExceeded: If max_dim is above the configured bound.
    """
    if n < 0:
        raise PreconditionFailed("cosk needs n >= 0")
    source = _bounded(sset, max_dim)
    obj = right_extend(truncate_at(source, n), max_dim, budget)
    low = {cell: SimplexRef(d, cell) for d, cell in source.all_cells() if d <= n}
    coaugmentation = _fill_upward(source, obj, low, n)
    _LOGGER.info("cosk_%d(%s) has cell counts %s", n, sset.name, obj.cell_counts())
    return obj, coaugmentation


def cosk_map(f: SMap, n: int, max_dim: int, budget: Budget | None = None) -> SMap:
    """Return cosk_n(f) up to max_dim."""
    source, _ = cosk(f.source, n, max_dim, budget)
    target, _ = cosk(f.target, n, max_dim, budget)
    low = {cell: f.assignment[cell] for d, cell in source.all_cells() if d <= n}
    return _fill_upward(source, target, low, n)


def postnikov(
    sset: SSet,
    n: int,
    max_dim: int,
    fibrancy_dim: int | None = None,
    ex_rounds: int = 0,
    budget: Budget | None = None,
) -> tuple[SSet, SMap]:
    """Return P_n(sset) = cosk_{n+1} of a Kan model with the map p_n.

    Args:
        sset: Simplicial set.
        n: Truncation level.
        max_dim: Highest dimension built.
        fibrancy_dim: Horn dimension for the Kan certificate, n + 2 by default.
        ex_rounds: Rounds of Ex to apply first when sset is not Kan.
        budget: Search budget.

    Returns:
        P_n(sset) and the coaugmentation from the max_dim-skeleton.

    Raises:
        NotFibrant: If no Kan certificate can be obtained.
    """
    horn_dim = fibrancy_dim if fibrancy_dim is not None else n + 2
    model = _bounded(sset, max_dim)
    to_model = identity_map(model)
    certificate = is_kan(model, horn_dim, budget)
    if not certificate.is_certified and ex_rounds:
        model, to_model = ex_iterate(model, ex_rounds, max_dim, budget)
        certificate = is_kan(model, horn_dim, budget)
    if not certificate.is_certified:
        raise NotFibrant(
            f"{sset.name} is not certified Kan up to dimension {horn_dim}",
            witness=certificate.witness,
        )
    obj, p_n = cosk(model, n + 1, max_dim, budget)
    return obj, compose(p_n, to_model)


def postnikov_idempotence_check(
    sset: SSet, n: int, max_dim: int, budget: Budget | None = None
) -> dict[str, bool]:
    """Check that p_n(P_nX) and P_n(p_n) are isomorphisms up to max_dim."""
    obj, p_n = postnikov(sset, n, max_dim, budget=budget)
    _, again = cosk(obj, n + 1, max_dim, budget)
    functorial = cosk_map(p_n, n + 1, max_dim, budget)
    return {
        "unit_on_section": is_isomorphism(again),
        "section_of_unit": is_isomorphism(functorial),
    }


@dataclass(frozen=True)
class AdjunctionCount:
    """Both sides of a hom-set bijection with the outcome of the comparison."""

    left: int
    right: int
    bijective: bool

    def to_dict(self) -> dict[str, Any]:
        """Return the counts as a record."""
        return {"left": self.left, "right": self.right, "bijective": self.bijective}


def truncation_adjunction_check(
    sset: SSet, truncation: Truncation, max_dim: int, budget: Budget | None = None
) -> AdjunctionCount:
    """Compare truncated maps sk_n(sset) -> T with maps sset -> right_extend(T).

    Restriction to n-skeleta is the bijection; it is checked on the full lists.
    """
    source = _bounded(sset, max_dim)
    n = truncation.level
    left = [
        dict(h.assignment) for h in iter_homs(skeleton(source, n), truncation.sset, budget=budget)
    ]
    extended = right_extend(truncation, max_dim, budget)
    right = list(iter_homs(source, extended, budget=budget))
    restricted = [
        {cell: ref for cell, ref in h.assignment.items() if source.dim_of(cell) <= n}
        for h in right
    ]
    bijective = len(left) == len(right) and sorted(map(_key, left)) == sorted(
        map(_key, restricted)
    )
    return AdjunctionCount(len(left), len(right), bijective)


def _key(assignment: Mapping[str, SimplexRef]) -> tuple[tuple[str, SimplexRef], ...]:
    return tuple(sorted(assignment.items()))


def _preconditions(f: SMap, up_to_dim: int, budget: Budget | None) -> KanCertificate | None:
    """Return an Unknown certificate if a precondition cannot be decided.

    Raises:
        PreconditionFailed: If f is not a fibration or an end is not Kan.
    """
    checks = [is_fibration(f, up_to_dim, budget)]
    checks += [is_kan(x, up_to_dim, budget) for x in (f.source, f.target) if not x.is_empty()]
    for check in checks:
        if check.is_refuted:
            raise PreconditionFailed(
                f"{check.subject} fails the fibrancy precondition: {check.witness}"
            )
        if not check.is_certified:
            return check
    return None


def _subject(f: SMap) -> str:
    return f"{f.source.name}->{f.target.name}"


def is_n_fibration(
    f: SMap, n: int, up_to_dim: int, budget: Budget | None = None
) -> KanCertificate:
    """Decide whether f is an n-fibration by the matching-set criterion.

    Certified iff K_s -> M_sK x_{M_sL} L_s is onto for n+2 <= s <= up_to_dim
    and M_{n+2}K -> M_{n+2}L x_{L_0} K_0 is onto, with the basepoint of the
    sphere pinned to vertex 0.

    Raises:
        PreconditionFailed: If up_to_dim < n + 2, f is not a fibration or an end is not Kan.
    """
    if up_to_dim < n + 2:
        raise PreconditionFailed(f"n-fibration check needs up_to_dim >= {n + 2}")
    subject = _subject(f)
    try:
        pending = _preconditions(f, up_to_dim, budget)
        if pending is not None:
            return KanCertificate.unknown(subject, up_to_dim, f"precondition: {pending.detail}")
        source, target = f.source, f.target
        for s in range(n + 2, up_to_dim + 1):
            fillers = source.boundary_index(s)
            for element in matching_set(source, s, budget):
                pushed = tuple(f(ref) for ref in element.faces)
                candidates = fillers.get(element.faces, [])
                for y in target.boundary_index(s).get(pushed, []):
                    if not any(f(x) == y for x in candidates):
                        witness = {
                            "condition": "matching",
                            "s": s,
                            "sphere": element.to_list(),
                            "simplex": str(y),
                        }
                        _LOGGER.info("%s: sphere %s over %s is unhit", subject, witness, y)
                        return KanCertificate.refuted(subject, up_to_dim, witness)
        s = n + 2
        reached = {
            (tuple(f(ref) for ref in element.faces), element.vertex0(source))
            for element in matching_set(source, s, budget)
        }
        for sphere in matching_set(target, s, budget):
            for vertex in source.nondegenerate(0):
                if f.assignment[vertex].base != sphere.vertex0(target):
                    continue
                if (sphere.faces, vertex) not in reached:
                    witness = {
                        "condition": "based",
                        "s": s,
                        "sphere": sphere.to_list(),
                        "vertex": vertex,
                    }
                    return KanCertificate.refuted(subject, up_to_dim, witness)
    except SearchBudgetExceeded as err:
        _LOGGER.warning("%s: n-fibration check stopped: %s", subject, err)
        return KanCertificate.unknown(subject, up_to_dim, str(err))
    return KanCertificate.certified(subject, up_to_dim)


def is_n_type(
    sset: SSet, n: int, up_to_dim: int, budget: Budget | None = None
) -> KanCertificate:
    """Decide whether sset is an n-type, i.e. sset -> Delta^0 is an n-fibration."""
    return is_n_fibration(terminal_map(sset), n, up_to_dim, budget)


def sphere_unhit(f: SMap, witness: Mapping[str, Any]) -> bool:
    """Re-check a refuting witness of is_n_fibration."""
    s = int(witness["s"])
    if witness["condition"] == "matching":
        sphere = tuple(parse_ref(text, s - 1) for text in witness["sphere"])
        y = parse_ref(witness["simplex"], s)
        candidates = f.source.boundary_index(s).get(sphere, [])
        return not any(f(x) == y for x in candidates)
    sphere = tuple(parse_ref(text, s - 1) for text in witness["sphere"])
    vertex = witness["vertex"]
    return not any(
        tuple(f(ref) for ref in element.faces) == sphere and element.vertex0(f.source) == vertex
        for element in matching_set(f.source, s)
    )


@dataclass(frozen=True)
class SquareVerdict:
    """Outcome of the homotopy-pullback test of the Postnikov square."""

    verdict: str
    detail: str
    evidence: dict[str, Any]

    def to_dict(self) -> dict[str, Any]:
        """Return the verdict as a report record."""
        return {"verdict": self.verdict, "detail": self.detail, "evidence": self.evidence}


def q_fibration_square_check(
    f: SMap, n: int, dims: int, budget: Budget | None = None
) -> SquareVerdict:
    """Test whether the square X -> P_nX over Y -> P_nY is a homotopy pullback.

    Forms the strict pullback P = Y x_{P_nY} P_nX and the comparison X -> P.
    An isomorphism certifies; otherwise low-degree homotopy invariants decide.

    Raises:
        PreconditionFailed: If f is not a fibration or an end is not Kan.
    """
    fibrancy = min(dims, n + 2)
    pending = _preconditions(f, fibrancy, budget)
    if pending is not None:
        return SquareVerdict(VERDICT_UNKNOWN, "precondition undecided", pending.to_dict())
    source, target = _bounded(f.source, dims), _bounded(f.target, dims)
    bounded = SMap(source, target, {c: f.assignment[c] for _, c in source.all_cells()})
    p_source, unit_source = postnikov(source, n, dims, fibrancy, budget=budget)
    p_target, unit_target = postnikov(target, n, dims, fibrancy, budget=budget)
    p_f = _fill_upward(
        p_source,
        p_target,
        {cell: f.assignment[cell] for d, cell in p_source.all_cells() if d <= n + 1},
        n + 1,
    )
    square = pullback(unit_target, p_f, dims, budget)
    comparison = pair_map(square, bounded, unit_source)
    evidence: dict[str, Any] = {"pullback_cells": square.obj.cell_counts()}
    if is_isomorphism(comparison):
        return SquareVerdict(VERDICT_CERTIFIED, "comparison is an isomorphism", evidence)
    check: EquivalenceVerdict = weak_equivalence_check(
        comparison, max_s=min(n + 2, dims - 1), budget=budget
    )
    evidence.update(check.to_dict())
    _LOGGER.info("%s: square check at n=%d is %s", _subject(f), n, check.verdict)
    return SquareVerdict(check.verdict, "homotopy invariants of the comparison", evidence)
