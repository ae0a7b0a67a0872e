"""Small named simplicial sets, groupoids, maps and sites used across the kernel."""

from __future__ import annotations

from collections.abc import Callable

from .exceptions import UnknownObject
from .scomplex import SimplexRef
from .scomplex import SMap
from .scomplex import SSet
from .scomplex import boundary
from .scomplex import coproduct
from .scomplex import degenerate_vertex
from .scomplex import identity_map
from .scomplex import standard
from .scomplex import terminal_map
from .sgpd import FiniteGroupoid
from .sgpd import GroupoidFunctor
from .sgpd import nerve
from .sgpd import nerve_map
from .site import FiniteCat

NERVE_DIM = 4


def point() -> SSet:
    """Return the standard 0-simplex."""
    return standard(0)


def circle() -> SSet:
    """Return the circle with one vertex v and one edge e."""
    v = SimplexRef(0, "v")
    return SSet.build("S1", {0: ["v"], 1: ["e"]}, {"e": [v, v]})


def two_points() -> SSet:
    """Return two disjoint points named 0:0 and 1:0."""
    union, _ = coproduct([point(), point()], "D0+D0")
    return union


def klein_four() -> FiniteGroupoid:
    """Return the Klein four-group with elements e, a, b, c."""
    elements = ["e", "a", "b", "c"]
    table = [
        ["e", "a", "b", "c"],
        ["a", "e", "c", "b"],
        ["b", "c", "e", "a"],
        ["c", "b", "a", "e"],
    ]
    return FiniteGroupoid.from_group("V4", elements, table)


def cyclic_nerve(k: int, max_dim: int = NERVE_DIM) -> SSet:
    """Return the max_dim-skeleton of the nerve of Z/k."""
    return nerve(FiniteGroupoid.cyclic(k), max_dim)


def indiscrete_nerve(objects: tuple[str, ...] = ("x", "y"), max_dim: int = NERVE_DIM) -> SSet:
    """Return the max_dim-skeleton of the nerve of an indiscrete groupoid."""
    return nerve(FiniteGroupoid.indiscrete(objects), max_dim)


def _quotient(source: FiniteGroupoid, target: FiniteGroupoid, arrows: dict[str, str]) -> SMap:
    return nerve_map(GroupoidFunctor(source, target, {"*": "*"}, arrows), NERVE_DIM)


def _sum_over_two_points() -> SMap:
    """Return N(Z/2) + Delta^0 -> Delta^0 + Delta^0, collapsing the nerve."""
    union, _ = coproduct([cyclic_nerve(2), point()], "N(Z2)+D0")
    base = two_points()
    assignment = {}
    for d, cell in union.all_cells():
        tag = cell.split(":", 1)[0]
        assignment[cell] = degenerate_vertex(f"{tag}:0", d)
    return SMap(union, base, assignment)


OBJECTS: dict[str, Callable[[], SSet]] = {
    "Delta0": point,
    "Delta1": lambda: standard(1),
    "Delta2": lambda: standard(2),
    "S1": circle,
    "D0+D0": two_points,
    "dDelta2": lambda: boundary(2),
    "N(Z2)": lambda: cyclic_nerve(2),
    "N(Z3)": lambda: cyclic_nerve(3),
    "N(I2)": indiscrete_nerve,
}

KAN_OBJECTS = ("Delta0", "D0+D0", "N(Z2)", "N(Z3)", "N(I2)")

FIBRATIONS: dict[str, Callable[[], SMap]] = {
    "id(Delta0)": lambda: identity_map(point()),
    "id(D0+D0)": lambda: identity_map(two_points()),
    "D0+D0->*": lambda: terminal_map(two_points()),
    "N(Z2)->*": lambda: terminal_map(cyclic_nerve(2)),
    "id(N(Z2))": lambda: identity_map(cyclic_nerve(2)),
    "N(Z3)->*": lambda: terminal_map(cyclic_nerve(3)),
    "N(I2)->*": lambda: terminal_map(indiscrete_nerve()),
    "id(N(I2))": lambda: identity_map(indiscrete_nerve()),
    "N(V4)->N(Z2)": lambda: _quotient(
        klein_four(), FiniteGroupoid.cyclic(2), {"e": "e", "a": "g", "b": "e", "c": "g"}
    ),
    "N(Z4)->N(Z2)": lambda: _quotient(
        FiniteGroupoid.cyclic(4),
        FiniteGroupoid.cyclic(2),
        {"e": "e", "g": "g", "g2": "e", "g3": "g"},
    ),
    "N(Z2)+D0->D0+D0": _sum_over_two_points,
}

GROUPOIDS: dict[str, Callable[[], FiniteGroupoid]] = {
    "trivial": FiniteGroupoid.trivial,
    "Z2": lambda: FiniteGroupoid.cyclic(2),
    "Z3": lambda: FiniteGroupoid.cyclic(3),
    "V4": klein_four,
    "I2": lambda: FiniteGroupoid.indiscrete(("x", "y")),
}

SITES: dict[str, Callable[[], FiniteCat]] = {
    "single": FiniteCat.single,
    "arrow": FiniteCat.arrow,
}


def _lookup(table: dict[str, Callable[[], object]], name: str, kind: str) -> object:
    try:
        factory = table[name]
    except KeyError as err:
        raise UnknownObject(f"No corpus {kind} named {name!r}; known: {sorted(table)}") from err
    return factory()


def corpus_object(name: str) -> SSet:
    """Return a named corpus simplicial set.

    Raises:
        UnknownObject: If the name is not in the corpus.
    """
    result = _lookup(OBJECTS, name, "object")  # type: ignore[arg-type]
    assert isinstance(result, SSet)
    return result


def corpus_fibration(name: str) -> SMap:
    """Return a named corpus fibration."""
    result = _lookup(FIBRATIONS, name, "fibration")  # type: ignore[arg-type]
    assert isinstance(result, SMap)
    return result


def corpus_groupoid(name: str) -> FiniteGroupoid:
    """Return a named corpus groupoid."""
    result = _lookup(GROUPOIDS, name, "groupoid")  # type: ignore[arg-type]
    assert isinstance(result, FiniteGroupoid)
    return result


def corpus_site(name: str) -> FiniteCat:
    """Return a named test site."""
    result = _lookup(SITES, name, "site")  # type: ignore[arg-type]
    assert isinstance(result, FiniteCat)
    return result
